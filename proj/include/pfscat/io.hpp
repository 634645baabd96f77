#pragma once

#include <string>

#include "pfscat/types.hpp"

namespace pfscat {

/// Shortest text that reads back to the same double.
std::string fmt(double x);
/// Components formatted with fmt, separated by spaces.
std::string fmt(const RealVector& v);

/// Write `content` to `path` through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace pfscat
