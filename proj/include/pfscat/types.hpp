#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace pfscat {

using Real = double;
using Scalar = std::complex<double>;
using Index = Eigen::Index;

using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, Index>;
using Triplet = Eigen::Triplet<Scalar, Index>;

/// Photon wave packet: one complex amplitude per grid mode.
using PhotonFunction = Eigen::VectorXcd;

inline constexpr Scalar kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Malformed or inconsistent run parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method did not reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), residual_history_(std::move(history)) {}
  const std::vector<double>& residual_history() const { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

/// Kronecker product of two sparse matrices, A ⊗ B, with A the slow index.
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

SparseMatrix sparse_identity(Index n);

/// Diagonal sparse matrix from a vector of entries.
template <typename Derived>
SparseMatrix sparse_diagonal(const Eigen::MatrixBase<Derived>& diag) {
  const Index n = diag.size();
  SparseMatrix m(n, n);
  m.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Index i = 0; i < n; ++i) m.insert(i, i) = Scalar(diag(i));
  m.makeCompressed();
  return m;
}

/// Largest absolute entry of A - A^H.
double hermiticity_defect(const SparseMatrix& a);

/// Complex Gaussian vector of unit norm.
Vector random_unit_vector(Index n, std::mt19937_64& rng);
/// Complex Gaussian entries, not normalized.
Vector random_gaussian(Index n, std::mt19937_64& rng);

}  // namespace pfscat
