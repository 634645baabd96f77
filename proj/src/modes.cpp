#include "pfscat/modes.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace pfscat {

namespace {

constexpr double kShellTolerance = 1e-12;

std::vector<RealVector> shell_directions(int d, int count) {
  std::vector<RealVector> dirs;
  if (d == 1) {
    dirs.push_back(RealVector::Constant(1, 1.0));
    dirs.push_back(RealVector::Constant(1, -1.0));
    return dirs;
  }
  if (count < 1) throw ConfigError("directions_per_shell must be >= 1");
  if (d == 2) {
    for (int m = 0; m < count; ++m) {
      const double phi = 2.0 * kPi * m / count;
      RealVector v(2);
      v << std::cos(phi), std::sin(phi);
      dirs.push_back(v);
    }
    return dirs;
  }
  if (count == 6) {
    for (int axis = 0; axis < 3; ++axis) {
      for (double sign : {1.0, -1.0}) {
        RealVector v = RealVector::Zero(3);
        v(axis) = sign;
        dirs.push_back(v);
      }
    }
    return dirs;
  }
  // Fibonacci lattice on the unit sphere.
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int m = 0; m < count; ++m) {
    const double z = 1.0 - (2.0 * m + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * m;
    RealVector v(3);
    v << r * std::cos(phi), r * std::sin(phi), z;
    dirs.push_back(v.normalized());
  }
  return dirs;
}

double surface_factor(int d, double r) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi * r;
    default: return 4.0 * kPi * r * r;
  }
}

std::vector<double> default_widths(const std::vector<double>& radii) {
  const std::size_t n = radii.size();
  std::vector<double> widths(n, 1.0);
  if (n < 2) return widths;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return radii[a] < radii[b]; });
  auto r = [&](std::size_t pos) { return radii[order[pos]]; };
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (pos == 0) widths[order[pos]] = r(1) - r(0);
    else if (pos + 1 == n) widths[order[pos]] = r(n - 1) - r(n - 2);
    else widths[order[pos]] = 0.5 * (r(pos + 1) - r(pos - 1));
  }
  return widths;
}

}  // namespace

Scalar Cutoff::operator()(double abs_k) const {
  switch (shape) {
    case Shape::kSharp: return abs_k < lambda ? Scalar(charge) : Scalar(0.0);
    case Shape::kGaussian: return Scalar(charge * std::exp(-abs_k * abs_k / (2.0 * lambda * lambda)));
  }
  return 0.0;
}

ModeGrid::ModeGrid(int dimension, std::vector<Mode> modes, double momentum_floor)
    : dimension_(dimension), modes_(std::move(modes)) {
  if (dimension_ < 1 || dimension_ > 3) throw ConfigError("mode grid dimension must be 1, 2 or 3");
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const Mode& m = modes_[i];
    if (m.k.size() != dimension_)
      throw ConfigError("mode " + std::to_string(i) + ": momentum has wrong dimension");
    if (!(m.omega > momentum_floor)) {
      std::ostringstream msg;
      msg << "mode " << i << ": |k| = " << m.omega << " is not above the momentum floor "
          << momentum_floor;
      throw ConfigError(msg.str());
    }
    if (!(m.weight > 0.0)) throw ConfigError("mode " + std::to_string(i) + ": weight must be > 0");
  }
  shell_index_.assign(modes_.size(), -1);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (shell_index_[i] >= 0) continue;
    const Index s = static_cast<Index>(shells_.size());
    shells_.push_back({static_cast<Index>(i)});
    shell_index_[i] = s;
    for (std::size_t j = i + 1; j < modes_.size(); ++j) {
      if (shell_index_[j] >= 0) continue;
      const double scale = std::max(modes_[i].omega, modes_[j].omega);
      if (std::abs(modes_[i].omega - modes_[j].omega) <= kShellTolerance * scale) {
        shell_index_[j] = s;
        shells_.back().push_back(static_cast<Index>(j));
      }
    }
  }
  for (const auto& shell : shells_)
    for (std::size_t a = 0; a < shell.size(); ++a)
      for (std::size_t b = a + 1; b < shell.size(); ++b)
        shell_pairs_.emplace_back(std::min(shell[a], shell[b]), std::max(shell[a], shell[b]));
  std::sort(shell_pairs_.begin(), shell_pairs_.end());
}

RealVector ModeGrid::omegas() const {
  RealVector out(size());
  for (Index i = 0; i < size(); ++i) out(i) = omega(i);
  return out;
}

RealVector ModeGrid::weights() const {
  RealVector out(size());
  for (Index i = 0; i < size(); ++i) out(i) = weight(i);
  return out;
}

RealVector polarization_vector(const RealVector& k, int polarization) {
  const Index d = k.size();
  const double norm = k.norm();
  if (!(norm > 0.0)) throw ConfigError("polarization vector requested for k = 0");
  if (d == 1) {
    if (polarization != 1) throw ConfigError("d = 1 has a single polarization");
    return RealVector::Constant(1, 1.0);
  }
  if (d == 2) {
    if (polarization != 1) throw ConfigError("d = 2 has a single polarization");
    RealVector e(2);
    e << -k(1) / norm, k(0) / norm;
    return e;
  }
  if (polarization != 1 && polarization != 2) throw ConfigError("d = 3 polarization must be 1 or 2");
  const Eigen::Vector3d khat = Eigen::Vector3d(k(0), k(1), k(2)) / norm;
  // Reference axis: z unless k is nearly parallel to it.
  Eigen::Vector3d ref = std::abs(khat.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d e1 = khat.cross(ref).normalized();
  if (polarization == 1) return RealVector(e1);
  return RealVector(khat.cross(e1).normalized());
}

Mode make_mode(const RealVector& k, int polarization, const Cutoff& cutoff, double weight) {
  Mode m;
  m.k = k;
  m.polarization = polarization;
  m.weight = weight;
  m.omega = omega(k);
  m.kappa = cutoff(m.omega);
  m.epsilon = polarization_vector(k, polarization);
  return m;
}

ModeGrid build_grid(const GridConfig& config) {
  const int d = config.dimension;
  if (d < 1 || d > 3) throw ConfigError("model.dimension must be 1, 2 or 3");
  if (!(config.cutoff.lambda > 0.0)) throw ConfigError("cutoff Lambda must be > 0");
  if (config.shells.empty()) throw ConfigError("at least one momentum shell is required");
  if (!config.shell_widths.empty() && config.shell_widths.size() != config.shells.size())
    throw ConfigError("shell_widths must match the number of shells");
  for (double r : config.shells) {
    if (!(r > config.momentum_floor)) {
      std::ostringstream msg;
      msg << "shell radius " << r << " is not above the momentum floor " << config.momentum_floor;
      throw ConfigError(msg.str());
    }
  }
  const std::vector<double> widths =
      config.shell_widths.empty() ? default_widths(config.shells) : config.shell_widths;
  const int pols = d == 3 ? 2 : 1;
  std::vector<Mode> modes;
  for (std::size_t s = 0; s < config.shells.size(); ++s) {
    const double r = config.shells[s];
    const auto dirs = shell_directions(d, config.directions_per_shell);
    const double w = surface_factor(d, r) * widths[s] / static_cast<double>(dirs.size());
    for (const RealVector& dir : dirs) {
      for (int lam = 1; lam <= pols; ++lam) {
        Mode m = make_mode(RealVector(r * dir), lam, config.cutoff, w);
        m.omega = r;  // exact shell energy
        modes.push_back(std::move(m));
      }
    }
  }
  return ModeGrid(d, std::move(modes), config.momentum_floor);
}

double omega_norm(const PhotonFunction& h, const ModeGrid& grid) {
  double sum = 0.0;
  for (Index i = 0; i < grid.size(); ++i)
    sum += grid.weight(i) * std::norm(h(i)) * (1.0 + 1.0 / grid.omega(i));
  return std::sqrt(sum);
}

Scalar inner(const PhotonFunction& g, const PhotonFunction& h, const ModeGrid& grid) {
  Scalar sum = 0.0;
  for (Index i = 0; i < grid.size(); ++i) sum += grid.weight(i) * std::conj(g(i)) * h(i);
  return sum;
}

Eigen::VectorXcd form_factor_G(const RealVector& x, const Mode& mode) {
  const Index d = mode.k.size();
  const double pref = std::pow(2.0 * kPi, -0.5 * static_cast<double>(d)) / std::sqrt(mode.omega);
  const Scalar phase = std::exp(-kI * mode.k.dot(x));
  return (pref * mode.kappa * phase) * mode.epsilon.cast<Scalar>();
}

Eigen::VectorXcd form_factor_H(const RealVector& x, const Mode& mode, bool spin_enabled) {
  const Index d = mode.k.size();
  if (d != 3) {
    if (spin_enabled) throw ConfigError("magnetic form factor requires d = 3 when spin is enabled");
    return Eigen::VectorXcd::Zero(d);
  }
  const Eigen::Vector3d k(mode.k(0), mode.k(1), mode.k(2));
  const Eigen::Vector3d e(mode.epsilon(0), mode.epsilon(1), mode.epsilon(2));
  const double pref = std::pow(2.0 * kPi, -1.5) / std::sqrt(mode.omega);
  const Scalar phase = std::exp(-kI * mode.k.dot(x));
  const Eigen::Vector3cd curl = -kI * k.cross(e).cast<Scalar>();
  return (pref * mode.kappa * phase) * curl;
}

void write_grid_table(std::ostream& out, const ModeGrid& grid) {
  out << std::setprecision(17);
  for (const Mode& m : grid.modes()) {
    out << grid.dimension();
    for (Index a = 0; a < m.k.size(); ++a) out << ' ' << m.k(a);
    out << ' ' << m.polarization << ' ' << m.weight << ' ' << m.kappa.real() << ' ' << m.kappa.imag()
        << '\n';
  }
}

ModeGrid read_grid_table(std::istream& in, double momentum_floor) {
  std::vector<Mode> modes;
  int dim = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream row(line);
    int d = 0;
    row >> d;
    if (!row || d < 1 || d > 3) throw ConfigError("grid table line " + std::to_string(lineno) + ": bad dimension");
    if (dim == 0) dim = d;
    if (d != dim) throw ConfigError("grid table line " + std::to_string(lineno) + ": mixed dimensions");
    RealVector k(d);
    for (int a = 0; a < d; ++a) row >> k(a);
    int lam = 0;
    double w = 0, re = 0, im = 0;
    row >> lam >> w >> re >> im;
    if (!row) throw ConfigError("grid table line " + std::to_string(lineno) + ": expected d, k, lambda, w, Re kappa, Im kappa");
    if (!(k.norm() > momentum_floor))
      throw ConfigError("grid table line " + std::to_string(lineno) + ": |k| below momentum floor");
    Mode m;
    m.k = k;
    m.polarization = lam;
    m.weight = w;
    m.kappa = Scalar(re, im);
    m.omega = k.norm();
    m.epsilon = polarization_vector(k, lam);
    modes.push_back(std::move(m));
  }
  if (modes.empty()) throw ConfigError("grid table is empty");
  return ModeGrid(dim, std::move(modes), momentum_floor);
}

}  // namespace pfscat
