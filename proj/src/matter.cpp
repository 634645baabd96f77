#include "pfscat/matter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pfscat {

ParticleGrid::ParticleGrid(const ParticleGridConfig& config) : config_(config) {
  if (config.dimension < 1 || config.dimension > 3) throw ConfigError("matter dimension must be 1, 2 or 3");
  if (config.points < 2) throw ConfigError("matter grid needs at least 2 points per axis");
  if (!(config.half_width > 0.0)) throw ConfigError("matter half_width must be > 0");
  if (config.particles < 1) throw ConfigError("particle count must be >= 1");
  if (config.particles >= 3) throw ConfigError("particle count N >= 3 is not supported");
  if (config.two_spin != 0 && config.two_spin != 1) throw ConfigError("spin must be 0 or 1/2");
  spacing_ = 2.0 * config.half_width / (config.points + 1);
  sites_ = 1;
  for (int a = 0; a < config.dimension; ++a) sites_ *= config.points;
  Index positions = 1;
  spin_dim_ = 1;
  for (int j = 0; j < config.particles; ++j) {
    positions *= sites_;
    spin_dim_ *= spin_states();
  }
  dim_ = positions * spin_dim_;
}

Index ParticleGrid::site_index(Index matter_index, int particle) const {
  Index pos = matter_index / spin_dim_;
  for (int j = config_.particles - 1; j > particle; --j) pos /= sites_;
  return pos % sites_;
}

int ParticleGrid::axis_coordinate(Index site, int axis) const {
  for (int a = config_.dimension - 1; a > axis; --a) site /= config_.points;
  return static_cast<int>(site % config_.points);
}

RealVector ParticleGrid::position_of(Index matter_index, int particle) const {
  const Index site = site_index(matter_index, particle);
  RealVector x(config_.dimension);
  for (int a = 0; a < config_.dimension; ++a) x(a) = coordinate(axis_coordinate(site, a));
  return x;
}

RealVector ParticleGrid::position(int particle, int axis) const {
  RealVector x(dim_);
  for (Index m = 0; m < dim_; ++m) x(m) = coordinate(axis_coordinate(site_index(m, particle), axis));
  return x;
}

namespace {

// Stride (in matter indices) of a unit step along `axis` of `particle`.
Index axis_stride(const ParticleGrid& g, Index spin_dim, int particle, int axis) {
  Index stride = spin_dim;
  for (int j = g.particles() - 1; j > particle; --j) stride *= g.sites();
  for (int a = g.dimension() - 1; a > axis; --a) stride *= g.points();
  return stride;
}

Index spin_dimension(const ParticleGrid& g) {
  Index s = 1;
  for (int j = 0; j < g.particles(); ++j) s *= g.spin_states();
  return s;
}

}  // namespace

SparseMatrix ParticleGrid::negative_laplacian() const {
  std::vector<Triplet> t;
  const double inv_h2 = 1.0 / (spacing_ * spacing_);
  for (Index m = 0; m < dim_; ++m) {
    double diag = 0.0;
    for (int j = 0; j < config_.particles; ++j) {
      const Index site = site_index(m, j);
      for (int a = 0; a < config_.dimension; ++a) {
        diag += 2.0 * inv_h2;
        const int c = axis_coordinate(site, a);
        const Index stride = axis_stride(*this, spin_dim_, j, a);
        if (c > 0) t.emplace_back(m, m - stride, -inv_h2);
        if (c + 1 < config_.points) t.emplace_back(m, m + stride, -inv_h2);
      }
    }
    t.emplace_back(m, m, diag);
  }
  SparseMatrix out(dim_, dim_);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix ParticleGrid::momentum(int particle, int axis) const {
  if (particle < 0 || particle >= config_.particles || axis < 0 || axis >= config_.dimension)
    throw std::out_of_range("momentum: particle or axis out of range");
  std::vector<Triplet> t;
  const Scalar c = -kI / (2.0 * spacing_);
  const Index stride = axis_stride(*this, spin_dim_, particle, axis);
  for (Index m = 0; m < dim_; ++m) {
    const int coord = axis_coordinate(site_index(m, particle), axis);
    if (coord + 1 < config_.points) t.emplace_back(m, m + stride, c);
    if (coord > 0) t.emplace_back(m, m - stride, -c);
  }
  SparseMatrix out(dim_, dim_);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix ParticleGrid::spin(int particle, int component) const {
  SparseMatrix out(dim_, dim_);
  if (!has_spin()) return out;
  if (component < 0 || component > 2) throw std::out_of_range("spin component must be 0, 1 or 2");
  Eigen::Matrix2cd pauli;
  switch (component) {
    case 0: pauli << 0, 1, 1, 0; break;
    case 1: pauli << 0, -kI, kI, 0; break;
    default: pauli << 1, 0, 0, -1; break;
  }
  const Index sd = spin_dim_;
  Index stride = 1;
  for (int j = config_.particles - 1; j > particle; --j) stride *= 2;
  std::vector<Triplet> t;
  for (Index m = 0; m < dim_; ++m) {
    const Index s = m % sd;
    const int sigma = static_cast<int>((s / stride) % 2);
    for (int sp = 0; sp < 2; ++sp) {
      const Scalar v = 0.5 * pauli(sp, sigma);
      if (v == Scalar(0.0)) continue;
      t.emplace_back(m + (sp - sigma) * stride, m, v);
    }
  }
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

Vector laplacian_apply(const ParticleGrid& grid, const Vector& psi) {
  return -(grid.negative_laplacian() * psi);
}

Vector momentum_apply(const ParticleGrid& grid, int particle, int axis, const Vector& psi) {
  return grid.momentum(particle, axis) * psi;
}

Vector spin_apply(const ParticleGrid& grid, int particle, int component, const Vector& psi) {
  return grid.spin(particle, component) * psi;
}

void load_potential_table(PotentialSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open potential table '" + path + "'");
  spec.table_x.clear();
  spec.table_v.clear();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream row(line);
    double x = 0, v = 0;
    if (!(row >> x >> v))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two columns x V");
    if (!spec.table_x.empty() && !(x > spec.table_x.back()))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": x values must increase");
    spec.table_x.push_back(x);
    spec.table_v.push_back(v);
  }
  if (spec.table_x.size() < 2) throw ConfigError(path + ": potential table needs at least two rows");
}

namespace {

double interpolate(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
  if (x <= xs.front()) return vs.front();
  if (x >= xs.back()) return vs.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1.0 - t) * vs[i - 1] + t * vs[i];
}

double one_body(const PotentialSpec& spec, const RealVector& x) {
  const double r2 = x.squaredNorm();
  if (spec.name == "harmonic") return spec.strength * r2;
  if (spec.name == "box") return 0.0;
  if (spec.name == "double-well") {
    const double u = r2 / (spec.well_position * spec.well_position) - 1.0;
    return spec.depth * (u * u - 1.0);
  }
  if (spec.name == "soft-coulomb") {
    if (x.size() != 1) throw ConfigError("soft-coulomb potential is one-dimensional");
    return -spec.charge / std::sqrt(r2 + spec.softening * spec.softening);
  }
  if (spec.name == "tabulated") {
    if (x.size() != 1) throw ConfigError("tabulated potential is one-dimensional");
    if (spec.table_x.size() < 2) throw ConfigError("tabulated potential has no table loaded");
    return interpolate(spec.table_x, spec.table_v, x(0));
  }
  throw ConfigError("unknown potential '" + spec.name + "'");
}

}  // namespace

RealVector potential_values(const ParticleGrid& grid, const PotentialSpec& spec) {
  RealVector v(grid.dim());
  for (Index m = 0; m < grid.dim(); ++m) {
    double total = 0.0;
    for (int j = 0; j < grid.particles(); ++j) total += one_body(spec, grid.position_of(m, j));
    if (grid.particles() == 2 && spec.interaction > 0.0) {
      const double r2 = (grid.position_of(m, 0) - grid.position_of(m, 1)).squaredNorm();
      total += spec.interaction / std::sqrt(r2 + spec.softening * spec.softening);
    }
    if (!std::isfinite(total)) throw ConfigError("potential is not finite on the grid");
    v(m) = total;
  }
  return v;
}

double exchange_asymmetry(const ParticleGrid& grid, const RealVector& v) {
  if (grid.particles() != 2) return 0.0;
  const Index sd = spin_dimension(grid);
  double worst = 0.0;
  for (Index m = 0; m < grid.dim(); m += sd) {
    const Index pos = m / sd;
    const Index s1 = pos / grid.sites(), s2 = pos % grid.sites();
    const Index swapped = (s2 * grid.sites() + s1) * sd;
    worst = std::max(worst, std::abs(v(m) - v(swapped)));
  }
  return worst;
}

std::vector<Eigenpair> atomic_eigensystem(const ParticleGrid& grid, const RealVector& potential,
                                          int count, Index dense_threshold) {
  if (grid.dim() > dense_threshold)
    throw SolverError("atomic_eigensystem: matter dimension " + std::to_string(grid.dim()) +
                      " exceeds the dense threshold " + std::to_string(dense_threshold));
  Matrix h = Matrix(grid.negative_laplacian());
  h.diagonal() += potential.cast<Scalar>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw SolverError("atomic_eigensystem: dense eigensolver failed");
  std::vector<Eigenpair> out;
  const int n = std::min<int>(count, static_cast<int>(grid.dim()));
  for (int i = 0; i < n; ++i) {
    Vector v = es.eigenvectors().col(i);
    // phase convention: largest component real positive
    Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::conj(v(imax)) / std::abs(v(imax));
    out.push_back({es.eigenvalues()(i), std::move(v)});
  }
  return out;
}

}  // namespace pfscat
