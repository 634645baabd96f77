#pragma once

#include <string>
#include <vector>

#include "pfscat/types.hpp"

namespace pfscat {

struct ParticleGridConfig {
  int dimension = 1;
  int points = 32;          // per axis, interior Dirichlet points
  double half_width = 6.0;  // box [-L, L]^d
  int particles = 1;        // N
  int two_spin = 0;         // 2s, 0 or 1
};

/// Finite-difference discretization of N particles in a Dirichlet box.
///
/// Basis ordering: the position configuration is the slow index (particle 1
/// slowest, axis 0 slowest within a particle), the spin configuration fast.
class ParticleGrid {
 public:
  explicit ParticleGrid(const ParticleGridConfig& config);

  int dimension() const { return config_.dimension; }
  int points() const { return config_.points; }
  int particles() const { return config_.particles; }
  int spin_states() const { return config_.two_spin + 1; }
  bool has_spin() const { return config_.two_spin == 1; }
  double spacing() const { return spacing_; }
  const ParticleGridConfig& config() const { return config_; }

  Index sites() const { return sites_; }
  Index dim() const { return dim_; }
  /// Coordinate of grid point i along any axis.
  double coordinate(int i) const { return -config_.half_width + (i + 1) * spacing_; }
  /// Position of particle j at matter basis index.
  RealVector position_of(Index matter_index, int particle) const;
  /// Diagonal of x_{j,axis}.
  RealVector position(int particle, int axis) const;

  /// -Δ summed over particles (positive semidefinite stencil).
  SparseMatrix negative_laplacian() const;
  /// p_{j,axis} = -i × central first difference.
  SparseMatrix momentum(int particle, int axis) const;
  /// (S_j)_l = ½σ_l on spin slot j; zero map when s = 0.
  SparseMatrix spin(int particle, int component) const;

 private:
  Index site_index(Index matter_index, int particle) const;
  int axis_coordinate(Index site, int axis) const;

  ParticleGridConfig config_;
  double spacing_;
  Index sites_;
  Index spin_dim_;
  Index dim_;
};

Vector laplacian_apply(const ParticleGrid& grid, const Vector& psi);
Vector momentum_apply(const ParticleGrid& grid, int particle, int axis, const Vector& psi);
Vector spin_apply(const ParticleGrid& grid, int particle, int component, const Vector& psi);

/// Named potential with parameters.
///
///  harmonic      V = strength·|x|²                    (strength)
///  box           V = 0
///  double-well   V = depth·((|x|²/b² - 1)² - 1)         (depth, b)
///  soft-coulomb  V = -charge / sqrt(|x|² + a²), d = 1    (charge, a)
///  tabulated     piecewise-linear from (x, V) rows, d = 1 (file)
///
/// For two particles the one-body potential acts on each and a soft-core
/// repulsion interaction / sqrt(|x1-x2|² + a²) is added when interaction > 0.
struct PotentialSpec {
  std::string name = "harmonic";
  double strength = 0.5;
  double depth = 5.0;
  double well_position = 2.0;
  double charge = 1.0;
  double softening = 1.0;
  double interaction = 0.0;
  std::vector<double> table_x{};
  std::vector<double> table_v{};
};

/// Load (x, V) columns from a plain-text file into spec.table_x/table_v.
void load_potential_table(PotentialSpec& spec, const std::string& path);

/// V on every matter basis state. Throws ConfigError for unknown names or
/// when V is not finite.
RealVector potential_values(const ParticleGrid& grid, const PotentialSpec& spec);

/// Largest |V(x1,x2) - V(x2,x1)| over all sampled configurations (N = 2).
double exchange_asymmetry(const ParticleGrid& grid, const RealVector& v);

struct Eigenpair {
  double energy;
  Vector vector;
};

/// Lowest eigenpairs of -Δ + V by dense diagonalization.
std::vector<Eigenpair> atomic_eigensystem(const ParticleGrid& grid, const RealVector& potential,
                                          int count, Index dense_threshold = 6000);

}  // namespace pfscat
