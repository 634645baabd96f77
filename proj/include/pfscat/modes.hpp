#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfscat/types.hpp"

namespace pfscat {

/// Ultraviolet cutoff and coupling strength folded into one function of |k|.
struct Cutoff {
  enum class Shape { kSharp, kGaussian };
  Shape shape = Shape::kSharp;
  double charge = 0.1;  // e
  double lambda = 2.0;  // Λ

  /// κ(k): e·1_{|k|<Λ} (sharp) or e·exp(-|k|²/(2Λ²)) (gaussian).
  Scalar operator()(double abs_k) const;
};

/// One photon mode: momentum, polarization and the per-mode data the
/// operators need. Off-grid modes (continuity scans) use the same type with
/// an arbitrary weight.
struct Mode {
  RealVector k;        // momentum, size d
  int polarization;    // 1-based
  double weight;       // quadrature weight, > 0
  Scalar kappa;        // κ(k)
  RealVector epsilon;  // polarization vector, unit norm, size d
  double omega;        // |k|
};

struct GridConfig {
  int dimension = 1;
  std::vector<double> shells{0.5, 1.0};
  int directions_per_shell = 2;        // ignored for d = 1 (always ±k)
  std::vector<double> shell_widths{};  // empty: midpoint spacing
  Cutoff cutoff{};
  double momentum_floor = 1e-3;
};

/// Discretized photon one-particle space. Immutable after construction.
class ModeGrid {
 public:
  ModeGrid(int dimension, std::vector<Mode> modes, double momentum_floor = 1e-3);

  int dimension() const { return dimension_; }
  int polarizations() const { return dimension_ == 3 ? 2 : 1; }
  Index size() const { return static_cast<Index>(modes_.size()); }
  const Mode& mode(Index i) const { return modes_[static_cast<std::size_t>(i)]; }
  const std::vector<Mode>& modes() const { return modes_; }

  double omega(Index i) const { return mode(i).omega; }
  double weight(Index i) const { return mode(i).weight; }
  RealVector omegas() const;
  RealVector weights() const;

  /// Groups of mode indices with equal |k|, ordered by first appearance.
  const std::vector<std::vector<Index>>& shells() const { return shells_; }
  Index shell_of(Index i) const { return shell_index_[static_cast<std::size_t>(i)]; }
  /// All pairs (i, j), i < j, sharing a shell.
  const std::vector<std::pair<Index, Index>>& shell_pairs() const { return shell_pairs_; }
  bool same_shell(Index i, Index j) const { return shell_of(i) == shell_of(j); }

 private:
  int dimension_;
  std::vector<Mode> modes_;
  std::vector<std::vector<Index>> shells_;
  std::vector<Index> shell_index_;
  std::vector<std::pair<Index, Index>> shell_pairs_;
};

ModeGrid build_grid(const GridConfig& config);

/// Polarization vector ε(k, λ) for a nonzero k. d = 3 gives the two
/// transverse vectors of a right-handed frame; d = 2 the in-plane normal;
/// d = 1 the scalar unit.
RealVector polarization_vector(const RealVector& k, int polarization);

/// Mode data for an arbitrary momentum using the grid's cutoff.
Mode make_mode(const RealVector& k, int polarization, const Cutoff& cutoff, double weight = 1.0);

/// ω(k) = |k|.
inline double omega(const RealVector& k) { return k.norm(); }

/// Discrete ‖h‖_ω = (Σ w |h|² (1 + 1/|k|))^{1/2}.
double omega_norm(const PhotonFunction& h, const ModeGrid& grid);

/// Discrete inner product ⟨g, h⟩ = Σ w conj(g) h.
Scalar inner(const PhotonFunction& g, const PhotonFunction& h, const ModeGrid& grid);

/// G_x(k, λ) = (2π)^{-d/2} κ(k) |k|^{-1/2} ε(k, λ) e^{-ik·x}.
Eigen::VectorXcd form_factor_G(const RealVector& x, const Mode& mode);

/// H_x(k, λ) = (2π)^{-3/2} κ(k) |k|^{-1/2} (-ik) ∧ ε(k, λ) e^{-ik·x}. Zero
/// vector of size d when d != 3; throws ConfigError if spin coupling is
/// requested in that case.
Eigen::VectorXcd form_factor_H(const RealVector& x, const Mode& mode, bool spin_enabled = false);

/// Plain-text table: one line per mode, columns d, k components, λ, w,
/// Re κ, Im κ.
void write_grid_table(std::ostream& out, const ModeGrid& grid);
ModeGrid read_grid_table(std::istream& in, double momentum_floor = 1e-3);

}  // namespace pfscat
