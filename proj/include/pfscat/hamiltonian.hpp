#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pfscat/fock.hpp"
#include "pfscat/matter.hpp"
#include "pfscat/modes.hpp"
#include "pfscat/types.hpp"

namespace pfscat {

struct ModelParams {
  double mu = 2.0;
  int n_max = 2;
  PotentialSpec potential{};
  /// Refuse assembly when the estimated sparse storage exceeds this.
  double memory_budget_bytes = 2.0e9;
};

/// Named pieces of H. Their sum is the total Hamiltonian.
struct HamiltonianComponents {
  SparseMatrix kinetic;      // -Δ ⊗ 1
  SparseMatrix potential;    // V ⊗ 1
  SparseMatrix field_energy; // 1 ⊗ H_f
  SparseMatrix a_linear;     // Σ_j p_j·A(x_j) + A(x_j)·p_j
  SparseMatrix a_quadratic;  // Σ_j A(x_j)²
  SparseMatrix spin_b;       // μ Σ_j S_j·B(x_j)

  SparseMatrix total() const;
};

/// Pauli-Fierz model on matter ⊗ truncated Fock space. The full-space index
/// is matter_index × fock_dim + fock_index.
class PauliFierzModel {
 public:
  PauliFierzModel(ParticleGrid matter, ModeGrid modes, ModelParams params);

  const ParticleGrid& matter() const { return matter_; }
  const ModeGrid& modes() const { return modes_; }
  const FockBasis& fock() const { return fock_; }
  const ModelParams& params() const { return params_; }
  const RealVector& potential_values() const { return potential_; }
  Index dim() const { return matter_.dim() * fock_.size(); }
  bool spin_coupled() const { return matter_.has_spin(); }

  /// Rough storage estimate of the assembled H in bytes.
  static double estimate_bytes(const ParticleGrid& matter, const ModeGrid& modes, int n_max);

  const HamiltonianComponents& components() const { return components_; }
  /// Assembled H, symmetrized to exact hermiticity.
  const SparseMatrix& hamiltonian() const { return hamiltonian_; }
  /// Coupling part Σ_j (p_j + A(x_j))² + μ S_j·B(x_j).
  SparseMatrix coupling_part() const;

  SparseMatrix lift_matter(const SparseMatrix& m) const;
  SparseMatrix lift_fock(const SparseMatrix& f) const;
  /// Full-space operator for a matter multiplication given by its diagonal.
  SparseMatrix lift_matter_diagonal(const Vector& diag) const;

  /// A_l(x_j) = φ(G_{x_j, l}).
  SparseMatrix vector_potential(int particle, int axis) const;
  /// B_l(x_j) = φ(H_{x_j, l}); zero for d != 3.
  SparseMatrix magnetic_field(int particle, int component) const;

  /// D₁ for an arbitrary (possibly off-grid) mode.
  SparseMatrix d1(const Mode& mode) const;
  SparseMatrix d1(Index mode) const { return d1(modes_.mode(mode)); }
  Vector d1_apply(Index mode, const Vector& psi) const { return d1(mode) * psi; }

  /// Diagonal of the matter multiplication operator D₂(k, λ, k', λ').
  Vector d2_diagonal(const Mode& k, const Mode& kp) const;
  Vector d2_diagonal(Index k, Index kp) const { return d2_diagonal(modes_.mode(k), modes_.mode(kp)); }
  SparseMatrix d2(const Mode& k, const Mode& kp) const { return lift_matter_diagonal(d2_diagonal(k, kp)); }

  /// Full-space a^*(h), a(h), pointwise a(k_i, λ_i).
  SparseMatrix create(const PhotonFunction& h) const;
  SparseMatrix annihilate(const PhotonFunction& h) const;
  SparseMatrix mode_annihilate(Index mode) const;

  /// |ψ|² on Fock states at the cutoff.
  double top_sector_weight(const Vector& psi) const { return pfscat::top_sector_weight(psi, fock_); }
  /// Full-space mask of Fock states with at most `limit` photons.
  std::vector<bool> guard(int limit) const { return photon_guard(fock_, matter_.dim(), limit); }

 private:
  // Matter diagonal of g_a(x_j) = conj(G_{x_j,a}(k))/√2 for one mode.
  Vector coupling_profile(const Mode& mode, int particle, int axis) const;
  Vector spin_profile(const Mode& mode, int particle, int component) const;
  SparseMatrix field_operator(int particle, int component, bool magnetic) const;

  ParticleGrid matter_;
  ModeGrid modes_;
  ModelParams params_;
  FockBasis fock_;
  RealVector potential_;
  std::vector<SparseMatrix> raising_;
  std::vector<SparseMatrix> vector_potential_;  // [particle * d + axis]
  HamiltonianComponents components_;
  SparseMatrix hamiltonian_;
};

/// ‖[C, a^*(h)]ψ - Σ_i w_i h_i D₁(k_i)ψ‖ with C the coupling part.
double comm1_residual(const PauliFierzModel& model, const PhotonFunction& h, const Vector& psi);
/// ‖[a(h), D₁(k)]ψ - Σ_i w_i conj(h_i) D₂(k, k_i)ψ‖.
double comm2_residual(const PauliFierzModel& model, Index mode, const PhotonFunction& h,
                      const Vector& psi);

/// Coordinate text dump: one "row col re im" line per stored entry.
void write_coordinates(std::ostream& out, const SparseMatrix& m);

}  // namespace pfscat
