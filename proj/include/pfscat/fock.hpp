#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "pfscat/modes.hpp"
#include "pfscat/types.hpp"

namespace pfscat {

/// Linear map on state vectors backed by an assembled sparse matrix.
class OperatorHandle {
 public:
  OperatorHandle() = default;
  explicit OperatorHandle(SparseMatrix m) : matrix_(std::move(m)) { matrix_.makeCompressed(); }

  Index rows() const { return matrix_.rows(); }
  Index cols() const { return matrix_.cols(); }
  Vector apply(const Vector& v) const { return matrix_ * v; }
  Vector apply_adjoint(const Vector& v) const { return matrix_.adjoint() * v; }
  const SparseMatrix& sparse() const { return matrix_; }
  Matrix dense() const { return Matrix(matrix_); }
  OperatorHandle adjoint() const { return OperatorHandle(SparseMatrix(matrix_.adjoint())); }

 private:
  SparseMatrix matrix_;
};

/// Occupation-number basis of the bosonic Fock space over M modes with at
/// most n_max photons in total. States are graded by total photon number,
/// and within a sector ordered lexicographically descending, so the
/// one-photon states appear in mode order.
class FockBasis {
 public:
  using Occupation = std::vector<int>;

  FockBasis(Index modes, int n_max);

  Index modes() const { return modes_; }
  int n_max() const { return n_max_; }
  Index size() const { return static_cast<Index>(states_.size()); }
  const Occupation& occupation(Index i) const { return states_[static_cast<std::size_t>(i)]; }
  int photon_number(Index i) const { return totals_[static_cast<std::size_t>(i)]; }
  /// -1 if the occupation is not in the basis (over the cutoff).
  Index index_of(const Occupation& n) const;
  Index vacuum() const { return 0; }
  Index one_photon(Index mode) const { return 1 + mode; }

  void dump(std::ostream& out) const;

 private:
  Index modes_;
  int n_max_;
  std::vector<Occupation> states_;
  std::vector<int> totals_;
  std::map<Occupation, Index> lookup_;
};

/// Standard ladder operator b_i^† (no quadrature weight). States at the
/// cutoff are mapped to zero.
SparseMatrix raising_matrix(const FockBasis& basis, Index mode);

/// a^*(h) = Σ_i h_i √w_i b_i^†, so that [a(g), a^*(h)] = Σ w conj(g) h.
OperatorHandle create(const PhotonFunction& h, const ModeGrid& grid, const FockBasis& basis);
/// a(h), the adjoint of a^*(h).
OperatorHandle annihilate(const PhotonFunction& h, const ModeGrid& grid, const FockBasis& basis);
/// Pointwise a(k_i, λ_i) = b_i / √w_i, so that a(h) = Σ w_i conj(h_i) a(k_i, λ_i).
OperatorHandle mode_annihilate(Index mode, const ModeGrid& grid, const FockBasis& basis);
/// φ(h) = (a(h) + a^*(h)) / √2.
OperatorHandle field(const PhotonFunction& h, const ModeGrid& grid, const FockBasis& basis);

/// Diagonal of H_f: Σ_i n_i ω(k_i).
RealVector field_energy_diagonal(const ModeGrid& grid, const FockBasis& basis);
/// Diagonal of the total photon number.
RealVector number_diagonal(const FockBasis& basis);

Vector hf_apply(const Vector& psi, const ModeGrid& grid, const FockBasis& basis);
Vector number_apply(const Vector& psi, const FockBasis& basis);

/// Fock vector with a single nonzero amplitude at the given basis state.
Vector fock_basis_vector(const FockBasis& basis, Index state);

/// φ ⊗ η with the matter index slow.
Vector product_state(const Vector& matter, const Vector& fock);

/// Mask over the full space selecting Fock states with photon number ≤ limit.
std::vector<bool> photon_guard(const FockBasis& basis, Index matter_dim, int limit);

/// Σ |ψ|² over Fock states at the photon cutoff.
double top_sector_weight(const Vector& psi, const FockBasis& basis);

}  // namespace pfscat
