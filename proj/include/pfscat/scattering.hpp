#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pfscat/hamiltonian.hpp"
#include "pfscat/propagation.hpp"
#include "pfscat/spectral.hpp"
#include "pfscat/types.hpp"

namespace pfscat {

enum class Direction { kIn, kOut };
enum class CookPath { kTimeQuadrature, kResolvent };

struct ScatteringOptions {
  SolveOptions solve{};
  QuadratureOptions quadrature{};
  Index dense_threshold = 4000;  // eigendecomposition for propagation at or below
  double krylov_tol = 1e-12;
  double stability_tol = 1e-2;
  double quadrature_budget = 1e-6;
  int threads = 1;
};

struct TMatrixEntry {
  Index k = 0;
  Index kp = 0;
  double eta = 0.0;
  Scalar value{};
  std::array<Scalar, 3> terms{};  // resolvent-set term, boundary-value term, D₂ term
  Scalar extrapolated{};
  bool stable = false;
};

struct PropTmatResult {
  Index k;
  double epsilon;
  Scalar lhs;            // ⟨D₁(k)ψ, a*_in,ε(h)ψ⟩ by time quadrature
  Scalar rhs;            // Σ w h T(k, ·; η = ε)
  double discrepancy;
  double guard_budget;   // Σ w|h| (|⟨Γψ, ψ⟩| + ‖r‖‖D₁(k)*ψ‖)
  Scalar predicted;      // Σ w h (⟨Γψ, ψ⟩ + ⟨r, D₁(k)*ψ⟩)
  double budget;         // quadrature budget + guard budget
  bool pass;
};

struct IntertwineResult {
  double t;
  double epsilon;
  double discrepancy;       // ‖e^{iHt} X(f) - X(e^{iωt} f) e^{iHt}ψ‖
  double predicted_norm;    // norm of the drift from the defect generator
  double prediction_error;  // ‖direct - predicted‖
};

struct SMatrixResult {
  double epsilon;
  Scalar lhs;  // ⟨a*_out,ε(f)ψ, a*_in,ε(h)ψ⟩ - ⟨f, h⟩, time quadrature
  Scalar lhs_resolvent;  // same with resolvent path
  Scalar rhs;  // -i Σ w w' conj(f) h 2ε/(ε² + Δω²) T(·,·; ε)
  Scalar rhs_on_shell;   // restricted to pairs sharing a shell
  Scalar rhs_off_shell;
  double discrepancy;
  double ccr_defect;        // |⟨X_in f, X_in h⟩ - ⟨f, h⟩|
  double intertwine_drift;  // |F - F_int|
  double guard_budget;
  double budget;
  bool pass;
};

/// Everything scattering needs around one ground state: cached D₁ψ, D₁*ψ,
/// resolvent solver and a propagator. Thread safe after construction.
class ScatteringProblem {
 public:
  ScatteringProblem(const PauliFierzModel& model, GroundStateResult gs, ScatteringOptions opt = {});

  const PauliFierzModel& model() const { return *model_; }
  const GroundStateResult& ground() const { return gs_; }
  const ResolventSolver& solver() const { return solver_; }
  const ScatteringOptions& options() const { return opt_; }
  /// Dense eigendecomposition when dim ≤ dense_threshold, Krylov otherwise.
  const Propagator& propagator() const;
  const Propagator& krylov_propagator() const;

  /// D₁(k_l)ψ_gs and D₁(k_l)*ψ_gs.
  const Vector& d1_state(Index l) const { return d1_[static_cast<std::size_t>(l)]; }
  const Vector& d1_adjoint_state(Index l) const { return d1_adj_[static_cast<std::size_t>(l)]; }

  /// e^{-iHt}ψ with the default propagator.
  Vector propagate(const Vector& psi, double t) const { return propagator().apply(psi, t); }

  /// a*_{in/out,ε}(h)ψ_gs.
  Vector cook_create(const PhotonFunction& h, double epsilon, Direction dir, CookPath path) const;

  /// a(k_l)ψ + (H + ω_l - E)^{-1} D₁(k_l)*ψ.
  Vector pull_through_vector(Index l) const;
  double pull_through_residual(Index l) const { return pull_through_vector(l).norm(); }

  /// T at one η (terms 1 and 3 do not depend on η).
  TMatrixEntry t_matrix(Index k, Index kp, double eta) const;
  /// T over an η schedule; every row carries the η → 0 extrapolation.
  std::vector<TMatrixEntry> t_matrix_sweep(Index k, Index kp, std::vector<double> etas) const;
  /// Same for arbitrary modes (continuity scans); k and kp in the rows are -1.
  std::vector<TMatrixEntry> t_matrix_sweep(const Mode& k, const Mode& kp, std::vector<double> etas) const;

  /// ⟨Γ_{kl}ψ, ψ⟩ with Γ_{kl} = a_l D₁(k) - D₁(k) a_l - D₂(k, l).
  Scalar comm2_defect(Index k, Index l) const;

  PropTmatResult verify_prop_tmat(Index k, const PhotonFunction& h, double epsilon) const;
  IntertwineResult verify_intertwine(const PhotonFunction& f, double t, double epsilon) const;
  SMatrixResult s_matrix(const PhotonFunction& f, const PhotonFunction& h, double epsilon) const;

 private:
  PhotonFunction unit(Index l) const;
  void check_packet(const PhotonFunction& f) const;
  const SparseMatrix& d1_op(Index l) const { return d1_ops_[static_cast<std::size_t>(l)]; }
  struct ModeData {
    Index index;
    const Mode* mode;
    const Vector* v;  // D₁ψ
    const Vector* u;  // D₁*ψ
  };
  std::vector<TMatrixEntry> sweep(const ModeData& k, const ModeData& kp, std::vector<double> etas) const;

  const PauliFierzModel* model_;
  GroundStateResult gs_;
  ScatteringOptions opt_;
  ResolventSolver solver_;
  std::vector<SparseMatrix> d1_ops_;
  std::vector<Vector> d1_;
  std::vector<Vector> d1_adj_;
  mutable std::once_flag prop_once_;
  mutable std::unique_ptr<Propagator> prop_;
  mutable std::once_flag krylov_once_;
  mutable std::unique_ptr<Propagator> krylov_;
};

/// T-matrix over a list of mode pairs and η values, computed in parallel and
/// collated in pair order.
std::vector<TMatrixEntry> t_matrix_table(const ScatteringProblem& problem,
                                         const std::vector<std::pair<Index, Index>>& pairs,
                                         const std::vector<double>& etas);

void write_tmatrix_csv(std::ostream& out, const PauliFierzModel& model, const std::vector<TMatrixEntry>& rows);

/// Run `fn(i)` for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace pfscat
