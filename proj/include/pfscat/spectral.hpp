#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pfscat/hamiltonian.hpp"
#include "pfscat/types.hpp"

namespace pfscat {

struct GroundStateOptions {
  double tol = 1e-10;            // residual ‖Hψ - Eψ‖
  Index dense_threshold = 500;  // dense eigensolver at or below this dimension
  double gap_floor = 1e-8;       // below: flagged degenerate
  int krylov_dim = 60;
  int max_restarts = 500;
  bool force_iterative = false;
  std::uint64_t seed = 7;        // start vector of the iterative solver
};

struct GroundStateResult {
  double energy = 0.0;
  Vector state;
  double residual = 0.0;
  double gap = 0.0;  // E_1 - E_0
  bool degenerate = false;
  double top_sector_weight = 0.0;
  std::string method;
  std::vector<double> residual_history;
};

/// Lowest eigenpair of a hermitian matrix. The phase is fixed so that the
/// largest-magnitude component is real and positive. For a degenerate
/// ground level the state is the normalized projection onto the eigenspace
/// of the first unit vector e_i with a nonzero projection.
GroundStateResult ground_state(const SparseMatrix& h, const GroundStateOptions& opt = {});
GroundStateResult ground_state(const PauliFierzModel& model, const GroundStateOptions& opt = {});

/// Multiply by a unit phase so the largest-magnitude entry is real positive.
void fix_phase(Vector& v);

struct SolveOptions {
  double tol = 1e-12;  // relative residual
  int max_iter = 20000;
  /// Factorize (sparse LU, cached per shift) at or below this dimension,
  /// otherwise BiCGSTAB with a sparse LU fallback.
  Index direct_threshold = 60000;
  bool force_iterative = false;
};

struct SolveResult {
  Vector x;
  int iterations = 0;
  double residual = 0.0;  // ‖(H - z)x - v‖ / ‖v‖
  std::string method;
};

/// Solver for (H - z)x = v over many shifts and right-hand sides. Shifted
/// factorizations are cached. Thread safe.
class ResolventSolver {
 public:
  explicit ResolventSolver(const SparseMatrix& h, SolveOptions opt = {});

  /// Im z != 0 required.
  SolveResult solve(Scalar z, const Vector& v, const Vector* guess = nullptr) const;
  /// (H + s)x = v with H + s positive definite (conjugate gradients).
  SolveResult solve_positive(double s, const Vector& v, const Vector* guess = nullptr) const;

  const SparseMatrix& matrix() const { return *h_; }
  const SolveOptions& options() const { return opt_; }

 private:
  struct Factor;
  std::shared_ptr<Factor> factor(Scalar z) const;
  SolveResult iterative(Scalar z, const Vector& v, const Vector* guess) const;

  const SparseMatrix* h_;
  SolveOptions opt_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<Factor>> cache_;
};

/// (H - z)^{-1} v.
SolveResult resolvent_solve(const SparseMatrix& h, Scalar z, const Vector& v, const SolveOptions& opt = {},
                            const Vector* guess = nullptr);

struct BoundaryValuePoint {
  double eta;
  Scalar value;
  double residual;
  int iterations;
};

struct BoundaryValueResult {
  Index k;
  Index kp;
  std::vector<BoundaryValuePoint> sweep;  // η descending
  Scalar extrapolated;
  bool stable;
  std::vector<double> cauchy;  // |f(η_{i+1}) - f(η_i)|
};

/// Richardson extrapolation linear in η on the last two points; stable when
/// the last two extrapolants differ by less than stability_tol (relative).
void extrapolate(BoundaryValueResult& r, double stability_tol);

/// ⟨D₁(k)ψ, (H - E - ω(k') - iη)^{-1} D₁(k')ψ⟩ over an η schedule.
BoundaryValueResult boundary_value(const PauliFierzModel& model, const ResolventSolver& solver,
                                   const GroundStateResult& gs, Index k, Index kp,
                                   std::vector<double> etas, double stability_tol = 1e-2);

/// sup over the rows of |value|.
double uniform_bound(const std::vector<BoundaryValueResult>& rows);

void write_boundary_csv(std::ostream& out, const PauliFierzModel& model,
                        const std::vector<BoundaryValueResult>& rows);

struct CreationBoundResult {
  double ratio;         // ‖a#(h1)…a#(hn)(H_f+1)^{-n/2}‖ / Π‖h_i‖_ω
  double norm;          // operator norm estimate
  int iterations;
};

/// Power iteration on A^H A for A = a#(h1)…a#(hn)(H_f+1)^{-n/2} on the
/// Fock space. dagger[i] selects a^* for factor i.
CreationBoundResult verify_creation_bound(const ModeGrid& grid, const FockBasis& basis,
                                          const std::vector<PhotonFunction>& h,
                                          const std::vector<bool>& dagger, double rel_tol = 1e-6,
                                          Index max_dim = 20000, std::uint64_t seed = 11);

struct FormBoundResult {
  double epsilon;
  double d;            // bisection estimate of the minimal D ≥ 0
  double d_exact;      // max(0, -λ_min(εH - V_-))
  double min_eigenvalue;  // λ_min(εH + D - V_-)
  int bisection_steps;
};

/// Minimal D ≥ 0 with εH + D - V_- ⪰ 0 by bisection on a positive
/// definiteness test, followed by a dense eigenvalue check.
FormBoundResult verify_form_bound(const PauliFierzModel& model, double epsilon, double tol = 1e-6,
                                  Index dense_threshold = 4000);

}  // namespace pfscat
