#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pfscat/types.hpp"

namespace pfscat {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// e^{-iHt}. Implementations must be safe to call concurrently.
class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual Vector apply(const Vector& psi, double t) const = 0;
  /// Eigenvalues/eigenvectors when the propagator diagonalizes H, else null.
  virtual const RealVector* eigenvalues() const { return nullptr; }
  virtual const Matrix* eigenvectors() const { return nullptr; }
};

/// Dense eigendecomposition H = U diag(λ) U^H.
class SpectralPropagator : public Propagator {
 public:
  explicit SpectralPropagator(const SparseMatrix& h);
  explicit SpectralPropagator(const Matrix& h);

  Vector apply(const Vector& psi, double t) const override;
  const RealVector* eigenvalues() const override { return &values_; }
  const Matrix* eigenvectors() const override { return &vectors_; }

  Vector to_eigenbasis(const Vector& v) const { return vectors_.adjoint() * v; }
  Vector from_eigenbasis(const Vector& c) const { return vectors_ * c; }

 private:
  void decompose(const Matrix& h);
  RealVector values_;
  Matrix vectors_;
};

/// Short-iterative Lanczos: the step is split until the Krylov error
/// estimate per step falls below tol.
class KrylovPropagator : public Propagator {
 public:
  KrylovPropagator(const SparseMatrix& h, double tol = 1e-12, int krylov_dim = 40);
  Vector apply(const Vector& psi, double t) const override;

 private:
  // One step; returns false if the error estimate exceeds the budget.
  bool step(const Vector& psi, double dt, Vector& out, double budget) const;
  const SparseMatrix* h_;
  double tol_;
  int krylov_dim_;
  double norm_bound_;
};

struct QuadratureOptions {
  int nodes = 20;             // Gauss-Legendre nodes per panel
  double panel_phase = 12.0;  // max phase (spectral spread × panel length)
  double tail_tol = 1e-12;    // T chosen so e^{-εT} ≤ tail_tol
};

/// Time grid on [0, T] made of Gauss-Legendre panels. `spread` is the
/// largest phase rate the integrand can have.
struct TimeGrid {
  std::vector<double> times;
  std::vector<double> weights;
  double horizon = 0.0;
};
TimeGrid damped_time_grid(double epsilon, double spread, const QuadratureOptions& opt);

struct HalflineResult {
  Vector quadrature;   // ∫₀^T e^{-it(A-iε)} v dt
  Vector closed_form;  // -i (A - iε)^{-1} v
  double horizon;
  double relative_error;
};

/// Quadrature of ∫₀^∞ e^{-it(A-iε)} v dt against the closed form -i(A-iε)^{-1} v.
/// A = H - shift with H diagonalized by `prop` (eigenbasis integration), or
/// propagated node-to-node otherwise. The closed form uses a sparse solve.
HalflineResult halfline_phase_integral(const SparseMatrix& h, double shift, const Propagator& prop,
                                       double epsilon, const Vector& v,
                                       const QuadratureOptions& opt = {});

struct AbelianResult {
  std::vector<double> epsilons;
  std::vector<double> integrals;  // ∫₀^∞ e^{-εs} f(s) ds
  double limit;                   // linear extrapolation to ε = 0
  bool stable;
};

/// Damped integrals of a bounded f by adaptive panel bisection and their
/// ε → 0 extrapolation.
AbelianResult abelian_limit(const std::function<double(double)>& f, std::vector<double> epsilons,
                            double tail_tol = 1e-12, double tol = 1e-11);

/// ∫_a^b f by Gauss-Kronrod bisection until the error estimate is below the
/// absolute tolerance `tol`.
double adaptive_integral(const std::function<double(double)>& f, double a, double b, double tol,
                         int max_depth = 30);

}  // namespace pfscat
