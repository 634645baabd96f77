#include "pfscat/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/SparseLU>

namespace pfscat {

namespace {

template <unsigned N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  GaussRule rule;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    rule.nodes.push_back(-x[i]);
    rule.weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.nodes.push_back(x[i]);
    rule.weights.push_back(w[i]);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const GaussRule r10 = make_rule<10>();
  static const GaussRule r15 = make_rule<15>();
  static const GaussRule r20 = make_rule<20>();
  static const GaussRule r30 = make_rule<30>();
  switch (n) {
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    case 30: return r30;
    default: throw ConfigError("Gauss-Legendre rule must have 10, 15, 20 or 30 nodes");
  }
}

SpectralPropagator::SpectralPropagator(const SparseMatrix& h) { decompose(Matrix(h)); }
SpectralPropagator::SpectralPropagator(const Matrix& h) { decompose(h); }

void SpectralPropagator::decompose(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw SolverError("dense eigendecomposition failed");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

Vector SpectralPropagator::apply(const Vector& psi, double t) const {
  Vector c = vectors_.adjoint() * psi;
  for (Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-kI * values_(i) * t);
  return vectors_ * c;
}

namespace {

double gershgorin_bound(const SparseMatrix& h) {
  RealVector rows = RealVector::Zero(h.rows());
  for (Index c = 0; c < h.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(h, c); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

}  // namespace

KrylovPropagator::KrylovPropagator(const SparseMatrix& h, double tol, int krylov_dim)
    : h_(&h), tol_(tol), krylov_dim_(krylov_dim), norm_bound_(gershgorin_bound(h)) {
  if (krylov_dim < 2) throw ConfigError("Krylov dimension must be >= 2");
}

bool KrylovPropagator::step(const Vector& psi, double dt, Vector& out, double budget) const {
  const double beta0 = psi.norm();
  if (beta0 == 0.0) {
    out = psi;
    return true;
  }
  const Index n = psi.size();
  const int m = static_cast<int>(std::min<Index>(krylov_dim_, n));
  Matrix v(n, m);
  RealVector alpha = RealVector::Zero(m), beta = RealVector::Zero(m);
  v.col(0) = psi / beta0;
  int used = m;
  double beta_last = 0.0;
  for (int j = 0; j < m; ++j) {
    Vector w = (*h_) * v.col(j);
    alpha(j) = std::real(v.col(j).dot(w));
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) w -= v.leftCols(j + 1) * (v.leftCols(j + 1).adjoint() * w);
    const double b = w.norm();
    if (j + 1 == m) {
      beta_last = b;
      break;
    }
    if (b < 1e-14 * std::max(1.0, norm_bound_)) {
      used = j + 1;
      beta_last = 0.0;
      break;
    }
    beta(j) = b;
    v.col(j + 1) = w / b;
  }
  RealMatrix t = RealMatrix::Zero(used, used);
  for (int j = 0; j < used; ++j) {
    t(j, j) = alpha(j);
    if (j + 1 < used) t(j, j + 1) = t(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
  Vector phases(used);
  for (int j = 0; j < used; ++j) phases(j) = std::exp(-kI * es.eigenvalues()(j) * dt);
  const Vector y = es.eigenvectors().cast<Scalar>() *
                   phases.cwiseProduct(es.eigenvectors().row(0).transpose().cast<Scalar>());
  const double err = beta0 * beta_last * std::abs(y(used - 1));
  if (err > budget) return false;
  out = beta0 * (v.leftCols(used) * y);
  return true;
}

Vector KrylovPropagator::apply(const Vector& psi, double t) const {
  if (t == 0.0) return psi;
  const double total = std::abs(t);
  const double sign = t > 0 ? 1.0 : -1.0;
  double dt = std::min(total, 0.5 * krylov_dim_ / std::max(norm_bound_, 1e-300));
  Vector cur = psi;
  double done = 0.0;
  Vector next;
  int failures = 0;
  while (done < total) {
    const double h = std::min(dt, total - done);
    const double budget = tol_ * std::max(h / total, 1e-3) * std::max(psi.norm(), 1e-300);
    if (step(cur, sign * h, next, budget)) {
      cur.swap(next);
      done += h;
      dt = std::min(dt * 1.5, total);
    } else {
      dt *= 0.5;
      if (++failures > 200 || dt < 1e-12 * total) throw SolverError("Krylov propagation could not meet its accuracy");
    }
  }
  return cur;
}

TimeGrid damped_time_grid(double epsilon, double spread, const QuadratureOptions& opt) {
  if (!(epsilon > 0.0)) throw ConfigError("damping epsilon must be > 0");
  if (!(opt.tail_tol > 0.0 && opt.tail_tol < 1.0)) throw ConfigError("tail_tol must lie in (0, 1)");
  const GaussRule& rule = gauss_legendre(opt.nodes);
  TimeGrid grid;
  grid.horizon = -std::log(opt.tail_tol) / epsilon;
  const double rate = std::max(spread, epsilon);
  const auto panels = static_cast<long>(std::ceil(grid.horizon * rate / opt.panel_phase));
  const double len = grid.horizon / static_cast<double>(std::max(panels, 1L));
  grid.times.reserve(static_cast<std::size_t>(panels) * rule.nodes.size());
  for (long p = 0; p < std::max(panels, 1L); ++p) {
    const double a = p * len;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      grid.times.push_back(a + 0.5 * len * (rule.nodes[q] + 1.0));
      grid.weights.push_back(0.5 * len * rule.weights[q]);
    }
  }
  return grid;
}

HalflineResult halfline_phase_integral(const SparseMatrix& h, double shift, const Propagator& prop,
                                       double epsilon, const Vector& v, const QuadratureOptions& opt) {
  if (!(epsilon > 0.0)) throw ConfigError("halfline integral needs epsilon > 0");
  HalflineResult out;
  const RealVector* values = prop.eigenvalues();
  double spread;
  if (values) {
    spread = std::max(std::abs(values->minCoeff() - shift), std::abs(values->maxCoeff() - shift));
  } else {
    spread = gershgorin_bound(h) + std::abs(shift);
  }
  const TimeGrid grid = damped_time_grid(epsilon, spread, opt);
  out.horizon = grid.horizon;
  if (values) {
    const Matrix& u = *prop.eigenvectors();
    const Vector c = u.adjoint() * v;
    Vector q = Vector::Zero(c.size());
    for (std::size_t n = 0; n < grid.times.size(); ++n) {
      const double t = grid.times[n];
      const double damp = grid.weights[n] * std::exp(-epsilon * t);
      for (Index i = 0; i < c.size(); ++i) q(i) += damp * std::exp(-kI * ((*values)(i) - shift) * t);
    }
    out.quadrature = u * q.cwiseProduct(c);
  } else {
    out.quadrature = Vector::Zero(v.size());
    for (std::size_t n = 0; n < grid.times.size(); ++n) {
      const double t = grid.times[n];
      out.quadrature += (grid.weights[n] * std::exp(-epsilon * t) * std::exp(kI * shift * t)) * prop.apply(v, t);
    }
  }
  SparseMatrix a = h;
  for (Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) -= Scalar(shift, epsilon);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw SolverError("halfline closed form: factorization failed");
  out.closed_form = -kI * Vector(lu.solve(v));
  const double scale = out.closed_form.norm();
  out.relative_error = scale > 0 ? (out.quadrature - out.closed_form).norm() / scale
                                 : out.quadrature.norm();
  return out;
}

double adaptive_integral(const std::function<double(double)>& f, double a, double b, double tol,
                         int max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err);
  if (err <= tol || max_depth <= 0) return v;
  const double m = 0.5 * (a + b);
  return adaptive_integral(f, a, m, 0.5 * tol, max_depth - 1) + adaptive_integral(f, m, b, 0.5 * tol, max_depth - 1);
}

AbelianResult abelian_limit(const std::function<double(double)>& f, std::vector<double> epsilons,
                            double tail_tol, double tol) {
  if (epsilons.empty()) throw ConfigError("abelian_limit needs at least one epsilon");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());
  AbelianResult out;
  out.epsilons = epsilons;
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw ConfigError("abelian_limit epsilons must be > 0");
    const double horizon = -std::log(tail_tol) / eps;
    const auto panels = static_cast<long>(std::ceil(horizon));
    double sum = 0.0;
    auto g = [&](double s) { return std::exp(-eps * s) * f(s); };
    for (long p = 0; p < panels; ++p) {
      const double a = static_cast<double>(p);
      const double b = std::min(horizon, a + 1.0);
      sum += adaptive_integral(g, a, b, tol, 20);
    }
    out.integrals.push_back(sum);
  }
  const std::size_t n = out.integrals.size();
  auto extrapolate = [&](std::size_t i) {
    // line through (ε_{i-1}, I_{i-1}) and (ε_i, I_i), evaluated at 0
    const double e1 = epsilons[i - 1], e2 = epsilons[i];
    return out.integrals[i] - e2 * (out.integrals[i - 1] - out.integrals[i]) / (e1 - e2);
  };
  if (n == 1) {
    out.limit = out.integrals[0];
    out.stable = false;
  } else {
    out.limit = extrapolate(n - 1);
    out.stable = n >= 3 && std::abs(out.limit - extrapolate(n - 2)) <= 1e-3 * std::max(1.0, std::abs(out.limit));
  }
  return out;
}

}  // namespace pfscat
