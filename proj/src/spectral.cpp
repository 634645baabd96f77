#include "pfscat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "pfscat/io.hpp"

namespace pfscat {

void fix_phase(Vector& v) {
  Index imax = 0;
  if (v.size() == 0 || v.cwiseAbs().maxCoeff(&imax) == 0.0) return;
  v *= std::conj(v(imax)) / std::abs(v(imax));
  v(imax) = std::abs(v(imax));
}

namespace {

void finish(const SparseMatrix& h, GroundStateResult& r) {
  r.state.normalize();
  fix_phase(r.state);
  const Vector hv = h * r.state;
  r.energy = std::real(r.state.dot(hv));
  r.residual = (hv - r.energy * r.state).norm();
}

GroundStateResult dense_ground_state(const SparseMatrix& h, const GroundStateOptions& opt) {
  Eigen::SelfAdjointEigenSolver<Matrix> es{Matrix(h)};
  if (es.info() != Eigen::Success) throw SolverError("dense ground state: eigensolver failed");
  GroundStateResult r;
  r.method = "dense";
  const RealVector& lam = es.eigenvalues();
  r.gap = lam.size() > 1 ? lam(1) - lam(0) : 0.0;
  r.degenerate = lam.size() > 1 && r.gap < opt.gap_floor;
  if (!r.degenerate) {
    r.state = es.eigenvectors().col(0);
  } else {
    Index count = 1;
    while (count < lam.size() && lam(count) - lam(0) < opt.gap_floor) ++count;
    const Matrix u = es.eigenvectors().leftCols(count);
    for (Index i = 0; i < u.rows(); ++i) {
      const Vector proj = u * u.row(i).adjoint();
      if (proj.norm() > 1e-8) {
        r.state = proj;
        break;
      }
    }
  }
  finish(h, r);
  return r;
}

GroundStateResult lanczos_ground_state(const SparseMatrix& h, const GroundStateOptions& opt) {
  const Index n = h.rows();
  const Index m = std::min<Index>(std::max(opt.krylov_dim, 4), n);
  const Index keep = std::max<Index>(2, std::min<Index>(m / 3, 12));
  std::mt19937_64 rng(opt.seed);
  Matrix v(n, m), w(n, m);
  v.col(0) = random_unit_vector(n, rng);
  w.col(0) = h * v.col(0);
  Index cols = 1;
  Vector next = w.col(0);
  GroundStateResult r;
  r.method = "lanczos";
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    while (cols < m) {
      Vector q = next;
      for (int pass = 0; pass < 2; ++pass) q -= v.leftCols(cols) * (v.leftCols(cols).adjoint() * q);
      double b = q.norm();
      int tries = 0;
      while (b < 1e-12) {
        if (++tries > 5) throw SolverError("lanczos: could not extend the Krylov space");
        q = random_unit_vector(n, rng);
        for (int pass = 0; pass < 2; ++pass) q -= v.leftCols(cols) * (v.leftCols(cols).adjoint() * q);
        b = q.norm();
      }
      v.col(cols) = q / b;
      w.col(cols) = h * v.col(cols);
      next = w.col(cols);
      ++cols;
    }
    Matrix t = v.leftCols(cols).adjoint() * w.leftCols(cols);
    t = 0.5 * (t + t.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    const Matrix y = es.eigenvectors().leftCols(keep);
    const Matrix x = v.leftCols(cols) * y;
    const Matrix hx = w.leftCols(cols) * y;
    const double theta0 = es.eigenvalues()(0);
    const Vector res = hx.col(0) - theta0 * x.col(0);
    const double rnorm = res.norm();
    r.residual_history.push_back(rnorm);
    r.gap = es.eigenvalues()(1) - theta0;
    if (rnorm <= opt.tol || cols == n) {
      r.state = x.col(0);
      r.degenerate = r.gap < opt.gap_floor;
      finish(h, r);
      return r;
    }
    v.leftCols(keep) = x;
    w.leftCols(keep) = hx;
    cols = keep;
    next = res;
  }
  throw SolverError("lanczos: no convergence after " + std::to_string(opt.max_restarts) + " restarts",
                    r.residual_history);
}

}  // namespace

GroundStateResult ground_state(const SparseMatrix& h, const GroundStateOptions& opt) {
  if (h.rows() != h.cols() || h.rows() == 0) throw ConfigError("ground_state needs a square nonempty matrix");
  if (!opt.force_iterative && h.rows() <= opt.dense_threshold) return dense_ground_state(h, opt);
  GroundStateResult r = lanczos_ground_state(h, opt);
  if (r.degenerate && h.rows() <= opt.dense_threshold) return dense_ground_state(h, opt);
  return r;
}

GroundStateResult ground_state(const PauliFierzModel& model, const GroundStateOptions& opt) {
  GroundStateResult r = ground_state(model.hamiltonian(), opt);
  r.top_sector_weight = model.top_sector_weight(r.state);
  return r;
}

struct ResolventSolver::Factor {
  Eigen::SparseLU<SparseMatrix> lu;
};

ResolventSolver::ResolventSolver(const SparseMatrix& h, SolveOptions opt) : h_(&h), opt_(opt) {}

namespace {

SparseMatrix shifted(const SparseMatrix& h, Scalar z) {
  SparseMatrix a = h;
  for (Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) -= z;
  a.makeCompressed();
  return a;
}

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& v) {
  const double nv = v.norm();
  const double r = (a * x - v).norm();
  return nv > 0 ? r / nv : r;
}

}  // namespace

std::shared_ptr<ResolventSolver::Factor> ResolventSolver::factor(Scalar z) const {
  const auto key = std::make_pair(z.real(), z.imag());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto f = std::make_shared<Factor>();
  f->lu.compute(shifted(*h_, z));
  if (f->lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed");
  std::lock_guard<std::mutex> lock(mutex_);
  if (cache_.size() >= 64) cache_.clear();
  cache_.emplace(key, f);
  return f;
}

SolveResult ResolventSolver::iterative(Scalar z, const Vector& v, const Vector* guess) const {
  const SparseMatrix a = shifted(*h_, z);
  Eigen::BiCGSTAB<SparseMatrix> solver;
  solver.setTolerance(opt_.tol);
  solver.setMaxIterations(opt_.max_iter);
  solver.compute(a);
  SolveResult r;
  r.x = guess ? solver.solveWithGuess(v, *guess) : Vector(solver.solve(v));
  r.iterations = static_cast<int>(solver.iterations());
  r.residual = relative_residual(a, r.x, v);
  r.method = "bicgstab";
  return r;
}

SolveResult ResolventSolver::solve(Scalar z, const Vector& v, const Vector* guess) const {
  if (z.imag() == 0.0) throw ConfigError("resolvent_solve needs Im z != 0");
  if (v.size() != h_->rows()) throw ConfigError("resolvent_solve: right-hand side has the wrong size");
  if (v.norm() == 0.0) return SolveResult{Vector::Zero(v.size()), 0, 0.0, "zero"};
  const bool direct = !opt_.force_iterative && h_->rows() <= opt_.direct_threshold;
  if (!direct) {
    SolveResult r = iterative(z, v, guess);
    if (r.residual <= opt_.tol) return r;
  }
  const auto f = factor(z);
  const SparseMatrix a = shifted(*h_, z);
  SolveResult r;
  r.x = f->lu.solve(v);
  r.method = direct ? "sparse-lu" : "sparse-lu-fallback";
  r.residual = relative_residual(a, r.x, v);
  for (int refine = 0; refine < 3 && r.residual > opt_.tol; ++refine) {
    r.x += f->lu.solve(Vector(v - a * r.x));
    r.residual = relative_residual(a, r.x, v);
    ++r.iterations;
  }
  if (r.residual > opt_.tol) {
    std::ostringstream msg;
    msg << "resolvent solve at z = " << z << " stalled at relative residual " << r.residual;
    throw SolverError(msg.str(), {r.residual});
  }
  return r;
}

SolveResult ResolventSolver::solve_positive(double s, const Vector& v, const Vector* guess) const {
  if (v.norm() == 0.0) return SolveResult{Vector::Zero(v.size()), 0, 0.0, "zero"};
  const SparseMatrix a = shifted(*h_, Scalar(-s, 0.0));
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(opt_.tol);
  cg.setMaxIterations(opt_.max_iter);
  cg.compute(a);
  SolveResult r;
  r.x = guess ? cg.solveWithGuess(v, *guess) : Vector(cg.solve(v));
  r.iterations = static_cast<int>(cg.iterations());
  r.residual = relative_residual(a, r.x, v);
  r.method = "cg";
  if (r.residual <= opt_.tol * 10) return r;
  Eigen::SparseLU<SparseMatrix> lu(a);
  if (lu.info() != Eigen::Success) throw SolverError("positive shifted solve: factorization failed");
  r.x = lu.solve(v);
  r.residual = relative_residual(a, r.x, v);
  r.method = "sparse-lu-fallback";
  if (r.residual > opt_.tol * 10) throw SolverError("positive shifted solve did not converge", {r.residual});
  return r;
}

SolveResult resolvent_solve(const SparseMatrix& h, Scalar z, const Vector& v, const SolveOptions& opt,
                            const Vector* guess) {
  return ResolventSolver(h, opt).solve(z, v, guess);
}

void extrapolate(BoundaryValueResult& r, double stability_tol) {
  const auto& s = r.sweep;
  const std::size_t n = s.size();
  r.cauchy.clear();
  for (std::size_t i = 1; i < n; ++i) r.cauchy.push_back(std::abs(s[i].value - s[i - 1].value));
  auto line = [&](std::size_t i) {
    return s[i].value - s[i].eta * (s[i - 1].value - s[i].value) / (s[i - 1].eta - s[i].eta);
  };
  if (n == 0) {
    r.extrapolated = 0.0;
    r.stable = false;
  } else if (n == 1) {
    r.extrapolated = s[0].value;
    r.stable = false;
  } else {
    r.extrapolated = line(n - 1);
    r.stable = n >= 3 && std::abs(r.extrapolated - line(n - 2)) <=
                             stability_tol * std::max(std::abs(r.extrapolated), 1e-300);
  }
}

BoundaryValueResult boundary_value(const PauliFierzModel& model, const ResolventSolver& solver,
                                   const GroundStateResult& gs, Index k, Index kp,
                                   std::vector<double> etas, double stability_tol) {
  std::sort(etas.begin(), etas.end(), std::greater<>());
  BoundaryValueResult r;
  r.k = k;
  r.kp = kp;
  const Vector vk = model.d1(k) * gs.state;
  const Vector vkp = model.d1(kp) * gs.state;
  Vector x;
  for (double eta : etas) {
    if (!(eta > 0.0)) throw ConfigError("eta values must be > 0");
    const Scalar z(gs.energy + model.modes().omega(kp), eta);
    SolveResult s = solver.solve(z, vkp, x.size() ? &x : nullptr);
    x = s.x;
    r.sweep.push_back({eta, vk.dot(x), s.residual, s.iterations});
  }
  extrapolate(r, stability_tol);
  return r;
}

double uniform_bound(const std::vector<BoundaryValueResult>& rows) {
  double sup = 0.0;
  for (const auto& r : rows)
    for (const auto& p : r.sweep) sup = std::max(sup, std::abs(p.value));
  return sup;
}

void write_boundary_csv(std::ostream& out, const PauliFierzModel& model,
                        const std::vector<BoundaryValueResult>& rows) {
  out << "k_mode,k,lambda,kp_mode,kp,lambda_p,eta,re,im,residual,extrap_re,extrap_im,stable\n";
  for (const auto& r : rows) {
    const Mode& a = model.modes().mode(r.k);
    const Mode& b = model.modes().mode(r.kp);
    for (const auto& p : r.sweep) {
      out << r.k << ',' << fmt(a.k) << ',' << a.polarization << ',' << r.kp << ',' << fmt(b.k) << ','
          << b.polarization << ',' << fmt(p.eta) << ',' << fmt(p.value.real()) << ',' << fmt(p.value.imag())
          << ',' << fmt(p.residual) << ',' << fmt(r.extrapolated.real()) << ',' << fmt(r.extrapolated.imag())
          << ',' << (r.stable ? 1 : 0) << '\n';
    }
  }
}

CreationBoundResult verify_creation_bound(const ModeGrid& grid, const FockBasis& basis,
                                          const std::vector<PhotonFunction>& h,
                                          const std::vector<bool>& dagger, double rel_tol,
                                          Index max_dim, std::uint64_t seed) {
  if (h.size() != dagger.size() || h.empty()) throw ConfigError("creation bound: need matching h and dagger lists");
  if (basis.size() > max_dim) throw ConfigError("creation bound: Fock dimension too large for norm estimation");
  const int n = static_cast<int>(h.size());
  double denom = 1.0;
  for (const auto& hi : h) denom *= omega_norm(hi, grid);
  CreationBoundResult out{0.0, 0.0, 0};
  if (denom == 0.0) return out;
  const RealVector hf = field_energy_diagonal(grid, basis);
  RealVector scale(basis.size());
  for (Index i = 0; i < basis.size(); ++i) scale(i) = std::pow(hf(i) + 1.0, -0.5 * n);
  SparseMatrix a = sparse_diagonal(scale);
  for (int i = n - 1; i >= 0; --i) {
    const OperatorHandle op = dagger[static_cast<std::size_t>(i)] ? create(h[static_cast<std::size_t>(i)], grid, basis)
                                                                   : annihilate(h[static_cast<std::size_t>(i)], grid, basis);
    a = SparseMatrix(op.sparse() * a);
  }
  const SparseMatrix ah = a.adjoint();
  std::mt19937_64 rng(seed);
  Vector x = random_unit_vector(basis.size(), rng);
  double lambda = 0.0;
  for (int it = 1; it <= 100000; ++it) {
    Vector y = ah * (a * x);
    const double next = std::real(x.dot(y));
    const double ny = y.norm();
    out.iterations = it;
    if (ny == 0.0) {
      lambda = 0.0;
      break;
    }
    x = y / ny;
    if (it > 1 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  out.norm = std::sqrt(std::max(lambda, 0.0));
  out.ratio = out.norm / denom;
  return out;
}

FormBoundResult verify_form_bound(const PauliFierzModel& model, double epsilon, double tol,
                                  Index dense_threshold) {
  if (!(epsilon > 0.0)) throw ConfigError("form bound epsilon must be > 0");
  if (model.dim() > dense_threshold) throw ConfigError("form bound: dimension above the dense threshold");
  const Matrix h = Matrix(model.hamiltonian());
  const RealVector& v = model.potential_values();
  const Index nf = model.fock().size();
  Matrix base = epsilon * h;
  for (Index a = 0; a < v.size(); ++a) {
    const double vminus = std::max(0.0, -v(a));
    for (Index f = 0; f < nf; ++f) base(a * nf + f, a * nf + f) -= vminus;
  }
  auto positive = [&](double d) {
    Matrix m = base;
    m.diagonal().array() += d;
    Eigen::LLT<Matrix> llt(m);
    return llt.info() == Eigen::Success;
  };
  FormBoundResult r{epsilon, 0.0, 0.0, 0.0, 0};
  double lo = 0.0;
  double hi = 0.0;
  if (!positive(0.0)) {
    // Gershgorin lower bound of base gives a feasible upper bracket.
    double lower = 0.0;
    for (Index i = 0; i < base.rows(); ++i)
      lower = std::min(lower, base(i, i).real() - (base.row(i).cwiseAbs().sum() - std::abs(base(i, i))));
    hi = -lower + 1.0;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (positive(mid) ? hi : lo) = mid;
      ++r.bisection_steps;
    }
  }
  r.d = hi;
  Eigen::SelfAdjointEigenSolver<Matrix> es(base, Eigen::EigenvaluesOnly);
  r.d_exact = std::max(0.0, -es.eigenvalues()(0));
  r.min_eigenvalue = es.eigenvalues()(0) + r.d;
  return r;
}

}  // namespace pfscat
