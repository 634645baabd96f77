#include "pfscat/scattering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "pfscat/io.hpp"

namespace pfscat {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ScatteringProblem::ScatteringProblem(const PauliFierzModel& model, GroundStateResult gs, ScatteringOptions opt)
    : model_(&model), gs_(std::move(gs)), opt_(opt), solver_(model.hamiltonian(), opt.solve) {
  if (gs_.state.size() != model.dim()) throw ConfigError("ground state does not match the model dimension");
  const Index m = model.modes().size();
  d1_ops_.resize(static_cast<std::size_t>(m));
  d1_.resize(static_cast<std::size_t>(m));
  d1_adj_.resize(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), opt_.threads, [&](std::size_t l) {
    d1_ops_[l] = model.d1(static_cast<Index>(l));
    d1_[l] = d1_ops_[l] * gs_.state;
    d1_adj_[l] = d1_ops_[l].adjoint() * gs_.state;
  });
}

const Propagator& ScatteringProblem::propagator() const {
  std::call_once(prop_once_, [&] {
    if (model_->dim() <= opt_.dense_threshold)
      prop_ = std::make_unique<SpectralPropagator>(model_->hamiltonian());
    else
      prop_ = std::make_unique<KrylovPropagator>(model_->hamiltonian(), opt_.krylov_tol);
  });
  return *prop_;
}

const Propagator& ScatteringProblem::krylov_propagator() const {
  std::call_once(krylov_once_, [&] {
    krylov_ = std::make_unique<KrylovPropagator>(model_->hamiltonian(), opt_.krylov_tol);
  });
  return *krylov_;
}

PhotonFunction ScatteringProblem::unit(Index l) const {
  PhotonFunction e = PhotonFunction::Zero(model_->modes().size());
  e(l) = 1.0;
  return e;
}

void ScatteringProblem::check_packet(const PhotonFunction& f) const {
  if (f.size() != model_->modes().size()) throw ConfigError("wave packet length differs from the mode count");
  for (Index i = 0; i < f.size(); ++i)
    if (!std::isfinite(f(i).real()) || !std::isfinite(f(i).imag()))
      throw ConfigError("wave packet amplitude at mode " + std::to_string(i) + " is not finite");
}

Vector ScatteringProblem::cook_create(const PhotonFunction& h, double epsilon, Direction dir, CookPath path) const {
  if (!(epsilon > 0.0)) throw ConfigError("cook_create needs epsilon > 0");
  check_packet(h);
  const ModeGrid& grid = model_->modes();
  const double e0 = gs_.energy;
  Vector out = model_->create(h) * gs_.state;
  std::vector<Index> support;
  for (Index l = 0; l < grid.size(); ++l)
    if (h(l) != Scalar(0.0)) support.push_back(l);
  if (support.empty()) return out;

  if (path == CookPath::kResolvent) {
    // in: +iε, out: -iε
    const double sign = dir == Direction::kIn ? 1.0 : -1.0;
    for (Index l : support) {
      const Scalar z(e0 + grid.omega(l), sign * epsilon);
      out -= (grid.weight(l) * h(l)) * solver_.solve(z, d1_state(l)).x;
    }
    return out;
  }

  // in: -i ∫ e^{-εu} e^{-iu(H-ω-E)} v du ; out: +i ∫ e^{-εu} e^{+iu(H-ω-E)} v du
  const double s = dir == Direction::kIn ? -1.0 : 1.0;
  const Scalar pref = dir == Direction::kIn ? -kI : kI;
  const Propagator& prop = propagator();
  const RealVector* lam = prop.eigenvalues();
  double omax = 0.0;
  for (Index l : support) omax = std::max(omax, grid.omega(l));
  const Index n = model_->dim();
  Vector acc = Vector::Zero(n);
  if (lam) {
    const Matrix& u = *prop.eigenvectors();
    Matrix c(n, static_cast<Index>(support.size()));
    for (std::size_t q = 0; q < support.size(); ++q) {
      const Index l = support[q];
      c.col(static_cast<Index>(q)) = (grid.weight(l) * h(l)) * (u.adjoint() * d1_state(l));
    }
    const RealVector mu = lam->array() - e0;
    const double spread = std::max(std::abs(mu.minCoeff()), std::abs(mu.maxCoeff())) + omax;
    const TimeGrid tg = damped_time_grid(epsilon, spread, opt_.quadrature);
    Vector b(static_cast<Index>(support.size()));
    for (std::size_t node = 0; node < tg.times.size(); ++node) {
      const double t = tg.times[node];
      const double wt = tg.weights[node] * std::exp(-epsilon * t);
      for (std::size_t q = 0; q < support.size(); ++q)
        b(static_cast<Index>(q)) = std::exp(Scalar(0.0, -s * t * grid.omega(support[q])));
      const Vector g = c * b;
      for (Index i = 0; i < n; ++i) acc(i) += wt * std::exp(Scalar(0.0, s * t * mu(i))) * g(i);
    }
    acc = u * acc;
  } else {
    double hnorm = 0.0;
    for (Index c = 0; c < model_->hamiltonian().outerSize(); ++c) {
      double col = 0.0;
      for (SparseMatrix::InnerIterator it(model_->hamiltonian(), c); it; ++it) col += std::abs(it.value());
      hnorm = std::max(hnorm, col);
    }
    const TimeGrid tg = damped_time_grid(epsilon, hnorm + std::abs(e0) + omax, opt_.quadrature);
    std::vector<Vector> states;
    for (Index l : support) states.push_back(d1_state(l));
    double prev = 0.0;
    for (std::size_t node = 0; node < tg.times.size(); ++node) {
      const double t = tg.times[node];
      // e^{s·iuH} = propagator at time -s·u
      for (auto& st : states) st = prop.apply(st, -s * (t - prev));
      prev = t;
      const double wt = tg.weights[node] * std::exp(-epsilon * t);
      for (std::size_t q = 0; q < support.size(); ++q) {
        const Index l = support[q];
        const Scalar phase = std::exp(Scalar(0.0, -s * t * (grid.omega(l) + e0)));
        acc += (wt * grid.weight(l) * h(l) * phase) * states[q];
      }
    }
  }
  out += pref * acc;
  return out;
}

Vector ScatteringProblem::pull_through_vector(Index l) const {
  const double shift = model_->modes().omega(l) - gs_.energy;
  const Vector x = solver_.solve_positive(shift, d1_adjoint_state(l)).x;
  return model_->mode_annihilate(l) * gs_.state + x;
}

TMatrixEntry ScatteringProblem::t_matrix(Index k, Index kp, double eta) const {
  auto rows = t_matrix_sweep(k, kp, {eta});
  return rows.front();
}

std::vector<TMatrixEntry> ScatteringProblem::t_matrix_sweep(Index k, Index kp, std::vector<double> etas) const {
  const ModeGrid& grid = model_->modes();
  return sweep({k, &grid.mode(k), &d1_state(k), &d1_adjoint_state(k)},
               {kp, &grid.mode(kp), &d1_state(kp), &d1_adjoint_state(kp)}, std::move(etas));
}

std::vector<TMatrixEntry> ScatteringProblem::t_matrix_sweep(const Mode& k, const Mode& kp,
                                                            std::vector<double> etas) const {
  const SparseMatrix dk = model_->d1(k), dkp = model_->d1(kp);
  const Vector vk = dk * gs_.state, uk = dk.adjoint() * gs_.state;
  const Vector vkp = dkp * gs_.state, ukp = dkp.adjoint() * gs_.state;
  return sweep({-1, &k, &vk, &uk}, {-1, &kp, &vkp, &ukp}, std::move(etas));
}

std::vector<TMatrixEntry> ScatteringProblem::sweep(const ModeData& k, const ModeData& kp,
                                                   std::vector<double> etas) const {
  const double okp = kp.mode->omega;
  const Vector x = solver_.solve_positive(okp - gs_.energy, *kp.u).x;
  const Scalar t1 = -x.dot(*k.u);
  const Vector d2psi = model_->d2(*k.mode, *kp.mode) * gs_.state;
  const Scalar t3 = d2psi.dot(gs_.state);

  std::sort(etas.begin(), etas.end(), std::greater<>());
  BoundaryValueResult bv;
  bv.k = k.index;
  bv.kp = kp.index;
  Vector guess;
  for (double eta : etas) {
    if (!(eta > 0.0)) throw ConfigError("eta values must be > 0");
    const SolveResult s = solver_.solve(Scalar(gs_.energy + okp, eta), *kp.v, guess.size() ? &guess : nullptr);
    guess = s.x;
    bv.sweep.push_back({eta, k.v->dot(s.x), s.residual, s.iterations});
  }
  extrapolate(bv, opt_.stability_tol);

  std::vector<TMatrixEntry> rows;
  for (const auto& p : bv.sweep) {
    TMatrixEntry e;
    e.k = k.index;
    e.kp = kp.index;
    e.eta = p.eta;
    e.terms = {t1, -p.value, t3};
    e.value = t1 - p.value + t3;
    e.extrapolated = t1 - bv.extrapolated + t3;
    e.stable = bv.stable;
    rows.push_back(e);
  }
  return rows;
}

Scalar ScatteringProblem::comm2_defect(Index k, Index l) const {
  const SparseMatrix al = model_->mode_annihilate(l);
  const Vector& psi = gs_.state;
  const Vector gamma = al * d1_state(k) - d1_op(k) * (al * psi) -
                       model_->d2(model_->modes().mode(k), model_->modes().mode(l)) * psi;
  return gamma.dot(psi);
}

PropTmatResult ScatteringProblem::verify_prop_tmat(Index k, const PhotonFunction& h, double epsilon) const {
  check_packet(h);
  const ModeGrid& grid = model_->modes();
  PropTmatResult r{};
  r.k = k;
  r.epsilon = epsilon;
  const Vector x = cook_create(h, epsilon, Direction::kIn, CookPath::kTimeQuadrature);
  r.lhs = d1_state(k).dot(x);
  r.rhs = 0.0;
  r.predicted = 0.0;
  r.guard_budget = 0.0;
  const double uk = d1_adjoint_state(k).norm();
  for (Index l = 0; l < grid.size(); ++l) {
    if (h(l) == Scalar(0.0)) continue;
    const Scalar wh = grid.weight(l) * h(l);
    r.rhs += wh * t_matrix(k, l, epsilon).value;
    const Scalar gamma = comm2_defect(k, l);
    const Vector rl = pull_through_vector(l);
    r.predicted += wh * (gamma + rl.dot(d1_adjoint_state(k)));
    r.guard_budget += std::abs(wh) * (std::abs(gamma) + rl.norm() * uk);
  }
  r.discrepancy = std::abs(r.lhs - r.rhs);
  r.budget = opt_.quadrature_budget + r.guard_budget;
  r.pass = r.discrepancy <= r.budget;
  return r;
}

IntertwineResult ScatteringProblem::verify_intertwine(const PhotonFunction& f, double t, double epsilon) const {
  check_packet(f);
  const ModeGrid& grid = model_->modes();
  const double e0 = gs_.energy;
  IntertwineResult r{t, epsilon, 0.0, 0.0, 0.0};
  PhotonFunction ft = f;
  for (Index l = 0; l < grid.size(); ++l) ft(l) *= std::exp(Scalar(0.0, grid.omega(l) * t));
  const Vector xf = cook_create(f, epsilon, Direction::kIn, CookPath::kResolvent);
  const Vector xft = cook_create(ft, epsilon, Direction::kIn, CookPath::kResolvent);
  // e^{iHt} a*_in(f)ψ - a*_in(e^{iωt} f) e^{iHt}ψ, with e^{iHt}ψ = e^{iEt}ψ
  const Vector direct = propagate(xf, -t) - std::exp(Scalar(0.0, e0 * t)) * xft;
  r.discrepancy = direct.norm();

  const Propagator& prop = propagator();
  const RealVector* lam = prop.eigenvalues();
  if (!lam) {
    r.predicted_norm = r.prediction_error = std::nan("");
    return r;
  }
  const Matrix& u = *prop.eigenvectors();
  const RealVector mu = lam->array() - e0;
  const SparseMatrix& h = model_->hamiltonian();
  Vector pred_coeff = Vector::Zero(model_->dim());
  for (Index l = 0; l < grid.size(); ++l) {
    if (f(l) == Scalar(0.0)) continue;
    const Vector xl = cook_create(unit(l), epsilon, Direction::kIn, CookPath::kResolvent);
    // defect generator (H - E)X(e_l) - ω_l X(e_l)
    const Vector delta = h * xl - (e0 + grid.omega(l)) * xl;
    const Vector c = u.adjoint() * delta;
    const double w = grid.omega(l);
    for (Index i = 0; i < c.size(); ++i) {
      const double x = w - mu(i);
      Scalar kernel;
      if (std::abs(x * t) < 1e-6)
        kernel = std::exp(Scalar(0.0, mu(i) * t)) * Scalar(-0.5 * x * t * t, t);
      else
        kernel = (std::exp(Scalar(0.0, w * t)) - std::exp(Scalar(0.0, mu(i) * t))) / x;
      pred_coeff(i) += f(l) * kernel * c(i);
    }
  }
  // W(t) = e^{-iEt} × direct
  const Vector predicted = std::exp(Scalar(0.0, e0 * t)) * (u * pred_coeff);
  r.predicted_norm = predicted.norm();
  r.prediction_error = (direct - predicted).norm();
  return r;
}

SMatrixResult ScatteringProblem::s_matrix(const PhotonFunction& f, const PhotonFunction& h, double epsilon) const {
  check_packet(f);
  check_packet(h);
  const ModeGrid& grid = model_->modes();
  SMatrixResult r{};
  r.epsilon = epsilon;
  const Scalar fh = inner(f, h, grid);
  const Vector xo = cook_create(f, epsilon, Direction::kOut, CookPath::kTimeQuadrature);
  const Vector xi_h = cook_create(h, epsilon, Direction::kIn, CookPath::kTimeQuadrature);
  const Vector xi_f = cook_create(f, epsilon, Direction::kIn, CookPath::kTimeQuadrature);
  r.lhs = xo.dot(xi_h) - fh;
  {
    const Vector bo = cook_create(f, epsilon, Direction::kOut, CookPath::kResolvent);
    const Vector bi = cook_create(h, epsilon, Direction::kIn, CookPath::kResolvent);
    r.lhs_resolvent = bo.dot(bi) - fh;
  }
  const Scalar ccr = xi_f.dot(xi_h) - fh;
  const Scalar big_f = (xo - xi_f).dot(xi_h);

  std::vector<Index> sf, sh;
  for (Index i = 0; i < grid.size(); ++i) {
    if (f(i) != Scalar(0.0)) sf.push_back(i);
    if (h(i) != Scalar(0.0)) sh.push_back(i);
  }
  struct PairTerms {
    Scalar t, m, gamma;
  };
  std::vector<PairTerms> terms(sf.size() * sh.size());
  std::vector<Vector> x_units(sh.size());
  std::vector<double> r_norms(sh.size());
  parallel_for(sh.size(), opt_.threads, [&](std::size_t q) {
    x_units[q] = cook_create(unit(sh[q]), epsilon, Direction::kIn, CookPath::kResolvent);
    r_norms[q] = pull_through_vector(sh[q]).norm();
  });
  parallel_for(terms.size(), opt_.threads, [&](std::size_t idx) {
    const Index j = sf[idx / sh.size()];
    const std::size_t q = idx % sh.size();
    const Index l = sh[q];
    terms[idx] = {t_matrix(j, l, epsilon).value, d1_state(j).dot(x_units[q]), comm2_defect(j, l)};
  });

  Scalar f_int = 0.0;
  r.rhs = r.rhs_on_shell = r.rhs_off_shell = 0.0;
  r.guard_budget = 0.0;
  for (std::size_t a = 0; a < sf.size(); ++a) {
    const Index j = sf[a];
    for (std::size_t q = 0; q < sh.size(); ++q) {
      const Index l = sh[q];
      const PairTerms& pt = terms[a * sh.size() + q];
      const double dw = grid.omega(j) - grid.omega(l);
      const double kern = 2.0 * epsilon / (epsilon * epsilon + dw * dw);
      const Scalar c = grid.weight(j) * grid.weight(l) * std::conj(f(j)) * h(l) * kern;
      const Scalar term = -kI * c * pt.t;
      r.rhs += term;
      (grid.same_shell(j, l) ? r.rhs_on_shell : r.rhs_off_shell) += term;
      f_int += -kI * grid.weight(j) * std::conj(f(j)) * h(l) * kern * pt.m;
      r.guard_budget += std::abs(c) * (std::abs(pt.gamma) + r_norms[q] * d1_adjoint_state(j).norm());
    }
  }
  r.discrepancy = std::abs(r.lhs - r.rhs);
  r.ccr_defect = std::abs(ccr);
  r.intertwine_drift = std::abs(big_f - f_int);
  r.budget = opt_.quadrature_budget + r.guard_budget + r.ccr_defect + r.intertwine_drift;
  r.pass = r.discrepancy <= r.budget;
  return r;
}

std::vector<TMatrixEntry> t_matrix_table(const ScatteringProblem& problem,
                                         const std::vector<std::pair<Index, Index>>& pairs,
                                         const std::vector<double>& etas) {
  std::vector<std::vector<TMatrixEntry>> parts(pairs.size());
  parallel_for(pairs.size(), problem.options().threads, [&](std::size_t i) {
    parts[i] = problem.t_matrix_sweep(pairs[i].first, pairs[i].second, etas);
  });
  std::vector<TMatrixEntry> rows;
  for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

void write_tmatrix_csv(std::ostream& out, const PauliFierzModel& model, const std::vector<TMatrixEntry>& rows) {
  out << "k_mode,k,lambda,kp_mode,kp,lambda_p,eta,re,im,t1_re,t1_im,t2_re,t2_im,t3_re,t3_im,extrap_re,extrap_im,stable\n";
  for (const auto& e : rows) {
    const Mode& a = model.modes().mode(e.k);
    const Mode& b = model.modes().mode(e.kp);
    out << e.k << ',' << fmt(a.k) << ',' << a.polarization << ',' << e.kp << ',' << fmt(b.k) << ','
        << b.polarization << ',' << fmt(e.eta) << ',' << fmt(e.value.real()) << ',' << fmt(e.value.imag());
    for (const Scalar& t : e.terms) out << ',' << fmt(t.real()) << ',' << fmt(t.imag());
    out << ',' << fmt(e.extrapolated.real()) << ',' << fmt(e.extrapolated.imag()) << ',' << (e.stable ? 1 : 0) << '\n';
  }
}

}  // namespace pfscat
