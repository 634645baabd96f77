#include <doctest.h>

#include "fixtures.hpp"
#include "pfscat/config.hpp"
#include "pfscat/propagation.hpp"
#include "pfscat/spectral.hpp"

using namespace pfscat;

TEST_CASE("ground state: dense, Lanczos and the oracle agree") {
  const RunConfig c = fixtures::small_config(10, 2);
  const PauliFierzModel model = make_model(c);
  const GroundStateResult dense = ground_state(model);
  GroundStateOptions opt;
  opt.force_iterative = true;
  const GroundStateResult lanczos = ground_state(model, opt);
  const oracle::Ground ref = oracle::ground(fixtures::oracle_model(c, model.modes()));
  CHECK(dense.residual < 1e-10);
  CHECK(lanczos.residual < 1e-10);
  CHECK(std::abs(dense.energy - ref.energy) < 1e-10);
  CHECK(std::abs(lanczos.energy - ref.energy) < 1e-10);
  CHECK(std::abs(std::abs(dense.state.dot(lanczos.state)) - 1.0) < 1e-9);
  CHECK_FALSE(dense.degenerate);
}

TEST_CASE("degenerate level is flagged with a deterministic state") {
  RealVector d(4);
  d << 1.0, 1.0, 2.0, 3.0;
  const SparseMatrix h = sparse_diagonal(d);
  const GroundStateResult r = ground_state(h);
  CHECK(r.degenerate);
  CHECK(std::abs(r.state(0) - 1.0) < 1e-12);
  CHECK(r.state.norm() == doctest::Approx(1.0));
}

TEST_CASE("fix_phase makes the largest entry real positive") {
  Vector v(3);
  v << 0.1, Scalar(0.0, -2.0), 0.5;
  fix_phase(v);
  CHECK(v(1).real() == doctest::Approx(2.0));
  CHECK(std::abs(v(1).imag()) < 1e-15);
}

TEST_CASE("resolvent solves") {
  const RunConfig c = fixtures::small_config(8, 2);
  const PauliFierzModel model = make_model(c);
  std::mt19937_64 rng(2);
  const Vector v = random_unit_vector(model.dim(), rng);
  for (bool iterative : {false, true}) {
    SolveOptions opt;
    opt.force_iterative = iterative;
    const ResolventSolver s(model.hamiltonian(), opt);
    const Scalar z(1.3, 0.05);
    const SolveResult r = s.solve(z, v);
    CHECK(r.residual < 1e-11);
    const SparseMatrix& h = model.hamiltonian();
    CHECK((h * r.x - z * r.x - v).norm() < 1e-10);
    const SolveResult p = s.solve_positive(0.5, v);
    CHECK((h * p.x + 0.5 * p.x - v).norm() < 1e-10);
  }
}

TEST_CASE("linear extrapolation is exact on linear data") {
  BoundaryValueResult r;
  for (double eta : {0.4, 0.2, 0.1}) r.sweep.push_back({eta, Scalar(2.0, -1.0) + Scalar(0.5, 3.0) * eta, 0.0, 0});
  extrapolate(r, 1e-2);
  CHECK(std::abs(r.extrapolated - Scalar(2.0, -1.0)) < 1e-14);
  CHECK(r.stable);
  r.sweep.pop_back();
  extrapolate(r, 1e-2);
  CHECK_FALSE(r.stable);
}

TEST_CASE("single creation bound is at most one") {
  GridConfig gc;
  gc.shells = {0.3, 0.8, 1.4};
  const ModeGrid g = build_grid(gc);
  const FockBasis b(g.size(), 3);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const PhotonFunction h = random_gaussian(g.size(), rng);
    for (bool dagger : {true, false}) {
      const CreationBoundResult r = verify_creation_bound(g, b, {h}, {dagger});
      CHECK(r.ratio <= 1.0 + 1e-6);
    }
  }
}

TEST_CASE("form bound vanishes for a nonnegative potential") {
  const RunConfig c = fixtures::small_config(8, 2);
  const PauliFierzModel model = make_model(c);
  const FormBoundResult r = verify_form_bound(model, 0.5);
  CHECK(r.d_exact == 0.0);
  CHECK(r.min_eigenvalue >= -1e-10);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  const GaussRule& g = gauss_legendre(10);
  for (int p = 0; p < 20; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
    CHECK(s == doctest::Approx(p % 2 ? 0.0 : 2.0 / (p + 1)).epsilon(1e-13));
  }
}

TEST_CASE("spectral and Krylov propagators agree") {
  const RunConfig c = fixtures::small_config(8, 2);
  const PauliFierzModel model = make_model(c);
  const SpectralPropagator sp(model.hamiltonian());
  const KrylovPropagator kp(model.hamiltonian());
  std::mt19937_64 rng(6);
  const Vector v = random_unit_vector(model.dim(), rng);
  for (double t : {0.0, 0.3, 4.0, -2.5}) {
    const Vector a = sp.apply(v, t), b = kp.apply(v, t);
    CHECK((a - b).norm() < 1e-9);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("damped half-line integral matches the resolvent") {
  const RunConfig c = fixtures::small_config(8, 2);
  const PauliFierzModel model = make_model(c);
  const SpectralPropagator sp(model.hamiltonian());
  std::mt19937_64 rng(8);
  const Vector v = random_unit_vector(model.dim(), rng);
  for (double eps : {0.5, 0.1}) {
    const HalflineResult r = halfline_phase_integral(model.hamiltonian(), 1.2, sp, eps, v);
    CHECK(r.relative_error < 1e-8);
  }
}

TEST_CASE("Abelian limits of simple integrands") {
  const AbelianResult r = abelian_limit([](double s) { return std::exp(-s); }, {0.1, 0.01});
  // ∫ e^{-(1+ε)s} ds = 1/(1+ε)
  CHECK(r.integrals[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-10));
  CHECK(r.integrals[1] == doctest::Approx(1.0 / 1.01).epsilon(1e-10));
  CHECK(std::abs(r.limit - 1.0) < 1e-2);
  CHECK(adaptive_integral([](double s) { return std::sin(s); }, 0.0, kPi, 1e-13) == doctest::Approx(2.0));
}
