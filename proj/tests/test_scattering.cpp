#include <doctest.h>

#include <atomic>

#include "fixtures.hpp"
#include "pfscat/config.hpp"
#include "pfscat/scattering.hpp"
#include "pfscat/suite.hpp"

using namespace pfscat;

namespace {

struct Setup {
  RunConfig config;
  PauliFierzModel model;
  ScatteringProblem problem;
  explicit Setup(RunConfig c)
      : config(c), model(make_model(config)), problem(model, ground_state(model), scattering_options(config)) {}
};

}  // namespace

TEST_CASE("T-matrix matches the dense oracle") {
  const Setup s(fixtures::small_config(10, 2, 0.3));
  const oracle::Model ora = fixtures::oracle_model(s.config, s.model.modes());
  const oracle::Ground g = oracle::ground(ora);
  oracle::TMatrix t(ora, g);
  for (double eta : {0.2, 0.1}) {
    for (Index k = 0; k < 4; ++k) {
      for (Index kp = 0; kp < 4; ++kp) {
        CAPTURE(k);
        CAPTURE(kp);
        const Scalar expect = t(static_cast<int>(k), static_cast<int>(kp), eta);
        const Scalar got = s.problem.t_matrix(k, kp, eta).value;
        CHECK(std::abs(got - expect) <= 1e-8 * std::abs(expect));
      }
    }
  }
}

TEST_CASE("zero coupling: T and both sides of the S-matrix identity vanish") {
  const Setup s(fixtures::small_config(8, 2, 0.0));
  for (Index k = 0; k < 4; ++k)
    for (Index kp = 0; kp < 4; ++kp) CHECK(std::abs(s.problem.t_matrix(k, kp, 0.1).value) == 0.0);
  PhotonFunction f = PhotonFunction::Zero(4), h = PhotonFunction::Zero(4);
  f(0) = 1.0;
  h(1) = Scalar(0.5, 0.5);
  const SMatrixResult r = s.problem.s_matrix(f, h, 0.2);
  CHECK(std::abs(r.lhs) < 1e-10);
  CHECK(std::abs(r.rhs) < 1e-10);
}

TEST_CASE("Cook integrals: time quadrature against resolvent, linearity") {
  const Setup s(fixtures::small_config(8, 2, 0.3));
  std::mt19937_64 rng(21);
  const PhotonFunction f = random_packet(4, rng), g = random_packet(4, rng);
  for (Direction dir : {Direction::kIn, Direction::kOut}) {
    const Vector a = s.problem.cook_create(f, 0.2, dir, CookPath::kTimeQuadrature);
    const Vector b = s.problem.cook_create(f, 0.2, dir, CookPath::kResolvent);
    CHECK((a - b).norm() < 1e-8 * b.norm());
    const Scalar alpha(0.3, -1.1), beta(2.0, 0.4);
    const Vector lin = s.problem.cook_create(alpha * f + beta * g, 0.2, dir, CookPath::kResolvent);
    const Vector sum = alpha * b + beta * s.problem.cook_create(g, 0.2, dir, CookPath::kResolvent);
    CHECK((lin - sum).norm() < 1e-12 * sum.norm());
  }
}

TEST_CASE("pull-through residual shrinks with the photon cutoff") {
  const Setup lo(fixtures::small_config(8, 2, 0.1));
  const Setup hi(fixtures::small_config(8, 3, 0.1));
  for (Index l = 0; l < 4; ++l) {
    const double scale = lo.problem.d1_adjoint_state(l).norm();
    CHECK(hi.problem.pull_through_residual(l) < lo.problem.pull_through_residual(l));
    CHECK(lo.problem.pull_through_residual(l) <= 10.0 * std::sqrt(lo.problem.ground().top_sector_weight) * scale);
  }
}

TEST_CASE("two-path identity on a small model") {
  const Setup s(fixtures::small_config(8, 2, 0.2));
  std::mt19937_64 rng(5);
  const PhotonFunction h = random_packet(4, rng);
  for (Index k = 0; k < 4; ++k) {
    const PropTmatResult r = s.problem.verify_prop_tmat(k, h, 0.1);
    CHECK(r.pass);
    CHECK(r.discrepancy <= r.budget);
  }
}

TEST_CASE("T table is independent of the thread count") {
  RunConfig c = fixtures::small_config(8, 2, 0.2);
  const Setup one(c);
  c.run.threads = 3;
  const Setup three(c);
  std::vector<std::pair<Index, Index>> pairs{{0, 1}, {2, 2}, {3, 0}, {1, 1}};
  const auto a = t_matrix_table(one.problem, pairs, {0.2, 0.1});
  const auto b = t_matrix_table(three.problem, pairs, {0.2, 0.1});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].k == b[i].k);
    CHECK(a[i].eta == b[i].eta);
    CHECK(a[i].value == b[i].value);
  }
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw SolverError("boom");
                               }),
                  SolverError);
}

TEST_CASE("packets reject the wrong size") {
  const Setup s(fixtures::small_config(4, 2, 0.1));
  CHECK_THROWS_AS(s.problem.cook_create(PhotonFunction::Ones(3), 0.1, Direction::kIn, CookPath::kResolvent),
                  ConfigError);
}
