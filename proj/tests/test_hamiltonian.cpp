#include <doctest.h>

#include "fixtures.hpp"
#include "pfscat/config.hpp"
#include "pfscat/hamiltonian.hpp"

using namespace pfscat;

TEST_CASE("assembled H matches the dense oracle") {
  const RunConfig c = fixtures::small_config();
  const PauliFierzModel model = make_model(c);
  const oracle::Model ora = fixtures::oracle_model(c, model.modes());
  REQUIRE(ora.dim == model.dim());
  const auto map = fixtures::index_map(model, ora);
  const Matrix h(model.hamiltonian());
  CHECK(fixtures::max_mapped_difference(h, ora.h, map) < 1e-12 * h.norm());
  CHECK(hermiticity_defect(model.hamiltonian()) == 0.0);
  CHECK((Matrix(model.components().total()) - h).norm() < 1e-12 * h.norm());

  for (Index i = 0; i < model.modes().size(); ++i) {
    CAPTURE(i);
    const Matrix d1(model.d1(i));
    CHECK(fixtures::max_mapped_difference(d1, ora.d1(static_cast<int>(i)), map) < 1e-13);
    for (Index j = 0; j < model.modes().size(); ++j) {
      const Vector d2 = model.d2_diagonal(i, j);
      const auto expect = ora.d2(static_cast<int>(i), static_cast<int>(j));
      for (Index a = 0; a < d2.size(); ++a) CHECK(std::abs(d2(a) - expect[a]) < 1e-15);
    }
  }
}

TEST_CASE("commutator identities on guarded states") {
  const RunConfig c = fixtures::small_config(8, 3);
  const PauliFierzModel model = make_model(c);
  std::mt19937_64 rng(17);
  const auto guard1 = model.guard(c.discretization.n_max - 2);
  const auto guard2 = model.guard(c.discretization.n_max - 1);
  for (int trial = 0; trial < 3; ++trial) {
    Vector psi1 = random_unit_vector(model.dim(), rng), psi2 = psi1;
    for (Index i = 0; i < model.dim(); ++i) {
      if (!guard1[static_cast<std::size_t>(i)]) psi1(i) = 0.0;
      if (!guard2[static_cast<std::size_t>(i)]) psi2(i) = 0.0;
    }
    const PhotonFunction h = random_gaussian(model.modes().size(), rng);
    CHECK(comm1_residual(model, h, psi1) < 1e-10);
    for (Index k = 0; k < model.modes().size(); ++k) CHECK(comm2_residual(model, k, h, psi2) < 1e-10);
  }
}

TEST_CASE("zero coupling leaves only the free parts") {
  const RunConfig c = fixtures::small_config(8, 2, 0.0);
  const PauliFierzModel model = make_model(c);
  CHECK(model.components().a_linear.norm() == 0.0);
  CHECK(model.components().a_quadratic.norm() == 0.0);
  CHECK(model.d1(Index{0}).norm() == 0.0);
}

TEST_CASE("full-space ladder operators follow the Fock convention") {
  const RunConfig c = fixtures::small_config(4, 2);
  const PauliFierzModel model = make_model(c);
  PhotonFunction h = PhotonFunction::Zero(model.modes().size());
  h(1) = 1.0;
  const Matrix ad(model.create(h));
  const Matrix a(model.mode_annihilate(1));
  CHECK((ad.adjoint() - model.modes().weight(1) * a).norm() < 1e-14);
}

TEST_CASE("memory budget refuses oversized assembly") {
  RunConfig c = fixtures::small_config(64, 3);
  c.discretization.memory_budget_mb = 0.01;
  CHECK_THROWS_AS(make_model(c), ConfigError);
}
