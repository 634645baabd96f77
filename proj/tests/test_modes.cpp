#include <doctest.h>

#include <sstream>

#include "pfscat/modes.hpp"

using namespace pfscat;

TEST_CASE("one-dimensional grid pairs ±k on each shell") {
  GridConfig c;
  c.shells = {0.5, 1.0};
  const ModeGrid g = build_grid(c);
  REQUIRE(g.size() == 4);
  CHECK(g.polarizations() == 1);
  REQUIRE(g.shells().size() == 2);
  for (const auto& shell : g.shells()) {
    REQUIRE(shell.size() == 2);
    CHECK(g.mode(shell[0]).k(0) == doctest::Approx(-g.mode(shell[1]).k(0)));
  }
  CHECK(g.shell_pairs().size() == 2);
  CHECK(g.same_shell(0, 1));
  CHECK_FALSE(g.same_shell(1, 2));
  for (Index i = 0; i < g.size(); ++i) {
    CHECK(g.weight(i) > 0.0);
    CHECK(g.omega(i) == doctest::Approx(g.mode(i).k.norm()));
  }
}

TEST_CASE("cutoff shapes") {
  Cutoff sharp{Cutoff::Shape::kSharp, 0.3, 2.0};
  CHECK(sharp(1.9) == Scalar(0.3));
  CHECK(sharp(2.1) == Scalar(0.0));
  Cutoff gauss{Cutoff::Shape::kGaussian, 0.3, 2.0};
  CHECK(gauss(2.0).real() == doctest::Approx(0.3 * std::exp(-0.5)));
}

TEST_CASE("polarization vectors are unit and transverse") {
  for (const RealVector& k : {RealVector(Eigen::Vector3d(0.3, -0.2, 0.9)), RealVector(Eigen::Vector3d(0, 0, 1.0))}) {
    const RealVector e1 = polarization_vector(k, 1), e2 = polarization_vector(k, 2);
    CHECK(e1.norm() == doctest::Approx(1.0));
    CHECK(e2.norm() == doctest::Approx(1.0));
    CHECK(std::abs(e1.dot(k)) < 1e-14);
    CHECK(std::abs(e2.dot(k)) < 1e-14);
    CHECK(std::abs(e1.dot(e2)) < 1e-14);
  }
  const RealVector k2 = Eigen::Vector2d(0.6, 0.8);
  CHECK(std::abs(polarization_vector(k2, 1).dot(k2)) < 1e-14);
  CHECK_THROWS_AS(polarization_vector(k2, 2), ConfigError);
  CHECK_THROWS_AS(polarization_vector(RealVector::Zero(3), 1), ConfigError);
}

TEST_CASE("three-dimensional shells carry two polarizations") {
  GridConfig c;
  c.dimension = 3;
  c.shells = {0.7};
  c.directions_per_shell = 6;
  const ModeGrid g = build_grid(c);
  CHECK(g.size() == 12);
  CHECK(g.shells().size() == 1);
}

TEST_CASE("form factor G and the ω-norm") {
  GridConfig c;
  c.cutoff.charge = 0.2;
  const ModeGrid g = build_grid(c);
  const Mode& m = g.mode(2);
  RealVector x(1);
  x << 0.7;
  const Scalar expect = 0.2 / std::sqrt(2.0 * kPi) / std::sqrt(m.omega) * std::exp(-kI * m.k(0) * 0.7);
  CHECK(std::abs(form_factor_G(x, m)(0) - expect) < 1e-15);
  CHECK(form_factor_H(x, m).norm() == 0.0);
  CHECK_THROWS_AS(form_factor_H(x, m, true), ConfigError);

  PhotonFunction h = PhotonFunction::Zero(g.size());
  h(2) = 1.0;
  CHECK(omega_norm(h, g) == doctest::Approx(std::sqrt(g.weight(2) * (1.0 + 1.0 / g.omega(2)))));
  CHECK(inner(h, h, g).real() == doctest::Approx(g.weight(2)));
}

TEST_CASE("grid table round trip") {
  GridConfig c;
  c.shells = {0.25, 0.5, 1.5};
  const ModeGrid g = build_grid(c);
  std::stringstream s;
  write_grid_table(s, g);
  const ModeGrid back = read_grid_table(s);
  REQUIRE(back.size() == g.size());
  for (Index i = 0; i < g.size(); ++i) {
    CHECK(back.mode(i).k(0) == g.mode(i).k(0));
    CHECK(back.weight(i) == g.weight(i));
    CHECK(back.mode(i).kappa == g.mode(i).kappa);
  }
}

TEST_CASE("shells at or below the momentum floor are rejected") {
  GridConfig c;
  c.shells = {0.0005};
  CHECK_THROWS_AS(build_grid(c), ConfigError);
}
