#include <doctest.h>

#include <cmath>

#include "pfscat/matter.hpp"

using namespace pfscat;

TEST_CASE("Dirichlet Laplacian spectrum") {
  ParticleGridConfig c;
  c.points = 20;
  c.half_width = 3.0;
  const ParticleGrid g(c);
  const Eigen::SelfAdjointEigenSolver<Matrix> es{Matrix(g.negative_laplacian())};
  const double h = g.spacing();
  for (int j = 1; j <= 5; ++j) {
    const double s = std::sin(j * kPi / (2.0 * (c.points + 1)));
    CHECK(es.eigenvalues()(j - 1) == doctest::Approx(4.0 / (h * h) * s * s).epsilon(1e-12));
  }
}

TEST_CASE("momentum is hermitian and antisymmetric in x") {
  ParticleGridConfig c;
  c.dimension = 2;
  c.points = 5;
  const ParticleGrid g(c);
  for (int axis = 0; axis < 2; ++axis) {
    const Matrix p(g.momentum(0, axis));
    CHECK((p - p.adjoint()).norm() < 1e-15);
    CHECK(p.real().norm() == 0.0);
  }
  Vector psi = Vector::Random(g.dim());
  CHECK((momentum_apply(g, 0, 1, psi) - g.momentum(0, 1) * psi).norm() < 1e-14);
  CHECK((laplacian_apply(g, psi) + g.negative_laplacian() * psi).norm() < 1e-12);
}

TEST_CASE("harmonic ground energy approaches sqrt(strength)") {
  ParticleGridConfig c;
  c.points = 200;
  c.half_width = 8.0;
  const ParticleGrid g(c);
  PotentialSpec v;
  v.strength = 0.5;
  const auto eig = atomic_eigensystem(g, potential_values(g, v), 2);
  CHECK(eig[0].energy == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
  CHECK(eig[1].energy == doctest::Approx(3.0 * std::sqrt(0.5)).epsilon(1e-3));
}

TEST_CASE("spin one half") {
  ParticleGridConfig c;
  c.dimension = 3;
  c.points = 2;
  c.two_spin = 1;
  const ParticleGrid g(c);
  const Matrix sx(g.spin(0, 0)), sy(g.spin(0, 1)), sz(g.spin(0, 2));
  CHECK((sx * sy - sy * sx - kI * sz).norm() < 1e-15);
  CHECK((sx * sx + sy * sy + sz * sz - 0.75 * Matrix::Identity(g.dim(), g.dim())).norm() < 1e-15);
  c.two_spin = 0;
  CHECK(ParticleGrid(c).spin(0, 2).nonZeros() == 0);
}

TEST_CASE("potentials") {
  ParticleGridConfig c;
  c.points = 11;
  const ParticleGrid g(c);
  PotentialSpec dw;
  dw.name = "double-well";
  dw.depth = 2.0;
  dw.well_position = 1.5;
  const RealVector v = potential_values(g, dw);
  for (int i = 0; i < c.points; ++i) CHECK(v(i) == doctest::Approx(v(c.points - 1 - i)));
  CHECK(v.minCoeff() < 0.0);

  PotentialSpec bad;
  bad.name = "no-such";
  CHECK_THROWS_AS(potential_values(g, bad), ConfigError);

  ParticleGridConfig two = c;
  two.points = 6;
  two.particles = 2;
  const ParticleGrid g2(two);
  PotentialSpec h;
  h.interaction = 1.0;
  CHECK(exchange_asymmetry(g2, potential_values(g2, h)) < 1e-14);
}

TEST_CASE("tabulated potential interpolates linearly") {
  ParticleGridConfig c;
  c.points = 9;
  c.half_width = 5.0;
  const ParticleGrid g(c);
  PotentialSpec t;
  t.name = "tabulated";
  t.table_x = {-5.0, 5.0};
  t.table_v = {-1.0, 1.0};
  const RealVector v = potential_values(g, t);
  for (int i = 0; i < c.points; ++i) CHECK(v(i) == doctest::Approx(g.coordinate(i) / 5.0));
}
