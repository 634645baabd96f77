#include <doctest.h>

#include "pfscat/fock.hpp"

using namespace pfscat;

namespace {

ModeGrid grid4() {
  GridConfig c;
  c.shells = {0.5, 1.0};
  return build_grid(c);
}

}  // namespace

TEST_CASE("basis size and ordering") {
  const FockBasis b(4, 2);
  CHECK(b.size() == 15);
  CHECK(b.photon_number(b.vacuum()) == 0);
  for (Index i = 0; i < 4; ++i) {
    const auto& n = b.occupation(b.one_photon(i));
    for (Index j = 0; j < 4; ++j) CHECK(n[j] == (i == j ? 1 : 0));
  }
  CHECK(b.index_of({3, 0, 0, 0}) == -1);
  CHECK(b.index_of({1, 0, 1, 0}) >= 0);
  for (Index i = 1; i < b.size(); ++i) CHECK(b.photon_number(i) >= b.photon_number(i - 1));
}

TEST_CASE("creation on the vacuum") {
  const ModeGrid g = grid4();
  const FockBasis b(g.size(), 2);
  PhotonFunction h(4);
  h << 1.0, Scalar(0.0, 2.0), -0.5, 0.25;
  const Vector vac = fock_basis_vector(b, b.vacuum());
  const Vector out = create(h, g, b).apply(vac);
  for (Index i = 0; i < 4; ++i) CHECK(std::abs(out(b.one_photon(i)) - h(i) * std::sqrt(g.weight(i))) < 1e-15);
  CHECK(annihilate(h, g, b).apply(vac).norm() == 0.0);
  PhotonFunction f(4);
  f << 0.3, 0.0, Scalar(1.0, -1.0), 2.0;
  const Vector af = create(f, g, b).apply(vac);
  CHECK(std::abs(af.dot(out) - inner(f, h, g)) < 1e-14);
}

TEST_CASE("two photons in one mode") {
  const ModeGrid g = grid4();
  const FockBasis b(g.size(), 2);
  const SparseMatrix up = raising_matrix(b, 1);
  const Vector two = up * (up * fock_basis_vector(b, b.vacuum()));
  CHECK(std::abs(two(b.index_of({0, 2, 0, 0})) - std::sqrt(2.0)) < 1e-15);
  // cutoff: a third photon is dropped
  CHECK((up * two).norm() == 0.0);
}

TEST_CASE("canonical commutation below the cutoff") {
  const ModeGrid g = grid4();
  const FockBasis b(g.size(), 3);
  std::mt19937_64 rng(5);
  const PhotonFunction f = random_gaussian(4, rng), h = random_gaussian(4, rng);
  const Matrix a = annihilate(f, g, b).dense(), ad = create(h, g, b).dense();
  const Matrix comm = a * ad - ad * a;
  const Scalar expect = inner(f, h, g);
  for (Index j = 0; j < b.size(); ++j) {
    if (b.photon_number(j) >= b.n_max()) continue;
    Vector col = comm.col(j);
    col(j) -= expect;
    CHECK(col.norm() < 1e-13);
  }
  const Matrix a2 = annihilate(h, g, b).dense();
  CHECK((a * a2 - a2 * a).norm() < 1e-13);
  CHECK((create(f, g, b).dense() - a.adjoint()).norm() < 1e-15);
}

TEST_CASE("mode annihilation integrates to a(h)") {
  const ModeGrid g = grid4();
  const FockBasis b(g.size(), 2);
  std::mt19937_64 rng(9);
  const PhotonFunction h = random_gaussian(4, rng);
  Matrix sum = Matrix::Zero(b.size(), b.size());
  for (Index i = 0; i < 4; ++i) sum += g.weight(i) * std::conj(h(i)) * mode_annihilate(i, g, b).dense();
  CHECK((sum - annihilate(h, g, b).dense()).norm() < 1e-14);
}

TEST_CASE("field operator, H_f and number diagonals") {
  const ModeGrid g = grid4();
  const FockBasis b(g.size(), 2);
  std::mt19937_64 rng(3);
  const Matrix phi = field(random_gaussian(4, rng), g, b).dense();
  CHECK((phi - phi.adjoint()).norm() < 1e-15);
  const RealVector hf = field_energy_diagonal(g, b), num = number_diagonal(b);
  const Index s = b.index_of({1, 0, 0, 1});
  CHECK(hf(s) == doctest::Approx(g.omega(0) + g.omega(3)));
  CHECK(num(s) == 2.0);
  const Vector v = random_unit_vector(b.size(), rng);
  CHECK((hf_apply(v, g, b) - hf.cast<Scalar>().cwiseProduct(v)).norm() < 1e-15);
}

TEST_CASE("top sector weight and guard mask") {
  const FockBasis b(2, 2);
  Vector v = Vector::Zero(b.size());
  v(b.index_of({1, 1})) = 0.6;
  v(b.vacuum()) = 0.8;
  CHECK(top_sector_weight(v, b) == doctest::Approx(0.36));
  const auto mask = photon_guard(b, 3, 1);
  REQUIRE(mask.size() == static_cast<std::size_t>(3 * b.size()));
  CHECK(mask[static_cast<std::size_t>(b.size() + b.vacuum())]);
  CHECK_FALSE(mask[static_cast<std::size_t>(b.index_of({2, 0}))]);
}

TEST_CASE("product state ordering keeps matter slow") {
  Vector m(2), f(3);
  m << 1.0, 2.0;
  f << 1.0, 0.0, Scalar(0.0, 1.0);
  const Vector p = product_state(m, f);
  CHECK(p(3) == Scalar(2.0));
  CHECK(p(5) == Scalar(0.0, 2.0));
}
