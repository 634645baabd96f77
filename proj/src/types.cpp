#include "pfscat/types.hpp"

#include <algorithm>
#include <cmath>

namespace pfscat {

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Index ca = 0; ca < a.outerSize(); ++ca) {
    for (SparseMatrix::InnerIterator ia(a, ca); ia; ++ia) {
      for (Index cb = 0; cb < b.outerSize(); ++cb) {
        for (SparseMatrix::InnerIterator ib(b, cb); ib; ++ib) {
          triplets.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                ia.value() * ib.value());
        }
      }
    }
  }
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseMatrix sparse_identity(Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

double hermiticity_defect(const SparseMatrix& a) {
  const SparseMatrix diff = a - SparseMatrix(a.adjoint());
  double worst = 0.0;
  for (Index c = 0; c < diff.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(diff, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

Vector random_gaussian(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    v(i) = Scalar(re, normal(rng));
  }
  return v;
}

Vector random_unit_vector(Index n, std::mt19937_64& rng) {
  Vector v = random_gaussian(n, rng);
  return v / v.norm();
}

}  // namespace pfscat
