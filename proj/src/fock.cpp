#include "pfscat/fock.hpp"

#include <cmath>
#include <functional>
#include <ostream>

namespace pfscat {

namespace {

// All occupation vectors with the given total, lexicographically descending.
void enumerate_sector(Index modes, int total, std::vector<FockBasis::Occupation>& out) {
  FockBasis::Occupation n(static_cast<std::size_t>(modes), 0);
  std::function<void(Index, int)> rec = [&](Index pos, int left) {
    if (pos + 1 == modes) {
      n[static_cast<std::size_t>(pos)] = left;
      out.push_back(n);
      return;
    }
    for (int c = left; c >= 0; --c) {
      n[static_cast<std::size_t>(pos)] = c;
      rec(pos + 1, left - c);
    }
  };
  if (modes == 0) {
    if (total == 0) out.push_back(n);
    return;
  }
  rec(0, total);
}

}  // namespace

FockBasis::FockBasis(Index modes, int n_max) : modes_(modes), n_max_(n_max) {
  if (modes < 1) throw ConfigError("Fock basis needs at least one mode");
  if (n_max < 1) throw ConfigError("photon cutoff n_max must be >= 1");
  for (int total = 0; total <= n_max; ++total) {
    const std::size_t before = states_.size();
    enumerate_sector(modes, total, states_);
    totals_.insert(totals_.end(), states_.size() - before, total);
  }
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_.emplace(states_[i], static_cast<Index>(i));
}

Index FockBasis::index_of(const Occupation& n) const {
  auto it = lookup_.find(n);
  return it == lookup_.end() ? -1 : it->second;
}

void FockBasis::dump(std::ostream& out) const {
  for (Index i = 0; i < size(); ++i) {
    out << i << ':';
    for (int c : occupation(i)) out << ' ' << c;
    out << '\n';
  }
}

SparseMatrix raising_matrix(const FockBasis& basis, Index mode) {
  std::vector<Triplet> t;
  for (Index j = 0; j < basis.size(); ++j) {
    if (basis.photon_number(j) >= basis.n_max()) continue;
    auto n = basis.occupation(j);
    const int before = n[static_cast<std::size_t>(mode)];
    n[static_cast<std::size_t>(mode)] += 1;
    t.emplace_back(basis.index_of(n), j, std::sqrt(static_cast<double>(before + 1)));
  }
  SparseMatrix m(basis.size(), basis.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

OperatorHandle create(const PhotonFunction& h, const ModeGrid& grid, const FockBasis& basis) {
  SparseMatrix m(basis.size(), basis.size());
  for (Index i = 0; i < grid.size(); ++i) {
    if (h(i) == Scalar(0.0)) continue;
    m += (h(i) * std::sqrt(grid.weight(i))) * raising_matrix(basis, i);
  }
  return OperatorHandle(std::move(m));
}

OperatorHandle annihilate(const PhotonFunction& h, const ModeGrid& grid, const FockBasis& basis) {
  return create(h, grid, basis).adjoint();
}

OperatorHandle mode_annihilate(Index mode, const ModeGrid& grid, const FockBasis& basis) {
  const SparseMatrix lower = SparseMatrix(raising_matrix(basis, mode).adjoint());
  return OperatorHandle(lower / Scalar(std::sqrt(grid.weight(mode))));
}

OperatorHandle field(const PhotonFunction& h, const ModeGrid& grid, const FockBasis& basis) {
  const SparseMatrix up = create(h, grid, basis).sparse();
  const SparseMatrix sum = up + SparseMatrix(up.adjoint());
  return OperatorHandle(sum / Scalar(std::sqrt(2.0)));
}

RealVector field_energy_diagonal(const ModeGrid& grid, const FockBasis& basis) {
  RealVector d(basis.size());
  for (Index j = 0; j < basis.size(); ++j) {
    double e = 0.0;
    const auto& n = basis.occupation(j);
    for (Index i = 0; i < grid.size(); ++i) e += n[static_cast<std::size_t>(i)] * grid.omega(i);
    d(j) = e;
  }
  return d;
}

RealVector number_diagonal(const FockBasis& basis) {
  RealVector d(basis.size());
  for (Index j = 0; j < basis.size(); ++j) d(j) = basis.photon_number(j);
  return d;
}

namespace {
Vector apply_fock_diagonal(const Vector& psi, const RealVector& diag) {
  const Index nf = diag.size();
  if (psi.size() % nf != 0) throw std::invalid_argument("state size is not a multiple of the Fock dimension");
  Vector out(psi.size());
  for (Index a = 0; a < psi.size() / nf; ++a) out.segment(a * nf, nf) = psi.segment(a * nf, nf).cwiseProduct(diag.cast<Scalar>());
  return out;
}
}  // namespace

Vector hf_apply(const Vector& psi, const ModeGrid& grid, const FockBasis& basis) {
  return apply_fock_diagonal(psi, field_energy_diagonal(grid, basis));
}

Vector number_apply(const Vector& psi, const FockBasis& basis) {
  return apply_fock_diagonal(psi, number_diagonal(basis));
}

Vector fock_basis_vector(const FockBasis& basis, Index state) {
  Vector v = Vector::Zero(basis.size());
  v(state) = 1.0;
  return v;
}

Vector product_state(const Vector& matter, const Vector& fock) {
  Vector out(matter.size() * fock.size());
  for (Index a = 0; a < matter.size(); ++a) out.segment(a * fock.size(), fock.size()) = matter(a) * fock;
  return out;
}

std::vector<bool> photon_guard(const FockBasis& basis, Index matter_dim, int limit) {
  std::vector<bool> mask(static_cast<std::size_t>(matter_dim * basis.size()));
  for (Index a = 0; a < matter_dim; ++a)
    for (Index j = 0; j < basis.size(); ++j)
      mask[static_cast<std::size_t>(a * basis.size() + j)] = basis.photon_number(j) <= limit;
  return mask;
}

double top_sector_weight(const Vector& psi, const FockBasis& basis) {
  const Index nf = basis.size();
  double w = 0.0;
  for (Index i = 0; i < psi.size(); ++i)
    if (basis.photon_number(i % nf) == basis.n_max()) w += std::norm(psi(i));
  return w;
}

}  // namespace pfscat
