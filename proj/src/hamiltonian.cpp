#include "pfscat/hamiltonian.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pfscat {

SparseMatrix HamiltonianComponents::total() const {
  SparseMatrix h = kinetic + potential;
  h += field_energy;
  h += a_linear;
  h += a_quadratic;
  h += spin_b;
  return h;
}

double PauliFierzModel::estimate_bytes(const ParticleGrid& matter, const ModeGrid& modes, int n_max) {
  const double fock = FockBasis(modes.size(), n_max).size();
  const double dim = static_cast<double>(matter.dim()) * fock;
  const double dn = matter.dimension() * matter.particles();
  const double m = static_cast<double>(modes.size());
  const double per_row = (1.0 + 2.0 * dn) * (1.0 + 2.0 * m) + matter.particles() * 4.0 * m * m;
  return dim * per_row * (sizeof(Scalar) + sizeof(Index)) + dim * sizeof(Index);
}

PauliFierzModel::PauliFierzModel(ParticleGrid matter, ModeGrid modes, ModelParams params)
    : matter_(std::move(matter)),
      modes_(std::move(modes)),
      params_(std::move(params)),
      fock_(modes_.size(), params_.n_max) {
  if (matter_.dimension() != modes_.dimension())
    throw ConfigError("matter and photon dimensions differ");
  if (matter_.has_spin() && matter_.dimension() != 3)
    throw ConfigError("spin 1/2 requires d = 3 (magnetic coupling is undefined for d < 3)");
  if (!std::isfinite(params_.mu)) throw ConfigError("mu must be finite");
  const double bytes = estimate_bytes(matter_, modes_, params_.n_max);
  if (bytes > params_.memory_budget_bytes) {
    std::ostringstream msg;
    msg << "Hamiltonian of dimension " << matter_.dim() * fock_.size() << " needs about "
        << std::setprecision(3) << bytes / 1e6 << " MB, over the budget of "
        << params_.memory_budget_bytes / 1e6 << " MB";
    throw ConfigError(msg.str());
  }
  potential_ = pfscat::potential_values(matter_, params_.potential);

  for (Index i = 0; i < modes_.size(); ++i) raising_.push_back(raising_matrix(fock_, i));
  const int d = matter_.dimension();
  for (int j = 0; j < matter_.particles(); ++j)
    for (int a = 0; a < d; ++a) vector_potential_.push_back(field_operator(j, a, false));

  const Index n = dim();
  components_.kinetic = lift_matter(matter_.negative_laplacian());
  components_.potential = lift_matter(sparse_diagonal(potential_));
  components_.field_energy = lift_fock(sparse_diagonal(field_energy_diagonal(modes_, fock_)));
  components_.a_linear = SparseMatrix(n, n);
  components_.a_quadratic = SparseMatrix(n, n);
  components_.spin_b = SparseMatrix(n, n);
  for (int j = 0; j < matter_.particles(); ++j) {
    for (int a = 0; a < d; ++a) {
      const SparseMatrix& amat = vector_potential_[static_cast<std::size_t>(j * d + a)];
      const SparseMatrix p = lift_matter(matter_.momentum(j, a));
      components_.a_linear += SparseMatrix(p * amat) + SparseMatrix(amat * p);
      components_.a_quadratic += SparseMatrix(amat * amat);
    }
    if (spin_coupled()) {
      for (int l = 0; l < 3; ++l) {
        const SparseMatrix s = lift_matter(matter_.spin(j, l));
        components_.spin_b += params_.mu * SparseMatrix(s * magnetic_field(j, l));
      }
    }
  }
  const SparseMatrix total = components_.total();
  hamiltonian_ = 0.5 * (total + SparseMatrix(total.adjoint()));
  hamiltonian_.prune(Scalar(0.0));
  hamiltonian_.makeCompressed();
}

SparseMatrix PauliFierzModel::coupling_part() const {
  SparseMatrix c = components_.kinetic + components_.a_linear;
  c += components_.a_quadratic;
  c += components_.spin_b;
  return c;
}

SparseMatrix PauliFierzModel::lift_matter(const SparseMatrix& m) const {
  return kron(m, sparse_identity(fock_.size()));
}

SparseMatrix PauliFierzModel::lift_fock(const SparseMatrix& f) const {
  return kron(sparse_identity(matter_.dim()), f);
}

SparseMatrix PauliFierzModel::lift_matter_diagonal(const Vector& diag) const {
  const Index nf = fock_.size();
  SparseMatrix out(dim(), dim());
  out.reserve(Eigen::VectorXi::Constant(dim(), 1));
  for (Index a = 0; a < matter_.dim(); ++a)
    for (Index f = 0; f < nf; ++f) out.insert(a * nf + f, a * nf + f) = diag(a);
  out.makeCompressed();
  return out;
}

SparseMatrix PauliFierzModel::field_operator(int particle, int component, bool magnetic) const {
  const Index md = matter_.dim();
  SparseMatrix out(dim(), dim());
  for (Index i = 0; i < modes_.size(); ++i) {
    const Mode& mode = modes_.mode(i);
    if (mode.kappa == Scalar(0.0)) continue;
    Vector f(md);
    for (Index m = 0; m < md; ++m) {
      const RealVector x = matter_.position_of(m, particle);
      f(m) = magnetic ? form_factor_H(x, mode, spin_coupled())(component) : form_factor_G(x, mode)(component);
    }
    const double amp = std::sqrt(mode.weight / 2.0);
    const SparseMatrix& up = raising_[static_cast<std::size_t>(i)];
    const SparseMatrix down = up.adjoint();
    out += amp * kron(sparse_diagonal(f.conjugate()), down);
    out += amp * kron(sparse_diagonal(f), up);
  }
  return out;
}

SparseMatrix PauliFierzModel::vector_potential(int particle, int axis) const {
  return vector_potential_.at(static_cast<std::size_t>(particle * matter_.dimension() + axis));
}

SparseMatrix PauliFierzModel::magnetic_field(int particle, int component) const {
  if (matter_.dimension() != 3) return SparseMatrix(dim(), dim());
  return field_operator(particle, component, true);
}

Vector PauliFierzModel::coupling_profile(const Mode& mode, int particle, int axis) const {
  Vector g(matter_.dim());
  for (Index m = 0; m < matter_.dim(); ++m)
    g(m) = std::conj(form_factor_G(matter_.position_of(m, particle), mode)(axis)) / std::sqrt(2.0);
  return g;
}

Vector PauliFierzModel::spin_profile(const Mode& mode, int particle, int component) const {
  Vector s(matter_.dim());
  for (Index m = 0; m < matter_.dim(); ++m)
    s(m) = std::conj(form_factor_H(matter_.position_of(m, particle), mode, true)(component)) / std::sqrt(2.0);
  return s;
}

SparseMatrix PauliFierzModel::d1(const Mode& mode) const {
  if (!(mode.omega > 0.0)) throw ConfigError("D1 requested at k = 0");
  if (mode.k.size() != matter_.dimension()) throw ConfigError("D1 mode has the wrong dimension");
  const int d = matter_.dimension();
  SparseMatrix out(dim(), dim());
  if (mode.kappa == Scalar(0.0)) return out;
  for (int j = 0; j < matter_.particles(); ++j) {
    for (int a = 0; a < d; ++a) {
      const SparseMatrix g = lift_matter_diagonal(coupling_profile(mode, j, a));
      const SparseMatrix p = lift_matter(matter_.momentum(j, a));
      out += SparseMatrix(p * g) + SparseMatrix(g * p);
      out += 2.0 * SparseMatrix(g * vector_potential_[static_cast<std::size_t>(j * d + a)]);
    }
    if (spin_coupled()) {
      for (int l = 0; l < 3; ++l) {
        const SparseMatrix s = lift_matter_diagonal(spin_profile(mode, j, l));
        out += params_.mu * SparseMatrix(lift_matter(matter_.spin(j, l)) * s);
      }
    }
  }
  out.makeCompressed();
  return out;
}

Vector PauliFierzModel::d2_diagonal(const Mode& k, const Mode& kp) const {
  Vector out = Vector::Zero(matter_.dim());
  const int d = matter_.dimension();
  for (int j = 0; j < matter_.particles(); ++j) {
    for (Index m = 0; m < matter_.dim(); ++m) {
      const RealVector x = matter_.position_of(m, j);
      const Eigen::VectorXcd gk = form_factor_G(x, k);
      const Eigen::VectorXcd gkp = form_factor_G(x, kp);
      Scalar sum = 0.0;
      for (int a = 0; a < d; ++a) sum += std::conj(gk(a)) * gkp(a);
      out(m) += sum;  // 2 · (conj(G)/√2) · (G'/√2)
    }
  }
  return out;
}

SparseMatrix PauliFierzModel::create(const PhotonFunction& h) const {
  return lift_fock(pfscat::create(h, modes_, fock_).sparse());
}

SparseMatrix PauliFierzModel::annihilate(const PhotonFunction& h) const {
  return lift_fock(pfscat::annihilate(h, modes_, fock_).sparse());
}

SparseMatrix PauliFierzModel::mode_annihilate(Index mode) const {
  return lift_fock(pfscat::mode_annihilate(mode, modes_, fock_).sparse());
}

double comm1_residual(const PauliFierzModel& model, const PhotonFunction& h, const Vector& psi) {
  const SparseMatrix c = model.coupling_part();
  const SparseMatrix up = model.create(h);
  Vector lhs = c * (up * psi) - up * (c * psi);
  for (Index i = 0; i < model.modes().size(); ++i) {
    if (h(i) == Scalar(0.0)) continue;
    lhs -= (model.modes().weight(i) * h(i)) * (model.d1(i) * psi);
  }
  return lhs.norm();
}

double comm2_residual(const PauliFierzModel& model, Index mode, const PhotonFunction& h,
                      const Vector& psi) {
  const SparseMatrix down = model.annihilate(h);
  const SparseMatrix d1 = model.d1(mode);
  Vector lhs = down * (d1 * psi) - d1 * (down * psi);
  for (Index i = 0; i < model.modes().size(); ++i) {
    if (h(i) == Scalar(0.0)) continue;
    lhs -= (model.modes().weight(i) * std::conj(h(i))) * (model.d2(model.modes().mode(mode), model.modes().mode(i)) * psi);
  }
  return lhs.norm();
}

void write_coordinates(std::ostream& out, const SparseMatrix& m) {
  out << std::setprecision(17);
  for (Index c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
}

}  // namespace pfscat
