#pragma once

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "pfscat/config.hpp"
#include "pfscat/hamiltonian.hpp"

namespace fixtures {

// d = 1 harmonic atom with four modes on two shells.
inline pfscat::RunConfig small_config(int points = 8, int n_max = 2, double charge = 0.3) {
  pfscat::RunConfig c;
  c.discretization.matter_points = points;
  c.discretization.half_width = 4.0;
  c.discretization.n_max = n_max;
  c.model.charge = charge;
  return c;
}

inline std::vector<oracle::Photon> photons(const pfscat::ModeGrid& grid) {
  std::vector<oracle::Photon> out;
  for (const auto& m : grid.modes()) out.push_back({m.k(0), m.weight, m.kappa});
  return out;
}

inline oracle::Model oracle_model(const pfscat::RunConfig& c, const pfscat::ModeGrid& grid) {
  const double s = c.model.potential.strength;
  return oracle::build(c.discretization.matter_points, c.discretization.half_width,
                       [s](double x) { return s * x * x; }, photons(grid), c.discretization.n_max);
}

// Library full index -> oracle full index.
inline std::vector<Eigen::Index> index_map(const pfscat::PauliFierzModel& lib, const oracle::Model& ora) {
  const auto& basis = lib.fock();
  std::vector<Eigen::Index> map(static_cast<std::size_t>(lib.dim()));
  for (Eigen::Index a = 0; a < lib.matter().dim(); ++a)
    for (Eigen::Index n = 0; n < basis.size(); ++n)
      map[static_cast<std::size_t>(a * basis.size() + n)] = ora.full(a, ora.lookup.at(basis.occupation(n)));
  return map;
}

inline double max_mapped_difference(const Eigen::MatrixXcd& lib, const oracle::Mat& ora,
                                    const std::vector<Eigen::Index>& map) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < lib.rows(); ++i)
    for (Eigen::Index j = 0; j < lib.cols(); ++j)
      worst = std::max(worst, std::abs(lib(i, j) - ora(map[i], map[j])));
  return worst;
}

}  // namespace fixtures
