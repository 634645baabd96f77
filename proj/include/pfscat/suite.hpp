#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pfscat/hamiltonian.hpp"
#include "pfscat/scattering.hpp"
#include "pfscat/spectral.hpp"

namespace pfscat {

/// One property check: the measured value is compared with the tolerance
/// (pass iff measured ≤ tolerance, plus any extra condition in `note`).
struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> values;
  std::string note;
};

/// [a(g), a*(h)] - ⟨g, h⟩ on states below the top sector and [a(g), a(h)]
/// everywhere; max column norm over `pairs` random (g, h).
Check check_ccr(const ModeGrid& grid, const FockBasis& basis, int pairs, std::uint64_t seed, double tol = 1e-12);

/// comm1 with h = e_i and comm2 at mode i with random h, for every grid mode,
/// on `states` random unit states supported where no truncation enters.
Check check_commutators(const PauliFierzModel& model, int states, std::uint64_t seed, double tol = 1e-10);

using ModelFactory = std::function<PauliFierzModel(double charge, int n_max)>;

/// Pull-through residual against factor·(top-sector weight)^{1/2}·‖D₁*ψ‖ at
/// each coupling, and strict decrease from n_low to n_high photons.
Check check_pull_through(const ModelFactory& make, const std::vector<double>& couplings, int n_low, int n_high,
                         const GroundStateOptions& gs_opt, const SolveOptions& solve_opt, double factor = 10.0);

/// Quadrature against closed form of the damped half-line integral with
/// A = H - E - ω(k_0) on a random vector.
Check check_halfline(const ScatteringProblem& problem, const std::vector<double>& epsilons, std::uint64_t seed,
                     double tol = 1e-8);

/// Damped integrals of e^{-s}, e^{-s}cos s and 1_{[0,1]} against their
/// ε → 0 limits, |I(ε) - a| ≤ factor·ε.
Check check_abelian(const std::vector<double>& epsilons, double factor = 5.0);

/// Creation-bound ratios over `draws` random h for each order 1..max_order,
/// bounded by Ĉ_n = margin × (max over a calibration run on another seed).
Check check_creation_bound(const ModeGrid& grid, const FockBasis& basis, int max_order, int draws,
                           std::uint64_t seed, double margin = 1.25);

/// D_ε finite, non-increasing in ε, and εH + D_ε - V_- ⪰ -tol.
Check check_form_bound(const PauliFierzModel& model, std::vector<double> epsilons, double tol = 1e-10);

/// Two-path identity for every grid mode and `packets` random h.
Check check_prop_tmat(const ScatteringProblem& problem, int packets, double epsilon, std::uint64_t seed);

/// Intertwining drift at finite ε against its prediction from the defect
/// generator; zero at t = 0.
Check check_intertwine(const ScatteringProblem& problem, const PhotonFunction& f, const std::vector<double>& times,
                       double epsilon, double tol = 1e-8);

/// Random wave packet on the whole grid.
PhotonFunction random_packet(Index modes, std::mt19937_64& rng);

}  // namespace pfscat
