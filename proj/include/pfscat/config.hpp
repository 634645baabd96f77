#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pfscat/hamiltonian.hpp"
#include "pfscat/scattering.hpp"
#include "pfscat/spectral.hpp"

namespace pfscat {

/// Sparse wave packet entry "mode:re:im".
struct PacketEntry {
  Index mode;
  Scalar amplitude;
};

struct RunConfig {
  struct Model {
    int dimension = 1;
    int particles = 1;
    int two_spin = 0;
    PotentialSpec potential{};
    std::string potential_table;  // path, for the tabulated potential
    double mu = 2.0;
    double charge = 0.1;
    double lambda = 2.0;
    std::string cutoff = "sharp";
    double momentum_floor = 1e-3;
  } model;

  struct Discretization {
    int matter_points = 32;
    double half_width = 6.0;
    std::vector<double> shells{0.5, 1.0};
    std::vector<double> shell_widths{};
    int directions_per_shell = 2;
    int n_max = 3;
    std::string grid_table;  // optional mode table replacing the shells
    double memory_budget_mb = 2000.0;
  } discretization;

  struct Solver {
    double eig_tol = 1e-10;
    double tol = 1e-12;
    int max_iter = 20000;
    Index dense_threshold = 500;
    Index direct_threshold = 60000;
    Index propagation_dense_threshold = 4000;
    bool iterative = false;
    std::vector<double> etas{0.4, 0.2, 0.1, 0.05};
    std::vector<double> epsilons{0.4, 0.2, 0.1};
    double tail_tol = 1e-12;
    int quadrature_nodes = 20;
    double panel_phase = 12.0;
    double krylov_tol = 1e-12;
    double stability_tol = 1e-2;
    double quadrature_budget = 1e-6;
  } solver;

  struct Experiment {
    std::vector<std::pair<Index, Index>> pairs{};  // empty: all pairs
    std::vector<PacketEntry> f{{0, 1.0}, {1, 0.5}};
    std::vector<PacketEntry> h{{0, 1.0}, {2, Scalar(0.3, 0.5)}};
    std::vector<PacketEntry> h_disjoint{{2, 1.0}, {3, 0.5}};  // second S-matrix pair; empty: skipped
    std::vector<double> times{0.0, 1.0, 5.0};
    bool cross_check = false;
    bool ray_scan = false;
    Index ray_mode = 0;
    std::vector<double> ray_radii{0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
    std::vector<double> sweep_charges{0.0, 0.02, 0.05, 0.1};
  } experiment;

  struct Verify {
    int ccr_pairs = 20;
    int random_states = 10;
    int packets = 3;
    int creation_order = 2;
    int creation_draws = 50;
    double calibration_margin = 1.25;
    std::vector<double> couplings{0.02, 0.05, 0.1};
    int pull_n_low = 2;
    int pull_n_high = 3;
    std::vector<double> halfline_epsilons{0.5, 0.1, 0.05};
    std::vector<double> abelian_epsilons{0.1, 0.01};
    std::vector<double> form_epsilons{0.5, 0.25};
    double prop_epsilon = 0.1;
    double ccr_tol = 1e-12;
    double comm_tol = 1e-10;
    double halfline_tol = 1e-8;
    double abelian_factor = 5.0;
    double pull_factor = 10.0;
    double form_tol = 1e-10;
    double intertwine_tol = 1e-8;
  } verify;

  struct Run {
    std::uint64_t seed = 1;
    int threads = 1;
  } run;
};

/// Parse INI text. Unknown sections or keys, unparsable values and
/// out-of-range parameters raise ConfigError naming the field (and the line
/// for syntax errors).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical INI text with every key; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);
void validate(const RunConfig& config);
/// (section, key, value) in canonical order.
std::vector<std::array<std::string, 3>> config_entries(const RunConfig& config);

ModeGrid make_grid(const RunConfig& config);
PauliFierzModel make_model(const RunConfig& config);
/// Same configuration with the coupling and photon cutoff replaced.
PauliFierzModel make_model(const RunConfig& config, double charge, int n_max);
GroundStateOptions ground_state_options(const RunConfig& config);
SolveOptions solve_options(const RunConfig& config);
ScatteringOptions scattering_options(const RunConfig& config);

PhotonFunction packet(const std::vector<PacketEntry>& entries, Index modes);

}  // namespace pfscat
