#include "pfscat/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pfscat/io.hpp"

namespace pfscat {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + s + "' is not a number");
  }
  if (used != s.size()) throw ConfigError("'" + s + "' is not a number");
  if (!std::isfinite(v)) throw ConfigError("'" + s + "' is not finite");
  return v;
}

long long to_int(const std::string& s) {
  std::size_t used = 0;
  long long v;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + s + "' is not an integer");
  }
  if (used != s.size()) throw ConfigError("'" + s + "' is not an integer");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("'" + s + "' is not a boolean");
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& w : words(s)) out.push_back(to_double(w));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i]);
  return out;
}

std::vector<std::pair<Index, Index>> to_pairs(const std::string& s) {
  std::vector<std::pair<Index, Index>> out;
  for (const auto& w : words(s)) {
    const auto parts = split(w, ':');
    if (parts.size() != 2) throw ConfigError("pair '" + w + "' must look like k:kp");
    out.emplace_back(to_int(parts[0]), to_int(parts[1]));
  }
  return out;
}

std::vector<PacketEntry> to_packet(const std::string& s) {
  std::vector<PacketEntry> out;
  for (const auto& w : words(s)) {
    const auto parts = split(w, ':');
    if (parts.size() != 3) throw ConfigError("packet entry '" + w + "' must look like mode:re:im");
    out.push_back({static_cast<Index>(to_int(parts[0])), Scalar(to_double(parts[1]), to_double(parts[2]))});
  }
  return out;
}

std::string str(const std::vector<std::pair<Index, Index>>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i].first) + ":" + std::to_string(v[i].second);
  return out;
}

std::string str(const std::vector<PacketEntry>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out += (i ? " " : "") + std::to_string(v[i].mode) + ":" + fmt(v[i].amplitude.real()) + ":" + fmt(v[i].amplitude.imag());
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define PF_DOUBLE(sec, key, member) \
  Field { sec, key, [](const RunConfig& c) { return fmt(c.member); }, [](RunConfig& c, const std::string& s) { c.member = to_double(s); } }
#define PF_INT(sec, key, member)                                                     \
  Field {                                                                            \
    sec, key, [](const RunConfig& c) { return std::to_string(c.member); },           \
        [](RunConfig& c, const std::string& s) { c.member = static_cast<decltype(c.member)>(to_int(s)); } \
  }
#define PF_BOOL(sec, key, member) \
  Field { sec, key, [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, [](RunConfig& c, const std::string& s) { c.member = to_bool(s); } }
#define PF_STRING(sec, key, member) \
  Field { sec, key, [](const RunConfig& c) { return c.member; }, [](RunConfig& c, const std::string& s) { c.member = s; } }
#define PF_LIST(sec, key, member) \
  Field { sec, key, [](const RunConfig& c) { return join(c.member); }, [](RunConfig& c, const std::string& s) { c.member = to_doubles(s); } }
#define PF_PACKET(sec, key, member) \
  Field { sec, key, [](const RunConfig& c) { return str(c.member); }, [](RunConfig& c, const std::string& s) { c.member = to_packet(s); } }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      PF_INT("model", "dimension", model.dimension),
      PF_INT("model", "particles", model.particles),
      PF_INT("model", "two_spin", model.two_spin),
      PF_STRING("model", "potential", model.potential.name),
      PF_DOUBLE("model", "potential_strength", model.potential.strength),
      PF_DOUBLE("model", "potential_depth", model.potential.depth),
      PF_DOUBLE("model", "well_position", model.potential.well_position),
      PF_DOUBLE("model", "potential_charge", model.potential.charge),
      PF_DOUBLE("model", "softening", model.potential.softening),
      PF_DOUBLE("model", "interaction", model.potential.interaction),
      PF_STRING("model", "potential_table", model.potential_table),
      PF_DOUBLE("model", "mu", model.mu),
      PF_DOUBLE("model", "charge", model.charge),
      PF_DOUBLE("model", "lambda", model.lambda),
      PF_STRING("model", "cutoff", model.cutoff),
      PF_DOUBLE("model", "momentum_floor", model.momentum_floor),

      PF_INT("discretization", "matter_points", discretization.matter_points),
      PF_DOUBLE("discretization", "half_width", discretization.half_width),
      PF_LIST("discretization", "shells", discretization.shells),
      PF_LIST("discretization", "shell_widths", discretization.shell_widths),
      PF_INT("discretization", "directions_per_shell", discretization.directions_per_shell),
      PF_INT("discretization", "n_max", discretization.n_max),
      PF_STRING("discretization", "grid_table", discretization.grid_table),
      PF_DOUBLE("discretization", "memory_budget_mb", discretization.memory_budget_mb),

      PF_DOUBLE("solver", "eig_tol", solver.eig_tol),
      PF_DOUBLE("solver", "tol", solver.tol),
      PF_INT("solver", "max_iter", solver.max_iter),
      PF_INT("solver", "dense_threshold", solver.dense_threshold),
      PF_INT("solver", "direct_threshold", solver.direct_threshold),
      PF_INT("solver", "propagation_dense_threshold", solver.propagation_dense_threshold),
      PF_BOOL("solver", "iterative", solver.iterative),
      PF_LIST("solver", "etas", solver.etas),
      PF_LIST("solver", "epsilons", solver.epsilons),
      PF_DOUBLE("solver", "tail_tol", solver.tail_tol),
      PF_INT("solver", "quadrature_nodes", solver.quadrature_nodes),
      PF_DOUBLE("solver", "panel_phase", solver.panel_phase),
      PF_DOUBLE("solver", "krylov_tol", solver.krylov_tol),
      PF_DOUBLE("solver", "stability_tol", solver.stability_tol),
      PF_DOUBLE("solver", "quadrature_budget", solver.quadrature_budget),

      Field{"experiment", "pairs", [](const RunConfig& c) { return str(c.experiment.pairs); },
            [](RunConfig& c, const std::string& s) { c.experiment.pairs = to_pairs(s); }},
      PF_PACKET("experiment", "f", experiment.f),
      PF_PACKET("experiment", "h", experiment.h),
      PF_PACKET("experiment", "h_disjoint", experiment.h_disjoint),
      PF_LIST("experiment", "times", experiment.times),
      PF_BOOL("experiment", "cross_check", experiment.cross_check),
      PF_BOOL("experiment", "ray_scan", experiment.ray_scan),
      PF_INT("experiment", "ray_mode", experiment.ray_mode),
      PF_LIST("experiment", "ray_radii", experiment.ray_radii),
      PF_LIST("experiment", "sweep_charges", experiment.sweep_charges),

      PF_INT("verify", "ccr_pairs", verify.ccr_pairs),
      PF_INT("verify", "random_states", verify.random_states),
      PF_INT("verify", "packets", verify.packets),
      PF_INT("verify", "creation_order", verify.creation_order),
      PF_INT("verify", "creation_draws", verify.creation_draws),
      PF_DOUBLE("verify", "calibration_margin", verify.calibration_margin),
      PF_LIST("verify", "couplings", verify.couplings),
      PF_INT("verify", "pull_n_low", verify.pull_n_low),
      PF_INT("verify", "pull_n_high", verify.pull_n_high),
      PF_LIST("verify", "halfline_epsilons", verify.halfline_epsilons),
      PF_LIST("verify", "abelian_epsilons", verify.abelian_epsilons),
      PF_LIST("verify", "form_epsilons", verify.form_epsilons),
      PF_DOUBLE("verify", "prop_epsilon", verify.prop_epsilon),
      PF_DOUBLE("verify", "ccr_tol", verify.ccr_tol),
      PF_DOUBLE("verify", "comm_tol", verify.comm_tol),
      PF_DOUBLE("verify", "halfline_tol", verify.halfline_tol),
      PF_DOUBLE("verify", "abelian_factor", verify.abelian_factor),
      PF_DOUBLE("verify", "pull_factor", verify.pull_factor),
      PF_DOUBLE("verify", "form_tol", verify.form_tol),
      PF_DOUBLE("verify", "intertwine_tol", verify.intertwine_tol),

      PF_INT("run", "seed", run.seed),
      PF_INT("run", "threads", run.threads),
  };
  return table;
}

#undef PF_DOUBLE
#undef PF_INT
#undef PF_BOOL
#undef PF_STRING
#undef PF_LIST
#undef PF_PACKET

void require(bool ok, const char* field, const std::string& msg) {
  if (!ok) throw ConfigError(std::string(field) + ": " + msg);
}

bool all_positive(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' is outside any section");
    for (const auto& [key, node] : body) {
      const auto& table = fields();
      const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
        return section == f.section && key == f.key;
      });
      if (it == table.end()) throw ConfigError("[" + section + "] " + key + ": unknown key");
      try {
        it->set(c, node.data());
      } catch (const ConfigError& e) {
        throw ConfigError("[" + section + "] " + key + ": " + e.what());
      }
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
  return out.str();
}

std::vector<std::array<std::string, 3>> config_entries(const RunConfig& config) {
  std::vector<std::array<std::string, 3>> out;
  for (const auto& f : fields()) out.push_back({f.section, f.key, f.get(config)});
  return out;
}

void validate(const RunConfig& c) {
  const auto& m = c.model;
  require(m.dimension >= 1 && m.dimension <= 3, "[model] dimension", "must be 1, 2 or 3");
  require(m.particles == 1 || m.particles == 2, "[model] particles", "must be 1 or 2");
  require(m.two_spin == 0 || m.two_spin == 1, "[model] two_spin", "must be 0 or 1");
  require(m.two_spin == 0 || m.dimension == 3, "[model] two_spin", "spin 1/2 needs dimension = 3");
  const std::vector<std::string> names{"harmonic", "box", "double-well", "soft-coulomb", "tabulated"};
  require(std::find(names.begin(), names.end(), m.potential.name) != names.end(), "[model] potential",
          "unknown potential '" + m.potential.name + "'");
  require(m.potential.name != "tabulated" || !m.potential_table.empty(), "[model] potential_table",
          "required for the tabulated potential");
  require(m.potential.well_position > 0.0, "[model] well_position", "must be > 0");
  require(m.potential.softening > 0.0, "[model] softening", "must be > 0");
  require(m.lambda > 0.0, "[model] lambda", "must be > 0");
  require(m.cutoff == "sharp" || m.cutoff == "gaussian", "[model] cutoff", "must be sharp or gaussian");
  require(m.momentum_floor > 0.0, "[model] momentum_floor", "must be > 0");

  const auto& d = c.discretization;
  require(d.matter_points >= 3, "[discretization] matter_points", "must be >= 3");
  require(d.half_width > 0.0, "[discretization] half_width", "must be > 0");
  require(!d.shells.empty() || !d.grid_table.empty(), "[discretization] shells", "at least one shell");
  for (double r : d.shells)
    require(r > m.momentum_floor, "[discretization] shells", "radius " + fmt(r) + " is not above momentum_floor");
  require(d.shell_widths.empty() || d.shell_widths.size() == d.shells.size(), "[discretization] shell_widths",
          "must be empty or match shells");
  require(all_positive(d.shell_widths), "[discretization] shell_widths", "must be > 0");
  require(d.directions_per_shell >= 1, "[discretization] directions_per_shell", "must be >= 1");
  require(d.n_max >= 1, "[discretization] n_max", "must be >= 1");
  require(d.memory_budget_mb > 0.0, "[discretization] memory_budget_mb", "must be > 0");

  const auto& s = c.solver;
  require(s.eig_tol > 0.0, "[solver] eig_tol", "must be > 0");
  require(s.tol > 0.0, "[solver] tol", "must be > 0");
  require(s.max_iter >= 1, "[solver] max_iter", "must be >= 1");
  require(s.dense_threshold >= 0, "[solver] dense_threshold", "must be >= 0");
  require(s.direct_threshold >= 0, "[solver] direct_threshold", "must be >= 0");
  require(s.propagation_dense_threshold >= 0, "[solver] propagation_dense_threshold", "must be >= 0");
  require(!s.etas.empty() && all_positive(s.etas), "[solver] etas", "need at least one value, all > 0");
  require(!s.epsilons.empty() && all_positive(s.epsilons), "[solver] epsilons", "need at least one value, all > 0");
  require(s.tail_tol > 0.0 && s.tail_tol < 1.0, "[solver] tail_tol", "must lie in (0, 1)");
  require(s.quadrature_nodes == 10 || s.quadrature_nodes == 15 || s.quadrature_nodes == 20 || s.quadrature_nodes == 30,
          "[solver] quadrature_nodes", "must be 10, 15, 20 or 30");
  require(s.panel_phase > 0.0, "[solver] panel_phase", "must be > 0");
  require(s.krylov_tol > 0.0, "[solver] krylov_tol", "must be > 0");
  require(s.stability_tol > 0.0, "[solver] stability_tol", "must be > 0");
  require(s.quadrature_budget >= 0.0, "[solver] quadrature_budget", "must be >= 0");

  const auto& e = c.experiment;
  require(all_positive(e.ray_radii), "[experiment] ray_radii", "must be > 0");
  for (double t : e.times) require(t >= 0.0, "[experiment] times", "must be >= 0");
  require(e.ray_mode >= 0, "[experiment] ray_mode", "must be >= 0");

  const auto& v = c.verify;
  require(v.ccr_pairs >= 1 && v.random_states >= 1 && v.packets >= 1 && v.creation_draws >= 1, "[verify]",
          "counts must be >= 1");
  require(v.creation_order >= 1 && v.creation_order <= 3, "[verify] creation_order", "must be 1, 2 or 3");
  require(v.calibration_margin >= 1.0, "[verify] calibration_margin", "must be >= 1");
  require(v.pull_n_low >= 1 && v.pull_n_high > v.pull_n_low, "[verify] pull_n_low", "need 1 <= pull_n_low < pull_n_high");
  require(all_positive(v.halfline_epsilons) && all_positive(v.abelian_epsilons) && all_positive(v.form_epsilons),
          "[verify] epsilons", "must be > 0");
  require(v.prop_epsilon > 0.0, "[verify] prop_epsilon", "must be > 0");
  for (double t : {v.ccr_tol, v.comm_tol, v.halfline_tol, v.abelian_factor, v.pull_factor, v.form_tol, v.intertwine_tol})
    require(t >= 0.0, "[verify] tolerances", "must be >= 0");
  require(c.run.threads >= 1, "[run] threads", "must be >= 1");
}

namespace {

ModeGrid grid_for(const RunConfig& c, double charge) {
  const auto& d = c.discretization;
  if (!d.grid_table.empty()) {
    std::ifstream in(d.grid_table);
    if (!in) throw ConfigError("cannot read grid table " + d.grid_table);
    ModeGrid g = read_grid_table(in, c.model.momentum_floor);
    if (g.dimension() != c.model.dimension) throw ConfigError("grid table dimension differs from [model] dimension");
    if (charge == c.model.charge) return g;
    if (c.model.charge == 0.0) throw ConfigError("cannot rescale a grid table whose configured charge is 0");
    std::vector<Mode> modes = g.modes();
    for (auto& m : modes) m.kappa *= charge / c.model.charge;
    return ModeGrid(g.dimension(), std::move(modes), c.model.momentum_floor);
  }
  GridConfig gc;
  gc.dimension = c.model.dimension;
  gc.shells = d.shells;
  gc.shell_widths = d.shell_widths;
  gc.directions_per_shell = d.directions_per_shell;
  gc.momentum_floor = c.model.momentum_floor;
  gc.cutoff.charge = charge;
  gc.cutoff.lambda = c.model.lambda;
  gc.cutoff.shape = c.model.cutoff == "gaussian" ? Cutoff::Shape::kGaussian : Cutoff::Shape::kSharp;
  return build_grid(gc);
}

}  // namespace

ModeGrid make_grid(const RunConfig& config) { return grid_for(config, config.model.charge); }

PauliFierzModel make_model(const RunConfig& config) {
  return make_model(config, config.model.charge, config.discretization.n_max);
}

PauliFierzModel make_model(const RunConfig& c, double charge, int n_max) {
  ParticleGridConfig pc;
  pc.dimension = c.model.dimension;
  pc.points = c.discretization.matter_points;
  pc.half_width = c.discretization.half_width;
  pc.particles = c.model.particles;
  pc.two_spin = c.model.two_spin;
  ModelParams mp;
  mp.mu = c.model.mu;
  mp.n_max = n_max;
  mp.potential = c.model.potential;
  if (mp.potential.name == "tabulated") load_potential_table(mp.potential, c.model.potential_table);
  mp.memory_budget_bytes = c.discretization.memory_budget_mb * 1e6;
  return PauliFierzModel(ParticleGrid(pc), grid_for(c, charge), mp);
}

GroundStateOptions ground_state_options(const RunConfig& c) {
  GroundStateOptions o;
  o.tol = c.solver.eig_tol;
  o.dense_threshold = c.solver.dense_threshold;
  o.force_iterative = c.solver.iterative;
  o.seed = c.run.seed;
  return o;
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.tol = c.solver.tol;
  o.max_iter = c.solver.max_iter;
  o.direct_threshold = c.solver.direct_threshold;
  o.force_iterative = c.solver.iterative;
  return o;
}

ScatteringOptions scattering_options(const RunConfig& c) {
  ScatteringOptions o;
  o.solve = solve_options(c);
  o.quadrature.nodes = c.solver.quadrature_nodes;
  o.quadrature.panel_phase = c.solver.panel_phase;
  o.quadrature.tail_tol = c.solver.tail_tol;
  o.dense_threshold = c.solver.propagation_dense_threshold;
  o.krylov_tol = c.solver.krylov_tol;
  o.stability_tol = c.solver.stability_tol;
  o.quadrature_budget = c.solver.quadrature_budget;
  o.threads = c.run.threads;
  return o;
}

PhotonFunction packet(const std::vector<PacketEntry>& entries, Index modes) {
  PhotonFunction f = PhotonFunction::Zero(modes);
  for (const auto& e : entries) {
    if (e.mode < 0 || e.mode >= modes)
      throw ConfigError("wave packet mode " + std::to_string(e.mode) + " is outside the grid of " +
                        std::to_string(modes) + " modes");
    f(e.mode) += e.amplitude;
  }
  return f;
}

}  // namespace pfscat
