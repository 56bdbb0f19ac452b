#include "spdelab/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <stdexcept>

namespace spdelab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw std::invalid_argument("config: " + where + ": " + msg);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) {
      if (it.key() == a) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(where, "unknown key \"" + it.key() + "\"");
  }
}

const json& require(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing key \"") + key + "\"");
  return *it;
}

double num(const json& j, const std::string& where, const char* key) {
  const json& v = require(j, where, key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

double num_or(const json& j, const std::string& where, const char* key,
              double dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number()) fail(where + "." + key, "expected a number");
  return it->get<double>();
}

int integer(const json& j, const std::string& where, const char* key) {
  const json& v = require(j, where, key);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

int integer_or(const json& j, const std::string& where, const char* key,
               int dflt) {
  auto it = j.find(key);
  if (it == j.end()) return dflt;
  if (!it->is_number_integer()) fail(where + "." + key, "expected an integer");
  return it->get<int>();
}

std::string text(const json& j, const std::string& where, const char* key) {
  const json& v = require(j, where, key);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> num_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) fail(where, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> num_list_key(const json& j, const std::string& where,
                                 const char* key) {
  return num_list(require(j, where, key), where + "." + key);
}

std::vector<int> int_list_key(const json& j, const std::string& where,
                              const char* key) {
  const json& v = require(j, where, key);
  const std::string w = where + "." + key;
  if (!v.is_array()) fail(w, "expected an array of integers");
  std::vector<int> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number_integer()) fail(w, "expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

void check_ascending(const std::vector<double>& v, const std::string& where,
                     bool strictly_positive) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (strictly_positive && !(v[i] > 0.0)) fail(where, "entries must be > 0");
    if (i > 0 && !(v[i] > v[i - 1])) fail(where, "entries must be ascending");
  }
}

ScalingRule parse_rule(const json& j, const std::string& where) {
  const std::string type = text(j, where, "type");
  if (type == "list") {
    check_keys(j, where, {"type", "values"});
    return ScalingRule::list(num_list_key(j, where, "values"));
  }
  if (type == "power") {
    check_keys(j, where, {"type", "amplitude", "exponent", "cutoff"});
    return ScalingRule::power(num(j, where, "amplitude"),
                              num(j, where, "exponent"),
                              integer_or(j, where, "cutoff", 0));
  }
  fail(where + ".type", "expected \"list\" or \"power\"");
}

json rule_to_json(const ScalingRule& r) {
  if (r.kind() == ScalingRule::Kind::list) {
    return json{{"type", "list"}, {"values", r.values()}};
  }
  json j{{"type", "power"},
         {"amplitude", r.amplitude()},
         {"exponent", r.exponent()}};
  if (r.cutoff() > 0) j["cutoff"] = r.cutoff();
  return j;
}

BoundedCoefMap parse_map(const json& j, const std::string& where) {
  const std::string type = text(j, where, "type");
  if (type == "constant") {
    check_keys(j, where, {"type", "value"});
    return BoundedCoefMap::constant(num(j, where, "value"));
  }
  if (type == "tanh") {
    check_keys(j, where, {"type", "base", "amplitude", "slope"});
    return BoundedCoefMap::tanh_affine(num(j, where, "base"),
                                       num(j, where, "amplitude"),
                                       num(j, where, "slope"));
  }
  fail(where + ".type", "expected \"constant\" or \"tanh\"");
}

json map_to_json(const BoundedCoefMap& m) {
  if (m.is_constant()) return json{{"type", "constant"}, {"value", m.base()}};
  return json{{"type", "tanh"},
              {"base", m.base()},
              {"amplitude", m.amplitude()},
              {"slope", m.slope()}};
}

InitialLaw parse_law(const json& j, const std::string& where) {
  const std::string type = text(j, where, "type");
  if (type == "point") {
    check_keys(j, where, {"type", "coefficients"});
    return InitialLaw::point(num_list_key(j, where, "coefficients"));
  }
  if (type == "gaussian") {
    check_keys(j, where, {"type", "mean", "stddev"});
    return InitialLaw::gaussian(num_list_key(j, where, "mean"),
                                num_list_key(j, where, "stddev"));
  }
  fail(where + ".type", "expected \"point\" or \"gaussian\"");
}

json law_to_json(const InitialLaw& law) {
  if (law.kind == InitialLaw::Kind::point) {
    return json{{"type", "point"}, {"coefficients", law.mean}};
  }
  return json{{"type", "gaussian"}, {"mean", law.mean}, {"stddev", law.stddev}};
}

LipschitzObservable parse_observable(const json& j, const std::string& where) {
  const std::string type = text(j, where, "type");
  if (type == "linear") {
    check_keys(j, where, {"type", "coefficients", "label"});
    std::string label = j.contains("label") ? text(j, where, "label") : "linear";
    return LipschitzObservable::linear(
        SpectralField(num_list_key(j, where, "coefficients")), label);
  }
  if (type == "distance") {
    check_keys(j, where, {"type", "anchor", "label"});
    std::string label =
        j.contains("label") ? text(j, where, "label") : "distance";
    return LipschitzObservable::distance(
        SpectralField(num_list_key(j, where, "anchor")), label);
  }
  fail(where + ".type", "expected \"linear\" or \"distance\"");
}

json observable_to_json(const LipschitzObservable& obs) {
  if (obs.kind == LipschitzObservable::Kind::linear) {
    return json{{"type", "linear"},
                {"coefficients", obs.ref.c},
                {"label", obs.label}};
  }
  return json{
      {"type", "distance"}, {"anchor", obs.ref.c}, {"label", obs.label}};
}

ReactionSpec parse_reaction(const json& j, const std::string& where) {
  const std::string kind = text(j, where, "kind");
  if (kind == "affine") {
    check_keys(j, where, {"kind", "slopes", "offsets", "c_f"});
    ScalingRule slopes = parse_rule(require(j, where, "slopes"), where + ".slopes");
    ScalingRule offsets = j.contains("offsets")
                              ? parse_rule(j.at("offsets"), where + ".offsets")
                              : ScalingRule::zero();
    const double c_f = num_or(j, where, "c_f", slopes.max_abs());
    return ReactionSpec::affine(std::move(slopes), std::move(offsets), c_f);
  }
  if (kind == "bounded") {
    check_keys(j, where, {"kind", "amplitude", "slope", "c_f"});
    const double amp = num(j, where, "amplitude");
    const double slope = num(j, where, "slope");
    const double c_f = num_or(j, where, "c_f", std::abs(amp * slope));
    return ReactionSpec::bounded(amp, slope, c_f);
  }
  if (kind == "cubic") {
    check_keys(j, where, {"kind", "c1"});
    return ReactionSpec::cubic(num(j, where, "c1"));
  }
  fail(where + ".kind", "expected \"affine\", \"bounded\" or \"cubic\"");
}

json reaction_to_json(const ReactionSpec& r) {
  switch (r.kind) {
    case ReactionSpec::Kind::affine:
      return json{{"kind", "affine"},
                  {"slopes", rule_to_json(r.slopes)},
                  {"offsets", rule_to_json(r.offsets)},
                  {"c_f", r.c_f}};
    case ReactionSpec::Kind::bounded:
      return json{{"kind", "bounded"},
                  {"amplitude", r.amp},
                  {"slope", r.slope},
                  {"c_f", r.c_f}};
    case ReactionSpec::Kind::cubic:
    default:
      return json{{"kind", "cubic"}, {"c1", r.c1}};
  }
}

DiffusionSpec parse_diffusion(const json& j, const std::string& where) {
  check_keys(j, where, {"scales", "modulation", "sigma_bar", "c_sigma"});
  ScalingRule scales = parse_rule(require(j, where, "scales"), where + ".scales");
  BoundedCoefMap modulation =
      j.contains("modulation")
          ? parse_map(j.at("modulation"), where + ".modulation")
          : BoundedCoefMap::constant(1.0);
  const double tight_bar = scales.norm_bound() * modulation.sup_abs();
  double sigma_bar = num_or(j, where, "sigma_bar", tight_bar);
  if (!std::isfinite(sigma_bar)) {
    fail(where, "sigma_bar must be given (scales have unbounded norm)");
  }
  const double c_sigma = num_or(j, where, "c_sigma",
                                scales.max_abs() * modulation.lipschitz());
  return DiffusionSpec::bounded_diagonal(std::move(scales), modulation,
                                         sigma_bar, c_sigma);
}

json diffusion_to_json(const DiffusionSpec& d) {
  return json{{"scales", rule_to_json(d.scales)},
              {"modulation", map_to_json(d.modulation)},
              {"sigma_bar", d.sigma_bar},
              {"c_sigma", d.c_sigma}};
}

JumpSpec parse_jumps(const json& j, const std::string& where) {
  const std::string kind = text(j, where, "kind");
  if (kind == "none") {
    check_keys(j, where, {"kind"});
    return JumpSpec::none();
  }
  if (kind == "discrete") {
    check_keys(j, where,
               {"kind", "marks", "weights", "direction", "modulation",
                "envelope_scale", "c_g", "c_g6"});
    ScalingRule direction =
        parse_rule(require(j, where, "direction"), where + ".direction");
    BoundedCoefMap modulation =
        j.contains("modulation")
            ? parse_map(j.at("modulation"), where + ".modulation")
            : BoundedCoefMap::constant(1.0);
    return JumpSpec::discrete(
        num_list_key(j, where, "marks"), num_list_key(j, where, "weights"),
        std::move(direction), modulation, num_or(j, where, "envelope_scale", -1.0),
        num_or(j, where, "c_g", -1.0), num_or(j, where, "c_g6", -1.0));
  }
  if (kind == "interval_uniform") {
    check_keys(j, where,
               {"kind", "lo", "hi", "total_mass", "nodes", "direction",
                "modulation", "envelope_scale", "c_g", "c_g6"});
    ScalingRule direction =
        parse_rule(require(j, where, "direction"), where + ".direction");
    BoundedCoefMap modulation =
        j.contains("modulation")
            ? parse_map(j.at("modulation"), where + ".modulation")
            : BoundedCoefMap::constant(1.0);
    return JumpSpec::interval_uniform(
        num(j, where, "lo"), num(j, where, "hi"), num(j, where, "total_mass"),
        integer(j, where, "nodes"), std::move(direction), modulation,
        num_or(j, where, "envelope_scale", -1.0), num_or(j, where, "c_g", -1.0),
        num_or(j, where, "c_g6", -1.0));
  }
  fail(where + ".kind",
       "expected \"none\", \"discrete\" or \"interval_uniform\"");
}

json jumps_to_json(const JumpSpec& s) {
  return json{{"kind", "discrete"},
              {"marks", s.marks},
              {"weights", s.weights},
              {"direction", rule_to_json(s.direction)},
              {"modulation", map_to_json(s.modulation)},
              {"envelope_scale", s.envelope_scale},
              {"c_g", s.c_g},
              {"c_g6", s.c_g6}};
}

ModelSpec parse_model(const json& j, const std::string& where) {
  check_keys(j, where,
             {"n_modes", "blowup_threshold", "reaction", "diffusion", "jumps"});
  ModelSpec m;
  m.n_modes = integer(j, where, "n_modes");
  if (m.n_modes < 1) fail(where + ".n_modes", "must be >= 1");
  m.blowup_threshold = num_or(j, where, "blowup_threshold", 1e6);
  if (!(m.blowup_threshold > 0.0)) fail(where + ".blowup_threshold", "must be > 0");
  m.reaction = parse_reaction(require(j, where, "reaction"), where + ".reaction");
  if (j.contains("diffusion")) {
    m.diffusion = parse_diffusion(j.at("diffusion"), where + ".diffusion");
  }
  if (j.contains("jumps")) {
    m.jumps = parse_jumps(j.at("jumps"), where + ".jumps");
  }
  m.validate();
  return m;
}

std::uint64_t parse_seed(const json& j, const std::string& where) {
  const json& v = require(j, where, "seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const long long s = v.get<long long>();
    if (s >= 0) return static_cast<std::uint64_t>(s);
  }
  fail(where + ".seed", "expected a nonnegative integer");
}

RunConfig parse_run(const json& j, const std::string& where) {
  check_keys(j, where,
             {"seed", "dt", "horizon", "members", "threads", "initial"});
  RunConfig r;
  r.seed = parse_seed(j, where);
  r.dt = num(j, where, "dt");
  if (!(r.dt > 0.0)) fail(where + ".dt", "must be > 0");
  r.horizon = num(j, where, "horizon");
  if (!(r.horizon > 0.0)) fail(where + ".horizon", "must be > 0");
  num_steps(r.horizon, r.dt);  // throws unless horizon sits on the step grid
  r.members = integer(j, where, "members");
  if (r.members < 1) fail(where + ".members", "must be >= 1");
  r.threads = integer_or(j, where, "threads", 1);
  if (r.threads < 1) fail(where + ".threads", "must be >= 1");
  if (j.contains("initial")) {
    r.initial = parse_law(j.at("initial"), where + ".initial");
  }
  return r;
}

ExperimentConfig parse_experiment(const json& j, const std::string& where,
                                  const RunConfig& run) {
  ExperimentConfig e;
  const std::string kind = text(j, where, "kind");
  if (kind == "contraction") {
    check_keys(j, where, {"kind", "x0", "y0", "obs_times", "rate_fraction"});
    e.kind = ExperimentKind::contraction;
    e.x0 = num_list_key(j, where, "x0");
    e.y0 = num_list_key(j, where, "y0");
    e.obs_times = num_list_key(j, where, "obs_times");
    if (e.obs_times.empty()) fail(where + ".obs_times", "must not be empty");
    check_ascending(e.obs_times, where + ".obs_times", false);
    observation_steps(e.obs_times, run.horizon, run.dt);
    e.rate_fraction = num_or(j, where, "rate_fraction", 0.75);
    if (!(e.rate_fraction > 0.0 && e.rate_fraction <= 1.0)) {
      fail(where + ".rate_fraction", "must lie in (0, 1]");
    }
    return e;
  }
  if (kind == "concentration") {
    check_keys(j, where, {"kind", "observable", "r_grid"});
    e.kind = ExperimentKind::concentration;
    e.observable =
        parse_observable(require(j, where, "observable"), where + ".observable");
    e.r_grid = num_list_key(j, where, "r_grid");
    if (e.r_grid.empty()) fail(where + ".r_grid", "must not be empty");
    check_ascending(e.r_grid, where + ".r_grid", true);
    return e;
  }
  if (kind == "certificates") {
    check_keys(j, where,
               {"kind", "observable", "lambda_grid", "r_grid", "samples",
                "burn_in", "spacing", "block_size", "bootstrap_replicates"});
    e.kind = ExperimentKind::certificates;
    e.observable =
        parse_observable(require(j, where, "observable"), where + ".observable");
    e.lambda_grid = num_list_key(j, where, "lambda_grid");
    if (e.lambda_grid.empty()) fail(where + ".lambda_grid", "must not be empty");
    check_ascending(e.lambda_grid, where + ".lambda_grid", true);
    e.r_grid = num_list_key(j, where, "r_grid");
    if (e.r_grid.empty()) fail(where + ".r_grid", "must not be empty");
    check_ascending(e.r_grid, where + ".r_grid", true);
    e.samples = integer(j, where, "samples");
    if (e.samples < 10) fail(where + ".samples", "must be >= 10");
    e.burn_in = num(j, where, "burn_in");
    if (!(e.burn_in >= 0.0)) fail(where + ".burn_in", "must be >= 0");
    e.spacing = num(j, where, "spacing");
    if (!(e.spacing > 0.0)) fail(where + ".spacing", "must be > 0");
    e.block_size = integer_or(j, where, "block_size", 5);
    if (e.block_size < 1) fail(where + ".block_size", "must be >= 1");
    if (e.samples < 2 * e.block_size) {
      fail(where + ".samples", "must be at least twice block_size");
    }
    e.bootstrap_replicates = integer_or(j, where, "bootstrap_replicates", 400);
    if (e.bootstrap_replicates < 50) {
      fail(where + ".bootstrap_replicates", "must be >= 50");
    }
    if (e.burn_in + (e.samples - 1) * e.spacing > run.horizon + 1e-9) {
      fail(where, "burn_in + (samples - 1) * spacing exceeds run.horizon");
    }
    return e;
  }
  if (kind == "galerkin") {
    check_keys(j, where, {"kind", "levels", "n_reference", "tolerance_ratio"});
    e.kind = ExperimentKind::galerkin;
    e.levels = int_list_key(j, where, "levels");
    if (e.levels.size() < 2) fail(where + ".levels", "need at least 2 levels");
    for (std::size_t i = 0; i < e.levels.size(); ++i) {
      if (e.levels[i] < 1) fail(where + ".levels", "entries must be >= 1");
      if (i > 0 && e.levels[i] <= e.levels[i - 1]) {
        fail(where + ".levels", "entries must be ascending");
      }
    }
    e.n_reference = integer(j, where, "n_reference");
    if (e.n_reference <= e.levels.back()) {
      fail(where + ".n_reference", "must exceed the largest level");
    }
    e.tolerance_ratio = num_or(j, where, "tolerance_ratio", 0.1);
    if (!(e.tolerance_ratio > 0.0 && e.tolerance_ratio < 1.0)) {
      fail(where + ".tolerance_ratio", "must lie in (0, 1)");
    }
    return e;
  }
  if (kind == "moments") {
    check_keys(j, where, {"kind", "mode_counts", "ratio_cap"});
    e.kind = ExperimentKind::moments;
    e.mode_counts = int_list_key(j, where, "mode_counts");
    if (e.mode_counts.size() < 2) {
      fail(where + ".mode_counts", "need at least 2 mode counts");
    }
    for (std::size_t i = 0; i < e.mode_counts.size(); ++i) {
      if (e.mode_counts[i] < 1) fail(where + ".mode_counts", "entries must be >= 1");
      if (i > 0 && e.mode_counts[i] <= e.mode_counts[i - 1]) {
        fail(where + ".mode_counts", "entries must be ascending");
      }
    }
    e.ratio_cap = num_or(j, where, "ratio_cap", 1.5);
    if (!(e.ratio_cap > 1.0)) fail(where + ".ratio_cap", "must be > 1");
    return e;
  }
  if (kind == "rates") {
    check_keys(j, where, {"kind", "r_max", "lambda_max", "grid_points"});
    e.kind = ExperimentKind::rates;
    e.r_max = num_or(j, where, "r_max", 1.0);
    if (!(e.r_max > 0.0)) fail(where + ".r_max", "must be > 0");
    e.lambda_max = num_or(j, where, "lambda_max", 10.0);
    if (!(e.lambda_max > 0.0)) fail(where + ".lambda_max", "must be > 0");
    e.grid_points = integer_or(j, where, "grid_points", 81);
    if (e.grid_points < 2) fail(where + ".grid_points", "must be >= 2");
    return e;
  }
  fail(where + ".kind", "unknown experiment kind \"" + kind + "\"");
}

json experiment_to_json(const ExperimentConfig& e) {
  json j{{"kind", experiment_kind_name(e.kind)}};
  switch (e.kind) {
    case ExperimentKind::contraction:
      j["x0"] = e.x0;
      j["y0"] = e.y0;
      j["obs_times"] = e.obs_times;
      j["rate_fraction"] = e.rate_fraction;
      break;
    case ExperimentKind::concentration:
      j["observable"] = observable_to_json(e.observable);
      j["r_grid"] = e.r_grid;
      break;
    case ExperimentKind::certificates:
      j["observable"] = observable_to_json(e.observable);
      j["lambda_grid"] = e.lambda_grid;
      j["r_grid"] = e.r_grid;
      j["samples"] = e.samples;
      j["burn_in"] = e.burn_in;
      j["spacing"] = e.spacing;
      j["block_size"] = e.block_size;
      j["bootstrap_replicates"] = e.bootstrap_replicates;
      break;
    case ExperimentKind::galerkin:
      j["levels"] = e.levels;
      j["n_reference"] = e.n_reference;
      j["tolerance_ratio"] = e.tolerance_ratio;
      break;
    case ExperimentKind::moments:
      j["mode_counts"] = e.mode_counts;
      j["ratio_cap"] = e.ratio_cap;
      break;
    case ExperimentKind::rates:
      j["r_max"] = e.r_max;
      j["lambda_max"] = e.lambda_max;
      j["grid_points"] = e.grid_points;
      break;
  }
  return j;
}

}  // namespace

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::contraction:
      return "contraction";
    case ExperimentKind::concentration:
      return "concentration";
    case ExperimentKind::certificates:
      return "certificates";
    case ExperimentKind::galerkin:
      return "galerkin";
    case ExperimentKind::moments:
      return "moments";
    case ExperimentKind::rates:
    default:
      return "rates";
  }
}

Config Config::from_json(const nlohmann::json& j) {
  check_keys(j, "top level", {"model", "run", "experiment"});
  Config cfg;
  cfg.model = parse_model(require(j, "top level", "model"), "model");
  cfg.run = parse_run(require(j, "top level", "run"), "run");
  cfg.experiment = parse_experiment(require(j, "top level", "experiment"),
                                    "experiment", cfg.run);
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json Config::to_json() const {
  json jm{{"n_modes", model.n_modes},
          {"blowup_threshold", model.blowup_threshold},
          {"reaction", reaction_to_json(model.reaction)},
          {"diffusion", diffusion_to_json(model.diffusion)}};
  if (!model.jumps.empty()) jm["jumps"] = jumps_to_json(model.jumps);
  json jr{{"seed", run.seed},
          {"dt", run.dt},
          {"horizon", run.horizon},
          {"members", run.members},
          {"threads", run.threads},
          {"initial", law_to_json(run.initial)}};
  return json{{"model", jm},
              {"run", jr},
              {"experiment", experiment_to_json(experiment)}};
}

}  // namespace spdelab
