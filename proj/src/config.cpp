#include "swarmlab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <thread>

#include "swarmlab/errors.hpp"

namespace swarmlab {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::string_view init_name(InitKind k) { return k == InitKind::Special ? "special" : "usual"; }
std::string_view velocity_name(VelocityInit v) { return v == VelocityInit::Uniform ? "uniform" : "zero"; }

json auto_or(long v) { return v == kAuto ? json(nullptr) : json(v); }

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("field '") + key + "': " + e.what());
  }
}

void take_auto(const json& j, const char* key, long& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null() || (j.at(key).is_string() && j.at(key).get<std::string>() == "auto")) {
    out = kAuto;
    return;
  }
  take(j, key, out);
}

const std::vector<std::string>& section_keys(std::string_view name) {
  static const std::map<std::string, std::vector<std::string>, std::less<>> keys = {
      {"init", {"kind", "scale", "stagnating", "dstar", "velocity", "box_halfwidth"}},
      {"stagnation", {"n0", "c0", "cs"}},
      {"precision", {"initial_bits", "guard_bits", "growth_quantum"}},
      {"estimators", {"t_m", "t_e", "tau_grid", "coarse_step", "early_cut"}},
      {"classify", {"mu", "m", "p0"}},
      {"lemma", {"distribution", "mu", "variance", "width", "samples", "checkpoints", "horizons", "seed"}},
      {"persist", {"runlogs", "traces", "phi_sidecar", "phi_bits"}}};
  return keys.find(name)->second;
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  const json& sec = j.at(key);
  if (!sec.is_object()) bad(std::string("field '") + key + "' must be an object");
  const auto& allowed = section_keys(key);
  for (const auto& [k, _] : sec.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      bad("unknown field '" + std::string(key) + "." + k + "'");
    }
  }
  return sec;
}

long scale_down(long v, long f) { return v == kAuto ? kAuto : std::max(1L, v / f); }

}  // namespace

ExperimentKind parse_experiment(std::string_view name) {
  if (name == "exp1") return ExperimentKind::Exp1;
  if (name == "exp2") return ExperimentKind::Exp2;
  if (name == "exp3") return ExperimentKind::Exp3;
  if (name == "single_run" || name == "run") return ExperimentKind::SingleRun;
  if (name == "lemma_check" || name == "lemmas") return ExperimentKind::LemmaCheck;
  bad("unknown experiment '" + std::string(name) + "'");
}

std::string_view experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Exp1: return "exp1";
    case ExperimentKind::Exp2: return "exp2";
    case ExperimentKind::Exp3: return "exp3";
    case ExperimentKind::SingleRun: return "single_run";
    case ExperimentKind::LemmaCheck: return "lemma_check";
  }
  return "?";
}

std::vector<int> ExperimentConfig::stagnating_set() const {
  if (init.kind != InitKind::Special || init.stagnating <= 0) return {};
  std::vector<int> out;
  for (int k = 0; k < init.stagnating; ++k) out.push_back(init.dstar + k);
  return out;
}

StagnationConfig ExperimentConfig::stagnation_config() const {
  StagnationConfig s = stagnation;
  s.delta_t = delta_t;
  return s;
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment_name(experiment);
  j["objective"] = objective_name(objective);
  j["particles"] = N;
  j["dims"] = D;
  j["init"] = {{"kind", init_name(init.kind)},
               {"scale", auto_or(init.scale)},
               {"stagnating", init.stagnating},
               {"dstar", init.dstar},
               {"velocity", velocity_name(init.velocity)},
               {"box_halfwidth", init.box_halfwidth}};
  j["iterations"] = T;
  j["delta_t"] = delta_t;
  j["runs"] = R;
  j["base_seed"] = base_seed;
  j["stagnation"] = {{"n0", stagnation.n0}, {"c0", stagnation.c0}, {"cs", stagnation.cs}};
  j["precision"] = {{"initial_bits", precision.initial_bits},
                    {"guard_bits", precision.guard_bits},
                    {"growth_quantum", precision.growth_quantum}};
  j["estimators"] = {{"t_m", auto_or(estimators.t_m)},
                     {"t_e", auto_or(estimators.t_e)},
                     {"tau_grid", estimators.tau_grid},
                     {"coarse_step", auto_or(estimators.coarse_step)},
                     {"early_cut", auto_or(estimators.early_cut)}};
  j["classify"] = {{"mu", classify.mu}, {"m", classify.m}, {"p0", classify.p0}};
  j["lemma"] = {{"distribution", lemma.distribution}, {"mu", lemma.mu},
                {"variance", lemma.variance},         {"width", lemma.width},
                {"samples", lemma.samples},           {"checkpoints", lemma.checkpoints},
                {"horizons", lemma.horizons},         {"seed", lemma.seed}};
  j["persist"] = {{"runlogs", persist.runlogs},
                  {"traces", persist.traces},
                  {"phi_sidecar", persist.phi_sidecar},
                  {"phi_bits", persist.phi_bits}};
  j["output_dir"] = output_dir;
  j["threads"] = threads;
  return j;
}

void ExperimentConfig::merge_json(const json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  static const std::vector<std::string> known = {
      "experiment", "objective",  "particles",  "dims",     "init",    "iterations", "delta_t",
      "runs",       "base_seed",  "stagnation", "precision", "estimators", "classify", "lemma",
      "persist",    "output_dir", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) bad("unknown field '" + key + "'");
  }
  if (j.contains("experiment")) experiment = parse_experiment(j.at("experiment").get<std::string>());
  if (j.contains("objective")) {
    try {
      objective = parse_objective(j.at("objective").get<std::string>());
    } catch (const Error& e) {
      bad(e.what());
    }
  }
  take(j, "particles", N);
  take(j, "dims", D);
  take(j, "iterations", T);
  take(j, "delta_t", delta_t);
  take(j, "runs", R);
  take(j, "base_seed", base_seed);
  take(j, "output_dir", output_dir);
  take(j, "threads", threads);

  const json& in = section(j, "init");
  if (in.contains("kind")) {
    const auto k = in.at("kind").get<std::string>();
    if (k == "usual") init.kind = InitKind::Usual;
    else if (k == "special") init.kind = InitKind::Special;
    else bad("init.kind must be usual or special");
  }
  take_auto(in, "scale", init.scale);
  take(in, "stagnating", init.stagnating);
  take(in, "dstar", init.dstar);
  if (in.contains("velocity")) {
    const auto v = in.at("velocity").get<std::string>();
    if (v == "zero") init.velocity = VelocityInit::Zero;
    else if (v == "uniform") init.velocity = VelocityInit::Uniform;
    else bad("init.velocity must be zero or uniform");
  }
  take(in, "box_halfwidth", init.box_halfwidth);

  const json& st = section(j, "stagnation");
  take(st, "n0", stagnation.n0);
  take(st, "c0", stagnation.c0);
  take(st, "cs", stagnation.cs);

  const json& pr = section(j, "precision");
  take(pr, "initial_bits", precision.initial_bits);
  take(pr, "guard_bits", precision.guard_bits);
  take(pr, "growth_quantum", precision.growth_quantum);

  const json& es = section(j, "estimators");
  take_auto(es, "t_m", estimators.t_m);
  take_auto(es, "t_e", estimators.t_e);
  take(es, "tau_grid", estimators.tau_grid);
  take_auto(es, "coarse_step", estimators.coarse_step);
  take_auto(es, "early_cut", estimators.early_cut);

  const json& cl = section(j, "classify");
  take(cl, "mu", classify.mu);
  take(cl, "m", classify.m);
  take(cl, "p0", classify.p0);

  const json& lm = section(j, "lemma");
  take(lm, "distribution", lemma.distribution);
  take(lm, "mu", lemma.mu);
  take(lm, "variance", lemma.variance);
  take(lm, "width", lemma.width);
  take(lm, "samples", lemma.samples);
  take(lm, "checkpoints", lemma.checkpoints);
  take(lm, "horizons", lemma.horizons);
  take(lm, "seed", lemma.seed);

  const json& ps = section(j, "persist");
  take(ps, "runlogs", persist.runlogs);
  take(ps, "traces", persist.traces);
  take(ps, "phi_sidecar", persist.phi_sidecar);
  take(ps, "phi_bits", persist.phi_bits);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("experiment")) cfg = preset(parse_experiment(j.at("experiment").get<std::string>()));
  cfg.merge_json(j);
  return cfg;
}

void ExperimentConfig::resolve() {
  if (init.kind == InitKind::Special && init.scale == kAuto) {
    // exp1 needs the stagnating dims to stay far below the others for the whole run
    init.scale = experiment == ExperimentKind::Exp1 ? (T + 3) / 4 + 128 : 500;
  }
  if (estimators.t_e == kAuto) estimators.t_e = T;
  if (estimators.t_m == kAuto) estimators.t_m = (estimators.t_e / 2) / delta_t * delta_t;
  const long H = (estimators.t_e - estimators.t_m) / std::max(1L, delta_t);
  if (estimators.coarse_step == kAuto) estimators.coarse_step = std::max(1L, H / 1000);
  if (estimators.early_cut == kAuto) estimators.early_cut = std::max(1L, H / 10);
}

void ExperimentConfig::validate() const {
  if (N < 1) bad("particles must be >= 1");
  if (D < 1) bad("dims must be >= 1");
  if (objective == ObjectiveId::HighConditionedElliptic && D < 2) bad("hce needs dims >= 2");
  if (T < 1) bad("iterations must be >= 1");
  if (delta_t < 1) bad("delta_t must be >= 1");
  if (R < 1) bad("runs must be >= 1");
  if (threads < 0) bad("threads must be >= 0");
  if (!(init.box_halfwidth > 0.0)) bad("init.box_halfwidth must be positive");
  try {
    precision.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  if (persist.phi_bits < 0) bad("persist.phi_bits must be >= 0");
  if (persist.phi_bits > 0 && persist.phi_bits < 64) bad("persist.phi_bits must be 0 or >= 64");
  if (experiment == ExperimentKind::LemmaCheck) {
    if (lemma.samples < 1) bad("lemma.samples must be >= 1");
    if (!(lemma.mu < 0.0)) bad("lemma.mu must be negative");
    for (long t : lemma.checkpoints)
      if (t < 1) bad("lemma.checkpoints must be >= 1");
    for (long t : lemma.horizons)
      if (t < 1) bad("lemma.horizons must be >= 1");
    return;
  }
  if (init.kind == InitKind::Special) {
    if (init.scale < 0) bad("init.scale must be >= 0");
    if (init.stagnating < 1 || init.stagnating > D) bad("init.stagnating must be in [1, dims]");
    if (init.dstar < 1 || init.dstar + init.stagnating - 1 > D) bad("init.dstar + stagnating - 1 must be <= dims");
  }
  const auto& e = estimators;
  if (e.t_m % delta_t != 0 || e.t_e % delta_t != 0) bad("t_m and t_e must be multiples of delta_t");
  if (e.t_e > T) bad("t_e must be <= iterations");
  if (e.t_m < 0 || e.t_m >= e.t_e) bad("need 0 <= t_m < t_e");
  const long H = (e.t_e - e.t_m) / delta_t;
  for (long tau : e.tau_grid)
    if (tau < 1 || tau > H) bad("tau_grid entries must lie in [1, (t_e - t_m) / delta_t]");
  if (e.coarse_step < 1 || e.coarse_step > H) bad("coarse_step must lie in [1, horizon]");
  if (e.early_cut < 1 || e.early_cut >= H) bad("early_cut must lie in [1, horizon)");
  if (experiment == ExperimentKind::Exp1 || experiment == ExperimentKind::Exp2) {
    if (init.kind != InitKind::Special) bad(std::string(experiment_name(experiment)) + " needs special init");
    if (experiment == ExperimentKind::Exp1 && init.stagnating >= D) bad("exp1 needs stagnating < dims");
  }
  try {
    stagnation_config().validate(experiment == ExperimentKind::Exp3 ? D : 0);
  } catch (const Error& e2) {
    bad(e2.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint_of(const json& config_json) {
  json j = config_json;
  j.erase("output_dir");
  j.erase("threads");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

std::string ExperimentConfig::fingerprint() const { return fingerprint_of(to_json()); }

int ExperimentConfig::effective_threads() const {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("SWARMLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ExperimentConfig preset(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::Exp1:
      c.N = 3;
      c.D = 10;
      c.init.kind = InitKind::Special;
      c.init.stagnating = 9;
      c.T = 100000;
      c.delta_t = 1;
      c.R = 500;
      c.estimators.t_m = 50000;
      break;
    case ExperimentKind::Exp2:
      c.N = 2;
      c.D = 100;
      c.init.kind = InitKind::Special;
      c.init.stagnating = 97;
      c.init.scale = 500;
      c.T = 200000;
      c.delta_t = 1;
      c.R = 500;
      c.persist.traces = false;  // D * T doubles per run
      break;
    case ExperimentKind::Exp3:
      c.N = 3;
      c.D = 8;
      c.T = 500000;
      c.delta_t = 100;
      c.R = 500;
      break;
    case ExperimentKind::SingleRun:
      c.N = 3;
      c.D = 10;
      c.T = 1000;
      c.R = 1;
      break;
    case ExperimentKind::LemmaCheck:
      break;
  }
  return c;
}

void apply_desk(ExperimentConfig& cfg) {
  constexpr long f = 5;
  cfg.R = std::min(cfg.R, 50L);
  cfg.T = std::max(cfg.delta_t, cfg.T / f / cfg.delta_t * cfg.delta_t);
  auto& e = cfg.estimators;
  if (e.t_m != kAuto) e.t_m = e.t_m / f / cfg.delta_t * cfg.delta_t;
  if (e.t_e != kAuto) e.t_e = std::max(cfg.delta_t, e.t_e / f / cfg.delta_t * cfg.delta_t);
  e.coarse_step = scale_down(e.coarse_step, f);
  e.early_cut = scale_down(e.early_cut, f);
  for (long& tau : e.tau_grid) tau = std::max(1L, tau / f);
  std::sort(e.tau_grid.begin(), e.tau_grid.end());
  e.tau_grid.erase(std::unique(e.tau_grid.begin(), e.tau_grid.end()), e.tau_grid.end());
}

}  // namespace swarmlab
