// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fails.
//   acceptance [--only 1,6,9] [--workdir DIR] [--threads N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swarmlab/config.hpp"
#include "swarmlab/errors.hpp"
#include "swarmlab/estimators.hpp"
#include "swarmlab/experiments.hpp"
#include "swarmlab/lemma_checks.hpp"
#include "swarmlab/reports.hpp"
#include "swarmlab/runlog.hpp"
#include "swarmlab/stagnation.hpp"

namespace fs = std::filesystem;
using namespace swarmlab;

namespace {

// ---- pinned tolerances
constexpr double kC1MinL9 = 0.02;
constexpr double kC1MinL8 = 0.005;
constexpr double kC2MinL9 = 0.1;
constexpr double kC3Target = 0.216;
constexpr double kC3Tol = 0.05;
constexpr double kC5Tol = 1e-12;
constexpr double kC7Sigmas = 3.0;
constexpr long kC7Paths = 1000000;
constexpr double kC8Slack = 0.1;
constexpr long kC10MaxBits = 4096;
constexpr double kC11MinEntered = 0.9;
constexpr double kC11PaperMeanX0 = 2597.6;
constexpr double kC11Factor = 3.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

struct Context {
  fs::path workdir;
  int threads = 1;
  // shared state across criteria
  std::vector<std::pair<std::string, EnsembleReport>> ensembles_1_to_4;
  std::vector<std::pair<std::string, HealthSummary>> health;
  std::map<int, long> c1_runs;  // L -> R actually used
};

ExperimentConfig exp1_config(ObjectiveId f, int N, int L, int dstar, long R, const fs::path& out) {
  ExperimentConfig c = preset(ExperimentKind::Exp1);
  c.objective = f;
  c.N = N;
  c.D = 10;
  c.init.stagnating = L;
  c.init.dstar = dstar;
  c.init.scale = kAuto;
  c.T = 20000;
  c.delta_t = 100;  // the drift estimators only read the rows at T_m and T_e
  c.R = R;
  c.estimators = {};
  c.estimators.t_m = 10000;
  c.estimators.t_e = 20000;
  c.output_dir = out.string();
  c.resolve();
  c.validate();
  return c;
}

EnsembleReport run_exp1(Context& ctx, const std::string& label, const ExperimentConfig& cfg, bool persist) {
  const auto t0 = std::chrono::steady_clock::now();
  if (persist) fs::remove_all(cfg.output_dir);
  const auto runs = run_ensemble(cfg, ctx.threads, persist);
  EnsembleReport rep = build_report(cfg, runs);
  if (persist) write_report(rep, runs, cfg.output_dir);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "  " << label << ": mu_L=" << num(rep.drift->mu_L) << " se=" << num(rep.mu_L_stderr, 3)
            << " R=" << rep.drift->runs << " max_bits=" << rep.health.max_precision << " (" << num(secs, 3)
            << " s)\n";
  ctx.health.emplace_back(label, rep.health);
  ctx.ensembles_1_to_4.emplace_back(label, rep);
  return rep;
}

// ---------------------------------------------------------------- 1
Outcome criterion1(Context& ctx) {
  std::map<int, EnsembleReport> rep;
  for (int L : {9, 8, 7}) {
    auto cfg = exp1_config(ObjectiveId::Sphere, 2, L, 1, 50, ctx.workdir / ("c1_L" + std::to_string(L)));
    rep.emplace(L, run_exp1(ctx, "sphere N=2 L=" + std::to_string(L), cfg, true));
    ctx.c1_runs[L] = 50;
  }
  bool retried = false;
  if (!(rep.at(7).drift->mu_L < 0.0)) {
    retried = true;
    auto cfg = exp1_config(ObjectiveId::Sphere, 2, 7, 1, 100, ctx.workdir / "c1_L7");
    ctx.ensembles_1_to_4.pop_back();
    rep.insert_or_assign(7, run_exp1(ctx, "sphere N=2 L=7 R=100", cfg, true));
    ctx.c1_runs[7] = 100;
  }
  const double m9 = rep.at(9).drift->mu_L, m8 = rep.at(8).drift->mu_L, m7 = rep.at(7).drift->mu_L;
  Outcome o;
  o.pass = m9 > kC1MinL9 && m8 > kC1MinL8 && m7 < 0.0;
  o.detail = "mu_L(L9)=" + num(m9) + " >" + num(kC1MinL9) + ", mu_L(L8)=" + num(m8) + " >" + num(kC1MinL8) +
             ", mu_L(L7)=" + num(m7) + " <0" + (retried ? " (R=100)" : "");
  return o;
}

// ---------------------------------------------------------------- 2
Outcome criterion2(Context& ctx) {
  std::vector<std::pair<int, EnsembleReport>> reps;
  for (int L : {9, 8, 7, 6, 5}) {
    auto cfg = exp1_config(ObjectiveId::Sphere, 3, L, 1, 50, ctx.workdir / "c2");
    reps.emplace_back(L, run_exp1(ctx, "sphere N=3 L=" + std::to_string(L), cfg, false));
  }
  Outcome o;
  o.pass = reps.front().second.drift->mu_L > kC2MinL9;
  std::ostringstream d;
  d << "mu_L(L9)=" << num(reps.front().second.drift->mu_L) << " >" << kC2MinL9;
  for (std::size_t k = 1; k < reps.size(); ++k) {
    const auto& hi = reps[k - 1].second;
    const auto& lo = reps[k].second;
    const double pooled = std::sqrt(hi.mu_L_stderr * hi.mu_L_stderr + lo.mu_L_stderr * lo.mu_L_stderr);
    const double drop = hi.drift->mu_L - lo.drift->mu_L;
    const bool ok = drop >= pooled;
    o.pass = o.pass && ok;
    d << "; L" << reps[k - 1].first << "->L" << reps[k].first << " drop=" << num(drop, 4) << (ok ? ">=" : "<")
      << "se " << num(pooled, 3);
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- 3
Outcome criterion3(Context& ctx) {
  auto r9 = run_exp1(ctx, "diagonal N=3 L=9",
                     exp1_config(ObjectiveId::Diagonal, 3, 9, 1, 50, ctx.workdir / "c3"), false);
  auto r8 = run_exp1(ctx, "diagonal N=3 L=8",
                     exp1_config(ObjectiveId::Diagonal, 3, 8, 1, 50, ctx.workdir / "c3"), false);
  const double m9 = r9.drift->mu_L, m8 = r8.drift->mu_L;
  Outcome o;
  o.pass = m9 > 0.0 && m8 < 0.0 && std::fabs(m9 - kC3Target) <= kC3Tol;
  o.detail = "mu_L(L9)=" + num(m9) + " (|diff from 0.216|=" + num(std::fabs(m9 - kC3Target), 3) + " <=" +
             num(kC3Tol) + "), mu_L(L8)=" + num(m8) + " <0";
  return o;
}

// ---------------------------------------------------------------- 4
Outcome criterion4(Context& ctx) {
  auto r1 = run_exp1(ctx, "schwefel N=3 L=8 d*=1",
                     exp1_config(ObjectiveId::Schwefel, 3, 8, 1, 50, ctx.workdir / "c4"), false);
  auto r3 = run_exp1(ctx, "schwefel N=3 L=8 d*=3",
                     exp1_config(ObjectiveId::Schwefel, 3, 8, 3, 50, ctx.workdir / "c4"), false);
  const double a = r1.drift->mu_L, b = r3.drift->mu_L;
  return {a > b && b > 0.0, "mu_L(d*=1)=" + num(a) + " > mu_L(d*=3)=" + num(b) + " > 0"};
}

// ---------------------------------------------------------------- 5
Outcome criterion5(Context& ctx) {
  if (ctx.ensembles_1_to_4.empty()) return {false, "needs the ensembles of criteria 1-4 (run them too)"};
  double worst_mu = 0.0, worst_cov = 0.0;
  std::size_t taus = 0;
  for (const auto& [label, rep] : ctx.ensembles_1_to_4) {
    worst_mu = std::max(worst_mu, std::fabs(rep.increments->mu_J));
    for (const auto& row : rep.increments->rows) worst_cov = std::max(worst_cov, std::fabs(row.cov_BJ));
    taus += rep.increments->rows.size();
  }
  return {worst_mu <= kC5Tol && worst_cov <= kC5Tol,
          std::to_string(ctx.ensembles_1_to_4.size()) + " ensembles, " + std::to_string(taus) +
              " tau rows: max|mu_J|=" + num(worst_mu, 3) + ", max|cov_BJ|=" + num(worst_cov, 3) + " <=" +
              num(kC5Tol)};
}

// ---------------------------------------------------------------- 6
Outcome criterion6(Context&) {
  bool ok = true;
  std::string bad;
  for (long t = 1; t <= 10; ++t) {
    const double v = moment_expansion_oracle(t, 1.0, 0.0, 3.0, 15.0);
    if (v != 15.0 * static_cast<double>(t * t * t)) {
      ok = false;
      bad += " t=" + std::to_string(t) + ":" + num(v, 17);
    }
  }
  // brute force over the 2^3 sign patterns of three +-1 terms
  double brute = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += (mask >> k & 1) ? 1.0 : -1.0;
    brute += std::pow(s, 6) / 8.0;
  }
  const double rad = moment_expansion_oracle(3, 1.0, 0.0, 1.0, 1.0);
  ok = ok && rad == brute;
  return {ok, "gaussian 15t^3 exact for t=1..10" + (bad.empty() ? std::string() : " except" + bad) +
                  "; rademacher t=3 oracle=" + num(rad, 17) + " brute=" + num(brute, 17)};
}

// ---------------------------------------------------------------- 7
Outcome criterion7(Context& ctx) {
  auto spec = SyntheticIncrementSpec::gaussian(-0.5, 1.0);
  spec.samples = kC7Paths;
  spec.seed = 7;
  const auto rows = tail_bound_check(spec, {1, 5, 20, 100}, ctx.threads);
  bool ok = true;
  std::ostringstream d;
  for (const auto& r : rows) {
    const bool row_ok = r.empirical_p <= r.bound + kC7Sigmas * r.standard_error;
    ok = ok && row_ok;
    d << "t=" << r.t << " p=" << num(r.empirical_p, 4) << (row_ok ? "<=" : ">") << num(r.bound, 4) << "; ";
  }
  const double exact = normal_exceedance(-0.5, 1.0);
  const double gap = std::fabs(rows.front().empirical_p - exact);
  const bool close = gap <= kC7Sigmas * rows.front().standard_error;
  d << "t=1 vs normal " << num(exact, 6) << " gap=" << num(gap, 3) << (close ? "<=" : ">") << "3se";
  return {ok && close, d.str()};
}

// ---------------------------------------------------------------- 8
Outcome criterion8(Context& ctx) {
  ExperimentConfig c = preset(ExperimentKind::Exp2);
  c.objective = ObjectiveId::Sphere;
  c.N = 2;
  c.D = 20;
  c.init.stagnating = 17;
  c.init.dstar = 1;
  c.T = 40000;
  c.delta_t = 1;
  c.R = 100;
  c.estimators = {};
  c.resolve();
  c.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto runs = run_ensemble(c, ctx.threads, false);
  const EnsembleReport rep = build_report(c, runs);
  ctx.health.emplace_back("exp2 sphere N=2 D=20 L=17", rep.health);
  const double median = rep.f_emp.quantile(0.5);
  const double fe = rep.f_emp(median);
  const double fmax = brownian_cdf(median, rep.brownian_mu, rep.bounds->sigma2_max);
  const double fmin = brownian_cdf(median, rep.brownian_mu, rep.bounds->sigma2_min);
  const double lo = std::min(fmax, fmin) - kC8Slack;
  const double hi = std::max(fmax, fmin) + kC8Slack;
  std::cerr << "  exp2 R=" << rep.drift->runs << " ("
            << num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3) << " s)\n";
  Outcome o;
  o.pass = rep.brownian_mu < 0.0 && fe >= lo && fe <= hi;
  o.detail = "mu=" + num(rep.brownian_mu, 4) + " s2max=" + num(rep.bounds->sigma2_max, 4) +
             " s2min=" + num(rep.bounds->sigma2_min, 4) + "; at median I_max=" + num(median, 4) +
             ": F_emp=" + num(fe, 4) + " in [" + num(lo, 4) + ", " + num(hi, 4) + "]";
  return o;
}

// ---------------------------------------------------------------- 9
PotentialTrace fixture(long delta_t, long first_index, const std::vector<std::vector<double>>& rows) {
  PotentialTrace t;
  t.delta_t = delta_t;
  t.first_index = first_index;
  t.dims = static_cast<int>(rows.front().size());
  for (const auto& r : rows) t.append(r);
  return t;
}

Outcome criterion9(Context&) {
  struct Case {
    std::string name;
    PotentialTrace trace;
    StagnationConfig cfg;
    std::vector<long> alpha, beta;
  };
  auto sc = [](long dt, int n0) {
    StagnationConfig s;
    s.delta_t = dt;
    s.n0 = n0;
    s.c0 = -40;
    s.cs = -20;
    return s;
  };
  std::vector<Case> cases;
  cases.push_back({"single phase",
                   fixture(1, 0, {{0, 0}, {0, -50}, {0, -45}, {0, -30}, {0, -10}, {0, -5}}),
                   sc(1, 1), {1}, {4}});
  cases.push_back({"back-to-back",
                   fixture(1, 0, {{0, 0, 0}, {0, -50, 0}, {0, -50, 0}, {0, -10, -45}, {0, -10, -45}}),
                   sc(1, 1), {1, 3}, {3, kOpen}});
  cases.push_back({"frozen set",
                   fixture(1, 0, {{0, 0, 0}, {0, -50, 0}, {0, -50, -45}, {0, -50, -30}, {0, -5, -30}}),
                   sc(1, 1), {1}, {4}});
  cases.push_back({"n0=2",
                   fixture(1, 0, {{0, 0, 0, 0}, {0, -50, 0, 0}, {0, -50, -41, 0}, {0, -50, -41, 0},
                                  {0, -15, -41, 0}, {0, -15, -41, 0}}),
                   sc(1, 2), {2}, {4}});
  cases.push_back({"hysteresis dt=100",
                   fixture(100, 1, {{0, -41}, {0, -25}, {0, -30}, {0, -21}, {0, -19}, {0, -50}, {0, -50}}),
                   sc(100, 1), {100, 600}, {500, kOpen}});
  bool ok = true;
  std::string failed;
  for (const auto& c : cases) {
    const auto st = detect_stopping_times(c.trace, c.cfg);
    if (st.alpha != c.alpha || st.beta != c.beta) {
      ok = false;
      failed += " [" + c.name + "]";
    }
  }
  return {ok, std::to_string(cases.size()) + " fixtures" + (ok ? " match" : ", mismatch:" + failed)};
}

// ---------------------------------------------------------------- 10
bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::set<std::string> names;
  for (const auto& root : {a, b}) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) names.insert(fs::relative(e.path(), root).string());
    }
  }
  for (const auto& n : names) {
    if (!fs::exists(a / n) || !fs::exists(b / n)) {
      why = "missing " + n;
      return false;
    }
    if (read_file(a / n) != read_file(b / n)) {
      why = "differs " + n;
      return false;
    }
  }
  return true;
}

Outcome criterion10(Context& ctx) {
  if (ctx.c1_runs.empty()) return {false, "needs criterion 1 (run it too)"};
  bool identical = true;
  std::string why;
  long files = 0;
  for (const auto& [L, R] : ctx.c1_runs) {
    const fs::path first = ctx.workdir / ("c1_L" + std::to_string(L));
    const fs::path again = ctx.workdir / ("c10_L" + std::to_string(L));
    auto cfg = exp1_config(ObjectiveId::Sphere, 2, L, 1, R, again);
    fs::remove_all(again);
    const auto runs = run_ensemble(cfg, ctx.threads, true);
    write_report(build_report(cfg, runs), runs, again);
    // output_dir is part of the echoed config only, never of runs or reports
    std::string w;
    if (!same_tree(first, again, w)) {
      identical = false;
      why += " L" + std::to_string(L) + ": " + w;
    }
    for (const auto& e : fs::recursive_directory_iterator(again)) files += e.is_regular_file();
  }
  long zeros = 0, nonfinite = 0, max_bits = 0, skipped = 0;
  std::string widest;
  for (const auto& [label, h] : ctx.health) {
    zeros += h.zero_after_start;
    nonfinite += h.nonfinite;
    skipped = std::max(skipped, h.max_skipped_leading);
    if (h.max_precision > max_bits) {
      max_bits = h.max_precision;
      widest = label;
    }
  }
  const bool healthy = zeros == 0 && nonfinite == 0 && skipped <= 1;
  const bool bounded = max_bits <= kC10MaxBits;
  std::ostringstream d;
  d << "rerun " << (identical ? "byte-identical" : "DIFFERS" + why) << " (" << files << " files); "
    << ctx.health.size() << " ensembles: zero Phi after t=0: " << zeros << ", non-finite: " << nonfinite
    << "; max precision " << max_bits << " bits (" << widest << ") vs cap " << kC10MaxBits;
  return {identical && healthy && bounded, d.str()};
}

// ---------------------------------------------------------------- 11
Outcome criterion11(Context& ctx) {
  ExperimentConfig c = preset(ExperimentKind::Exp3);
  c.objective = ObjectiveId::Sphere;
  c.N = 3;
  c.D = 8;
  c.T = 100000;
  c.delta_t = 100;
  c.R = 50;
  c.stagnation.n0 = 1;
  c.stagnation.c0 = -40;
  c.stagnation.cs = -20;
  c.estimators = {};
  c.resolve();
  c.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto runs = run_ensemble(c, ctx.threads, false);
  const EnsembleReport rep = build_report(c, runs);
  ctx.health.emplace_back("exp3 sphere N=3 D=8", rep.health);
  std::cerr << "  exp3 R=" << runs.size() << " ("
            << num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3) << " s)\n";
  long entered = 0;
  for (const auto& r : runs) entered += !r.times.alpha.empty();
  const double frac = static_cast<double>(entered) / static_cast<double>(runs.size());
  const auto& x0 = rep.appendix.at(0);
  const double mean = x0.summary ? x0.summary->mean : 0.0;
  const bool within = x0.summary && mean >= kC11PaperMeanX0 / kC11Factor && mean <= kC11PaperMeanX0 * kC11Factor;
  return {frac >= kC11MinEntered && within,
          "alpha_0 finite in " + std::to_string(entered) + "/" + std::to_string(runs.size()) + " runs (>= 90%); mean X_0=" +
              num(mean) + " in [" + num(kC11PaperMeanX0 / kC11Factor) + ", " + num(kC11PaperMeanX0 * kC11Factor) +
              "]; |D_X1|=" + std::to_string(rep.appendix.at(1).cohort)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::string workdir = "acceptance_work";
  int threads = 0;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--workdir", workdir, "scratch directory");
  app.add_option("--threads,-j", threads, "worker threads");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.workdir = workdir;
  fs::create_directories(ctx.workdir);
  ExperimentConfig probe;
  probe.threads = threads;
  ctx.threads = probe.effective_threads();

  const std::vector<std::pair<int, std::function<Outcome(Context&)>>> all = {
      {6, criterion6}, {9, criterion9}, {7, criterion7}, {1, criterion1}, {10, criterion10}, {2, criterion2},
      {3, criterion3}, {4, criterion4}, {5, criterion5}, {8, criterion8}, {11, criterion11}};
  const std::set<int> wanted(only.begin(), only.end());
  std::map<int, Outcome> results;
  for (const auto& [id, fn] : all) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail += " [" + num(secs, 3) + " s]";
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
    results.emplace(id, o);
  }
  std::cout << "---- summary\n";
  int failed = 0;
  for (const auto& [id, o] : results) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << "\n";
    failed += !o.pass;
  }
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
