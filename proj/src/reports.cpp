#include "swarmlab/reports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "swarmlab/errors.hpp"
#include "swarmlab/runlog.hpp"

namespace swarmlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr int kAppendixPhases = 4;  // X_0 .. X_3

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out += ',';
    out += cells[k];
  }
  return out;
}

json config_for_report(const ExperimentConfig& cfg) {
  json j = cfg.to_json();
  j.erase("output_dir");
  j.erase("threads");
  return j;
}

std::vector<PhasePartition> partitions(const std::vector<RunResult>& runs) {
  std::vector<PhasePartition> out;
  for (const auto& r : runs) out.push_back(r.partition);
  return out;
}

std::vector<StoppingTimes> stopping(const std::vector<RunResult>& runs) {
  std::vector<StoppingTimes> out;
  for (const auto& r : runs) out.push_back(r.times);
  return out;
}

std::vector<std::vector<double>> final_psi(const std::vector<RunResult>& runs) {
  std::vector<std::vector<double>> out;
  for (const auto& r : runs)
    if (!r.final_psi.empty()) out.push_back(r.final_psi);
  return out;
}

}  // namespace

HealthSummary health_summary(const ExperimentConfig& cfg, const std::vector<RunResult>& runs) {
  HealthSummary h;
  h.runs = static_cast<long>(runs.size());
  const auto stag = cfg.stagnating_set();
  bool first = true;
  for (const auto& r : runs) {
    h.covering_runs += r.covers_horizon;
    h.zero_after_start += r.diagnostics.zero_after_start;
    h.nonfinite += r.diagnostics.nonfinite;
    h.max_skipped_leading = std::max(h.max_skipped_leading, r.diagnostics.skipped_leading);
    h.max_precision = std::max(h.max_precision, r.max_precision);
    h.max_phi_precision = std::max(h.max_phi_precision, r.diagnostics.max_phi_precision);
    for (int d : stag) {
      if (static_cast<std::size_t>(d - 1) >= r.final_psi.size()) continue;
      const double v = r.final_psi[static_cast<std::size_t>(d - 1)];
      h.max_final_stagnating_psi = first ? v : std::max(h.max_final_stagnating_psi, v);
      first = false;
    }
  }
  return h;
}

EnsembleReport build_report(const ExperimentConfig& cfg, const std::vector<RunResult>& runs) {
  EnsembleReport rep;
  rep.config = cfg;
  rep.health = health_summary(cfg, runs);
  const auto kind = cfg.experiment;
  if (kind == ExperimentKind::Exp1 || kind == ExperimentKind::Exp2) {
    std::vector<EndpointSample> ends;
    std::vector<IncrementSums> sums;
    for (const auto& r : runs) {
      if (!r.covers_horizon) continue;
      ends.push_back(r.endpoints);
      sums.push_back(r.sums);
    }
    if (ends.empty()) throw Error(ErrorKind::InsufficientData, "no run reached T_e");
    const auto stag = cfg.stagnating_set();
    rep.drift = exp1_drift(ends, stag, cfg.estimators.t_m, cfg.estimators.t_e);
    rep.mu_L_stderr = rep.drift->sigma_L / std::sqrt(static_cast<double>(rep.drift->runs));
    rep.increments = exp2_stats(sums);
    if (kind == ExperimentKind::Exp2) {
      const long H = (cfg.estimators.t_e - cfg.estimators.t_m) / cfg.delta_t;
      rep.bounds = sigma_bounds(*rep.increments, cfg.estimators.coarse_step, cfg.estimators.early_cut, H);
      // mu_L is per iteration; increments are per delta_t block
      rep.brownian_mu = rep.drift->mu_L * static_cast<double>(cfg.delta_t);
      rep.f_emp = f_emp(sums);
    }
  }
  if (kind == ExperimentKind::Exp3) {
    const auto parts = partitions(runs);
    for (int i = 0; i < kAppendixPhases; ++i) {
      AppendixRow row;
      row.i = i;
      row.cohort = x_cohort_size(parts, i, cfg.estimators.t_e);
      try {
        row.summary = appendix_summary(parts, i, cfg.estimators.t_e);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyCohort) throw;
      }
      rep.appendix.push_back(row);
    }
  }
  return rep;
}

std::string report_csv_row(const ExperimentConfig& cfg, const DriftStats& s) {
  return join({std::string(objective_name(cfg.objective)), std::to_string(cfg.N),
               std::to_string(cfg.init.stagnating), std::to_string(cfg.init.dstar), fmt(s.mu_U), fmt(s.mu_M),
               fmt(s.mu_D), fmt(s.mu_L), fmt(s.sigma_U), fmt(s.sigma_M), fmt(s.sigma_D), fmt(s.sigma_L)});
}

std::string report_csv(const EnsembleReport& r) {
  std::string out = std::string(kReportHeader) + "\n";
  if (r.drift) out += report_csv_row(r.config, *r.drift) + "\n";
  return out;
}

std::string increments_csv(const IncrementStats& s) {
  std::string out = "tau,sigma2_I,sigma2_B,sigma2_J,m6_I,m6_B,m6_J,cov_BJ\n";
  for (const auto& row : s.rows) {
    out += join({std::to_string(row.tau), fmt(row.sigma2_I), fmt(row.sigma2_B), fmt(row.sigma2_J), fmt(row.m6_I),
                 fmt(row.m6_B), fmt(row.m6_J), fmt(row.cov_BJ)}) +
           "\n";
  }
  return out;
}

std::string phase_csv(const std::vector<RunResult>& runs) {
  std::string out = std::string(kPhaseHeader) + "\n";
  for (const auto& r : runs) {
    for (const auto& p : r.phases) {
      const auto& c = p.classification;
      out += join({std::to_string(r.seed), std::to_string(p.record.index),
                   std::string(phase_kind_name(p.record.kind)), std::to_string(p.record.start),
                   p.record.end == kOpen ? "open" : std::to_string(p.record.end),
                   std::to_string(p.record.stagnating_set.size()), c ? fmt(c->mu_hat) : "",
                   c ? fmt(c->m6_hat) : "", c ? fmt(c->p0_hat) : ""}) +
             "\n";
    }
  }
  return out;
}

std::string step_csv(const StepFunction& f) {
  std::string out = "x,F\n";
  for (std::size_t k = 0; k < f.x.size(); ++k) out += fmt(f.x[k]) + "," + fmt(f.F[k]) + "\n";
  return out;
}

std::string cdf_overlay_csv(const EnsembleReport& r) {
  std::string out = "x,F_emp,F_sigma2max,F_sigma2min\n";
  if (!r.bounds) return out;
  for (std::size_t k = 0; k < r.f_emp.x.size(); ++k) {
    const double x = r.f_emp.x[k];
    out += join({fmt(x), fmt(r.f_emp.F[k]), fmt(brownian_cdf(x, r.brownian_mu, r.bounds->sigma2_max)),
                 fmt(brownian_cdf(x, r.brownian_mu, r.bounds->sigma2_min))}) +
           "\n";
  }
  return out;
}

std::string appendix_b_header() {
  std::vector<std::string> h = {"f", "N", "D", "N0"};
  for (int i = 0; i < kAppendixPhases - 1; ++i) {
    const std::string s = std::to_string(i);
    for (const char* name : {"D_X", "min_X", "max_X", "mu_X", "sigma2_X"}) h.push_back(name + s);
  }
  h.push_back("D_X" + std::to_string(kAppendixPhases - 1));
  return join(h);
}

std::string appendix_b_row(const EnsembleReport& r) {
  const auto& c = r.config;
  std::vector<std::string> cells = {std::string(objective_name(c.objective)), std::to_string(c.N),
                                    std::to_string(c.D), std::to_string(c.stagnation.n0)};
  for (const auto& row : r.appendix) {
    cells.push_back(std::to_string(row.cohort));
    if (row.i == kAppendixPhases - 1) break;
    if (row.summary) {
      cells.push_back(fmt(row.summary->min));
      cells.push_back(fmt(row.summary->max));
      cells.push_back(fmt(row.summary->mean));
      cells.push_back(fmt(row.summary->variance));
    } else {
      cells.insert(cells.end(), 4, "");
    }
  }
  return join(cells);
}

std::string lemma_csv(const std::string& distribution, const std::vector<TailRow>& rows) {
  std::string out = "distribution,t,empirical_p,bound,ok\n";
  for (const auto& r : rows) {
    out += join({distribution, std::to_string(r.t), fmt(r.empirical_p), fmt(r.bound), r.ok ? "true" : "false"}) +
           "\n";
  }
  return out;
}

std::string stay_negative_csv(const std::string& distribution, const std::vector<StayNegativeRow>& rows) {
  std::string out = "distribution,T,probability,standard_error\n";
  for (const auto& r : rows) {
    out += join({distribution, std::to_string(r.horizon), fmt(r.probability), fmt(r.standard_error)}) + "\n";
  }
  return out;
}

json report_json(const EnsembleReport& r) {
  json j;
  j["config"] = config_for_report(r.config);
  j["fingerprint"] = r.config.fingerprint();
  const auto& h = r.health;
  j["health"] = {{"runs", h.runs},
                 {"covering_runs", h.covering_runs},
                 {"zero_after_start", h.zero_after_start},
                 {"nonfinite", h.nonfinite},
                 {"max_skipped_leading", h.max_skipped_leading},
                 {"max_precision", h.max_precision},
                 {"max_phi_precision", h.max_phi_precision},
                 {"max_final_stagnating_psi", h.max_final_stagnating_psi}};
  if (r.drift) {
    const auto& s = *r.drift;
    j["drift"] = {{"runs", s.runs},       {"mu_U", s.mu_U},       {"mu_M", s.mu_M},       {"mu_D", s.mu_D},
                  {"mu_L", s.mu_L},       {"var_U", s.var_U},     {"var_M", s.var_M},     {"var_D", s.var_D},
                  {"var_L", s.var_L},     {"sigma_U", s.sigma_U}, {"sigma_M", s.sigma_M}, {"sigma_D", s.sigma_D},
                  {"sigma_L", s.sigma_L}, {"mu_L_stderr", r.mu_L_stderr}};
  }
  if (r.increments) {
    double max_cov = 0.0;
    for (const auto& row : r.increments->rows) max_cov = std::max(max_cov, std::fabs(row.cov_BJ));
    j["increments"] = {{"mu_I", r.increments->mu_I},
                       {"mu_B", r.increments->mu_B},
                       {"mu_J", r.increments->mu_J},
                       {"max_abs_cov_BJ", max_cov},
                       {"taus", r.increments->rows.size()}};
  }
  if (r.bounds) {
    j["brownian"] = {{"mu", r.brownian_mu},
                     {"sigma2_max", r.bounds->sigma2_max},
                     {"sigma2_min", r.bounds->sigma2_min},
                     {"argmax_tau", r.bounds->argmax_tau},
                     {"ordered", r.bounds->ordered}};
  }
  if (!r.appendix.empty()) {
    json rows = json::array();
    for (const auto& a : r.appendix) {
      json e = {{"i", a.i}, {"cohort", a.cohort}};
      if (a.summary) {
        e["observed"] = a.summary->observed;
        e["censored"] = a.summary->censored;
        e["min"] = a.summary->min;
        e["max"] = a.summary->max;
        e["mean"] = a.summary->mean;
        e["variance"] = a.summary->variance;
      }
      rows.push_back(std::move(e));
    }
    j["appendix"] = std::move(rows);
  }
  return j;
}

std::vector<std::string> write_report(const EnsembleReport& report, const std::vector<RunResult>& runs,
                                      const fs::path& dir) {
  std::vector<std::string> names;
  auto emit = [&](const std::string& name, const std::string& body) {
    write_file(dir / name, body);
    names.push_back(name);
  };
  const auto kind = report.config.experiment;
  emit("report.json", report_json(report).dump(1) + "\n");
  if (kind == ExperimentKind::Exp1 || kind == ExperimentKind::Exp2) {
    emit("report.csv", report_csv(report));
    if (report.increments) emit("increments.csv", increments_csv(*report.increments));
  }
  if (kind == ExperimentKind::Exp2) {
    emit("cdf_emp.csv", step_csv(report.f_emp));
    emit("cdf_overlay.csv", cdf_overlay_csv(report));
  }
  emit("phases.csv", phase_csv(runs));
  if (kind == ExperimentKind::Exp3) {
    emit("appendix_b.csv", appendix_b_header() + "\n" + appendix_b_row(report) + "\n");
    const auto parts = partitions(runs);
    const auto times = stopping(runs);
    for (int i = 0; i < kAppendixPhases; ++i) {
      const std::string s = std::to_string(i);
      try {
        emit("cdf_x_" + s + ".csv", step_csv(f_x(parts, i, report.config.estimators.t_e)));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyCohort) throw;
      }
      emit("cdf_alpha_" + s + ".csv", step_csv(f_alpha(times, i)));
      emit("cdf_beta_" + s + ".csv", step_csv(f_beta(times, i)));
    }
    const auto psi = final_psi(runs);
    if (!psi.empty()) {
      for (int d = 1; d <= report.config.D; ++d) emit("cdf_psi_" + std::to_string(d) + ".csv", step_csv(f_psi_curve(psi, d)));
    }
  }
  return names;
}

}  // namespace swarmlab
