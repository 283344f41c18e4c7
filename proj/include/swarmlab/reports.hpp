#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmlab/config.hpp"
#include "swarmlab/estimators.hpp"
#include "swarmlab/experiments.hpp"
#include "swarmlab/lemma_checks.hpp"

namespace swarmlab {

/// Numerical health over an ensemble.
struct HealthSummary {
  long runs = 0;
  long covering_runs = 0;       // runs whose trace reaches T_e
  long zero_after_start = 0;    // zero Phi after the first complete sample, summed
  long nonfinite = 0;
  long max_skipped_leading = 0; // 1 means only t = 0 was skipped
  long max_precision = 0;
  long max_phi_precision = 0;
  double max_final_stagnating_psi = 0;  // largest final Psi over D_S, or 0 without D_S
};

struct AppendixRow {
  int i = 0;
  long cohort = 0;
  std::optional<PhaseSummary> summary;  // empty when no cohort run has a finite X_i
};

struct EnsembleReport {
  ExperimentConfig config;
  HealthSummary health;
  // exp1 / exp2
  std::optional<DriftStats> drift;
  double mu_L_stderr = 0;
  std::optional<IncrementStats> increments;
  // exp2
  std::optional<SigmaBounds> bounds;
  double brownian_mu = 0;
  StepFunction f_emp;
  // exp3
  std::vector<AppendixRow> appendix;  // i = 0..3
};

EnsembleReport build_report(const ExperimentConfig& cfg, const std::vector<RunResult>& runs);

HealthSummary health_summary(const ExperimentConfig& cfg, const std::vector<RunResult>& runs);

inline constexpr const char* kReportHeader = "f,N,L,dstar,mu_U,mu_M,mu_D,mu_L,sigma_U,sigma_M,sigma_D,sigma_L";
inline constexpr const char* kPhaseHeader = "run_seed,phase_index,kind,start,end_or_open,n_stagnating,mu_hat,m6_hat,p0_hat";

std::string report_csv_row(const ExperimentConfig& cfg, const DriftStats& s);
std::string report_csv(const EnsembleReport& r);
std::string increments_csv(const IncrementStats& s);
std::string phase_csv(const std::vector<RunResult>& runs);
std::string step_csv(const StepFunction& f);
/// x,F_emp,F_sigma2max,F_sigma2min at every jump of F_emp.
std::string cdf_overlay_csv(const EnsembleReport& r);
std::string appendix_b_header();
std::string appendix_b_row(const EnsembleReport& r);
std::string lemma_csv(const std::string& distribution, const std::vector<TailRow>& rows);
std::string stay_negative_csv(const std::string& distribution, const std::vector<StayNegativeRow>& rows);
nlohmann::json report_json(const EnsembleReport& r);

/// Writes every report file of the experiment into `dir` and returns their names.
std::vector<std::string> write_report(const EnsembleReport& report, const std::vector<RunResult>& runs,
                                      const std::filesystem::path& dir);

/// Shortest round-trip text of a double.
std::string fmt(double v);

}  // namespace swarmlab
