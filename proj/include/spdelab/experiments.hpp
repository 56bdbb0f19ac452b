#pragma once
// Experiment drivers: each one simulates (or evaluates) a model per the
// configuration and emits a report with named checks, curve tables, and an
// overall verdict.
//
// Outcomes per check:
//   "pass"          the 95% confidence bound satisfies the theory bound
//   "fail"          the point estimate already violates the theory bound
//   "inconclusive"  neither (sample too small to certify the bound)
//   "info"          recorded but never drives the overall verdict
// Overall: "fail" if any check fails, else "inconclusive" if any check is
// inconclusive, else "pass". Exit codes: pass 0, fail 2, inconclusive 3.
//
// Reports split a deterministic "results" object (identical bytes for equal
// seed/config regardless of thread count) from a "meta" object (wall time,
// thread count).

#include <string>
#include <vector>

#include <json.hpp>

#include "spdelab/config.hpp"

namespace spdelab {

struct CheckRecord {
  std::string name;
  double empirical = 0.0;     // point estimate
  double ci_bound = 0.0;      // one-sided 95% confidence bound on it
  double theory_bound = 0.0;  // value it is compared against
  std::string outcome;        // pass | fail | inconclusive | info
  std::string note;
};

struct CurveTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string kind;
  std::vector<CheckRecord> checks;
  std::vector<CurveTable> curves;
  nlohmann::json extra = nlohmann::json::object();  // deterministic scalars
  nlohmann::json meta = nlohmann::json::object();   // nondeterministic info
  std::string overall;  // pass | fail | inconclusive

  nlohmann::json results_json(const Config& cfg) const;  // deterministic part
  std::string results_digest(const Config& cfg) const;   // canonical dump
  int exit_code() const;
};

ExperimentReport run_contraction(const Config& cfg);
ExperimentReport run_concentration(const Config& cfg);
ExperimentReport run_certificates(const Config& cfg);
ExperimentReport run_galerkin(const Config& cfg);
ExperimentReport run_moments(const Config& cfg);
ExperimentReport run_rates_export(const Config& cfg);

// Dispatch on cfg.experiment.kind.
ExperimentReport run_experiment(const Config& cfg);

// Decide pass/fail/inconclusive for a one-sided tail or moment comparison;
// see the outcome table above.
std::string bound_outcome(double point_estimate, double ci_upper,
                          double theory_bound);

// Writes report.json (always) plus one table file per curve, as
// <out_dir>/<curve name>.csv or .json per `format`. Creates out_dir.
void write_report(const ExperimentReport& report, const Config& cfg,
                  const std::string& out_dir, const std::string& format);

}  // namespace spdelab
