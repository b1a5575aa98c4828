#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eqrl/errors.hpp"

namespace eqrl {

// Mean of the ceil(alpha*n) smallest samples. Needs at least ceil(1/alpha)
// samples; alpha = 1 reduces to the sample mean.
double empirical_cvar(std::vector<double> samples, double alpha);

enum class DeploymentClass { HighReliability, ModerateConfidence, ValidationRequired };

std::string to_string(DeploymentClass c);

struct ClassifyThresholds {
    double improvement_pct = 36.0;
    double unc_high = 0.02;
    double unc_moderate = 0.024;
};

// Deployment rule: HighReliability if cvar05 >= threshold and sigma_unc below
// the high cutoff; else ModerateConfidence if cvar10 >= threshold with
// sigma_unc in the moderate band; else ValidationRequired. Total over all
// inputs.
DeploymentClass classify(double cvar05_pct, double cvar10_pct, double sigma_unc,
                         const ClassifyThresholds& th = {});

double pearson_r(std::span<const double> x, std::span<const double> y);

// Mean silhouette with Euclidean distances over exactly two clusters;
// singleton-cluster points score 0.
double silhouette_score(const std::vector<std::vector<double>>& points,
                        const std::vector<int>& labels);

/// One optimized waveform in an evaluation run.
struct EvalRecord {
    std::size_t id = 0;
    double area_before = 0.0;  // mV*ps
    double area_after = 0.0;
    bool valid_baseline = true;    // area_before > 0; others excluded from stats
    double improvement_pct = 0.0;  // defined only when valid_baseline
    double sigma_unc = 0.0;
    double reward = 0.0;
    double critic_pred = 0.0;  // critic mean quantile at the chosen action
};

struct EvalAggregates {
    double mean_pct = 0.0;
    double std_pct = 0.0;
    double cvar10_pct = 0.0;
    double cvar05_pct = 0.0;
    double cvar01_pct = 0.0;
    std::size_t n_used = 0;  // records with a valid baseline
};

struct EvalResult {
    std::vector<EvalRecord> records;
    EvalAggregates aggregates;
    // Wall time is reported separately (timing sidecar); keeping it out of
    // the canonical result keeps report JSON byte-identical across runs.
    double wall_us_per_optimization = 0.0;
};

// Aggregates over valid-baseline records. CVaR levels degrade to the mean
// when there are too few samples for the requested tail.
EvalAggregates compute_aggregates(const std::vector<EvalRecord>& records);

struct CalibrationRow {
    double unc_lo = 0.0, unc_hi = 0.0;
    double mean_perf_pct = 0.0;
    double expected_perf_pct = 0.0;
    double calibration_error_pct = 0.0;
    std::size_t count = 0;
};

// Quartile split by sigma_unc. Expected performance is the critic mean
// prediction mapped through a least-squares line fitted over all records
// (degenerate fits fall back to the grand mean).
std::vector<CalibrationRow> calibration_quartiles(const std::vector<EvalRecord>& records);

// Train-minus-heldout mean improvement; positive when training wins.
double generalization_gap(double train_mean_pct, double heldout_mean_pct);
double generalization_gap(const EvalResult& train_eval, const EvalResult& heldout_eval);

// Canonical JSON for an EvalResult (schema_version field included).
// Parsing recomputes the aggregates and validates them bit-exactly.
std::string eval_result_to_json(const EvalResult& result);
EvalResult eval_result_from_json(const std::string& text);

}  // namespace eqrl
