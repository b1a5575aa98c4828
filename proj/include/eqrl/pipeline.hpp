#pragma once

#include <functional>
#include <optional>
#include <string>

#include "eqrl/baselines.hpp"
#include "eqrl/config.hpp"
#include "eqrl/distrl.hpp"
#include "eqrl/evalreport.hpp"
#include "eqrl/selfcheck.hpp"
#include "eqrl/signalgen.hpp"
#include "eqrl/vib.hpp"

namespace eqrl {

inline constexpr const char* kVersion = "eqrl 0.1.0";

/// Run directory layout: data/, checkpoints/, reports/, logs/.
struct RunPaths {
    std::string run_dir;

    std::string data_dir() const { return run_dir + "/data"; }
    std::string checkpoints_dir() const { return run_dir + "/checkpoints"; }
    std::string reports_dir() const { return run_dir + "/reports"; }
    std::string logs_dir() const { return run_dir + "/logs"; }

    std::string train_data() const { return data_dir() + "/train.eqwf"; }
    std::string heldout_data() const { return data_dir() + "/heldout.eqwf"; }
    std::string encoder_stem() const { return checkpoints_dir() + "/encoder"; }
    std::string anchor_file() const { return checkpoints_dir() + "/anchor.json"; }
    std::string agent_stem() const { return checkpoints_dir() + "/agent"; }
    std::string report_file() const { return reports_dir() + "/report.json"; }
    std::string timings_file() const { return reports_dir() + "/timings.json"; }
    std::string summary_file() const { return reports_dir() + "/summary.json"; }
    std::string baseline_file(const std::string& method, const std::string& mode) const {
        return reports_dir() + "/baseline_" + method + "_" + mode + ".json";
    }
    std::string encoder_curve() const { return logs_dir() + "/encoder_curve.csv"; }
    std::string agent_curve() const { return logs_dir() + "/agent_curve.csv"; }
    std::string wasserstein_curve() const { return reports_dir() + "/wasserstein_curve.csv"; }

    void ensure() const;
};

struct PipelineContext {
    RunConfig cfg;
    int threads = 0;
    RunPaths paths;

    explicit PipelineContext(RunConfig config, int n_threads = 0)
        : cfg(std::move(config)), threads(n_threads), paths{cfg.paths.run_dir} {}
};

// Shared deterministic derivations from the master seed.
ProjectionSet projections_for(const RunConfig& cfg);
ChannelModel channel_for_unit(const RunConfig& cfg, std::uint64_t unit_seed);

struct GenDataSummary {
    std::size_t train_records = 0, train_valid = 0;
    std::size_t heldout_records = 0, heldout_valid = 0;
};
GenDataSummary run_gen_data(const PipelineContext& ctx);

// Relabel an existing dataset file in place with the configured mask.
std::size_t run_label(const PipelineContext& ctx, const std::string& dataset_path);

TrainEncoderResult run_train_encoder(const PipelineContext& ctx);

AnchorPoint run_anchor(const PipelineContext& ctx);

TrainAgentResult run_train_agent(const PipelineContext& ctx);

// Parameters for one record of a dataset file (deterministic).
EqualizerParams run_optimize(const PipelineContext& ctx, const std::string& dataset_path,
                             std::size_t record_index);

/// Loaded artifact bundle used by evaluation paths.
struct Artifacts {
    VibModel vib;
    AnchorPoint anchor;
    ProjectionSet proj;
    double distance_scale = 1.0;
    Agent agent;
};
Artifacts load_artifacts(const PipelineContext& ctx, bool force_hash = false);

// Normalized-parameter source for an evaluation sweep: record index and
// RL state to action in [0,1]^d.
using ActionProvider =
    std::function<std::vector<double>(std::size_t record, const std::vector<double>& state)>;

struct EvaluateOutput {
    EvalResult result;
    double latent_eval_us = 0.0;  // per-waveform latent proxy timing
    double eye_eval_us = 0.0;     // per-waveform fold + window_area timing
};

EvaluateOutput evaluate_dataset(const PipelineContext& ctx, const Artifacts& art,
                                const Dataset& ds, const ActionProvider& provider);

ActionProvider agent_provider(const Artifacts& art);
ActionProvider random_provider(const RunConfig& cfg, std::uint64_t seed);

struct EvaluateSummary {
    EvalResult train;
    EvalResult heldout;
    DeploymentClass deployment = DeploymentClass::ValidationRequired;
    double gen_gap_pct = 0.0;
};
EvaluateSummary run_evaluate(const PipelineContext& ctx, bool force = false);

DeploymentClass run_classify(const PipelineContext& ctx);

struct BaselineRun {
    OptResult opt;
    double heldout_mean_pct = 0.0;
    double heldout_cvar10_pct = 0.0;
    std::size_t heldout_used = 0;
};
BaselineRun run_baseline(const PipelineContext& ctx, const std::string& method,
                         const std::string& fitness_mode);

void run_report(const PipelineContext& ctx);

// Mean improvement per noise level: parameters derived from perturbed
// inputs, scored on clean waveforms.
std::vector<std::pair<double, double>> noise_robustness(const PipelineContext& ctx,
                                                        const Artifacts& art, const Dataset& ds);

bool file_exists(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace eqrl
