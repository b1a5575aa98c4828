#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqrl/equalizer.hpp"
#include "eqrl/errors.hpp"

namespace eqrl {

/// Full run configuration. Field defaults are the published hyperparameters;
/// the shipped config file carries the desk-scale overrides.
struct RunConfig {
    struct Channel {
        std::vector<double> isi_taps{1.0, 0.45, 0.2, 0.1, 0.05};
        double noise_std = 20.0;
        double swing = 400.0;
        double rise_fraction = 0.1;
        std::size_t n_x = 1000;
        double dt_ps = 10.0;
        double t_ui_ps = 156.3;
        std::size_t records_per_unit = 64;
        std::size_t window_stride = 0;
    } channel;

    struct Encoder {
        int latent_dim = 11;
        std::vector<int> hidden{128, 64};
        int classifier_hidden = 64;
        double beta = 0.01;
        double lambda_rec = 0.1;
        double dropout_p = 0.1;
        double logvar_clamp = 10.0;
        double input_scale_mv = 1000.0;
        int mc_passes = 100;
        int epochs = 200;
        int batch = 256;
        double lr = 1e-3;
        std::string variant = "ib";  // ib | ae
    } encoder;

    struct Agent {
        double alpha = 0.1;
        int quantiles = 51;
        double gamma = 0.98;
        double kappa = 1.0;
        double actor_lr = 3e-4;
        double critic_lr = 1e-3;
        double entropy_beta = 0.01;
        double lambda_pac = 0.001;
        double sigma_p2 = 1.0;
        int batch = 64;
        std::size_t buffer_capacity = 50000;
        int episodes_per_epoch = 256;
        int updates_per_epoch = 8;
        int epochs = 300;
        int early_stop_patience = 20;
        double ema_tau = 0.01;
        int spectral_every = 5;
        bool spectral_norm = true;
        std::vector<int> hidden{128, 64};
        double lambda_unc = 0.1;
        int projections = 50;
    } agent;

    struct Equalizer {
        std::string kind = "dfe";  // dfe | ctle-dfe
        EqRanges ranges;
    } equalizer;

    struct Eval {
        double mask_width_ps = 35.0;
        double mask_height_mv = 80.0;
        double threshold_pct = 36.0;
        double unc_high = 0.02;
        double unc_moderate = 0.024;
        std::vector<double> noise_sigmas{0.01, 0.05};
        double pac_delta = 0.05;
    } eval;

    struct Paths {
        std::string run_dir = "runs/default";
    } paths;

    struct Seeds {
        std::uint64_t master = 1;
        std::vector<std::uint64_t> train_units{1, 2, 3, 4, 5, 6};
        std::vector<std::uint64_t> heldout_units{7, 8};
    } seeds;

    EqKind eq_kind() const { return eq_kind_from_string(equalizer.kind); }
    void validate() const;

    // Canonical "section.key = value" listing; the config hash is FNV-1a
    // over this text, so identical settings always hash identically.
    std::string canonical_text() const;
    std::uint64_t hash() const;
};

// Parse the nested key-value config format. Unknown sections or keys are
// rejected with the offending line number.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

// Apply one "section.key=value" override (CLI flags route through this).
void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

// The canonical example config: paper defaults with the desk-scale overrides.
std::string default_config_text();

}  // namespace eqrl
