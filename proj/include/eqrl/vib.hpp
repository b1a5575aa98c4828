#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eqrl/latentgeom.hpp"
#include "eqrl/neural.hpp"
#include "eqrl/waveform.hpp"

namespace eqrl {

struct VibConfig {
    int input_dim = 1000;
    int latent_dim = 11;
    std::vector<int> encoder_hidden{128, 64};
    int classifier_hidden = 64;
    double beta = 0.01;
    double lambda_rec = 0.1;
    double dropout_p = 0.1;
    double logvar_clamp = 10.0;      // logvar limited to [-clamp, clamp]
    double input_scale_mv = 1000.0;  // waveform mV / scale -> encoder input units
    // Standard-autoencoder ablation: deterministic bottleneck (z = mu, no KL)
    // and a classifier head that does not shape the encoder.
    bool deterministic_bottleneck = false;
    bool detach_classifier = false;
    std::uint64_t init_seed = 1;
};

/// Variational IB encoder with classifier and reconstruction heads.
/// The encoder emits 2l values: latent mean and log-variance.
struct VibModel {
    VibConfig cfg;
    Mlp encoder;
    Mlp classifier;  // latent -> hidden -> logit; probability = sigmoid(logit)
    Mlp decoder;
};

VibModel make_vib(const VibConfig& cfg);

std::vector<double> normalize_waveform(const Waveform& w, double scale_mv);

struct EncodeResult {
    std::vector<double> z;
    std::vector<double> mu;
    std::vector<double> logvar;  // clamped
};

// Eval-mode reparameterized encoding: z = mu + exp(logvar/2) * eps(seed).
EncodeResult encode(const VibModel& m, const Waveform& w, std::uint64_t noise_seed);

// Validity probability of a latent point.
double classify_latent(const VibModel& m, std::span<const double> z);

// 0.5 * sum(exp(lv) + mu^2 - 1 - lv), nats.
double kl_to_standard_normal(std::span<const double> mu, std::span<const double> logvar);

struct VibLossParts {
    double total = 0.0;
    double ce = 0.0;   // nats
    double kl = 0.0;   // nats
    double mse = 0.0;  // squared L2 reconstruction error, mean over batch
};

// Train-mode batch loss; deterministic in (parameters, seed). Components
// satisfy total = ce + beta*kl + lambda_rec*mse exactly.
VibLossParts vib_loss(const VibModel& m, const std::vector<const LabeledPair*>& batch,
                      std::uint64_t seed);

struct VibEpochRow {
    double total = 0.0, ce = 0.0, kl = 0.0, mse = 0.0;
};

struct TrainEncoderResult {
    std::vector<VibEpochRow> curve;  // one row per epoch
    double val_ce = 0.0;
    double val_accuracy = 0.0;
    double silhouette = 0.0;  // over latent means, both-class datasets only
};

// Phase-1 training: Adam over encoder, classifier and decoder. Validation
// split is the last 10% of records by index, fixed.
TrainEncoderResult train_encoder(VibModel& m, const Dataset& ds, int epochs, int batch = 256,
                                 double lr = 1e-3, std::uint64_t seed = 1);

// MC-dropout latent summary from M stochastic encoder means.
LatentState mc_latent(const VibModel& m, const Waveform& w, int passes, std::uint64_t seed,
                      int threads = 0);

// Deterministic latent map: eval-mode encoder mean (dropout off).
std::vector<double> latent_mean(const VibModel& m, const Waveform& w);

struct InfoPlane {
    double i_zy_bits = 0.0;  // lower bound on I(Z;Y)
    double i_zx_bits = 0.0;  // upper bound on I(Z;X)
};

// Variational information-plane estimates: I(Z;Y) >= H(Y) - CE/ln2,
// I(Z;X) <= mean KL-to-prior / ln2.
InfoPlane information_plane(const VibModel& m, const Dataset& ds, int mc_samples,
                            std::uint64_t seed);

// Checkpoint the three networks under <stem>.encoder/.classifier/.decoder.
void save_vib(const VibModel& m, const std::string& path_stem, const std::string& extra_json);
VibModel load_vib(const std::string& path_stem, std::string* extra_json = nullptr);

// FNV-1a hash of the encoder parameters; stored with the anchor so stale
// artifact mixes are detectable.
std::uint64_t encoder_checksum(const VibModel& m);

}  // namespace eqrl
