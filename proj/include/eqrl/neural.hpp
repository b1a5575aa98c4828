#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eqrl/errors.hpp"

namespace eqrl {

enum class Activation { Identity, Relu, Sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
    int in = 0;
    int out = 0;
    Activation act = Activation::Identity;
    double dropout_p = 0.0;  // dropout on this layer's output activations
    bool spectral_norm = false;
};

struct DenseLayer {
    int in = 0;
    int out = 0;
    Activation act = Activation::Identity;
    double dropout_p = 0.0;
    bool spectral_norm = false;
    std::vector<double> w;  // row-major, out x in
    std::vector<double> b;  // out
    // persistent power-iteration state
    std::vector<double> sn_u, sn_v;
    int sn_iterations = 0;
};

/// Dense MLP. Parameters are kept in double precision in memory (so analytic
/// gradients verify against finite differences to tight tolerance) and stored
/// as little-endian f32 in checkpoints.
class Mlp {
public:
    Mlp() = default;
    Mlp(const std::vector<LayerSpec>& specs, std::uint64_t init_seed);

    int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out; }
    std::size_t param_count() const;
    std::vector<double> flat_params() const;
    void set_flat_params(std::span<const double> p);

    std::vector<DenseLayer> layers;
};

enum class ForwardMode { Eval, Train, McDropout };

struct ForwardCache {
    std::vector<std::vector<double>> inputs;   // per layer, post previous dropout
    std::vector<std::vector<double>> preacts;  // per layer
    std::vector<std::vector<double>> masks;    // per layer; empty -> no dropout
    std::vector<double> output;
};

// Dense forward pass. Dropout is active in Train and McDropout modes with
// inverted scaling 1/(1-p); Eval is deterministic. The cache (when given)
// records what backward() needs.
std::vector<double> forward(const Mlp& net, std::span<const double> x, ForwardMode mode,
                            std::uint64_t dropout_seed = 0, ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<std::vector<double>> dw, db;
    std::vector<double> dx;

    void add_scaled(const Gradients& other, double s);
    void scale(double s);
    std::vector<double> flat() const;  // same ordering as Mlp::flat_params
};

Gradients zero_gradients(const Mlp& net);

// Exact reverse-mode gradients through the cached forward (same dropout masks).
Gradients backward(const Mlp& net, const ForwardCache& cache, std::span<const double> upstream);
void backward_accumulate(const Mlp& net, const ForwardCache& cache,
                         std::span<const double> upstream, Gradients& grads);

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t step = 0;
    std::vector<double> m, v;  // f64 moment accumulators
};

// Standard Adam with bias correction. Throws TrainError on non-finite
// gradients so a diverged run aborts with a diagnostic instead of silently
// corrupting parameters.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);
void adam_step(AdamState& state, Mlp& net, const Gradients& grads);

// One power-iteration refinement of the layer's largest singular value,
// then W <- W / sigma_hat. Returns false (and leaves W unchanged) for a zero
// matrix.
bool spectral_normalize(DenseLayer& layer, int iters = 1);

// Normalize every layer flagged spectral_norm.
void spectral_normalize_flagged(Mlp& net, int iters = 1);

// target <- (1 - tau) * target + tau * online.
void ema_update(Mlp& target, const Mlp& online, double tau = 0.01);

// Checkpoints: <stem>.json manifest (architecture, tensor table with byte
// offsets, caller metadata) + <stem>.bin raw little-endian f32 blob.
void save_mlp(const Mlp& net, const std::string& path_stem, const std::string& extra_json = "");
Mlp load_mlp(const std::string& path_stem, std::string* extra_json = nullptr);

}  // namespace eqrl
