#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "eqrl/equalizer.hpp"
#include "eqrl/latentgeom.hpp"
#include "eqrl/neural.hpp"
#include "eqrl/rng.hpp"
#include "eqrl/vib.hpp"

namespace eqrl {

// tau_i = (2i - 1) / (2N), strictly increasing in (0,1).
std::vector<double> quantile_fractions(int n);

/// Ordered return-quantile estimates theta_1..theta_N at fixed fractions.
struct QuantileSet {
    std::vector<double> values;
    std::vector<double> fractions;

    static QuantileSet make(std::vector<double> values_in) {
        QuantileSet q;
        q.fractions = quantile_fractions(static_cast<int>(values_in.size()));
        q.values = std::move(values_in);
        return q;
    }
};

/// Diagonal Gaussian policy head: net maps state to [mean, log-std] in R^{2d}.
struct GaussianPolicy {
    Mlp net;
    int action_dim = 0;
    double logstd_min = -5.0;
    double logstd_max = 1.0;
};

struct QuantileCritic {
    Mlp net;  // [state, action] -> N quantile values
    int n_quantiles = 51;
};

struct AgentConfig {
    double alpha = 0.1;  // CVaR risk level
    int n_quantiles = 51;
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
    int spectral_every = 5;  // optimizer steps between normalizations
    bool spectral_norm = true;
    int mc_passes = 100;
    double lambda_unc = 0.1;
    std::vector<int> hidden{128, 64};
    int latent_dim = 11;
    int action_dim = 4;
    std::uint64_t seed = 1;

    int state_dim() const { return 2 * latent_dim; }
    int n_alpha() const { return static_cast<int>(alpha * n_quantiles); }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("agent: alpha must be in (0,1)");
        if (n_alpha() < 1) throw ConfigError("agent: floor(alpha*N) must be >= 1");
        if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("agent: gamma must be in (0,1)");
        if (batch < 1 || n_quantiles < 1) throw ConfigError("agent: batch and N must be >= 1");
    }
};

/// Single-step transition; action is the clipped value the equalizer saw,
/// action_raw the pre-clip Gaussian sample the log-density refers to.
struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    std::vector<double> action_raw;
    double reward = 0.0;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ == 0) throw ConfigError("replay buffer: capacity must be >= 1");
    }

    void push(Transition t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[next_] = std::move(t);  // FIFO overwrite
            next_ = (next_ + 1) % capacity_;
        }
    }

    std::size_t size() const { return data_.size(); }

    std::vector<const Transition*> sample(std::size_t count, Rng& rng) const {
        if (data_.empty()) throw InputError("replay buffer: cannot sample while empty");
        std::vector<const Transition*> out(count);
        for (auto& p : out) p = &data_[static_cast<std::size_t>(rng.below(data_.size()))];
        return out;
    }

    // Uniform sample over the `window` most recently pushed transitions.
    // The critic may regress on the whole (stationary) history, but the
    // score-function policy update needs actions from the current policy.
    std::vector<const Transition*> sample_recent(std::size_t count, std::size_t window,
                                                 Rng& rng) const {
        if (data_.empty()) throw InputError("replay buffer: cannot sample while empty");
        window = std::min(window, data_.size());
        std::vector<const Transition*> out(count);
        for (auto& p : out) {
            const auto back = static_cast<std::size_t>(rng.below(window));
            // newest element sits just before next_ once the ring is full
            const std::size_t idx =
                data_.size() < capacity_
                    ? data_.size() - 1 - back
                    : (next_ + capacity_ - 1 - back) % capacity_;
            p = &data_[idx];
        }
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> data_;
};

struct ActionSample {
    std::vector<double> action;  // clipped to [0,1]^d
    std::vector<double> raw;     // pre-clip Gaussian sample
    double log_prob = 0.0;       // density of the pre-clip sample
};

/// Clamp direction markers for the policy heads: gradients may only push a
/// saturated output back toward the interval.
enum class ClampSide : unsigned char { None, Low, High };

// Mean head clamped to the action box [0,1], log-std clamped to
// [logstd_min, logstd_max]; the side markers record saturation.
void policy_heads(const GaussianPolicy& policy, std::span<const double> state,
                  std::vector<double>& mean, std::vector<double>& logstd,
                  std::vector<ClampSide>* mean_clamp = nullptr,
                  std::vector<ClampSide>* logstd_clamp = nullptr,
                  ForwardCache* cache = nullptr);

// Zero the descent gradient if it would push a saturated head further out.
double project_clamped_grad(double grad, ClampSide side);

ActionSample sample_action(const GaussianPolicy& policy, std::span<const double> state,
                           std::uint64_t seed);

double gaussian_log_prob(std::span<const double> raw, std::span<const double> mean,
                         std::span<const double> logstd);

// |tau - 1(delta<0)| * Huber_kappa(delta).
double quantile_huber(double delta, double tau, double kappa = 1.0);
double quantile_huber_grad(double delta, double tau, double kappa = 1.0);

QuantileSet critic_quantiles(const QuantileCritic& critic, std::span<const double> state,
                             std::span<const double> action);

// Single-step quantile regression loss: the target is the stored reward.
double critic_loss(const QuantileCritic& critic, const std::vector<const Transition*>& batch,
                   double kappa = 1.0);

// Mean of the lowest floor(alpha*N) quantiles, taken by index.
double cvar_from_quantiles(const QuantileSet& q, double alpha);

struct PolicyGradientResult {
    Gradients grads;          // descent direction for the surrogate loss
    double surrogate = 0.0;   // -(cvar-weighted logpi + entropy bonus), batch mean
    double entropy = 0.0;     // batch mean policy entropy
    int quantile_crossings = 0;
};

// CVaR policy gradient with entropy bonus; the critic is treated as constant.
// With use_mean_baseline the batch-mean CVaR weight is subtracted from each
// sample's weight before the score product: the subtraction is constant with
// respect to the action, so the estimator stays unbiased while the variance
// drops enough for the update to be usable (the advantage form of the
// actor-critic). The default is the plain estimator.
PolicyGradientResult cvar_policy_gradient(const GaussianPolicy& policy,
                                          const QuantileCritic& critic,
                                          const std::vector<const Transition*>& batch,
                                          const AgentConfig& cfg,
                                          bool use_mean_baseline = false);

// lambda * ||theta||^2 / (2 sigma_P^2) and its gradient.
std::pair<double, std::vector<double>> pac_regularizer(std::span<const double> params,
                                                       double lambda_pac, double sigma_p2);

// Empirical risk + sqrt((KL + log(2 sqrt(n)/delta)) / (2n)).
double pac_bound(double empirical_risk, std::size_t n_episodes, double kl, double delta);

// Diagonal-Gaussian KL(Q||P) with posterior variance read off the policy
// log-std heads averaged over the given states.
double policy_kl_to_prior(const GaussianPolicy& policy,
                          const std::vector<std::vector<double>>& states, double sigma_p2);

/// Episode source for the trainer: the production environment encodes
/// waveforms and scores equalized latents; tests substitute synthetic ones.
class RlEnv {
public:
    virtual ~RlEnv() = default;
    virtual std::size_t train_size() const = 0;
    virtual std::size_t val_size() const = 0;
    virtual std::vector<double> state(bool val_split, std::size_t idx, std::uint64_t seed) const = 0;
    virtual double reward(bool val_split, std::size_t idx, std::span<const double> action,
                          std::uint64_t seed) const = 0;
};

/// Latent-space environment: MC-dropout state, equalize, re-encode, reward
/// from anchor distance and uncertainty.
class LatentEqEnv : public RlEnv {
public:
    LatentEqEnv(const VibModel& vib, AnchorPoint anchor, ProjectionSet proj, const Dataset& train,
                const Dataset& val, EqKind kind, const EqRanges& ranges, int mc_passes,
                double lambda_unc, double distance_scale, int threads = 0);

    std::size_t train_size() const override;
    std::size_t val_size() const override;
    std::vector<double> state(bool val_split, std::size_t idx, std::uint64_t seed) const override;
    double reward(bool val_split, std::size_t idx, std::span<const double> action,
                  std::uint64_t seed) const override;

    const AnchorPoint& anchor() const { return anchor_; }
    const ProjectionSet& projections() const { return proj_; }
    double distance_scale() const { return scale_; }

private:
    const VibModel& vib_;
    AnchorPoint anchor_;
    ProjectionSet proj_;
    const Dataset& train_;
    const Dataset& val_;
    EqKind kind_;
    EqRanges ranges_;
    int mc_passes_;
    double lambda_unc_;
    double scale_;
    int threads_;
};

// 95th percentile of unequalized anchor distances over the training split;
// maps raw latent distances into the unit reward range before clipping.
double calibrate_distance_scale(const VibModel& vib, const AnchorPoint& anchor,
                                const ProjectionSet& proj, const Dataset& train, int threads = 0);

struct Agent {
    AgentConfig cfg;
    GaussianPolicy policy;
    QuantileCritic critic;
    QuantileCritic target_critic;
    long optimizer_steps = 0;
    long quantile_crossings = 0;  // diagnostic counter
};

Agent make_agent(const AgentConfig& cfg);

struct AgentCurveRow {
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double mean_reward = 0.0;
    double val_cvar = 0.0;
};

struct TrainAgentResult {
    std::vector<AgentCurveRow> curve;
    int epochs_run = 0;
    bool early_stopped = false;
};

// Algorithm phase 2: rollouts into the replay buffer, quantile critic
// updates, CVaR policy updates with the PAC penalty, EMA target refresh and
// periodic spectral normalization. Deterministic in (cfg.seed, env).
TrainAgentResult train_agent(Agent& agent, RlEnv& env, int threads = 0);

// Deterministic deployment action: clip(policy mean) at the given state.
std::vector<double> optimize_action(const Agent& agent, std::span<const double> state);

// Deployment entry: MC-dropout state for the waveform, then clip(policy mean).
EqualizerParams optimize(const Agent& agent, const VibModel& vib, const Waveform& w, EqKind kind,
                         const EqRanges& ranges, std::uint64_t state_seed, int threads = 0);

void save_agent(const Agent& agent, const std::string& path_stem, const std::string& extra_json);
Agent load_agent(const std::string& path_stem, std::string* extra_json = nullptr);

// ---------------------------------------------------------------------------
// Tabular distributional Bellman harness

/// Finite MDP with discrete reward distributions and a fixed policy.
struct TabularMdp {
    int n_states = 1;
    int n_actions = 1;
    // [s][a] -> list of (next state, probability)
    std::vector<std::vector<std::vector<std::pair<int, double>>>> transitions;
    // [s][a] -> list of (reward, probability)
    std::vector<std::vector<std::vector<std::pair<double, double>>>> rewards;
    // [s] -> action probabilities
    std::vector<std::vector<double>> policy;

    void validate() const;
};

struct ContractionReport {
    std::vector<double> w1;      // W1(Z_k, Z*) for k = 0..iterations
    std::vector<double> ratios;  // w1[k+1]/w1[k] where w1[k] is representable
    double eps_quant = 0.0;      // 2 * return range / N
    std::vector<std::vector<std::vector<double>>> fixed_point;  // quantiles [s][a]
};

// Applies the exact distributional Bellman operator (finite mixture, then
// re-quantization to N quantiles) and reports W1 distances to the fixed point
// obtained from fixed_point_iters applications.
ContractionReport bellman_contraction_harness(const TabularMdp& mdp, double gamma, int iterations,
                                              int n_quantiles = 51, int fixed_point_iters = 10000);

}  // namespace eqrl
