#include "eqrl/distrl.hpp"

#include <algorithm>
#include <cmath>

#include "eqrl/evalreport.hpp"
#include "eqrl/threading.hpp"
#include "json.hpp"

namespace eqrl {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

constexpr std::uint64_t kPickStream = 11;
constexpr std::uint64_t kStateStream = 12;
constexpr std::uint64_t kActionStream = 13;
constexpr std::uint64_t kRewardStream = 14;
constexpr std::uint64_t kSampleStream = 15;
constexpr std::uint64_t kValStream = 16;

}  // namespace

std::vector<double> quantile_fractions(int n) {
    if (n < 1) throw ConfigError("quantile_fractions: N must be >= 1");
    std::vector<double> tau(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        tau[static_cast<std::size_t>(i - 1)] = (2.0 * i - 1.0) / (2.0 * n);
    return tau;
}

void policy_heads(const GaussianPolicy& policy, std::span<const double> state,
                  std::vector<double>& mean, std::vector<double>& logstd,
                  std::vector<ClampSide>* mean_clamp, std::vector<ClampSide>* logstd_clamp,
                  ForwardCache* cache) {
    const auto out = forward(policy.net, state, ForwardMode::Eval, 0, cache);
    const auto d = static_cast<std::size_t>(policy.action_dim);
    mean.resize(d);
    logstd.resize(d);
    if (mean_clamp) mean_clamp->assign(d, ClampSide::None);
    if (logstd_clamp) logstd_clamp->assign(d, ClampSide::None);
    for (std::size_t j = 0; j < d; ++j) {
        const double raw_m = out[j];
        mean[j] = std::clamp(raw_m, 0.0, 1.0);
        if (mean_clamp && mean[j] != raw_m)
            (*mean_clamp)[j] = raw_m < 0.0 ? ClampSide::Low : ClampSide::High;
        const double raw_s = out[d + j];
        logstd[j] = std::clamp(raw_s, policy.logstd_min, policy.logstd_max);
        if (logstd_clamp && logstd[j] != raw_s)
            (*logstd_clamp)[j] = raw_s < policy.logstd_min ? ClampSide::Low : ClampSide::High;
    }
}

double project_clamped_grad(double grad, ClampSide side) {
    // Descent moves the parameter by -grad: at a low saturation only inward
    // (positive) movement is allowed, at a high saturation only negative.
    if (side == ClampSide::Low && grad > 0.0) return 0.0;
    if (side == ClampSide::High && grad < 0.0) return 0.0;
    return grad;
}

double gaussian_log_prob(std::span<const double> raw, std::span<const double> mean,
                         std::span<const double> logstd) {
    if (raw.size() != mean.size() || raw.size() != logstd.size())
        throw InputError("gaussian_log_prob: shape mismatch");
    double lp = 0.0;
    for (std::size_t j = 0; j < raw.size(); ++j) {
        const double z = (raw[j] - mean[j]) / std::exp(logstd[j]);
        lp += -0.5 * kLog2Pi - logstd[j] - 0.5 * z * z;
    }
    return lp;
}

ActionSample sample_action(const GaussianPolicy& policy, std::span<const double> state,
                           std::uint64_t seed) {
    std::vector<double> mean, logstd;
    policy_heads(policy, state, mean, logstd);

    Rng rng(derive_seed(seed, kActionStream));
    ActionSample s;
    s.raw.resize(mean.size());
    s.action.resize(mean.size());
    for (std::size_t j = 0; j < mean.size(); ++j) {
        s.raw[j] = mean[j] + std::exp(logstd[j]) * rng.normal();
        s.action[j] = std::clamp(s.raw[j], 0.0, 1.0);
    }
    s.log_prob = gaussian_log_prob(s.raw, mean, logstd);
    return s;
}

double quantile_huber(double delta, double tau, double kappa) {
    if (!(tau > 0.0 && tau < 1.0)) throw InputError("quantile_huber: tau must be in (0,1)");
    const double a = std::abs(delta);
    const double huber = a <= kappa ? 0.5 * delta * delta : kappa * (a - 0.5 * kappa);
    const double weight = std::abs(tau - (delta < 0.0 ? 1.0 : 0.0));
    return weight * huber;
}

double quantile_huber_grad(double delta, double tau, double kappa) {
    const double weight = std::abs(tau - (delta < 0.0 ? 1.0 : 0.0));
    const double dh = std::abs(delta) <= kappa ? delta : kappa * (delta < 0.0 ? -1.0 : 1.0);
    return weight * dh;
}

QuantileSet critic_quantiles(const QuantileCritic& critic, std::span<const double> state,
                             std::span<const double> action) {
    std::vector<double> input(state.begin(), state.end());
    input.insert(input.end(), action.begin(), action.end());
    return QuantileSet::make(forward(critic.net, input, ForwardMode::Eval));
}

double critic_loss(const QuantileCritic& critic, const std::vector<const Transition*>& batch,
                   double kappa) {
    if (batch.empty()) throw InputError("critic_loss: empty batch");
    const auto tau = quantile_fractions(critic.n_quantiles);
    double acc = 0.0;
    for (const auto* t : batch) {
        const auto q = critic_quantiles(critic, t->state, t->action);
        for (int i = 0; i < critic.n_quantiles; ++i) {
            acc += quantile_huber(q.values[static_cast<std::size_t>(i)] - t->reward,
                                  tau[static_cast<std::size_t>(i)], kappa);
        }
    }
    return acc / (static_cast<double>(batch.size()) * critic.n_quantiles);
}

double cvar_from_quantiles(const QuantileSet& q, double alpha) {
    const auto n = static_cast<int>(q.values.size());
    const int n_alpha = static_cast<int>(alpha * n);
    if (n_alpha < 1) throw InputError("cvar_from_quantiles: floor(alpha*N) must be >= 1");
    double acc = 0.0;
    for (int i = 0; i < n_alpha; ++i) acc += q.values[static_cast<std::size_t>(i)];
    return acc / n_alpha;
}

PolicyGradientResult cvar_policy_gradient(const GaussianPolicy& policy,
                                          const QuantileCritic& critic,
                                          const std::vector<const Transition*>& batch,
                                          const AgentConfig& cfg, bool use_mean_baseline) {
    if (batch.empty()) throw InputError("cvar_policy_gradient: empty batch");
    const auto d = static_cast<std::size_t>(policy.action_dim);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    PolicyGradientResult result;
    result.grads = zero_gradients(policy.net);

    std::vector<double> weights(batch.size());
    double baseline = 0.0;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto q = critic_quantiles(critic, batch[b]->state, batch[b]->action);
        for (std::size_t i = 1; i < q.values.size(); ++i) {
            if (q.values[i] < q.values[i - 1]) result.quantile_crossings += 1;
        }
        weights[b] = cvar_from_quantiles(q, cfg.alpha);
        baseline += weights[b] * inv_batch;
    }
    if (!use_mean_baseline) baseline = 0.0;

    for (std::size_t b = 0; b < batch.size(); ++b) {
        const auto* t = batch[b];
        ForwardCache cache;
        std::vector<double> mean, logstd;
        std::vector<ClampSide> mean_clamp, logstd_clamp;
        policy_heads(policy, t->state, mean, logstd, &mean_clamp, &logstd_clamp, &cache);

        const double weight = weights[b] - baseline;

        double entropy = 0.0;
        for (std::size_t j = 0; j < d; ++j) entropy += 0.5 * (kLog2Pi + 1.0) + logstd[j];
        result.entropy += entropy * inv_batch;

        const double log_pi = gaussian_log_prob(t->action_raw, mean, logstd);
        result.surrogate += (-(weight * log_pi) - cfg.entropy_beta * entropy) * inv_batch;

        // Descent direction of -(weight * log pi + beta_h * entropy). The
        // critic values are constants here (no gradient through omega).
        std::vector<double> upstream(2 * d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            const double sigma = std::exp(logstd[j]);
            const double z = (t->action_raw[j] - mean[j]) / sigma;
            upstream[j] =
                project_clamped_grad(-weight * (z / sigma), mean_clamp[j]) * inv_batch;
            upstream[d + j] =
                project_clamped_grad(-weight * (z * z - 1.0) - cfg.entropy_beta,
                                     logstd_clamp[j]) *
                inv_batch;
        }
        backward_accumulate(policy.net, cache, upstream, result.grads);
    }
    return result;
}

std::pair<double, std::vector<double>> pac_regularizer(std::span<const double> params,
                                                       double lambda_pac, double sigma_p2) {
    double sq = 0.0;
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        sq += params[i] * params[i];
        grad[i] = lambda_pac * params[i] / sigma_p2;
    }
    return {lambda_pac * sq / (2.0 * sigma_p2), std::move(grad)};
}

double pac_bound(double empirical_risk, std::size_t n_episodes, double kl, double delta) {
    if (n_episodes < 1) throw InputError("pac_bound: n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw InputError("pac_bound: delta must be in (0,1)");
    const auto n = static_cast<double>(n_episodes);
    return empirical_risk + std::sqrt((kl + std::log(2.0 * std::sqrt(n) / delta)) / (2.0 * n));
}

double policy_kl_to_prior(const GaussianPolicy& policy,
                          const std::vector<std::vector<double>>& states, double sigma_p2) {
    if (states.empty()) throw InputError("policy_kl_to_prior: need states");
    double sigma_q2 = 0.0;
    std::size_t count = 0;
    for (const auto& s : states) {
        std::vector<double> mean, logstd;
        policy_heads(policy, s, mean, logstd);
        for (double ls : logstd) {
            sigma_q2 += std::exp(2.0 * ls);
            count += 1;
        }
    }
    sigma_q2 /= static_cast<double>(count);

    const auto params = policy.net.flat_params();
    double norm_sq = 0.0;
    for (double p : params) norm_sq += p * p;
    const auto dim = static_cast<double>(params.size());
    const double ratio = sigma_q2 / sigma_p2;
    return 0.5 * (dim * (ratio - 1.0 - std::log(ratio)) + norm_sq / sigma_p2);
}

// ---------------------------------------------------------------------------

LatentEqEnv::LatentEqEnv(const VibModel& vib, AnchorPoint anchor, ProjectionSet proj,
                         const Dataset& train, const Dataset& val, EqKind kind,
                         const EqRanges& ranges, int mc_passes, double lambda_unc,
                         double distance_scale, int threads)
    : vib_(vib),
      anchor_(std::move(anchor)),
      proj_(std::move(proj)),
      train_(train),
      val_(val),
      kind_(kind),
      ranges_(ranges),
      mc_passes_(mc_passes),
      lambda_unc_(lambda_unc),
      scale_(distance_scale),
      threads_(threads) {
    if (anchor_.c.size() != static_cast<std::size_t>(vib.cfg.latent_dim))
        throw ConfigError("latent env: anchor dimension does not match encoder");
}

std::size_t LatentEqEnv::train_size() const { return train_.records.size(); }
std::size_t LatentEqEnv::val_size() const { return val_.records.size(); }

std::vector<double> LatentEqEnv::state(bool val_split, std::size_t idx, std::uint64_t seed) const {
    const auto& ds = val_split ? val_ : train_;
    return mc_latent(vib_, ds.records[idx].output, mc_passes_, seed, threads_).as_state();
}

double LatentEqEnv::reward(bool val_split, std::size_t idx, std::span<const double> action,
                           std::uint64_t seed) const {
    const auto& ds = val_split ? val_ : train_;
    const auto params =
        make_params(kind_, std::vector<double>(action.begin(), action.end()), ranges_);
    const Waveform equalized = apply(ds.records[idx].output, params);
    const auto latent = mc_latent(vib_, equalized, mc_passes_, seed, threads_);
    return latent_reward(latent, anchor_, proj_, lambda_unc_, scale_);
}

double calibrate_distance_scale(const VibModel& vib, const AnchorPoint& anchor,
                                const ProjectionSet& proj, const Dataset& train, int threads) {
    if (train.records.empty()) throw ConfigError("calibrate_distance_scale: empty dataset");
    std::vector<double> dist(train.records.size());
    parallel_for(train.records.size(), threads, [&](std::size_t i) {
        dist[i] = sliced_w2(latent_mean(vib, train.records[i].output), anchor.c, proj);
    });
    std::sort(dist.begin(), dist.end());
    const auto idx = static_cast<std::size_t>(0.95 * (static_cast<double>(dist.size()) - 1.0));
    const double p95 = dist[idx];
    return p95 > 0.0 ? p95 : 1.0;
}

Agent make_agent(const AgentConfig& cfg) {
    cfg.validate();
    Agent agent;
    agent.cfg = cfg;

    std::vector<LayerSpec> pol;
    int prev = cfg.state_dim();
    for (int h : cfg.hidden) {
        pol.push_back({prev, h, Activation::Relu, 0.0, cfg.spectral_norm});
        prev = h;
    }
    pol.push_back({prev, 2 * cfg.action_dim, Activation::Identity, 0.0, false});
    agent.policy.net = Mlp(pol, derive_seed(cfg.seed, 21));
    agent.policy.action_dim = cfg.action_dim;
    // Start exploration at sigma ~ exp(-1); a unit sigma just slams every
    // sample into the box walls.
    auto& last = agent.policy.net.layers.back();
    for (int j = 0; j < cfg.action_dim; ++j)
        last.b[static_cast<std::size_t>(cfg.action_dim + j)] = -1.0;

    // Lipschitz constraint on the policy only: a norm-capped critic cannot
    // resolve the reward curvature quantile regression needs.
    std::vector<LayerSpec> cr;
    prev = cfg.state_dim() + cfg.action_dim;
    for (int h : cfg.hidden) {
        cr.push_back({prev, h, Activation::Relu, 0.0, false});
        prev = h;
    }
    cr.push_back({prev, cfg.n_quantiles, Activation::Identity, 0.0, false});
    agent.critic.net = Mlp(cr, derive_seed(cfg.seed, 22));
    agent.critic.n_quantiles = cfg.n_quantiles;
    agent.target_critic = agent.critic;
    return agent;
}

namespace {

struct EpisodeResult {
    Transition transition;
    double reward = 0.0;
};

double validation_cvar(const Agent& agent, const RlEnv& env, double alpha, std::uint64_t seed) {
    const std::size_t n = env.val_size();
    if (n == 0) return 0.0;
    std::vector<double> rewards(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = env.state(true, i, derive_seed(seed, derive_seed(kValStream, 2 * i)));
        const auto a = optimize_action(agent, s);
        rewards[i] = env.reward(true, i, a, derive_seed(seed, derive_seed(kValStream, 2 * i + 1)));
    }
    const auto needed = static_cast<std::size_t>(std::ceil(1.0 / alpha - 1e-9));
    if (n < needed) {
        double mean = 0.0;
        for (double r : rewards) mean += r;
        return mean / static_cast<double>(n);
    }
    return empirical_cvar(rewards, alpha);
}

}  // namespace

TrainAgentResult train_agent(Agent& agent, RlEnv& env, int threads) {
    const auto& cfg = agent.cfg;
    cfg.validate();
    if (env.train_size() == 0) throw ConfigError("train_agent: empty training environment");

    TrainAgentResult result;
    ReplayBuffer buffer(cfg.buffer_capacity);
    AdamState opt_policy, opt_critic;
    opt_policy.lr = cfg.actor_lr;
    opt_critic.lr = cfg.critic_lr;

    double best_val = -std::numeric_limits<double>::infinity();
    int best_epoch = -1;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::uint64_t epoch_seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch));

        // Rollouts are embarrassingly parallel; the buffer is filled in
        // episode order afterwards so thread count never changes the run.
        const auto n_episodes = static_cast<std::size_t>(cfg.episodes_per_epoch);
        std::vector<EpisodeResult> episodes(n_episodes);
        parallel_for(n_episodes, threads, [&](std::size_t ep) {
            const std::uint64_t ep_seed = derive_seed(epoch_seed, ep);
            Rng pick(derive_seed(ep_seed, kPickStream));
            const auto idx = static_cast<std::size_t>(pick.below(env.train_size()));
            auto state = env.state(false, idx, derive_seed(ep_seed, kStateStream));
            const auto act = sample_action(agent.policy, state, derive_seed(ep_seed, kActionStream));
            const double r = env.reward(false, idx, act.action, derive_seed(ep_seed, kRewardStream));
            episodes[ep].transition = {std::move(state), act.action, act.raw, r};
            episodes[ep].reward = r;
        });
        double mean_reward = 0.0;
        for (auto& er : episodes) {
            mean_reward += er.reward;
            buffer.push(std::move(er.transition));
        }
        mean_reward /= static_cast<double>(n_episodes);

        double epoch_actor_loss = 0.0;
        double epoch_critic_loss = 0.0;
        for (int u = 0; u < cfg.updates_per_epoch; ++u) {
            Rng sample_rng(derive_seed(epoch_seed, derive_seed(kSampleStream, static_cast<std::uint64_t>(u))));
            const auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch), sample_rng);

            // Critic: quantile-Huber regression of theta_i(s,a) onto R.
            const auto tau = quantile_fractions(cfg.n_quantiles);
            Gradients critic_grads = zero_gradients(agent.critic.net);
            double closs = 0.0;
            const double inv = 1.0 / (static_cast<double>(batch.size()) * cfg.n_quantiles);
            for (const auto* t : batch) {
                std::vector<double> input(t->state);
                input.insert(input.end(), t->action.begin(), t->action.end());
                ForwardCache cache;
                const auto q = forward(agent.critic.net, input, ForwardMode::Eval, 0, &cache);
                std::vector<double> upstream(q.size());
                for (int i = 0; i < cfg.n_quantiles; ++i) {
                    const double delta = q[static_cast<std::size_t>(i)] - t->reward;
                    closs += quantile_huber(delta, tau[static_cast<std::size_t>(i)], cfg.kappa) * inv;
                    upstream[static_cast<std::size_t>(i)] =
                        quantile_huber_grad(delta, tau[static_cast<std::size_t>(i)], cfg.kappa) * inv;
                }
                backward_accumulate(agent.critic.net, cache, upstream, critic_grads);
            }
            adam_step(opt_critic, agent.critic.net, critic_grads);

            // Policy: CVaR-weighted score function + entropy, PAC penalty.
            // Trained with the mean-baseline advantage form; the plain
            // estimator's variance swamps the update at this batch size.
            auto pg = cvar_policy_gradient(agent.policy, agent.critic, batch, cfg, true);
            agent.quantile_crossings += pg.quantile_crossings;
            auto params = agent.policy.net.flat_params();
            auto flat = pg.grads.flat();
            const auto [pac_penalty, pac_grad] =
                pac_regularizer(params, cfg.lambda_pac, cfg.sigma_p2);
            for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += pac_grad[i];
            adam_step(opt_policy, params, flat);
            agent.policy.net.set_flat_params(params);
            epoch_actor_loss += pg.surrogate + pac_penalty;
            epoch_critic_loss += closs;

            agent.optimizer_steps += 1;
            if (cfg.spectral_norm && agent.optimizer_steps % cfg.spectral_every == 0) {
                spectral_normalize_flagged(agent.policy.net, 1);
                spectral_normalize_flagged(agent.critic.net, 1);
            }
            ema_update(agent.target_critic.net, agent.critic.net, cfg.ema_tau);
        }

        AgentCurveRow row;
        row.actor_loss = epoch_actor_loss / cfg.updates_per_epoch;
        row.critic_loss = epoch_critic_loss / cfg.updates_per_epoch;
        row.mean_reward = mean_reward;
        // Fixed validation seeds: every epoch scores the same conditions.
        row.val_cvar = validation_cvar(agent, env, cfg.alpha, derive_seed(cfg.seed, 0x76616c));
        result.curve.push_back(row);
        result.epochs_run = epoch + 1;

        if (row.val_cvar > best_val + 1e-9) {
            best_val = row.val_cvar;
            best_epoch = epoch;
        } else if (epoch - best_epoch >= cfg.early_stop_patience) {
            result.early_stopped = true;
            break;
        }
    }
    return result;
}

std::vector<double> optimize_action(const Agent& agent, std::span<const double> state) {
    std::vector<double> mean, logstd;
    policy_heads(agent.policy, state, mean, logstd);
    for (auto& v : mean) v = std::clamp(v, 0.0, 1.0);
    return mean;
}

EqualizerParams optimize(const Agent& agent, const VibModel& vib, const Waveform& w, EqKind kind,
                         const EqRanges& ranges, std::uint64_t state_seed, int threads) {
    const auto state = mc_latent(vib, w, agent.cfg.mc_passes, state_seed, threads).as_state();
    return make_params(kind, optimize_action(agent, state), ranges);
}

void save_agent(const Agent& agent, const std::string& path_stem, const std::string& extra_json) {
    nlohmann::json cfg;
    cfg["alpha"] = agent.cfg.alpha;
    cfg["n_quantiles"] = agent.cfg.n_quantiles;
    cfg["gamma"] = agent.cfg.gamma;
    cfg["kappa"] = agent.cfg.kappa;
    cfg["actor_lr"] = agent.cfg.actor_lr;
    cfg["critic_lr"] = agent.cfg.critic_lr;
    cfg["entropy_beta"] = agent.cfg.entropy_beta;
    cfg["lambda_pac"] = agent.cfg.lambda_pac;
    cfg["sigma_p2"] = agent.cfg.sigma_p2;
    cfg["batch"] = agent.cfg.batch;
    cfg["buffer_capacity"] = agent.cfg.buffer_capacity;
    cfg["episodes_per_epoch"] = agent.cfg.episodes_per_epoch;
    cfg["updates_per_epoch"] = agent.cfg.updates_per_epoch;
    cfg["epochs"] = agent.cfg.epochs;
    cfg["early_stop_patience"] = agent.cfg.early_stop_patience;
    cfg["ema_tau"] = agent.cfg.ema_tau;
    cfg["spectral_every"] = agent.cfg.spectral_every;
    cfg["spectral_norm"] = agent.cfg.spectral_norm;
    cfg["mc_passes"] = agent.cfg.mc_passes;
    cfg["lambda_unc"] = agent.cfg.lambda_unc;
    cfg["hidden"] = agent.cfg.hidden;
    cfg["latent_dim"] = agent.cfg.latent_dim;
    cfg["action_dim"] = agent.cfg.action_dim;
    cfg["seed"] = agent.cfg.seed;
    nlohmann::json meta;
    meta["agent"] = cfg;
    if (!extra_json.empty()) meta["extra"] = nlohmann::json::parse(extra_json);
    save_mlp(agent.policy.net, path_stem + ".policy", meta.dump());
    save_mlp(agent.critic.net, path_stem + ".critic");
    save_mlp(agent.target_critic.net, path_stem + ".target_critic");
}

Agent load_agent(const std::string& path_stem, std::string* extra_json) {
    std::string meta_text;
    Mlp policy_net = load_mlp(path_stem + ".policy", &meta_text);
    nlohmann::json meta = nlohmann::json::parse(meta_text);
    if (!meta.contains("agent")) throw IoError("not an agent checkpoint: " + path_stem);
    const auto& c = meta["agent"];

    AgentConfig cfg;
    cfg.alpha = c["alpha"].get<double>();
    cfg.n_quantiles = c["n_quantiles"].get<int>();
    cfg.gamma = c["gamma"].get<double>();
    cfg.kappa = c["kappa"].get<double>();
    cfg.actor_lr = c["actor_lr"].get<double>();
    cfg.critic_lr = c["critic_lr"].get<double>();
    cfg.entropy_beta = c["entropy_beta"].get<double>();
    cfg.lambda_pac = c["lambda_pac"].get<double>();
    cfg.sigma_p2 = c["sigma_p2"].get<double>();
    cfg.batch = c["batch"].get<int>();
    cfg.buffer_capacity = c["buffer_capacity"].get<std::size_t>();
    cfg.episodes_per_epoch = c["episodes_per_epoch"].get<int>();
    cfg.updates_per_epoch = c["updates_per_epoch"].get<int>();
    cfg.epochs = c["epochs"].get<int>();
    cfg.early_stop_patience = c["early_stop_patience"].get<int>();
    cfg.ema_tau = c["ema_tau"].get<double>();
    cfg.spectral_every = c["spectral_every"].get<int>();
    cfg.spectral_norm = c["spectral_norm"].get<bool>();
    cfg.mc_passes = c["mc_passes"].get<int>();
    cfg.lambda_unc = c["lambda_unc"].get<double>();
    cfg.hidden = c["hidden"].get<std::vector<int>>();
    cfg.latent_dim = c["latent_dim"].get<int>();
    cfg.action_dim = c["action_dim"].get<int>();
    cfg.seed = c["seed"].get<std::uint64_t>();

    Agent agent;
    agent.cfg = cfg;
    agent.policy.net = std::move(policy_net);
    agent.policy.action_dim = cfg.action_dim;
    agent.critic.net = load_mlp(path_stem + ".critic");
    agent.critic.n_quantiles = cfg.n_quantiles;
    agent.target_critic.net = load_mlp(path_stem + ".target_critic");
    agent.target_critic.n_quantiles = cfg.n_quantiles;
    if (extra_json) *extra_json = meta.contains("extra") ? meta["extra"].dump() : std::string("{}");
    return agent;
}

}  // namespace eqrl
