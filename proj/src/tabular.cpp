#include <algorithm>
#include <cmath>

#include "eqrl/distrl.hpp"

namespace eqrl {

void TabularMdp::validate() const {
    if (n_states < 1 || n_actions < 1) throw ConfigError("mdp: need states and actions");
    if (n_states * n_actions > 100) throw ConfigError("mdp: |S|*|A| must be <= 100");
    auto check_dist = [](double total) {
        if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mdp: probabilities must sum to 1");
    };
    if (transitions.size() != static_cast<std::size_t>(n_states) ||
        rewards.size() != static_cast<std::size_t>(n_states) ||
        policy.size() != static_cast<std::size_t>(n_states))
        throw ConfigError("mdp: table sizes must match n_states");
    for (int s = 0; s < n_states; ++s) {
        if (transitions[static_cast<std::size_t>(s)].size() != static_cast<std::size_t>(n_actions) ||
            rewards[static_cast<std::size_t>(s)].size() != static_cast<std::size_t>(n_actions))
            throw ConfigError("mdp: table sizes must match n_actions");
        double ptotal = 0.0;
        for (double p : policy[static_cast<std::size_t>(s)]) ptotal += p;
        check_dist(ptotal);
        for (int a = 0; a < n_actions; ++a) {
            double tt = 0.0, rt = 0.0;
            for (const auto& [sp, p] : transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) {
                if (sp < 0 || sp >= n_states) throw ConfigError("mdp: bad successor state");
                tt += p;
            }
            for (const auto& [r, p] : rewards[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) {
                (void)r;
                rt += p;
            }
            check_dist(tt);
            check_dist(rt);
        }
    }
}

namespace {

using QuantileTable = std::vector<std::vector<std::vector<double>>>;  // [s][a][i]

// Inverse CDF of a weighted atom list at the quantile fractions.
std::vector<double> requantize(std::vector<std::pair<double, double>>& atoms,
                               const std::vector<double>& fractions) {
    std::sort(atoms.begin(), atoms.end());
    std::vector<double> out(fractions.size());
    std::size_t a = 0;
    double cum = 0.0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const double target = fractions[i];
        while (a + 1 < atoms.size() && cum + atoms[a].second < target) {
            cum += atoms[a].second;
            ++a;
        }
        out[i] = atoms[a].first;
    }
    return out;
}

// One exact application of the distributional Bellman operator followed by
// quantile projection.
QuantileTable bellman_apply(const TabularMdp& mdp, const QuantileTable& z, double gamma,
                            const std::vector<double>& fractions) {
    const auto n = fractions.size();
    QuantileTable out(static_cast<std::size_t>(mdp.n_states),
                      std::vector<std::vector<double>>(static_cast<std::size_t>(mdp.n_actions)));
    const double atom_w = 1.0 / static_cast<double>(n);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            std::vector<std::pair<double, double>> atoms;  // (value, weight)
            for (const auto& [r, pr] : mdp.rewards[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) {
                for (const auto& [sp, pt] : mdp.transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) {
                    for (int ap = 0; ap < mdp.n_actions; ++ap) {
                        const double pa = mdp.policy[static_cast<std::size_t>(sp)][static_cast<std::size_t>(ap)];
                        if (pa == 0.0) continue;
                        const double w = pr * pt * pa * atom_w;
                        for (std::size_t i = 0; i < n; ++i) {
                            atoms.emplace_back(
                                r + gamma * z[static_cast<std::size_t>(sp)][static_cast<std::size_t>(ap)][i], w);
                        }
                    }
                }
            }
            out[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] =
                requantize(atoms, fractions);
        }
    }
    return out;
}

// Supremal W1 over state-action pairs; equal fractions make the per-pair W1
// the mean absolute quantile difference.
double w1_distance(const QuantileTable& a, const QuantileTable& b) {
    double worst = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) {
        for (std::size_t ac = 0; ac < a[s].size(); ++ac) {
            double acc = 0.0;
            for (std::size_t i = 0; i < a[s][ac].size(); ++i)
                acc += std::abs(a[s][ac][i] - b[s][ac][i]);
            worst = std::max(worst, acc / static_cast<double>(a[s][ac].size()));
        }
    }
    return worst;
}

}  // namespace

ContractionReport bellman_contraction_harness(const TabularMdp& mdp, double gamma, int iterations,
                                              int n_quantiles, int fixed_point_iters) {
    mdp.validate();
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("harness: gamma must be in (0,1)");
    const auto fractions = quantile_fractions(n_quantiles);

    QuantileTable zero(static_cast<std::size_t>(mdp.n_states),
                       std::vector<std::vector<double>>(
                           static_cast<std::size_t>(mdp.n_actions),
                           std::vector<double>(static_cast<std::size_t>(n_quantiles), 0.0)));

    // Fixed point of the implemented (projected) operator.
    QuantileTable z_star = zero;
    for (int k = 0; k < fixed_point_iters; ++k) {
        QuantileTable next = bellman_apply(mdp, z_star, gamma, fractions);
        if (w1_distance(next, z_star) == 0.0) {
            z_star = std::move(next);
            break;
        }
        z_star = std::move(next);
    }

    double r_lo = std::numeric_limits<double>::infinity();
    double r_hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : mdp.rewards)
        for (const auto& cell : row)
            for (const auto& [r, p] : cell) {
                (void)p;
                r_lo = std::min(r_lo, r);
                r_hi = std::max(r_hi, r);
            }
    const double value_range = (r_hi - r_lo) / (1.0 - gamma);

    ContractionReport report;
    report.eps_quant = 2.0 * value_range / static_cast<double>(n_quantiles);
    report.fixed_point = z_star;

    QuantileTable z = zero;
    report.w1.push_back(w1_distance(z, z_star));
    for (int k = 0; k < iterations; ++k) {
        z = bellman_apply(mdp, z, gamma, fractions);
        report.w1.push_back(w1_distance(z, z_star));
    }
    for (std::size_t k = 0; k + 1 < report.w1.size(); ++k) {
        if (report.w1[k] > 1e-12) report.ratios.push_back(report.w1[k + 1] / report.w1[k]);
    }
    return report;
}

}  // namespace eqrl
