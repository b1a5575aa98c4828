#include "eqrl/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "eqrl/rng.hpp"

namespace eqrl {

std::vector<double> ga_crossover(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InputError("ga_crossover: parent size mismatch");
    std::vector<double> child(a.begin(), a.end());
    if (a.size() == 4) {
        child[2] = b[2];
        child[3] = b[3];
    } else if (a.size() == 8) {
        for (std::size_t i = 3; i < 6; ++i) child[i] = b[i];
    } else {
        throw InputError("ga_crossover: d must be 4 or 8");
    }
    return child;
}

OptResult ga_optimize(const FitnessFn& fitness, const GaConfig& cfg, int d, std::uint64_t seed) {
    if (d != 4 && d != 8) throw ConfigError("ga_optimize: d must be 4 or 8");
    if (cfg.population < 2) throw ConfigError("ga_optimize: population must be >= 2");

    Rng rng(derive_seed(seed, 0x6761));  // "ga"
    const auto pop_size = static_cast<std::size_t>(cfg.population);
    std::vector<std::vector<double>> pop(pop_size, std::vector<double>(static_cast<std::size_t>(d)));
    for (auto& chrom : pop)
        for (auto& g : chrom) g = rng.uniform();

    OptResult result;
    std::vector<double> fit(pop_size);
    auto evaluate = [&] {
        for (std::size_t i = 0; i < pop_size; ++i) fit[i] = fitness(pop[i]);
    };
    evaluate();

    auto update_best = [&] {
        for (std::size_t i = 0; i < pop_size; ++i) {
            if (result.best.empty() || fit[i] > result.best_fitness) {
                result.best = pop[i];
                result.best_fitness = fit[i];
            }
        }
    };
    update_best();

    int stagnant = 0;
    double prev_gen_best = *std::max_element(fit.begin(), fit.end());
    result.history.push_back(prev_gen_best);

    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        // Roulette on shifted fitness so negative improvements still rank;
        // an all-nonpositive generation falls back to uniform picks.
        const double f_min = *std::min_element(fit.begin(), fit.end());
        const double f_max = *std::max_element(fit.begin(), fit.end());
        const bool all_nonpositive = f_max <= 0.0;
        if (all_nonpositive) result.roulette_fallback = true;

        std::vector<double> weights(pop_size);
        double total = 0.0;
        for (std::size_t i = 0; i < pop_size; ++i) {
            weights[i] = all_nonpositive ? 1.0 : fit[i] - f_min + 1e-9;
            total += weights[i];
        }
        auto pick = [&]() -> const std::vector<double>& {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < pop_size; ++i) {
                target -= weights[i];
                if (target <= 0.0) return pop[i];
            }
            return pop[pop_size - 1];
        };

        std::vector<std::vector<double>> next(pop_size);
        for (std::size_t i = 0; i < pop_size; ++i) {
            auto child = ga_crossover(pick(), pick());
            for (auto& g : child) {
                if (rng.uniform() < cfg.mutation_rate)
                    g = std::clamp(g + rng.uniform(cfg.mutation_lo, cfg.mutation_hi), 0.0, 1.0);
            }
            next[i] = std::move(child);
        }
        pop = std::move(next);
        evaluate();
        update_best();

        const double gen_best = *std::max_element(fit.begin(), fit.end());
        result.history.push_back(gen_best);
        stagnant = std::abs(gen_best - prev_gen_best) <= cfg.stagnation_tol ? stagnant + 1 : 0;
        prev_gen_best = gen_best;
        if (stagnant >= cfg.stagnation_generations) break;
    }
    result.fitness_calls = fitness.calls();
    return result;
}

OptResult pso_optimize(const FitnessFn& fitness, const PsoConfig& cfg, int d, std::uint64_t seed) {
    if (d != 4 && d != 8) throw ConfigError("pso_optimize: d must be 4 or 8");
    if (cfg.particles < 2) throw ConfigError("pso_optimize: particles must be >= 2");

    Rng rng(derive_seed(seed, 0x70736f));  // "pso"
    const auto n = static_cast<std::size_t>(cfg.particles);
    const auto dim = static_cast<std::size_t>(d);
    const double v_max = cfg.v_max_fraction;  // range is [0,1]

    std::vector<std::vector<double>> x(n, std::vector<double>(dim));
    std::vector<std::vector<double>> v(n, std::vector<double>(dim, 0.0));
    for (auto& xi : x)
        for (auto& g : xi) g = rng.uniform();

    std::vector<std::vector<double>> p_best = x;
    std::vector<double> p_fit(n);
    for (std::size_t i = 0; i < n; ++i) p_fit[i] = fitness(x[i]);

    OptResult result;
    std::size_t g_idx = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (p_fit[i] > p_fit[g_idx]) g_idx = i;
    result.best = p_best[g_idx];
    result.best_fitness = p_fit[g_idx];
    result.history.push_back(result.best_fitness);

    int stagnant = 0;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const double w =
            cfg.w_init + (cfg.w_final - cfg.w_init) *
                             (cfg.max_iters > 1 ? static_cast<double>(it) / (cfg.max_iters - 1) : 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                double vel = w * v[i][j] + cfg.c1 * r1 * (p_best[i][j] - x[i][j]) +
                             cfg.c2 * r2 * (result.best[j] - x[i][j]);
                vel = std::clamp(vel, -v_max, v_max);
                v[i][j] = vel;
                x[i][j] = std::clamp(x[i][j] + vel, 0.0, 1.0);
            }
            const double f = fitness(x[i]);
            if (f > p_fit[i]) {
                p_fit[i] = f;
                p_best[i] = x[i];
            }
        }
        double improvement = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (p_fit[i] > result.best_fitness) {
                improvement = std::max(improvement, p_fit[i] - result.best_fitness);
                result.best_fitness = p_fit[i];
                result.best = p_best[i];
            }
        }
        result.history.push_back(result.best_fitness);
        stagnant = improvement < cfg.improvement_tol ? stagnant + 1 : 0;
        if (stagnant >= cfg.stagnation_iters) break;
    }
    result.fitness_calls = fitness.calls();
    return result;
}

OptResult grid_search(const FitnessFn& fitness, int d, int levels_per_axis) {
    if (d < 1) throw ConfigError("grid_search: d must be >= 1");
    if (levels_per_axis < 1) throw ConfigError("grid_search: levels must be >= 1");
    double budget = 1.0;
    for (int i = 0; i < d; ++i) budget *= levels_per_axis;
    if (budget > 1e6) throw ConfigError("grid_search: lattice exceeds the 10^6 evaluation budget");

    const auto dim = static_cast<std::size_t>(d);
    std::vector<int> idx(dim, 0);
    std::vector<double> point(dim, 0.0);
    auto level_value = [&](int i) {
        return levels_per_axis == 1 ? 0.0 : static_cast<double>(i) / (levels_per_axis - 1);
    };

    OptResult result;
    bool first = true;
    while (true) {
        for (std::size_t j = 0; j < dim; ++j) point[j] = level_value(idx[j]);
        const double f = fitness(point);
        if (first || f > result.best_fitness) {  // strict: ties keep the earliest index
            result.best_fitness = f;
            result.best = point;
            first = false;
        }
        // advance lexicographic index, last axis fastest
        std::size_t j = dim;
        while (j-- > 0) {
            if (++idx[j] < levels_per_axis) break;
            idx[j] = 0;
            if (j == 0) {
                result.fitness_calls = fitness.calls();
                return result;
            }
        }
    }
}

}  // namespace eqrl
