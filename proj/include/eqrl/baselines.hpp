#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "eqrl/errors.hpp"

namespace eqrl {

/// Counting wrapper around an objective on [0,1]^d; every optimizer reports
/// its exact evaluation budget through this.
class FitnessFn {
public:
    explicit FitnessFn(std::function<double(std::span<const double>)> fn) : fn_(std::move(fn)) {}

    double operator()(std::span<const double> p) const {
        calls_ += 1;
        return fn_(p);
    }

    std::size_t calls() const { return calls_; }
    void reset_calls() { calls_ = 0; }

private:
    std::function<double(std::span<const double>)> fn_;
    mutable std::size_t calls_ = 0;
};

struct GaConfig {
    int population = 25;
    double mutation_lo = -0.1;
    double mutation_hi = 0.1;
    double mutation_rate = 0.1;  // per gene
    double stagnation_tol = 0.0025;
    int stagnation_generations = 10;
    int max_generations = 300;
};

struct PsoConfig {
    int particles = 20;
    double w_init = 0.9;
    double w_final = 0.4;
    double c1 = 2.0;
    double c2 = 2.0;
    double v_max_fraction = 0.2;  // of the [0,1] range
    double improvement_tol = 0.001;
    int stagnation_iters = 15;
    int max_iters = 200;
};

struct OptResult {
    std::vector<double> best;
    double best_fitness = 0.0;
    std::vector<double> history;  // per generation/iteration best
    std::size_t fitness_calls = 0;
    bool roulette_fallback = false;  // GA hit an all-nonpositive generation
};

// Parameter-grouping crossover: single point after gene 2 for d=4, two points
// after genes 3 and 6 for d=8.
std::vector<double> ga_crossover(std::span<const double> a, std::span<const double> b);

OptResult ga_optimize(const FitnessFn& fitness, const GaConfig& cfg, int d, std::uint64_t seed);
OptResult pso_optimize(const FitnessFn& fitness, const PsoConfig& cfg, int d, std::uint64_t seed);

// Exhaustive lattice search: k = 1 evaluates {0} per axis, k >= 2 includes
// both endpoints with spacing 1/(k-1). Budget guard k^d <= 10^6. Ties go to
// the lexicographically smallest index.
OptResult grid_search(const FitnessFn& fitness, int d, int levels_per_axis);

}  // namespace eqrl
