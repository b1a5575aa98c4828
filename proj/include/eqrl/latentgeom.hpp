#pragma once

#include <cstdint>
#include <vector>

#include "eqrl/errors.hpp"

namespace eqrl {

/// MC-dropout summary of a waveform's latent code: per-dimension mean and
/// spread plus the scalar epistemic uncertainty (norm of the spreads).
/// This is also the RL state, concatenated as [mean, std].
struct LatentState {
    std::vector<double> mean;
    std::vector<double> std;
    double uncertainty = 0.0;

    std::vector<double> as_state() const {
        std::vector<double> s(mean);
        s.insert(s.end(), std.begin(), std.end());
        return s;
    }
};

/// Geometric median of the valid-signal latents.
struct AnchorPoint {
    std::vector<double> c;
    std::size_t n_valid = 0;
    double residual = 0.0;
    bool max_iterations_hit = false;
};

/// Frozen set of random unit vectors for sliced projections.
struct ProjectionSet {
    std::vector<std::vector<double>> dirs;  // L unit vectors in R^l
    std::uint64_t seed = 0;

    std::size_t count() const { return dirs.size(); }
    std::size_t dim() const { return dirs.empty() ? 0 : dirs.front().size(); }
};

// Weiszfeld iteration for the Fermat-Weber point. Stops when the step norm
// drops to tol; an iterate landing on a data point is returned as-is.
AnchorPoint weiszfeld_anchor(const std::vector<std::vector<double>>& latents, double tol = 1e-6,
                             int max_iter = 1000);

// Sum of Euclidean distances from x to the latents (the Weiszfeld objective).
double weiszfeld_objective(const std::vector<std::vector<double>>& latents,
                           const std::vector<double>& x);

// L Gaussian directions normalized to unit norm, deterministic per seed.
ProjectionSet sample_projections(std::size_t dim, std::size_t count, std::uint64_t seed);

// Point-to-point sliced 2-Wasserstein: sqrt(mean_j (u_j . (a - c))^2).
double sliced_w2(const std::vector<double>& a, const std::vector<double>& c,
                 const ProjectionSet& proj);

/// Latent reward: negative sliced distance to the anchor minus an uncertainty
/// penalty, clipped to [-1, 1]. `distance_scale` is the dataset-calibrated
/// constant mapping raw latent distances to the unit reward range.
double latent_reward(const LatentState& equalized, const AnchorPoint& anchor,
                     const ProjectionSet& proj, double lambda_unc = 0.1,
                     double distance_scale = 1.0);

}  // namespace eqrl
