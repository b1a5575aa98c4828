#include "eqrl/latentgeom.hpp"

#include <algorithm>
#include <cmath>

#include "eqrl/rng.hpp"

namespace eqrl {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace

double weiszfeld_objective(const std::vector<std::vector<double>>& latents,
                           const std::vector<double>& x) {
    double acc = 0.0;
    for (const auto& z : latents) acc += distance(z, x);
    return acc;
}

AnchorPoint weiszfeld_anchor(const std::vector<std::vector<double>>& latents, double tol,
                             int max_iter) {
    if (latents.empty()) throw InputError("weiszfeld_anchor: empty latent set");
    const std::size_t dim = latents.front().size();
    for (const auto& z : latents) {
        if (z.size() != dim) throw InputError("weiszfeld_anchor: inconsistent dimensions");
    }

    AnchorPoint anchor;
    anchor.n_valid = latents.size();

    // Start from the centroid.
    std::vector<double> x(dim, 0.0);
    for (const auto& z : latents)
        for (std::size_t i = 0; i < dim; ++i) x[i] += z[i];
    for (auto& v : x) v /= static_cast<double>(latents.size());

    double prev_objective = weiszfeld_objective(latents, x);
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> num(dim, 0.0);
        double den = 0.0;
        for (const auto& z : latents) {
            const double d = distance(z, x);
            if (d < 1e-12) {  // iterate coincides with a data point
                anchor.c = z;
                anchor.residual = 0.0;
                return anchor;
            }
            const double w = 1.0 / d;
            for (std::size_t i = 0; i < dim; ++i) num[i] += z[i] * w;
            den += w;
        }
        std::vector<double> next(dim);
        for (std::size_t i = 0; i < dim; ++i) next[i] = num[i] / den;

        const double step = distance(next, x);
        x = std::move(next);

        const double objective = weiszfeld_objective(latents, x);
        if (objective > prev_objective + 1e-9)
            throw InputError("weiszfeld_anchor: objective increased; numerical failure");
        prev_objective = objective;

        if (step <= tol) {
            anchor.c = std::move(x);
            anchor.residual = step;
            return anchor;
        }
        anchor.residual = step;
    }
    anchor.c = std::move(x);
    anchor.max_iterations_hit = true;
    return anchor;
}

ProjectionSet sample_projections(std::size_t dim, std::size_t count, std::uint64_t seed) {
    if (dim < 1) throw InputError("sample_projections: dimension must be >= 1");
    ProjectionSet proj;
    proj.seed = seed;
    proj.dirs.reserve(count);
    Rng rng(derive_seed(seed, 0x70726f6a));  // "proj"
    for (std::size_t j = 0; j < count; ++j) {
        std::vector<double> u(dim);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& v : u) {
                v = rng.normal();
                norm += v * v;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (auto& v : u) v /= norm;
        proj.dirs.push_back(std::move(u));
    }
    return proj;
}

double sliced_w2(const std::vector<double>& a, const std::vector<double>& c,
                 const ProjectionSet& proj) {
    if (a.size() != c.size() || a.size() != proj.dim())
        throw InputError("sliced_w2: dimension mismatch");
    if (proj.count() == 0) throw InputError("sliced_w2: empty projection set");
    double acc = 0.0;
    for (const auto& u : proj.dirs) {
        double p = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) p += u[i] * (a[i] - c[i]);
        acc += p * p;
    }
    return std::sqrt(acc / static_cast<double>(proj.count()));
}

double latent_reward(const LatentState& equalized, const AnchorPoint& anchor,
                     const ProjectionSet& proj, double lambda_unc, double distance_scale) {
    if (!(distance_scale > 0.0)) throw InputError("latent_reward: scale must be positive");
    const double dist = sliced_w2(equalized.mean, anchor.c, proj);
    const double r = -dist / distance_scale - lambda_unc * equalized.uncertainty;
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace eqrl
