#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eqrl/distrl.hpp"
#include "eqrl/eyemetric.hpp"
#include "eqrl/neural.hpp"

namespace eqrl {

// ---------------------------------------------------------------------------
// Independent oracles. These never call the implementation they check: the
// eye oracles supersample the folded traces pointwise, the Weiszfeld oracle
// scans a lattice, and the gradient oracle is central finite differences.

// Point-in-rectangle test at step_ps supersampling of the grid traces.
int mask_test_oracle(const EyeGrid& eye, const MaskSpec& mask, double step_ps = 0.1);

// Brute-force centered-rectangle growth over supersampled trace points.
double window_area_oracle(const EyeGrid& eye, double step_ps = 0.1);

// Minimum of the Fermat-Weber objective over a step-spaced lattice covering
// the points' bounding box, with the data points themselves added as
// candidates (the median can sit exactly on one).
double weiszfeld_grid_oracle(const std::vector<std::vector<double>>& points_2d,
                             double step = 1e-3);

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t params_checked = 0;
};

// Central finite differences of `loss` against an analytic flat gradient.
// check_stride > 1 probes a deterministic parameter subset (large nets).
GradCheckReport finite_difference_check(Mlp& net, const std::function<double(const Mlp&)>& loss,
                                        const std::vector<double>& analytic_flat, double h = 1e-4,
                                        std::size_t check_stride = 1);

// Random-vector probe of a layer's operator norm: max ||Wv||/||v||.
double operator_norm_probe(const DenseLayer& layer, int n_vectors, std::uint64_t seed);

// The 2-state MDP used by the contraction demonstration and its acceptance
// criterion.
TabularMdp make_contraction_demo_mdp();

// ---------------------------------------------------------------------------
// Self-check runners (CLI `selfcheck` command).

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

CheckResult check_gradients(std::uint64_t seed = 1);
CheckResult check_contraction();
CheckResult check_weiszfeld(std::uint64_t seed = 1);
CheckResult check_eyemetric(std::uint64_t seed = 1);
CheckResult check_spectral(std::uint64_t seed = 1);

std::vector<CheckResult> run_selfcheck(std::uint64_t seed = 1);

}  // namespace eqrl
