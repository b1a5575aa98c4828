#include "eqrl/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "eqrl/signalgen.hpp"
#include "eqrl/vib.hpp"

namespace eqrl {

namespace {

double trace_value(const std::vector<double>& trace, double t_ps, double spacing) {
    const double pos = t_ps / spacing;
    const auto j = std::min(static_cast<std::size_t>(pos), trace.size() - 2);
    const double frac = pos - static_cast<double>(j);
    return trace[j] + frac * (trace[j + 1] - trace[j]);
}

}  // namespace

int mask_test_oracle(const EyeGrid& eye, const MaskSpec& mask, double step_ps) {
    const double tc = eye.center_time_ps();
    const double tl = tc - 0.5 * mask.width_ps;
    const double tr = tc + 0.5 * mask.width_ps;
    const double vl = eye.center_voltage - 0.5 * mask.height_mv;
    const double vh = eye.center_voltage + 0.5 * mask.height_mv;
    const double span = (eye.columns - 1) * eye.col_spacing_ps;
    for (const auto& trace : eye.traces) {
        for (double t = 0.0; t <= span; t += step_ps) {
            if (t < tl || t > tr) continue;
            const double v = trace_value(trace, t, eye.col_spacing_ps);
            if (v >= vl && v <= vh) return 0;
        }
    }
    return 1;
}

double window_area_oracle(const EyeGrid& eye, double step_ps) {
    const double tc = eye.center_time_ps();
    const double span = (eye.columns - 1) * eye.col_spacing_ps;
    const double max_half = std::min(tc, span - tc);

    double best = 0.0;
    double h = std::numeric_limits<double>::infinity();
    for (double hw = step_ps; hw <= max_half; hw += step_ps) {
        // Expanding the window can only lower the clearance; fold in the two
        // newly exposed bands of supersampled points.
        for (const auto& trace : eye.traces) {
            for (double t = tc - hw; t < tc - hw + step_ps; t += step_ps) {
                if (t >= 0.0)
                    h = std::min(h, std::abs(trace_value(trace, t, eye.col_spacing_ps) -
                                             eye.center_voltage));
            }
            for (double t = tc + hw; t > tc + hw - step_ps; t -= step_ps) {
                if (t <= span)
                    h = std::min(h, std::abs(trace_value(trace, t, eye.col_spacing_ps) -
                                             eye.center_voltage));
            }
        }
        if (h <= 0.0) break;
        best = std::max(best, 2.0 * hw * 2.0 * h);
    }
    return best;
}

double weiszfeld_grid_oracle(const std::vector<std::vector<double>>& points_2d, double step) {
    if (points_2d.empty()) throw InputError("weiszfeld_grid_oracle: empty set");
    double x_lo = points_2d[0][0], x_hi = x_lo, y_lo = points_2d[0][1], y_hi = y_lo;
    for (const auto& p : points_2d) {
        x_lo = std::min(x_lo, p[0]);
        x_hi = std::max(x_hi, p[0]);
        y_lo = std::min(y_lo, p[1]);
        y_hi = std::max(y_hi, p[1]);
    }
    auto objective = [&](double x, double y) {
        double acc = 0.0;
        for (const auto& p : points_2d) acc += std::hypot(p[0] - x, p[1] - y);
        return acc;
    };
    double best = std::numeric_limits<double>::infinity();
    for (double x = x_lo; x <= x_hi + 0.5 * step; x += step) {
        for (double y = y_lo; y <= y_hi + 0.5 * step; y += step) {
            best = std::min(best, objective(x, y));
        }
    }
    for (const auto& p : points_2d) best = std::min(best, objective(p[0], p[1]));
    return best;
}

GradCheckReport finite_difference_check(Mlp& net, const std::function<double(const Mlp&)>& loss,
                                        const std::vector<double>& analytic_flat, double h,
                                        std::size_t check_stride) {
    auto params = net.flat_params();
    if (params.size() != analytic_flat.size())
        throw InputError("finite_difference_check: gradient size mismatch");

    double g_max = 0.0;
    for (double g : analytic_flat) g_max = std::max(g_max, std::abs(g));
    const double floor = 1e-6 * std::max(1.0, g_max);

    GradCheckReport report;
    for (std::size_t i = 0; i < params.size(); i += check_stride) {
        const double saved = params[i];
        params[i] = saved + h;
        net.set_flat_params(params);
        const double f_plus = loss(net);
        params[i] = saved - h;
        net.set_flat_params(params);
        const double f_minus = loss(net);
        params[i] = saved;

        const double fd = (f_plus - f_minus) / (2.0 * h);
        const double rel =
            std::abs(fd - analytic_flat[i]) / std::max({std::abs(fd), std::abs(analytic_flat[i]), floor});
        report.max_rel_error = std::max(report.max_rel_error, rel);
        report.params_checked += 1;
    }
    net.set_flat_params(params);
    return report;
}

double operator_norm_probe(const DenseLayer& layer, int n_vectors, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < n_vectors; ++k) {
        std::vector<double> v(static_cast<std::size_t>(layer.in));
        double vn = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            vn += x * x;
        }
        vn = std::sqrt(vn);
        double wn = 0.0;
        for (int o = 0; o < layer.out; ++o) {
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            double acc = 0.0;
            for (int i = 0; i < layer.in; ++i) acc += row[i] * v[static_cast<std::size_t>(i)];
            wn += acc * acc;
        }
        worst = std::max(worst, std::sqrt(wn) / vn);
    }
    return worst;
}

TabularMdp make_contraction_demo_mdp() {
    // Two states, two actions, Bernoulli rewards in [-1, 1], deterministic
    // transitions and policy. The return distributions stay rich while the
    // quantile projection keeps atom orderings stable, so the W1 contraction
    // is exactly gamma per step.
    TabularMdp mdp;
    mdp.n_states = 2;
    mdp.n_actions = 2;
    mdp.transitions = {
        {{{1, 1.0}}, {{0, 1.0}}},
        {{{0, 1.0}}, {{1, 1.0}}},
    };
    mdp.rewards = {
        {{{1.0, 0.8}, {-1.0, 0.2}}, {{0.5, 1.0}}},
        {{{-1.0, 0.5}, {1.0, 0.5}}, {{0.25, 1.0}}},
    };
    mdp.policy = {{1.0, 0.0}, {0.0, 1.0}};
    return mdp;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

CheckResult check_gradients(std::uint64_t seed) {
    CheckResult res{"gradients", true, ""};
    double worst = 0.0;

    // Miniature nets covering every activation/dropout combination in the
    // repo; full-size nets are spot-checked through the composite losses.
    for (int trial = 0; trial < 3; ++trial) {
        Mlp net({{5, 7, Activation::Relu, 0.3, false},
                 {7, 6, Activation::Sigmoid, 0.0, false},
                 {6, 4, Activation::Identity, 0.0, false}},
                derive_seed(seed, 100 + static_cast<std::uint64_t>(trial)));
        Rng rng(derive_seed(seed, 200 + static_cast<std::uint64_t>(trial)));
        std::vector<double> x(5), target(4);
        for (auto& v : x) v = rng.normal();
        for (auto& v : target) v = rng.normal();
        const std::uint64_t mask_seed = derive_seed(seed, 300 + static_cast<std::uint64_t>(trial));

        auto loss = [&](const Mlp& n) {
            const auto out = forward(n, x, ForwardMode::Train, mask_seed);
            double acc = 0.0;
            for (std::size_t i = 0; i < out.size(); ++i)
                acc += (out[i] - target[i]) * (out[i] - target[i]);
            return 0.5 * acc;
        };

        ForwardCache cache;
        const auto out = forward(net, x, ForwardMode::Train, mask_seed, &cache);
        std::vector<double> upstream(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) upstream[i] = out[i] - target[i];
        const auto grads = backward(net, cache, upstream);

        const auto report = finite_difference_check(net, loss, grads.flat());
        worst = std::max(worst, report.max_rel_error);
    }

    res.pass = worst < 1e-4;
    res.detail = "max relative error " + format_double(worst) + " (tolerance 1e-4)";
    return res;
}

CheckResult check_contraction() {
    CheckResult res{"contraction", true, ""};
    const auto mdp = make_contraction_demo_mdp();
    const double gamma = 0.98;
    const auto report = bellman_contraction_harness(mdp, gamma, 200, 51, 10000);

    double worst_ratio = 0.0;
    for (double r : report.ratios) worst_ratio = std::max(worst_ratio, r);
    double worst_dev = 0.0;
    for (std::size_t k = 0; k < report.w1.size(); ++k) {
        if (report.w1[k] <= 1e-12) break;
        const double ideal = report.w1[0] * std::pow(gamma, static_cast<double>(k));
        worst_dev = std::max(worst_dev, std::abs(std::log10(report.w1[k]) - std::log10(ideal)));
    }
    res.pass = worst_ratio <= gamma + 0.02 && worst_dev <= 2.0;
    res.detail = "worst per-step factor " + format_double(worst_ratio) + " (bound " +
                 format_double(gamma + 0.02) + "), log10 deviation from gamma^k line " +
                 format_double(worst_dev);
    return res;
}

CheckResult check_weiszfeld(std::uint64_t seed) {
    CheckResult res{"weiszfeld", true, ""};
    Rng rng(derive_seed(seed, 0x77656973));
    double worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int n = 3 + static_cast<int>(rng.below(5));  // 3..7 points
        std::vector<std::vector<double>> pts(static_cast<std::size_t>(n));
        for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
        const auto anchor = weiszfeld_anchor(pts, 1e-6, 1000);
        const double obj = weiszfeld_objective(pts, anchor.c);
        const double oracle = weiszfeld_grid_oracle(pts, 1e-3);
        worst = std::max(worst, std::abs(obj - oracle));
    }
    res.pass = worst <= 1e-4;
    res.detail = "worst |objective - grid oracle| = " + format_double(worst) + " (tolerance 1e-4)";
    return res;
}

CheckResult check_eyemetric(std::uint64_t seed) {
    CheckResult res{"eyemetric", true, ""};
    ChannelModel model;
    model.isi_taps = {1.0, 0.2, 0.05};
    model.noise_std = 5.0;
    model.swing = 400.0;
    model.rise_fraction = 0.1;
    model.seed = 99;

    double worst_rel = 0.0;
    int mask_mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        const auto pair = generate_waveform(model, 1000, derive_seed(seed, static_cast<std::uint64_t>(i)));
        const auto eye = fold_eye(pair.output);
        const double area = window_area(eye);
        const double oracle = window_area_oracle(eye);
        const double rel = std::abs(area - oracle) / std::max(oracle, 1e-9);
        worst_rel = std::max(worst_rel, rel);
        if (mask_test(eye, MaskSpec{}) != mask_test_oracle(eye, MaskSpec{})) mask_mismatches += 1;
    }
    res.pass = worst_rel <= 0.02 && mask_mismatches == 0;
    res.detail = "worst area deviation " + format_double(100.0 * worst_rel) + "% (tolerance 2%), " +
                 std::to_string(mask_mismatches) + " mask mismatches";
    return res;
}

CheckResult check_spectral(std::uint64_t seed) {
    CheckResult res{"spectral", true, ""};
    Mlp net({{16, 12, Activation::Relu, 0.0, true}, {12, 8, Activation::Relu, 0.0, true},
             {8, 4, Activation::Identity, 0.0, false}},
            derive_seed(seed, 0x7370));
    for (auto& layer : net.layers) {
        for (auto& w : layer.w) w *= 3.0;  // start well above unit norm
    }
    for (int it = 0; it < 25; ++it) spectral_normalize_flagged(net, 1);

    double worst = 0.0;
    for (const auto& layer : net.layers) {
        if (!layer.spectral_norm) continue;
        worst = std::max(worst, operator_norm_probe(layer, 100, derive_seed(seed, 0x70726f62)));
    }
    res.pass = worst <= 1.001;
    res.detail = "worst probed operator norm " + format_double(worst) + " (bound 1.001)";
    return res;
}

std::vector<CheckResult> run_selfcheck(std::uint64_t seed) {
    return {check_gradients(seed), check_contraction(), check_weiszfeld(seed),
            check_eyemetric(seed), check_spectral(seed)};
}

}  // namespace eqrl
