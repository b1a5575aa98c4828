#include "eqrl/eyemetric.hpp"

#include <algorithm>
#include <cmath>

namespace eqrl {

EyeGrid fold_eye(const Waveform& w) {
    w.validate();
    const double span = w.span_ps();
    if (span < 3.0 * w.t_ui) throw InputError("fold_eye: waveform must span at least 3 UI");

    EyeGrid eye;
    eye.t_ui = w.t_ui;
    eye.col_spacing_ps = 1.0;
    eye.columns = static_cast<int>(std::lround(2.0 * w.t_ui / eye.col_spacing_ps));
    eye.center_col = (eye.columns - 1) / 2;
    eye.center_voltage = 0.0;

    const double seg_width = (eye.columns - 1) * eye.col_spacing_ps;
    // Segments start at half-UI offsets so the grid midpoint falls on a UI
    // center (open eye) and the crossing X sits a half UI to either side.
    // Only segments fully inside the span are kept.
    const double phase = 0.5 * w.t_ui;
    const auto n_seg =
        static_cast<std::size_t>(std::floor((span - seg_width - phase) / w.t_ui)) + 1;
    eye.traces.reserve(n_seg);
    for (std::size_t k = 0; k < n_seg; ++k) {
        const double t0 = phase + static_cast<double>(k) * w.t_ui;
        std::vector<double> trace(static_cast<std::size_t>(eye.columns));
        for (int j = 0; j < eye.columns; ++j) {
            trace[static_cast<std::size_t>(j)] = w.value_at(t0 + j * eye.col_spacing_ps);
        }
        eye.traces.push_back(std::move(trace));
    }
    return eye;
}

namespace {

// Does the segment (t0,v0)-(t1,v1) touch the closed rectangle
// [tl,tr] x [vl,vh]? Voltage is linear in t, so after clipping the segment to
// the time range its voltage range is the interval between the clipped ends.
bool segment_hits_rect(double t0, double v0, double t1, double v1, double tl, double tr,
                       double vl, double vh) {
    const double ta = std::max(t0, tl);
    const double tb = std::min(t1, tr);
    if (ta > tb) return false;
    const double dt = t1 - t0;
    const double va = dt == 0.0 ? v0 : v0 + (v1 - v0) * (ta - t0) / dt;
    const double vb = dt == 0.0 ? v1 : v0 + (v1 - v0) * (tb - t0) / dt;
    const double lo = std::min(va, vb);
    const double hi = std::max(va, vb);
    return hi >= vl && lo <= vh;
}

}  // namespace

int mask_test(const EyeGrid& eye, const MaskSpec& mask) {
    mask.validate();
    const double tc = eye.center_time_ps();
    const double tl = tc - 0.5 * mask.width_ps;
    const double tr = tc + 0.5 * mask.width_ps;
    if (tl < 0.0 || tr > (eye.columns - 1) * eye.col_spacing_ps)
        throw InputError("mask_test: mask wider than the eye grid");
    const double vl = eye.center_voltage - 0.5 * mask.height_mv;
    const double vh = eye.center_voltage + 0.5 * mask.height_mv;

    for (const auto& trace : eye.traces) {
        for (int j = 0; j + 1 < eye.columns; ++j) {
            const double t0 = j * eye.col_spacing_ps;
            const double t1 = t0 + eye.col_spacing_ps;
            if (t1 < tl || t0 > tr) continue;
            if (segment_hits_rect(t0, trace[static_cast<std::size_t>(j)], t1,
                                  trace[static_cast<std::size_t>(j) + 1], tl, tr, vl, vh))
                return 0;
        }
    }
    return 1;
}

double window_area(const EyeGrid& eye) {
    const int c = eye.center_col;
    const int reach = std::min(c, eye.columns - 1 - c);
    double best = 0.0;
    for (int k = 1; k <= reach; ++k) {
        // Largest trace-free symmetric half-height for half-width k columns.
        // A segment crossing 0 inside the window pins the height to zero.
        double h = std::numeric_limits<double>::infinity();
        for (const auto& trace : eye.traces) {
            for (int j = c - k; j < c + k && h > 0.0; ++j) {
                const double a = trace[static_cast<std::size_t>(j)] - eye.center_voltage;
                const double b = trace[static_cast<std::size_t>(j) + 1] - eye.center_voltage;
                if ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0)) {
                    h = 0.0;
                    break;
                }
                h = std::min(h, std::min(std::abs(a), std::abs(b)));
            }
            if (h == 0.0) break;
        }
        if (h == 0.0) break;  // windows only grow, the crossing stays inside
        best = std::max(best, (2.0 * k * eye.col_spacing_ps) * (2.0 * h));
    }
    return best;
}

double improvement(double area_before, double area_after) {
    if (!(area_before > 0.0))
        throw InputError("improvement: undefined for zero-area baseline");
    return 100.0 * (area_after - area_before) / area_before;
}

}  // namespace eqrl
