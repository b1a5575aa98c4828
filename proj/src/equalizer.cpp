#include "eqrl/equalizer.hpp"

#include <cmath>

namespace eqrl {

std::string to_string(EqKind kind) { return kind == EqKind::Dfe ? "dfe" : "ctle-dfe"; }

EqKind eq_kind_from_string(const std::string& s) {
    if (s == "dfe") return EqKind::Dfe;
    if (s == "ctle-dfe" || s == "ctle_dfe") return EqKind::CtleDfe;
    throw ConfigError("unknown equalizer kind: " + s);
}

std::vector<std::pair<double, double>> EqRanges::for_kind(EqKind kind) const {
    std::vector<std::pair<double, double>> out;
    if (kind == EqKind::CtleDfe) {
        out.push_back(gdc);
        out.push_back(fz);
        out.push_back(fp);
        out.push_back(gp);
    }
    for (int i = 0; i < 4; ++i) out.push_back(tap);
    return out;
}

void EqualizerParams::validate() const {
    const auto d = static_cast<std::size_t>(param_dim(kind));
    if (values.size() != d) throw InputError("equalizer params: dimension does not match kind");
    if (ranges.size() != d) throw InputError("equalizer params: ranges do not match kind");
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) throw InputError("equalizer params: values must lie in [0,1]");
    }
    for (const auto& [lo, hi] : ranges) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw InputError("equalizer params: ranges must be finite with min < max");
    }
}

EqualizerParams make_params(EqKind kind, std::vector<double> normalized, const EqRanges& ranges) {
    EqualizerParams p;
    p.kind = kind;
    p.values = std::move(normalized);
    p.ranges = ranges.for_kind(kind);
    p.validate();
    return p;
}

std::vector<double> denormalize(const EqualizerParams& p) {
    p.validate();
    std::vector<double> phys(p.values.size());
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        const auto& [lo, hi] = p.ranges[i];
        phys[i] = lo + p.values[i] * (hi - lo);
    }
    return phys;
}

namespace {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

Waveform apply_dfe(const Waveform& w, const std::array<double, 4>& taps_mv) {
    w.validate();
    const double span = w.span_ps();
    if (span < 5.0 * w.t_ui) throw InputError("apply_dfe: waveform must span at least 5 UI");

    // Corrections exist for every UI touching the span; each one only needs
    // the decisions of earlier UIs, so trailing partial UIs are still covered.
    const auto n_ui = static_cast<std::size_t>(std::floor(span / w.t_ui)) + 1;
    std::vector<double> corrected(n_ui, 0.0);   // s_e[n]
    std::vector<double> correction(n_ui, 0.0);  // sum_i t_i * sgn(s_e[n-i])
    for (std::size_t n = 0; n < n_ui; ++n) {
        double corr = 0.0;
        for (std::size_t i = 1; i <= 4; ++i) {
            if (n >= i) corr += taps_mv[i - 1] * sgn(corrected[n - i]);
        }
        correction[n] = corr;
        const double center = (static_cast<double>(n) + 0.5) * w.t_ui;
        corrected[n] = (center <= span ? w.value_at(center) : 0.0) + corr;
    }

    Waveform out;
    out.dt = w.dt;
    out.t_ui = w.t_ui;
    out.samples.resize(w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        auto ui = static_cast<std::size_t>(static_cast<double>(i) * w.dt / w.t_ui);
        if (ui >= n_ui) ui = n_ui - 1;
        out.samples[i] = static_cast<float>(static_cast<double>(w.samples[i]) + correction[ui]);
    }
    return out;
}

std::array<double, 3> ctle_coefficients(double gdc, double fz_ghz, double fp_ghz, double gp,
                                        double dt_ps) {
    if (!(fz_ghz > 0.0) || !(fp_ghz > 0.0))
        throw InputError("apply_ctle: frequencies must be positive");
    // s <- (2/T)(1-z^-1)/(1+z^-1) with T = dt in seconds, w = 2*pi*f.
    // a_z = 2*gp/(w_z*T), a_p = 2/(w_p*T); with f in GHz and dt in ps the
    // products reduce to 1000/(pi*f*dt).
    const double az = gp * 1000.0 / (M_PI * fz_ghz * dt_ps);
    const double ap = 1000.0 / (M_PI * fp_ghz * dt_ps);
    const double b0 = gdc * (1.0 + az) / (1.0 + ap);
    const double b1 = gdc * (1.0 - az) / (1.0 + ap);
    const double a1 = (1.0 - ap) / (1.0 + ap);
    return {b0, b1, a1};
}

Waveform apply_ctle(const Waveform& w, double gdc, double fz_ghz, double fp_ghz, double gp) {
    w.validate();
    const auto [b0, b1, a1] = ctle_coefficients(gdc, fz_ghz, fp_ghz, gp, w.dt);

    Waveform out;
    out.dt = w.dt;
    out.t_ui = w.t_ui;
    out.samples.resize(w.samples.size());
    double x_prev = 0.0, y_prev = 0.0;
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        const double x = static_cast<double>(w.samples[i]);
        const double y = b0 * x + b1 * x_prev - a1 * y_prev;
        out.samples[i] = static_cast<float>(y);
        x_prev = x;
        y_prev = y;
    }
    return out;
}

Waveform apply(const Waveform& w, const EqualizerParams& p) {
    const auto phys = denormalize(p);
    if (p.kind == EqKind::Dfe) {
        return apply_dfe(w, {phys[0], phys[1], phys[2], phys[3]});
    }
    const Waveform mid = apply_ctle(w, phys[0], phys[1], phys[2], phys[3]);
    return apply_dfe(mid, {phys[4], phys[5], phys[6], phys[7]});
}

}  // namespace eqrl
