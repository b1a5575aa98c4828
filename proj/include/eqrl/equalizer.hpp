#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "eqrl/waveform.hpp"

namespace eqrl {

enum class EqKind { Dfe, CtleDfe };

inline int param_dim(EqKind kind) { return kind == EqKind::Dfe ? 4 : 8; }
std::string to_string(EqKind kind);
EqKind eq_kind_from_string(const std::string& s);

/// Physical (min, max) per normalized parameter. DFE taps in mV; CTLE order
/// is G_dc, f_z (GHz), f_p (GHz), G_p followed by the four taps.
struct EqRanges {
    std::pair<double, double> tap{-50.0, 50.0};
    std::pair<double, double> gdc{0.5, 1.2};
    std::pair<double, double> fz{0.5, 2.0};
    std::pair<double, double> fp{2.0, 8.0};
    std::pair<double, double> gp{0.5, 4.0};

    std::vector<std::pair<double, double>> for_kind(EqKind kind) const;
};

/// Normalized parameter vector in [0,1]^d plus its physical mapping.
struct EqualizerParams {
    std::vector<double> values;  // [0,1]^d
    EqKind kind = EqKind::Dfe;
    std::vector<std::pair<double, double>> ranges;

    void validate() const;
};

EqualizerParams make_params(EqKind kind, std::vector<double> normalized, const EqRanges& ranges);

// Elementwise affine map min + v*(max-min).
std::vector<double> denormalize(const EqualizerParams& p);

// Symbol-rate DFE: decisions at UI centers, correction sum of tap * sgn of the
// four previous corrected decisions, applied as a constant over each UI.
Waveform apply_dfe(const Waveform& w, const std::array<double, 4>& taps_mv);

// First-order CTLE H(s) = gdc*(1 + gp*s/wz)/(1 + s/wp) discretized by the
// bilinear transform at the waveform sample rate; state zero-initialized.
Waveform apply_ctle(const Waveform& w, double gdc, double fz_ghz, double fp_ghz, double gp);

// Bilinear-transform IIR coefficients for apply_ctle (b0, b1, a1).
std::array<double, 3> ctle_coefficients(double gdc, double fz_ghz, double fp_ghz, double gp,
                                        double dt_ps);

Waveform apply(const Waveform& w, const EqualizerParams& p);

}  // namespace eqrl
