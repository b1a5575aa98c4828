#pragma once

#include <vector>

#include "eqrl/waveform.hpp"

namespace eqrl {

/// Folded eye raster: consecutive 2-UI segments (1 UI apart) of a waveform,
/// each resampled onto a 1 ps grid. Traces are piecewise linear between
/// columns; all mask/area geometry is computed exactly on those segments.
struct EyeGrid {
    int columns = 0;                          // round(2 * t_ui / 1 ps)
    double col_spacing_ps = 1.0;
    double t_ui = 0.0;
    int center_col = 0;                       // grid midpoint
    double center_voltage = 0.0;              // eye center, mV
    std::vector<std::vector<double>> traces;  // [trace][column], mV

    double center_time_ps() const { return center_col * col_spacing_ps; }
};

/// Validity aperture (width x height) centered at the eye center.
struct MaskSpec {
    double width_ps = 35.0;
    double height_mv = 80.0;

    void validate() const {
        if (!(width_ps > 0.0) || !(height_mv > 0.0))
            throw InputError("mask: width and height must be > 0");
    }
};

// Fold a waveform (>= 3 UI span) into an EyeGrid at 1 ps resolution.
EyeGrid fold_eye(const Waveform& w);

// 1 if no trace segment touches the closed mask rectangle, else 0.
int mask_test(const EyeGrid& eye, const MaskSpec& mask);

// Area (mV*ps) of the largest crossing-free axis-aligned rectangle centered
// at the eye center. Candidate half-widths sweep the grid columns; for each,
// the half-height is the largest trace-free symmetric band. 0 if the center
// itself is crossed.
double window_area(const EyeGrid& eye);

// Percentage change 100*(after-before)/before. before == 0 is an error; the
// caller must filter zero-area baselines.
double improvement(double area_before, double area_after);

}  // namespace eqrl
