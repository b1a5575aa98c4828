#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "eqrl/errors.hpp"

namespace eqrl {

/// Uniformly sampled voltage trace. Samples are stored as f32 (matching the
/// dataset file format); all signal processing is done in double and rounded
/// once on write-back.
struct Waveform {
    std::vector<float> samples;  // mV
    double dt = 10.0;            // sample interval, ps
    double t_ui = 156.3;         // unit interval, ps

    std::size_t size() const { return samples.size(); }

    // Interpolable time span, ps.
    double span_ps() const { return samples.empty() ? 0.0 : (static_cast<double>(samples.size()) - 1.0) * dt; }

    // Linear interpolation at t (ps), clamped to the sampled span.
    double value_at(double t_ps) const {
        if (samples.empty()) throw InputError("value_at: empty waveform");
        if (t_ps <= 0.0) return samples.front();
        const double pos = t_ps / dt;
        const auto idx = static_cast<std::size_t>(pos);
        if (idx + 1 >= samples.size()) return samples.back();
        const double frac = pos - static_cast<double>(idx);
        return static_cast<double>(samples[idx]) +
               frac * (static_cast<double>(samples[idx + 1]) - static_cast<double>(samples[idx]));
    }

    void validate() const {
        if (samples.empty()) throw InputError("waveform: no samples");
        if (!(dt > 0.0)) throw InputError("waveform: dt must be > 0");
        if (!(t_ui > dt)) throw InputError("waveform: t_ui must exceed dt");
        for (float v : samples) {
            if (!std::isfinite(v)) throw InputError("waveform: non-finite sample");
        }
    }
};

/// Synthetic channel: UI-spaced impulse response, AWGN, driver swing and
/// transition time. Stands in for the measured interconnect.
struct ChannelModel {
    std::vector<double> isi_taps{1.0};  // tap0 must be 1.0
    double noise_std = 0.0;             // mV
    double swing = 400.0;               // mV
    double rise_fraction = 0.0;         // transition time as fraction of UI
    std::uint64_t seed = 1;             // unit identity

    void validate() const {
        if (isi_taps.empty() || isi_taps[0] != 1.0)
            throw ConfigError("channel: isi_taps[0] must be 1.0");
        for (std::size_t k = 1; k < isi_taps.size(); ++k) {
            if (std::abs(isi_taps[k]) > 1.0)
                throw ConfigError("channel: |isi_taps[k]| must be <= 1 for k >= 1");
        }
        if (!(noise_std >= 0.0)) throw ConfigError("channel: noise_std must be >= 0");
        if (!(rise_fraction >= 0.0 && rise_fraction < 0.5))
            throw ConfigError("channel: rise_fraction must be in [0, 0.5)");
        if (!(swing > 0.0)) throw ConfigError("channel: swing must be > 0");
    }
};

/// Input/output waveform pair with a binary validity label.
struct LabeledPair {
    Waveform input;
    Waveform output;
    std::uint8_t label = 0;

    void validate() const {
        input.validate();
        output.validate();
        if (input.samples.size() != output.samples.size() || input.dt != output.dt ||
            input.t_ui != output.t_ui)
            throw InputError("labeled pair: input and output must share dt, t_ui and length");
        if (label > 1) throw InputError("labeled pair: label must be 0 or 1");
    }
};

/// In-memory dataset plus the JSON manifest text written alongside the file.
struct Dataset {
    std::uint32_t n_x = 0;
    double dt_ps = 10.0;    // stored as f32 in the file
    double t_ui_ps = 156.3; // stored as f32 in the file
    std::vector<LabeledPair> records;
    std::string manifest_json;  // sidecar content; empty = none
};

// Little-endian binary format:
//   magic "EQWF", version u16 = 1, n_x u32, dt_ps f32, t_ui_ps f32, count u64,
//   then count x { label u8, input f32[n_x], output f32[n_x] }.
// A JSON manifest sidecar is written to path + ".json" when present.
void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace eqrl
