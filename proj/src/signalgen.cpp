#include "eqrl/signalgen.hpp"

#include <cmath>

#include "eqrl/rng.hpp"
#include "eqrl/threading.hpp"

namespace eqrl {

namespace {

constexpr std::uint64_t kPhaseStream = 0x70726273;  // "prbs"
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;  // "nois"

// Trapezoidal reconstruction of UI-spaced levels: each UI starts with a
// linear transition of rise_fraction*t_ui from the previous level, then holds.
double trapezoid_at(const std::vector<double>& levels, double t_ps, double t_ui,
                    double rise_fraction) {
    const double pos = t_ps / t_ui;
    auto k = static_cast<std::size_t>(pos);
    if (k >= levels.size()) k = levels.size() - 1;
    const double cur = levels[k];
    if (rise_fraction <= 0.0 || k == 0) return cur;
    const double frac = pos - static_cast<double>(k);
    if (frac >= rise_fraction) return cur;
    const double prev = levels[k - 1];
    return prev + (cur - prev) * (frac / rise_fraction);
}

}  // namespace

std::vector<int> prbs7_symbols(std::size_t count, unsigned phase_offset) {
    unsigned state = 0x7F;  // 7 bits, all ones
    auto step = [&state]() -> int {
        const int out = (state >> 6) & 1;
        const unsigned fb = ((state >> 6) ^ (state >> 5)) & 1;
        state = ((state << 1) | fb) & 0x7F;
        return out;
    };
    for (unsigned i = 0; i < phase_offset % 127; ++i) step();
    std::vector<int> symbols(count);
    for (auto& s : symbols) s = step() ? 1 : -1;
    return symbols;
}

unsigned prbs_phase_for_seed(std::uint64_t seed) {
    return static_cast<unsigned>(derive_seed(seed, kPhaseStream) % 127);
}

LabeledPair generate_waveform(const ChannelModel& model, std::size_t n_x, std::uint64_t seed,
                              double dt_ps, double t_ui_ps) {
    model.validate();
    const double samples_per_ui = t_ui_ps / dt_ps;
    if (static_cast<double>(n_x) < 4.0 * samples_per_ui)
        throw ConfigError("generate_waveform: n_x shorter than 4 UI");

    const double span = (static_cast<double>(n_x) - 1.0) * dt_ps;
    const std::size_t n_symbols =
        static_cast<std::size_t>(std::floor(span / t_ui_ps)) + 1 + model.isi_taps.size();

    const std::uint64_t record_seed = derive_seed(model.seed, seed);
    const auto symbols = prbs7_symbols(n_symbols, prbs_phase_for_seed(record_seed));

    // UI-spaced FIR over the symbol stream; pre-start history is zero.
    std::vector<double> ideal(n_symbols), filtered(n_symbols);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        ideal[k] = static_cast<double>(symbols[k]);
        double acc = 0.0;
        for (std::size_t j = 0; j < model.isi_taps.size() && j <= k; ++j)
            acc += model.isi_taps[j] * static_cast<double>(symbols[k - j]);
        filtered[k] = acc;
    }

    Rng noise(derive_seed(record_seed, kNoiseStream));
    LabeledPair pair;
    pair.input.dt = pair.output.dt = dt_ps;
    pair.input.t_ui = pair.output.t_ui = t_ui_ps;
    pair.input.samples.resize(n_x);
    pair.output.samples.resize(n_x);
    for (std::size_t i = 0; i < n_x; ++i) {
        const double t = static_cast<double>(i) * dt_ps;
        pair.input.samples[i] =
            static_cast<float>(model.swing * trapezoid_at(ideal, t, t_ui_ps, model.rise_fraction));
        double out = model.swing * trapezoid_at(filtered, t, t_ui_ps, model.rise_fraction);
        if (model.noise_std > 0.0) out += model.noise_std * noise.normal();
        pair.output.samples[i] = static_cast<float>(out);
    }
    pair.label = 0;
    return pair;
}

std::vector<Waveform> extract_windows(const Waveform& w, std::size_t n_x, std::size_t stride) {
    w.validate();
    if (n_x == 0 || stride == 0) throw InputError("extract_windows: n_x and stride must be >= 1");
    if (w.samples.size() < n_x) throw InputError("extract_windows: waveform shorter than window");
    const std::size_t count = (w.samples.size() - n_x) / stride + 1;
    std::vector<Waveform> windows;
    windows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Waveform win;
        win.dt = w.dt;
        win.t_ui = w.t_ui;
        const std::size_t off = i * stride;
        win.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(off),
                           w.samples.begin() + static_cast<std::ptrdiff_t>(off + n_x));
        windows.push_back(std::move(win));
    }
    return windows;
}

Dataset generate_dataset(const ChannelModel& model, std::size_t count, std::size_t n_x,
                         std::size_t window_stride, std::uint64_t base_seed, const MaskSpec& mask,
                         int threads, double dt_ps, double t_ui_ps) {
    model.validate();
    if (count < 1) throw ConfigError("generate_dataset: count must be >= 1");

    Dataset ds;
    ds.n_x = static_cast<std::uint32_t>(n_x);
    ds.dt_ps = dt_ps;
    ds.t_ui_ps = t_ui_ps;
    ds.records.resize(count);

    if (window_stride == 0) {
        parallel_for(count, threads, [&](std::size_t i) {
            ds.records[i] = generate_waveform(model, n_x, base_seed + i, dt_ps, t_ui_ps);
        });
    } else {
        const std::size_t long_len = n_x + (count - 1) * window_stride;
        const LabeledPair source = generate_waveform(model, long_len, base_seed, dt_ps, t_ui_ps);
        auto in_windows = extract_windows(source.input, n_x, window_stride);
        auto out_windows = extract_windows(source.output, n_x, window_stride);
        for (std::size_t i = 0; i < count; ++i) {
            ds.records[i].input = std::move(in_windows[i]);
            ds.records[i].output = std::move(out_windows[i]);
        }
    }
    label_dataset(ds, mask, threads);
    return ds;
}

std::size_t label_dataset(Dataset& ds, const MaskSpec& mask, int threads) {
    parallel_for(ds.records.size(), threads, [&](std::size_t i) {
        auto& rec = ds.records[i];
        rec.label = static_cast<std::uint8_t>(mask_test(fold_eye(rec.output), mask));
    });
    std::size_t valid = 0;
    for (const auto& rec : ds.records) valid += rec.label;
    return valid;
}

}  // namespace eqrl
