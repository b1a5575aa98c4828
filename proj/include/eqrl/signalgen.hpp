#pragma once

#include <cstdint>
#include <vector>

#include "eqrl/eyemetric.hpp"
#include "eqrl/waveform.hpp"

namespace eqrl {

// PRBS-7 symbol stream (+1/-1), polynomial x^7 + x^6 + 1, all-ones initial
// state, MSB out. phase_offset rotates the start within the 127-bit period.
std::vector<int> prbs7_symbols(std::size_t count, unsigned phase_offset = 0);

// PRBS phase used by generate_waveform for a given record seed.
unsigned prbs_phase_for_seed(std::uint64_t seed);

/// One synthetic record: ideal driver trapezoid as input, ISI-filtered and
/// noise-corrupted reconstruction as output. Label is left unset (0); the
/// eye-mask test assigns it. Deterministic in (model, n_x, seed, time base).
LabeledPair generate_waveform(const ChannelModel& model, std::size_t n_x, std::uint64_t seed,
                              double dt_ps = 10.0, double t_ui_ps = 156.3);

// Overlapping windows of length n_x at the given sample stride.
// Window count = floor((len - n_x)/stride) + 1.
std::vector<Waveform> extract_windows(const Waveform& w, std::size_t n_x, std::size_t stride);

/// Labeled dataset. stride == 0: `count` independent records, record i seeded
/// with base_seed + i. stride >= 1: one long trace of length
/// n_x + (count-1)*stride seeded with base_seed, cut into `count` overlapping
/// windows (the single-sample-stride acquisition analogue).
Dataset generate_dataset(const ChannelModel& model, std::size_t count, std::size_t n_x,
                         std::size_t window_stride, std::uint64_t base_seed,
                         const MaskSpec& mask = MaskSpec{}, int threads = 0,
                         double dt_ps = 10.0, double t_ui_ps = 156.3);

// Re-run the mask test over all records in place; returns the valid count.
std::size_t label_dataset(Dataset& ds, const MaskSpec& mask = MaskSpec{}, int threads = 0);

}  // namespace eqrl
