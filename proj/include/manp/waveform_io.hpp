#pragma once

#include <filesystem>

#include "manp/signal.hpp"

namespace manp {

// Raw waveform files: 32-bit little-endian float samples, one channel, plus a
// JSON sidecar at `<path>.json`:
//   {"format": "f32le", "channels": 1, "sample_rate": 384000.0,
//    "start_time": 0.0, "num_samples": 5729280}

std::filesystem::path sidecar_path(const std::filesystem::path& samples_path);

void write_waveform(const std::filesystem::path& path, const RealSignal& signal);

/// Throws FormatError on a malformed header or when the sample file holds
/// fewer/more samples than the header promises.
RealSignal read_waveform(const std::filesystem::path& path);

/// Rounds every sample to float precision, i.e. what a write/read cycle keeps.
RealSignal quantize_to_float(RealSignal signal);

}  // namespace manp
