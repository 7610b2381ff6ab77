#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "manp/signal.hpp"

namespace manp {

enum class Direction { Forward, Inverse };

/// Unitary DFT (1/sqrt(N) in both directions). The length must be a power of two.
std::vector<cdouble> dft(std::span<const cdouble> block, Direction direction);

struct FirFilter {
    std::vector<double> taps;

    /// Group delay in samples, (len - 1) / 2 for the symmetric designs below.
    double group_delay() const noexcept { return taps.empty() ? 0.0 : (static_cast<double>(taps.size()) - 1.0) / 2.0; }
    double dc_gain() const noexcept;
};

/// Kaiser-windowed sinc lowpass, normalized to unit DC gain.
FirFilter design_lowpass(std::size_t num_taps, double cutoff_hz, double sample_rate, double stopband_db = 60.0);

/// Kaiser-windowed sinc bandpass, normalized to unit gain at the band centre.
FirFilter design_bandpass(std::size_t num_taps, double low_hz, double high_hz, double sample_rate,
                          double stopband_db = 60.0);

/// Linear convolution, output the same length as the input. The integer part of
/// the group delay is removed by shifting samples; a fractional remainder (even
/// tap counts) moves start_time back by that fraction of a sample.
RealSignal fir_filter(const RealSignal& signal, const FirFilter& filter);

struct ResampleDesign {
    std::size_t num_taps = 127;
    double cutoff_fraction = 0.45;  ///< of the lower of the two rates
    double stopband_db = 60.0;
    std::size_t max_factor = 256;   ///< largest accepted numerator/denominator
};

/// Rational-ratio polyphase resampler. Upsampling always interpolates through
/// the lowpass; downsampling filters first only when `anti_alias` is set.
RealSignal resample(const RealSignal& signal, double target_rate, bool anti_alias, const ResampleDesign& design = {});

struct Correlation {
    std::vector<double> values;   ///< values[i] belongs to lag first_lag + i
    std::ptrdiff_t first_lag = 0;
    std::ptrdiff_t peak_lag = 0;  ///< lag of the largest |value|
    double peak = 0.0;            ///< signed value at peak_lag
};

/// Cross-correlation c[l] = sum_n a[n] b[n - l] / (|a| |b|), so a copy of b
/// delayed by d samples inside a peaks at lag d.
Correlation cross_correlate(const RealSignal& a, const RealSignal& b);

double mean_power(std::span<const double> x) noexcept;
double energy(std::span<const double> x) noexcept;

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace manp
