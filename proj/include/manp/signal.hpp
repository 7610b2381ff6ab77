#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "manp/errors.hpp"

namespace manp {

using cdouble = std::complex<double>;

/// A uniformly sampled waveform. Amplitudes are normalized to transducer full
/// scale; `start_time` is the frame time of the first sample and is carried
/// through every processing stage so outputs stay aligned to the frame timeline.
template <typename T>
struct Signal {
    std::vector<T> samples;
    double sample_rate = 0.0;
    double start_time = 0.0;

    Signal() = default;
    Signal(std::vector<T> s, double rate, double t0 = 0.0) : samples(std::move(s)), sample_rate(rate), start_time(t0) {}

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    double duration() const noexcept { return static_cast<double>(samples.size()) / sample_rate; }

    /// Frame time of sample k.
    double time_of(double k) const noexcept { return start_time + k / sample_rate; }

    /// Nearest sample index for frame time t (may fall outside the signal).
    std::ptrdiff_t index_of(double t) const noexcept
    {
        return static_cast<std::ptrdiff_t>(std::llround((t - start_time) * sample_rate));
    }
};

using RealSignal = Signal<double>;
using ComplexSignal = Signal<cdouble>;

inline bool is_finite(double v) noexcept { return std::isfinite(v); }
inline bool is_finite(const cdouble& v) noexcept { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

/// Throws InvalidArgument if the rate is not positive or any sample is NaN/Inf.
template <typename T>
void check_signal(const Signal<T>& s, const char* where)
{
    if (!(s.sample_rate > 0.0) || !std::isfinite(s.sample_rate))
        throw InvalidArgument(std::string(where) + ": sample_rate must be positive");
    for (const auto& v : s.samples)
        if (!is_finite(v)) throw InvalidArgument(std::string(where) + ": non-finite sample");
}

}  // namespace manp
