#include "manp/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "manp/fft.hpp"

namespace manp {
namespace {

double kaiser_beta(double stopband_db)
{
    if (stopband_db > 50.0) return 0.1102 * (stopband_db - 8.7);
    if (stopband_db >= 21.0) return 0.5842 * std::pow(stopband_db - 21.0, 0.4) + 0.07886 * (stopband_db - 21.0);
    return 0.0;
}

std::vector<double> kaiser_window(std::size_t n, double beta)
{
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    const double m = static_cast<double>(n - 1);
    const double denom = std::cyl_bessel_i(0.0, beta);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = 2.0 * static_cast<double>(i) / m - 1.0;
        w[i] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / denom;
    }
    return w;
}

double sinc(double x)
{
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Ideal lowpass impulse response (cutoff as a fraction of the sample rate) centred on (n-1)/2.
std::vector<double> ideal_lowpass(std::size_t n, double cutoff_norm)
{
    std::vector<double> h(n);
    const double centre = (static_cast<double>(n) - 1.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i) h[i] = 2.0 * cutoff_norm * sinc(2.0 * cutoff_norm * (static_cast<double>(i) - centre));
    return h;
}

void check_design(std::size_t num_taps, double sample_rate)
{
    if (num_taps == 0) throw InvalidArgument("filter design: num_taps must be positive");
    if (!(sample_rate > 0.0)) throw InvalidArgument("filter design: sample_rate must be positive");
}

struct Ratio {
    std::size_t up = 1;
    std::size_t down = 1;
};

Ratio rational_ratio(double source, double target, std::size_t max_factor)
{
    const double r = target / source;
    for (std::size_t down = 1; down <= max_factor; ++down) {
        const double up_exact = r * static_cast<double>(down);
        const double up = std::round(up_exact);
        if (up < 1.0 || up > static_cast<double>(max_factor)) continue;
        if (std::abs(up - up_exact) <= 1e-9 * up_exact) {
            const auto u = static_cast<std::size_t>(up);
            const std::size_t g = std::gcd(u, down);
            return {u / g, down / g};
        }
    }
    throw UnsupportedRatio("resample: rate ratio " + std::to_string(target) + "/" + std::to_string(source) +
                           " is not a small rational number");
}

}  // namespace

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::vector<cdouble> dft(std::span<const cdouble> block, Direction direction)
{
    if (!is_power_of_two(block.size()))
        throw InvalidArgument("dft: length " + std::to_string(block.size()) + " is not a power of two");
    auto out = direction == Direction::Forward ? fft::forward(block) : fft::inverse(block);
    const double scale = 1.0 / std::sqrt(static_cast<double>(block.size()));
    for (auto& v : out) v *= scale;
    return out;
}

double FirFilter::dc_gain() const noexcept { return std::accumulate(taps.begin(), taps.end(), 0.0); }

FirFilter design_lowpass(std::size_t num_taps, double cutoff_hz, double sample_rate, double stopband_db)
{
    check_design(num_taps, sample_rate);
    if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate / 2.0)
        throw InvalidArgument("design_lowpass: cutoff must lie in (0, sample_rate/2)");
    auto h = ideal_lowpass(num_taps, cutoff_hz / sample_rate);
    const auto w = kaiser_window(num_taps, kaiser_beta(stopband_db));
    for (std::size_t i = 0; i < num_taps; ++i) h[i] *= w[i];
    const double gain = std::accumulate(h.begin(), h.end(), 0.0);
    for (auto& v : h) v /= gain;
    return FirFilter{std::move(h)};
}

FirFilter design_bandpass(std::size_t num_taps, double low_hz, double high_hz, double sample_rate, double stopband_db)
{
    check_design(num_taps, sample_rate);
    if (!(low_hz > 0.0) || !(high_hz > low_hz) || high_hz >= sample_rate / 2.0)
        throw InvalidArgument("design_bandpass: need 0 < low < high < sample_rate/2");
    auto hi = ideal_lowpass(num_taps, high_hz / sample_rate);
    const auto lo = ideal_lowpass(num_taps, low_hz / sample_rate);
    const auto w = kaiser_window(num_taps, kaiser_beta(stopband_db));
    for (std::size_t i = 0; i < num_taps; ++i) hi[i] = (hi[i] - lo[i]) * w[i];

    const double omega = 2.0 * std::numbers::pi * 0.5 * (low_hz + high_hz) / sample_rate;
    cdouble response{};
    for (std::size_t i = 0; i < num_taps; ++i) response += hi[i] * std::polar(1.0, -omega * static_cast<double>(i));
    const double gain = std::abs(response);
    for (auto& v : hi) v /= gain;
    return FirFilter{std::move(hi)};
}

RealSignal fir_filter(const RealSignal& signal, const FirFilter& filter)
{
    if (filter.taps.empty()) throw InvalidArgument("fir_filter: empty taps");
    if (signal.empty()) throw InvalidArgument("fir_filter: empty signal");

    const auto& x = signal.samples;
    const auto& h = filter.taps;
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const auto taps = static_cast<std::ptrdiff_t>(h.size());
    const double delay = filter.group_delay();
    const auto shift = static_cast<std::ptrdiff_t>(std::floor(delay));
    const double frac = delay - static_cast<double>(shift);

    std::vector<double> y(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t pos = i + shift;  // index into the full convolution
        const std::ptrdiff_t j_lo = std::max<std::ptrdiff_t>(0, pos - (n - 1));
        const std::ptrdiff_t j_hi = std::min<std::ptrdiff_t>(taps - 1, pos);
        double acc = 0.0;
        for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j) acc += h[j] * x[pos - j];
        y[i] = acc;
    }
    return RealSignal(std::move(y), signal.sample_rate, signal.start_time - frac / signal.sample_rate);
}

RealSignal resample(const RealSignal& signal, double target_rate, bool anti_alias, const ResampleDesign& design)
{
    if (!(target_rate > 0.0)) throw InvalidArgument("resample: target_rate must be positive");
    if (!(signal.sample_rate > 0.0)) throw InvalidArgument("resample: source sample_rate must be positive");
    const auto [up, down] = rational_ratio(signal.sample_rate, target_rate, design.max_factor);

    const auto& x = signal.samples;
    const std::size_t n = x.size();
    const std::size_t out_n = (n * up + down - 1) / down;

    if (up == 1 && down == 1) return RealSignal(x, target_rate, signal.start_time);
    if (up == 1 && !anti_alias) {
        std::vector<double> y(out_n);
        for (std::size_t m = 0; m < out_n; ++m) y[m] = x[m * down];
        return RealSignal(std::move(y), target_rate, signal.start_time);
    }

    const double high_rate = signal.sample_rate * static_cast<double>(up);
    const double cutoff = design.cutoff_fraction * std::min(signal.sample_rate, target_rate);
    FirFilter filter = design_lowpass(design.num_taps, cutoff, high_rate, design.stopband_db);
    for (auto& v : filter.taps) v *= static_cast<double>(up);

    const auto& h = filter.taps;
    const double delay = filter.group_delay();
    const auto shift = static_cast<std::size_t>(std::floor(delay));
    const double frac = delay - static_cast<double>(shift);

    std::vector<double> y(out_n);
    for (std::size_t m = 0; m < out_n; ++m) {
        const std::size_t pos = m * down + shift;  // index on the zero-stuffed high-rate grid
        double acc = 0.0;
        for (std::size_t j = pos % up; j < h.size() && j <= pos; j += up) {
            const std::size_t i = (pos - j) / up;
            if (i < n) acc += h[j] * x[i];
        }
        y[m] = acc;
    }
    return RealSignal(std::move(y), target_rate, signal.start_time - frac / high_rate);
}

Correlation cross_correlate(const RealSignal& a, const RealSignal& b)
{
    if (a.sample_rate != b.sample_rate) throw InvalidArgument("cross_correlate: sample rates differ");
    if (a.empty() || b.empty()) throw InvalidArgument("cross_correlate: empty input");

    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    std::size_t nfft = 1;
    while (nfft < na + nb - 1) nfft <<= 1;

    std::vector<double> pa(nfft, 0.0), pb(nfft, 0.0);
    std::copy(a.samples.begin(), a.samples.end(), pa.begin());
    std::copy(b.samples.begin(), b.samples.end(), pb.begin());
    auto fa = fft::forward_real(pa);
    const auto fb = fft::forward_real(pb);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= std::conj(fb[i]);
    const auto circ = fft::inverse_real(fa, nfft);

    const double norm = std::sqrt(energy(a.samples) * energy(b.samples));
    const double scale = norm > 0.0 ? 1.0 / (norm * static_cast<double>(nfft)) : 0.0;

    Correlation out;
    out.first_lag = -static_cast<std::ptrdiff_t>(nb - 1);
    out.values.resize(na + nb - 1);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const std::ptrdiff_t lag = out.first_lag + static_cast<std::ptrdiff_t>(i);
        const std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag) : nfft - static_cast<std::size_t>(-lag);
        out.values[i] = circ[idx] * scale;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.values.size(); ++i)
        if (std::abs(out.values[i]) > std::abs(out.values[best])) best = i;
    out.peak_lag = out.first_lag + static_cast<std::ptrdiff_t>(best);
    out.peak = out.values[best];
    return out;
}

double energy(std::span<const double> x) noexcept
{
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

double mean_power(std::span<const double> x) noexcept
{
    return x.empty() ? 0.0 : energy(x) / static_cast<double>(x.size());
}

}  // namespace manp
