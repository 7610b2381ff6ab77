#include "manp/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "manp/fft.hpp"

namespace manp {
namespace {

constexpr std::uint64_t kBackgroundStream = 1;
constexpr std::uint64_t kImpulseStream = 2;

// Imaginary part of the analytic signal (Hilbert transform) via the FFT.
std::vector<double> hilbert(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    auto spec = fft::forward_real(x);
    // Multiply positive frequencies by -j; DC and Nyquist go to zero.
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        spec[k] = edge ? cdouble{} : spec[k] * cdouble{0.0, -1.0};
    }
    auto out = fft::inverse_real(spec, n);
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

double symmetric_stable(std::mt19937_64& rng, double alpha)
{
    // Chambers-Mallows-Stuck with beta = 0.
    std::uniform_real_distribution<double> uni(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
    std::exponential_distribution<double> expo(1.0);
    double v = uni(rng);
    while (std::abs(v) >= std::numbers::pi / 2.0) v = uni(rng);
    double w = expo(rng);
    while (w == 0.0) w = expo(rng);
    if (alpha == 1.0) return std::tan(v);
    return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<std::string> ChannelSpec::problems() const
{
    std::vector<std::string> p;
    if (taps.empty()) p.push_back("channel.taps must list at least one tap");
    for (std::size_t i = 0; i < taps.size(); ++i) {
        if (!(taps[i].delay >= 0.0) || !std::isfinite(taps[i].delay))
            p.push_back("channel.taps[" + std::to_string(i) + "].delay must be finite and >= 0");
        if (!is_finite(taps[i].gain)) p.push_back("channel.taps[" + std::to_string(i) + "].gain must be finite");
    }
    if (!(background_noise_power >= 0.0) || !std::isfinite(background_noise_power))
        p.push_back("channel.background_noise_power must be finite and >= 0");
    if (const auto* bg = std::get_if<BernoulliGaussian>(&impulse_model)) {
        if (!(bg->probability >= 0.0 && bg->probability <= 1.0))
            p.push_back("channel.impulse_model.probability must lie in [0, 1]");
        if (!(bg->impulse_power >= 0.0) || !std::isfinite(bg->impulse_power))
            p.push_back("channel.impulse_model.impulse_power must be finite and >= 0");
    } else if (const auto* as = std::get_if<AlphaStable>(&impulse_model)) {
        if (!(as->alpha > 0.0 && as->alpha <= 2.0)) p.push_back("channel.impulse_model.alpha must lie in (0, 2]");
        if (!(as->dispersion >= 0.0) || !std::isfinite(as->dispersion))
            p.push_back("channel.impulse_model.dispersion must be finite and >= 0");
    }
    return p;
}

void ChannelSpec::validate() const
{
    auto p = problems();
    if (!p.empty()) throw ConfigError(std::move(p));
}

RealSignal generate_impulsive_noise(const ImpulseModel& model, std::size_t n, double rate, std::uint64_t seed)
{
    if (n == 0) throw InvalidArgument("generate_impulsive_noise: n must be positive");
    RealSignal out(std::vector<double>(n, 0.0), rate, 0.0);
    std::mt19937_64 rng(seed);

    if (const auto* bg = std::get_if<BernoulliGaussian>(&model)) {
        if (!(bg->probability >= 0.0 && bg->probability <= 1.0))
            throw InvalidArgument("generate_impulsive_noise: probability outside [0, 1]");
        if (bg->probability == 0.0 || bg->impulse_power == 0.0) return out;
        std::normal_distribution<double> gauss(0.0, std::sqrt(bg->impulse_power));
        if (bg->probability == 1.0) {
            for (auto& v : out.samples) v = gauss(rng);
            return out;
        }
        // Gaps between Bernoulli successes are geometric.
        std::geometric_distribution<std::size_t> gap(bg->probability);
        for (std::size_t i = gap(rng); i < n; i += 1 + gap(rng)) out.samples[i] = gauss(rng);
    } else if (const auto* as = std::get_if<AlphaStable>(&model)) {
        if (!(as->alpha > 0.0 && as->alpha <= 2.0))
            throw InvalidArgument("generate_impulsive_noise: alpha must lie in (0, 2]");
        const double scale = std::pow(as->dispersion, 1.0 / as->alpha);
        for (auto& v : out.samples) v = scale * symmetric_stable(rng, as->alpha);
    }
    return out;
}

RealSignal apply_channel(const RealSignal& signal, const ChannelSpec& spec)
{
    spec.validate();
    check_signal(signal, "apply_channel");
    const double rate = signal.sample_rate;

    std::size_t max_delay = 0;
    bool complex_gains = false;
    for (const auto& tap : spec.taps) {
        max_delay = std::max(max_delay, static_cast<std::size_t>(std::llround(tap.delay * rate)));
        complex_gains = complex_gains || tap.gain.imag() != 0.0;
    }

    const auto& x = signal.samples;
    std::vector<double> quad;
    if (complex_gains) quad = hilbert(x);

    std::vector<double> y(x.size() + max_delay, 0.0);
    for (const auto& tap : spec.taps) {
        const auto d = static_cast<std::size_t>(std::llround(tap.delay * rate));
        const double gr = tap.gain.real();
        const double gi = tap.gain.imag();
        // Re{g (x + j H{x})} = gr x - gi H{x}
        for (std::size_t i = 0; i < x.size(); ++i) y[i + d] += gr * x[i] - (complex_gains ? gi * quad[i] : 0.0);
    }

    if (spec.background_noise_power > 0.0) {
        std::mt19937_64 rng(mix_seed(spec.seed, kBackgroundStream));
        std::normal_distribution<double> gauss(0.0, std::sqrt(spec.background_noise_power));
        for (auto& v : y) v += gauss(rng);
    }
    if (!std::holds_alternative<NoImpulses>(spec.impulse_model) && !y.empty()) {
        const auto impulses = generate_impulsive_noise(spec.impulse_model, y.size(), rate, mix_seed(spec.seed, kImpulseStream));
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += impulses.samples[i];
    }
    return RealSignal(std::move(y), rate, signal.start_time);
}

}  // namespace manp
