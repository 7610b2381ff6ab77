#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "manp/signal.hpp"

namespace manp {

struct Tap {
    double delay = 0.0;  ///< seconds, rounded to the sample grid
    cdouble gain{1.0, 0.0};
};

struct NoImpulses {};

/// w_k = b_k g_k, b_k ~ Bernoulli(probability), g_k ~ N(0, impulse_power).
struct BernoulliGaussian {
    double probability = 0.005;
    double impulse_power = 100.0;
};

/// Symmetric alpha-stable with characteristic function exp(-dispersion |t|^alpha).
struct AlphaStable {
    double alpha = 1.5;
    double dispersion = 1.0;
};

using ImpulseModel = std::variant<NoImpulses, BernoulliGaussian, AlphaStable>;

struct ChannelSpec {
    std::vector<Tap> taps{Tap{}};
    double background_noise_power = 0.0;  ///< per-sample variance
    ImpulseModel impulse_model = NoImpulses{};
    std::uint64_t seed = 0;

    std::vector<std::string> problems() const;
    void validate() const;
};

/// Tapped-delay convolution (complex gains act on the analytic signal), then
/// background Gaussian and impulsive noise. The output is longer than the input
/// by the largest tap delay. Deterministic for a given seed.
RealSignal apply_channel(const RealSignal& signal, const ChannelSpec& spec);

RealSignal generate_impulsive_noise(const ImpulseModel& model, std::size_t n, double rate, std::uint64_t seed);

/// SplitMix64 step, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace manp
