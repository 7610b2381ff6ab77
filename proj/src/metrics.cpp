#include "manp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace manp {
namespace {

// Clamped sample range [begin, end) of the frame-time interval [t0, t1).
std::pair<std::size_t, std::size_t> sample_range(const RealSignal& s, double t0, double t1)
{
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    const std::ptrdiff_t a = std::clamp<std::ptrdiff_t>(s.index_of(t0), 0, n);
    const std::ptrdiff_t b = std::clamp<std::ptrdiff_t>(s.index_of(t1), 0, n);
    return {static_cast<std::size_t>(a), static_cast<std::size_t>(std::max(a, b))};
}

}  // namespace

double noise_power_from_silence(const RealSignal& received, const FrameLayout& layout, double guard)
{
    if (!(guard >= 0.0)) throw InvalidArgument("noise_power_from_silence: guard must be >= 0");
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& seg : layout.silences()) {
        if (seg.duration <= guard) continue;
        const auto [begin, end] = sample_range(received, seg.offset + guard, seg.end());
        for (std::size_t i = begin; i < end; ++i) acc += received.samples[i] * received.samples[i];
        count += end - begin;
    }
    if (count == 0) throw NotAvailable("noise_power_from_silence: no silence interval longer than the guard");
    return acc / static_cast<double>(count);
}

double snr_db_from_powers(double signal_plus_noise, double noise_power)
{
    if (!(noise_power > 0.0)) throw InvalidArgument("block_snr: noise power must be positive");
    if (signal_plus_noise <= noise_power) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10((signal_plus_noise - noise_power) / noise_power);
}

double block_snr(const RealSignal& received, const FrameLayout& layout, std::size_t block, double noise_power)
{
    if (!(noise_power > 0.0)) throw InvalidArgument("block_snr: noise power must be positive");
    const auto& seg = layout.data_block(block);
    const auto [begin, end] = sample_range(received, seg.offset, seg.offset + (layout.symbol_duration > 0.0 ? layout.symbol_duration : seg.duration));
    if (end <= begin) throw InvalidArgument("block_snr: block " + std::to_string(block) + " lies outside the signal");
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += received.samples[i] * received.samples[i];
    return snr_db_from_powers(acc / static_cast<double>(end - begin), noise_power);
}

BitErrors block_ber(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> reference)
{
    if (decided.size() != reference.size())
        throw InvalidArgument("block_ber: lengths differ (" + std::to_string(decided.size()) + " vs " +
                              std::to_string(reference.size()) + ")");
    BitErrors out;
    out.bits = decided.size();
    for (std::size_t i = 0; i < decided.size(); ++i) out.bit_errors += (decided[i] != reference[i]) ? 1 : 0;
    out.ber = out.bits ? static_cast<double>(out.bit_errors) / static_cast<double>(out.bits) : 0.0;
    return out;
}

double frame_ber(std::span<const BlockMetrics> blocks)
{
    std::size_t errors = 0;
    std::size_t bits = 0;
    for (const auto& b : blocks) {
        if (!b.ber) continue;
        errors += b.bit_errors;
        bits += b.bits;
    }
    return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
}

std::optional<double> mean_snr_db(std::span<const BlockMetrics> blocks)
{
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& b : blocks)
        if (b.snr_db && std::isfinite(*b.snr_db)) {
            acc += *b.snr_db;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return acc / static_cast<double>(n);
}

}  // namespace manp
