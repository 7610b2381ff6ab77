#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "manp/ofdm.hpp"
#include "manp/signal.hpp"

namespace manp {

struct BlockMetrics {
    std::size_t block_index = 0;
    Modulation modulation = Modulation::Qpsk;
    std::optional<double> snr_db;  ///< empty when not measurable; -inf when P_s <= P_n
    std::optional<double> ber;     ///< empty when no reference bits are available
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
};

/// Mean power over the silence segments of `layout`, skipping the first `guard`
/// seconds of each (multipath tail). Frame time is taken from received.start_time.
/// Throws NotAvailable when no silence sample survives.
double noise_power_from_silence(const RealSignal& received, const FrameLayout& layout, double guard);

/// 10 log10((P_s - P_n) / P_n), P_s being the mean power over the block's
/// symbol interval (offset to offset + layout.symbol_duration). Returns -inf
/// when P_s <= P_n.
double block_snr(const RealSignal& received, const FrameLayout& layout, std::size_t block, double noise_power);

/// SNR in dB from the two powers directly.
double snr_db_from_powers(double signal_plus_noise, double noise_power);

struct BitErrors {
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    double ber = 0.0;
};

BitErrors block_ber(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> reference);

/// Bit-error weighted BER over blocks that carry a BER.
double frame_ber(std::span<const BlockMetrics> blocks);

/// Mean of the finite per-block SNR values in dB; nullopt when there are none.
std::optional<double> mean_snr_db(std::span<const BlockMetrics> blocks);

}  // namespace manp
