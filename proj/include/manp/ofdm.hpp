#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "manp/signal.hpp"

namespace manp {

enum class Modulation { Qpsk, Qam16 };

std::size_t bits_per_symbol(Modulation m) noexcept;
const char* to_string(Modulation m) noexcept;
Modulation modulation_from_string(const std::string& name);

struct ChirpSpec {
    double f_start = 21000.0;
    double f_end = 27000.0;
    double duration = 0.1;
};

struct MSequenceSpec {
    int degree = 10;          ///< sequence length 2^degree - 1
    double chip_rate = 6000;  ///< chips per second, BPSK on the carrier
};

/// Anti-alias filter of the ADC model.
struct AdcModel {
    std::size_t num_taps = 127;
    double cutoff_fraction = 0.45;  ///< of adc_rate
    double stopband_db = 60.0;
};

/// Modem parameters. Subcarrier indices k run over [-N/2, N/2 - 1] and sit at
/// f_c + k * spacing. Defaults reproduce the under-ice modem: N = 1024 over a
/// 6 kHz band centred at 24 kHz, 672 data / 256 pilot / 96 null subcarriers,
/// 250 ms blocks, 96 kHz ADC behind a 4x oversampled analog stage.
struct OfdmConfig {
    std::size_t n_subcarriers = 1024;
    std::vector<int> data_set;
    std::vector<int> pilot_set;
    std::vector<int> null_set;
    double subcarrier_spacing = 5.859375;
    double center_frequency = 24000.0;
    double guard_duration = 0.25 - 1.0 / 5.859375;
    double analog_rate = 384000.0;
    double adc_rate = 96000.0;
    std::vector<Modulation> modulation_per_block;
    double silence_between_preambles = 0.3;
    double silence_preamble_to_data = 0.1;
    double postamble_gap = 3.0;
    double tail_silence = 0.2;
    ChirpSpec lfm;
    ChirpSpec hfm;
    MSequenceSpec mseq;
    double cp_duration = 0.25 - 1.0 / 5.859375;  ///< cyclic prefix of the sync preamble
    std::size_t interleaver_depth = 8;
    std::uint64_t pilot_seed = 0x9E3779B97F4A7C15ull;
    AdcModel adc;

    /// The shipped defaults (20 QPSK + 20 16-QAM blocks).
    static OfdmConfig defaults();

    double symbol_duration() const noexcept { return 1.0 / subcarrier_spacing; }
    double block_duration() const noexcept { return symbol_duration() + guard_duration; }
    double bandwidth() const noexcept { return static_cast<double>(n_subcarriers) * subcarrier_spacing; }

    std::size_t symbol_samples(double rate) const;
    std::size_t guard_samples(double rate) const;
    std::size_t block_samples(double rate) const { return symbol_samples(rate) + guard_samples(rate); }

    /// S_D union S_P, ascending.
    std::vector<int> active_set() const;
    std::size_t num_blocks() const noexcept { return modulation_per_block.size(); }
    std::size_t bits_in_block(std::size_t block) const;
    std::size_t payload_bits() const;

    /// Amplitude factor giving unit RMS over the symbol for unit-energy subcarrier symbols.
    double tx_scale() const;

    /// Every violated constraint, empty when valid.
    std::vector<std::string> problems() const;
    /// Throws ConfigError listing all problems.
    void validate() const;
};

struct SubcarrierPlan {
    std::vector<int> data;
    std::vector<int> pilots;
    std::vector<int> nulls;
};

/// Nulls at both band edges plus a centre cluster; pilots spread evenly over the
/// remaining active subcarriers with one at each end; the rest carry data.
SubcarrierPlan make_subcarrier_plan(std::size_t n, std::size_t n_pilots, std::size_t nulls_low, std::size_t nulls_high,
                                    std::size_t nulls_centre);

std::size_t to_samples(double duration, double rate) noexcept;

double subcarrier_frequency(const OfdmConfig& config, int k);

/// Known pilot symbols (unit-energy QPSK derived from pilot_seed).
std::vector<cdouble> pilot_symbols(const OfdmConfig& config);

// ---------------------------------------------------------------------------
// Symbol mapping

/// Gray mapping, unit average energy. QPSK: 00 -> (1+j)/sqrt(2). 16-QAM: two
/// bits per axis, first bit the sign (0 positive), second the magnitude (0 inner).
std::vector<cdouble> map_symbols(std::span<const std::uint8_t> bits, Modulation scheme);

struct Demapped {
    std::vector<std::uint8_t> bits;
    std::vector<double> llrs;  ///< max-log, positive favours 0, clamped to +-llr_cap
};

inline constexpr double llr_cap = 1.0e3;

Demapped demap_symbols(std::span<const cdouble> symbols, Modulation scheme, double noise_variance);

/// Row-column block interleaver: write rows of `depth` entries, read columns.
template <typename T>
std::vector<T> interleave(std::span<const T> in, std::size_t depth);
template <typename T>
std::vector<T> deinterleave(std::span<const T> in, std::size_t depth);

// ---------------------------------------------------------------------------
// Frame structure

enum class SegmentKind { Lfm, Hfm, MSequence, CpOfdm, Silence, DataBlock, Postamble };

const char* to_string(SegmentKind kind) noexcept;

struct Segment {
    SegmentKind kind = SegmentKind::Silence;
    double offset = 0.0;    ///< seconds from frame start
    double duration = 0.0;
    int block = -1;         ///< data block index, -1 otherwise

    double end() const noexcept { return offset + duration; }
};

struct FrameLayout {
    std::vector<Segment> segments;
    double total_duration = 0.0;
    double symbol_duration = 0.0;  ///< signal-bearing part of each data block (T)

    const Segment& data_block(std::size_t n) const;
    const Segment& first(SegmentKind kind) const;
    std::vector<Segment> silences() const;
    std::size_t num_blocks() const;

    std::string to_json() const;
    static FrameLayout from_json(const std::string& text);
};

/// Segment timing for a config; independent of payload.
FrameLayout frame_layout(const OfdmConfig& config);

struct Frame {
    RealSignal waveform;  ///< at analog_rate
    FrameLayout layout;
};

/// One zero-padded block: symbol of length T then T_g of silence, at analog_rate.
RealSignal modulate_block(const OfdmConfig& config, std::span<const cdouble> data, std::span<const cdouble> pilots);

/// Passband waveform of one OFDM symbol (length T) from all N subcarrier values
/// (index k + N/2), sampled at `rate`.
std::vector<double> passband_symbol(const OfdmConfig& config, std::span<const cdouble> subcarriers, double rate);

/// Data symbols (interleaved, as placed on S_D) for one block of payload bits.
std::vector<cdouble> block_data_symbols(const OfdmConfig& config, std::size_t block, std::span<const std::uint8_t> bits);

/// `seed` selects the content of the CP-OFDM preamble.
Frame build_frame(const OfdmConfig& config, std::span<const std::uint8_t> payload_bits, std::uint64_t seed);

std::vector<double> lfm_waveform(const ChirpSpec& chirp, double rate);
std::vector<double> hfm_waveform(const ChirpSpec& chirp, double rate);
/// Maximal-length sequence as 0/1 chips from a Fibonacci LFSR.
std::vector<std::uint8_t> msequence(int degree);

// ---------------------------------------------------------------------------
// Receiver

struct SyncOptions {
    double detection_threshold = 0.3;  ///< minimum normalized self-correlation
    double refine_window = 0.05;       ///< +- seconds searched with the LFM template
    bool refine_with_lfm = true;
    std::size_t bandpass_taps = 255;
    double bandpass_margin = 1500.0;   ///< Hz added on both sides of the signal band
};

/// Frame start (sample index of the LFM onset) inside `received`.
/// Throws NotFound when no CP-OFDM preamble clears the detection threshold.
std::ptrdiff_t synchronize(const RealSignal& received, const OfdmConfig& config, const SyncOptions& options = {});

struct DemodulatedBlock {
    std::vector<cdouble> bins;  ///< all N subcarriers, index k + N/2

    std::vector<cdouble> on(std::span<const int> subcarriers) const;
};

/// Folds the guard-interval tail into the symbol window, shifts the band down by
/// f_c, keeps the N subcarrier bins (ideal lowpass) and applies the N-point DFT.
DemodulatedBlock demodulate_block(const RealSignal& received, const OfdmConfig& config, std::ptrdiff_t block_offset);

struct ChannelEstimate {
    std::vector<int> subcarriers;  ///< S_A, ascending
    std::vector<cdouble> gains;
    double noise_variance = 0.0;

    cdouble gain(int k) const;
};

/// LS gains on the pilots, linear interpolation in frequency across S_A; noise
/// variance from the mean power of the null subcarriers (0 when none given).
ChannelEstimate ls_channel_estimate(std::span<const cdouble> rx_pilots, std::span<const cdouble> tx_pilots,
                                    const OfdmConfig& config, std::span<const cdouble> rx_nulls = {});

/// Scalar LMMSE per subcarrier with a unit-energy symbol prior.
std::vector<cdouble> lmmse_equalize(std::span<const cdouble> symbols, std::span<const int> subcarriers,
                                    const ChannelEstimate& estimate);

}  // namespace manp
