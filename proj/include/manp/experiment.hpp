#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "manp/channel.hpp"
#include "manp/frontend.hpp"
#include "manp/metrics.hpp"
#include "manp/ofdm.hpp"

namespace manp {

enum class FrontendMode { None, Manp, Blanking, Clipping };

const char* to_string(FrontendMode mode) noexcept;

struct FrontendConfig {
    FrontendMode mode = FrontendMode::None;
    std::string name;            ///< label in result files; defaults to the mode name
    InfluenceParams manp;        ///< used by Manp
    double baseline_window = 0.1;
    double k = 0.0;              ///< threshold factor for Blanking/Clipping (0 -> 6 resp. 4)

    std::string label() const { return name.empty() ? to_string(mode) : name; }
    double threshold_factor() const;
};

struct ExperimentConfig {
    OfdmConfig ofdm = OfdmConfig::defaults();
    ChannelSpec channel;
    std::vector<FrontendConfig> frontends;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    std::string output_path;
    std::optional<std::string> input_waveform;
    std::optional<std::string> reference_payload;
    double silence_guard = 0.05;
    SyncOptions sync;
    std::string scenario = "synthetic";  ///< free-form label copied into summaries

    std::vector<std::string> problems() const;
    void validate() const;
};

/// The shipped impulsive scenario: Bernoulli-Gaussian impulses (p = 0.005 per
/// analog sample, 20 dB above the unit signal power), three-path channel,
/// front-ends none and manp, 20 trials.
ExperimentConfig default_experiment_config();

/// Parses JSON text. Missing keys keep their defaults; unknown keys, wrong types
/// and constraint violations are all reported together in a ConfigError.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string experiment_config_to_json(const ExperimentConfig& config);

struct ResultRow {
    std::size_t run_id = 0;
    std::uint64_t seed = 0;
    std::string frontend;
    BlockMetrics metrics;
};

struct RunSummary {
    std::size_t run_id = 0;
    std::uint64_t seed = 0;
    std::string frontend;
    bool synchronized = false;
    std::ptrdiff_t frame_start = 0;          ///< ADC samples
    std::optional<double> noise_power;
    std::optional<double> frame_ber;
    std::optional<double> mean_snr_db;
    std::size_t bit_errors = 0;
    std::size_t bits = 0;
    std::uint64_t input_digest = 0;          ///< of the pre-front-end received waveform
};

struct ExperimentResult {
    std::string scenario;
    std::vector<ResultRow> rows;             ///< ordered by (run, front-end, block)
    std::vector<RunSummary> summaries;       ///< ordered by (run, front-end)
};

/// Transmitted payload plus the received analog waveform of one trial.
struct Reception {
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> payload;
    RealSignal received;  ///< at analog_rate, float precision (as recorded)
};

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) noexcept;
std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed);

Reception simulate_reception(const ExperimentConfig& config, std::size_t trial);

/// Front-end and ADC: analog-rate input, ADC-rate output.
RealSignal apply_frontend(const RealSignal& received, const OfdmConfig& ofdm, const FrontendConfig& frontend);

/// Receiver chain on one front-end's output. Without `reference` the BER fields stay empty.
std::vector<BlockMetrics> receive_frame(const RealSignal& received, const ExperimentConfig& config,
                                        const FrontendConfig& frontend, std::optional<std::span<const std::uint8_t>> reference,
                                        RunSummary* summary = nullptr);

/// Every (trial, front-end) pair. Trials run on up to `jobs` threads; output
/// order does not depend on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs = 1);

/// Runs the configured front-ends and receiver on a recorded waveform.
ExperimentResult ingest_waveform(const std::filesystem::path& waveform, const ExperimentConfig& config,
                                 const std::optional<std::filesystem::path>& reference_payload);

void write_rows_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, const ExperimentResult& result);

/// FNV-1a over the float32 little-endian sample bytes.
std::uint64_t waveform_digest(const RealSignal& signal) noexcept;

/// Payload files hold '0'/'1' characters; whitespace is ignored.
void write_payload_bits(const std::filesystem::path& path, std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> read_payload_bits(const std::filesystem::path& path);

}  // namespace manp
