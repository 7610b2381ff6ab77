#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "manp/fft.hpp"
#include "manp/ofdm.hpp"

namespace manp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SegmentName {
    SegmentKind kind;
    const char* name;
};

constexpr SegmentName kSegmentNames[] = {
    {SegmentKind::Lfm, "lfm"},          {SegmentKind::Hfm, "hfm"},
    {SegmentKind::MSequence, "mseq"},   {SegmentKind::CpOfdm, "cp_ofdm"},
    {SegmentKind::Silence, "silence"},  {SegmentKind::DataBlock, "data"},
    {SegmentKind::Postamble, "postamble"},
};

SegmentKind segment_kind_from_string(const std::string& s)
{
    for (const auto& e : kSegmentNames)
        if (s == e.name) return e.kind;
    throw FormatError("unknown segment kind '" + s + "'");
}

// Feedback taps of primitive polynomials, highest degree first.
std::vector<int> lfsr_taps(int degree)
{
    switch (degree) {
    case 3: return {3, 2};
    case 4: return {4, 3};
    case 5: return {5, 3};
    case 6: return {6, 5};
    case 7: return {7, 6};
    case 8: return {8, 6, 5, 4};
    case 9: return {9, 5};
    case 10: return {10, 7};
    case 11: return {11, 9};
    case 12: return {12, 6, 4, 1};
    case 13: return {13, 4, 3, 1};
    case 14: return {14, 5, 3, 1};
    case 15: return {15, 14};
    case 16: return {16, 15, 13, 4};
    default: throw InvalidArgument("msequence: unsupported degree " + std::to_string(degree));
    }
}

std::vector<double> mseq_waveform(const OfdmConfig& config, double rate)
{
    const auto chips = msequence(config.mseq.degree);
    const std::size_t per_chip = to_samples(1.0 / config.mseq.chip_rate, rate);
    std::vector<double> out(chips.size() * per_chip);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double sign = chips[i / per_chip] ? -1.0 : 1.0;
        out[i] = sign * std::numbers::sqrt2 * std::cos(kTwoPi * config.center_frequency * static_cast<double>(i) / rate);
    }
    return out;
}

std::vector<double> cp_ofdm_preamble(const OfdmConfig& config, std::uint64_t seed, double rate)
{
    std::mt19937_64 rng(seed ^ 0xC2B2AE3D27D4EB4Full);
    const auto active = config.active_set();
    std::vector<std::uint8_t> bits(2 * active.size());
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
    const auto symbols = map_symbols(bits, Modulation::Qpsk);

    std::vector<cdouble> bins(config.n_subcarriers);
    const int half = static_cast<int>(config.n_subcarriers / 2);
    for (std::size_t i = 0; i < active.size(); ++i) bins[static_cast<std::size_t>(active[i] + half)] = symbols[i];
    const auto body = passband_symbol(config, bins, rate);

    const std::size_t cp = to_samples(config.cp_duration, rate);
    std::vector<double> out(body.end() - static_cast<std::ptrdiff_t>(cp), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

}  // namespace

const char* to_string(SegmentKind kind) noexcept
{
    for (const auto& e : kSegmentNames)
        if (e.kind == kind) return e.name;
    return "unknown";
}

std::vector<double> lfm_waveform(const ChirpSpec& chirp, double rate)
{
    const std::size_t n = to_samples(chirp.duration, rate);
    const double sweep = (chirp.f_end - chirp.f_start) / chirp.duration;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        out[i] = std::numbers::sqrt2 * std::cos(kTwoPi * (chirp.f_start * t + 0.5 * sweep * t * t));
    }
    return out;
}

std::vector<double> hfm_waveform(const ChirpSpec& chirp, double rate)
{
    // Instantaneous frequency f(t) = f_start / (1 - kappa t), reaching f_end at t = duration.
    const std::size_t n = to_samples(chirp.duration, rate);
    const double kappa = (chirp.f_end - chirp.f_start) / (chirp.f_end * chirp.duration);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        const double phase = kappa == 0.0 ? kTwoPi * chirp.f_start * t
                                          : -kTwoPi * chirp.f_start / kappa * std::log1p(-kappa * t);
        out[i] = std::numbers::sqrt2 * std::cos(phase);
    }
    return out;
}

std::vector<std::uint8_t> msequence(int degree)
{
    const auto taps = lfsr_taps(degree);
    const std::uint32_t mask = (1u << degree) - 1u;
    std::uint32_t state = mask;
    std::vector<std::uint8_t> out(mask);
    for (auto& chip : out) {
        chip = static_cast<std::uint8_t>((state >> (degree - 1)) & 1u);
        std::uint32_t fb = 0;
        for (int t : taps) fb ^= (state >> (t - 1)) & 1u;
        state = ((state << 1) | fb) & mask;
    }
    return out;
}

const Segment& FrameLayout::data_block(std::size_t n) const
{
    for (const auto& s : segments)
        if (s.kind == SegmentKind::DataBlock && s.block == static_cast<int>(n)) return s;
    throw InvalidArgument("FrameLayout: no data block " + std::to_string(n));
}

const Segment& FrameLayout::first(SegmentKind kind) const
{
    for (const auto& s : segments)
        if (s.kind == kind) return s;
    throw InvalidArgument(std::string("FrameLayout: no segment of kind ") + to_string(kind));
}

std::vector<Segment> FrameLayout::silences() const
{
    std::vector<Segment> out;
    std::copy_if(segments.begin(), segments.end(), std::back_inserter(out),
                 [](const Segment& s) { return s.kind == SegmentKind::Silence; });
    return out;
}

std::size_t FrameLayout::num_blocks() const
{
    return static_cast<std::size_t>(std::count_if(segments.begin(), segments.end(),
                                                  [](const Segment& s) { return s.kind == SegmentKind::DataBlock; }));
}

std::string FrameLayout::to_json() const
{
    nlohmann::ordered_json j;
    j["total_duration"] = total_duration;
    j["symbol_duration"] = symbol_duration;
    j["segments"] = nlohmann::ordered_json::array();
    for (const auto& s : segments) {
        nlohmann::ordered_json e;
        e["kind"] = to_string(s.kind);
        e["offset"] = s.offset;
        e["duration"] = s.duration;
        if (s.block >= 0) e["block"] = s.block;
        j["segments"].push_back(std::move(e));
    }
    return j.dump(2);
}

FrameLayout FrameLayout::from_json(const std::string& text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        FrameLayout layout;
        layout.total_duration = j.at("total_duration").get<double>();
        layout.symbol_duration = j.value("symbol_duration", 0.0);
        for (const auto& e : j.at("segments")) {
            Segment s;
            s.kind = segment_kind_from_string(e.at("kind").get<std::string>());
            s.offset = e.at("offset").get<double>();
            s.duration = e.at("duration").get<double>();
            s.block = e.value("block", -1);
            layout.segments.push_back(s);
        }
        return layout;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("FrameLayout: ") + e.what());
    }
}

FrameLayout frame_layout(const OfdmConfig& config)
{
    const double rate = config.analog_rate;
    FrameLayout layout;
    std::size_t cursor = 0;
    auto add = [&](SegmentKind kind, double duration, int block = -1) {
        const std::size_t n = to_samples(duration, rate);
        if (n == 0) return;
        layout.segments.push_back(Segment{kind, static_cast<double>(cursor) / rate, static_cast<double>(n) / rate, block});
        cursor += n;
    };

    const double mseq_duration = static_cast<double>((1u << config.mseq.degree) - 1u) / config.mseq.chip_rate;
    add(SegmentKind::Lfm, config.lfm.duration);
    add(SegmentKind::Silence, config.silence_between_preambles);
    add(SegmentKind::Hfm, config.hfm.duration);
    add(SegmentKind::Silence, config.silence_between_preambles);
    add(SegmentKind::MSequence, mseq_duration);
    add(SegmentKind::Silence, config.silence_between_preambles);
    add(SegmentKind::CpOfdm, config.cp_duration + config.symbol_duration());
    add(SegmentKind::Silence, config.silence_preamble_to_data);
    for (std::size_t b = 0; b < config.num_blocks(); ++b)
        add(SegmentKind::DataBlock, config.block_duration(), static_cast<int>(b));
    add(SegmentKind::Silence, config.postamble_gap);
    add(SegmentKind::Postamble, config.hfm.duration);
    add(SegmentKind::Silence, config.tail_silence);
    layout.total_duration = static_cast<double>(cursor) / rate;
    layout.symbol_duration = static_cast<double>(config.symbol_samples(rate)) / rate;
    return layout;
}

std::vector<double> passband_symbol(const OfdmConfig& config, std::span<const cdouble> subcarriers, double rate)
{
    if (subcarriers.size() != config.n_subcarriers)
        throw InvalidArgument("passband_symbol: expected " + std::to_string(config.n_subcarriers) + " subcarriers");
    const std::size_t nt = config.symbol_samples(rate);
    const auto carrier_bin = static_cast<std::ptrdiff_t>(std::llround(config.center_frequency / config.subcarrier_spacing));
    const auto half = static_cast<std::ptrdiff_t>(config.n_subcarriers / 2);
    if (carrier_bin - half <= 0 || carrier_bin + half >= static_cast<std::ptrdiff_t>(nt / 2))
        throw InvalidArgument("passband_symbol: signal band does not fit below rate/2");

    const double scale = config.tx_scale();
    std::vector<cdouble> half_spectrum(nt / 2 + 1);
    for (std::ptrdiff_t k = -half; k < half; ++k)
        half_spectrum[static_cast<std::size_t>(carrier_bin + k)] = scale * subcarriers[static_cast<std::size_t>(k + half)];
    // c2r evaluates sum over the Hermitian extension: 2 Re{ sum_k X_k e^{j 2 pi f_k n / rate} }.
    return fft::inverse_real(half_spectrum, nt);
}

RealSignal modulate_block(const OfdmConfig& config, std::span<const cdouble> data, std::span<const cdouble> pilots)
{
    if (data.size() != config.data_set.size())
        throw InvalidArgument("modulate_block: got " + std::to_string(data.size()) + " data symbols, expected " +
                              std::to_string(config.data_set.size()));
    if (pilots.size() != config.pilot_set.size())
        throw InvalidArgument("modulate_block: got " + std::to_string(pilots.size()) + " pilots, expected " +
                              std::to_string(config.pilot_set.size()));

    const auto half = static_cast<int>(config.n_subcarriers / 2);
    std::vector<cdouble> bins(config.n_subcarriers);
    for (std::size_t i = 0; i < data.size(); ++i) bins[static_cast<std::size_t>(config.data_set[i] + half)] = data[i];
    for (std::size_t i = 0; i < pilots.size(); ++i) bins[static_cast<std::size_t>(config.pilot_set[i] + half)] = pilots[i];

    auto samples = passband_symbol(config, bins, config.analog_rate);
    samples.resize(samples.size() + config.guard_samples(config.analog_rate), 0.0);
    return RealSignal(std::move(samples), config.analog_rate, 0.0);
}

std::vector<cdouble> block_data_symbols(const OfdmConfig& config, std::size_t block, std::span<const std::uint8_t> bits)
{
    const auto symbols = map_symbols(bits, config.modulation_per_block.at(block));
    return interleave<cdouble>(symbols, config.interleaver_depth);
}

Frame build_frame(const OfdmConfig& config, std::span<const std::uint8_t> payload_bits, std::uint64_t seed)
{
    config.validate();
    if (payload_bits.size() != config.payload_bits())
        throw InvalidArgument("build_frame: payload has " + std::to_string(payload_bits.size()) + " bits, frame needs " +
                              std::to_string(config.payload_bits()));

    const double rate = config.analog_rate;
    Frame frame;
    frame.layout = frame_layout(config);
    frame.waveform = RealSignal(std::vector<double>(to_samples(frame.layout.total_duration, rate), 0.0), rate, 0.0);
    auto& out = frame.waveform.samples;

    const auto pilots = pilot_symbols(config);
    std::size_t bit_cursor = 0;
    for (const auto& seg : frame.layout.segments) {
        std::vector<double> piece;
        switch (seg.kind) {
        case SegmentKind::Lfm: piece = lfm_waveform(config.lfm, rate); break;
        case SegmentKind::Hfm:
        case SegmentKind::Postamble: piece = hfm_waveform(config.hfm, rate); break;
        case SegmentKind::MSequence: piece = mseq_waveform(config, rate); break;
        case SegmentKind::CpOfdm: piece = cp_ofdm_preamble(config, seed, rate); break;
        case SegmentKind::DataBlock: {
            const auto b = static_cast<std::size_t>(seg.block);
            const std::size_t nbits = config.bits_in_block(b);
            const auto data = block_data_symbols(config, b, payload_bits.subspan(bit_cursor, nbits));
            bit_cursor += nbits;
            piece = modulate_block(config, data, pilots).samples;
            break;
        }
        case SegmentKind::Silence: continue;
        }
        const std::size_t start = to_samples(seg.offset, rate);
        std::copy_n(piece.begin(), std::min(piece.size(), to_samples(seg.duration, rate)), out.begin() + static_cast<std::ptrdiff_t>(start));
    }
    return frame;
}

}  // namespace manp
