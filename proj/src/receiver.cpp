#include <algorithm>
#include <cmath>
#include <numbers>

#include "manp/dsp.hpp"
#include "manp/fft.hpp"
#include "manp/ofdm.hpp"

namespace manp {

std::ptrdiff_t synchronize(const RealSignal& received, const OfdmConfig& config, const SyncOptions& options)
{
    check_signal(received, "synchronize");
    const double rate = received.sample_rate;
    const std::size_t nt = config.symbol_samples(rate);
    const std::size_t cp = to_samples(config.cp_duration, rate);
    const std::size_t n = received.size();
    if (cp == 0 || n < nt + cp) throw NotFound("synchronize: received signal shorter than one CP-OFDM preamble");

    const double half_band = config.bandwidth() / 2.0 + options.bandpass_margin;
    const auto bandpass = design_bandpass(options.bandpass_taps, config.center_frequency - half_band,
                                          config.center_frequency + half_band, rate);
    const auto filtered = fir_filter(received, bandpass);
    const auto& r = filtered.samples;

    // Self-correlation of the cyclic prefix with its copy one symbol later,
    // normalized by the geometric mean of both window energies.
    std::vector<double> lagged(n - nt + 1, 0.0), power(n + 1, 0.0);
    for (std::size_t i = 0; i + nt < n; ++i) lagged[i + 1] = lagged[i] + r[i] * r[i + nt];
    for (std::size_t i = 0; i < n; ++i) power[i + 1] = power[i] + r[i] * r[i];

    const std::size_t last = n - nt - cp;
    double max_energy = 0.0;
    for (std::size_t d = 0; d <= last; ++d) max_energy = std::max(max_energy, power[d + cp] - power[d]);
    if (!(max_energy > 0.0)) throw NotFound("synchronize: received signal carries no energy in band");
    const double floor = 1e-6 * max_energy;

    double best_metric = -1.0;
    std::size_t best = 0;
    for (std::size_t d = 0; d <= last; ++d) {
        const double e1 = power[d + cp] - power[d];
        const double e2 = power[d + nt + cp] - power[d + nt];
        if (e1 <= floor || e2 <= floor) continue;
        const double metric = (lagged[d + cp] - lagged[d]) / std::sqrt(e1 * e2);
        if (metric > best_metric) {
            best_metric = metric;
            best = d;
        }
    }
    if (best_metric < options.detection_threshold)
        throw NotFound("synchronize: CP-OFDM preamble not detected (peak metric " + std::to_string(best_metric) +
                       " below threshold " + std::to_string(options.detection_threshold) + ")");

    const FrameLayout layout = frame_layout(config);
    const auto preamble_offset = static_cast<std::ptrdiff_t>(to_samples(layout.first(SegmentKind::CpOfdm).offset, rate));
    const std::ptrdiff_t coarse = static_cast<std::ptrdiff_t>(best) - preamble_offset;
    if (!options.refine_with_lfm) return coarse;

    const auto templ = lfm_waveform(config.lfm, rate);
    const auto window = static_cast<std::ptrdiff_t>(to_samples(options.refine_window, rate));
    const std::ptrdiff_t begin = std::max<std::ptrdiff_t>(0, coarse - window);
    const std::ptrdiff_t end =
        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n), coarse + window + static_cast<std::ptrdiff_t>(templ.size()));
    if (end - begin < static_cast<std::ptrdiff_t>(templ.size())) return coarse;

    RealSignal segment(std::vector<double>(r.begin() + begin, r.begin() + end), rate);
    const auto corr = cross_correlate(segment, RealSignal(templ, rate));
    return begin + corr.peak_lag;
}

std::vector<cdouble> DemodulatedBlock::on(std::span<const int> subcarriers) const
{
    const auto half = static_cast<int>(bins.size() / 2);
    std::vector<cdouble> out;
    out.reserve(subcarriers.size());
    for (int k : subcarriers) out.push_back(bins.at(static_cast<std::size_t>(k + half)));
    return out;
}

DemodulatedBlock demodulate_block(const RealSignal& received, const OfdmConfig& config, std::ptrdiff_t block_offset)
{
    const double rate = received.sample_rate;
    const std::size_t nt = config.symbol_samples(rate);
    const std::size_t ng = config.guard_samples(rate);
    if (block_offset < 0 || static_cast<std::size_t>(block_offset) + nt + ng > received.size())
        throw InvalidArgument("demodulate_block: window [" + std::to_string(block_offset) + ", +" +
                              std::to_string(nt + ng) + ") outside received signal of " +
                              std::to_string(received.size()) + " samples");

    const auto* x = received.samples.data() + block_offset;
    // Zero-padding tail folded back onto the symbol start: linear -> circular convolution.
    std::vector<double> folded(x, x + nt);
    for (std::size_t i = 0; i < ng; ++i) folded[i % nt] += x[nt + i];

    std::vector<cdouble> mixed(nt);
    const double w = 2.0 * std::numbers::pi * config.center_frequency / rate;
    for (std::size_t i = 0; i < nt; ++i) mixed[i] = folded[i] * std::polar(1.0, -w * static_cast<double>(i));
    const auto spectrum = fft::forward(mixed);

    // Ideal lowpass and decimation to N complex samples per symbol.
    const std::size_t n = config.n_subcarriers;
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    const double scale = 1.0 / (config.tx_scale() * static_cast<double>(nt));
    std::vector<cdouble> band(n);
    for (std::ptrdiff_t k = -half; k < half; ++k) {
        const auto src = static_cast<std::size_t>(k >= 0 ? k : static_cast<std::ptrdiff_t>(nt) + k);
        const auto dst = static_cast<std::size_t>(k >= 0 ? k : static_cast<std::ptrdiff_t>(n) + k);
        band[dst] = spectrum[src] * scale;
    }
    const auto baseband = dft(band, Direction::Inverse);
    const auto symbols = dft(baseband, Direction::Forward);

    DemodulatedBlock out;
    out.bins.resize(n);
    for (std::ptrdiff_t k = -half; k < half; ++k)
        out.bins[static_cast<std::size_t>(k + half)] = symbols[static_cast<std::size_t>(k >= 0 ? k : static_cast<std::ptrdiff_t>(n) + k)];
    return out;
}

cdouble ChannelEstimate::gain(int k) const
{
    const auto it = std::lower_bound(subcarriers.begin(), subcarriers.end(), k);
    if (it == subcarriers.end() || *it != k)
        throw InvalidArgument("ChannelEstimate: subcarrier " + std::to_string(k) + " not covered");
    return gains[static_cast<std::size_t>(it - subcarriers.begin())];
}

ChannelEstimate ls_channel_estimate(std::span<const cdouble> rx_pilots, std::span<const cdouble> tx_pilots,
                                    const OfdmConfig& config, std::span<const cdouble> rx_nulls)
{
    const auto& pilots = config.pilot_set;
    if (rx_pilots.size() != pilots.size() || tx_pilots.size() != pilots.size())
        throw InvalidArgument("ls_channel_estimate: pilot vectors do not match the pilot set");

    std::vector<cdouble> ls(pilots.size());
    for (std::size_t i = 0; i < pilots.size(); ++i) {
        if (tx_pilots[i] == cdouble{}) throw InvalidArgument("ls_channel_estimate: zero transmitted pilot");
        ls[i] = rx_pilots[i] / tx_pilots[i];
    }

    ChannelEstimate est;
    est.subcarriers = config.active_set();
    est.gains.reserve(est.subcarriers.size());
    for (int k : est.subcarriers) {
        if (pilots.size() == 1) {
            est.gains.push_back(ls[0]);
            continue;
        }
        // Bracketing pilot pair; the end pairs extrapolate linearly.
        auto it = std::upper_bound(pilots.begin(), pilots.end(), k);
        std::size_t hi = static_cast<std::size_t>(it - pilots.begin());
        hi = std::clamp<std::size_t>(hi, 1, pilots.size() - 1);
        const std::size_t lo = hi - 1;
        const double t = static_cast<double>(k - pilots[lo]) / static_cast<double>(pilots[hi] - pilots[lo]);
        est.gains.push_back(ls[lo] + t * (ls[hi] - ls[lo]));
    }

    if (!rx_nulls.empty()) {
        double acc = 0.0;
        for (const auto& v : rx_nulls) acc += std::norm(v);
        est.noise_variance = acc / static_cast<double>(rx_nulls.size());
    }
    return est;
}

std::vector<cdouble> lmmse_equalize(std::span<const cdouble> symbols, std::span<const int> subcarriers,
                                    const ChannelEstimate& estimate)
{
    if (symbols.size() != subcarriers.size())
        throw InvalidArgument("lmmse_equalize: symbols and subcarrier list differ in length");
    const double noise = std::max(0.0, estimate.noise_variance);
    std::vector<cdouble> out(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const cdouble h = estimate.gain(subcarriers[i]);
        const double denom = std::norm(h) + noise;
        out[i] = denom > 0.0 ? std::conj(h) * symbols[i] / denom : cdouble{};
    }
    return out;
}

}  // namespace manp
