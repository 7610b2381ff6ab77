#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "manp/channel.hpp"
#include "manp/errors.hpp"
#include "manp/experiment.hpp"
#include "manp/frontend.hpp"
#include "manp/ofdm.hpp"
#include "oracle.hpp"

using namespace manp;
using std::numbers::pi;

namespace {

// Transmitter sampled straight at the ADC rate, so the receiver sees the
// channel without an anti-alias filter in between.
OfdmConfig baseband_rate_config(std::size_t blocks = 4)
{
    OfdmConfig c = OfdmConfig::defaults();
    c.analog_rate = c.adc_rate;
    c.modulation_per_block.assign(blocks / 2, Modulation::Qpsk);
    c.modulation_per_block.insert(c.modulation_per_block.end(), blocks - blocks / 2, Modulation::Qam16);
    c.postamble_gap = 0.5;
    return c;
}

std::vector<cdouble> random_qpsk(std::size_t n, unsigned seed)
{
    return map_symbols(random_bits(2 * n, seed), Modulation::Qpsk);
}

std::vector<cdouble> all_bins(const OfdmConfig& c, std::span<const cdouble> data, std::span<const cdouble> pilots)
{
    const int half = static_cast<int>(c.n_subcarriers / 2);
    std::vector<cdouble> bins(c.n_subcarriers);
    for (std::size_t i = 0; i < c.data_set.size(); ++i) bins[static_cast<std::size_t>(c.data_set[i] + half)] = data[i];
    for (std::size_t i = 0; i < c.pilot_set.size(); ++i) bins[static_cast<std::size_t>(c.pilot_set[i] + half)] = pilots[i];
    return bins;
}

RealSignal delayed(const RealSignal& x, std::size_t d, std::size_t tail = 0)
{
    std::vector<double> y(d + x.size() + tail, 0.0);
    std::copy(x.samples.begin(), x.samples.end(), y.begin() + static_cast<std::ptrdiff_t>(d));
    return {y, x.sample_rate};
}

}  // namespace

TEST_SUITE("ofdm-phy")
{
    TEST_CASE("default numerology")
    {
        auto c = OfdmConfig::defaults();
        CHECK(c.problems().empty());
        CHECK(c.n_subcarriers == 1024);
        CHECK(c.data_set.size() == 672);
        CHECK(c.pilot_set.size() == 256);
        CHECK(c.null_set.size() == 96);
        CHECK(std::abs(c.subcarrier_spacing * c.symbol_duration() - 1.0) < 1e-9);
        CHECK(c.block_duration() == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(c.bandwidth() == doctest::Approx(6000.0));
        CHECK(c.symbol_samples(c.adc_rate) == 16384);
        CHECK(c.num_blocks() == 40);
        CHECK(c.payload_bits() == 20 * 1344 + 20 * 2688);
        CHECK(c.pilot_set.front() == c.active_set().front());
        CHECK(c.pilot_set.back() == c.active_set().back());
    }

    TEST_CASE("subcarrier frequencies")
    {
        auto c = OfdmConfig::defaults();
        CHECK(subcarrier_frequency(c, 0) == 24000.0);
        CHECK(subcarrier_frequency(c, -512) == doctest::Approx(21000.0));
        CHECK_THROWS_AS(subcarrier_frequency(c, 512), InvalidArgument);
        CHECK_THROWS_AS(subcarrier_frequency(c, -513), InvalidArgument);

        OfdmConfig rounded = c;
        rounded.subcarrier_spacing = 5.88;
        CHECK(subcarrier_frequency(rounded, -512) == doctest::Approx(20989.44).epsilon(1e-12));
    }

    TEST_CASE("config validation lists every problem")
    {
        auto c = OfdmConfig::defaults();
        c.pilot_set.push_back(c.data_set.front());
        c.adc_rate = 50000.0;
        c.interleaver_depth = 5;
        auto p = c.problems();
        CHECK(p.size() >= 3);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }

    TEST_CASE("QPSK and 16-QAM mapping")
    {
        std::vector<std::uint8_t> zeros{0, 0};
        auto s = map_symbols(zeros, Modulation::Qpsk);
        CHECK(std::abs(s[0] - cdouble(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);

        std::vector<std::uint8_t> all16;
        for (int v = 0; v < 16; ++v)
            for (int b = 3; b >= 0; --b) all16.push_back(static_cast<std::uint8_t>((v >> b) & 1));
        auto q = map_symbols(all16, Modulation::Qam16);
        double e = 0.0;
        for (auto& v : q) e += std::norm(v);
        CHECK(std::abs(e / 16.0 - 1.0) < 1e-12);
        CHECK(demap_symbols(q, Modulation::Qam16, 0.1).bits == all16);

        std::vector<std::uint8_t> all4{0, 0, 0, 1, 1, 0, 1, 1};
        CHECK(demap_symbols(map_symbols(all4, Modulation::Qpsk), Modulation::Qpsk, 0.1).bits == all4);

        std::vector<std::uint8_t> odd{1, 0, 1};
        CHECK_THROWS_AS(map_symbols(odd, Modulation::Qpsk), InvalidArgument);
        std::vector<std::uint8_t> six(6, 0);
        CHECK_THROWS_AS(map_symbols(six, Modulation::Qam16), InvalidArgument);
    }

    TEST_CASE("16-QAM neighbours differ in one bit")
    {
        std::vector<std::uint8_t> bits;
        for (int v = 0; v < 16; ++v)
            for (int b = 3; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
        auto q = map_symbols(bits, Modulation::Qam16);
        const double step = 2.0 / std::sqrt(10.0);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                if (std::abs(std::abs(q[i] - q[j]) - step) > 1e-9) continue;
                int diff = 0;
                for (int b = 0; b < 4; ++b) diff += bits[4 * i + b] != bits[4 * j + b];
                CHECK(diff == 1);
            }
    }

    TEST_CASE("demapper soft values")
    {
        std::vector<std::uint8_t> bits{0, 1, 1, 0};
        auto s = map_symbols(bits, Modulation::Qpsk);
        auto d = demap_symbols(s, Modulation::Qpsk, 0.0);
        CHECK(d.bits == bits);
        CHECK(d.llrs[0] == llr_cap);
        CHECK(d.llrs[1] == -llr_cap);
        CHECK(d.llrs[2] == -llr_cap);
        CHECK(d.llrs[3] == llr_cap);

        std::vector<cdouble> boundary{{0.0, 0.7}};
        auto b = demap_symbols(boundary, Modulation::Qpsk, 0.5);
        CHECK(std::abs(b.llrs[0]) < 1e-12);
        CHECK(b.llrs[1] > 0.0);

        const double a = 1.0 / std::sqrt(10.0);
        std::vector<cdouble> qam{{0.0, a}, {2.0 * a, -3.0 * a}};
        auto m = demap_symbols(qam, Modulation::Qam16, 0.2);
        CHECK(std::abs(m.llrs[0]) < 1e-12);  // sign of I on the axis
        CHECK(std::abs(m.llrs[5]) < 1e-12);  // magnitude of I between 1 and 3
    }

    TEST_CASE("QPSK bit errors at 10 dB Eb/N0 track the Gaussian tail")
    {
        const std::size_t n = 1000000;
        const double ebn0 = 10.0;
        const double n0 = 1.0 / (2.0 * ebn0);  // Es = 1, two bits per symbol
        auto bits = random_bits(2 * n, 77);
        auto s = map_symbols(bits, Modulation::Qpsk);
        std::mt19937_64 rng(78);
        std::normal_distribution<double> g(0.0, std::sqrt(n0 / 2.0));
        for (auto& v : s) v += cdouble(g(rng), g(rng));
        auto d = demap_symbols(s, Modulation::Qpsk, n0);
        std::size_t errors = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) errors += d.bits[i] != bits[i];
        const double ber = static_cast<double>(errors) / static_cast<double>(bits.size());
        const double ref = oracle::q_function(std::sqrt(2.0 * ebn0));
        CHECK(ber <= 2.0 * ref);
        CHECK(ber >= 0.5 * ref);
    }

    TEST_CASE("interleaver")
    {
        std::vector<int> x{0, 1, 2, 3};
        CHECK(interleave<int>(x, 2) == std::vector<int>{0, 2, 1, 3});
        CHECK(interleave<int>(x, 1) == x);
        CHECK(deinterleave<int>(interleave<int>(x, 2), 2) == x);

        auto s = random_qpsk(672, 4);
        CHECK(deinterleave<cdouble>(interleave<cdouble>(s, 8), 8) == s);
        CHECK(interleave<cdouble>(s, 8) != s);

        std::vector<int> five(5);
        CHECK_THROWS_AS(interleave<int>(five, 2), InvalidArgument);
        CHECK_THROWS_AS(deinterleave<int>(five, 2), InvalidArgument);
    }

    TEST_CASE("zero symbols give a silent block")
    {
        auto c = OfdmConfig::defaults();
        std::vector<cdouble> data(c.data_set.size()), pilots(c.pilot_set.size());
        auto b = modulate_block(c, data, pilots);
        CHECK(b.size() == c.block_samples(c.analog_rate));
        CHECK(b.duration() == doctest::Approx(0.25));
        CHECK(std::all_of(b.samples.begin(), b.samples.end(), [](double v) { return v == 0.0; }));
        CHECK_THROWS_AS(modulate_block(c, std::vector<cdouble>(5), pilots), InvalidArgument);
    }

    TEST_CASE("a single subcarrier is a tone at its frequency")
    {
        auto c = OfdmConfig::defaults();
        for (int k : {c.data_set[10], c.data_set[400], c.pilot_set[100]}) {
            std::vector<cdouble> bins(c.n_subcarriers);
            bins[static_cast<std::size_t>(k + 512)] = 1.0;
            auto x = passband_symbol(c, bins, c.analog_rate);
            auto p = oracle::periodogram(x, c.analog_rate, false);
            CHECK(std::abs(p.peak_frequency() - subcarrier_frequency(c, k)) <= p.bin_hz);
        }
    }

    TEST_CASE("transmitted block stays inside its band")
    {
        auto c = OfdmConfig::defaults();
        auto b = modulate_block(c, random_qpsk(c.data_set.size(), 1), pilot_symbols(c));
        auto p = oracle::periodogram(b.samples, c.analog_rate, false);
        const double lo = c.center_frequency - c.bandwidth() / 2.0 - 2.0 * c.subcarrier_spacing;
        const double hi = c.center_frequency + c.bandwidth() / 2.0 + 2.0 * c.subcarrier_spacing;
        const double in = p.band(lo, hi);
        const double out = p.total() - in;
        CHECK(10.0 * std::log10(in / out) >= 30.0);

        // unit RMS over the symbol
        std::vector<double> sym(b.samples.begin(), b.samples.begin() + static_cast<std::ptrdiff_t>(c.symbol_samples(c.analog_rate)));
        CHECK(oracle::rms(sym) == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("frame layout")
    {
        auto c = OfdmConfig::defaults();
        auto layout = frame_layout(c);
        CHECK(layout.total_duration >= 14.4);
        CHECK(layout.total_duration <= 15.4);
        CHECK(layout.num_blocks() == 40);
        for (std::size_t i = 1; i < layout.segments.size(); ++i) {
            CHECK(layout.segments[i].offset > layout.segments[i - 1].offset);
            CHECK(layout.segments[i].offset >= layout.segments[i - 1].end() - 1e-12);
        }
        const double t0 = layout.data_block(0).offset;
        for (std::size_t n = 0; n < 40; ++n) {
            const double expect = (t0 + static_cast<double>(n) * c.block_duration()) * c.adc_rate;
            CHECK(std::abs(layout.data_block(n).offset * c.adc_rate - expect) <= 1.0);
        }
        CHECK(layout.segments.front().kind == SegmentKind::Lfm);
        CHECK(layout.first(SegmentKind::Postamble).offset > layout.data_block(39).end());

        auto back = FrameLayout::from_json(layout.to_json());
        REQUIRE(back.segments.size() == layout.segments.size());
        CHECK(back.total_duration == layout.total_duration);
        CHECK(back.data_block(7).offset == layout.data_block(7).offset);
    }

    TEST_CASE("frame waveform: silences are exactly zero and payload size is checked")
    {
        auto c = OfdmConfig::defaults();
        auto bits = random_bits(c.payload_bits(), 3);
        auto f = build_frame(c, bits, 9);
        CHECK(f.waveform.size() == to_samples(f.layout.total_duration, c.analog_rate));
        for (const auto& s : f.layout.silences()) {
            const auto a = to_samples(s.offset, c.analog_rate);
            const auto b = to_samples(s.end(), c.analog_rate);
            CHECK(std::all_of(f.waveform.samples.begin() + static_cast<std::ptrdiff_t>(a),
                              f.waveform.samples.begin() + static_cast<std::ptrdiff_t>(b), [](double v) { return v == 0.0; }));
        }
        bits.pop_back();
        CHECK_THROWS_AS(build_frame(c, bits, 9), InvalidArgument);
    }

    TEST_CASE("maximal-length sequence")
    {
        auto m = msequence(10);
        REQUIRE(m.size() == 1023);
        CHECK(std::count(m.begin(), m.end(), 1) == 512);
        // two-valued periodic autocorrelation
        for (std::size_t lag = 1; lag < 1023; lag += 97) {
            int acc = 0;
            for (std::size_t i = 0; i < 1023; ++i) acc += (m[i] ? -1 : 1) * (m[(i + lag) % 1023] ? -1 : 1);
            CHECK(acc == -1);
        }
    }

    TEST_CASE("synchronization on a noiseless delayed frame")
    {
        auto c = baseband_rate_config();
        auto f = build_frame(c, random_bits(c.payload_bits(), 5), 5);
        for (std::size_t d : {0ul, 1ul, 1234ul, 20000ul}) {
            auto rx = delayed(f.waveform, d, 1000);
            CHECK(std::abs(synchronize(rx, c) - static_cast<std::ptrdiff_t>(d)) <= 1);
        }
    }

    TEST_CASE("synchronization at 10 dB in-band SNR")
    {
        auto c = baseband_rate_config(2);
        auto f = build_frame(c, random_bits(c.payload_bits(), 6), 6);
        // unit signal power over 6 kHz; noise density set for 10 dB inside that band
        const double variance = 0.1 * (c.adc_rate / 2.0) / c.bandwidth();
        int hits = 0;
        for (unsigned t = 0; t < 50; ++t) {
            const std::size_t d = 5000 + 311 * t;
            auto rx = delayed(f.waveform, d, 5000);
            auto noise = oracle::gaussian(rx.size(), std::sqrt(variance), 1000 + t);
            for (std::size_t i = 0; i < rx.size(); ++i) rx.samples[i] += noise[i];
            hits += std::abs(synchronize(rx, c) - static_cast<std::ptrdiff_t>(d)) <= 2;
        }
        CHECK(hits >= 48);
    }

    TEST_CASE("synchronization reports pure noise as not found")
    {
        auto c = baseband_rate_config(2);
        RealSignal rx(oracle::gaussian(static_cast<std::size_t>(3.0 * c.adc_rate), 1.0, 3), c.adc_rate);
        CHECK_THROWS_AS(synchronize(rx, c), NotFound);
        RealSignal silent(std::vector<double>(200000, 0.0), c.adc_rate);
        CHECK_THROWS_AS(synchronize(silent, c), NotFound);
    }

    TEST_CASE("noiseless loopback demodulation returns the transmitted symbols")
    {
        auto c = baseband_rate_config();
        auto data = random_qpsk(c.data_set.size(), 21);
        auto pilots = pilot_symbols(c);
        auto block = modulate_block(c, data, pilots);
        auto rx = delayed(block, 100, 100);
        auto d = demodulate_block(rx, c, 100);
        auto tx = all_bins(c, data, pilots);
        double err = 0.0, null_power = 0.0, data_power = 0.0;
        for (std::size_t i = 0; i < tx.size(); ++i) err += std::norm(d.bins[i] - tx[i]);
        CHECK(std::sqrt(err / static_cast<double>(tx.size())) < 1e-6);
        for (int k : c.null_set) null_power += std::norm(d.bins[static_cast<std::size_t>(k + 512)]);
        for (int k : c.data_set) data_power += std::norm(d.bins[static_cast<std::size_t>(k + 512)]);
        null_power /= static_cast<double>(c.null_set.size());
        data_power /= static_cast<double>(c.data_set.size());
        CHECK(null_power < 1e-3 * data_power);

        CHECK_THROWS_AS(demodulate_block(rx, c, -1), InvalidArgument);
        CHECK_THROWS_AS(demodulate_block(rx, c, 201), InvalidArgument);
    }

    TEST_CASE("two-tap channel: each bin carries H(f_k) s_k")
    {
        auto c = baseband_rate_config();
        auto data = random_qpsk(c.data_set.size(), 22);
        auto pilots = pilot_symbols(c);
        auto block = modulate_block(c, data, pilots);
        ChannelSpec ch;
        ch.taps = {Tap{0.0, {1.0, 0.0}}, Tap{0.001, {0.5, 0.0}}};
        auto rx = apply_channel(delayed(block, 0, 0), ch);
        auto d = demodulate_block(rx, c, 0);
        auto tx = all_bins(c, data, pilots);
        const std::vector<std::pair<double, oracle::cd>> taps{{0.0, 1.0}, {0.001, 0.5}};
        double worst = 0.0;
        for (int k : c.active_set()) {
            const auto h = oracle::tap_response(taps, subcarrier_frequency(c, k));
            const auto expect = h * tx[static_cast<std::size_t>(k + 512)];
            worst = std::max(worst, std::abs(d.bins[static_cast<std::size_t>(k + 512)] - expect) / std::abs(expect));
        }
        CHECK(worst < 1e-4);
    }

    TEST_CASE("LS estimate on a flat channel")
    {
        auto c = OfdmConfig::defaults();
        auto tx = pilot_symbols(c);
        const cdouble g(0.3, -0.8);
        std::vector<cdouble> rx(tx.size());
        for (std::size_t i = 0; i < tx.size(); ++i) rx[i] = g * tx[i];
        auto est = ls_channel_estimate(rx, tx, c);
        CHECK(est.subcarriers == c.active_set());
        for (auto& v : est.gains) CHECK(std::abs(v - g) < 1e-12);
        CHECK(est.noise_variance == 0.0);

        tx[3] = 0.0;
        CHECK_THROWS_AS(ls_channel_estimate(rx, tx, c), InvalidArgument);
    }

    TEST_CASE("LS interpolation tracks a two-tap channel with pilots every fourth subcarrier")
    {
        auto c = OfdmConfig::defaults();
        auto active = c.active_set();
        c.pilot_set.clear();
        c.data_set.clear();
        for (std::size_t i = 0; i < active.size(); ++i) (i % 4 == 0 ? c.pilot_set : c.data_set).push_back(active[i]);
        c.pilot_set.push_back(c.data_set.back());
        c.data_set.pop_back();
        const std::vector<std::pair<double, oracle::cd>> taps{{0.0, 1.0}, {0.001, 0.5}};
        auto tx = pilot_symbols(c);
        std::vector<cdouble> rx(tx.size());
        for (std::size_t i = 0; i < tx.size(); ++i)
            rx[i] = oracle::tap_response(taps, subcarrier_frequency(c, c.pilot_set[i])) * tx[i];
        auto est = ls_channel_estimate(rx, tx, c);
        double err = 0.0, ref = 0.0;
        for (int k : c.data_set) {
            auto h = oracle::tap_response(taps, subcarrier_frequency(c, k));
            err += std::norm(est.gain(k) - h);
            ref += std::norm(h);
        }
        CHECK(std::sqrt(err / ref) < 0.02);
    }

    TEST_CASE("null-subcarrier noise variance on pure noise")
    {
        auto c = baseband_rate_config();
        const double sigma2 = 0.04;
        const std::size_t nt = c.symbol_samples(c.adc_rate), ng = c.guard_samples(c.adc_rate);
        RealSignal rx(oracle::gaussian(40 * (nt + ng), std::sqrt(sigma2), 99), c.adc_rate);
        auto tx = pilot_symbols(c);
        double acc = 0.0;
        for (std::size_t b = 0; b < 40; ++b) {
            auto d = demodulate_block(rx, c, static_cast<std::ptrdiff_t>(b * (nt + ng)));
            acc += ls_channel_estimate(d.on(c.pilot_set), tx, c, d.on(c.null_set)).noise_variance;
        }
        // folded window sums nt + ng white samples; the receiver then divides by tx_scale * nt
        const double expect =
            sigma2 * static_cast<double>(nt + ng) / std::pow(c.tx_scale() * static_cast<double>(nt), 2);
        CHECK(std::abs(acc / 40.0 - expect) < 0.1 * expect);
    }

    TEST_CASE("LMMSE limits")
    {
        auto c = OfdmConfig::defaults();
        ChannelEstimate est;
        est.subcarriers = c.active_set();
        est.gains.assign(est.subcarriers.size(), cdouble(0.4, 0.7));
        std::vector<cdouble> y{{0.3, -0.2}, {-1.1, 0.5}};
        std::vector<int> ks{c.data_set[0], c.data_set[1]};
        auto zf = lmmse_equalize(y, ks, est);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(zf[i] - y[i] / cdouble(0.4, 0.7)) < 1e-12);

        est.noise_variance = 1e-9;
        auto near = lmmse_equalize(y, ks, est);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(near[i] - zf[i]) < 1e-8);

        est.gains.assign(est.subcarriers.size(), 0.0);
        est.noise_variance = 0.5;
        for (auto v : lmmse_equalize(y, ks, est)) CHECK(v == cdouble{});
    }

    TEST_CASE("LMMSE at 20 dB on a flat channel")
    {
        auto c = OfdmConfig::defaults();
        const std::size_t n = 100000;
        auto bits = random_bits(2 * n, 31);
        auto s = map_symbols(bits, Modulation::Qpsk);
        const cdouble h(0.6, 0.8);
        const double var = 0.01;
        std::mt19937_64 rng(32);
        std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
        std::vector<cdouble> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = h * s[i] + cdouble(g(rng), g(rng));
        ChannelEstimate est;
        est.subcarriers = c.active_set();
        est.gains.assign(est.subcarriers.size(), h);
        est.noise_variance = var;
        std::vector<int> ks(n, c.data_set[0]);
        auto eq = lmmse_equalize(y, ks, est);
        auto d = demap_symbols(eq, Modulation::Qpsk, var);
        std::size_t symbol_errors = 0;
        for (std::size_t i = 0; i < n; ++i) symbol_errors += (d.bits[2 * i] != bits[2 * i]) || (d.bits[2 * i + 1] != bits[2 * i + 1]);
        CHECK(static_cast<double>(symbol_errors) / static_cast<double>(n) < 1e-3);
    }

    TEST_CASE("hard decisions ignore a common complex scale")
    {
        auto c = OfdmConfig::defaults();
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g;
        const std::size_t n = c.data_set.size();
        std::vector<cdouble> y(n);
        for (auto& v : y) v = {g(rng), g(rng)};
        ChannelEstimate est;
        est.subcarriers = c.active_set();
        for (std::size_t i = 0; i < est.subcarriers.size(); ++i) est.gains.push_back({1.0 + 0.3 * g(rng), 0.3 * g(rng)});
        const cdouble a(-0.7, 1.9);
        auto scaled_est = est;
        for (auto& v : scaled_est.gains) v *= a;
        auto scaled_y = y;
        for (auto& v : scaled_y) v *= a;
        for (auto scheme : {Modulation::Qpsk, Modulation::Qam16}) {
            auto d1 = demap_symbols(lmmse_equalize(y, c.data_set, est), scheme, 0.0).bits;
            auto d2 = demap_symbols(lmmse_equalize(scaled_y, c.data_set, scaled_est), scheme, 0.0).bits;
            CHECK(d1 == d2);
        }
    }

    TEST_CASE("loopback chain recovers the payload through the analog stage and ADC")
    {
        ExperimentConfig cfg;
        cfg.ofdm.postamble_gap = 0.5;
        cfg.channel.taps = {Tap{0.01, {1.0, 0.0}}};
        cfg.frontends = {FrontendConfig{}};
        auto r = simulate_reception(cfg, 0);
        RunSummary s;
        auto blocks = receive_frame(r.received, cfg, cfg.frontends[0], std::span<const std::uint8_t>(r.payload), &s);
        CHECK(s.synchronized);
        CHECK(s.frame_start == 960);
        for (const auto& b : blocks) {
            CHECK(b.bit_errors == 0);
            CHECK(b.ber == 0.0);
        }
    }
}
