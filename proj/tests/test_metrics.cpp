#include <doctest.h>

#include <cmath>
#include <limits>

#include "manp/errors.hpp"
#include "manp/experiment.hpp"
#include "manp/metrics.hpp"
#include "oracle.hpp"

using namespace manp;

namespace {

struct Scene {
    OfdmConfig config;
    FrameLayout layout;
    RealSignal frame;  // at adc_rate, frame time 0 at sample 0
};

Scene make_scene(double amplitude = 1.0)
{
    Scene s;
    s.config = OfdmConfig::defaults();
    s.config.modulation_per_block.assign(4, Modulation::Qpsk);
    s.config.analog_rate = s.config.adc_rate;
    auto f = build_frame(s.config, random_bits(s.config.payload_bits(), 1), 1);
    s.layout = f.layout;
    s.frame = f.waveform;
    for (auto& v : s.frame.samples) v *= amplitude;
    return s;
}

RealSignal plus_noise(const RealSignal& x, double power, unsigned seed)
{
    RealSignal y = x;
    auto n = oracle::gaussian(x.size(), std::sqrt(power), seed);
    for (std::size_t i = 0; i < y.size(); ++i) y.samples[i] += n[i];
    return y;
}

}  // namespace

TEST_SUITE("metrics")
{
    TEST_CASE("silence-interval noise power")
    {
        auto s = make_scene();
        auto rx = plus_noise(s.frame, 0.01, 2);
        const double p = noise_power_from_silence(rx, s.layout, 0.05);
        CHECK(std::abs(p - 0.01) <= 0.05 * 0.01);

        CHECK(noise_power_from_silence(s.frame, s.layout, 0.05) < 1e-12);
        CHECK_THROWS_AS(noise_power_from_silence(rx, s.layout, 10.0), NotAvailable);
        CHECK_THROWS_AS(noise_power_from_silence(rx, s.layout, -1.0), InvalidArgument);
    }

    TEST_CASE("noise power follows the frame clock")
    {
        auto s = make_scene();
        auto rx = plus_noise(s.frame, 0.01, 3);
        // prepend 0.37 s of loud samples and move the frame origin accordingly
        RealSignal shifted = rx;
        shifted.samples.insert(shifted.samples.begin(), static_cast<std::size_t>(0.37 * rx.sample_rate), 5.0);
        shifted.start_time = -0.37;
        CHECK(noise_power_from_silence(shifted, s.layout, 0.05) ==
              doctest::Approx(noise_power_from_silence(rx, s.layout, 0.05)).epsilon(1e-12));
    }

    TEST_CASE("SNR from powers")
    {
        CHECK(snr_db_from_powers(2.0, 1.0) == 0.0);
        CHECK(snr_db_from_powers(11.0, 1.0) == doctest::Approx(10.0).epsilon(1e-15));
        CHECK(snr_db_from_powers(1.0, 1.0) == -std::numeric_limits<double>::infinity());
        CHECK(snr_db_from_powers(0.5, 1.0) == -std::numeric_limits<double>::infinity());
        CHECK_THROWS_AS(snr_db_from_powers(1.0, 0.0), InvalidArgument);
    }

    TEST_CASE("block SNR on constructed powers")
    {
        auto s = make_scene();
        RealSignal rx(std::vector<double>(s.frame.size(), 0.0), s.frame.sample_rate);
        const auto& seg = s.layout.data_block(2);
        const auto a = static_cast<std::size_t>(rx.index_of(seg.offset));
        const auto b = static_cast<std::size_t>(rx.index_of(seg.offset + s.layout.symbol_duration));
        for (std::size_t i = a; i < b; ++i) rx.samples[i] = i % 2 ? 1.0 : -1.0;
        CHECK(block_snr(rx, s.layout, 2, 0.5) == 0.0);
        CHECK(block_snr(rx, s.layout, 2, 1.0) == -std::numeric_limits<double>::infinity());
        CHECK_THROWS_AS(block_snr(rx, s.layout, 2, 0.0), InvalidArgument);
        CHECK_THROWS_AS(block_snr(rx, s.layout, 2, -1.0), InvalidArgument);
    }

    TEST_CASE("block SNR with signal at ten times the noise")
    {
        // block power (signal plus noise) ten times the noise power
        auto s = make_scene(std::sqrt(0.09));
        auto rx = plus_noise(s.frame, 0.01, 4);
        const double pn = noise_power_from_silence(rx, s.layout, 0.05);
        for (std::size_t b = 0; b < 4; ++b) {
            const double snr = block_snr(rx, s.layout, b, pn);
            CHECK(std::abs(snr - 10.0 * std::log10(9.0)) <= 0.5);
        }
    }

    TEST_CASE("block SNR grows with signal power")
    {
        const auto noise = oracle::gaussian(make_scene().frame.size(), 0.1, 5);
        double previous = -std::numeric_limits<double>::infinity();
        for (double amp : {0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 3.0}) {
            auto s = make_scene(amp);
            for (std::size_t i = 0; i < noise.size(); ++i) s.frame.samples[i] += noise[i];
            const double snr = block_snr(s.frame, s.layout, 1, 0.01);
            CHECK(snr >= previous);
            previous = snr;
        }
    }

    TEST_CASE("bit error rate")
    {
        auto bits = random_bits(1344, 6);
        CHECK(block_ber(bits, bits).ber == 0.0);
        auto flipped = bits;
        for (auto& b : flipped) b ^= 1;
        auto all = block_ber(flipped, bits);
        CHECK(all.ber == 1.0);
        CHECK(all.bit_errors == 1344);
        auto one = bits;
        one[700] ^= 1;
        auto e = block_ber(one, bits);
        CHECK(e.bit_errors == 1);
        CHECK(e.ber == 1.0 / 1344.0);
        CHECK_THROWS_AS(block_ber(std::span(bits).first(10), bits), InvalidArgument);
    }

    TEST_CASE("frame BER weights blocks by their bits")
    {
        std::vector<BlockMetrics> blocks;
        std::size_t errors = 0, bits = 0;
        double weighted = 0.0;
        for (std::size_t i = 0; i < 40; ++i) {
            BlockMetrics m;
            m.bits = i < 20 ? 1344 : 2688;
            m.bit_errors = (i * 37) % 101;
            m.ber = static_cast<double>(m.bit_errors) / static_cast<double>(m.bits);
            errors += m.bit_errors;
            bits += m.bits;
            weighted += *m.ber * static_cast<double>(m.bits);
            blocks.push_back(m);
        }
        CHECK(frame_ber(blocks) == static_cast<double>(errors) / static_cast<double>(bits));
        CHECK(frame_ber(blocks) == doctest::Approx(weighted / static_cast<double>(bits)).epsilon(1e-15));
    }

    TEST_CASE("mean SNR skips absent and -inf blocks")
    {
        std::vector<BlockMetrics> blocks(4);
        blocks[0].snr_db = 3.0;
        blocks[1].snr_db = -std::numeric_limits<double>::infinity();
        blocks[3].snr_db = 5.0;
        CHECK(*mean_snr_db(blocks) == 4.0);
        CHECK_FALSE(mean_snr_db(std::span(blocks).subspan(1, 2)).has_value());
    }
}
