#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "manp/dsp.hpp"
#include "manp/ofdm.hpp"

namespace manp {
namespace {

bool whole_samples(double duration, double rate)
{
    const double n = duration * rate;
    return std::abs(n - std::round(n)) <= 1e-6 * std::max(1.0, std::abs(n));
}

}  // namespace

std::size_t to_samples(double duration, double rate) noexcept
{
    const double n = std::round(duration * rate);
    return n > 0.0 ? static_cast<std::size_t>(n) : 0;
}

std::size_t bits_per_symbol(Modulation m) noexcept { return m == Modulation::Qpsk ? 2 : 4; }

const char* to_string(Modulation m) noexcept { return m == Modulation::Qpsk ? "QPSK" : "16QAM"; }

Modulation modulation_from_string(const std::string& name)
{
    if (name == "QPSK" || name == "qpsk") return Modulation::Qpsk;
    if (name == "16QAM" || name == "16qam" || name == "16-QAM") return Modulation::Qam16;
    throw InvalidArgument("unknown modulation '" + name + "'");
}

SubcarrierPlan make_subcarrier_plan(std::size_t n, std::size_t n_pilots, std::size_t nulls_low, std::size_t nulls_high,
                                    std::size_t nulls_centre)
{
    if (nulls_low + nulls_high + nulls_centre + n_pilots > n)
        throw InvalidArgument("make_subcarrier_plan: more nulls and pilots than subcarriers");
    const int half = static_cast<int>(n / 2);
    std::set<int> nulls;
    for (std::size_t i = 0; i < nulls_low; ++i) nulls.insert(-half + static_cast<int>(i));
    for (std::size_t i = 0; i < nulls_high; ++i) nulls.insert(half - 1 - static_cast<int>(i));
    const int c0 = -static_cast<int>(nulls_centre / 2);
    for (std::size_t i = 0; i < nulls_centre; ++i) nulls.insert(c0 + static_cast<int>(i));

    std::vector<int> active;
    for (int k = -half; k < half; ++k)
        if (!nulls.count(k)) active.push_back(k);
    if (n_pilots > active.size()) throw InvalidArgument("make_subcarrier_plan: more pilots than active subcarriers");

    SubcarrierPlan plan;
    plan.nulls.assign(nulls.begin(), nulls.end());
    std::vector<bool> is_pilot(active.size(), false);
    if (n_pilots == 1) {
        is_pilot[0] = true;
    } else if (n_pilots > 1) {
        const double step = static_cast<double>(active.size() - 1) / static_cast<double>(n_pilots - 1);
        for (std::size_t i = 0; i < n_pilots; ++i)
            is_pilot[static_cast<std::size_t>(std::llround(static_cast<double>(i) * step))] = true;
    }
    for (std::size_t i = 0; i < active.size(); ++i) (is_pilot[i] ? plan.pilots : plan.data).push_back(active[i]);
    return plan;
}

OfdmConfig OfdmConfig::defaults()
{
    OfdmConfig c;
    auto plan = make_subcarrier_plan(c.n_subcarriers, 256, 40, 40, 16);
    c.data_set = std::move(plan.data);
    c.pilot_set = std::move(plan.pilots);
    c.null_set = std::move(plan.nulls);
    c.modulation_per_block.assign(20, Modulation::Qpsk);
    c.modulation_per_block.insert(c.modulation_per_block.end(), 20, Modulation::Qam16);
    return c;
}

std::size_t OfdmConfig::symbol_samples(double rate) const { return to_samples(symbol_duration(), rate); }

std::size_t OfdmConfig::guard_samples(double rate) const { return to_samples(guard_duration, rate); }

std::vector<int> OfdmConfig::active_set() const
{
    std::vector<int> a(data_set);
    a.insert(a.end(), pilot_set.begin(), pilot_set.end());
    std::sort(a.begin(), a.end());
    return a;
}

std::size_t OfdmConfig::bits_in_block(std::size_t block) const
{
    return data_set.size() * bits_per_symbol(modulation_per_block.at(block));
}

std::size_t OfdmConfig::payload_bits() const
{
    std::size_t total = 0;
    for (std::size_t b = 0; b < num_blocks(); ++b) total += bits_in_block(b);
    return total;
}

double OfdmConfig::tx_scale() const
{
    const double active = static_cast<double>(data_set.size() + pilot_set.size());
    return active > 0.0 ? 1.0 / std::sqrt(2.0 * active) : 0.0;
}

std::vector<std::string> OfdmConfig::problems() const
{
    std::vector<std::string> p;
    auto need = [&p](bool ok, std::string msg) {
        if (!ok) p.push_back(std::move(msg));
    };

    need(is_power_of_two(n_subcarriers) && n_subcarriers >= 4, "ofdm.n_subcarriers must be a power of two >= 4");
    need(subcarrier_spacing > 0.0, "ofdm.subcarrier_spacing must be positive");
    need(center_frequency > 0.0, "ofdm.center_frequency must be positive");
    need(guard_duration >= 0.0, "ofdm.guard_duration must be non-negative");
    need(analog_rate > 0.0, "ofdm.analog_rate must be positive");
    need(adc_rate > 0.0, "ofdm.adc_rate must be positive");
    need(!modulation_per_block.empty(), "ofdm.modulation_per_block must list at least one block");
    need(!pilot_set.empty(), "ofdm.pilot_set must not be empty");
    need(!data_set.empty(), "ofdm.data_set must not be empty");

    // Partition of [-N/2, N/2).
    const int half = static_cast<int>(n_subcarriers / 2);
    std::vector<int> seen(n_subcarriers, 0);
    bool in_range = true;
    for (const auto* set : {&data_set, &pilot_set, &null_set})
        for (int k : *set) {
            if (k < -half || k >= half) {
                in_range = false;
                continue;
            }
            ++seen[static_cast<std::size_t>(k + half)];
        }
    need(in_range, "ofdm subcarrier sets contain indices outside [-N/2, N/2)");
    need(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }),
         "ofdm data/pilot/null sets must partition [-N/2, N/2) without overlap");
    for (const auto* set : {&data_set, &pilot_set, &null_set})
        need(std::is_sorted(set->begin(), set->end()), "ofdm subcarrier sets must be sorted ascending");

    if (subcarrier_spacing > 0.0 && analog_rate > 0.0 && adc_rate > 0.0) {
        const double ratio = analog_rate / adc_rate;
        need(ratio >= 1.0 && std::abs(ratio - std::round(ratio)) < 1e-9,
             "ofdm.analog_rate must be an integer multiple of ofdm.adc_rate");
        for (double rate : {analog_rate, adc_rate}) {
            const std::string r = std::to_string(static_cast<long long>(rate));
            need(whole_samples(symbol_duration(), rate), "symbol duration 1/subcarrier_spacing is not a whole number of samples at " + r + " Hz");
            need(whole_samples(guard_duration, rate), "ofdm.guard_duration is not a whole number of samples at " + r + " Hz");
            need(whole_samples(cp_duration, rate), "ofdm.cp_duration is not a whole number of samples at " + r + " Hz");
            for (auto [name, d] : {std::pair{"silence_between_preambles", silence_between_preambles},
                                   std::pair{"silence_preamble_to_data", silence_preamble_to_data},
                                   std::pair{"postamble_gap", postamble_gap}, std::pair{"tail_silence", tail_silence},
                                   std::pair{"lfm.duration", lfm.duration}, std::pair{"hfm.duration", hfm.duration}})
                need(d >= 0.0 && whole_samples(d, rate),
                     std::string("ofdm.") + name + " must be non-negative and a whole number of samples at " + r + " Hz");
            need(mseq.chip_rate > 0.0 && whole_samples(1.0 / mseq.chip_rate, rate),
                 "ofdm.mseq.chip_rate must give a whole number of samples per chip at " + r + " Hz");
        }
        const double carrier_bin = center_frequency / subcarrier_spacing;
        need(std::abs(carrier_bin - std::round(carrier_bin)) < 1e-9,
             "ofdm.center_frequency must be an integer multiple of the subcarrier spacing");
        need(center_frequency - bandwidth() / 2.0 > 0.0 && center_frequency + bandwidth() / 2.0 < adc_rate / 2.0,
             "ofdm signal band must lie inside (0, adc_rate/2)");
        need(cp_duration <= symbol_duration(), "ofdm.cp_duration must not exceed the symbol duration");
        for (auto [name, chirp] : {std::pair{"lfm", &lfm}, std::pair{"hfm", &hfm}})
            need(chirp->f_start > 0.0 && chirp->f_end > 0.0 && chirp->f_start < adc_rate / 2.0 && chirp->f_end < adc_rate / 2.0,
                 std::string("ofdm.") + name + " frequencies must lie inside (0, adc_rate/2)");
        need(lfm.duration > 0.0, "ofdm.lfm.duration must be positive");
    }
    need(mseq.degree >= 3 && mseq.degree <= 16, "ofdm.mseq.degree must lie in [3, 16]");
    need(interleaver_depth >= 1 && !data_set.empty() && data_set.size() % interleaver_depth == 0,
         "ofdm.interleaver_depth must divide the number of data subcarriers");
    need(adc.num_taps >= 1, "ofdm.adc.num_taps must be positive");
    need(adc.cutoff_fraction > 0.0 && adc.cutoff_fraction < 0.5, "ofdm.adc.cutoff_fraction must lie in (0, 0.5)");
    need(adc.stopband_db > 0.0, "ofdm.adc.stopband_db must be positive");
    return p;
}

void OfdmConfig::validate() const
{
    auto p = problems();
    if (!p.empty()) throw ConfigError(std::move(p));
}

double subcarrier_frequency(const OfdmConfig& config, int k)
{
    const int half = static_cast<int>(config.n_subcarriers / 2);
    if (k < -half || k >= half)
        throw InvalidArgument("subcarrier_frequency: index " + std::to_string(k) + " outside [-N/2, N/2)");
    return config.center_frequency + static_cast<double>(k) * config.subcarrier_spacing;
}

std::vector<cdouble> pilot_symbols(const OfdmConfig& config)
{
    std::mt19937_64 rng(config.pilot_seed);
    std::vector<std::uint8_t> bits(2 * config.pilot_set.size());
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
    return map_symbols(bits, Modulation::Qpsk);
}

}  // namespace manp
