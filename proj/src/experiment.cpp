#include "manp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "manp/dsp.hpp"
#include "manp/errors.hpp"
#include "manp/waveform_io.hpp"

namespace manp {

using nlohmann::json;

const char* to_string(FrontendMode mode) noexcept
{
    switch (mode) {
    case FrontendMode::None: return "none";
    case FrontendMode::Manp: return "manp";
    case FrontendMode::Blanking: return "blanking";
    case FrontendMode::Clipping: return "clipping";
    }
    return "?";
}

double FrontendConfig::threshold_factor() const
{
    if (k > 0.0) return k;
    return mode == FrontendMode::Blanking ? 6.0 : 4.0;
}

std::vector<std::string> ExperimentConfig::problems() const
{
    std::vector<std::string> p = ofdm.problems();
    for (auto& s : channel.problems()) p.push_back(std::move(s));
    if (trials < 1) p.push_back("trials must be >= 1");
    if (frontends.empty()) p.push_back("frontends must list at least one front-end");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < frontends.size(); ++i) {
        const auto& f = frontends[i];
        const std::string at = "frontends[" + std::to_string(i) + "]";
        if (f.mode == FrontendMode::Manp)
            for (auto& s : f.manp.problems()) p.push_back(at + "." + s);
        if (f.mode == FrontendMode::Blanking || f.mode == FrontendMode::Clipping) {
            if (!(f.baseline_window > 0.0) || !std::isfinite(f.baseline_window))
                p.push_back(at + ".window_s must be positive");
            if (!(f.k >= 0.0) || !std::isfinite(f.k)) p.push_back(at + ".k must be >= 0");
        }
        if (std::find(labels.begin(), labels.end(), f.label()) != labels.end())
            p.push_back(at + ".name '" + f.label() + "' is used twice");
        labels.push_back(f.label());
    }
    if (!(silence_guard >= 0.0) || !std::isfinite(silence_guard)) p.push_back("silence_guard_s must be >= 0");
    if (!(sync.detection_threshold > 0.0 && sync.detection_threshold < 1.0))
        p.push_back("sync.detection_threshold must lie in (0, 1)");
    if (!(sync.refine_window >= 0.0)) p.push_back("sync.refine_window_s must be >= 0");
    if (sync.bandpass_taps % 2 == 0) p.push_back("sync.bandpass_taps must be odd");
    if (input_waveform && !std::filesystem::exists(*input_waveform))
        p.push_back("input_waveform '" + *input_waveform + "' does not exist");
    if (reference_payload && !std::filesystem::exists(*reference_payload))
        p.push_back("reference_payload '" + *reference_payload + "' does not exist");
    return p;
}

void ExperimentConfig::validate() const
{
    auto p = problems();
    if (!p.empty()) throw ConfigError(std::move(p));
}

ExperimentConfig default_experiment_config()
{
    ExperimentConfig c;
    c.channel.taps = {Tap{0.02, {1.0, 0.0}}, Tap{0.0215, {0.45, 0.0}}, Tap{0.0242, {0.25, 0.0}}};
    c.channel.background_noise_power = 0.5;
    c.channel.impulse_model = BernoulliGaussian{0.005, 100.0};
    FrontendConfig none;
    FrontendConfig manp;
    manp.mode = FrontendMode::Manp;
    c.frontends = {none, manp};
    c.trials = 20;
    c.seed = 2019;
    c.output_path = "results.csv";
    c.scenario = "synthetic-bernoulli-gaussian";
    return c;
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

class Reader {
public:
    std::vector<std::string> errors;

    bool object(const json& j, const std::string& path)
    {
        if (j.is_object()) return true;
        errors.push_back(path + ": expected an object");
        return false;
    }

    void allow(const json& j, const std::string& path, std::initializer_list<const char*> keys)
    {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
            if (!known) errors.push_back(join(path, it.key()) + ": unknown key");
        }
    }

    void number(const json& j, const std::string& path, const char* key, double& out)
    {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number()) {
            errors.push_back(join(path, key) + ": expected a number");
            return;
        }
        out = v.get<double>();
    }

    template <typename U>
    void count(const json& j, const std::string& path, const char* key, U& out)
    {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (v.is_number_unsigned()) {
            out = static_cast<U>(v.get<std::uint64_t>());
        } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
            out = static_cast<U>(v.get<std::int64_t>());
        } else {
            errors.push_back(join(path, key) + ": expected a non-negative integer");
        }
    }

    void integer(const json& j, const std::string& path, const char* key, int& out)
    {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_number_integer()) {
            errors.push_back(join(path, key) + ": expected an integer");
            return;
        }
        out = v.get<int>();
    }

    void string(const json& j, const std::string& path, const char* key, std::string& out)
    {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_string()) {
            errors.push_back(join(path, key) + ": expected a string");
            return;
        }
        out = v.get<std::string>();
    }

    void flag(const json& j, const std::string& path, const char* key, bool& out)
    {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_boolean()) {
            errors.push_back(join(path, key) + ": expected true or false");
            return;
        }
        out = v.get<bool>();
    }

    void int_list(const json& j, const std::string& path, const char* key, std::vector<int>& out)
    {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer(); })) {
            errors.push_back(join(path, key) + ": expected an array of integers");
            return;
        }
        out = v.get<std::vector<int>>();
    }

    static std::string join(const std::string& path, const std::string& key)
    {
        return path.empty() ? key : path + "." + key;
    }
};

void read_chirp(Reader& r, const json& j, const std::string& path, ChirpSpec& c)
{
    if (!r.object(j, path)) return;
    r.allow(j, path, {"f_start_hz", "f_end_hz", "duration_s"});
    r.number(j, path, "f_start_hz", c.f_start);
    r.number(j, path, "f_end_hz", c.f_end);
    r.number(j, path, "duration_s", c.duration);
}

void read_ofdm(Reader& r, const json& j, OfdmConfig& c)
{
    const std::string path = "ofdm";
    if (!r.object(j, path)) return;
    r.allow(j, path,
            {"n_subcarriers", "subcarrier_spacing_hz", "symbol_duration_s", "bandwidth_hz", "center_frequency_hz",
             "guard_duration_s", "analog_rate_hz", "adc_rate_hz", "subcarriers", "modulation_per_block",
             "qpsk_blocks", "qam16_blocks", "silence_between_preambles_s", "silence_preamble_to_data_s",
             "postamble_gap_s", "tail_silence_s", "lfm", "hfm", "mseq", "cp_duration_s", "interleaver_depth",
             "pilot_seed", "adc"});

    r.count(j, path, "n_subcarriers", c.n_subcarriers);
    bool spacing_given = j.contains("subcarrier_spacing_hz");
    r.number(j, path, "subcarrier_spacing_hz", c.subcarrier_spacing);
    if (j.contains("symbol_duration_s")) {
        double t = 0.0;
        r.number(j, path, "symbol_duration_s", t);
        if (!(t > 0.0)) {
            r.errors.push_back("ofdm.symbol_duration_s: must be positive");
        } else if (spacing_given) {
            if (std::abs(t * c.subcarrier_spacing - 1.0) > 1e-9)
                r.errors.push_back("ofdm.symbol_duration_s: must equal 1 / subcarrier_spacing_hz");
        } else {
            c.subcarrier_spacing = 1.0 / t;
        }
    }
    double guard_default = 0.25 - 1.0 / c.subcarrier_spacing;
    c.guard_duration = guard_default;
    c.cp_duration = guard_default;
    r.number(j, path, "center_frequency_hz", c.center_frequency);
    r.number(j, path, "guard_duration_s", c.guard_duration);
    r.number(j, path, "cp_duration_s", c.cp_duration);
    r.number(j, path, "analog_rate_hz", c.analog_rate);
    r.number(j, path, "adc_rate_hz", c.adc_rate);
    if (j.contains("bandwidth_hz")) {
        double b = 0.0;
        r.number(j, path, "bandwidth_hz", b);
        if (std::abs(b - c.bandwidth()) > 1e-6 * std::max(1.0, b))
            r.errors.push_back("ofdm.bandwidth_hz: must equal n_subcarriers * subcarrier_spacing_hz");
    }

    std::size_t pilots = 256, nulls_low = 40, nulls_high = 40, nulls_centre = 16;
    bool explicit_sets = false;
    if (j.contains("subcarriers")) {
        const auto& s = j.at("subcarriers");
        const std::string sp = "ofdm.subcarriers";
        if (r.object(s, sp)) {
            r.allow(s, sp, {"pilots", "nulls_low_edge", "nulls_high_edge", "nulls_centre", "data", "pilot", "null"});
            explicit_sets = s.contains("data") || s.contains("pilot") || s.contains("null");
            if (explicit_sets) {
                if (s.contains("pilots") || s.contains("nulls_low_edge") || s.contains("nulls_high_edge") ||
                    s.contains("nulls_centre"))
                    r.errors.push_back(sp + ": give either explicit index lists or counts, not both");
                c.data_set.clear();
                c.pilot_set.clear();
                c.null_set.clear();
                r.int_list(s, sp, "data", c.data_set);
                r.int_list(s, sp, "pilot", c.pilot_set);
                r.int_list(s, sp, "null", c.null_set);
            } else {
                r.count(s, sp, "pilots", pilots);
                r.count(s, sp, "nulls_low_edge", nulls_low);
                r.count(s, sp, "nulls_high_edge", nulls_high);
                r.count(s, sp, "nulls_centre", nulls_centre);
            }
        }
    }
    if (!explicit_sets) {
        try {
            auto plan = make_subcarrier_plan(c.n_subcarriers, pilots, nulls_low, nulls_high, nulls_centre);
            c.data_set = std::move(plan.data);
            c.pilot_set = std::move(plan.pilots);
            c.null_set = std::move(plan.nulls);
        } catch (const Error& e) {
            r.errors.push_back(std::string("ofdm.subcarriers: ") + e.what());
        }
    }

    if (j.contains("modulation_per_block")) {
        if (j.contains("qpsk_blocks") || j.contains("qam16_blocks"))
            r.errors.push_back("ofdm: give either modulation_per_block or qpsk_blocks/qam16_blocks, not both");
        const auto& m = j.at("modulation_per_block");
        if (!m.is_array()) {
            r.errors.push_back("ofdm.modulation_per_block: expected an array of scheme names");
        } else {
            c.modulation_per_block.clear();
            for (std::size_t i = 0; i < m.size(); ++i) {
                try {
                    if (!m[i].is_string()) throw InvalidArgument("expected a string");
                    c.modulation_per_block.push_back(modulation_from_string(m[i].get<std::string>()));
                } catch (const Error& e) {
                    r.errors.push_back("ofdm.modulation_per_block[" + std::to_string(i) + "]: " + e.what());
                }
            }
        }
    } else if (j.contains("qpsk_blocks") || j.contains("qam16_blocks")) {
        std::size_t q = 20, x = 20;
        r.count(j, path, "qpsk_blocks", q);
        r.count(j, path, "qam16_blocks", x);
        c.modulation_per_block.assign(q, Modulation::Qpsk);
        c.modulation_per_block.insert(c.modulation_per_block.end(), x, Modulation::Qam16);
    }

    r.number(j, path, "silence_between_preambles_s", c.silence_between_preambles);
    r.number(j, path, "silence_preamble_to_data_s", c.silence_preamble_to_data);
    r.number(j, path, "postamble_gap_s", c.postamble_gap);
    r.number(j, path, "tail_silence_s", c.tail_silence);
    if (j.contains("lfm")) read_chirp(r, j.at("lfm"), "ofdm.lfm", c.lfm);
    if (j.contains("hfm")) read_chirp(r, j.at("hfm"), "ofdm.hfm", c.hfm);
    if (j.contains("mseq")) {
        const auto& m = j.at("mseq");
        if (r.object(m, "ofdm.mseq")) {
            r.allow(m, "ofdm.mseq", {"degree", "chip_rate_hz"});
            r.integer(m, "ofdm.mseq", "degree", c.mseq.degree);
            r.number(m, "ofdm.mseq", "chip_rate_hz", c.mseq.chip_rate);
        }
    }
    r.count(j, path, "interleaver_depth", c.interleaver_depth);
    r.count(j, path, "pilot_seed", c.pilot_seed);
    if (j.contains("adc")) {
        const auto& a = j.at("adc");
        if (r.object(a, "ofdm.adc")) {
            r.allow(a, "ofdm.adc", {"num_taps", "cutoff_fraction", "stopband_db"});
            r.count(a, "ofdm.adc", "num_taps", c.adc.num_taps);
            r.number(a, "ofdm.adc", "cutoff_fraction", c.adc.cutoff_fraction);
            r.number(a, "ofdm.adc", "stopband_db", c.adc.stopband_db);
        }
    }
}

void read_gain(Reader& r, const json& g, const std::string& path, cdouble& out)
{
    if (g.is_number()) {
        out = {g.get<double>(), 0.0};
    } else if (g.is_array() && g.size() == 2 && g[0].is_number() && g[1].is_number()) {
        out = {g[0].get<double>(), g[1].get<double>()};
    } else {
        r.errors.push_back(path + ": expected a number or [re, im]");
    }
}

void read_channel(Reader& r, const json& j, ChannelSpec& c)
{
    const std::string path = "channel";
    if (!r.object(j, path)) return;
    r.allow(j, path, {"taps", "background_noise_power", "impulse_model", "seed"});
    if (j.contains("taps")) {
        const auto& t = j.at("taps");
        if (!t.is_array()) {
            r.errors.push_back("channel.taps: expected an array");
        } else {
            c.taps.clear();
            for (std::size_t i = 0; i < t.size(); ++i) {
                const std::string tp = "channel.taps[" + std::to_string(i) + "]";
                if (!r.object(t[i], tp)) continue;
                r.allow(t[i], tp, {"delay_s", "gain"});
                Tap tap;
                r.number(t[i], tp, "delay_s", tap.delay);
                if (t[i].contains("gain")) read_gain(r, t[i].at("gain"), tp + ".gain", tap.gain);
                c.taps.push_back(tap);
            }
        }
    }
    r.number(j, path, "background_noise_power", c.background_noise_power);
    r.count(j, path, "seed", c.seed);
    if (j.contains("impulse_model")) {
        const auto& m = j.at("impulse_model");
        const std::string mp = "channel.impulse_model";
        if (!r.object(m, mp)) return;
        std::string type = "none";
        r.string(m, mp, "type", type);
        if (type == "none") {
            r.allow(m, mp, {"type"});
            c.impulse_model = NoImpulses{};
        } else if (type == "bernoulli_gaussian") {
            r.allow(m, mp, {"type", "probability", "impulse_power"});
            BernoulliGaussian bg;
            r.number(m, mp, "probability", bg.probability);
            r.number(m, mp, "impulse_power", bg.impulse_power);
            c.impulse_model = bg;
        } else if (type == "alpha_stable") {
            r.allow(m, mp, {"type", "alpha", "dispersion"});
            AlphaStable as;
            r.number(m, mp, "alpha", as.alpha);
            r.number(m, mp, "dispersion", as.dispersion);
            c.impulse_model = as;
        } else {
            r.errors.push_back(mp + ".type: '" + type + "' is not one of none, bernoulli_gaussian, alpha_stable");
        }
    }
}

std::optional<FrontendMode> mode_from_string(const std::string& s)
{
    for (auto m : {FrontendMode::None, FrontendMode::Manp, FrontendMode::Blanking, FrontendMode::Clipping})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

void read_frontends(Reader& r, const json& j, std::vector<FrontendConfig>& out)
{
    if (!j.is_array()) {
        r.errors.push_back("frontends: expected an array");
        return;
    }
    out.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string fp = "frontends[" + std::to_string(i) + "]";
        FrontendConfig f;
        if (j[i].is_string()) {
            auto m = mode_from_string(j[i].get<std::string>());
            if (!m) {
                r.errors.push_back(fp + ": unknown mode '" + j[i].get<std::string>() + "'");
                continue;
            }
            f.mode = *m;
            out.push_back(f);
            continue;
        }
        if (!r.object(j[i], fp)) continue;
        std::string mode;
        r.string(j[i], fp, "mode", mode);
        auto m = mode_from_string(mode);
        if (!m) {
            r.errors.push_back(fp + ".mode: '" + mode + "' is not one of none, manp, blanking, clipping");
            continue;
        }
        f.mode = *m;
        r.string(j[i], fp, "name", f.name);
        switch (f.mode) {
        case FrontendMode::None: r.allow(j[i], fp, {"mode", "name"}); break;
        case FrontendMode::Manp:
            r.allow(j[i], fp, {"mode", "name", "gamma", "beta0", "quantile_window_s", "beta_floor"});
            r.number(j[i], fp, "gamma", f.manp.gamma);
            r.number(j[i], fp, "beta0", f.manp.beta0);
            r.number(j[i], fp, "quantile_window_s", f.manp.quantile_window);
            r.number(j[i], fp, "beta_floor", f.manp.beta_floor);
            break;
        case FrontendMode::Blanking:
        case FrontendMode::Clipping:
            r.allow(j[i], fp, {"mode", "name", "window_s", "k"});
            r.number(j[i], fp, "window_s", f.baseline_window);
            r.number(j[i], fp, "k", f.k);
            break;
        }
        out.push_back(f);
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    Reader r;
    ExperimentConfig c;
    c.frontends = {FrontendConfig{}};
    if (!r.object(j, "config")) throw ConfigError(r.errors);
    r.allow(j, "",
            {"ofdm", "channel", "frontends", "trials", "seed", "output", "input_waveform", "reference_payload",
             "silence_guard_s", "sync", "scenario"});
    if (j.contains("ofdm")) read_ofdm(r, j.at("ofdm"), c.ofdm);
    if (j.contains("channel")) read_channel(r, j.at("channel"), c.channel);
    if (j.contains("frontends")) read_frontends(r, j.at("frontends"), c.frontends);
    r.count(j, "", "trials", c.trials);
    r.count(j, "", "seed", c.seed);
    r.string(j, "", "output", c.output_path);
    r.string(j, "", "scenario", c.scenario);
    if (j.contains("input_waveform")) {
        std::string s;
        r.string(j, "", "input_waveform", s);
        c.input_waveform = s;
    }
    if (j.contains("reference_payload")) {
        std::string s;
        r.string(j, "", "reference_payload", s);
        c.reference_payload = s;
    }
    r.number(j, "", "silence_guard_s", c.silence_guard);
    if (j.contains("sync")) {
        const auto& s = j.at("sync");
        if (r.object(s, "sync")) {
            r.allow(s, "sync", {"detection_threshold", "refine_window_s", "refine_with_lfm", "bandpass_taps",
                                "bandpass_margin_hz"});
            r.number(s, "sync", "detection_threshold", c.sync.detection_threshold);
            r.number(s, "sync", "refine_window_s", c.sync.refine_window);
            r.flag(s, "sync", "refine_with_lfm", c.sync.refine_with_lfm);
            r.count(s, "sync", "bandpass_taps", c.sync.bandpass_taps);
            r.number(s, "sync", "bandpass_margin_hz", c.sync.bandpass_margin);
        }
    }

    auto problems = std::move(r.errors);
    for (auto& p : c.problems()) problems.push_back(std::move(p));
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string experiment_config_to_json(const ExperimentConfig& c)
{
    const auto& o = c.ofdm;
    auto chirp = [](const ChirpSpec& s) {
        return json{{"f_start_hz", s.f_start}, {"f_end_hz", s.f_end}, {"duration_s", s.duration}};
    };
    json mods = json::array();
    for (auto m : o.modulation_per_block) mods.push_back(to_string(m));
    json ofdm = {
        {"n_subcarriers", o.n_subcarriers},
        {"subcarrier_spacing_hz", o.subcarrier_spacing},
        {"center_frequency_hz", o.center_frequency},
        {"guard_duration_s", o.guard_duration},
        {"analog_rate_hz", o.analog_rate},
        {"adc_rate_hz", o.adc_rate},
        {"subcarriers", {{"data", o.data_set}, {"pilot", o.pilot_set}, {"null", o.null_set}}},
        {"modulation_per_block", mods},
        {"silence_between_preambles_s", o.silence_between_preambles},
        {"silence_preamble_to_data_s", o.silence_preamble_to_data},
        {"postamble_gap_s", o.postamble_gap},
        {"tail_silence_s", o.tail_silence},
        {"lfm", chirp(o.lfm)},
        {"hfm", chirp(o.hfm)},
        {"mseq", {{"degree", o.mseq.degree}, {"chip_rate_hz", o.mseq.chip_rate}}},
        {"cp_duration_s", o.cp_duration},
        {"interleaver_depth", o.interleaver_depth},
        {"pilot_seed", o.pilot_seed},
        {"adc", {{"num_taps", o.adc.num_taps}, {"cutoff_fraction", o.adc.cutoff_fraction},
                 {"stopband_db", o.adc.stopband_db}}},
    };

    json taps = json::array();
    for (const auto& t : c.channel.taps)
        taps.push_back({{"delay_s", t.delay}, {"gain", {t.gain.real(), t.gain.imag()}}});
    json impulses = std::visit(
        [](const auto& m) -> json {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, BernoulliGaussian>)
                return {{"type", "bernoulli_gaussian"}, {"probability", m.probability}, {"impulse_power", m.impulse_power}};
            else if constexpr (std::is_same_v<M, AlphaStable>)
                return {{"type", "alpha_stable"}, {"alpha", m.alpha}, {"dispersion", m.dispersion}};
            else
                return {{"type", "none"}};
        },
        c.channel.impulse_model);

    json fronts = json::array();
    for (const auto& f : c.frontends) {
        json e = {{"mode", to_string(f.mode)}};
        if (!f.name.empty()) e["name"] = f.name;
        if (f.mode == FrontendMode::Manp) {
            e["gamma"] = f.manp.gamma;
            e["beta0"] = f.manp.beta0;
            e["quantile_window_s"] = f.manp.quantile_window;
            e["beta_floor"] = f.manp.beta_floor;
        } else if (f.mode != FrontendMode::None) {
            e["window_s"] = f.baseline_window;
            e["k"] = f.threshold_factor();
        }
        fronts.push_back(e);
    }

    json j = {
        {"ofdm", ofdm},
        {"channel",
         {{"taps", taps},
          {"background_noise_power", c.channel.background_noise_power},
          {"impulse_model", impulses},
          {"seed", c.channel.seed}}},
        {"frontends", fronts},
        {"trials", c.trials},
        {"seed", c.seed},
        {"output", c.output_path},
        {"silence_guard_s", c.silence_guard},
        {"scenario", c.scenario},
        {"sync",
         {{"detection_threshold", c.sync.detection_threshold},
          {"refine_window_s", c.sync.refine_window},
          {"refine_with_lfm", c.sync.refine_with_lfm},
          {"bandpass_taps", c.sync.bandpass_taps},
          {"bandpass_margin_hz", c.sync.bandpass_margin}}},
    };
    if (c.input_waveform) j["input_waveform"] = *c.input_waveform;
    if (c.reference_payload) j["reference_payload"] = *c.reference_payload;
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Simulation and receiver

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) noexcept { return mix_seed(base_seed, trial); }

std::vector<std::uint8_t> random_bits(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bits(n);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return bits;
}

Reception simulate_reception(const ExperimentConfig& config, std::size_t trial)
{
    Reception r;
    r.seed = trial_seed(config.seed, trial);
    r.payload = random_bits(config.ofdm.payload_bits(), mix_seed(r.seed, 1));
    Frame frame = build_frame(config.ofdm, r.payload, mix_seed(r.seed, 2));
    ChannelSpec channel = config.channel;
    channel.seed = mix_seed(r.seed ^ config.channel.seed, 3);
    r.received = quantize_to_float(apply_channel(frame.waveform, channel));
    return r;
}

RealSignal apply_frontend(const RealSignal& received, const OfdmConfig& ofdm, const FrontendConfig& frontend)
{
    switch (frontend.mode) {
    case FrontendMode::None: return adc(received, ofdm);
    case FrontendMode::Manp: return adc(manp_process(received, frontend.manp), ofdm);
    case FrontendMode::Blanking:
    case FrontendMode::Clipping: {
        RealSignal digital = adc(received, ofdm);
        double k = frontend.threshold_factor();
        auto thresholds = derive_baseline_thresholds(digital, frontend.baseline_window, k, k);
        return frontend.mode == FrontendMode::Blanking ? blanking(digital, thresholds) : clipping(digital, thresholds);
    }
    }
    throw InvalidArgument("apply_frontend: unknown mode");
}

std::vector<BlockMetrics> receive_frame(const RealSignal& received, const ExperimentConfig& config,
                                        const FrontendConfig& frontend, std::optional<std::span<const std::uint8_t>> reference,
                                        RunSummary* summary)
{
    const OfdmConfig& ofdm = config.ofdm;
    if (reference && reference->size() != ofdm.payload_bits())
        throw InvalidArgument("receive_frame: reference holds " + std::to_string(reference->size()) +
                              " bits, the frame carries " + std::to_string(ofdm.payload_bits()));

    RealSignal digital = apply_frontend(received, ofdm, frontend);
    const FrameLayout layout = frame_layout(ofdm);
    const double fs = digital.sample_rate;

    std::vector<BlockMetrics> blocks(ofdm.num_blocks());
    std::size_t bit_offset = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        blocks[b].block_index = b;
        blocks[b].modulation = ofdm.modulation_per_block[b];
        blocks[b].bits = ofdm.bits_in_block(b);
    }

    auto fail_all = [&] {
        for (auto& m : blocks) {
            m.snr_db.reset();
            if (reference) {
                m.bit_errors = m.bits;
                m.ber = 1.0;
            }
        }
    };

    std::ptrdiff_t start = 0;
    bool synced = true;
    try {
        start = synchronize(digital, ofdm, config.sync);
    } catch (const NotFound&) {
        synced = false;
    }

    std::optional<double> noise_power;
    if (synced) {
        RealSignal aligned;
        aligned.sample_rate = fs;
        aligned.start_time = -static_cast<double>(start) / fs;
        aligned.samples = std::move(digital.samples);
        try {
            noise_power = noise_power_from_silence(aligned, layout, config.silence_guard);
            if (!(*noise_power > 0.0)) noise_power.reset();
        } catch (const NotAvailable&) {
        }

        const auto pilots_tx = pilot_symbols(ofdm);
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            auto& m = blocks[b];
            const std::size_t nbits = m.bits;
            if (noise_power) m.snr_db = block_snr(aligned, layout, b, *noise_power);

            std::optional<std::vector<std::uint8_t>> decided;
            try {
                const auto offset = start + static_cast<std::ptrdiff_t>(std::llround(layout.data_block(b).offset * fs));
                auto demod = demodulate_block(aligned, ofdm, offset);
                auto est = ls_channel_estimate(demod.on(ofdm.pilot_set), pilots_tx, ofdm, demod.on(ofdm.null_set));
                auto eq = lmmse_equalize(demod.on(ofdm.data_set), ofdm.data_set, est);
                auto symbols = deinterleave<cdouble>(eq, ofdm.interleaver_depth);
                decided = demap_symbols(symbols, m.modulation, est.noise_variance).bits;
            } catch (const InvalidArgument&) {
                // block window runs past the recording
            }

            if (reference) {
                auto ref = reference->subspan(bit_offset, nbits);
                if (decided) {
                    auto e = block_ber(*decided, ref);
                    m.bit_errors = e.bit_errors;
                    m.ber = e.ber;
                } else {
                    m.bit_errors = nbits;
                    m.ber = 1.0;
                }
            }
            bit_offset += nbits;
        }
    } else {
        fail_all();
    }

    if (summary) {
        summary->frontend = frontend.label();
        summary->synchronized = synced;
        summary->frame_start = start;
        summary->noise_power = noise_power;
        summary->mean_snr_db = mean_snr_db(blocks);
        summary->bit_errors = 0;
        summary->bits = 0;
        for (const auto& m : blocks) {
            summary->bits += m.bits;
            summary->bit_errors += m.bit_errors;
        }
        if (reference) summary->frame_ber = frame_ber(blocks);
        else summary->bit_errors = 0;
    }
    return blocks;
}

namespace {

struct TrialOutput {
    std::vector<ResultRow> rows;
    std::vector<RunSummary> summaries;
};

TrialOutput run_on(const RealSignal& received, const ExperimentConfig& config, std::size_t run_id, std::uint64_t seed,
                   std::optional<std::span<const std::uint8_t>> reference)
{
    TrialOutput out;
    const auto digest = waveform_digest(received);
    for (const auto& f : config.frontends) {
        RunSummary s;
        s.run_id = run_id;
        s.seed = seed;
        s.input_digest = digest;
        auto blocks = receive_frame(received, config, f, reference, &s);
        for (auto& m : blocks) out.rows.push_back(ResultRow{run_id, seed, f.label(), m});
        out.summaries.push_back(std::move(s));
    }
    return out;
}

ExperimentResult collect(const ExperimentConfig& config, std::vector<TrialOutput>& trials)
{
    ExperimentResult result;
    result.scenario = config.scenario;
    for (auto& t : trials) {
        std::move(t.rows.begin(), t.rows.end(), std::back_inserter(result.rows));
        std::move(t.summaries.begin(), t.summaries.end(), std::back_inserter(result.summaries));
    }
    return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t jobs)
{
    config.validate();
    std::vector<TrialOutput> outputs(config.trials);
    std::vector<std::exception_ptr> failures(config.trials);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t t = next++; t < config.trials; t = next++) {
            try {
                Reception r = simulate_reception(config, t);
                outputs[t] = run_on(r.received, config, t, r.seed, std::span<const std::uint8_t>(r.payload));
            } catch (...) {
                failures[t] = std::current_exception();
            }
        }
    };

    jobs = std::clamp<std::size_t>(jobs, 1, config.trials);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
    return collect(config, outputs);
}

ExperimentResult ingest_waveform(const std::filesystem::path& waveform, const ExperimentConfig& config,
                                 const std::optional<std::filesystem::path>& reference_payload)
{
    ExperimentConfig cfg = config;
    cfg.input_waveform.reset();
    cfg.reference_payload.reset();
    cfg.validate();

    RealSignal rec = read_waveform(waveform);
    const double analog = cfg.ofdm.analog_rate;
    if (rec.sample_rate < analog * (1.0 - 1e-12)) {
        char msg[256];
        std::snprintf(msg, sizeof msg,
                      "ingest: '%s' is sampled at %.6g Hz, below the %.6g Hz analog rate the front-ends run at",
                      waveform.string().c_str(), rec.sample_rate, analog);
        throw InvalidArgument(msg);
    }
    if (std::abs(rec.sample_rate - analog) > 1e-9 * analog) rec = resample(rec, analog, true);
    rec.start_time = 0.0;

    std::optional<std::vector<std::uint8_t>> reference;
    if (reference_payload) {
        reference = read_payload_bits(*reference_payload);
        if (reference->size() != cfg.ofdm.payload_bits())
            throw FormatError("ingest: reference payload '" + reference_payload->string() + "' holds " +
                              std::to_string(reference->size()) + " bits, the frame carries " +
                              std::to_string(cfg.ofdm.payload_bits()));
    }

    std::vector<TrialOutput> outputs;
    std::optional<std::span<const std::uint8_t>> ref;
    if (reference) ref = std::span<const std::uint8_t>(*reference);
    outputs.push_back(run_on(rec, cfg, 0, cfg.seed, ref));
    return collect(cfg, outputs);
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string format_double(double v, const char* fmt)
{
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string format_optional(const std::optional<double>& v, const char* fmt)
{
    return v ? format_double(*v, fmt) : std::string();
}

}  // namespace

void write_rows_csv(std::ostream& out, const ExperimentResult& result)
{
    out << "run_id,seed,frontend,block_index,modulation,snr_db,ber,bit_errors,bits\n";
    for (const auto& r : result.rows) {
        const auto& m = r.metrics;
        out << r.run_id << ',' << r.seed << ',' << r.frontend << ',' << m.block_index << ',' << to_string(m.modulation)
            << ',' << format_optional(m.snr_db, "%.6f") << ',' << format_optional(m.ber, "%.8f") << ','
            << (m.ber ? std::to_string(m.bit_errors) : std::string()) << ',' << m.bits << '\n';
    }
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result)
{
    out << "run_id,seed,frontend,scenario,synchronized,frame_start,noise_power,mean_snr_db,frame_ber,bit_errors,bits,"
           "input_digest\n";
    for (const auto& s : result.summaries) {
        char digest[24];
        std::snprintf(digest, sizeof digest, "%016" PRIx64, s.input_digest);
        out << s.run_id << ',' << s.seed << ',' << s.frontend << ',' << result.scenario << ','
            << (s.synchronized ? 1 : 0) << ',' << s.frame_start << ',' << format_optional(s.noise_power, "%.9g") << ','
            << format_optional(s.mean_snr_db, "%.6f") << ',' << format_optional(s.frame_ber, "%.8f") << ','
            << (s.frame_ber ? std::to_string(s.bit_errors) : std::string()) << ',' << s.bits << ',' << digest << '\n';
    }
}

std::uint64_t waveform_digest(const RealSignal& signal) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double v : signal.samples) {
        float f = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &f, sizeof u);
        for (int i = 0; i < 4; ++i) {
            h ^= (u >> (8 * i)) & 0xFFu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

void write_payload_bits(const std::filesystem::path& path, std::span<const std::uint8_t> bits)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write payload file '" + path.string() + "'");
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out.put(bits[i] ? '1' : '0');
        if (i % 64 == 63) out.put('\n');
    }
    if (bits.size() % 64 != 0) out.put('\n');
}

std::vector<std::uint8_t> read_payload_bits(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open payload file '" + path.string() + "'");
    std::vector<std::uint8_t> bits;
    char c;
    std::size_t pos = 0;
    while (in.get(c)) {
        ++pos;
        if (c == '0' || c == '1') bits.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (!std::isspace(static_cast<unsigned char>(c)))
            throw FormatError("payload file '" + path.string() + "': unexpected character at byte " +
                              std::to_string(pos));
    }
    return bits;
}

}  // namespace manp
