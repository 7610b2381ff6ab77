#include "manp/waveform_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace manp {
namespace {

static_assert(sizeof(float) == 4);

std::uint32_t to_little(std::uint32_t v)
{
    if constexpr (std::endian::native == std::endian::little) return v;
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& samples_path)
{
    auto p = samples_path;
    p += ".json";
    return p;
}

void write_waveform(const std::filesystem::path& path, const RealSignal& signal)
{
    check_signal(signal, "write_waveform");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    std::vector<std::uint32_t> words(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i)
        words[i] = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(signal.samples[i])));
    out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 4));
    if (!out) throw FormatError("write failed for " + path.string());

    nlohmann::ordered_json header;
    header["format"] = "f32le";
    header["channels"] = 1;
    header["sample_rate"] = signal.sample_rate;
    header["start_time"] = signal.start_time;
    header["num_samples"] = signal.size();
    std::ofstream side(sidecar_path(path));
    if (!side) throw FormatError("cannot open " + sidecar_path(path).string() + " for writing");
    side << header.dump(2) << '\n';
}

RealSignal read_waveform(const std::filesystem::path& path)
{
    const auto side_path = sidecar_path(path);
    std::ifstream side(side_path);
    if (!side) throw FormatError("missing header " + side_path.string());

    nlohmann::json header;
    try {
        side >> header;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed header " + side_path.string() + ": " + e.what());
    }

    std::string problem;
    auto require = [&](const char* key, auto check) {
        if (!header.contains(key)) {
            problem += std::string(problem.empty() ? "" : "; ") + "missing '" + key + "'";
        } else if (!check(header[key])) {
            problem += std::string(problem.empty() ? "" : "; ") + "bad value for '" + key + "'";
        }
    };
    require("format", [](const nlohmann::json& v) { return v.is_string() && v.get<std::string>() == "f32le"; });
    require("channels", [](const nlohmann::json& v) { return v.is_number_integer() && v.get<int>() == 1; });
    require("sample_rate", [](const nlohmann::json& v) { return v.is_number() && v.get<double>() > 0.0; });
    require("start_time", [](const nlohmann::json& v) { return v.is_number(); });
    require("num_samples", [](const nlohmann::json& v) { return v.is_number_unsigned(); });
    if (!problem.empty()) throw FormatError("malformed header " + side_path.string() + ": " + problem);

    const auto expected = header["num_samples"].get<std::uint64_t>();
    std::error_code ec;
    const auto bytes = std::filesystem::file_size(path, ec);
    if (ec) throw FormatError("cannot stat " + path.string() + ": " + ec.message());
    if (bytes % 4 != 0 || bytes / 4 != expected)
        throw FormatError(path.string() + ": header promises " + std::to_string(expected) + " samples, file holds " +
                          std::to_string(bytes / 4) + (bytes % 4 ? " (plus a partial sample)" : ""));

    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::vector<std::uint32_t> words(expected);
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(expected * 4));
    if (!in) throw FormatError("short read on " + path.string());

    RealSignal signal;
    signal.sample_rate = header["sample_rate"].get<double>();
    signal.start_time = header["start_time"].get<double>();
    signal.samples.resize(expected);
    for (std::size_t i = 0; i < expected; ++i)
        signal.samples[i] = static_cast<double>(std::bit_cast<float>(to_little(words[i])));
    check_signal(signal, "read_waveform");
    return signal;
}

RealSignal quantize_to_float(RealSignal signal)
{
    for (auto& v : signal.samples) v = static_cast<double>(static_cast<float>(v));
    return signal;
}

}  // namespace manp
