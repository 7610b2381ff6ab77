// manp-sim: run, ingest and validate experiment configurations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "manp/errors.hpp"
#include "manp/experiment.hpp"
#include "manp/waveform_io.hpp"

namespace fs = std::filesystem;
using namespace manp;

namespace {

int exit_code(Error::Category c)
{
    switch (c) {
    case Error::Category::Config: return 3;
    case Error::Category::Format: return 4;
    case Error::Category::InvalidArgument: return 5;
    case Error::Category::UnsupportedRatio: return 6;
    case Error::Category::NotFound:
    case Error::Category::NotAvailable: return 7;
    }
    return 1;
}

fs::path summary_path_for(const fs::path& output)
{
    fs::path p = output;
    p.replace_extension();
    p += ".summary.csv";
    return p;
}

void write_results(const ExperimentResult& result, const fs::path& output)
{
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    std::ofstream rows(output, std::ios::binary);
    if (!rows) throw FormatError("cannot write '" + output.string() + "'");
    write_rows_csv(rows, result);
    const auto summary = summary_path_for(output);
    std::ofstream sums(summary, std::ios::binary);
    if (!sums) throw FormatError("cannot write '" + summary.string() + "'");
    write_summary_csv(sums, result);
    std::fprintf(stderr, "wrote %zu rows to %s, %zu run summaries to %s\n", result.rows.size(), output.c_str(),
                 result.summaries.size(), summary.c_str());
}

void export_trials(const ExperimentConfig& config, const fs::path& dir)
{
    fs::create_directories(dir);
    for (std::size_t t = 0; t < config.trials; ++t) {
        Reception r = simulate_reception(config, t);
        char stem[32];
        std::snprintf(stem, sizeof stem, "trial_%03zu", t);
        write_waveform(dir / (std::string(stem) + ".f32"), r.received);
        write_payload_bits(dir / (std::string(stem) + ".bits"), r.payload);
    }
    std::ofstream layout(dir / "layout.json");
    layout << frame_layout(config.ofdm).to_json() << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Impulsive-noise front-end simulator for zero-padded OFDM receivers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output;
    std::size_t jobs = 1;
    std::string export_dir;
    auto* run = app.add_subcommand("run", "Monte-Carlo experiment over trials and front-ends");
    run->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output, "block CSV path (default: the config's output)");
    run->add_option("-j,--jobs", jobs, "trials processed in parallel")->check(CLI::PositiveNumber);
    run->add_option("--export", export_dir, "also write each trial's received waveform and payload here");

    std::string waveform;
    std::string reference;
    auto* ingest = app.add_subcommand("ingest", "run the configured front-ends and receiver on a recording");
    ingest->add_option("waveform", waveform, "f32le waveform with JSON sidecar")->required();
    ingest->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    ingest->add_option("-r,--reference", reference, "transmitted payload bits ('0'/'1' text) for BER scoring");
    ingest->add_option("-o,--output", output, "block CSV path (default: the config's output)");

    bool print = false;
    auto* validate = app.add_subcommand("validate", "check a config and report every problem");
    validate->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    validate->add_flag("--print", print, "print the effective config with all defaults filled in");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig config = load_experiment_config(config_path);

        if (*validate) {
            if (print) std::cout << experiment_config_to_json(config) << '\n';
            std::fprintf(stderr, "%s: ok\n", config_path.c_str());
            return 0;
        }

        const fs::path out = output.empty() ? fs::path(config.output_path) : fs::path(output);
        if (out.empty()) throw ConfigError({"output: no output path in the config or on the command line"});

        if (*run) {
            if (!export_dir.empty()) export_trials(config, export_dir);
            write_results(run_experiment(config, jobs), out);
            return 0;
        }

        std::optional<fs::path> ref;
        if (!reference.empty()) ref = reference;
        else if (config.reference_payload) ref = *config.reference_payload;
        write_results(ingest_waveform(waveform, config, ref), out);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error:\n");
        for (const auto& p : e.problems()) std::fprintf(stderr, "  %s\n", p.c_str());
        return exit_code(e.category());
    } catch (const Error& e) {
        std::fprintf(stderr, "%s error: %s\n", category_name(e.category()), e.what());
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
