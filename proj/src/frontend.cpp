#include "manp/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "manp/dsp.hpp"

namespace manp {

std::vector<std::string> InfluenceParams::problems() const
{
    std::vector<std::string> p;
    if (!(gamma >= 0.0)) p.push_back("gamma must be >= 0");
    if (!(beta0 >= 0.0) || !std::isfinite(beta0)) p.push_back("beta0 must be finite and >= 0");
    if (!(quantile_window > 0.0) || !std::isfinite(quantile_window)) p.push_back("quantile_window must be positive");
    if (!(beta_floor > 0.0) || !std::isfinite(beta_floor)) p.push_back("beta_floor must be positive");
    return p;
}

void InfluenceParams::validate() const
{
    auto p = problems();
    if (!p.empty()) throw ConfigError(std::move(p));
}

double influence(double x, double beta, double gamma)
{
    if (!(beta > 0.0)) throw InvalidArgument("influence: beta must be positive");
    if (!(gamma >= 0.0)) throw InvalidArgument("influence: gamma must be >= 0");
    const double ax = std::abs(x);
    if (ax <= beta) return x;
    if (gamma == 0.0) return std::copysign(beta, x);
    return x * std::pow(beta / ax, gamma + 1.0);
}

// ---------------------------------------------------------------------------

RunningMedian::RunningMedian(std::size_t window) : window_(window), ordered_(&pool_), mid_(ordered_.end())
{
    if (window == 0) throw InvalidArgument("RunningMedian: window must be positive");
}

double RunningMedian::push(double value)
{
    if (history_.size() == window_) {
        erase(history_.front());
        history_.pop_front();
    }
    insert(value);
    history_.push_back(value);
    return *mid_;
}

double RunningMedian::median() const
{
    if (ordered_.empty()) throw NotAvailable("RunningMedian: empty window");
    return *mid_;
}

void RunningMedian::insert(double value)
{
    if (ordered_.empty()) {
        mid_ = ordered_.insert(value);
        mid_rank_ = 0;
        return;
    }
    // Equal keys go after existing ones, so only a strictly smaller value shifts the middle's rank.
    if (value < *mid_) ++mid_rank_;
    ordered_.insert(value);
    seek(ordered_.size() / 2);
}

void RunningMedian::erase(double value)
{
    if (value == *mid_) {
        const auto next = std::next(mid_);
        ordered_.erase(mid_);
        if (ordered_.empty()) {
            mid_ = ordered_.end();
            mid_rank_ = 0;
            return;
        }
        if (next != ordered_.end()) {
            mid_ = next;
        } else {
            mid_ = std::prev(ordered_.end());
            --mid_rank_;
        }
    } else {
        const auto it = ordered_.find(value);
        if (value < *mid_) --mid_rank_;
        ordered_.erase(it);
    }
    seek(ordered_.size() / 2);
}

void RunningMedian::seek(std::size_t target)
{
    while (mid_rank_ < target) {
        ++mid_;
        ++mid_rank_;
    }
    while (mid_rank_ > target) {
        --mid_;
        --mid_rank_;
    }
}

// ---------------------------------------------------------------------------

RealSignal track_resolution(const RealSignal& stream, const InfluenceParams& params)
{
    params.validate();
    const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.quantile_window * stream.sample_rate)));
    const double gain = 1.0 + 2.0 * params.beta0;

    RunningMedian tracker(window);
    RealSignal beta(std::vector<double>(stream.size()), stream.sample_rate, stream.start_time);
    for (std::size_t i = 0; i < stream.size(); ++i)
        beta.samples[i] = std::max(params.beta_floor, gain * tracker.push(std::abs(stream.samples[i])));
    return beta;
}

RealSignal manp_process(const RealSignal& stream, const InfluenceParams& params)
{
    const auto beta = track_resolution(stream, params);
    RealSignal out(std::vector<double>(stream.size()), stream.sample_rate, stream.start_time);
    for (std::size_t i = 0; i < stream.size(); ++i)
        out.samples[i] = influence(stream.samples[i], beta.samples[i], params.gamma);
    return out;
}

RealSignal adc(const RealSignal& stream, const OfdmConfig& config)
{
    if (stream.sample_rate < config.adc_rate)
        throw UnsupportedRatio("adc: input rate " + std::to_string(stream.sample_rate) + " Hz is below adc_rate");
    ResampleDesign design;
    design.num_taps = config.adc.num_taps;
    design.cutoff_fraction = config.adc.cutoff_fraction;
    design.stopband_db = config.adc.stopband_db;
    return resample(stream, config.adc_rate, true, design);
}

// ---------------------------------------------------------------------------

BaselineThresholds BaselineThresholds::uniform(double blanking, double clipping)
{
    if (!(blanking > 0.0) || !(clipping > 0.0)) throw InvalidArgument("BaselineThresholds: thresholds must be positive");
    return BaselineThresholds{{blanking}, {clipping}, 0, 0.0};
}

double BaselineThresholds::blanking_at(std::size_t sample) const
{
    const std::size_t w = window_samples == 0 ? 0 : std::min(sample / window_samples, blanking_threshold.size() - 1);
    return blanking_threshold.at(w);
}

double BaselineThresholds::clipping_at(std::size_t sample) const
{
    const std::size_t w = window_samples == 0 ? 0 : std::min(sample / window_samples, clipping_threshold.size() - 1);
    return clipping_threshold.at(w);
}

RealSignal blanking(const RealSignal& stream, const BaselineThresholds& thresholds)
{
    RealSignal out = stream;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (std::abs(out.samples[i]) > thresholds.blanking_at(i)) out.samples[i] = 0.0;
    return out;
}

RealSignal clipping(const RealSignal& stream, const BaselineThresholds& thresholds)
{
    RealSignal out = stream;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = thresholds.clipping_at(i);
        const double v = out.samples[i];
        if (std::abs(v) > t) out.samples[i] = std::copysign(t, v);
    }
    return out;
}

BaselineThresholds derive_baseline_thresholds(const RealSignal& stream, double window, double k_bln, double k_clp,
                                              double floor)
{
    if (!(window > 0.0)) throw InvalidArgument("derive_baseline_thresholds: window must be positive");
    if (stream.empty()) throw InvalidArgument("derive_baseline_thresholds: empty stream");
    const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window * stream.sample_rate)));

    BaselineThresholds out;
    out.window_samples = w;
    out.window = window;
    std::vector<double> mags;
    for (std::size_t begin = 0; begin < stream.size(); begin += w) {
        const std::size_t end = std::min(stream.size(), begin + w);
        mags.resize(end - begin);
        for (std::size_t i = begin; i < end; ++i) mags[i - begin] = std::abs(stream.samples[i]);
        const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
        std::nth_element(mags.begin(), mid, mags.end());
        out.blanking_threshold.push_back(std::max(floor, k_bln * *mid));
        out.clipping_threshold.push_back(std::max(floor, k_clp * *mid));
    }
    return out;
}

}  // namespace manp
