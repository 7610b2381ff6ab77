#pragma once

#include <cstddef>
#include <deque>
#include <memory_resource>
#include <set>
#include <vector>

#include "manp/ofdm.hpp"
#include "manp/signal.hpp"

namespace manp {

/// Shape and resolution-tracking parameters of the analog limiter.
struct InfluenceParams {
    double gamma = 1.0;             ///< 0 clips; large values approach blanking
    double beta0 = 1.5;
    double quantile_window = 0.1;   ///< seconds of trailing |x| used for the median
    double beta_floor = 1e-6;       ///< lower clamp on beta

    std::vector<std::string> problems() const;
    void validate() const;
};

/// x for |x| <= beta, x (beta/|x|)^(gamma+1) beyond. Throws on beta <= 0.
double influence(double x, double beta, double gamma);

/// Exact median of the last `window` values pushed. Holds an ordered multiset
/// plus an iterator to the element of rank size/2 (the upper middle for even
/// counts, i.e. the middle element of the sorted window).
class RunningMedian {
public:
    explicit RunningMedian(std::size_t window);

    /// Adds a value, evicting the oldest once the window is full; returns the new median.
    double push(double value);

    double median() const;
    std::size_t size() const noexcept { return history_.size(); }
    std::size_t window() const noexcept { return window_; }

private:
    void insert(double value);
    void erase(double value);
    void seek(std::size_t target);

    std::size_t window_;
    std::pmr::unsynchronized_pool_resource pool_;
    std::pmr::multiset<double> ordered_;
    std::pmr::multiset<double>::iterator mid_;
    std::size_t mid_rank_ = 0;
    std::deque<double> history_;
};

/// beta(t) = (1 + 2 beta0) * median(|x| over the trailing window), clamped below
/// at beta_floor. The first window uses the growing prefix.
RealSignal track_resolution(const RealSignal& stream, const InfluenceParams& params);

/// Memoryless limiter chi(t) = influence(x(t), beta(t), gamma) at the input rate.
RealSignal manp_process(const RealSignal& stream, const InfluenceParams& params);

/// Anti-alias lowpass then decimation from analog_rate to adc_rate.
RealSignal adc(const RealSignal& stream, const OfdmConfig& config);

/// Piecewise-constant thresholds over consecutive windows of `window_samples`.
struct BaselineThresholds {
    std::vector<double> blanking_threshold;
    std::vector<double> clipping_threshold;
    std::size_t window_samples = 0;  ///< 0: a single threshold for the whole stream
    double window = 0.0;             ///< seconds

    static BaselineThresholds uniform(double blanking, double clipping);

    double blanking_at(std::size_t sample) const;
    double clipping_at(std::size_t sample) const;
};

RealSignal blanking(const RealSignal& stream, const BaselineThresholds& thresholds);
RealSignal clipping(const RealSignal& stream, const BaselineThresholds& thresholds);

/// threshold = k * median(|x|) per non-overlapping window.
BaselineThresholds derive_baseline_thresholds(const RealSignal& stream, double window, double k_bln = 6.0,
                                              double k_clp = 4.0, double floor = 1e-6);

}  // namespace manp
