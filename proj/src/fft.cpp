#include "manp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace manp::fft {
namespace {

enum class Kind { Forward, Inverse, RealForward, RealInverse };

// FFTW's planner is not thread-safe; new-array execution of an existing plan is.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(Kind kind, std::size_t n)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(kind, n);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        const int len = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = nullptr;
        switch (kind) {
        case Kind::Forward:
        case Kind::Inverse: {
            auto* buf = fftw_alloc_complex(n);
            plan = fftw_plan_dft_1d(len, buf, buf, kind == Kind::Forward ? FFTW_FORWARD : FFTW_BACKWARD, flags);
            fftw_free(buf);
            break;
        }
        case Kind::RealForward: {
            auto* r = fftw_alloc_real(n);
            auto* c = fftw_alloc_complex(n / 2 + 1);
            plan = fftw_plan_dft_r2c_1d(len, r, c, flags);
            fftw_free(r);
            fftw_free(c);
            break;
        }
        case Kind::RealInverse: {
            auto* r = fftw_alloc_real(n);
            auto* c = fftw_alloc_complex(n / 2 + 1);
            plan = fftw_plan_dft_c2r_1d(len, c, r, flags);
            fftw_free(r);
            fftw_free(c);
            break;
        }
        }
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<Kind, std::size_t>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache instance;
    return instance;
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }

std::vector<cdouble> complex_transform(std::span<const cdouble> in, Kind kind)
{
    std::vector<cdouble> out(in.begin(), in.end());
    if (out.empty()) return out;
    fftw_execute_dft(cache().get(kind, out.size()), as_fftw(out.data()), as_fftw(out.data()));
    return out;
}

}  // namespace

std::vector<cdouble> forward(std::span<const cdouble> in) { return complex_transform(in, Kind::Forward); }

std::vector<cdouble> inverse(std::span<const cdouble> in) { return complex_transform(in, Kind::Inverse); }

std::vector<cdouble> forward_real(std::span<const double> in)
{
    const std::size_t n = in.size();
    if (n == 0) return {};
    std::vector<double> work(in.begin(), in.end());
    std::vector<cdouble> out(n / 2 + 1);
    fftw_execute_dft_r2c(cache().get(Kind::RealForward, n), work.data(), as_fftw(out.data()));
    return out;
}

std::vector<double> inverse_real(std::span<const cdouble> half_spectrum, std::size_t n)
{
    if (n == 0) return {};
    // c2r destroys its input.
    std::vector<cdouble> work(n / 2 + 1);
    std::copy_n(half_spectrum.begin(), std::min(half_spectrum.size(), work.size()), work.begin());
    std::vector<double> out(n);
    fftw_execute_dft_c2r(cache().get(Kind::RealInverse, n), as_fftw(work.data()), out.data());
    return out;
}

}  // namespace manp::fft
