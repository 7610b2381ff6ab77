#pragma once

#include <span>
#include <vector>

#include "manp/signal.hpp"

namespace manp::fft {

// Unnormalized transforms of arbitrary length (FFTW backed). Plans are cached
// per length; execution is thread-safe.

std::vector<cdouble> forward(std::span<const cdouble> in);
std::vector<cdouble> inverse(std::span<const cdouble> in);

/// Real-to-complex forward transform; returns n/2 + 1 bins.
std::vector<cdouble> forward_real(std::span<const double> in);

/// Complex-to-real inverse of length n from n/2 + 1 Hermitian bins.
std::vector<double> inverse_real(std::span<const cdouble> half_spectrum, std::size_t n);

}  // namespace manp::fft
