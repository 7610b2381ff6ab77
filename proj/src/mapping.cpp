#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "manp/ofdm.hpp"

namespace manp {
namespace {

const double kQpskScale = 1.0 / std::sqrt(2.0);
const double kQamScale = 1.0 / std::sqrt(10.0);

// 16-QAM per-axis level from (sign bit, magnitude bit): 00 -> +1, 01 -> +3, 10 -> -1, 11 -> -3.
double qam_level(std::uint8_t sign, std::uint8_t magnitude)
{
    return (sign ? -1.0 : 1.0) * (magnitude ? 3.0 : 1.0);
}

struct Constellation {
    std::vector<cdouble> points;  // indexed by the bit pattern, first bit most significant
    std::size_t bits = 0;
};

const Constellation& constellation(Modulation scheme)
{
    static const Constellation qpsk = [] {
        Constellation c;
        c.bits = 2;
        for (unsigned v = 0; v < 4; ++v) {
            const auto b0 = static_cast<std::uint8_t>((v >> 1) & 1u);
            const auto b1 = static_cast<std::uint8_t>(v & 1u);
            c.points.emplace_back((b0 ? -1.0 : 1.0) * kQpskScale, (b1 ? -1.0 : 1.0) * kQpskScale);
        }
        return c;
    }();
    static const Constellation qam16 = [] {
        Constellation c;
        c.bits = 4;
        for (unsigned v = 0; v < 16; ++v) {
            const auto b = [v](unsigned i) { return static_cast<std::uint8_t>((v >> (3 - i)) & 1u); };
            c.points.emplace_back(qam_level(b(0), b(1)) * kQamScale, qam_level(b(2), b(3)) * kQamScale);
        }
        return c;
    }();
    return scheme == Modulation::Qpsk ? qpsk : qam16;
}

}  // namespace

std::vector<cdouble> map_symbols(std::span<const std::uint8_t> bits, Modulation scheme)
{
    const auto& c = constellation(scheme);
    if (bits.size() % c.bits != 0)
        throw InvalidArgument("map_symbols: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                              std::to_string(c.bits));
    std::vector<cdouble> out;
    out.reserve(bits.size() / c.bits);
    for (std::size_t i = 0; i < bits.size(); i += c.bits) {
        unsigned v = 0;
        for (std::size_t j = 0; j < c.bits; ++j) {
            if (bits[i + j] > 1) throw InvalidArgument("map_symbols: bits must be 0 or 1");
            v = (v << 1) | bits[i + j];
        }
        out.push_back(c.points[v]);
    }
    return out;
}

Demapped demap_symbols(std::span<const cdouble> symbols, Modulation scheme, double noise_variance)
{
    const auto& c = constellation(scheme);
    Demapped out;
    out.bits.reserve(symbols.size() * c.bits);
    out.llrs.reserve(symbols.size() * c.bits);

    std::array<double, 16> dist{};
    for (const auto& y : symbols) {
        std::size_t best = 0;
        for (std::size_t v = 0; v < c.points.size(); ++v) {
            dist[v] = std::norm(y - c.points[v]);
            if (dist[v] < dist[best]) best = v;
        }
        for (std::size_t j = 0; j < c.bits; ++j) {
            const unsigned mask = 1u << (c.bits - 1 - j);
            double d0 = std::numeric_limits<double>::infinity();
            double d1 = d0;
            for (std::size_t v = 0; v < c.points.size(); ++v) {
                if (v & mask)
                    d1 = std::min(d1, dist[v]);
                else
                    d0 = std::min(d0, dist[v]);
            }
            const double diff = d1 - d0;
            double llr;
            if (noise_variance > 0.0)
                llr = diff / noise_variance;
            else
                llr = diff > 0.0 ? llr_cap : (diff < 0.0 ? -llr_cap : 0.0);
            out.llrs.push_back(std::clamp(llr, -llr_cap, llr_cap));
            out.bits.push_back(static_cast<std::uint8_t>((best & mask) ? 1 : 0));
        }
    }
    return out;
}

template <typename T>
std::vector<T> interleave(std::span<const T> in, std::size_t depth)
{
    if (depth == 0 || in.size() % depth != 0)
        throw InvalidArgument("interleave: depth " + std::to_string(depth) + " does not divide length " +
                              std::to_string(in.size()));
    const std::size_t rows = in.size() / depth;
    std::vector<T> out(in.size());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < depth; ++c) out[c * rows + r] = in[r * depth + c];
    return out;
}

template <typename T>
std::vector<T> deinterleave(std::span<const T> in, std::size_t depth)
{
    if (depth == 0 || in.size() % depth != 0)
        throw InvalidArgument("deinterleave: depth " + std::to_string(depth) + " does not divide length " +
                              std::to_string(in.size()));
    const std::size_t rows = in.size() / depth;
    std::vector<T> out(in.size());
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < depth; ++c) out[r * depth + c] = in[c * rows + r];
    return out;
}

template std::vector<cdouble> interleave<cdouble>(std::span<const cdouble>, std::size_t);
template std::vector<cdouble> deinterleave<cdouble>(std::span<const cdouble>, std::size_t);
template std::vector<std::uint8_t> interleave<std::uint8_t>(std::span<const std::uint8_t>, std::size_t);
template std::vector<std::uint8_t> deinterleave<std::uint8_t>(std::span<const std::uint8_t>, std::size_t);
template std::vector<int> interleave<int>(std::span<const int>, std::size_t);
template std::vector<int> deinterleave<int>(std::span<const int>, std::size_t);

}  // namespace manp
