#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace bct {

/// Philox4x64-10 counter-based generator.
///
/// Each (key0, key1) pair addresses an independent stream whose output is a
/// pure function of the 256-bit counter, so any number of streams can be
/// consumed in parallel and still reproduce a single-threaded run bit for bit.
class Philox {
  public:
    using block_t = std::array<std::uint64_t, 4>;

    static block_t block(block_t ctr, std::array<std::uint64_t, 2> key) {
        constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += W0;
                key[1] += W1;
            }
            const auto p0 = static_cast<unsigned __int128>(M0) * ctr[0];
            const auto p1 = static_cast<unsigned __int128>(M1) * ctr[2];
            ctr = {static_cast<std::uint64_t>(p1 >> 64) ^ ctr[1] ^ key[0],
                   static_cast<std::uint64_t>(p1),
                   static_cast<std::uint64_t>(p0 >> 64) ^ ctr[3] ^ key[1],
                   static_cast<std::uint64_t>(p0)};
        }
        return ctr;
    }
};

/// Purpose tag kept in the high bits of the stream id so that distinct
/// consumers of the same sample index never share raw output.
enum class StreamPurpose : std::uint64_t {
    TreeSample = 1,
    McEntropy = 2,
    Simulate = 3,
    ChainBuild = 4,
    Summary = 5,
};

/// One independent random stream: key = (seed, purpose|index).
class RngStream {
  public:
    RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
        : key_{seed, (static_cast<std::uint64_t>(purpose) << 48) | index},
          ctr_{0, 0, 0, 0}, pos_(4) {}

    std::uint64_t stream_id() const { return key_[1]; }

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            buf_ = Philox::block(ctr_, key_);
            pos_ = 0;
            for (int i = 0; i < 4; ++i) {
                if (++ctr_[i] != 0) break;
            }
        }
        return buf_[pos_++];
    }

    /// Uniform on the open interval (0, 1); never returns an endpoint.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    /// Uniform integer in [0, bound) by rejection; bound >= 1.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal() {
        const double u = uniform();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
    }

    /// Gamma(shape, 1) by Marsaglia-Tsang, with the boost step for shape < 1.
    /// Shape 1/2 is the common case here (add-half Dirichlet posteriors).
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Dirichlet draw with the given per-component shapes, written to out.
    void dirichlet(std::span<const double> shapes, std::span<double> out) {
        double total = 0.0;
        for (std::size_t j = 0; j < shapes.size(); ++j) {
            out[j] = gamma(shapes[j]);
            total += out[j];
        }
        for (std::size_t j = 0; j < shapes.size(); ++j) out[j] /= total;
    }

    /// Index drawn from a discrete distribution given as probabilities.
    std::size_t categorical(std::span<const double> probs) {
        double u = uniform();
        for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
            u -= probs[j];
            if (u < 0.0) return j;
        }
        return probs.size() - 1;
    }

  private:
    std::array<std::uint64_t, 2> key_;
    Philox::block_t ctr_;
    Philox::block_t buf_{};
    int pos_;
};

}  // namespace bct
