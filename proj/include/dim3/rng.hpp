#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dim3/common.hpp"

namespace dim3 {

// PCG32 (O'Neill) with an explicit draw counter. A generator is fully
// described by the triple (seed, stream, counter): restoring from a
// checkpoint re-seeds and jumps ahead by `counter` in O(log counter).
class Rng {
public:
    Rng() : Rng(0x853c49e6748fea9bULL, 0) {}

    Rng(uint64_t seed, uint64_t stream) { reseed(seed, stream); }

    void reseed(uint64_t seed, uint64_t stream) {
        seed_ = seed;
        stream_ = stream;
        inc_ = (stream << 1u) | 1u;
        state_ = 0u;
        step();
        state_ += seed;
        step();
        counter_ = 0;
    }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }
    uint64_t counter() const { return counter_; }

    static Rng restore(uint64_t seed, uint64_t stream, uint64_t counter) {
        Rng r(seed, stream);
        r.advance(counter);
        return r;
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        step();
        ++counter_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Uniform on (0,1): 53-bit mantissa from two 32-bit draws, then nudged
    // away from zero so log(u) is always finite.
    double uniform() {
        uint64_t hi = next_u32() >> 5;   // 27 bits
        uint64_t lo = next_u32() >> 6;   // 26 bits
        double u = static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // One value per call (Box-Muller, cosine branch); no cached state so the
    // draw count alone captures the generator position.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

    // Marsaglia-Tsang; shape<1 handled by the standard boost.
    double gamma(double shape, double rate = 1.0) {
        if (!(shape > 0.0) || !(rate > 0.0)) throw NumericError("gamma: shape and rate must be positive");
        if (shape < 1.0) {
            double u = uniform();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    // Degenerate shapes are the natural stick-breaking limits. For positive
    // shapes the draw is kept strictly inside (0,1): a tiny true value that
    // underflows to 0 would otherwise zero out urn masses downstream.
    double beta(double a, double b) {
        if (a <= 0.0 && b <= 0.0) throw NumericError("beta: both shapes zero");
        if (a <= 0.0) return 0.0;
        if (b <= 0.0) return 1.0;
        double x = gamma(a);
        double y = gamma(b);
        if (x + y <= 0.0) return a / (a + b);
        double v = x / (x + y);
        if (v <= 0.0) return 1e-300;
        if (v >= 1.0) return 1.0 - 1e-16;
        return v;
    }

    // Sequential Bernoulli; counts in this codebase are restaurant-sized.
    int binomial(int n, double p) {
        int k = 0;
        for (int i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
        return k;
    }

    void dirichlet(std::span<const double> conc, std::span<double> out) {
        double total = 0.0;
        for (size_t i = 0; i < conc.size(); ++i) {
            out[i] = conc[i] > 0.0 ? gamma(conc[i]) : 0.0;
            total += out[i];
        }
        if (total <= 0.0) throw NumericError("dirichlet: all mass zero");
        for (size_t i = 0; i < conc.size(); ++i) out[i] /= total;
    }

    // Index draw from unnormalized nonnegative weights.
    size_t categorical(std::span<const double> w) {
        double total = 0.0;
        for (double x : w) total += x;
        if (!(total > 0.0) || !std::isfinite(total))
            throw NumericError("categorical: invalid weight total");
        double r = uniform() * total;
        double acc = 0.0;
        for (size_t i = 0; i + 1 < w.size(); ++i) {
            acc += w[i];
            if (r < acc) return i;
        }
        return w.size() - 1;
    }

    // Log-space variant for the underflow fallback paths.
    size_t categorical_log(std::span<const double> logw) {
        double mx = -HUGE_VAL;
        for (double x : logw)
            if (x > mx) mx = x;
        if (!std::isfinite(mx)) throw NumericError("categorical_log: all weights -inf");
        std::vector<double> w(logw.size());
        for (size_t i = 0; i < logw.size(); ++i) w[i] = std::exp(logw[i] - mx);
        return categorical(w);
    }

    // Jump ahead by `delta` raw 32-bit draws (PCG advance).
    void advance(uint64_t delta) {
        uint64_t cur_mult = mult_;
        uint64_t cur_plus = inc_;
        uint64_t acc_mult = 1u;
        uint64_t acc_plus = 0u;
        uint64_t d = delta;
        while (d > 0) {
            if (d & 1u) {
                acc_mult *= cur_mult;
                acc_plus = acc_plus * cur_mult + cur_plus;
            }
            cur_plus = (cur_mult + 1) * cur_plus;
            cur_mult *= cur_mult;
            d >>= 1;
        }
        state_ = acc_mult * state_ + acc_plus;
        counter_ += delta;
    }

private:
    void step() { state_ = state_ * mult_ + inc_; }

    static constexpr uint64_t mult_ = 6364136223846793005ULL;
    uint64_t state_ = 0;
    uint64_t inc_ = 1;
    uint64_t seed_ = 0;
    uint64_t stream_ = 0;
    uint64_t counter_ = 0;
};

}  // namespace dim3
