#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "dim3/rng.hpp"
#include "dim3/special.hpp"
#include "dim3/tables.hpp"

namespace dim3 {

// Vague priors of the paper: Gamma(1,1) on gamma and on alpha+kappa,
// Beta(1,1) on the sticky ratio.
struct HyperPriors {
    double gamma_shape = 1.0, gamma_rate = 1.0;
    double conc_shape = 1.0, conc_rate = 1.0;
    double ratio_a = 1.0, ratio_b = 1.0;

    void validate() const {
        if (!(gamma_shape > 0) || !(gamma_rate > 0) || !(conc_shape > 0) ||
            !(conc_rate > 0) || !(ratio_a > 0) || !(ratio_b > 0))
            throw ConfigError("HyperPriors: parameters must be positive");
    }
};

// The sticky atoms of an MTV restaurant carry total mass kappa*(n-1)/n
// (2(n-1) labels scaled by kappa/2n), so the per-table sticky-route
// probability is kappa*c/(alpha+kappa*c) with c = (n-1)/n. MTI families
// have c = 1 and recover kappa = theta*ratio exactly.
inline double crf_sticky_scale(ModelKind kind, int nodes) {
    if (kind == ModelKind::MtiGibbs || kind == ModelKind::FiniteMti) return 1.0;
    return (nodes - 1) / static_cast<double>(nodes);
}

inline void apply_concentration(double theta, double ratio, double scale,
                                double& alpha, double& kappa) {
    kappa = theta * ratio / (scale * (1.0 - ratio) + ratio);
    alpha = theta - kappa;
}

inline double concentration_ratio(double alpha, double kappa, double scale) {
    double s = kappa * scale;
    return alpha + s > 0.0 ? s / (alpha + s) : 0.0;
}

namespace detail {

// Adaptive rejection sampling for a log-concave density on the real line.
// Upper hull from tangents only (no squeeze); each rejection refines the
// hull at the rejected point. Returns false if the envelope cannot be
// normalized or too many iterations pass.
class ArsSampler {
public:
    ArsSampler(std::function<double(double)> logf, std::function<double(double)> dlogf)
        : logf_(std::move(logf)), dlogf_(std::move(dlogf)) {}

    bool sample(std::vector<double> init, Rng& rng, double& out) {
        xs_ = std::move(init);
        hs_.clear();
        dhs_.clear();
        for (double x : xs_) {
            hs_.push_back(logf_(x));
            dhs_.push_back(dlogf_(x));
        }
        // Extend outward until the hull is integrable on both tails.
        for (int guard = 0; dhs_.front() <= 0.0 && guard < 64; ++guard) insert(xs_.front() - 4.0);
        for (int guard = 0; dhs_.back() >= 0.0 && guard < 64; ++guard) insert(xs_.back() + 4.0);
        if (dhs_.front() <= 0.0 || dhs_.back() >= 0.0) return false;

        for (int it = 0; it < 200; ++it) {
            double x, hull;
            if (!draw_from_hull(rng, x, hull)) return false;
            double h = logf_(x);
            if (h > hull + 1e-9) return false;  // concavity violated numerically
            if (std::log(rng.uniform()) <= h - hull) {
                out = x;
                return true;
            }
            insert(x);
        }
        return false;
    }

private:
    void insert(double x) {
        double h = logf_(x), dh = dlogf_(x);
        size_t pos = 0;
        while (pos < xs_.size() && xs_[pos] < x) ++pos;
        xs_.insert(xs_.begin() + pos, x);
        hs_.insert(hs_.begin() + pos, h);
        dhs_.insert(dhs_.begin() + pos, dh);
    }

    // Piecewise-exponential hull: tangent i rules between z_{i-1} and z_i.
    bool draw_from_hull(Rng& rng, double& x_out, double& hull_out) {
        size_t n = xs_.size();
        std::vector<double> z(n + 1);
        z[0] = -HUGE_VAL;
        z[n] = HUGE_VAL;
        for (size_t i = 0; i + 1 < n; ++i) {
            double denom = dhs_[i] - dhs_[i + 1];
            if (std::abs(denom) < 1e-14) {
                z[i + 1] = 0.5 * (xs_[i] + xs_[i + 1]);
            } else {
                z[i + 1] = (hs_[i + 1] - hs_[i] - xs_[i + 1] * dhs_[i + 1] + xs_[i] * dhs_[i]) / denom;
                if (z[i + 1] < xs_[i] - 1e-9 || z[i + 1] > xs_[i + 1] + 1e-9) return false;
            }
        }
        // log of each segment's integral
        std::vector<double> logm(n);
        for (size_t i = 0; i < n; ++i) {
            double d = dhs_[i];
            double base = hs_[i] - d * xs_[i];
            double lo = z[i], hi = z[i + 1];
            if (std::abs(d) < 1e-12) {
                logm[i] = base + std::log(hi - lo);
            } else if (d > 0) {
                logm[i] = base + d * hi + std::log1p(-std::exp(d * (lo - hi))) - std::log(d);
            } else {
                logm[i] = base + d * lo + std::log1p(-std::exp(d * (hi - lo))) - std::log(-d);
            }
            if (!std::isfinite(logm[i])) logm[i] = -HUGE_VAL;
        }
        double logtot = logsumexp(logm);
        if (!std::isfinite(logtot)) return false;
        double u = rng.uniform();
        double acc = 0.0;
        size_t seg = n - 1;
        for (size_t i = 0; i < n; ++i) {
            acc += std::exp(logm[i] - logtot);
            if (u < acc) {
                seg = i;
                break;
            }
        }
        // Inverse-CDF within the chosen segment.
        double d = dhs_[seg], lo = z[seg], hi = z[seg + 1];
        double v = rng.uniform();
        if (std::abs(d) < 1e-12) {
            x_out = lo + v * (hi - lo);
        } else if (d > 0) {
            x_out = hi + std::log1p(v * std::expm1(d * (lo - hi))) / d;
        } else {
            x_out = lo + std::log1p(v * std::expm1(d * (hi - lo))) / d;
        }
        if (!std::isfinite(x_out)) return false;
        hull_out = hs_[seg] + d * (x_out - xs_[seg]);
        return true;
    }

    std::function<double(double)> logf_, dlogf_;
    std::vector<double> xs_, hs_, dhs_;
};

}  // namespace detail

// gamma | (K dishes among M global-route tables) via ARS on log(gamma);
// the posterior is proportional to gamma^{a-1+K} e^{-b gamma}
// Gamma(gamma)/Gamma(gamma+M). Envelope failure falls back to a
// 1024-point log-grid draw and sets `grid_fallback`.
inline double sample_gamma_conc(int dish_count, long long total_tables,
                                const HyperPriors& prior, Rng& rng,
                                bool* grid_fallback = nullptr) {
    if (grid_fallback) *grid_fallback = false;
    double a = prior.gamma_shape, b = prior.gamma_rate;
    if (total_tables <= 0) return rng.gamma(a, b);

    double k = static_cast<double>(dish_count);
    double m = static_cast<double>(total_tables);
    auto logf = [=](double x) {
        double g = std::exp(x);
        return (a + k) * x - b * g + std::lgamma(g) - std::lgamma(g + m);
    };
    auto dlogf = [=](double x) {
        double g = std::exp(x);
        return (a + k) - b * g + g * (digamma(g) - digamma(g + m));
    };

    detail::ArsSampler ars(logf, dlogf);
    double x;
    if (ars.sample({std::log(0.01), std::log(0.1), std::log(1.0), std::log(10.0), std::log(100.0)},
                   rng, x))
        return std::exp(x);

    if (grid_fallback) *grid_fallback = true;
    const int grid_n = 1024;
    double lo = std::log(1e-4), hi = std::log(1e4);
    std::vector<double> logw(grid_n);
    for (int i = 0; i < grid_n; ++i) logw[i] = logf(lo + (hi - lo) * (i + 0.5) / grid_n);
    size_t idx = rng.categorical_log(logw);
    return std::exp(lo + (hi - lo) * (idx + 0.5) / grid_n);
}

// (alpha+kappa) | tables by the auxiliary-variable scheme, one w per
// occupied restaurant: w_j ~ Beta(theta*c_j, M_j), then
// theta ~ Gamma(a + sum tables, b - sum c_j log w_j). c_j is the
// restaurant's base mass divided by theta, which keeps the update exact
// for the kappa-free t=1 restaurants as well.
inline double sample_concentration(const std::vector<TableCounts::Restaurant>& restaurants,
                                   double theta, const HyperPriors& prior, Rng& rng) {
    double shape = prior.conc_shape;
    double rate = prior.conc_rate;
    for (const auto& r : restaurants) {
        if (r.customers <= 0) continue;
        double w = rng.beta(theta * r.base_scale, static_cast<double>(r.customers));
        shape += r.tables;
        rate -= r.base_scale * std::log(w);
    }
    return rng.gamma(shape, rate);
}

// Sticky-route proportion | table routes: conjugate Beta with successes
// = sticky-route tables and failures = global-route tables, counted over
// sticky-capable restaurants only.
inline double sample_ratio(long long sticky_route, long long global_route,
                           const HyperPriors& prior, Rng& rng) {
    return rng.beta(prior.ratio_a + static_cast<double>(sticky_route),
                    prior.ratio_b + static_cast<double>(global_route));
}

}  // namespace dim3
