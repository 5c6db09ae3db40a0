#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dim3/special.hpp"
#include "dim3/state.hpp"

namespace dim3 {

// Per-iteration record of one chain, the unit all diagnostics work on.
struct ChainTrace {
    int chain_id = 0;
    std::vector<long long> iteration;
    std::vector<double> k, d, loglik, gamma, alpha, kappa;

    size_t size() const { return iteration.size(); }

    void push(long long it, int kk, double dd, double ll, double g, double a, double kap) {
        iteration.push_back(it);
        k.push_back(kk);
        d.push_back(dd);
        loglik.push_back(ll);
        gamma.push_back(g);
        alpha.push_back(a);
        kappa.push_back(kap);
    }

    std::vector<double> second_half(const std::vector<double>& series) const {
        size_t half = series.size() / 2;
        return {series.begin() + half, series.end()};
    }
};

inline void write_trace_csv(const ChainTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("write_trace_csv: cannot open " + path);
    out << "iteration,chain,K,D,loglik,gamma,alpha,kappa\n";
    char buf[256];
    for (size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%lld,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      trace.iteration[i], trace.chain_id, static_cast<int>(trace.k[i]),
                      trace.d[i], trace.loglik[i], trace.gamma[i], trace.alpha[i],
                      trace.kappa[i]);
        out << buf;
    }
    if (!out) throw DataError("write_trace_csv: write failure " + path);
}

inline ChainTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("read_trace_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("iteration,chain", 0) != 0)
        throw DataError("read_trace_csv: bad header in " + path);
    ChainTrace tr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        long long it;
        int chain, kk;
        double dd, ll, g, a, kap;
        if (!(ss >> it >> chain >> kk >> dd >> ll >> g >> a >> kap))
            throw DataError("read_trace_csv: malformed row in " + path);
        tr.chain_id = chain;
        tr.push(it, kk, dd, ll, g, a, kap);
    }
    return tr;
}

// --- convergence diagnostics -------------------------------------------------

// Integrated autocorrelation time with the empirical cutoff
// C = min{l : |rho_l| < 2/sqrt(M)}.
inline double iat(std::span<const double> series) {
    const size_t m = series.size();
    if (m < 10) throw DataError("iat: need at least 10 samples");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(m);
    double c0 = 0.0;
    for (double v : series) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(m);
    if (c0 <= 0.0) throw DataError("iat: constant series");
    const double cutoff = 2.0 / std::sqrt(static_cast<double>(m));
    double tau = 0.5;
    for (size_t lag = 1; lag < m; ++lag) {
        double cl = 0.0;
        for (size_t i = 0; i + lag < m; ++i) cl += (series[i] - mean) * (series[i + lag] - mean);
        cl /= static_cast<double>(m);
        double rho = cl / c0;
        if (std::fabs(rho) < cutoff) break;
        tau += rho;
    }
    return tau;
}

struct PsrfResult {
    double estimate = 0.0;
    double upper = 0.0;
};

// Gelman-Rubin potential scale reduction over >= 2 equal-length chains,
// with the Brooks-Gelman F-quantile upper interval.
inline PsrfResult psrf(const std::vector<std::vector<double>>& chains) {
    const size_t m = chains.size();
    if (m < 2) throw DataError("psrf: need at least 2 chains");
    const size_t n = chains[0].size();
    for (const auto& c : chains)
        if (c.size() != n) throw DataError("psrf: chains must have equal length");
    if (n < 2) throw DataError("psrf: chains too short");

    std::vector<double> means(m), vars(m);
    for (size_t j = 0; j < m; ++j) {
        double mu = std::accumulate(chains[j].begin(), chains[j].end(), 0.0) / n;
        double s2 = 0.0;
        for (double v : chains[j]) s2 += (v - mu) * (v - mu);
        means[j] = mu;
        vars[j] = s2 / (n - 1);
    }
    double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    double b_over_n = 0.0;
    for (double mu : means) b_over_n += (mu - grand) * (mu - grand);
    b_over_n /= (m - 1);
    double w = std::accumulate(vars.begin(), vars.end(), 0.0) / m;
    if (w <= 0.0) throw DataError("psrf: zero within-chain variance");

    double nn = static_cast<double>(n);
    double v_hat = (nn - 1.0) / nn * w + (1.0 + 1.0 / m) * b_over_n;
    PsrfResult out;
    out.estimate = std::sqrt(v_hat / w);

    double var_of_vars = 0.0;
    for (double s2 : vars) var_of_vars += (s2 - w) * (s2 - w);
    var_of_vars /= (m - 1);
    double r2_upper = (nn - 1.0) / nn;
    if (b_over_n > 0.0) {
        double df_w = var_of_vars > 0.0 ? 2.0 * w * w * m / var_of_vars : 1e6;
        double q = f_quantile(0.975, static_cast<double>(m - 1), df_w);
        r2_upper += (1.0 + 1.0 / m) * b_over_n / w * q;
    }
    out.upper = std::sqrt(std::max(r2_upper, out.estimate * out.estimate));
    return out;
}

namespace detail {

// Batch-means standard error of a segment mean (autocorrelation aware).
inline double batch_se(std::span<const double> x, int batches) {
    size_t bn = x.size() / batches;
    if (bn < 1) throw DataError("batch_se: segment too short");
    std::vector<double> bm(batches);
    for (int b = 0; b < batches; ++b) {
        double s = 0.0;
        for (size_t i = 0; i < bn; ++i) s += x[b * bn + i];
        bm[b] = s / bn;
    }
    double mu = std::accumulate(bm.begin(), bm.end(), 0.0) / batches;
    double v = 0.0;
    for (double y : bm) v += (y - mu) * (y - mu);
    v /= (batches - 1);
    return std::sqrt(v / batches);
}

}  // namespace detail

// Geweke convergence z: mean of the first fraction vs mean of the last
// fraction, scaled by batch-means standard errors.
inline double geweke_z(std::span<const double> series, double first_frac = 0.1,
                       double last_frac = 0.5) {
    const size_t m = series.size();
    if (m < 100) throw DataError("geweke_z: need at least 100 samples");
    size_t n1 = static_cast<size_t>(m * first_frac);
    size_t n2 = static_cast<size_t>(m * last_frac);
    if (n1 < 20 || n2 < 20) throw DataError("geweke_z: segments too short");
    std::span<const double> a = series.subspan(0, n1);
    std::span<const double> b = series.subspan(m - n2, n2);
    auto mean = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v;
        return s / static_cast<double>(x.size());
    };
    int batches_a = n1 >= 200 ? 20 : 10;
    int batches_b = n2 >= 200 ? 20 : 10;
    double se1 = detail::batch_se(a, batches_a);
    double se2 = detail::batch_se(b, batches_b);
    double denom = std::sqrt(se1 * se1 + se2 * se2);
    if (denom <= 0.0) throw DataError("geweke_z: degenerate variance");
    return (mean(a) - mean(b)) / denom;
}

// --- recovery metrics ---------------------------------------------------------

using Matrix = std::vector<std::vector<double>>;

namespace detail {

inline Matrix pad_columns(const Matrix& m, size_t k) {
    Matrix out = m;
    for (auto& row : out) row.resize(k, 0.0);
    return out;
}

inline Matrix pad_square(const Matrix& m, size_t k) {
    Matrix out = m;
    for (auto& row : out) row.resize(k, 0.0);
    while (out.size() < k) out.emplace_back(k, 0.0);
    return out;
}

// Hungarian algorithm (potentials form) for square min-cost assignment.
inline std::vector<int> hungarian(const Matrix& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, HUGE_VAL);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = HUGE_VAL;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> match(n);  // match[column of estimate] = column of truth
    for (int j = 1; j <= n; ++j)
        if (p[j] >= 1) match[p[j] - 1] = j - 1;
    return match;
}

inline double membership_cost(const Matrix& est, const Matrix& truth,
                              const std::vector<int>& perm) {
    double c = 0.0;
    for (size_t i = 0; i < est.size(); ++i)
        for (size_t p = 0; p < perm.size(); ++p) {
            double d = est[i][p] - truth[i][perm[p]];
            c += d * d;
        }
    return c;
}

inline double compat_cost(const Matrix& est, const Matrix& truth, const std::vector<int>& perm) {
    double c = 0.0;
    for (size_t a = 0; a < perm.size(); ++a)
        for (size_t b = 0; b < perm.size(); ++b) {
            double d = est[a][b] - truth[perm[a]][perm[b]];
            c += d * d;
        }
    return c;
}

template <typename CostFn>
inline std::vector<int> brute_force_align(size_t k, CostFn cost) {
    std::vector<int> perm(k), best(k);
    std::iota(perm.begin(), perm.end(), 0);
    best = perm;
    double best_cost = cost(perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        double c = cost(perm);
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    }
    return best;
}

}  // namespace detail

// Column permutation minimizing the l2 cost between an estimated membership
// matrix (rows = nodes) and the truth; the smaller side is zero-padded.
// perm[p] is the truth column assigned to estimate column p.
inline std::vector<int> align_membership(const Matrix& est, const Matrix& truth) {
    if (est.size() != truth.size()) throw DataError("align_membership: row mismatch");
    size_t k = std::max(est.empty() ? 0 : est[0].size(), truth.empty() ? 0 : truth[0].size());
    Matrix a = detail::pad_columns(est, k);
    Matrix b = detail::pad_columns(truth, k);
    if (k <= 8)
        return detail::brute_force_align(
            k, [&](const std::vector<int>& p) { return detail::membership_cost(a, b, p); });
    Matrix cost(k, std::vector<double>(k, 0.0));
    for (size_t p = 0; p < k; ++p)
        for (size_t q = 0; q < k; ++q) {
            double c = 0.0;
            for (size_t i = 0; i < a.size(); ++i) {
                double d = a[i][p] - b[i][q];
                c += d * d;
            }
            cost[p][q] = c;
        }
    return detail::hungarian(cost);
}

// Permutation for a compatibility matrix; the cost is quadratic in the
// permutation, so this is exhaustive (k <= 10).
inline std::vector<int> align_compat(const Matrix& est, const Matrix& truth) {
    size_t k = std::max(est.size(), truth.size());
    if (k > 10) throw DataError("align_compat: too many communities for exact alignment");
    Matrix a = detail::pad_square(est, k);
    Matrix b = detail::pad_square(truth, k);
    return detail::brute_force_align(
        k, [&](const std::vector<int>& p) { return detail::compat_cost(a, b, p); });
}

// Mean over nodes of the aligned row-wise l2 error.
inline double l2_membership(const Matrix& est, const Matrix& truth) {
    auto perm = align_membership(est, truth);
    size_t k = perm.size();
    Matrix a = detail::pad_columns(est, k);
    Matrix b = detail::pad_columns(truth, k);
    double total = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double s = 0.0;
        for (size_t p = 0; p < k; ++p) {
            double d = a[i][p] - b[i][perm[p]];
            s += d * d;
        }
        total += std::sqrt(s);
    }
    return a.empty() ? 0.0 : total / static_cast<double>(a.size());
}

// Aligned Frobenius distance between compatibility matrices.
inline double l2_compat(const Matrix& est, const Matrix& truth) {
    auto perm = align_compat(est, truth);
    size_t k = perm.size();
    Matrix a = detail::pad_square(est, k);
    Matrix b = detail::pad_square(truth, k);
    return std::sqrt(detail::compat_cost(a, b, perm));
}

// Running posterior-mean of a matrix-valued sample sequence under label
// switching: each sample is aligned to the current mean before averaging.
class AlignedMeanAccumulator {
public:
    explicit AlignedMeanAccumulator(bool square) : square_(square) {}

    void add(const Matrix& sample) {
        size_t k = sample.empty() ? 0 : (square_ ? sample.size() : sample[0].size());
        size_t km = mean_.empty() ? 0 : (square_ ? mean_.size() : mean_[0].size());
        size_t kk = std::max(k, km);
        Matrix s = square_ ? detail::pad_square(sample, kk) : detail::pad_columns(sample, kk);
        if (count_ == 0) {
            mean_ = s;
            count_ = 1;
            return;
        }
        mean_ = square_ ? detail::pad_square(mean_, kk) : detail::pad_columns(mean_, kk);
        std::vector<int> perm = square_ ? align_compat(s, mean_) : align_membership(s, mean_);
        // permute the sample into the mean's column order
        Matrix aligned = mean_;
        if (square_) {
            for (size_t a = 0; a < kk; ++a)
                for (size_t b = 0; b < kk; ++b) aligned[perm[a]][perm[b]] = s[a][b];
        } else {
            for (size_t i = 0; i < s.size(); ++i)
                for (size_t p = 0; p < kk; ++p) aligned[i][perm[p]] = s[i][p];
        }
        ++count_;
        for (size_t i = 0; i < mean_.size(); ++i)
            for (size_t j = 0; j < mean_[i].size(); ++j)
                mean_[i][j] += (aligned[i][j] - mean_[i][j]) / static_cast<double>(count_);
    }

    const Matrix& mean() const { return mean_; }
    long long count() const { return count_; }

private:
    bool square_;
    Matrix mean_;
    long long count_ = 0;
};

struct LoglikSummary {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Mean with the 95% interval mean -/+ 1.96 * standard error.
inline LoglikSummary loglik_summary(std::span<const double> values) {
    if (values.size() < 2) throw DataError("loglik_summary: need at least 2 samples");
    double mu = 0.0;
    for (double v : values) mu += v;
    mu /= static_cast<double>(values.size());
    double s2 = 0.0;
    for (double v : values) s2 += (v - mu) * (v - mu);
    s2 /= static_cast<double>(values.size() - 1);
    double se = std::sqrt(s2 / static_cast<double>(values.size()));
    return {mu, mu - 1.96 * se, mu + 1.96 * se};
}

}  // namespace dim3
