#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "dim3/rng.hpp"
#include "dim3/state.hpp"

namespace test_util {

// Kolmogorov-Smirnov distance of samples against an analytic CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::fabs(f - (i + 1) / n));
        d = std::max(d, std::fabs(f - i / n));
    }
    return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        d = std::max(d, std::fabs(ia / static_cast<double>(a.size()) -
                                  ib / static_cast<double>(b.size())));
    }
    return d;
}

inline dim3::RelationTensor random_tensor(int n, int T, double p, dim3::Rng& rng) {
    dim3::RelationTensor d(n, T);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) d.set(t, i, j, rng.bernoulli(p) ? 1 : 0);
    return d;
}

}  // namespace test_util
