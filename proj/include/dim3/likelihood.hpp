#pragma once

#include <cmath>

#include "dim3/special.hpp"
#include "dim3/state.hpp"

namespace dim3 {

// Collapsed Beta-Bernoulli predictive for one edge given all the others
// assigned to cell (k,l). The caller must have removed the queried pair
// from the counts. Communities at or beyond the count width have no counts
// (fresh atoms) and fall back to the prior mean.
inline double edge_predictive(int k, int l, int e, const CountCache& counts,
                              double lambda1, double lambda2) {
    int n1 = 0, n0 = 0;
    if (k < counts.communities() && l < counts.communities()) {
        n1 = counts.link1(k, l);
        n0 = counts.link0(k, l);
    }
    double p1 = (n1 + lambda1) / (n1 + n0 + lambda1 + lambda2);
    return e ? p1 : 1.0 - p1;
}

// log P(E | Z, lambda1, lambda2) with W integrated out per community pair.
inline double joint_loglik(const CountCache& counts, double lambda1, double lambda2) {
    double lb0 = log_beta(lambda1, lambda2);
    double total = 0.0;
    for (int k = 0; k < counts.communities(); ++k)
        for (int l = 0; l < counts.communities(); ++l) {
            int n1 = counts.link1(k, l), n0 = counts.link0(k, l);
            if (n1 + n0 == 0) continue;
            total += log_beta(n1 + lambda1, n0 + lambda2) - lb0;
        }
    return total;
}

inline double joint_loglik(const LabelState& labels, const RelationTensor& data,
                           const GlobalWeights& w) {
    if (data.steps() == 0) return 0.0;
    return joint_loglik(rebuild_counts(labels, data), w.lambda1, w.lambda2);
}

// Posterior-mean role compatibility, for reporting.
inline CompatibilityMatrix posterior_compat(const CountCache& counts,
                                            double lambda1, double lambda2) {
    CompatibilityMatrix m(counts.communities());
    for (int k = 0; k < m.k; ++k)
        for (int l = 0; l < m.k; ++l) {
            int n1 = counts.link1(k, l), n0 = counts.link0(k, l);
            m.at(k, l) = (n1 + lambda1) / (n1 + n0 + lambda1 + lambda2);
        }
    return m;
}

}  // namespace dim3
