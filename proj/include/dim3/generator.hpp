#pragma once

#include <string>
#include <vector>

#include "dim3/dataset.hpp"
#include "dim3/rng.hpp"
#include "dim3/state.hpp"

namespace dim3 {

// The four 3x3 role-compatibility cases of the synthetic study.
inline CompatibilityMatrix case_matrix(int case_id) {
    static const double cases[4][9] = {
        {0.95, 0.05, 0.00, 0.05, 0.95, 0.05, 0.05, 0.00, 0.95},
        {0.95, 0.20, 0.00, 0.05, 0.95, 0.05, 0.20, 0.00, 0.95},
        {0.05, 0.95, 0.00, 0.05, 0.05, 0.95, 0.95, 0.00, 0.05},
        {0.05, 0.95, 0.00, 0.20, 0.05, 0.95, 0.95, 0.00, 0.20},
    };
    if (case_id < 1 || case_id > 4) throw ConfigError("case_matrix: case id must be 1..4");
    CompatibilityMatrix m(3);
    for (int i = 0; i < 9; ++i) m.w[i] = cases[case_id - 1][i];
    return m;
}

// Ground truth of the synthetic study: nodes equally partitioned into four
// groups sharing three communities, with the stated membership rows.
inline GroundTruth synthetic_truth(int case_id, int n) {
    static const double rows[4][3] = {
        {0.8, 0.2, 0.0}, {0.0, 0.8, 0.2}, {0.1, 0.05, 0.85}, {0.4, 0.4, 0.2}};
    GroundTruth g;
    g.case_id = case_id;
    g.compat = case_matrix(case_id);
    g.membership.resize(n);
    for (int i = 0; i < n; ++i) {
        int group = i * 4 / n;
        g.membership[i] = {rows[group][0], rows[group][1], rows[group][2]};
    }
    return g;
}

// Fixed-parameter generation: per ordered pair and time, sender label from
// the sender's membership row, receiver label from the receiver's row,
// edge ~ Bernoulli(W_sr). Labels are i.i.d. across pairs and times.
inline DatasetBundle generate_fixed(const GroundTruth& truth, int n, int T, uint64_t seed,
                                    const std::string& name = "synthetic") {
    truth.validate();
    if (static_cast<int>(truth.membership.size()) != n)
        throw DataError("generate_fixed: membership row count != n");
    Rng rng(seed, 0);
    DatasetBundle bundle;
    bundle.data = RelationTensor(n, T, name);
    bundle.name = name;
    bundle.truth = truth;
    int k = truth.compat.k;
    auto draw_row = [&](const std::vector<double>& row) {
        double u = rng.uniform();
        double acc = 0.0;
        for (int c = 0; c < k; ++c) {
            acc += row[c];
            if (u < acc) return c;
        }
        return k - 1;
    };
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                int s = draw_row(truth.membership[i]);
                int r = draw_row(truth.membership[j]);
                bundle.data.set(t, i, j, rng.bernoulli(truth.compat.at(s, r)) ? 1 : 0);
            }
    return bundle;
}

// A full prior draw of either dynamic model: realized labels, the stick
// weights that produced them, and edges.
struct PriorDraw {
    DatasetBundle bundle;
    LabelState labels;
    GlobalWeights weights;
};

namespace detail {

// Ancestral label draw through the lazy urn representation. One pair at a
// time in (t,i,j) order: sender and receiver candidates are scored by their
// urn weights with a single shared undiscovered atom, matching the pair
// conditional the samplers use.
inline void draw_labels_mtv(int n, int T, GlobalWeights& w, LabelState& labels,
                            CountCache& counts, Rng& rng) {
    const double kt = w.kappa / (2.0 * n);
    std::vector<double> ws, wr, grid;
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                int kc = counts.communities();
                ws.assign(kc + 1, 0.0);
                wr.assign(kc + 1, 0.0);
                for (int k = 0; k < kc; ++k) {
                    double sticky_i = t > 0 ? kt * counts.part(t - 1, i, k) : 0.0;
                    double sticky_j = t > 0 ? kt * counts.part(t - 1, j, k) : 0.0;
                    ws[k] = counts.part(t, i, k) + w.alpha * w.beta[k] + sticky_i;
                    wr[k] = counts.part(t, j, k) + w.alpha * w.beta[k] + sticky_j;
                }
                ws[kc] = w.alpha * w.beta_rem;
                wr[kc] = w.alpha * w.beta_rem;
                int s = static_cast<int>(rng.categorical(ws));
                int r = static_cast<int>(rng.categorical(wr));
                if (s == kc || r == kc) {
                    double b = rng.beta(1.0, w.gamma);
                    w.beta.push_back(b * w.beta_rem);
                    w.beta_rem *= 1.0 - b;
                    counts.add_community();
                    ++labels.communities;
                    if (s > kc || r > kc) throw NumericError("draw_labels_mtv: bad index");
                }
                labels.set(t, i, j, std::min(s, kc), std::min(r, kc));
                counts.add_pair(t, i, j, std::min(s, kc), std::min(r, kc), 0);
            }
}

inline void draw_labels_mti(int n, int T, GlobalWeights& w, LabelState& labels,
                            MtiTransitions& trans, Rng& rng) {
    std::vector<double> ws, wr;
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                int kc = trans.communities();
                int sp = t > 0 ? labels.s(t - 1, i, j) : -1;
                int rp = t > 0 ? labels.r(t - 1, i, j) : -1;
                ws.assign(kc + 1, 0.0);
                wr.assign(kc + 1, 0.0);
                for (int k = 0; k < kc; ++k) {
                    ws[k] = trans.count(i, sp, k) + w.alpha * w.beta[k] +
                            (sp >= 0 && k == sp ? w.kappa : 0.0);
                    wr[k] = trans.count(j, rp, k) + w.alpha * w.beta[k] +
                            (rp >= 0 && k == rp ? w.kappa : 0.0);
                }
                ws[kc] = w.alpha * w.beta_rem;
                wr[kc] = w.alpha * w.beta_rem;
                int s = static_cast<int>(rng.categorical(ws));
                int r = static_cast<int>(rng.categorical(wr));
                if (s == kc || r == kc) {
                    double b = rng.beta(1.0, w.gamma);
                    w.beta.push_back(b * w.beta_rem);
                    w.beta_rem *= 1.0 - b;
                    trans.add_community();
                    ++labels.communities;
                }
                s = std::min(s, kc);
                r = std::min(r, kc);
                labels.set(t, i, j, s, r);
                trans.add(i, sp, s);
                trans.add(j, rp, r);
            }
}

inline RelationTensor draw_edges_given_labels(const LabelState& labels, const GlobalWeights& w,
                                              Rng& rng, const std::string& name) {
    RelationTensor data(labels.nodes, labels.steps, name);
    int kc = labels.communities;
    std::vector<double> wcell(static_cast<size_t>(kc) * kc);
    for (auto& x : wcell) x = rng.beta(w.lambda1, w.lambda2);
    for (int t = 0; t < labels.steps; ++t)
        for (int i = 0; i < labels.nodes; ++i)
            for (int j = 0; j < labels.nodes; ++j) {
                if (i == j) continue;
                double p = wcell[static_cast<size_t>(labels.s(t, i, j)) * kc + labels.r(t, i, j)];
                data.set(t, i, j, rng.bernoulli(p) ? 1 : 0);
            }
    return data;
}

}  // namespace detail

// Prior draw of the time-variant model with the given hyperparameters
// (beta comes out of the draw; any beta passed in is ignored).
inline PriorDraw draw_mtv_prior(int n, int T, const GlobalWeights& hyper, Rng& rng,
                                const std::string& name = "mtv-prior") {
    PriorDraw out;
    out.weights = hyper;
    out.weights.beta.clear();
    out.weights.beta_rem = 1.0;
    out.labels = LabelState(n, T, 0);
    CountCache counts(n, T, 0);
    detail::draw_labels_mtv(n, T, out.weights, out.labels, counts, rng);
    out.bundle.data = detail::draw_edges_given_labels(out.labels, out.weights, rng, name);
    out.bundle.name = name;
    return out;
}

inline PriorDraw draw_mti_prior(int n, int T, const GlobalWeights& hyper, Rng& rng,
                                const std::string& name = "mti-prior") {
    PriorDraw out;
    out.weights = hyper;
    out.weights.beta.clear();
    out.weights.beta_rem = 1.0;
    out.labels = LabelState(n, T, 0);
    MtiTransitions trans(n, 0);
    detail::draw_labels_mti(n, T, out.weights, out.labels, trans, rng);
    out.bundle.data = detail::draw_edges_given_labels(out.labels, out.weights, rng, name);
    out.bundle.name = name;
    return out;
}

inline PriorDraw generate_mtv(int n, int T, const GlobalWeights& hyper, uint64_t seed,
                              const std::string& name = "mtv-prior") {
    Rng rng(seed, 0);
    return draw_mtv_prior(n, T, hyper, rng, name);
}

inline PriorDraw generate_mti(int n, int T, const GlobalWeights& hyper, uint64_t seed,
                              const std::string& name = "mti-prior") {
    Rng rng(seed, 0);
    return draw_mti_prior(n, T, hyper, rng, name);
}

// Sampson-style fixture: every node names exactly three favourites per
// time step, chosen by planted-block affinity with mild persistence noise.
inline DatasetBundle sampson_like_fixture(uint64_t seed, const std::string& name = "sampson-like") {
    const int n = 18, T = 3;
    Rng rng(seed, 0);
    std::vector<int> group(n);
    for (int i = 0; i < n; ++i) group[i] = i * 4 / n;
    DatasetBundle bundle;
    bundle.data = RelationTensor(n, T, name);
    bundle.name = name;
    std::vector<double> affinity(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            affinity[i * n + j] = (group[i] == group[j] ? 2.0 : 0.0) + rng.uniform();
        }
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) {
            std::vector<std::pair<double, int>> ranked;
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                ranked.emplace_back(affinity[i * n + j] + 0.4 * rng.uniform(), j);
            }
            std::sort(ranked.rbegin(), ranked.rend());
            for (int c = 0; c < 3; ++c) bundle.data.set(t, i, ranked[c].second, 1);
        }
    }
    return bundle;
}

}  // namespace dim3
