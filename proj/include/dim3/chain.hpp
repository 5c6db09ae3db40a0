#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "dim3/hyper.hpp"
#include "dim3/likelihood.hpp"
#include "dim3/rng.hpp"
#include "dim3/special.hpp"
#include "dim3/state.hpp"
#include "dim3/stirling.hpp"
#include "dim3/tables.hpp"

namespace dim3 {

struct ChainConfig {
    ModelKind model = ModelKind::MtvGibbs;
    int k_fixed = 3;          // finite baselines
    int k_trunc = 0;          // >0: truncated mode with frozen beta/hypers (oracle tests)
    int init_communities = 3;
    bool freeze_gamma = false;
    bool freeze_concentration = false;
    bool freeze_ratio = false;
    bool random_order = false;     // randomized pair visit order within a sweep
    bool parallel_labels = false;  // slice only: frozen-snapshot label stage
    HyperPriors priors;
};

// One MCMC chain. Holds the data (mutable for joint-distribution testing),
// the label state with its count caches, and the global weights. All five
// model variants run through here; W and the membership distributions stay
// collapsed except for the slice sampler's explicit sticks.
class Chain {
public:
    Chain(RelationTensor data, ChainConfig cfg, GlobalWeights weights, Rng rng)
        : data_(std::move(data)), cfg_(cfg), w_(std::move(weights)), rng_(rng),
          n_(data_.nodes()), steps_(data_.steps()) {
        if (finite() && cfg_.k_fixed < 1) throw ConfigError("k_fixed must be >= 1");
        if (cfg_.k_trunc > 0 && static_cast<int>(w_.beta.size()) != cfg_.k_trunc)
            throw ConfigError("truncated mode needs beta sized to k_trunc");
        int k0 = initial_k();
        labels_ = LabelState(n_, steps_, k0);
        if (!finite() && cfg_.k_trunc == 0 && static_cast<int>(w_.beta.size()) != k0)
            init_uniform_beta(k0);
        counts_ = CountCache(n_, steps_, k0);
        if (mti()) trans_ = MtiTransitions(n_, k0);
    }

    // --- state setup -------------------------------------------------------

    void init_random_labels() {
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    int s = static_cast<int>(rng_.uniform() * labels_.communities);
                    int r = static_cast<int>(rng_.uniform() * labels_.communities);
                    s = std::min(s, labels_.communities - 1);
                    r = std::min(r, labels_.communities - 1);
                    labels_.set(t, i, j, s, r);
                }
        rebuild();
    }

    // Install externally drawn state (prior draws, checkpoints).
    void set_state(const LabelState& labels, const GlobalWeights& weights) {
        if (labels.nodes != n_ || labels.steps != steps_)
            throw DataError("set_state: dimension mismatch");
        labels_ = labels;
        w_ = weights;
        rebuild();
    }

    void rebuild() {
        counts_ = rebuild_counts(labels_, data_);
        if (mti()) trans_ = rebuild_transitions(labels_);
    }

    // --- accessors ----------------------------------------------------------

    const RelationTensor& data() const { return data_; }
    const LabelState& labels() const { return labels_; }
    const CountCache& counts() const { return counts_; }
    const GlobalWeights& weights() const { return w_; }
    GlobalWeights& weights() { return w_; }
    Rng& rng() { return rng_; }
    const ChainConfig& config() const { return cfg_; }
    int k_active() const { return counts_.active_communities(); }
    long long gamma_grid_fallbacks() const { return gamma_grid_fallbacks_; }

    double loglik() const { return joint_loglik(counts_, w_.lambda1, w_.lambda2); }

    // --- one full iteration --------------------------------------------------

    void sweep() {
        if (cfg_.model == ModelKind::MtvSlice)
            slice_label_stage();
        else
            gibbs_label_stage();
        if (!finite() && cfg_.k_trunc == 0) {
            TableCounts tables = sample_tables();
            hyper_gamma_stage(tables);
            resample_beta(tables.mhat_by_dish, w_.gamma, w_, rng_);
            hyper_concentration_stage(tables);
            compact();
        }
        ++sweep_index_;
    }

    // --- label stage (collapsed Gibbs) ---------------------------------------

    void gibbs_label_stage() {
        auto order = pair_order();
        for (auto [t, i, j] : order) update_pair_gibbs(t, i, j);
    }

    void update_pair_gibbs(int t, int i, int j) {
        int so = labels_.s(t, i, j), ro = labels_.r(t, i, j);
        int e = data_.at(t, i, j);
        counts_.remove_pair(t, i, j, so, ro, e);

        int sp = -1, sn = -1, rp = -1, rn = -1;
        if (mti()) {
            sp = t > 0 ? labels_.s(t - 1, i, j) : -1;
            rp = t > 0 ? labels_.r(t - 1, i, j) : -1;
            sn = t + 1 < steps_ ? labels_.s(t + 1, i, j) : -1;
            rn = t + 1 < steps_ ? labels_.r(t + 1, i, j) : -1;
            trans_.remove(i, sp, so);
            trans_.remove(j, rp, ro);
            if (sn >= 0) trans_.remove(i, so, sn);
            if (rn >= 0) trans_.remove(j, ro, rn);
        }

        if (mti()) {
            mti_coord_weights(i, sp, sn, ws_);
            mti_coord_weights(j, rp, rn, wr_);
        } else {
            mtv_coord_weights(t, i, ws_);
            mtv_coord_weights(t, j, wr_);
        }
        auto [snew, rnew] = draw_pair(e);

        if (snew >= labels_.communities || rnew >= labels_.communities) {
            int atom = create_community();
            if (snew >= atom) snew = atom;
            if (rnew >= atom) rnew = atom;
        }
        labels_.set(t, i, j, snew, rnew);
        counts_.add_pair(t, i, j, snew, rnew, e);
        if (mti()) {
            trans_.add(i, sp, snew);
            trans_.add(j, rp, rnew);
            if (sn >= 0) trans_.add(i, snew, sn);
            if (rn >= 0) trans_.add(j, rnew, rn);
        }
    }

    // Normalized conditional table P(s=k, r=l | everything else) for one
    // pair; leaves the state untouched. Row index is the sender candidate.
    std::vector<double> pair_conditional(int t, int i, int j, size_t& cols) {
        int so = labels_.s(t, i, j), ro = labels_.r(t, i, j);
        int e = data_.at(t, i, j);
        counts_.remove_pair(t, i, j, so, ro, e);
        int sp = -1, sn = -1, rp = -1, rn = -1;
        if (mti()) {
            sp = t > 0 ? labels_.s(t - 1, i, j) : -1;
            rp = t > 0 ? labels_.r(t - 1, i, j) : -1;
            sn = t + 1 < steps_ ? labels_.s(t + 1, i, j) : -1;
            rn = t + 1 < steps_ ? labels_.r(t + 1, i, j) : -1;
            trans_.remove(i, sp, so);
            trans_.remove(j, rp, ro);
            if (sn >= 0) trans_.remove(i, so, sn);
            if (rn >= 0) trans_.remove(j, ro, rn);
        }
        if (mti()) {
            mti_coord_weights(i, sp, sn, ws_);
            mti_coord_weights(j, rp, rn, wr_);
        } else {
            mtv_coord_weights(t, i, ws_);
            mtv_coord_weights(t, j, wr_);
        }
        cols = wr_.size();
        std::vector<double> grid(ws_.size() * cols, 0.0);
        double total = 0.0;
        for (size_t a = 0; a < ws_.size(); ++a)
            for (size_t b = 0; b < cols; ++b) {
                double pe = edge_predictive(static_cast<int>(a), static_cast<int>(b), e,
                                            counts_, w_.lambda1, w_.lambda2);
                grid[a * cols + b] = ws_[a] * wr_[b] * pe;
                total += grid[a * cols + b];
            }
        for (double& v : grid) v /= total;
        if (mti()) {
            trans_.add(i, sp, so);
            trans_.add(j, rp, ro);
            if (sn >= 0) trans_.add(i, so, sn);
            if (rn >= 0) trans_.add(j, ro, rn);
        }
        counts_.add_pair(t, i, j, so, ro, e);
        return grid;
    }

    // Candidate weights for one MTV coordinate (node's label at time t),
    // with the pair removed from the counts. Entry K is the new community
    // in infinite mode. Each weight is the within-restaurant urn predictive
    // times the time-(t+1) coupling ratio
    //   rising(a_k + kt, N_ik^{t+1}) / rising(a_k, N_ik^{t+1}),
    // a_k = base_k + kt*N_ik^{t,-}, kt = kappa/2n; the candidate raises the
    // next restaurant's sticky mass for its community by kt.
    void mtv_coord_weights(int t, int node, std::vector<double>& wv) const {
        const int kc = counts_.communities();
        const bool open = open_world();
        const double kt = w_.kappa / (2.0 * n_);
        wv.assign(kc + (open ? 1 : 0), 0.0);
        const auto& cur = counts_.part_row(t, node);
        for (int k = 0; k < kc; ++k) {
            double crf = cur[k] + base_mass(k);
            if (t > 0) crf += kt * counts_.part(t - 1, node, k);
            double fwd = 1.0;
            if (t + 1 < steps_ && kt > 0.0) {
                int ahead = counts_.part(t + 1, node, k);
                double a = std::max(base_mass(k) + kt * cur[k], 1e-300);
                for (int m = 0; m < ahead; ++m) fwd *= (a + kt + m) / (a + m);
            }
            wv[k] = crf * fwd;
        }
        if (open) wv[kc] = w_.alpha * w_.beta_rem;
    }

    // Candidate weights for one MTI coordinate. The label is a customer of
    // family restaurant (node, prev) and chooses the restaurant its chain
    // successor eats in, so the forward factor is the successor's predictive
    // in restaurant (node, k) — with this label itself seated when k == prev.
    void mti_coord_weights(int node, int prev, int next, std::vector<double>& wv) const {
        const int kc = counts_.communities();
        const bool open = open_world();
        wv.assign(kc + (open ? 1 : 0), 0.0);
        const double theta = w_.alpha + w_.kappa;
        for (int k = 0; k < kc; ++k) {
            double crf = trans_.count(node, prev, k) + base_mass(k);
            if (prev >= 0 && k == prev) crf += w_.kappa;
            double fwd = 1.0;
            if (next >= 0) {
                double numer = trans_.count(node, k, next) + base_mass(next);
                if (k == next) numer += w_.kappa;
                if (prev == k && k == next) numer += 1.0;
                double denom = trans_.total(node, k) + w_.alpha + w_.kappa;
                if (prev == k) denom += 1.0;
                fwd = numer / denom;
            }
            wv[k] = crf * fwd;
        }
        if (open) {
            double crf = w_.alpha * w_.beta_rem;
            double fwd = next >= 0 ? base_mass(next) / theta : 1.0;
            wv[kc] = crf * fwd;
        }
    }

    // --- slice sampler -------------------------------------------------------

    // Sweep stages per the conditional scheme: sticks, slices, labels. The
    // label stage walks time backwards so that collapsing the un-redrawn
    // future sticks stays a valid partially collapsed update.
    void slice_label_stage() {
        slice_sticks();
        slice_slices();
        slice_extend();
        if (cfg_.parallel_labels)
            slice_labels_snapshot();
        else
            slice_labels_sequential();
    }

    // pi'_k ~ Beta(a,b) with a = base_k + N^t + kt N^{t-1} and b the same
    // tail sums, i.e. the stick form of Dir(urn mass + customer counts).
    void slice_sticks() {
        const int ka = static_cast<int>(w_.beta.size());
        const double kt = w_.kappa / (2.0 * n_);
        pi_.assign(static_cast<size_t>(steps_) * n_, {});
        pi_rem_.assign(static_cast<size_t>(steps_) * n_, 1.0);
        double beta_tail_full = w_.beta_total();
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i) {
                auto& row = pi_[static_cast<size_t>(t) * n_ + i];
                row.resize(ka);
                double tail_beta = beta_tail_full;
                int tail_cur = 2 * (n_ - 1);
                int tail_prev = t > 0 ? 2 * (n_ - 1) : 0;
                double prod = 1.0;
                for (int k = 0; k < ka; ++k) {
                    int ncur = k < counts_.communities() ? counts_.part(t, i, k) : 0;
                    int nprev = (t > 0 && k < counts_.communities()) ? counts_.part(t - 1, i, k) : 0;
                    tail_beta -= w_.beta[k];
                    tail_cur -= ncur;
                    tail_prev -= nprev;
                    double a = w_.alpha * w_.beta[k] + ncur + kt * nprev;
                    double b = w_.alpha * tail_beta + tail_cur + kt * tail_prev;
                    double v = b > 0.0 ? rng_.beta(a, b) : 1.0;
                    row[k] = v * prod;
                    prod *= 1.0 - v;
                }
                pi_rem_[static_cast<size_t>(t) * n_ + i] = prod;
            }
    }

    void slice_slices() {
        us_.assign(labels_.send.size(), 0.0);
        ur_.assign(labels_.send.size(), 0.0);
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    size_t id = labels_.idx(t, i, j);
                    us_[id] = rng_.uniform() * pi_row(t, i)[labels_.s(t, i, j)];
                    ur_[id] = rng_.uniform() * pi_row(t, j)[labels_.r(t, i, j)];
                }
    }

    // Extend rows until each remainder is below the smallest slice that can
    // look at it; undiscovered atoms get prior sticks. Extends the global
    // beta list as needed (truncated mode never extends: beta_rem = 0).
    void slice_extend() {
        if (!open_world()) return;
        std::vector<double> row_min(static_cast<size_t>(steps_) * n_, 1.0);
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    size_t id = labels_.idx(t, i, j);
                    auto& mi = row_min[static_cast<size_t>(t) * n_ + i];
                    auto& mj = row_min[static_cast<size_t>(t) * n_ + j];
                    mi = std::min(mi, us_[id]);
                    mj = std::min(mj, ur_[id]);
                }
        for (size_t rid = 0; rid < pi_.size(); ++rid) {
            auto& row = pi_[rid];
            double& rem = pi_rem_[rid];
            while (rem >= row_min[rid]) {
                while (static_cast<int>(w_.beta.size()) <= static_cast<int>(row.size()))
                    extend_beta_atom();
                int k = static_cast<int>(row.size());
                double tail = w_.beta_rem;
                for (size_t q = k + 1; q < w_.beta.size(); ++q) tail += w_.beta[q];
                double a = w_.alpha * w_.beta[k];
                double b = w_.alpha * tail;
                double v = b > 0.0 ? rng_.beta(a, b) : 1.0;
                row.push_back(v * rem);
                rem *= 1.0 - v;
            }
        }
    }

    void slice_labels_sequential() {
        for (int t = steps_ - 1; t >= 0; --t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    update_pair_slice(t, i, j, rng_);
                }
    }

    // Scheduling-independent variant: every pair decides against the same
    // frozen snapshot with its own derived rng stream, then all labels are
    // applied at once. Trades the sequential conditionals for independence.
    void slice_labels_snapshot() {
        LabelState staged = labels_;
        const CountCache frozen = counts_;
        for (int t = steps_ - 1; t >= 0; --t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    Rng sub = pair_substream(t, i, j);
                    auto [s, r] = decide_pair_slice(frozen, t, i, j, false, sub);
                    staged.set(t, i, j, s, r);
                }
        apply_staged_slice(staged);
    }

    Rng pair_substream(int t, int i, int j) const {
        uint64_t pair_id = (static_cast<uint64_t>(t) * n_ + i) * n_ + j;
        uint64_t stream = rng_.stream() * 0x10000000ULL + pair_id * 8191ULL +
                          static_cast<uint64_t>(sweep_index_ % 8191);
        return Rng(rng_.seed() ^ (0x9e3779b97f4a7c15ULL + sweep_index_), stream);
    }

    void update_pair_slice(int t, int i, int j, Rng& rng) {
        int so = labels_.s(t, i, j), ro = labels_.r(t, i, j);
        int e = data_.at(t, i, j);
        counts_.remove_pair(t, i, j, so, ro, e);
        auto [snew, rnew] = decide_pair_slice(counts_, t, i, j, true, rng);
        while (snew >= labels_.communities || rnew >= labels_.communities) grow_community_from_beta();
        labels_.set(t, i, j, snew, rnew);
        counts_.add_pair(t, i, j, snew, rnew, e);
    }

    // Candidates are the stick components above the pair's slices; weights
    // carry the forward coupling and the collapsed edge likelihood (the
    // current-time factor is encoded by the slice indicator itself).
    // `excluded` says whether `counts` already has this pair removed; the
    // snapshot path passes the full counts and discounts in place.
    std::pair<int, int> decide_pair_slice(const CountCache& counts, int t, int i, int j,
                                          bool excluded, Rng& rng) const {
        size_t id = labels_.idx(t, i, j);
        int e = data_.at(t, i, j);
        int so = excluded ? -1 : labels_.s(t, i, j);
        int ro = excluded ? -1 : labels_.r(t, i, j);
        cand_s_.clear();
        cand_r_.clear();
        const auto& rowi = pi_row(t, i);
        const auto& rowj = pi_row(t, j);
        for (int k = 0; k < static_cast<int>(rowi.size()); ++k)
            if (rowi[k] > us_[id]) cand_s_.push_back(k);
        for (int k = 0; k < static_cast<int>(rowj.size()); ++k)
            if (rowj[k] > ur_[id]) cand_r_.push_back(k);
        if (cand_s_.empty() || cand_r_.empty())
            throw NumericError("slice: empty candidate set");

        ws_.assign(cand_s_.size(), 1.0);
        wr_.assign(cand_r_.size(), 1.0);
        const double kt = w_.kappa / (2.0 * n_);
        if (t + 1 < steps_ && kt > 0.0) {
            for (size_t a = 0; a < cand_s_.size(); ++a)
                ws_[a] = slice_forward(counts, t, i, cand_s_[a], so, kt);
            for (size_t b = 0; b < cand_r_.size(); ++b)
                wr_[b] = slice_forward(counts, t, j, cand_r_[b], ro, kt);
        }
        grid_.assign(cand_s_.size() * cand_r_.size(), 0.0);
        for (size_t a = 0; a < cand_s_.size(); ++a)
            for (size_t b = 0; b < cand_r_.size(); ++b) {
                int k = cand_s_[a], l = cand_r_[b];
                int kc = counts.communities();
                int n1 = (k < kc && l < kc) ? counts.link1(k, l) : 0;
                int n0 = (k < kc && l < kc) ? counts.link0(k, l) : 0;
                if (k == so && l == ro) (e ? n1 : n0) -= 1;
                double p1 = (n1 + w_.lambda1) / (n1 + n0 + w_.lambda1 + w_.lambda2);
                grid_[a * cand_r_.size() + b] = ws_[a] * wr_[b] * (e ? p1 : 1.0 - p1);
            }
        size_t pick = rng.categorical(grid_);
        return {cand_s_[pick / cand_r_.size()], cand_r_[pick % cand_r_.size()]};
    }

    const std::vector<double>& stick_row(int t, int i) const { return pi_row(t, i); }
    double slice_u_s(int t, int i, int j) const { return us_[labels_.idx(t, i, j)]; }
    double slice_u_r(int t, int i, int j) const { return ur_[labels_.idx(t, i, j)]; }

    double slice_forward(const CountCache& counts, int t, int node, int k, int old_label,
                         double kt) const {
        int kc = counts.communities();
        int ahead = k < kc ? counts.part(t + 1, node, k) : 0;
        if (ahead == 0) return 1.0;
        int cur = k < kc ? counts.part(t, node, k) : 0;
        if (k == old_label) --cur;
        double a = std::max(w_.alpha * w_.beta[k] + kt * cur, 1e-300);
        double fwd = 1.0;
        for (int m = 0; m < ahead; ++m) fwd *= (a + kt + m) / (a + m);
        return fwd;
    }

    // --- tables, beta, hyperparameters ---------------------------------------

    TableCounts sample_tables() {
        TableCounts tc;
        tc.mhat_by_dish.assign(counts_.communities(), 0.0);
        double theta = w_.alpha + w_.kappa;
        if (theta <= 0.0) theta = 1.0;
        if (mti())
            sample_tables_mti(tc, theta);
        else
            sample_tables_mtv(tc, theta);
        return tc;
    }

    void hyper_gamma_stage(const TableCounts& tables) {
        if (cfg_.freeze_gamma) return;
        bool fell_back = false;
        w_.gamma = sample_gamma_conc(tables.dishes_with_mhat(), tables.total_mhat,
                                     cfg_.priors, rng_, &fell_back);
        if (fell_back) ++gamma_grid_fallbacks_;
    }

    void hyper_concentration_stage(const TableCounts& tables) {
        double theta = w_.alpha + w_.kappa;
        double scale = crf_sticky_scale(cfg_.model, n_);
        double ratio = concentration_ratio(w_.alpha, w_.kappa, scale);
        if (!cfg_.freeze_concentration)
            theta = sample_concentration(tables.restaurants, theta, cfg_.priors, rng_);
        if (!cfg_.freeze_ratio)
            ratio = std::clamp(
                sample_ratio(tables.sticky_route, tables.global_route, cfg_.priors, rng_),
                1e-12, 1.0 - 1e-12);
        if (!cfg_.freeze_concentration || !cfg_.freeze_ratio)
            apply_concentration(theta, ratio, scale, w_.alpha, w_.kappa);
    }

    // Remove unoccupied atoms, folding their beta mass back into the
    // undiscovered remainder. Runs at the end of each sweep.
    void compact() {
        int kc = counts_.communities();
        std::vector<int> remap(kc, -1);
        int next = 0;
        for (int k = 0; k < kc; ++k)
            if (counts_.occupancy(k) > 0) remap[k] = next++;
        if (next == kc && static_cast<int>(w_.beta.size()) == kc) return;

        std::vector<double> beta2(next, 0.0);
        double rem = w_.beta_rem;
        for (int k = 0; k < static_cast<int>(w_.beta.size()); ++k) {
            if (k < kc && remap[k] >= 0)
                beta2[remap[k]] = w_.beta[k];
            else
                rem += w_.beta[k];
        }
        w_.beta = std::move(beta2);
        w_.beta_rem = rem;
        for (auto& v : labels_.send)
            if (v >= 0) v = remap[v];
        for (auto& v : labels_.recv)
            if (v >= 0) v = remap[v];
        labels_.communities = next;
        rebuild();
    }

    // --- joint-distribution testing support -----------------------------------

    // Redraw E | Z from the model: W ~ Beta prior per cell, edges Bernoulli.
    void resample_edges() {
        int kc = counts_.communities();
        std::vector<double> wcell(static_cast<size_t>(kc) * kc);
        for (auto& x : wcell) x = rng_.beta(w_.lambda1, w_.lambda2);
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    double p = wcell[static_cast<size_t>(labels_.s(t, i, j)) * kc +
                                     labels_.r(t, i, j)];
                    data_.set(t, i, j, rng_.bernoulli(p) ? 1 : 0);
                }
        rebuild();
    }

    // --- summary statistics ----------------------------------------------------

    // Estimated density D, the mixture-style fit score traced per sweep.
    double density_d() const {
        const int kc = counts_.communities();
        const double scale = 1.0 / (4.0 * static_cast<double>(n_) * n_ * std::max(steps_, 1));
        double total = 0.0;
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    int s = labels_.s(t, i, j), r = labels_.r(t, i, j);
                    int e = data_.at(t, i, j);
                    double inner = 0.0;
                    for (int k = 0; k < kc; ++k) {
                        double nik = counts_.part(t, i, k);
                        if (nik == 0.0) continue;
                        for (int l = 0; l < kc; ++l) {
                            double njl = counts_.part(t, j, l);
                            if (njl == 0.0) continue;
                            int n1 = counts_.link1(k, l) - ((k == s && l == r && e == 1) ? 1 : 0);
                            int n0 = counts_.link0(k, l) - ((k == s && l == r && e == 0) ? 1 : 0);
                            double p1 = (n1 + w_.lambda1) / (n1 + n0 + w_.lambda1 + w_.lambda2);
                            inner += nik * njl * (e ? p1 : 1.0 - p1);
                        }
                    }
                    total += std::log(inner * scale);
                }
        return -2.0 * total;
    }

    double mean_edge_predictive() const {
        double total = 0.0;
        int cnt = 0;
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    int s = labels_.s(t, i, j), r = labels_.r(t, i, j);
                    int e = data_.at(t, i, j);
                    int n1 = counts_.link1(s, r) - (e == 1 ? 1 : 0);
                    int n0 = counts_.link0(s, r) - (e == 0 ? 1 : 0);
                    total += (n1 + w_.lambda1) / (n1 + n0 + w_.lambda1 + w_.lambda2);
                    ++cnt;
                }
        return cnt > 0 ? total / cnt : 0.0;
    }

    // Per-time membership point estimate N_ik^t / 2(n-1), rows (t*n+i) x K.
    std::vector<std::vector<double>> membership_estimate() const {
        std::vector<std::vector<double>> m(static_cast<size_t>(steps_) * n_);
        double denom = 2.0 * (n_ - 1);
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i) {
                auto& row = m[static_cast<size_t>(t) * n_ + i];
                row.resize(counts_.communities());
                for (int k = 0; k < counts_.communities(); ++k)
                    row[k] = counts_.part(t, i, k) / denom;
            }
        return m;
    }

private:
    bool finite() const {
        return cfg_.model == ModelKind::FiniteMtv || cfg_.model == ModelKind::FiniteMti;
    }
    bool mti() const {
        return cfg_.model == ModelKind::MtiGibbs || cfg_.model == ModelKind::FiniteMti;
    }
    bool open_world() const { return !finite() && cfg_.k_trunc == 0; }

    int initial_k() const {
        if (finite()) return cfg_.k_fixed;
        if (cfg_.k_trunc > 0) return cfg_.k_trunc;
        return std::max(cfg_.init_communities, 1);
    }

    void init_uniform_beta(int k) {
        w_.beta.assign(k, 1.0 / (k + 1));
        w_.beta_rem = 1.0 / (k + 1);
    }

    double base_mass(int k) const {
        if (finite()) return w_.alpha / cfg_.k_fixed;
        return w_.alpha * w_.beta[k];
    }

    std::vector<std::tuple<int, int, int>> pair_order() {
        std::vector<std::tuple<int, int, int>> order;
        order.reserve(static_cast<size_t>(steps_) * n_ * (n_ - 1));
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    if (i != j) order.emplace_back(t, i, j);
        if (cfg_.random_order)
            for (size_t a = order.size(); a > 1; --a)
                std::swap(order[a - 1], order[static_cast<size_t>(rng_.uniform() * a)]);
        return order;
    }

    std::pair<int, int> draw_pair(int e) {
        const size_t ns = ws_.size(), nr = wr_.size();
        double smax = 0.0, rmax = 0.0;
        for (double v : ws_) smax = std::max(smax, v);
        for (double v : wr_) rmax = std::max(rmax, v);
        grid_.assign(ns * nr, 0.0);
        if (smax > 0.0 && rmax > 0.0) {
            for (size_t a = 0; a < ns; ++a) {
                double wa = ws_[a] / smax;
                for (size_t b = 0; b < nr; ++b)
                    grid_[a * nr + b] =
                        wa * (wr_[b] / rmax) *
                        edge_predictive(static_cast<int>(a), static_cast<int>(b), e, counts_,
                                        w_.lambda1, w_.lambda2);
            }
            double total = 0.0;
            for (double v : grid_) total += v;
            if (total > 0.0 && std::isfinite(total)) {
                size_t pick = rng_.categorical(grid_);
                return {static_cast<int>(pick / nr), static_cast<int>(pick % nr)};
            }
        }
        // Underflow fallback: same grid in log space.
        logw_.assign(ns * nr, -HUGE_VAL);
        for (size_t a = 0; a < ns; ++a)
            for (size_t b = 0; b < nr; ++b) {
                double pe = edge_predictive(static_cast<int>(a), static_cast<int>(b), e, counts_,
                                            w_.lambda1, w_.lambda2);
                if (ws_[a] > 0.0 && wr_[b] > 0.0 && pe > 0.0)
                    logw_[a * nr + b] = std::log(ws_[a]) + std::log(wr_[b]) + std::log(pe);
            }
        size_t pick = rng_.categorical_log(logw_);
        return {static_cast<int>(pick / nr), static_cast<int>(pick % nr)};
    }

    int create_community() {
        double b = rng_.beta(1.0, w_.gamma);
        w_.beta.push_back(b * w_.beta_rem);
        w_.beta_rem *= 1.0 - b;
        grow_community_from_beta();
        return labels_.communities - 1;
    }

    // Bring count structures up to one more atom already present in beta.
    void grow_community_from_beta() {
        counts_.add_community();
        if (mti()) trans_.add_community();
        ++labels_.communities;
    }

    void extend_beta_atom() {
        double b = rng_.beta(1.0, w_.gamma);
        w_.beta.push_back(b * w_.beta_rem);
        w_.beta_rem *= 1.0 - b;
    }

    const std::vector<double>& pi_row(int t, int i) const {
        return pi_[static_cast<size_t>(t) * n_ + i];
    }

    void apply_staged_slice(const LabelState& staged) {
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    if (i == j) continue;
                    int s = staged.s(t, i, j), r = staged.r(t, i, j);
                    while (s >= labels_.communities || r >= labels_.communities)
                        grow_community_from_beta();
                    int so = labels_.s(t, i, j), ro = labels_.r(t, i, j);
                    int e = data_.at(t, i, j);
                    counts_.remove_pair(t, i, j, so, ro, e);
                    labels_.set(t, i, j, s, r);
                    counts_.add_pair(t, i, j, s, r, e);
                }
    }

    void sample_tables_mtv(TableCounts& tc, double theta) {
        const double kt = w_.kappa / (2.0 * n_);
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i) {
                int rid = static_cast<int>(tc.restaurants.size());
                TableCounts::Restaurant rest;
                rest.customers = 2 * (n_ - 1);
                double base_total = w_.alpha;
                for (int k = 0; k < counts_.communities(); ++k) {
                    int customers = counts_.part(t, i, k);
                    if (customers == 0) continue;
                    double sticky = t > 0 ? kt * counts_.part(t - 1, i, k) : 0.0;
                    double global = w_.alpha * w_.beta[k];
                    int m = sample_dish_tables(customers, global + sticky, stirling_, rng_);
                    int mh = split_dish_tables(m, global, sticky, rng_);
                    tc.entries.push_back({rid, k, customers, m, mh});
                    tc.mhat_by_dish[k] += mh;
                    tc.total_tables += m;
                    tc.total_mhat += mh;
                    rest.tables += m;
                    if (t > 0) {
                        tc.sticky_route += m - mh;
                        tc.global_route += mh;
                    }
                }
                if (t > 0) base_total += kt * 2.0 * (n_ - 1);
                rest.base_scale = base_total / theta;
                tc.restaurants.push_back(rest);
            }
    }

    void sample_tables_mti(TableCounts& tc, double theta) {
        for (int i = 0; i < n_; ++i)
            for (int p = -1; p < counts_.communities(); ++p) {
                if (trans_.total(i, p) == 0) continue;
                int rid = static_cast<int>(tc.restaurants.size());
                TableCounts::Restaurant rest;
                rest.customers = trans_.total(i, p);
                for (int k = 0; k < counts_.communities(); ++k) {
                    int customers = trans_.count(i, p, k);
                    if (customers == 0) continue;
                    double sticky = (p >= 0 && k == p) ? w_.kappa : 0.0;
                    double global = w_.alpha * w_.beta[k];
                    int m = sample_dish_tables(customers, global + sticky, stirling_, rng_);
                    int mh = split_dish_tables(m, global, sticky, rng_);
                    tc.entries.push_back({rid, k, customers, m, mh});
                    tc.mhat_by_dish[k] += mh;
                    tc.total_tables += m;
                    tc.total_mhat += mh;
                    rest.tables += m;
                    if (p >= 0) {
                        tc.sticky_route += m - mh;
                        tc.global_route += mh;
                    }
                }
                rest.base_scale = (w_.alpha + (p >= 0 ? w_.kappa : 0.0)) / theta;
                tc.restaurants.push_back(rest);
            }
    }

    RelationTensor data_;
    ChainConfig cfg_;
    GlobalWeights w_;
    Rng rng_;
    int n_ = 0;
    int steps_ = 0;
    long long sweep_index_ = 0;
    long long gamma_grid_fallbacks_ = 0;

    LabelState labels_;
    CountCache counts_;
    MtiTransitions trans_;
    StirlingTable stirling_;

    // slice state (rebuilt every sweep)
    std::vector<std::vector<double>> pi_;
    std::vector<double> pi_rem_;
    std::vector<double> us_, ur_;

    // scratch
    mutable std::vector<double> ws_, wr_, grid_, logw_;
    mutable std::vector<int> cand_s_, cand_r_;
};

}  // namespace dim3
