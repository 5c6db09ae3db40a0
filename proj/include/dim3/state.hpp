#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dim3/common.hpp"

namespace dim3 {

// Observed binary directed network E = {e_ij^t}. Self-pairs are excluded:
// the diagonal is never stored as data and never counted.
class RelationTensor {
public:
    RelationTensor() = default;

    RelationTensor(int nodes, int steps, std::string name = "")
        : nodes_(nodes), steps_(steps), name_(std::move(name)),
          bits_(static_cast<size_t>(nodes) * nodes * std::max(steps, 0), 0) {
        if (nodes < 2 && !(nodes >= 1 && steps == 0))
            throw DataError("RelationTensor: need at least 2 nodes");
        if (steps < 0) throw DataError("RelationTensor: negative time count");
    }

    int nodes() const { return nodes_; }
    int steps() const { return steps_; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    uint8_t at(int t, int i, int j) const { return bits_[idx(t, i, j)]; }

    void set(int t, int i, int j, int v) {
        if (i == j) throw DataError("RelationTensor: self-pair write");
        if (v != 0 && v != 1) throw DataError("RelationTensor: value must be 0 or 1");
        bits_[idx(t, i, j)] = static_cast<uint8_t>(v);
    }

    int pair_count() const { return nodes_ * (nodes_ - 1) * steps_; }

    int edge_total() const {
        int s = 0;
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < nodes_; ++i)
                for (int j = 0; j < nodes_; ++j)
                    if (i != j) s += at(t, i, j);
        return s;
    }

    bool operator==(const RelationTensor& o) const {
        return nodes_ == o.nodes_ && steps_ == o.steps_ && bits_ == o.bits_;
    }

    size_t idx(int t, int i, int j) const {
        return (static_cast<size_t>(t) * nodes_ + i) * nodes_ + j;
    }

private:
    int nodes_ = 0;
    int steps_ = 0;
    std::string name_;
    std::vector<uint8_t> bits_;
};

// All membership indicators: sender label s_ij^t and receiver label r_ij^t
// per ordered pair per time. Community indices are 0-based; `communities`
// is the number of instantiated atoms (occupied or not mid-sweep).
struct LabelState {
    int nodes = 0;
    int steps = 0;
    int communities = 0;
    std::vector<int> send;  // (t,i,j) -> community of sender i; -1 on diagonal
    std::vector<int> recv;  // (t,i,j) -> community of receiver j

    LabelState() = default;
    LabelState(int n, int T, int K)
        : nodes(n), steps(T), communities(K),
          send(static_cast<size_t>(n) * n * std::max(T, 0), -1),
          recv(static_cast<size_t>(n) * n * std::max(T, 0), -1) {}

    size_t idx(int t, int i, int j) const {
        return (static_cast<size_t>(t) * nodes + i) * nodes + j;
    }

    int s(int t, int i, int j) const { return send[idx(t, i, j)]; }
    int r(int t, int i, int j) const { return recv[idx(t, i, j)]; }

    void set(int t, int i, int j, int sl, int rl) {
        send[idx(t, i, j)] = sl;
        recv[idx(t, i, j)] = rl;
    }

    // A compact integer code of the full configuration (small instances only).
    uint64_t config_code() const {
        uint64_t code = 0;
        uint64_t base = static_cast<uint64_t>(communities);
        for (int t = 0; t < steps; ++t)
            for (int i = 0; i < nodes; ++i)
                for (int j = 0; j < nodes; ++j) {
                    if (i == j) continue;
                    code = code * base + static_cast<uint64_t>(s(t, i, j));
                    code = code * base + static_cast<uint64_t>(r(t, i, j));
                }
        return code;
    }
};

// Sufficient statistics kept incrementally in lockstep with LabelState:
//   part[t][i][k]  = N_ik^t   (node participation, senders + receivers)
//   link1/link0    = n_kl^{.,1} / n_kl^{.,0} aggregated over time (W is
//                    shared across times, so the collapsed likelihood only
//                    ever needs the aggregate)
//   link1_t/link0_t = the per-time versions
//   occupancy[k]   = total labels currently assigned to community k
class CountCache {
public:
    CountCache() = default;

    CountCache(int nodes, int steps, int communities)
        : nodes_(nodes), steps_(steps), k_(communities) {
        part_.assign(static_cast<size_t>(steps) * nodes, std::vector<int>(k_, 0));
        link1_.assign(k_, std::vector<int>(k_, 0));
        link0_.assign(k_, std::vector<int>(k_, 0));
        link1_t_.assign(steps, link1_);
        link0_t_.assign(steps, link0_);
        occupancy_.assign(k_, 0);
    }

    int nodes() const { return nodes_; }
    int steps() const { return steps_; }
    int communities() const { return k_; }

    int part(int t, int i, int k) const { return part_[row(t, i)][k]; }
    int link1(int k, int l) const { return link1_[k][l]; }
    int link0(int k, int l) const { return link0_[k][l]; }
    int link1_at(int t, int k, int l) const { return link1_t_[t][k][l]; }
    int link0_at(int t, int k, int l) const { return link0_t_[t][k][l]; }
    long long occupancy(int k) const { return occupancy_[k]; }
    const std::vector<int>& part_row(int t, int i) const { return part_[row(t, i)]; }

    int active_communities() const {
        int c = 0;
        for (long long o : occupancy_)
            if (o > 0) ++c;
        return c;
    }

    void add_community() {
        ++k_;
        for (auto& r : part_) r.push_back(0);
        for (auto& r : link1_) r.push_back(0);
        for (auto& r : link0_) r.push_back(0);
        link1_.emplace_back(k_, 0);
        link0_.emplace_back(k_, 0);
        for (int t = 0; t < steps_; ++t) {
            for (auto& r : link1_t_[t]) r.push_back(0);
            for (auto& r : link0_t_[t]) r.push_back(0);
            link1_t_[t].emplace_back(k_, 0);
            link0_t_[t].emplace_back(k_, 0);
        }
        occupancy_.push_back(0);
    }

    void add_pair(int t, int i, int j, int s, int r, int e) {
        ++part_[row(t, i)][s];
        ++part_[row(t, j)][r];
        if (e) {
            ++link1_[s][r];
            ++link1_t_[t][s][r];
        } else {
            ++link0_[s][r];
            ++link0_t_[t][s][r];
        }
        ++occupancy_[s];
        ++occupancy_[r];
    }

    void remove_pair(int t, int i, int j, int s, int r, int e) {
        --part_[row(t, i)][s];
        --part_[row(t, j)][r];
        if (e) {
            --link1_[s][r];
            --link1_t_[t][s][r];
        } else {
            --link0_[s][r];
            --link0_t_[t][s][r];
        }
        --occupancy_[s];
        --occupancy_[r];
    }

    bool operator==(const CountCache& o) const {
        return nodes_ == o.nodes_ && steps_ == o.steps_ && k_ == o.k_ &&
               part_ == o.part_ && link1_ == o.link1_ && link0_ == o.link0_ &&
               link1_t_ == o.link1_t_ && link0_t_ == o.link0_t_ && occupancy_ == o.occupancy_;
    }

private:
    size_t row(int t, int i) const { return static_cast<size_t>(t) * nodes_ + i; }

    int nodes_ = 0, steps_ = 0, k_ = 0;
    std::vector<std::vector<int>> part_;
    std::vector<std::vector<int>> link1_, link0_;
    std::vector<std::vector<std::vector<int>>> link1_t_, link0_t_;
    std::vector<long long> occupancy_;
};

inline CountCache rebuild_counts(const LabelState& labels, const RelationTensor& data) {
    if (labels.nodes != data.nodes() || labels.steps != data.steps())
        throw DataError("rebuild_counts: label/data dimension mismatch");
    CountCache c(labels.nodes, labels.steps, labels.communities);
    for (int t = 0; t < labels.steps; ++t)
        for (int i = 0; i < labels.nodes; ++i)
            for (int j = 0; j < labels.nodes; ++j) {
                if (i == j) continue;
                int s = labels.s(t, i, j), r = labels.r(t, i, j);
                if (s < 0 || s >= labels.communities || r < 0 || r >= labels.communities)
                    throw DataError("rebuild_counts: label out of range");
                c.add_pair(t, i, j, s, r, data.at(t, i, j));
            }
    return c;
}

// Per-node mixed-membership transition counts for the MTI model:
// trans[i][p+1][k] = number of label slots of node i whose previous label
// was p and current label is k. p = -1 is the t=1 sentinel restaurant.
class MtiTransitions {
public:
    MtiTransitions() = default;
    MtiTransitions(int nodes, int communities) : nodes_(nodes), k_(communities) {
        trans_.assign(nodes, std::vector<std::vector<int>>(k_ + 1, std::vector<int>(k_, 0)));
        total_.assign(nodes, std::vector<int>(k_ + 1, 0));
    }

    int communities() const { return k_; }
    int count(int node, int prev, int k) const { return trans_[node][prev + 1][k]; }
    int total(int node, int prev) const { return total_[node][prev + 1]; }

    void add(int node, int prev, int k) {
        ++trans_[node][prev + 1][k];
        ++total_[node][prev + 1];
    }
    void remove(int node, int prev, int k) {
        --trans_[node][prev + 1][k];
        --total_[node][prev + 1];
    }

    void add_community() {
        ++k_;
        for (auto& n : trans_) {
            for (auto& rest : n) rest.push_back(0);
            n.emplace_back(k_, 0);
        }
        for (auto& n : total_) n.push_back(0);
    }

    bool operator==(const MtiTransitions& o) const {
        return nodes_ == o.nodes_ && k_ == o.k_ && trans_ == o.trans_ && total_ == o.total_;
    }

private:
    int nodes_ = 0, k_ = 0;
    std::vector<std::vector<std::vector<int>>> trans_;  // [node][prev+1][k]
    std::vector<std::vector<int>> total_;               // [node][prev+1]
};

// Rebuild the MTI transition table from scratch. The sender chain of slot
// (i,j) lives in node i's family, the receiver chain in node j's.
inline MtiTransitions rebuild_transitions(const LabelState& labels) {
    MtiTransitions m(labels.nodes, labels.communities);
    for (int t = 0; t < labels.steps; ++t)
        for (int i = 0; i < labels.nodes; ++i)
            for (int j = 0; j < labels.nodes; ++j) {
                if (i == j) continue;
                int sp = t > 0 ? labels.s(t - 1, i, j) : -1;
                int rp = t > 0 ? labels.r(t - 1, i, j) : -1;
                m.add(i, sp, labels.s(t, i, j));
                m.add(j, rp, labels.r(t, i, j));
            }
    return m;
}

// Global stick weights plus the model hyperparameters.
struct GlobalWeights {
    std::vector<double> beta;  // discovered atoms
    double beta_rem = 1.0;     // mass of the undiscovered part
    double gamma = 1.0;
    double alpha = 1.0;
    double kappa = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;

    double beta_total() const {
        return std::accumulate(beta.begin(), beta.end(), 0.0) + beta_rem;
    }

    void validate() const {
        if (std::abs(beta_total() - 1.0) > 1e-10)
            throw NumericError("GlobalWeights: beta does not sum to 1");
        for (double b : beta)
            if (!(b > 0.0)) throw NumericError("GlobalWeights: nonpositive beta component");
        if (!(gamma > 0.0) || alpha < 0.0 || kappa < 0.0 || !(lambda1 > 0.0) || !(lambda2 > 0.0))
            throw NumericError("GlobalWeights: invalid hyperparameter");
    }
};

// Role-compatibility matrix, materialized for reporting only.
struct CompatibilityMatrix {
    int k = 0;
    std::vector<double> w;  // row-major k*k

    CompatibilityMatrix() = default;
    explicit CompatibilityMatrix(int kk) : k(kk), w(static_cast<size_t>(kk) * kk, 0.0) {}
    double& at(int a, int b) { return w[static_cast<size_t>(a) * k + b]; }
    double at(int a, int b) const { return w[static_cast<size_t>(a) * k + b]; }
};

}  // namespace dim3
