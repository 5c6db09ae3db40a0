#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dim3/special.hpp"
#include "dim3/state.hpp"

namespace dim3 {

// Brute-force posterior of a truncated model (fixed beta, fixed
// hyperparameters, k_max communities, no undiscovered mass) over every
// label configuration. Tiny instances only; this is the oracle the
// samplers are checked against.
//
// Configuration codes are base-k_max digit strings in (t,i,j) lexicographic
// order, sender digit before receiver digit — the same encoding as
// LabelState::config_code().
class ExactPosterior {
public:
    static constexpr uint64_t kMaxConfigs = 33'554'432;  // 2 * the n=3,T=2,K=2 case

    ExactPosterior(const RelationTensor& data, int k_max, const GlobalWeights& w,
                   ModelKind kind)
        : n_(data.nodes()), steps_(data.steps()), k_(k_max), kind_(kind), w_(w), data_(&data) {
        if (k_max < 1) throw ConfigError("ExactPosterior: k_max must be >= 1");
        if (kind == ModelKind::MtvGibbs || kind == ModelKind::MtvSlice) {
            if (static_cast<int>(w.beta.size()) < k_max)
                throw ConfigError("ExactPosterior: beta shorter than k_max");
        }
        digits_ = 2 * n_ * (n_ - 1) * steps_;
        double cf = std::pow(static_cast<double>(k_max), static_cast<double>(digits_));
        if (cf > static_cast<double>(kMaxConfigs))
            throw DataError("ExactPosterior: instance too large to enumerate");
        configs_ = 1;
        for (int d = 0; d < digits_; ++d) configs_ *= static_cast<uint64_t>(k_max);
        build_tables();
        run();
    }

    uint64_t configs() const { return configs_; }
    double log_marginal() const { return log_z_; }
    double log_joint(uint64_t code) const { return logp_[code]; }
    double prob(uint64_t code) const { return std::exp(static_cast<double>(logp_[code]) - log_z_); }

    // Monte Carlo noise scale for an M-sample empirical TV estimate.
    double sum_sqrt_prob() const {
        double s = 0.0;
        for (uint64_t c = 0; c < configs_; ++c)
            s += std::sqrt(std::exp(static_cast<double>(logp_[c]) - log_z_));
        return s;
    }

    // Total variation between the exact posterior and an empirical sample
    // given as config-code counts.
    double tv_from_sample(const std::unordered_map<uint64_t, uint64_t>& counts,
                          uint64_t total) const {
        double tv = 0.0, visited_mass = 0.0;
        for (const auto& [code, cnt] : counts) {
            double p = prob(code);
            double q = static_cast<double>(cnt) / static_cast<double>(total);
            tv += std::fabs(p - q);
            visited_mass += p;
        }
        tv += 1.0 - visited_mass;  // exact mass on never-visited configs
        return 0.5 * tv;
    }

private:
    bool mti() const { return kind_ == ModelKind::MtiGibbs || kind_ == ModelKind::FiniteMti; }

    double base_mass(int k) const {
        if (kind_ == ModelKind::FiniteMtv || kind_ == ModelKind::FiniteMti)
            return w_.alpha / k_;
        return w_.alpha * w_.beta[k];
    }

    void build_tables() {
        int per_time = 2 * (n_ - 1);
        int max_c = mti() ? per_time * steps_ : per_time;
        double kt = w_.kappa / (2.0 * n_);

        if (!mti()) {
            // lr_[k][nprev][ncur] = log rising(base_k + kt*nprev, ncur)
            lr_.assign(k_, std::vector<std::vector<double>>(
                               per_time + 1, std::vector<double>(per_time + 1, 0.0)));
            for (int k = 0; k < k_; ++k)
                for (int np = 0; np <= per_time; ++np)
                    for (int nc = 0; nc <= per_time; ++nc)
                        lr_[k][np][nc] = log_rising(base_mass(k) + kt * np, nc);
            // Restaurant normalizers are configuration-independent for MTV.
            double c1 = w_.alpha;
            double ct = w_.alpha + kt * per_time;
            log_denom_const_ = n_ * log_rising(c1, per_time);
            if (steps_ > 1) log_denom_const_ += n_ * (steps_ - 1) * log_rising(ct, per_time);
        } else {
            lr_global_.assign(k_, std::vector<double>(max_c + 1, 0.0));
            lr_sticky_.assign(k_, std::vector<double>(max_c + 1, 0.0));
            for (int k = 0; k < k_; ++k)
                for (int c = 0; c <= max_c; ++c) {
                    lr_global_[k][c] = log_rising(base_mass(k), c);
                    lr_sticky_[k][c] = log_rising(base_mass(k) + w_.kappa, c);
                }
            lr_denom0_.assign(max_c + 1, 0.0);
            lr_denom1_.assign(max_c + 1, 0.0);
            for (int c = 0; c <= max_c; ++c) {
                lr_denom0_[c] = log_rising(w_.alpha, c);
                lr_denom1_[c] = log_rising(w_.alpha + w_.kappa, c);
            }
        }

        int max_cell = n_ * (n_ - 1) * steps_;
        double lb0 = log_beta(w_.lambda1, w_.lambda2);
        lb_.assign(max_cell + 1, std::vector<double>(max_cell + 1, 0.0));
        for (int a = 0; a <= max_cell; ++a)
            for (int b = 0; a + b <= max_cell; ++b)
                lb_[a][b] = log_beta(a + w_.lambda1, b + w_.lambda2) - lb0;
    }

    void run() {
        logp_.assign(configs_, 0.0f);
        labels_ = LabelState(n_, steps_, k_);
        counts_ = CountCache(n_, steps_, k_);
        if (mti()) trans_ = MtiTransitions(n_, k_);
        slots_.clear();
        for (int t = 0; t < steps_; ++t)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    if (i != j) slots_.emplace_back(t, i, j);
        log_z_ = -HUGE_VAL;
        z_acc_ = 0.0;
        recurse(0, 0);
        log_z_ = log_z_ + std::log(z_acc_);
    }

    void recurse(size_t slot, uint64_t code) {
        if (slot == slots_.size()) {
            double lp = evaluate();
            logp_[code] = static_cast<float>(lp);
            // streaming logsumexp with a running max
            if (lp > log_z_) {
                z_acc_ = z_acc_ * std::exp(log_z_ - lp) + 1.0;
                log_z_ = lp;
            } else {
                z_acc_ += std::exp(lp - log_z_);
            }
            return;
        }
        auto [t, i, j] = slots_[slot];
        int e = data_->at(t, i, j);
        for (int s = 0; s < k_; ++s)
            for (int r = 0; r < k_; ++r) {
                labels_.set(t, i, j, s, r);
                counts_.add_pair(t, i, j, s, r, e);
                if (mti()) add_trans(t, i, j, s, r);
                recurse(slot + 1, (code * k_ + s) * k_ + r);
                if (mti()) remove_trans(t, i, j, s, r);
                counts_.remove_pair(t, i, j, s, r, e);
            }
    }

    void add_trans(int t, int i, int j, int s, int r) {
        trans_.add(i, t > 0 ? labels_.s(t - 1, i, j) : -1, s);
        trans_.add(j, t > 0 ? labels_.r(t - 1, i, j) : -1, r);
    }
    void remove_trans(int t, int i, int j, int s, int r) {
        trans_.remove(i, t > 0 ? labels_.s(t - 1, i, j) : -1, s);
        trans_.remove(j, t > 0 ? labels_.r(t - 1, i, j) : -1, r);
    }

    double evaluate() const {
        double lp = 0.0;
        if (!mti()) {
            for (int t = 0; t < steps_; ++t)
                for (int i = 0; i < n_; ++i)
                    for (int k = 0; k < k_; ++k) {
                        int nc = counts_.part(t, i, k);
                        if (nc == 0) continue;
                        int np = t > 0 ? counts_.part(t - 1, i, k) : 0;
                        lp += lr_[k][np][nc];
                    }
            lp -= log_denom_const_;
        } else {
            for (int i = 0; i < n_; ++i)
                for (int p = -1; p < k_; ++p) {
                    int tot = trans_.total(i, p);
                    if (tot == 0) continue;
                    for (int k = 0; k < k_; ++k) {
                        int c = trans_.count(i, p, k);
                        if (c == 0) continue;
                        lp += (p == k) ? lr_sticky_[k][c] : lr_global_[k][c];
                    }
                    lp -= (p >= 0) ? lr_denom1_[tot] : lr_denom0_[tot];
                }
        }
        for (int k = 0; k < k_; ++k)
            for (int l = 0; l < k_; ++l) {
                int n1 = counts_.link1(k, l), n0 = counts_.link0(k, l);
                if (n1 + n0 > 0) lp += lb_[n1][n0];
            }
        return lp;
    }

    int n_, steps_, k_;
    ModelKind kind_;
    GlobalWeights w_;
    const RelationTensor* data_;
    int digits_ = 0;
    uint64_t configs_ = 0;

    std::vector<std::vector<std::vector<double>>> lr_;
    std::vector<std::vector<double>> lr_global_, lr_sticky_;
    std::vector<double> lr_denom0_, lr_denom1_;
    std::vector<std::vector<double>> lb_;
    double log_denom_const_ = 0.0;

    std::vector<float> logp_;
    double log_z_ = -HUGE_VAL;
    double z_acc_ = 0.0;
    LabelState labels_;
    CountCache counts_;
    MtiTransitions trans_;
    std::vector<std::tuple<int, int, int>> slots_;
};

}  // namespace dim3
