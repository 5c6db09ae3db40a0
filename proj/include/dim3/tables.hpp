#pragma once

#include <vector>

#include "dim3/rng.hpp"
#include "dim3/state.hpp"
#include "dim3/stirling.hpp"

namespace dim3 {

// CRF auxiliary table counts, refreshed once per sweep. `tables` is m_ik^t,
// `unsticky` the portion attributed to the alpha*beta route (m-hat). One
// entry per (restaurant, dish) with customers > 0.
struct TableCounts {
    struct Entry {
        int restaurant;
        int dish;
        int customers;
        int tables;
        int unsticky;
    };
    struct Restaurant {
        int customers = 0;
        int tables = 0;
        double base_scale = 1.0;  // restaurant base mass divided by alpha+kappa
    };

    std::vector<Entry> entries;
    std::vector<Restaurant> restaurants;
    std::vector<double> mhat_by_dish;
    long long total_tables = 0;
    long long total_mhat = 0;
    // Route tallies over sticky-capable restaurants only (t>1 for MTV,
    // dish-indexed families for MTI); these drive the ratio update.
    long long sticky_route = 0;
    long long global_route = 0;

    int dishes_with_mhat() const {
        int c = 0;
        for (double v : mhat_by_dish)
            if (v > 0) ++c;
        return c;
    }
};

// m ~ P(m | N, u) ∝ S(N,m) u^m for m = 1..N, the table count of one dish
// with N customers and urn mass u.
inline int sample_dish_tables(int customers, double mass, StirlingTable& stirling, Rng& rng) {
    if (customers <= 0) return 0;
    if (customers == 1) return 1;
    auto srow = stirling.row(customers);
    double logu = std::log(mass);
    std::vector<double> logw(customers);
    for (int m = 1; m <= customers; ++m) logw[m - 1] = srow[m - 1] + m * logu;
    return 1 + static_cast<int>(rng.categorical_log(logw));
}

// m-hat ~ Binomial(m, global/(global+sticky)): how many of the dish's
// tables chose it through the alpha*beta route.
inline int split_dish_tables(int tables, double global_mass, double sticky_mass, Rng& rng) {
    if (sticky_mass <= 0.0) return tables;
    if (global_mass <= 0.0) return 0;
    return rng.binomial(tables, global_mass / (global_mass + sticky_mass));
}

// (beta_1..beta_K, beta_rem) ~ Dir(mhat_1, .., mhat_K, gamma). Dishes that
// are alive but have no global-route tables carry no beta likelihood, so
// their weight is a fresh stick of the remainder.
inline void resample_beta(const std::vector<double>& mhat_by_dish, double gamma,
                          GlobalWeights& w, Rng& rng) {
    int k = static_cast<int>(mhat_by_dish.size());
    std::vector<double> draw(k + 1, 0.0);
    double total = 0.0;
    for (int d = 0; d < k; ++d) {
        if (mhat_by_dish[d] > 0.0) draw[d] = rng.gamma(mhat_by_dish[d]);
        total += draw[d];
    }
    draw[k] = rng.gamma(gamma);
    total += draw[k];
    if (!(total > 0.0)) throw NumericError("resample_beta: degenerate Dirichlet draw");

    w.beta.assign(k, 0.0);
    double rem = draw[k] / total;
    for (int d = 0; d < k; ++d) w.beta[d] = draw[d] / total;
    for (int d = 0; d < k; ++d) {
        if (mhat_by_dish[d] > 0.0) continue;
        double b = rng.beta(1.0, gamma);
        w.beta[d] = b * rem;
        rem *= 1.0 - b;
    }
    w.beta_rem = rem;
}

}  // namespace dim3
