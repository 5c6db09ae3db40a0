#include <catch2/catch_amalgamated.hpp>

#include "dim3/rng.hpp"
#include "dim3/state.hpp"
#include "test_util.hpp"

using namespace dim3;

namespace {

// Independent naive recount used as the oracle for rebuild_counts.
struct NaiveCounts {
    std::vector<std::vector<std::vector<int>>> part;   // [t][i][k]
    std::vector<std::vector<std::vector<int>>> cell1;  // [k][l] aggregated
    std::vector<std::vector<std::vector<int>>> unused;
    std::vector<std::vector<int>> link1, link0;
};

NaiveCounts naive_recount(const LabelState& lab, const RelationTensor& data) {
    NaiveCounts nc;
    int n = lab.nodes, T = lab.steps, K = lab.communities;
    nc.part.assign(T, std::vector<std::vector<int>>(n, std::vector<int>(K, 0)));
    nc.link1.assign(K, std::vector<int>(K, 0));
    nc.link0.assign(K, std::vector<int>(K, 0));
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                int s = lab.s(t, i, j), r = lab.r(t, i, j);
                nc.part[t][i][s] += 1;
                nc.part[t][j][r] += 1;
                if (data.at(t, i, j))
                    nc.link1[s][r] += 1;
                else
                    nc.link0[s][r] += 1;
            }
    return nc;
}

LabelState random_labels(int n, int T, int K, Rng& rng) {
    LabelState lab(n, T, K);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                lab.set(t, i, j, static_cast<int>(rng.uniform() * K) % K,
                        static_cast<int>(rng.uniform() * K) % K);
            }
    return lab;
}

}  // namespace

TEST_CASE("rebuild_counts single community example") {
    RelationTensor data(2, 1);
    data.set(0, 0, 1, 1);
    data.set(0, 1, 0, 1);
    LabelState lab(2, 1, 1);
    lab.set(0, 0, 1, 0, 0);
    lab.set(0, 1, 0, 0, 0);
    auto c = rebuild_counts(lab, data);
    REQUIRE(c.part(0, 0, 0) == 2);
    REQUIRE(c.part(0, 1, 0) == 2);
    REQUIRE(c.link1(0, 0) + c.link0(0, 0) == 2);
}

TEST_CASE("rebuild_counts direct count example") {
    RelationTensor data(2, 1);
    data.set(0, 0, 1, 1);  // e_12 = 1
    data.set(0, 1, 0, 0);  // e_21 = 0
    LabelState lab(2, 1, 2);
    lab.set(0, 0, 1, 0, 1);  // s_12 = 1, r_12 = 2 in 1-based terms
    lab.set(0, 1, 0, 1, 0);  // s_21 = 2, r_21 = 1
    auto c = rebuild_counts(lab, data);
    REQUIRE(c.link1(0, 1) == 1);
    REQUIRE(c.link0(1, 0) == 1);
    REQUIRE(c.link1(1, 0) == 0);
}

TEST_CASE("rebuild_counts matches naive oracle and invariants hold") {
    Rng rng(2024, 0);
    int n = 5, T = 3, K = 4;
    auto data = test_util::random_tensor(n, T, 0.4, rng);
    auto lab = random_labels(n, T, K, rng);
    auto c = rebuild_counts(lab, data);
    auto oracle = naive_recount(lab, data);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) {
            int row_sum = 0;
            for (int k = 0; k < K; ++k) {
                REQUIRE(c.part(t, i, k) == oracle.part[t][i][k]);
                row_sum += c.part(t, i, k);
            }
            REQUIRE(row_sum == 2 * (n - 1));
        }
    int cell_total = 0;
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < K; ++l) {
            REQUIRE(c.link1(k, l) == oracle.link1[k][l]);
            REQUIRE(c.link0(k, l) == oracle.link0[k][l]);
            cell_total += c.link1(k, l) + c.link0(k, l);
        }
    REQUIRE(cell_total == n * (n - 1) * T);
    for (int t = 0; t < T; ++t) {
        int per_t = 0;
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < K; ++l) per_t += c.link1_at(t, k, l) + c.link0_at(t, k, l);
        REQUIRE(per_t == n * (n - 1));
    }
}

TEST_CASE("incremental updates equal rebuild after random edit sequences") {
    Rng rng(77, 0);
    int n = 4, T = 2, K = 3;
    auto data = test_util::random_tensor(n, T, 0.5, rng);
    auto lab = random_labels(n, T, K, rng);
    auto c = rebuild_counts(lab, data);
    for (int step = 0; step < 500; ++step) {
        int t = static_cast<int>(rng.uniform() * T);
        int i = static_cast<int>(rng.uniform() * n);
        int j = static_cast<int>(rng.uniform() * n);
        if (i == j) continue;
        int s2 = static_cast<int>(rng.uniform() * K) % K;
        int r2 = static_cast<int>(rng.uniform() * K) % K;
        c.remove_pair(t, i, j, lab.s(t, i, j), lab.r(t, i, j), data.at(t, i, j));
        lab.set(t, i, j, s2, r2);
        c.add_pair(t, i, j, s2, r2, data.at(t, i, j));
    }
    REQUIRE(c == rebuild_counts(lab, data));
}

TEST_CASE("mti transitions rebuild and incremental agreement") {
    Rng rng(99, 0);
    int n = 4, T = 3, K = 3;
    auto data = test_util::random_tensor(n, T, 0.5, rng);
    auto lab = random_labels(n, T, K, rng);
    auto tr = rebuild_transitions(lab);
    // every node has 2(n-1) slots at t=1 in the sentinel restaurant
    for (int i = 0; i < n; ++i) {
        int tot = 0;
        for (int k = 0; k < K; ++k) tot += tr.count(i, -1, k);
        REQUIRE(tot == 2 * (n - 1));
    }
    // change one label and patch the two affected records by hand
    int t = 1, i = 0, j = 1;
    int old_s = lab.s(t, i, j);
    int new_s = (old_s + 1) % K;
    tr.remove(i, lab.s(t - 1, i, j), old_s);
    tr.remove(i, old_s, lab.s(t + 1, i, j));
    lab.set(t, i, j, new_s, lab.r(t, i, j));
    tr.add(i, lab.s(t - 1, i, j), new_s);
    tr.add(i, new_s, lab.s(t + 1, i, j));
    REQUIRE(tr == rebuild_transitions(lab));
}

TEST_CASE("dimension mismatch is rejected") {
    RelationTensor data(3, 2);
    LabelState lab(3, 1, 2);
    REQUIRE_THROWS_AS(rebuild_counts(lab, data), DataError);
}

TEST_CASE("global weights invariants") {
    GlobalWeights w;
    w.beta = {0.4, 0.3};
    w.beta_rem = 0.3;
    w.validate();
    w.beta_rem = 0.2;
    REQUIRE_THROWS_AS(w.validate(), NumericError);
}
