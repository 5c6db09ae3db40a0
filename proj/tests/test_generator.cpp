#include <catch2/catch_amalgamated.hpp>

#include "dim3/generator.hpp"
#include "test_util.hpp"

using namespace dim3;

TEST_CASE("case matrices carry the published values") {
    auto c1 = case_matrix(1);
    REQUIRE(c1.at(0, 0) == 0.95);
    REQUIRE(c1.at(0, 1) == 0.05);
    REQUIRE(c1.at(0, 2) == 0.0);
    REQUIRE(c1.at(1, 1) == 0.95);
    REQUIRE(c1.at(2, 0) == 0.05);
    REQUIRE(c1.at(2, 2) == 0.95);

    auto c2 = case_matrix(2);
    REQUIRE(c2.at(0, 0) == 0.95);
    REQUIRE(c2.at(0, 1) == 0.2);
    REQUIRE(c2.at(0, 2) == 0.0);

    auto c3 = case_matrix(3);
    REQUIRE(c3.at(0, 0) == 0.05);
    REQUIRE(c3.at(0, 1) == 0.95);
    REQUIRE(c3.at(1, 2) == 0.95);
    REQUIRE(c3.at(2, 0) == 0.95);
    REQUIRE(c3.at(2, 2) == 0.05);

    REQUIRE_THROWS_AS(case_matrix(0), ConfigError);
    REQUIRE_THROWS_AS(case_matrix(5), ConfigError);
}

TEST_CASE("synthetic truth partitions nodes into the four stated rows") {
    auto g = synthetic_truth(1, 20);
    g.validate();
    REQUIRE(g.membership.size() == 20);
    REQUIRE(g.membership[0] == std::vector<double>{0.8, 0.2, 0.0});
    REQUIRE(g.membership[5] == std::vector<double>{0.0, 0.8, 0.2});
    REQUIRE(g.membership[10] == std::vector<double>{0.1, 0.05, 0.85});
    REQUIRE(g.membership[15] == std::vector<double>{0.4, 0.4, 0.2});
}

TEST_CASE("deterministic edges when K=1 and W=1") {
    GroundTruth g;
    g.membership.assign(4, {1.0});
    g.compat = CompatibilityMatrix(1);
    g.compat.at(0, 0) = 1.0;
    auto bundle = generate_fixed(g, 4, 2, 5);
    REQUIRE(bundle.data.edge_total() == 4 * 3 * 2);
}

TEST_CASE("generators are deterministic under a fixed seed") {
    auto a = generate_fixed(synthetic_truth(1, 20), 20, 3, 7);
    auto b = generate_fixed(synthetic_truth(1, 20), 20, 3, 7);
    REQUIRE(a.data == b.data);
    GlobalWeights w;
    auto pa = generate_mtv(6, 3, w, 11);
    auto pb = generate_mtv(6, 3, w, 11);
    REQUIRE(pa.bundle.data == pb.bundle.data);
    REQUIRE(pa.labels.send == pb.labels.send);
    auto ma = generate_mti(6, 3, w, 13);
    auto mb = generate_mti(6, 3, w, 13);
    REQUIRE(ma.bundle.data == mb.bundle.data);
}

TEST_CASE("empirical sender-label frequencies match the membership rows") {
    // chi-square goodness of fit per node over (n-1)*T sender draws
    auto truth = synthetic_truth(1, 8);
    const int n = 8, T = 2000;  // 14k draws per node
    Rng rng(55, 0);
    std::vector<std::vector<int>> counts(n, std::vector<int>(3, 0));
    auto draw_row = [&](const std::vector<double>& row) {
        double u = rng.uniform(), acc = 0.0;
        for (int c = 0; c < 3; ++c) {
            acc += row[c];
            if (u < acc) return c;
        }
        return 2;
    };
    // regenerate with the same scheme as generate_fixed, tracking labels
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                ++counts[i][draw_row(truth.membership[i])];
                (void)draw_row(truth.membership[j]);
            }
    for (int i = 0; i < n; ++i) {
        double total = (n - 1) * T;
        double chi2 = 0.0;
        int dof = 0;
        for (int c = 0; c < 3; ++c) {
            double expect = truth.membership[i][c] * total;
            if (expect < 1.0) continue;
            chi2 += (counts[i][c] - expect) * (counts[i][c] - expect) / expect;
            ++dof;
        }
        REQUIRE(chi2 < 25.0);  // dof <= 3, p ~ 1e-5 guard against flakes
    }
}

TEST_CASE("case-1 edge density matches the analytic expectation") {
    auto truth = synthetic_truth(1, 20);
    const int n = 20, T = 60;
    auto bundle = generate_fixed(truth, n, T, 17);
    double expect = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double p = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    p += truth.membership[i][a] * truth.membership[j][b] * truth.compat.at(a, b);
            expect += p * T;
            var += p * (1.0 - p) * T;
        }
    double got = bundle.data.edge_total();
    REQUIRE(std::fabs(got - expect) < 3.0 * std::sqrt(var));
}

TEST_CASE("tiny gamma collapses the prior draw to one community") {
    GlobalWeights w;
    w.gamma = 1e-9;
    w.alpha = 2.0;
    w.kappa = 1.0;
    auto draw = generate_mtv(6, 3, w, 23);
    REQUIRE(draw.labels.communities == 1);
}

TEST_CASE("large alpha makes label frequencies track beta") {
    GlobalWeights w;
    w.gamma = 1.0;
    w.alpha = 500.0;
    w.kappa = 0.0;
    auto draw = generate_mtv(10, 1, w, 29);
    const auto& beta = draw.weights.beta;
    int k = draw.labels.communities;
    std::vector<double> freq(k, 0.0);
    double total = 0.0;
    for (int v : draw.labels.send)
        if (v >= 0) {
            ++freq[v];
            ++total;
        }
    for (int v : draw.labels.recv)
        if (v >= 0) {
            ++freq[v];
            ++total;
        }
    double chi2 = 0.0;
    for (int c = 0; c < k; ++c) {
        double expect = beta[c] / (1.0 - draw.weights.beta_rem) * total;
        if (expect < 5.0) continue;
        chi2 += (freq[c] - expect) * (freq[c] - expect) / expect;
    }
    REQUIRE(chi2 < 40.0);
}

TEST_CASE("dominant kappa makes MTI label chains persistent") {
    GlobalWeights w;
    w.gamma = 1.0;
    w.alpha = 0.1;
    w.kappa = 30.0;
    auto draw = generate_mti(8, 6, w, 31);
    int same = 0, total = 0;
    for (int t = 1; t < 6; ++t)
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                if (i == j) continue;
                ++total;
                same += draw.labels.s(t, i, j) == draw.labels.s(t - 1, i, j);
            }
    REQUIRE(same > 0.9 * total);
}

TEST_CASE("MTI at T=1 is distributionally the same as MTV with kappa=0") {
    GlobalWeights w;
    w.gamma = 1.5;
    w.alpha = 1.0;
    w.kappa = 5.0;  // must be irrelevant at T=1
    GlobalWeights w0 = w;
    w0.kappa = 0.0;
    std::vector<double> stat_mti, stat_mtv;
    for (int rep = 0; rep < 300; ++rep) {
        auto a = generate_mti(4, 1, w, 1000 + rep);
        auto b = generate_mtv(4, 1, w0, 5000 + rep);
        auto frac_largest = [](const LabelState& lab) {
            std::vector<int> counts(lab.communities, 0);
            int total = 0;
            for (int v : lab.send)
                if (v >= 0) {
                    ++counts[v];
                    ++total;
                }
            for (int v : lab.recv)
                if (v >= 0) {
                    ++counts[v];
                    ++total;
                }
            return *std::max_element(counts.begin(), counts.end()) /
                   static_cast<double>(total);
        };
        stat_mti.push_back(frac_largest(a.labels));
        stat_mtv.push_back(frac_largest(b.labels));
    }
    double ks = test_util::ks_two_sample(stat_mti, stat_mtv);
    REQUIRE(ks < 0.12);  // 1% critical value for 300 vs 300 is ~0.133
}

TEST_CASE("kappa=0 prior draws have no time coupling") {
    GlobalWeights w;
    w.gamma = 1.0;
    w.alpha = 2.0;
    w.kappa = 0.0;
    auto draw = generate_mtv(6, 4, w, 37);
    REQUIRE(draw.labels.steps == 4);
    // nothing to assert distributionally in one draw; the sampler oracle
    // tests cover the coupling; here we check reproducibility and shape
    REQUIRE(draw.bundle.data.steps() == 4);
}

TEST_CASE("sampson-like fixture has exactly three picks per row per time") {
    auto bundle = sampson_like_fixture(3);
    REQUIRE(bundle.data.nodes() == 18);
    REQUIRE(bundle.data.steps() == 3);
    for (int t = 0; t < 3; ++t)
        for (int i = 0; i < 18; ++i) {
            int row = 0;
            for (int j = 0; j < 18; ++j)
                if (i != j) row += bundle.data.at(t, i, j);
            REQUIRE(row == 3);
        }
}
