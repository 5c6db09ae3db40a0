#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "dim3/analysis.hpp"
#include "dim3/rng.hpp"

using namespace dim3;

TEST_CASE("iat of white noise is one half") {
    Rng rng(61, 0);
    std::vector<double> x(100000);
    for (auto& v : x) v = rng.normal();
    double tau = iat(x);
    REQUIRE(tau > 0.4);
    REQUIRE(tau < 0.6);
}

TEST_CASE("iat of an AR(1) chain matches the closed form") {
    Rng rng(62, 0);
    const double rho = 0.9;
    std::vector<double> x(100000);
    x[0] = 0.0;
    for (size_t i = 1; i < x.size(); ++i)
        x[i] = rho * x[i - 1] + std::sqrt(1 - rho * rho) * rng.normal();
    double tau = iat(x);
    double expect = 0.5 + rho / (1.0 - rho);  // 9.5
    REQUIRE(std::fabs(tau - expect) / expect < 0.2);
}

TEST_CASE("iat rejects constant and short series") {
    std::vector<double> c(1000, 3.0);
    REQUIRE_THROWS_AS(iat(c), DataError);
    std::vector<double> s(5, 1.0);
    REQUIRE_THROWS_AS(iat(s), DataError);
}

TEST_CASE("iat is shift and scale invariant") {
    Rng rng(63, 0);
    std::vector<double> x(20000), y(20000);
    x[0] = 0.0;
    for (size_t i = 1; i < x.size(); ++i) x[i] = 0.5 * x[i - 1] + rng.normal();
    for (size_t i = 0; i < x.size(); ++i) y[i] = 7.0 * x[i] - 123.0;
    REQUIRE(iat(x) == Catch::Approx(iat(y)).epsilon(1e-9));
}

TEST_CASE("psrf near one for same-distribution chains, large for disjoint ones") {
    Rng rng(64, 0);
    std::vector<std::vector<double>> same(2, std::vector<double>(20000));
    for (auto& c : same)
        for (auto& v : c) v = rng.normal();
    auto r_same = psrf(same);
    REQUIRE(r_same.estimate <= 1.05);
    REQUIRE(r_same.upper >= r_same.estimate);

    std::vector<std::vector<double>> apart(2, std::vector<double>(2000));
    for (auto& v : apart[0]) v = rng.normal();
    for (auto& v : apart[1]) v = 10.0 + rng.normal();
    REQUIRE(psrf(apart).estimate > 1.2);

    std::vector<std::vector<double>> flat(2, std::vector<double>(100, 1.0));
    REQUIRE_THROWS_AS(psrf(flat), DataError);
}

TEST_CASE("psrf is scale invariant") {
    Rng rng(65, 0);
    std::vector<std::vector<double>> chains(3, std::vector<double>(5000));
    for (auto& c : chains)
        for (auto& v : c) v = rng.normal();
    auto base = psrf(chains);
    for (auto& c : chains)
        for (auto& v : c) v *= 42.0;
    REQUIRE(psrf(chains).estimate == Catch::Approx(base.estimate).epsilon(1e-9));
}

TEST_CASE("geweke z is small for stationary noise and large under trend") {
    Rng rng(66, 0);
    std::vector<double> x(20000);
    for (auto& v : x) v = rng.normal();
    REQUIRE(std::fabs(geweke_z(x)) < 3.0);

    std::vector<double> trend(20000);
    for (size_t i = 0; i < trend.size(); ++i)
        trend[i] = static_cast<double>(i) / trend.size() * 10.0 + rng.normal();
    REQUIRE(std::fabs(geweke_z(trend)) > 5.0);

    std::vector<double> tiny(50, 1.0);
    REQUIRE_THROWS_AS(geweke_z(tiny), DataError);
}

TEST_CASE("geweke z is shift and scale invariant") {
    Rng rng(67, 0);
    std::vector<double> x(10000), y(10000);
    for (size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = -3.0 * x[i] + 11.0;
    }
    REQUIRE(geweke_z(y) == Catch::Approx(-geweke_z(x)).epsilon(1e-9));
}

TEST_CASE("alignment identity, column swap, and exhaustive agreement") {
    Matrix truth = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.5, 0.5, 0.0}};
    auto ident = align_membership(truth, truth);
    REQUIRE(ident == std::vector<int>{0, 1, 2});
    REQUIRE(l2_membership(truth, truth) == 0.0);

    Matrix swapped(truth.size());
    for (size_t i = 0; i < truth.size(); ++i)
        swapped[i] = {truth[i][1], truth[i][0], truth[i][2]};
    auto perm = align_membership(swapped, truth);
    REQUIRE(perm == std::vector<int>{1, 0, 2});
    REQUIRE(l2_membership(swapped, truth) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("hungarian solves the assignment like brute force") {
    Rng rng(68, 0);
    const int k = 9;
    Matrix cost(k, std::vector<double>(k));
    for (auto& row : cost)
        for (auto& v : row) v = rng.uniform();
    auto match = detail::hungarian(cost);
    double got = 0.0;
    for (int p = 0; p < k; ++p) got += cost[p][match[p]];

    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e18;
    do {
        double c = 0.0;
        for (int p = 0; p < k; ++p) c += cost[p][perm[p]];
        best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    REQUIRE(got == Catch::Approx(best).epsilon(1e-12));
}

TEST_CASE("membership alignment matches exhaustive search on random matrices") {
    Rng rng(69, 0);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix est(4, std::vector<double>(3)), truth(4, std::vector<double>(3));
        for (auto& r : est)
            for (auto& v : r) v = rng.uniform();
        for (auto& r : truth)
            for (auto& v : r) v = rng.uniform();
        auto perm = align_membership(est, truth);
        double got = detail::membership_cost(est, truth, perm);
        std::vector<int> p = {0, 1, 2};
        double best = 1e18;
        do best = std::min(best, detail::membership_cost(est, truth, p));
        while (std::next_permutation(p.begin(), p.end()));
        REQUIRE(got == Catch::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("compat alignment recovers a planted permutation") {
    Matrix truth = {{0.9, 0.1, 0.0}, {0.2, 0.8, 0.1}, {0.0, 0.3, 0.7}};
    std::vector<int> plant = {2, 0, 1};  // est[a][b] = truth[plant[a]][plant[b]]
    Matrix est(3, std::vector<double>(3));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) est[a][b] = truth[plant[a]][plant[b]];
    REQUIRE(l2_compat(est, truth) == Catch::Approx(0.0).margin(1e-12));
    Matrix big(11, std::vector<double>(11, 0.0));
    REQUIRE_THROWS_AS(align_compat(big, big), DataError);
}

TEST_CASE("aligned mean accumulator undoes label switching") {
    Matrix base = {{0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.3, 0.3, 0.4}};
    AlignedMeanAccumulator acc(false);
    std::vector<int> perms[3] = {{0, 1, 2}, {2, 0, 1}, {1, 2, 0}};
    for (const auto& perm : perms) {
        Matrix sample(base.size(), std::vector<double>(3));
        for (size_t i = 0; i < base.size(); ++i)
            for (int c = 0; c < 3; ++c) sample[i][perm[c]] = base[i][c];
        acc.add(sample);
    }
    // every permuted copy aligns back onto the first sample
    for (size_t i = 0; i < base.size(); ++i)
        for (int c = 0; c < 3; ++c)
            REQUIRE(acc.mean()[i][c] == Catch::Approx(base[i][c]).margin(1e-9));
}

TEST_CASE("loglik summary closed forms") {
    std::vector<double> constant(5, -42.0);
    auto s = loglik_summary(constant);
    REQUIRE(s.mean == -42.0);
    REQUIRE(s.lo == -42.0);
    REQUIRE(s.hi == -42.0);

    std::vector<double> two = {-10.0, -20.0};
    auto s2 = loglik_summary(two);
    REQUIRE(s2.mean == Catch::Approx(-15.0));
    REQUIRE(s2.hi - s2.mean == Catch::Approx(1.96 * 5.0).epsilon(1e-12));
    REQUIRE(s2.mean >= s2.lo);
    REQUIRE(s2.mean <= s2.hi);
}

TEST_CASE("trace csv round trip") {
    ChainTrace tr;
    tr.chain_id = 3;
    tr.push(1, 4, 123.456, -77.1, 1.0, 0.5, 0.25);
    tr.push(2, 5, 120.0, -75.2, 1.1, 0.6, 0.2);
    std::string p = (std::filesystem::temp_directory_path() / "dim3_trace.csv").string();
    write_trace_csv(tr, p);
    auto rt = read_trace_csv(p);
    REQUIRE(rt.chain_id == 3);
    REQUIRE(rt.size() == 2);
    REQUIRE(rt.k[1] == 5.0);
    REQUIRE(rt.d[0] == 123.456);
    REQUIRE(rt.loglik[1] == -75.2);
    std::remove(p.c_str());
}
