#include <catch2/catch_amalgamated.hpp>

#include "dim3/rng.hpp"

using dim3::Rng;

TEST_CASE("rng reproducibility and stream independence") {
    Rng a(42, 1), b(42, 1), c(42, 2);
    for (int i = 0; i < 100; ++i) {
        REQUIRE(a.next_u32() == b.next_u32());
    }
    bool differs = false;
    Rng a2(42, 1);
    for (int i = 0; i < 100; ++i)
        if (a2.next_u32() != c.next_u32()) differs = true;
    REQUIRE(differs);
}

TEST_CASE("rng restore from seed/stream/counter triple") {
    Rng a(123, 7);
    for (int i = 0; i < 1000; ++i) a.uniform();
    Rng b = Rng::restore(a.seed(), a.stream(), a.counter());
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u32() == b.next_u32());
}

TEST_CASE("uniform moments") {
    Rng r(7, 0);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        s += u;
        s2 += u * u;
    }
    REQUIRE(s / n == Catch::Approx(0.5).margin(0.005));
    REQUIRE(s2 / n == Catch::Approx(1.0 / 3).margin(0.005));
}

TEST_CASE("gamma and beta moments") {
    Rng r(11, 0);
    const int n = 100000;
    double sg = 0;
    for (int i = 0; i < n; ++i) sg += r.gamma(2.5, 2.0);
    REQUIRE(sg / n == Catch::Approx(1.25).margin(0.02));

    double sb = 0;
    for (int i = 0; i < n; ++i) sb += r.beta(2.0, 3.0);
    REQUIRE(sb / n == Catch::Approx(0.4).margin(0.01));

    double sa = 0;
    for (int i = 0; i < n; ++i) sa += r.gamma(0.3, 1.0);  // shape<1 branch
    REQUIRE(sa / n == Catch::Approx(0.3).margin(0.01));
}

TEST_CASE("beta degenerate shapes") {
    Rng r(1, 0);
    REQUIRE(r.beta(0.0, 2.0) == 0.0);
    REQUIRE(r.beta(2.0, 0.0) == 1.0);
}

TEST_CASE("binomial matches mean and edge probabilities") {
    Rng r(3, 0);
    REQUIRE(r.binomial(10, 0.0) == 0);
    REQUIRE(r.binomial(10, 1.0) == 10);
    double s = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) s += r.binomial(8, 0.25);
    REQUIRE(s / n == Catch::Approx(2.0).margin(0.03));
}

TEST_CASE("categorical frequencies follow weights") {
    Rng r(5, 0);
    std::vector<double> w = {1.0, 2.0, 7.0};
    std::vector<int> hits(3, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++hits[r.categorical(w)];
    REQUIRE(hits[0] / static_cast<double>(n) == Catch::Approx(0.1).margin(0.01));
    REQUIRE(hits[2] / static_cast<double>(n) == Catch::Approx(0.7).margin(0.01));

    std::vector<double> logw = {std::log(1.0), std::log(2.0), std::log(7.0)};
    std::vector<int> hits2(3, 0);
    for (int i = 0; i < n; ++i) ++hits2[r.categorical_log(logw)];
    REQUIRE(hits2[2] / static_cast<double>(n) == Catch::Approx(0.7).margin(0.01));
}

TEST_CASE("dirichlet rows sum to one with correct mean") {
    Rng r(9, 0);
    std::vector<double> conc = {1.0, 2.0, 3.0};
    std::vector<double> out(3), acc(3, 0.0);
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        r.dirichlet(conc, out);
        double s = out[0] + out[1] + out[2];
        REQUIRE(s == Catch::Approx(1.0).epsilon(1e-12));
        for (int k = 0; k < 3; ++k) acc[k] += out[k];
    }
    REQUIRE(acc[1] / n == Catch::Approx(2.0 / 6).margin(0.01));
}
