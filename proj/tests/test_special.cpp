#include <catch2/catch_amalgamated.hpp>

#include "dim3/special.hpp"
#include "dim3/stirling.hpp"

using namespace dim3;

TEST_CASE("digamma against known values") {
    // psi(1) = -euler_gamma, psi(0.5) = -gamma - 2 ln 2
    const double euler = 0.57721566490153286;
    REQUIRE(digamma(1.0) == Catch::Approx(-euler).epsilon(1e-10));
    REQUIRE(digamma(0.5) == Catch::Approx(-euler - 2 * std::log(2.0)).epsilon(1e-10));
    REQUIRE(digamma(10.0) == Catch::Approx(2.2517525890667214).epsilon(1e-10));
}

TEST_CASE("log_rising equals lgamma ratio") {
    for (double a : {0.3, 1.0, 4.7}) {
        for (int n : {0, 1, 3, 12, 40}) {
            double direct = std::lgamma(a + n) - std::lgamma(a);
            REQUIRE(log_rising(a, n) == Catch::Approx(direct).margin(1e-10));
        }
    }
}

TEST_CASE("incomplete beta basic identities") {
    REQUIRE(inc_beta(2.0, 3.0, 0.0) == 0.0);
    REQUIRE(inc_beta(2.0, 3.0, 1.0) == 1.0);
    REQUIRE(inc_beta(1.0, 1.0, 0.37) == Catch::Approx(0.37).epsilon(1e-10));
    // I_x(1,b) = 1-(1-x)^b
    REQUIRE(inc_beta(1.0, 4.0, 0.2) == Catch::Approx(1.0 - std::pow(0.8, 4)).epsilon(1e-10));
    // symmetry
    REQUIRE(inc_beta(2.5, 3.5, 0.3) ==
            Catch::Approx(1.0 - inc_beta(3.5, 2.5, 0.7)).epsilon(1e-9));
}

TEST_CASE("F quantile round trip") {
    double q = f_quantile(0.975, 4.0, 20.0);
    double back = inc_beta(2.0, 10.0, 4.0 * q / (4.0 * q + 20.0));
    REQUIRE(back == Catch::Approx(0.975).epsilon(1e-6));
}

TEST_CASE("stirling table closed forms and recurrence") {
    StirlingTable st;
    // S(N,1) = (N-1)!
    REQUIRE(st.log_s(5, 1) == Catch::Approx(std::lgamma(5.0)).epsilon(1e-12));
    REQUIRE(st.log_s(9, 1) == Catch::Approx(std::lgamma(9.0)).epsilon(1e-12));
    // S(N,N) = 1
    REQUIRE(st.log_s(7, 7) == Catch::Approx(0.0).margin(1e-12));
    // S(3,2) = 3, S(4,2) = 11
    REQUIRE(std::exp(st.log_s(3, 2)) == Catch::Approx(3.0).epsilon(1e-10));
    REQUIRE(std::exp(st.log_s(4, 2)) == Catch::Approx(11.0).epsilon(1e-10));
    // recurrence S(N+1,m) = S(N,m-1) + N S(N,m), checked in linear space
    for (int n = 2; n <= 30; ++n)
        for (int m = 2; m <= n; ++m) {
            double lhs = st.log_s(n + 1, m);
            double a = st.log_s(n, m - 1);
            double b = m <= n ? std::log(static_cast<double>(n)) + st.log_s(n, m) : -HUGE_VAL;
            double mx = std::max(a, b);
            double rhs = mx + std::log(std::exp(a - mx) + std::exp(b - mx));
            REQUIRE(lhs == Catch::Approx(rhs).margin(1e-9));
        }
}

TEST_CASE("logsumexp") {
    std::vector<double> v = {std::log(1.0), std::log(3.0), std::log(6.0)};
    REQUIRE(logsumexp(v) == Catch::Approx(std::log(10.0)).epsilon(1e-12));
}
