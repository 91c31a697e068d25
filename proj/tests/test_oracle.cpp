#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "zrp/asymptotics.hpp"
#include "zrp/oracle.hpp"

using namespace zrp;

namespace {

Marginal uniform3() { return Marginal::from_probabilities({1.0, 1.0, 1.0}); }

ModelSpec fig2() { return {Family::StretchedRates, 2.0, 0.6}; }

// independent linear-domain convolution for small cases
std::vector<double> direct_power(const std::vector<double>& p, int power,
                                 std::size_t n_max) {
    std::vector<double> acc{1.0};
    for (int i = 0; i < power; ++i) {
        std::vector<double> next(std::min(acc.size() + p.size() - 1, n_max + 1), 0.0);
        for (std::size_t a = 0; a < acc.size(); ++a)
            for (std::size_t b = 0; b < p.size() && a + b < next.size(); ++b)
                next[a + b] += acc[a] * p[b];
        acc = std::move(next);
    }
    acc.resize(n_max + 1, 0.0);
    return acc;
}

}  // namespace

TEST_CASE("sum_distribution: L=1 identity and uniform L=2 enumeration") {
    auto m = uniform3();
    auto law1 = sum_distribution(m, 1, 2);
    for (std::size_t n = 0; n <= 2; ++n)
        CHECK(law1.log_pS[n] == doctest::Approx(m.log_p[n]).epsilon(1e-14));

    auto law2 = sum_distribution(m, 2, 4);
    CHECK(std::exp(law2.log_pS[2]) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(std::exp(law2.log_total()) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("doubling equals direct four-fold convolution") {
    MarginalOptions opt;
    opt.min_support = 256;
    auto m = critical_stats(fig2(), opt);
    const std::size_t n_max = 240;
    std::vector<double> p(m.p.begin(), m.p.begin() + n_max + 1);
    auto direct = direct_power(p, 4, n_max);
    auto law = sum_distribution(m, 4, n_max);
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (direct[n] <= 0.0) continue;
        CHECK(law.log_pS[n] == doctest::Approx(std::log(direct[n])).epsilon(5e-13));
    }
}

TEST_CASE("doubling associativity in log domain") {
    auto m = critical_stats(fig2());
    const std::size_t n_max = 160;
    std::vector<double> base(m.log_p.begin(), m.log_p.begin() + n_max + 1);
    auto p2 = log_convolve(base, base, n_max);
    auto left = log_convolve(p2, p2, n_max);
    auto right = log_convolve(log_convolve(p2, base, n_max), base, n_max);
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (left[n] == neg_inf && right[n] == neg_inf) continue;
        CHECK(std::fabs(left[n] - right[n]) < 1e-12);
    }
}

TEST_CASE("conditional_max_cdf: indicators, enumeration, monotonicity") {
    auto m = uniform3();
    std::vector<std::size_t> grid{0, 1, 2, 3};
    auto c1 = conditional_max_cdf(m, 1, 1, grid);
    CHECK(c1[0] == doctest::Approx(0.0));
    CHECK(c1[1] == doctest::Approx(1.0));

    auto c2 = conditional_max_cdf(m, 2, 2, grid);
    CHECK(c2[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(c2[2] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < c2.size(); ++i) CHECK(c2[i] >= c2[i - 1]);
}

TEST_CASE("cap at the full support equals the uncapped law") {
    auto m = uniform3();
    auto uncapped = sum_distribution(m, 6, 12);
    auto capped = sum_distribution(m, 6, 12, 12);
    for (std::size_t n = 0; n <= 12; ++n)
        CHECK(uncapped.log_pS[n] == doctest::Approx(capped.log_pS[n]).epsilon(1e-14));
    // with a cap the total equals P[all sites <= cap]^L
    auto law = sum_distribution(m, 6, 12, 1);
    CHECK(std::exp(law.log_total()) ==
          doctest::Approx(std::pow(2.0 / 3.0, 6.0)).epsilon(1e-12));
}

TEST_CASE("exact_pSLN: L=1 entry, normalization, local-CLT sanity") {
    auto m = uniform3();
    CHECK(exact_log_pSLN(m, 1, 0) == doctest::Approx(m.log_p[0]).epsilon(1e-14));

    MarginalOptions opt;
    auto mf = critical_stats(fig2(), opt);
    std::size_t L = 32;
    std::size_t n_max = default_n_max(mf, L, critical_scale(mf, L));
    if (n_max > mf.K) {
        opt.min_support = n_max;
        mf = critical_stats(fig2(), opt);
    }
    auto law = sum_distribution(mf, L, n_max);
    CHECK(std::exp(law.log_total()) == doctest::Approx(1.0).epsilon(1e-9));

    auto m5 = critical_stats({Family::PowerLawRates, 5.0, 1.0});
    std::size_t L5 = 1024;
    auto N = static_cast<std::int64_t>(m5.rho_c * static_cast<double>(L5));
    double lp = exact_log_pSLN(m5, L5, N);
    double llt = -0.5 * std::log(2.0 * M_PI * m5.sigma2 * static_cast<double>(L5));
    CHECK(std::fabs(std::exp(lp - llt) - 1.0) < 0.05);
}

TEST_CASE("site marginal is split-order independent") {
    auto m = critical_stats(fig2());
    const std::size_t L = 12;
    const std::int64_t N = 30;
    auto v = conditional_site_marginal(m, L, N);

    // same quantity through a different block composition of the remaining sites
    Oracle o(m, L, static_cast<std::size_t>(N));
    auto alt = log_convolve(o.block(3), o.block(8), static_cast<std::size_t>(N));
    double denom = o.log_p_sum(L, N);
    for (std::size_t j = 0; j <= 8; ++j) {
        double lp = m.log_p[j] + alt[static_cast<std::size_t>(N) - j] - denom;
        CHECK(v[j] == doctest::Approx(std::exp(lp)).epsilon(1e-11));
    }
    double sum = std::accumulate(v.begin(), v.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("oracle guards: impossible N and resource budget") {
    auto m = uniform3();
    std::vector<std::size_t> grid{1};
    CHECK_THROWS_AS((void)conditional_max_cdf(m, 2, 100, grid), ImpossibleN);
    CHECK_THROWS_AS((void)Oracle(m, 1u << 30, 1u << 26), ResourceBudget);
}
