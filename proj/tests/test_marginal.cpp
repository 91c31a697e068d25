#include <doctest.h>

#include <cmath>

#include "zrp/marginal.hpp"
#include "zrp/model.hpp"

using namespace zrp;

namespace {
ModelSpec fig2() { return {Family::StretchedRates, 2.0, 0.6}; }
ModelSpec pl(double b) { return {Family::PowerLawRates, b, 1.0}; }
ModelSpec sx(double lam, double b) {
    return {Family::ExplicitStretchedWeights, b, lam};
}
}  // namespace

TEST_CASE("weights: empty product and first steps") {
    auto lw = build_weights(fig2(), 4);
    CHECK(lw[0] == 0.0);
    auto lw_pl = build_weights(pl(2.0 + 1.0), 4);  // g(1) = 1 + b
    CHECK(lw_pl[1] == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
    auto lw2 = build_weights(pl(2.0), 4);
    CHECK(std::exp(lw2[1]) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    auto lwx = build_weights(sx(0.6, 2.0), 4);
    CHECK(lwx[1] == doctest::Approx(-5.0).epsilon(1e-14));
    // recursion identity log w(n) = log w(n-1) - log g(n)
    auto spec = fig2();
    for (std::size_t n = 1; n <= 4; ++n)
        CHECK(lw[n] == doctest::Approx(lw[n - 1] - spec.log_g(static_cast<std::int64_t>(n)))
                           .epsilon(1e-15));
}

TEST_CASE("partition: edge values and the explicit-weights series") {
    auto spec = sx(0.6, 2.0);
    auto lw = build_weights(spec, 512);
    CHECK(partition(spec, lw, 0.0).log_z == 0.0);

    // independent oracle: direct summation of exp(-5 n^{0.4})
    double direct = 0.0;
    for (int n = 0; n <= 512; ++n)
        direct += std::exp(-5.0 * std::pow(static_cast<double>(n), 0.4));
    auto part = partition(spec, lw, 1.0);
    CHECK(part.z() == doctest::Approx(direct).epsilon(1e-12));
    CHECK(direct == doctest::Approx(1.00884).epsilon(1e-5));
    CHECK(part.truncation_bound < 1e-20);

    CHECK_THROWS_AS((void)partition(pl(0.8), build_weights(pl(0.8), 64), 1.0),
                    NonConvergent);
}

TEST_CASE("density: zero point and strict monotonicity") {
    auto spec = fig2();
    auto lw = build_weights(spec, 4096);
    CHECK(density(spec, lw, 0.0) == 0.0);
    double r5 = density(spec, lw, 0.5);
    double r9 = density(spec, lw, 0.9);
    double r1 = density(spec, lw, 1.0);
    CHECK(r5 < r9);
    CHECK(r9 < r1);
    CHECK(r1 == doctest::Approx(0.842).epsilon(0.006));
}

TEST_CASE("critical_stats: reference constants and moment identities") {
    auto m = critical_stats(fig2());
    CHECK(m.rho_c == doctest::Approx(0.842).epsilon(0.006));
    CHECK(m.sigma2 == doctest::Approx(2.55).epsilon(0.008));

    double sum = 0.0, ex = 0.0, ex2 = 0.0;
    for (std::size_t n = 0; n <= m.K; ++n) {
        sum += m.p[n];
        ex += static_cast<double>(n) * m.p[n];
        ex2 += static_cast<double>(n) * static_cast<double>(n) * m.p[n];
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
    CHECK(std::fabs(ex - m.rho_c) < 1e-10);
    CHECK(std::fabs(ex2 - ex * ex - m.sigma2) < 1e-10);
    CHECK(m.tail_bound < m.spec.cutoff_policy);

    CHECK_THROWS_AS((void)critical_stats(pl(3.0)), InfiniteVariance);

    auto mx = critical_stats(sx(0.6, 2.0));
    CHECK(mx.A_tail == doctest::Approx(1.0 / mx.z1()).epsilon(1e-12));
}

TEST_CASE("critical_stats: cutoff adequacy under support doubling") {
    auto m1 = critical_stats(fig2());
    MarginalOptions opt;
    opt.min_support = 2 * m1.K;
    auto m2 = critical_stats(fig2(), opt);
    CHECK(std::fabs(m1.rho_c - m2.rho_c) < 1e-9);
    CHECK(std::fabs(m1.sigma2 - m2.sigma2) < 1e-9);
}

TEST_CASE("tail prefactor: closed form for power-law rates, window stability") {
    auto m = critical_stats(pl(5.0));
    double closed = std::tgamma(6.0) / m.z1();
    CHECK(m.A_tail == doctest::Approx(closed).epsilon(1e-4));

    // last two dyadic windows agree within 1%
    auto spec = pl(5.0);
    auto lw = build_weights(spec, 8192);
    double a1 = detail::a_weight_window(spec, lw, 2048, 4096);
    double a2 = detail::a_weight_window(spec, lw, 4096, 8192);
    CHECK(std::fabs(a1 / a2 - 1.0) < 0.01);

    auto sr = fig2();
    auto lws = build_weights(sr, 16384);
    double s1 = detail::a_weight_window(sr, lws, 4096, 8192);
    double s2 = detail::a_weight_window(sr, lws, 8192, 16384);
    CHECK(std::fabs(s1 / s2 - 1.0) < 0.01);

    // undefined for stretched rates with lambda <= 1/2
    auto m45 = critical_stats({Family::StretchedRates, 1.5, 0.45});
    CHECK(!m45.has_A_tail());
    CHECK_THROWS((void)m45.a_tail());
}

TEST_CASE("solve_fugacity: boundary values and round trip") {
    auto m = critical_stats(fig2());
    CHECK(solve_fugacity(m, 0.0) == 0.0);
    CHECK(solve_fugacity(m, m.rho_c) == 1.0);
    double phi = solve_fugacity(m, m.rho_c / 2.0);
    CHECK(density(m.spec, m.log_w, phi) ==
          doctest::Approx(m.rho_c / 2.0).epsilon(1e-9));
    CHECK_THROWS_AS((void)solve_fugacity(m, m.rho_c + 0.01), Supercritical);
}

TEST_CASE("marginal json carries the fixed fields") {
    auto m = critical_stats(fig2());
    auto j = m.to_json(16);
    for (const char* key :
         {"family", "b", "lambda", "K", "rho_c", "sigma2", "kappa3", "A_tail", "p"})
        CHECK(j.contains(key));
    CHECK(j["p"].size() == 16);
}

TEST_CASE("from_probabilities recovers moments") {
    auto m = Marginal::from_probabilities({1.0, 1.0, 1.0});
    CHECK(m.rho_c == doctest::Approx(1.0));
    CHECK(m.sigma2 == doctest::Approx(2.0 / 3.0));
    CHECK(m.kappa3 == doctest::Approx(0.0));
}
