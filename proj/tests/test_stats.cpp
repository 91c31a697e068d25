#include <doctest.h>

#include <cmath>

#include "zrp/runner.hpp"
#include "zrp/stats.hpp"

using namespace zrp;

namespace {
ModelSpec fig2() { return {Family::StretchedRates, 2.0, 0.6}; }

SampleBatch exact_batch(const Marginal& m, std::size_t L, std::int64_t N,
                        std::uint64_t seed, std::size_t reps, bool profiles) {
    ExactSampler s(m, L, N);
    SampleBatch b;
    b.L = L;
    b.N = N;
    b.seed = seed;
    for (std::size_t i = 0; i < reps; ++i) {
        Rng rng(seed, i);
        b.records.push_back(ReplicaRecord::from(s.sample(rng), i, i, profiles));
    }
    return b;
}
}  // namespace

TEST_CASE("ks machinery: null behaviour and power") {
    Rng rng(31);
    std::vector<double> xs;
    for (int i = 0; i < 5000; ++i) xs.push_back(rng.uniform());
    auto ks = ks_test(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(ks.statistic < 0.03);
    CHECK(ks.p_value > 0.01);
    for (double& x : xs) x = x * 0.8;  // wrong law
    auto bad = ks_test(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(bad.p_value < 1e-6);

    std::vector<double> a, b;
    for (int i = 0; i < 4000; ++i) {
        a.push_back(rng.uniform());
        b.push_back(rng.uniform());
    }
    CHECK(ks_two_sample(a, b).p_value > 0.01);
    CHECK(kolmogorov_sf(0.0) == doctest::Approx(1.0));
    CHECK(kolmogorov_sf(3.0) < 1e-6);
}

TEST_CASE("chi2 test with pooling") {
    std::vector<double> probs{0.5, 0.3, 0.15, 0.04, 0.009, 0.001};
    Rng rng(32);
    std::vector<double> counts(probs.size(), 0.0);
    const int n = 20000;
    for (int i = 0; i < n; ++i) counts[rng.discrete(probs)] += 1.0;
    auto r = chi2_test(counts, probs, n);
    CHECK(r.dof >= 3);
    CHECK(r.p_value > 1e-3);
    CHECK(chi2_sf(0.0, 4.0) == doctest::Approx(1.0));
}

TEST_CASE("bulk paths: exact telescoping and bridge covariance") {
    auto m = critical_stats(fig2(), {.min_support = 512});
    const std::size_t L = 200;
    const auto N = static_cast<std::int64_t>(m.rho_c * 200.0);
    auto batch = exact_batch(m, L, N, 33, 4000, true);
    auto st = bulk_paths(batch, m, PathMode::X, {0.0, 0.25, 0.5, 0.75, 1.0});
    // X_0 = X_1 = 0 exactly for every replica: the mean and variance vanish
    CHECK(st.mean.front() == 0.0);
    CHECK(st.mean.back() == 0.0);
    CHECK(st.cov[4][4] == 0.0);
    // Brownian-bridge covariance at interior points
    for (std::size_t a = 1; a <= 3; ++a)
        for (std::size_t b = a; b <= 3; ++b) {
            double want = std::min(st.grid[a], st.grid[b]) - st.grid[a] * st.grid[b];
            CHECK(std::fabs(st.cov[a][b] - want) < 0.04);
        }
}

TEST_CASE("excess fraction and phase mixture bookkeeping") {
    auto m = critical_stats(fig2(), {.min_support = 1360});
    auto batch = exact_batch(m, 1024, 1360, 34, 300, false);
    auto ef = excess_fraction(batch, m);
    CHECK(ef.value > 0.0);
    CHECK(ef.value < 1.0);
    CHECK(ef.ci_lo < ef.value);
    CHECK(ef.ci_hi > ef.value);

    double k = 1360.0 - m.rho_c * 1024.0;
    auto mix1 = phase_mixture_test(batch, m, 0.375 * k, 0.3);
    auto mix2 = phase_mixture_test(batch, m, 0.375 * k, 0.3);
    CHECK(mix1.condensed_fraction == mix2.condensed_fraction);  // idempotent
    CHECK(mix1.n_condensed > 0);
    CHECK(mix1.n_condensed < mix1.n);
}

TEST_CASE("second max: two sites, condensed-regime trend") {
    auto m = critical_stats(fig2(), {.min_support = 64});
    auto b2 = exact_batch(m, 2, 9, 35, 500, false);
    for (const auto& r : b2.records) CHECK(r.second_max == 9 - r.M);

    double cl = c_lambda(0.6, 2.0);
    double prev_ratio = 1.0;
    for (std::size_t L : {256u, 1024u}) {
        auto base = critical_stats(fig2());
        auto rn = resolve_N({"t_scale", 2.0 * cl}, base, L);
        auto mm = critical_stats(fig2(),
                                 {.min_support = static_cast<std::size_t>(rn.rounded)});
        auto batch = exact_batch(mm, L, rn.rounded, 36, 400, false);
        auto s = second_max_summary(batch);
        CHECK(s.median_ratio < prev_ratio);
        prev_ratio = s.median_ratio;
    }
    CHECK(prev_ratio < 0.05);
}

TEST_CASE("equivalence of ensembles against oracle and product laws") {
    const std::size_t L = 64;
    auto m = critical_stats(fig2(), {.min_support = 256});
    {
        // empirical single-site law vs exact conditional marginal
        auto N = static_cast<std::int64_t>(m.rho_c * 64.0);
        auto batch = exact_batch(m, L, N, 37, 1600, true);  // ~1e5 site draws
        auto ref = conditional_site_marginal(m, L, N);
        std::vector<double> emp(ref.size(), 0.0);
        double n = 0;
        for (const auto& r : batch.records)
            for (auto v : r.eta) {
                emp[static_cast<std::size_t>(v)] += 1.0;
                ++n;
            }
        for (double& e : emp) e /= n;
        CHECK(tv_distance(emp, ref) < 0.01);
    }
    {
        // subcritical bulk vs nu_phi at phi(rho)
        auto N = static_cast<std::int64_t>(0.5 * m.rho_c * 64.0);
        auto batch = exact_batch(m, L, N, 38, 3000, true);
        auto eq = equivalence_test(batch, m,
                                   solve_fugacity(m, static_cast<double>(N) / 64.0),
                                   false);
        CHECK(eq.tv < 0.02);
    }
    {
        // supercritical bulk (maximum removed) vs nu_1
        double cl = c_lambda(0.6, 2.0);
        auto rn = resolve_N({"t_scale", 2.5 * cl}, m, 256);
        auto mm = critical_stats(fig2(),
                                 {.min_support = static_cast<std::size_t>(rn.rounded)});
        auto batch = exact_batch(mm, 256, rn.rounded, 39, 1200, true);
        auto eq = equivalence_test(batch, mm, 1.0, true);
        CHECK(eq.tv < 0.03);
    }
}

TEST_CASE("i.i.d. control runs: deterministic extreme-value curves") {
    // Gumbel for stretched tails: F(m)^L against exp(-e^{-(m-y)/b}), improving in L
    auto m = critical_stats(fig2(), {.min_support = 4096});
    std::vector<double> cdf(m.K + 2, 0.0);
    for (std::size_t k = 0; k <= m.K; ++k) cdf[k + 1] = cdf[k] + m.p[k];
    auto iid_ks = [&](std::size_t L, const Normings& nm) {
        double d = 0.0;
        for (std::size_t mm = 1; mm < 60; ++mm) {
            double F = std::pow(cdf[mm + 1], static_cast<double>(L));
            double x = (static_cast<double>(mm) - *nm.y_L) / *nm.b_L;
            d = std::max(d, std::fabs(F - gumbel_cdf(x)));
        }
        return d;
    };
    double prev = 1.0;
    for (std::size_t L : {100000u, 10000000u}) {
        auto nm = gumbel_normings(m, L, 0.0);
        double d = iid_ks(L, nm);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 0.25);

    // Frechet for power-law tails at lambda = 1; polynomial convergence, so
    // probe the trend over two decades of L
    auto m5 = critical_stats({Family::PowerLawRates, 5.0, 1.0});
    std::vector<double> c5(m5.K + 2, 0.0);
    for (std::size_t k = 0; k <= m5.K; ++k) c5[k + 1] = c5[k] + m5.p[k];
    double d_prev = 1.0;
    for (double L5 : {1e6, 1e8}) {
        double scale = std::pow(L5, 0.25);
        double d5 = 0.0;
        for (std::size_t mm = 4; mm < std::min<std::size_t>(m5.K, 6000); ++mm) {
            double F = std::pow(c5[mm + 1], L5);
            double ref = frechet_cdf(static_cast<double>(mm) / scale, m5.a_tail(), 5.0);
            d5 = std::max(d5, std::fabs(F - ref));
        }
        CHECK(d5 < d_prev);
        d_prev = d5;
    }
    CHECK(d_prev < 0.05);
}
