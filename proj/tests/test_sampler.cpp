#include <doctest.h>

#include <cmath>
#include <numeric>

#include "zrp/asymptotics.hpp"
#include "zrp/oracle.hpp"
#include "zrp/runner.hpp"
#include "zrp/sampler.hpp"
#include "zrp/stats.hpp"

using namespace zrp;

namespace {
ModelSpec fig2() { return {Family::StretchedRates, 2.0, 0.6}; }
}

TEST_CASE("exact sampler: degenerate L=1 and uniform L=2 enumeration") {
    auto m = Marginal::from_probabilities({1.0, 1.0, 1.0});
    {
        ExactSampler s(m, 1, 2);
        Rng rng(1);
        auto c = s.sample(rng);
        CHECK(c.eta.size() == 1);
        CHECK(c.eta[0] == 2);
    }
    {
        ExactSampler s(m, 2, 2);
        Rng rng(2);
        int counts[3] = {0, 0, 0};
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            auto c = s.sample(rng);
            CHECK(c.sum() == 2);
            ++counts[c.eta[0]];
        }
        // each outcome 1/3 within 3 binomial sigmas
        double sd = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / n);
        for (int j = 0; j < 3; ++j)
            CHECK(std::fabs(counts[j] / static_cast<double>(n) - 1.0 / 3.0) <
                  3.0 * sd);
    }
}

TEST_CASE("exact sampler: conservation and exchangeability") {
    MarginalOptions opt;
    opt.min_support = 64;
    auto m = critical_stats(fig2(), opt);
    ExactSampler s(m, 24, 40);
    Rng rng(7);
    std::vector<double> first, last;
    for (int i = 0; i < 20000; ++i) {
        auto c = s.sample(rng);
        REQUIRE(c.sum() == 40);
        first.push_back(static_cast<double>(c.eta.front()));
        last.push_back(static_cast<double>(c.eta.back()));
    }
    auto ks = ks_two_sample(first, last);
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("exact sampler M-law matches the oracle conditional CDF") {
    const std::size_t L = 64;
    auto base = critical_stats(fig2());
    auto N = resolve_N({"subl", 0.0}, base, L).rounded;  // critical regime
    MarginalOptions opt;
    opt.min_support = static_cast<std::size_t>(N);
    auto m = critical_stats(fig2(), opt);
    std::vector<std::size_t> grid(static_cast<std::size_t>(N));
    std::iota(grid.begin(), grid.end(), 1);
    auto cdf = conditional_max_cdf(m, L, N, grid);

    ExactSampler s(m, L, N);
    Rng rng(11);
    std::vector<double> xs;
    for (int i = 0; i < 4000; ++i)
        xs.push_back(static_cast<double>(s.sample(rng).max()));
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (std::size_t j = 0; j < cdf.size(); ++j) {
        auto it = std::upper_bound(xs.begin(), xs.end(),
                                   static_cast<double>(j + 1));
        double emp = static_cast<double>(it - xs.begin()) / 4000.0;
        d = std::max(d, std::fabs(emp - cdf[j]));
    }
    double t = d * (std::sqrt(4000.0) + 0.12 + 0.11 / std::sqrt(4000.0));
    CHECK(kolmogorov_sf(t) > 0.01);
}

TEST_CASE("mcmc: conservation, log-domain stability, exact-law agreement") {
    MarginalOptions opt;
    opt.min_support = 1u << 20;
    auto mbig = critical_stats({Family::ExplicitStretchedWeights, 2.0, 0.6}, opt);
    McmcChain big(mbig, 4, 1000000, Rng(3));
    // acceptance ratio finite for occupations up to 1e6
    CHECK(std::isfinite(big.log_ratio(1000000, 0)));
    CHECK(std::isfinite(big.log_ratio(1, 999999)));

    auto m = critical_stats(fig2(), {.min_support = 64});
    McmcChain chain(m, 16, 20, Rng(5));
    for (int i = 0; i < 2000; ++i) {
        chain.step();
        REQUIRE(chain.state().sum() == 20);
    }

    // M-law total variation against the exact sampler (short version)
    chain.run(McmcDefaults::burn_moves(16, 20));
    std::vector<double> hm(21, 0.0), he(21, 0.0);
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
        chain.run(16);
        hm[static_cast<std::size_t>(chain.state().max())] += 1.0 / n;
    }
    ExactSampler s(m, 16, 20);
    Rng rng(6);
    for (int i = 0; i < n; ++i)
        he[static_cast<std::size_t>(s.sample(rng).max())] += 1.0 / n;
    CHECK(tv_distance(hm, he) < 0.04);
}

TEST_CASE("tilted rejection: conservation, acceptance rate, restricted law") {
    auto m = critical_stats(fig2(), {.min_support = 512});
    {
        const std::size_t L = 256;
        auto N = static_cast<std::int64_t>(m.rho_c * 256.0);
        Rng rng(9);
        int got = 0;
        std::uint64_t trials = 0;
        for (int i = 0; i < 150; ++i) {
            auto res = tilted_rejection_sample(m, L, N, m.K, rng);
            REQUIRE(res.config.sum() == N);
            ++got;
            trials += res.trials;
        }
        double rate = static_cast<double>(got) / static_cast<double>(trials);
        double llt = 1.0 / std::sqrt(2.0 * M_PI * m.sigma2 * 256.0);
        CHECK(rate > llt / 1.5);
        CHECK(rate < llt * 1.5);
        double exact = std::exp(exact_log_pSLN(m, L, N));
        CHECK(rate > exact / 1.5);
        CHECK(rate < exact * 1.5);
    }
    {
        // law equals the exact sampler restricted to M <= cap
        const std::size_t L = 16, cap = 8;
        const std::int64_t N = 20;
        Rng rng(10);
        std::vector<double> rej, exa;
        for (int i = 0; i < 1500; ++i)
            rej.push_back(static_cast<double>(
                tilted_rejection_sample(m, L, N, cap, rng).config.max()));
        ExactSampler s(m, L, N);
        while (exa.size() < 1500) {
            auto c = s.sample(rng);
            if (c.max() <= static_cast<std::int64_t>(cap))
                exa.push_back(static_cast<double>(c.max()));
        }
        auto ks = ks_two_sample(rej, exa);
        CHECK(ks.p_value > 0.01);
    }
}
