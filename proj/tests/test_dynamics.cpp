#include <doctest.h>

#include <cmath>

#include "zrp/dynamics.hpp"
#include "zrp/oracle.hpp"
#include "zrp/stats.hpp"

using namespace zrp;

namespace {
ModelSpec fig2() { return {Family::StretchedRates, 2.0, 0.6}; }
}

TEST_CASE("rate tree selects proportionally and updates") {
    RateTree t(5);
    t.set(0, 1.0);
    t.set(3, 3.0);
    CHECK(t.total() == doctest::Approx(4.0));
    CHECK(t.sample(0.5) == 0);
    CHECK(t.sample(1.5) == 3);
    CHECK(t.sample(3.9) == 3);
    t.set(3, 0.0);
    CHECK(t.total() == doctest::Approx(1.0));
    CHECK(t.sample(0.99) == 0);
}

TEST_CASE("empty sites never fire and particles are conserved") {
    CHECK(fig2().g(0) == 0.0);
    auto m = critical_stats(fig2(), {.min_support = 16});
    Configuration init;
    init.N = 3;
    init.eta = {3, 0, 0, 0};
    DynamicsSpec dyn{fig2(), Hop::TotallyAsymmetric};
    Kmc kmc(dyn, init, Rng(21));
    for (int i = 0; i < 50; ++i) {
        kmc.advance(5.0, false);
        std::int64_t s = 0;
        for (auto v : kmc.state().eta) {
            REQUIRE(v >= 0);
            s += v;
        }
        REQUIRE(s == 3);
    }
    CHECK(kmc.events() > 100);
}

TEST_CASE("kmc occupancy statistics agree with the conditional marginal") {
    const std::size_t L = 16;
    const std::int64_t N = 20;
    auto m = critical_stats(fig2(), {.min_support = 32});
    auto ref = conditional_site_marginal(m, L, N);

    McmcChain seed_chain(m, L, N, Rng(22, 1));
    DynamicsSpec dyn{fig2(), Hop::Symmetric};
    Kmc kmc(dyn, seed_chain.state(), Rng(22));
    kmc.advance(100.0, false);
    std::vector<double> counts(static_cast<std::size_t>(N) + 1, 0.0);
    const std::size_t n_snap = 1500;
    for (std::size_t s = 0; s < n_snap; ++s) {
        kmc.advance(4.0, true);
        for (auto v : kmc.state().eta) counts[static_cast<std::size_t>(v)] += 1.0;
    }
    auto chi = chi2_test(counts, ref, static_cast<double>(n_snap * L));
    CHECK(chi.p_value > 1e-3);

    // the time-weighted histogram tracks the same law
    auto hist = kmc.histogram();
    CHECK(tv_distance(hist, ref) < 0.03);
}
