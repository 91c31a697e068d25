#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "zrp/asymptotics.hpp"
#include "zrp/config.hpp"
#include "zrp/dynamics.hpp"
#include "zrp/oracle.hpp"
#include "zrp/runner.hpp"
#include "zrp/sampler.hpp"
#include "zrp/stats.hpp"

namespace zrp::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = true;
    double seconds = 0.0;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    std::string summary() const {
        std::ostringstream os;
        os << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name;
        return os.str();
    }
};

struct VerifyOptions {
    std::uint64_t seed = 20260810;
    unsigned jobs = 0;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(5);
    os << v;
    return os.str();
}

inline ModelSpec fig2_model() { return {Family::StretchedRates, 2.0, 0.6}; }
inline ModelSpec pl5_model() { return {Family::PowerLawRates, 5.0, 1.0}; }

inline Marginal with_support(const ModelSpec& spec, std::size_t min_support) {
    MarginalOptions opt;
    opt.min_support = min_support;
    return critical_stats(spec, opt);
}

// Collects a per-replica statistic vector from exact-sampler draws, replicas
// split across workers with per-replica streams.
template <std::size_t W>
std::vector<std::array<double, W>> sample_stats(
    const Marginal& m, std::size_t L, std::int64_t N, std::uint64_t seed,
    std::uint64_t replicas, unsigned jobs,
    const std::function<std::array<double, W>(const Configuration&)>& f) {
    ExactSampler sampler(m, L, N);
    std::vector<std::array<double, W>> out(replicas);
    unsigned workers = jobs ? jobs : std::thread::hardware_concurrency();
    workers = std::max(1u, workers);
    std::atomic<std::uint64_t> next{0};
    auto body = [&] {
        for (;;) {
            std::uint64_t i = next.fetch_add(1);
            if (i >= replicas) return;
            Rng rng(seed, i);
            out[i] = f(sampler.sample(rng));
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    return out;
}

inline std::vector<double> sampled_maxima(const Marginal& m, std::size_t L,
                                          std::int64_t N, std::uint64_t seed,
                                          std::uint64_t replicas, unsigned jobs) {
    auto rows = sample_stats<1>(m, L, N, seed, replicas, jobs,
                                [](const Configuration& c) {
                                    return std::array<double, 1>{
                                        static_cast<double>(c.max())};
                                });
    std::vector<double> xs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) xs[i] = rows[i][0];
    return xs;
}

// KS distance of integer samples against an exact discrete CDF, where
// cdf[j] = P[M <= offset + j]. The Kolmogorov p-value is conservative for
// discrete laws.
inline KsResult ks_discrete(std::vector<double> samples,
                            std::span<const double> cdf, std::int64_t offset) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t j = 0; j < cdf.size(); ++j) {
        double mval = static_cast<double>(offset + static_cast<std::int64_t>(j));
        auto it = std::upper_bound(samples.begin(), samples.end(), mval);
        double emp = static_cast<double>(it - samples.begin()) / n;
        d = std::max(d, std::fabs(emp - cdf[j]));
    }
    double t = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
    return {d, kolmogorov_sf(t), samples.size()};
}

template <typename F>
CriterionResult timed(int id, const std::string& name, double budget_seconds,
                      F&& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.check(false, std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
    if (budget_seconds > 0.0)
        r.check(r.seconds < budget_seconds,
                "runtime " + fmt(r.seconds) + " s within " + fmt(budget_seconds) +
                    " s");
    return r;
}

}  // namespace detail

// 1. Constants of the Fig.-2 style model.
inline CriterionResult criterion_1(const VerifyOptions&) {
    using namespace detail;
    return timed(1, "critical constants and N rule", 1.0, [&](CriterionResult& r) {
        auto m = critical_stats(fig2_model());
        r.check(std::fabs(m.rho_c - 0.842) <= 0.005,
                "rho_c = " + fmt(m.rho_c) + " within 0.842 +- 0.005");
        r.check(std::fabs(m.sigma2 - 2.55) <= 0.02,
                "sigma2 = " + fmt(m.sigma2) + " within 2.55 +- 0.02");
        double cl = c_lambda(0.6, 2.0);
        r.check(std::fabs(cl - 4.09) <= 0.01,
                "c_lambda = " + fmt(cl) + " within 4.09 +- 0.01");
        auto nc = resolve_N({"subl", 0.0}, m, 1024);
        r.check(std::llabs(nc.rounded - 1356) <= 1,
                "N(subl, gamma=0, L=1024) = " + std::to_string(nc.rounded) +
                    " within 1356 +- 1");
    });
}

// 2. Oracle normalization and doubling-vs-direct convolution agreement.
inline CriterionResult criterion_2(const VerifyOptions&) {
    using namespace detail;
    return timed(2, "oracle soundness", 60.0, [&](CriterionResult& r) {
        auto base = critical_stats(fig2_model());
        for (std::size_t L : {16u, 64u, 256u}) {
            std::size_t n_max = default_n_max(base, L, critical_scale(base, L));
            auto m = n_max > base.K ? with_support(fig2_model(), n_max) : base;
            auto law = sum_distribution(m, L, n_max);
            double total = std::exp(law.log_total());
            r.check(std::fabs(total - 1.0) <= 1e-9,
                    "L=" + std::to_string(L) + ": sum_N P[S_L=N] = 1 " +
                        fmt(total - 1.0));
        }
        // power doubling vs direct four-fold convolution
        auto m = with_support(fig2_model(), 600);
        std::size_t n_max = 512;
        std::vector<double> site(m.log_p.begin(),
                                 m.log_p.begin() + static_cast<std::ptrdiff_t>(n_max) + 1);
        auto p2 = log_convolve(site, site, n_max);
        auto doubled = log_convolve(p2, p2, n_max);
        auto direct = log_convolve(log_convolve(log_convolve(site, site, n_max),
                                               site, n_max),
                                  site, n_max);
        double worst = 0.0;
        for (std::size_t n = 0; n <= n_max; ++n)
            if (doubled[n] != neg_inf || direct[n] != neg_inf)
                worst = std::max(worst, std::fabs(doubled[n] - direct[n]));
        r.check(worst <= 1e-12,
                "doubling vs direct, max |dlog| = " + fmt(worst));
    });
}

// 3. Exact-sampler law vs oracle CDF in the three stretched regimes; MCMC
// total-variation agreement with the exact sampler.
inline CriterionResult criterion_3(const VerifyOptions& opt) {
    using namespace detail;
    return timed(3, "sampler exactness", 0.0, [&](CriterionResult& r) {
        const std::size_t L = 64;
        auto base = critical_stats(fig2_model());
        double cl = c_lambda(0.6, 2.0);
        std::vector<std::pair<std::string, std::int64_t>> regimes = {
            {"SE-a", resolve_N({"t_scale", 0.5 * cl}, base, L).rounded},
            {"SE-b", resolve_N({"t_scale", 2.0 * cl}, base, L).rounded},
            {"SE-c", resolve_N({"subl", 0.0}, base, L).rounded}};
        for (auto& [name, N] : regimes) {
            auto m = with_support(fig2_model(), static_cast<std::size_t>(N));
            std::vector<std::size_t> grid(static_cast<std::size_t>(N));
            std::iota(grid.begin(), grid.end(), 1);
            auto cdf = conditional_max_cdf(m, L, N, grid);
            auto xs = sampled_maxima(m, L, N, opt.seed + 3, 10000, opt.jobs);
            auto ks = ks_discrete(std::move(xs), cdf, 1);
            r.check(ks.p_value >= 0.01,
                    name + " (N=" + std::to_string(N) + "): KS p = " +
                        fmt(ks.p_value) + " (D=" + fmt(ks.statistic) + ")");
        }
        // MCMC vs exact on M at L=16, N=20
        const std::size_t Ls = 16;
        const std::int64_t Ns = 20;
        auto ms = with_support(fig2_model(), 32);
        auto exact_xs = sampled_maxima(ms, Ls, Ns, opt.seed + 4, 100000, opt.jobs);
        std::uint64_t burn = McmcDefaults::burn_moves(Ls, Ns);
        std::uint64_t thin = McmcDefaults::thin_moves(Ls);
        std::vector<double> mcmc_xs;
        mcmc_xs.reserve(100000);
        McmcChain chain(ms, Ls, Ns, Rng(opt.seed + 5));
        chain.run(burn);
        for (std::size_t i = 0; i < 100000; ++i) {
            chain.run(thin);
            mcmc_xs.push_back(static_cast<double>(chain.state().max()));
        }
        std::vector<double> ha(static_cast<std::size_t>(Ns) + 1, 0.0),
            hb(static_cast<std::size_t>(Ns) + 1, 0.0);
        for (double x : exact_xs) ha[static_cast<std::size_t>(x)] += 1e-5;
        for (double x : mcmc_xs) hb[static_cast<std::size_t>(x)] += 1e-5;
        double tv = tv_distance(ha, hb);
        r.check(tv <= 0.02, "MCMC vs exact TV on M_L = " + fmt(tv));
    });
}

// 4. Kinetic Monte Carlo stationarity against the exact conditional marginal.
inline CriterionResult criterion_4(const VerifyOptions& opt) {
    using namespace detail;
    return timed(4, "dynamics stationarity", 300.0, [&](CriterionResult& r) {
        const std::size_t L = 32;
        const std::int64_t N = 40;
        auto m = with_support(fig2_model(), static_cast<std::size_t>(N));
        auto ref = conditional_site_marginal(m, L, N);
        DynamicsSpec dyn{fig2_model(), Hop::Symmetric};
        McmcChain init(m, L, N, Rng(opt.seed + 6, 1));
        Kmc kmc(dyn, init.state(), Rng(opt.seed + 6, 0));
        kmc.advance(200.0, false);
        const double snap_dt = 4.0;
        const std::size_t n_snap = 4000;
        std::vector<double> counts(static_cast<std::size_t>(N) + 1, 0.0);
        for (std::size_t s = 0; s < n_snap; ++s) {
            kmc.advance(snap_dt, true);
            for (auto v : kmc.state().eta)
                counts[static_cast<std::size_t>(v)] += 1.0;
        }
        double total = static_cast<double>(n_snap * L);
        auto chi = chi2_test(counts, ref, total);
        r.check(chi.p_value >= 0.01,
                "chi2 p = " + fmt(chi.p_value) + " (stat=" + fmt(chi.statistic) +
                    ", dof=" + std::to_string(chi.dof) + ")");
    });
}

// 5. Law of large numbers for the excess-mass fraction.
inline CriterionResult criterion_5(const VerifyOptions& opt) {
    using namespace detail;
    return timed(5, "excess-mass fraction LLN", 0.0, [&](CriterionResult& r) {
        {
            const std::size_t L = 10000;
            auto m0 = critical_stats(pl5_model());
            for (double gamma : {+6.0, -6.0}) {
                auto rn = resolve_N({"gammal1", gamma}, m0, L);
                auto m = with_support(pl5_model(), static_cast<std::size_t>(rn.rounded));
                auto xs = sampled_maxima(m, L, rn.rounded, opt.seed + 7, 1000, opt.jobs);
                double kk = static_cast<double>(rn.rounded) -
                            m.rho_c * static_cast<double>(L);
                double mean = 0.0;
                for (double x : xs) mean += x / kk;
                mean /= static_cast<double>(xs.size());
                if (gamma > 0)
                    r.check(mean >= 0.9, "PL gamma=+6: mean M/k = " + fmt(mean) +
                                             " >= 0.9");
                else
                    r.check(mean <= 0.1, "PL gamma=-6: mean M/k = " + fmt(mean) +
                                             " <= 0.1");
            }
        }
        {
            const std::size_t L = 4096;
            auto m0 = critical_stats(fig2_model());
            double cl = c_lambda(0.6, 2.0);
            auto rn = resolve_N({"t_scale", 2.0 * cl}, m0, L);
            auto m = with_support(fig2_model(), static_cast<std::size_t>(rn.rounded));
            double k = static_cast<double>(rn.rounded) -
                       m.rho_c * static_cast<double>(L);
            double t = k / std::pow(m.sigma2 * static_cast<double>(L), 1.0 / 1.6);
            double at = a_of_t(0.6, 2.0, t);
            auto xs = sampled_maxima(m, L, rn.rounded, opt.seed + 8, 1000, opt.jobs);
            double mean = 0.0;
            for (double x : xs) mean += x / k;
            mean /= static_cast<double>(xs.size());
            r.check(std::fabs(mean - at) <= 0.05,
                    "SE t=2c: mean M/k = " + fmt(mean) + " within " + fmt(at) +
                        " +- 0.05");
        }
    });
}

// 6. Critical Bernoulli mixture at the Fig.-2 point.
inline CriterionResult criterion_6(const VerifyOptions& opt) {
    using namespace detail;
    return timed(6, "critical Bernoulli mixture", 1800.0, [&](CriterionResult& r) {
        const std::size_t L = 1024;
        const std::int64_t N = 1360;
        auto m = with_support(fig2_model(), static_cast<std::size_t>(N));
        double k = static_cast<double>(N) - m.rho_c * static_cast<double>(L);
        double thr = 0.5 * (2.0 * 0.6 / 1.6) * k;  // half the predicted condensate
        auto xs = sampled_maxima(m, L, N, opt.seed + 9, 500, opt.jobs);
        SampleBatch batch;
        batch.L = L;
        batch.N = N;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            ReplicaRecord rec;
            rec.replica_id = i;
            rec.M = static_cast<std::int64_t>(xs[i]);
            batch.records.push_back(rec);
        }
        double p_pred = p_condensed_finite(m, L, N, static_cast<std::size_t>(thr));
        auto mix = phase_mixture_test(batch, m, thr, p_pred);
        r.check(mix.n_condensed > 0 && mix.n_condensed < mix.n,
                "both phases observed (condensed " +
                    std::to_string(mix.n_condensed) + "/" + std::to_string(mix.n) +
                    ")");
        r.check(std::fabs(mix.mean_ratio_condensed - 0.75) <= 0.08,
                "condensed mean M/k = " + fmt(mix.mean_ratio_condensed) +
                    " within 0.75 +- 0.08");
        r.check(std::fabs(mix.condensed_fraction - p_pred) <= 0.15,
                "condensed fraction " + fmt(mix.condensed_fraction) +
                    " within prediction " + fmt(p_pred) + " +- 0.15");
    });
}

// 7. Fluctuation laws of the maximum: Gaussian above, Gumbel below.
inline CriterionResult criterion_7(const VerifyOptions& opt) {
    using namespace detail;
    return timed(7, "fluctuation laws", 0.0, [&](CriterionResult& r) {
        {
            const std::size_t L = 10000;
            auto m0 = critical_stats(pl5_model());
            auto rn = resolve_N({"gammal1", 6.0}, m0, L);
            auto m = with_support(pl5_model(), static_cast<std::size_t>(rn.rounded));
            auto xs = sampled_maxima(m, L, rn.rounded, opt.seed + 10, 10000, opt.jobs);
            SampleBatch batch;
            batch.L = L;
            batch.N = rn.rounded;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                ReplicaRecord rec;
                rec.M = static_cast<std::int64_t>(xs[i]);
                batch.records.push_back(rec);
            }
            auto ks = max_law_test(batch, {MaxLaw::GaussianEmpirical});
            r.check(ks.statistic < 0.05,
                    "PL-b standardized Gaussian KS = " + fmt(ks.statistic));
        }
        double prev = 1.0;
        double last = 1.0;
        for (std::size_t L : {1000u, 10000u, 100000u}) {
            auto m0 = critical_stats(pl5_model());
            double omega = 0.8 * std::log(std::log(static_cast<double>(L)));
            auto rn = resolve_N({"omega_pl", omega}, m0, L);
            auto m = with_support(pl5_model(), static_cast<std::size_t>(rn.rounded));
            double s_star = conditional_tilt(m, L, rn.rounded);
            auto nm = gumbel_normings(m, L, s_star);
            auto xs = sampled_maxima(m, L, rn.rounded, opt.seed + 11, 20000, opt.jobs);
            for (double& x : xs) x = (x - *nm.B_L) * (*nm.s_L);
            auto ks = ks_test(std::move(xs), [](double x) { return gumbel_cdf(x); });
            r.check(ks.statistic <= prev + 0.005,
                    "downside L=" + std::to_string(L) + ": Gumbel KS = " +
                        fmt(ks.statistic) + " (non-increasing)");
            prev = ks.statistic;
            last = ks.statistic;
        }
        r.check(last < 0.08, "downside KS at largest L = " + fmt(last) + " < 0.08");
    });
}

// 8. Nagaev asymptotics against the exact oracle.
inline CriterionResult criterion_8(const VerifyOptions&) {
    using namespace detail;
    return timed(8, "Nagaev estimates vs oracle", 0.0, [&](CriterionResult& r) {
        auto base = critical_stats(fig2_model());
        double cl = c_lambda(0.6, 2.0);
        // case 2 along t = 2 c_lambda
        double prev = 1.0;
        for (std::size_t L : {64u, 128u, 256u, 512u, 1024u}) {
            auto rn = resolve_N({"t_scale", 2.0 * cl}, base, L);
            auto m = with_support(fig2_model(), static_cast<std::size_t>(rn.rounded));
            AsymptoticParams par;
            par.marginal = &m;
            auto est = nagaev_estimate(par, L, rn.rounded, NagaevCase::Case2);
            double ex = exact_log_pSLN(m, L, rn.rounded);
            double err = std::fabs(std::exp(est.log_value - ex) - 1.0);
            bool mono = err <= prev + 0.005;
            if (L == 1024)
                r.check(err < 0.20 && mono,
                        "case-2 L=1024 rel err = " + fmt(err) + " (< 0.20, trend ok)");
            else
                r.check(mono, "case-2 L=" + std::to_string(L) + " rel err = " + fmt(err));
            prev = err;
        }
        // case 3 along k = 15.6 L^0.9
        prev = 1.0;
        for (std::size_t L : {64u, 128u, 256u, 512u, 1024u}) {
            double k = 15.6 * std::pow(static_cast<double>(L), 0.9);
            auto N = static_cast<std::int64_t>(
                std::llround(base.rho_c * static_cast<double>(L) + k));
            auto m = with_support(fig2_model(), static_cast<std::size_t>(N) + 8);
            AsymptoticParams par;
            par.marginal = &m;
            auto est = nagaev_estimate(par, L, N);
            double ex = exact_log_pSLN(m, L, N);
            double err = std::fabs(std::exp(est.log_value - ex) - 1.0);
            bool mono = err <= prev + 0.005;
            if (L == 1024)
                r.check(est.n_case == NagaevCase::Case3 && err < 0.20 && mono,
                        "case-3 L=1024 rel err = " + fmt(err) + " (< 0.20, trend ok)");
            else
                r.check(mono, "case-3 L=" + std::to_string(L) + " rel err = " + fmt(err));
            prev = err;
        }
        // case 1 with the built-in lambda_0 at lambda = 0.45
        {
            ModelSpec spec{Family::StretchedRates, 1.5, 0.45};
            auto m = critical_stats(spec);
            const std::size_t L = 512;
            auto N = static_cast<std::int64_t>(
                std::llround(m.rho_c * static_cast<double>(L) + 106.0));
            AsymptoticParams par;
            par.marginal = &m;
            auto est = nagaev_estimate(par, L, N, NagaevCase::Case1);
            double ex = exact_log_pSLN(m, L, N);
            double err = std::fabs(std::exp(est.log_value - ex) - 1.0);
            r.check(err < 0.10,
                    "case-1 lambda=0.45 with lambda_0, rel err = " + fmt(err));
        }
    });
}

// 9. Doney split against the exact oracle on the critical scale.
inline CriterionResult criterion_9(const VerifyOptions&) {
    using namespace detail;
    return timed(9, "Doney split vs oracle", 0.0, [&](CriterionResult& r) {
        const std::size_t L = 1u << 14;
        auto m0 = critical_stats(pl5_model());
        auto rn = resolve_N({"gammal1", 0.0}, m0, L);
        auto m = with_support(pl5_model(), static_cast<std::size_t>(rn.rounded));
        auto d = doney_split(m, L, rn.rounded);
        double ex = exact_log_pSLN(m, L, rn.rounded);
        double err = std::fabs(std::exp(d.log_sum_refined() - ex) - 1.0);
        r.check(err < 0.25, "component-sum rel err = " + fmt(err) + " at L=2^14");
    });
}

// 10. Bulk fluctuations: Brownian-bridge covariance and condensate drift.
inline CriterionResult criterion_10(const VerifyOptions& opt) {
    using namespace detail;
    return timed(10, "bulk fluctuations", 0.0, [&](CriterionResult& r) {
        {
            const std::size_t L = 1000;
            auto m = critical_stats(fig2_model());
            auto N = static_cast<std::int64_t>(m.rho_c * static_cast<double>(L));
            double sig = std::sqrt(m.sigma2);
            const std::array<double, 3> grid{0.25, 0.5, 0.75};
            auto rows = sample_stats<3>(
                m, L, N, opt.seed + 12, 100000, opt.jobs,
                [&](const Configuration& c) {
                    std::array<double, 3> path{};
                    std::int64_t acc = 0;
                    std::size_t gi = 0;
                    for (std::size_t x = 0; x < c.eta.size() && gi < 3; ++x) {
                        while (gi < 3 && static_cast<double>(x) >=
                                             grid[gi] * static_cast<double>(L)) {
                            path[gi] = (static_cast<double>(acc) -
                                        grid[gi] * static_cast<double>(N)) /
                                       (sig * std::sqrt(static_cast<double>(L)));
                            ++gi;
                        }
                        acc += c.eta[x];
                    }
                    return path;
                });
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = a; b < 3; ++b) {
                    double ma = 0, mb = 0;
                    for (auto& row : rows) {
                        ma += row[a];
                        mb += row[b];
                    }
                    ma /= static_cast<double>(rows.size());
                    mb /= static_cast<double>(rows.size());
                    double cov = 0;
                    for (auto& row : rows) cov += (row[a] - ma) * (row[b] - mb);
                    cov /= static_cast<double>(rows.size() - 1);
                    double want = std::min(grid[a], grid[b]) - grid[a] * grid[b];
                    r.check(std::fabs(cov - want) <= 0.02,
                            "Cov(X_" + fmt(grid[a]) + ",X_" + fmt(grid[b]) +
                                ") = " + fmt(cov) + " vs " + fmt(want));
                }
        }
        {
            const std::size_t L = 4096;
            auto m0 = critical_stats(fig2_model());
            double cl = c_lambda(0.6, 2.0);
            auto rn = resolve_N({"t_scale", 2.0 * cl}, m0, L);
            auto m = with_support(fig2_model(), static_cast<std::size_t>(rn.rounded));
            double Ld = static_cast<double>(L);
            double k = static_cast<double>(rn.rounded) - m.rho_c * Ld;
            double aL = 1.0 - alpha_root(m, L, k);
            double pred = 1.0 / (1.0 - 0.6 * (1.0 - aL) / aL);
            double sig = std::sqrt(m.sigma2);
            auto trunc = static_cast<std::int64_t>(std::floor(std::pow(Ld, 0.25)));
            double center = static_cast<double>(rn.rounded) - aL * k;
            auto rows = sample_stats<1>(
                m, L, rn.rounded, opt.seed + 13, 10000, opt.jobs,
                [&](const Configuration& c) {
                    std::int64_t s = 0;
                    for (auto v : c.eta)
                        if (v <= trunc) s += v;
                    double y1 = (static_cast<double>(s) - center) / (sig * std::sqrt(Ld));
                    return std::array<double, 1>{y1};
                });
            MeanVar mv;
            for (auto& row : rows) mv.add(row[0]);
            r.check(std::fabs(mv.var() / pred - 1.0) <= 0.15,
                    "terminal drift variance = " + fmt(mv.var()) + " vs " +
                        fmt(pred) + " (+-15%)");
        }
    });
}

inline std::vector<CriterionResult> run_acceptance(const VerifyOptions& opt,
                                                   const std::vector<int>& only = {}) {
    using Fn = CriterionResult (*)(const VerifyOptions&);
    static const Fn fns[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                             criterion_5, criterion_6, criterion_7, criterion_8,
                             criterion_9, criterion_10};
    std::vector<CriterionResult> out;
    for (int i = 1; i <= 10; ++i) {
        if (!only.empty() &&
            std::find(only.begin(), only.end(), i) == only.end())
            continue;
        out.push_back(fns[i - 1](opt));
    }
    return out;
}

}  // namespace zrp::verify
