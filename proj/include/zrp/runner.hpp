#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "zrp/asymptotics.hpp"
#include "zrp/config.hpp"
#include "zrp/dynamics.hpp"
#include "zrp/oracle.hpp"
#include "zrp/sampler.hpp"
#include "zrp/stats.hpp"

namespace zrp {

inline constexpr const char* version = "0.1.0";

struct ResolvedN {
    double real = 0.0;
    std::int64_t rounded = 0;
};

// Particle-number rules on the critical scales; the real value and the
// rounded integer are both recorded in job metadata.
inline ResolvedN resolve_N(const NRule& rule, const Marginal& m, std::size_t L) {
    double Ld = static_cast<double>(L);
    double lL = std::log(Ld);
    double rl = m.rho_c * Ld;
    double real = 0.0;
    if (rule.kind == "fixed") {
        real = rule.value;
    } else if (rule.kind == "gammal1") {
        if (!m.spec.is_power_law()) throw ConfigError("gammal1 rule needs lambda = 1");
        double b = m.spec.b;
        real = rl + critical_scale(m, L) *
                        (1.0 + b / (2.0 * (b - 3.0)) * std::log(lL) / lL +
                         rule.value / lL);
    } else if (rule.kind == "subl") {
        double lam = m.spec.lambda;
        if (m.spec.is_power_law() || lam <= 0.5)
            throw ConfigError("subl rule needs lambda in (1/2, 1)");
        double cl = c_lambda(lam, m.spec.b);
        double s2L = m.sigma2 * Ld;
        real = rl + cl * std::pow(s2L, 1.0 / (1.0 + lam)) -
               (1.0 + lam) / (2.0 * lam * cl) * std::pow(s2L, lam / (1.0 + lam)) *
                   (1.5 * lL + rule.value);
    } else if (rule.kind == "t_scale") {
        double lam = m.spec.lambda;
        if (m.spec.is_power_law()) throw ConfigError("t_scale rule needs lambda < 1");
        real = rl + rule.value * std::pow(m.sigma2 * Ld, 1.0 / (1.0 + lam));
    } else if (rule.kind == "omega_pl") {
        double b = m.spec.b;
        if (!m.spec.is_power_law()) throw ConfigError("omega_pl rule needs lambda = 1");
        real = rl - rule.value * m.sigma2 * std::pow(Ld, (b - 2.0) / (b - 1.0));
    } else if (rule.kind == "omega_se") {
        double lam = m.spec.lambda;
        if (m.spec.is_power_law()) throw ConfigError("omega_se rule needs lambda < 1");
        real = rl - rule.value * Ld * std::pow(lL, -1.0 / (1.0 - lam));
    } else {
        throw ConfigError("unknown N rule: " + rule.kind);
    }
    return {real, static_cast<std::int64_t>(std::llround(real))};
}

// Run a batch of independent replicas in parallel; each replica gets the
// stream split (seed, replica_id) so results are reproducible at any worker
// count. The sampler factory is called once per worker thread.
template <typename MakeSampler>
SampleBatch run_replicas(std::size_t L, std::int64_t N, std::uint64_t seed,
                         std::uint64_t replicas, bool keep_profiles,
                         unsigned jobs, MakeSampler&& make) {
    SampleBatch batch;
    batch.L = L;
    batch.N = N;
    batch.seed = seed;
    batch.records.resize(replicas);
    unsigned workers = jobs ? jobs : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, 64));
    std::atomic<std::uint64_t> next{0};
    auto body = [&] {
        auto sampler = make();
        for (;;) {
            std::uint64_t i = next.fetch_add(1);
            if (i >= replicas) return;
            Rng rng(seed, i);
            Configuration c = sampler(rng, i);
            batch.records[i] = ReplicaRecord::from(c, i, i, keep_profiles);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    return batch;
}

struct JobArtifacts {
    json meta;
    std::filesystem::path meta_path;
    std::vector<std::filesystem::path> files;
    int exit_code = 0;
};

namespace detail {

inline Marginal job_marginal(const ExperimentConfig& cfg, std::int64_t min_support) {
    MarginalOptions opt;
    if (min_support > 0) opt.min_support = static_cast<std::size_t>(min_support);
    return critical_stats(cfg.model, opt);
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << s;
}

}  // namespace detail

// Execute one experiment config; outputs land under cfg.out_dir and every
// file records the config hash and seed through meta.json.
inline JobArtifacts run(const ExperimentConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.out_dir);
    JobArtifacts art;
    art.meta["config"] = to_json(cfg);
    art.meta["config_hash"] = config_hash(cfg);
    art.meta["version"] = version;

    // a first coarse marginal to resolve N, then rebuild with full support
    Marginal m0 = critical_stats(cfg.model);
    ResolvedN rn{0.0, 0};
    if (cfg.L > 0) {
        rn = resolve_N(cfg.n_rule, m0, cfg.L);
        art.meta["N_real"] = rn.real;
        art.meta["N"] = rn.rounded;
    }
    std::int64_t support_needed =
        cfg.L > 0 ? rn.rounded
                  : static_cast<std::int64_t>(cfg.oracle_n_max.value_or(0));
    Marginal m = support_needed > static_cast<std::int64_t>(m0.K)
                     ? detail::job_marginal(cfg, support_needed)
                     : std::move(m0);

    AsymptoticParams par;
    par.marginal = &m;
    par.thresholds = cfg.thresholds;

    if (cfg.L > 0) {
        RegimeReport rep = scale_coordinates(par, cfg.L, rn.rounded);
        art.meta["regime"] = rep.to_json();
    }

    switch (cfg.job) {
        case Job::Compute: {
            json out;
            out["rho_c"] = m.rho_c;
            out["sigma2"] = m.sigma2;
            out["kappa3"] = m.kappa3;
            out["A_tail"] = m.A_tail;
            if (!m.spec.is_power_law())
                out["c_lambda"] = c_lambda(m.spec.lambda, m.spec.b);
            if (cfg.L > 0 && !m.spec.is_power_law() && m.spec.lambda > 0.5) {
                auto nc = resolve_N({"subl", 0.0}, m, cfg.L);
                out["N_crit"] = nc.rounded;
                out["N_crit_real"] = nc.real;
            }
            if (cfg.L > 0 && m.spec.is_power_law()) {
                auto nc = resolve_N({"gammal1", 0.0}, m, cfg.L);
                out["N_crit"] = nc.rounded;
                out["N_crit_real"] = nc.real;
            }
            art.meta["result"] = out;
            auto p = std::filesystem::path(cfg.out_dir) / "marginal.json";
            detail::write_text(p, m.to_json().dump(2) + "\n");
            art.files.push_back(p);
            break;
        }
        case Job::OracleJob: {
            std::size_t n_max = cfg.oracle_n_max.value_or(
                default_n_max(m, cfg.L, critical_scale(m, cfg.L)));
            if (n_max > m.K) m = detail::job_marginal(cfg, static_cast<std::int64_t>(n_max));
            std::optional<std::size_t> cap = cfg.oracle_cap;
            auto law = sum_distribution(m, cfg.L, n_max, cap);
            std::ostringstream os;
            law.write_csv(os);
            auto p = std::filesystem::path(cfg.out_dir) / "oracle.csv";
            detail::write_text(p, os.str());
            art.files.push_back(p);
            art.meta["result"] = {{"n_max", n_max},
                                  {"log_total", law.log_total()},
                                  {"log_p_at_N", cfg.L > 0 && rn.rounded >= 0 &&
                                                  static_cast<std::size_t>(rn.rounded) <= n_max
                                              ? law.log_pS[static_cast<std::size_t>(rn.rounded)]
                                              : neg_inf}};
            break;
        }
        case Job::SampleExact: {
            // tables are prebuilt once; concurrent sampling only reads them
            auto shared = std::make_shared<ExactSampler>(m, cfg.L, rn.rounded);
            auto batch = run_replicas(
                cfg.L, rn.rounded, *cfg.seed, cfg.replicas, cfg.keep_profiles,
                cfg.jobs, [&] {
                    return [shared](Rng& rng, std::uint64_t) {
                        return shared->sample(rng);
                    };
                });
            batch.source = "exact";
            std::ostringstream os;
            batch.write_csv(os);
            auto p = std::filesystem::path(cfg.out_dir) / "samples.csv";
            detail::write_text(p, os.str());
            art.files.push_back(p);
            art.meta["result"] = {{"replicas", cfg.replicas}};
            break;
        }
        case Job::SampleMcmc: {
            std::uint64_t burn =
                cfg.mcmc_burn.value_or(McmcDefaults::burn_moves(cfg.L, rn.rounded));
            std::uint64_t thin = cfg.mcmc_thin.value_or(McmcDefaults::thin_moves(cfg.L));
            auto batch = run_replicas(
                cfg.L, rn.rounded, *cfg.seed, cfg.replicas, cfg.keep_profiles,
                cfg.jobs, [&] {
                    return [&, burn, thin](Rng& rng, std::uint64_t) {
                        McmcChain chain(m, cfg.L, rn.rounded, rng);
                        chain.run(burn + thin);
                        return chain.state();
                    };
                });
            batch.source = "mcmc";
            std::ostringstream os;
            batch.write_csv(os);
            auto p = std::filesystem::path(cfg.out_dir) / "samples.csv";
            detail::write_text(p, os.str());
            art.files.push_back(p);
            art.meta["result"] = {{"replicas", cfg.replicas},
                                  {"burn_moves", burn},
                                  {"thin_moves", thin}};
            break;
        }
        case Job::Dynamics: {
            DynamicsSpec dyn{cfg.model, cfg.hop};
            McmcChain init(m, cfg.L, rn.rounded, Rng(*cfg.seed, 1));
            Kmc kmc(dyn, init.state(), Rng(*cfg.seed, 0));
            kmc.advance(cfg.t_burn, false);
            kmc.reset_histogram();
            kmc.advance(cfg.t_end, true);
            auto hist = kmc.histogram();
            std::ostringstream os;
            os << "occupancy,time_weight\n";
            for (std::size_t v = 0; v < hist.size(); ++v)
                os << v << ',' << hist[v] << '\n';
            auto p = std::filesystem::path(cfg.out_dir) / "occupancy_hist.csv";
            detail::write_text(p, os.str());
            art.files.push_back(p);
            art.meta["result"] = {{"events", kmc.events()}, {"time", kmc.time()}};
            break;
        }
        case Job::Verify:
            throw ConfigError("verify is dispatched by the CLI");
    }

    auto t1 = std::chrono::steady_clock::now();
    art.meta["wall_seconds"] =
        std::chrono::duration<double>(t1 - t0).count();
    art.meta_path = std::filesystem::path(cfg.out_dir) / "meta.json";
    detail::write_text(art.meta_path, art.meta.dump(2) + "\n");
    return art;
}

}  // namespace zrp
