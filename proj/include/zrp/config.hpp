#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zrp/asymptotics.hpp"
#include "zrp/common.hpp"
#include "zrp/dynamics.hpp"
#include "zrp/model.hpp"

namespace zrp {

using json = nlohmann::json;

enum class Job { Compute, OracleJob, SampleExact, SampleMcmc, Dynamics, Verify };

inline std::string job_name(Job j) {
    switch (j) {
        case Job::Compute: return "compute";
        case Job::OracleJob: return "oracle";
        case Job::SampleExact: return "sample-exact";
        case Job::SampleMcmc: return "sample-mcmc";
        case Job::Dynamics: return "dynamics";
        case Job::Verify: return "verify";
    }
    return "?";
}

inline Job job_from_name(const std::string& s) {
    if (s == "compute") return Job::Compute;
    if (s == "oracle") return Job::OracleJob;
    if (s == "sample-exact") return Job::SampleExact;
    if (s == "sample-mcmc") return Job::SampleMcmc;
    if (s == "dynamics") return Job::Dynamics;
    if (s == "verify") return Job::Verify;
    throw ConfigError("unknown job: " + s);
}

// N-resolution rules mirroring the critical-scale decompositions.
struct NRule {
    std::string kind = "fixed";  // fixed | gammal1 | subl | t_scale | omega_pl | omega_se
    double value = 0.0;          // N, gamma, t, or omega depending on kind
};

struct ExperimentConfig {
    ModelSpec model;
    std::size_t L = 0;
    NRule n_rule;
    Job job = Job::Compute;
    std::uint64_t replicas = 1;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    bool keep_profiles = false;
    RegimeThresholds thresholds;
    // job-specific knobs
    std::optional<std::uint64_t> mcmc_burn, mcmc_thin;
    Hop hop = Hop::Symmetric;
    double t_end = 0.0, t_burn = 0.0;
    std::optional<std::size_t> oracle_n_max;
    std::optional<std::size_t> oracle_cap;
    unsigned jobs = 0;  // worker count; 0 = hardware default

    void validate() const {
        model.validate();
        bool stochastic = job == Job::SampleExact || job == Job::SampleMcmc ||
                          job == Job::Dynamics;
        if (stochastic && !seed)
            throw ConfigError("seed is mandatory for stochastic jobs");
        if (job != Job::Compute && job != Job::Verify && L == 0)
            throw ConfigError("ensemble.L required for this job");
    }
};

inline json to_json(const NRule& r) {
    return json{{"kind", r.kind}, {"value", r.value}};
}

inline json to_json(const ExperimentConfig& c) {
    json j;
    j["model"] = {{"family", family_name(c.model.family)},
                  {"b", c.model.b},
                  {"lambda", c.model.lambda},
                  {"cutoff_policy", c.model.cutoff_policy}};
    j["ensemble"] = {{"L", c.L}, {"rule", to_json(c.n_rule)}};
    j["job"] = job_name(c.job);
    j["replicas"] = c.replicas;
    if (c.seed) j["seed"] = *c.seed;
    j["out"] = c.out_dir;
    j["keep_profiles"] = c.keep_profiles;
    j["thresholds"] = {{"gamma_ab", c.thresholds.gamma_ab},
                       {"delta_factor", c.thresholds.delta_factor},
                       {"theta_mult", c.thresholds.theta_mult},
                       {"omega_lo", c.thresholds.omega_lo},
                       {"omega_hi", c.thresholds.omega_hi}};
    json extra;
    if (c.mcmc_burn) extra["burn_moves"] = *c.mcmc_burn;
    if (c.mcmc_thin) extra["thin_moves"] = *c.mcmc_thin;
    if (!extra.empty()) j["mcmc"] = extra;
    if (c.job == Job::Dynamics)
        j["dynamics"] = {{"hop", hop_name(c.hop)}, {"t_end", c.t_end},
                         {"t_burn", c.t_burn}};
    json ora;
    if (c.oracle_n_max) ora["n_max"] = *c.oracle_n_max;
    if (c.oracle_cap) ora["cap"] = *c.oracle_cap;
    if (!ora.empty()) j["oracle"] = ora;
    if (c.jobs) j["jobs"] = c.jobs;
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    try {
        const auto& m = j.at("model");
        c.model.family = family_from_name(m.at("family").get<std::string>());
        c.model.b = m.at("b").get<double>();
        c.model.lambda = m.value("lambda", c.model.family == Family::PowerLawRates
                                               ? 1.0 : 0.6);
        c.model.cutoff_policy = m.value("cutoff_policy", 1e-14);
        if (j.contains("ensemble")) {
            const auto& e = j.at("ensemble");
            c.L = e.value("L", std::size_t{0});
            if (e.contains("N")) {
                c.n_rule = {"fixed", e.at("N").get<double>()};
            } else if (e.contains("rule")) {
                c.n_rule.kind = e.at("rule").at("kind").get<std::string>();
                c.n_rule.value = e.at("rule").value("value", 0.0);
            }
        }
        c.job = job_from_name(j.value("job", std::string("compute")));
        c.replicas = j.value("replicas", std::uint64_t{1});
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        c.out_dir = j.value("out", std::string("out"));
        c.keep_profiles = j.value("keep_profiles", false);
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            c.thresholds.gamma_ab = t.value("gamma_ab", 3.0);
            c.thresholds.delta_factor = t.value("delta_factor", 0.1);
            c.thresholds.theta_mult = t.value("theta_mult", 1.0);
            c.thresholds.omega_lo = t.value("omega_lo", 0.5);
            c.thresholds.omega_hi = t.value("omega_hi", 2.0);
        }
        if (j.contains("mcmc")) {
            const auto& mm = j.at("mcmc");
            if (mm.contains("burn_moves"))
                c.mcmc_burn = mm.at("burn_moves").get<std::uint64_t>();
            if (mm.contains("thin_moves"))
                c.mcmc_thin = mm.at("thin_moves").get<std::uint64_t>();
        }
        if (j.contains("dynamics")) {
            const auto& d = j.at("dynamics");
            c.hop = hop_from_name(d.value("hop", std::string("symmetric")));
            c.t_end = d.value("t_end", 0.0);
            c.t_burn = d.value("t_burn", 0.0);
        }
        if (j.contains("oracle")) {
            const auto& o = j.at("oracle");
            if (o.contains("n_max"))
                c.oracle_n_max = o.at("n_max").get<std::size_t>();
            if (o.contains("cap")) c.oracle_cap = o.at("cap").get<std::size_t>();
        }
        c.jobs = j.value("jobs", 0u);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config (") + path + "): " + e.what());
    }
    return config_from_json(j);
}

// FNV-1a over the canonical serialization; stamped into every output file.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
    std::string s = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace zrp
