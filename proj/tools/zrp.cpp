// Command-line runner for zero-range condensation experiments: constants,
// exact oracles, conditional samplers, dynamics, and the verification suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zrp/verify.hpp"
#include "zrp/zrp.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 0;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* c = cmd->add_option("--config", args.config_path, "experiment config (JSON)");
    if (config_required) c->required();
    cmd->add_option("--seed", args.seed, "override RNG seed");
    cmd->add_option("--jobs", args.jobs, "worker count (default: hardware)");
    cmd->add_option("--out", args.out_dir, "output directory override");
}

zrp::ExperimentConfig load(const CommonArgs& args, zrp::Job job) {
    zrp::ExperimentConfig cfg = zrp::load_config(args.config_path);
    cfg.job = job;
    if (args.seed) cfg.seed = *args.seed;
    if (args.jobs) cfg.jobs = args.jobs;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    return cfg;
}

int run_job(const CommonArgs& args, zrp::Job job) {
    auto cfg = load(args, job);
    auto art = zrp::run(cfg);
    std::cout << art.meta.dump(2) << "\n";
    return art.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-range condensation toolkit"};
    app.require_subcommand(1);

    CommonArgs compute_args, oracle_args, exact_args, mcmc_args, dyn_args;
    CommonArgs verify_args;
    std::vector<int> verify_only;

    add_common(app.add_subcommand("compute",
                                  "critical constants, regime report, marginal"),
               compute_args, true);
    add_common(app.add_subcommand("oracle", "exact finite-L sum distribution"),
               oracle_args, true);
    add_common(app.add_subcommand("sample-exact", "exact conditional samples"),
               exact_args, true);
    add_common(app.add_subcommand("sample-mcmc", "Metropolis conditional samples"),
               mcmc_args, true);
    add_common(app.add_subcommand("dynamics", "kinetic Monte Carlo run"),
               dyn_args, true);
    auto* vcmd = app.add_subcommand("verify", "run the acceptance suite");
    add_common(vcmd, verify_args, false);
    vcmd->add_option("--criteria", verify_only, "subset of criteria to run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("compute")) return run_job(compute_args, zrp::Job::Compute);
        if (app.got_subcommand("oracle")) return run_job(oracle_args, zrp::Job::OracleJob);
        if (app.got_subcommand("sample-exact"))
            return run_job(exact_args, zrp::Job::SampleExact);
        if (app.got_subcommand("sample-mcmc"))
            return run_job(mcmc_args, zrp::Job::SampleMcmc);
        if (app.got_subcommand("dynamics")) return run_job(dyn_args, zrp::Job::Dynamics);
        if (app.got_subcommand("verify")) {
            zrp::verify::VerifyOptions opt;
            if (verify_args.seed) opt.seed = *verify_args.seed;
            opt.jobs = verify_args.jobs;
            auto results = zrp::verify::run_acceptance(opt, verify_only);
            nlohmann::json report = nlohmann::json::array();
            bool all_pass = true;
            for (const auto& r : results) {
                std::cout << r.summary() << "  (" << r.seconds << " s)\n";
                for (const auto& n : r.notes) std::cout << "    " << n << "\n";
                all_pass = all_pass && r.pass;
                report.push_back({{"id", r.id},
                                  {"name", r.name},
                                  {"pass", r.pass},
                                  {"seconds", r.seconds},
                                  {"notes", r.notes}});
            }
            std::string out = verify_args.out_dir.empty() ? "out" : verify_args.out_dir;
            std::filesystem::create_directories(out);
            std::ofstream f(std::filesystem::path(out) / "verify_report.json");
            f << report.dump(2) << "\n";
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
