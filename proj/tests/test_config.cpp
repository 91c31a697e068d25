#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "zrp/config.hpp"
#include "zrp/runner.hpp"

using namespace zrp;

namespace {

json sample_config_json() {
    return json{{"model", {{"family", "stretched_rates"}, {"lambda", 0.6}, {"b", 2.0}}},
                {"ensemble", {{"L", 64}, {"N", 80}}},
                {"job", "sample-exact"},
                {"replicas", 50},
                {"seed", 424242},
                {"out", "cfg_out"}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("config round trip is the identity") {
    auto cfg = config_from_json(sample_config_json());
    auto j1 = to_json(cfg);
    auto cfg2 = config_from_json(j1);
    auto j2 = to_json(cfg2);
    CHECK(j1 == j2);
    CHECK(config_hash(cfg) == config_hash(cfg2));
}

TEST_CASE("config validation errors carry field context") {
    auto j = sample_config_json();
    j.erase("seed");
    CHECK_THROWS_AS((void)config_from_json(j), ConfigError);

    auto j2 = sample_config_json();
    j2["model"]["family"] = "nonsense";
    CHECK_THROWS_AS((void)config_from_json(j2), ConfigError);

    auto j3 = sample_config_json();
    j3["model"]["b"] = -1.0;
    CHECK_THROWS_AS((void)config_from_json(j3), ConfigError);
}

TEST_CASE("hash distinguishes configs") {
    auto a = config_from_json(sample_config_json());
    auto jb = sample_config_json();
    jb["seed"] = 5;
    auto b = config_from_json(jb);
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("compute job emits the constants bundle") {
    auto dir = std::filesystem::temp_directory_path() / "zrp_cfg_test_compute";
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg;
    cfg.model = {Family::StretchedRates, 2.0, 0.6};
    cfg.L = 1024;
    cfg.n_rule = {"subl", 0.0};
    cfg.job = Job::Compute;
    cfg.out_dir = dir.string();
    auto art = run(cfg);
    CHECK(art.meta["result"].contains("rho_c"));
    CHECK(art.meta["result"].contains("sigma2"));
    CHECK(art.meta["result"].contains("c_lambda"));
    CHECK(art.meta["result"]["N_crit"].get<std::int64_t>() == 1356);
    CHECK(std::filesystem::exists(art.meta_path));
    CHECK(art.meta.contains("regime"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("same config and seed give byte-identical sample output") {
    auto dir1 = std::filesystem::temp_directory_path() / "zrp_cfg_det1";
    auto dir2 = std::filesystem::temp_directory_path() / "zrp_cfg_det2";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    auto cfg = config_from_json(sample_config_json());
    cfg.out_dir = dir1.string();
    run(cfg);
    cfg.out_dir = dir2.string();
    run(cfg);
    CHECK(slurp(dir1 / "samples.csv") == slurp(dir2 / "samples.csv"));
    CHECK(!slurp(dir1 / "samples.csv").empty());
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("oracle job writes the csv law") {
    auto dir = std::filesystem::temp_directory_path() / "zrp_cfg_oracle";
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg;
    cfg.model = {Family::StretchedRates, 2.0, 0.6};
    cfg.L = 16;
    cfg.n_rule = {"fixed", 20.0};
    cfg.job = Job::OracleJob;
    cfg.out_dir = dir.string();
    auto art = run(cfg);
    CHECK(std::filesystem::exists(dir / "oracle.csv"));
    CHECK(std::exp(art.meta["result"]["log_total"].get<double>()) ==
          doctest::Approx(1.0).epsilon(1e-8));
    std::filesystem::remove_all(dir);
}
