// Acceptance suite: one test case per criterion, each printing a pass/fail
// line with its sub-checks. Scales and tolerances are fixed here, not tuned.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "zrp/verify.hpp"

using zrp::verify::CriterionResult;
using zrp::verify::VerifyOptions;

namespace {

VerifyOptions opts() { return VerifyOptions{}; }

void report(const CriterionResult& r) {
    std::printf("%s  (%.1f s)\n", r.summary().c_str(), r.seconds);
    for (const auto& n : r.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(r.pass, r.summary());
}

}  // namespace

TEST_CASE("criterion 1: constants") { report(zrp::verify::criterion_1(opts())); }
TEST_CASE("criterion 2: oracle soundness") { report(zrp::verify::criterion_2(opts())); }
TEST_CASE("criterion 3: sampler exactness") { report(zrp::verify::criterion_3(opts())); }
TEST_CASE("criterion 4: dynamics stationarity") { report(zrp::verify::criterion_4(opts())); }
TEST_CASE("criterion 5: excess-mass LLN") { report(zrp::verify::criterion_5(opts())); }
TEST_CASE("criterion 6: critical Bernoulli mixture") { report(zrp::verify::criterion_6(opts())); }
TEST_CASE("criterion 7: fluctuation laws") { report(zrp::verify::criterion_7(opts())); }
TEST_CASE("criterion 8: Nagaev vs oracle") { report(zrp::verify::criterion_8(opts())); }
TEST_CASE("criterion 9: Doney split vs oracle") { report(zrp::verify::criterion_9(opts())); }
TEST_CASE("criterion 10: bulk fluctuations") { report(zrp::verify::criterion_10(opts())); }
