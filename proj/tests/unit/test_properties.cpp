// Smaller, differently seeded runs of the property suites that the
// acceptance gate runs at full size.

#include "sparsense/verify.hpp"

#include <catch_amalgamated.hpp>

using namespace sparsense;

namespace {

void require_pass(const verify::SuiteResult& r) {
    INFO(r.name << ": " << r.cases << " cases, " << r.detail);
    CHECK(r.cases > 0);
    CHECK(r.failures == 0);
}

} // namespace

TEST_CASE("exact-budget recovery inside the q^2/2 ball") {
    require_pass(verify::theorem2_suite(20000, 101));
    require_pass(verify::theorem2_suite(20000, 102));
}

TEST_CASE("exact-budget bound is tight") { require_pass(verify::theorem2_tightness(200, 103)); }

TEST_CASE("relaxed-budget containment") {
    require_pass(verify::theorem3_suite(20000, 104));
    require_pass(verify::theorem3_suite(20000, 105));
}

TEST_CASE("relaxed-budget bound is tight") { require_pass(verify::theorem3_tightness(201, 106)); }

TEST_CASE("hard threshold matches brute force") { require_pass(verify::hard_threshold_suite(5000, 107)); }

TEST_CASE("sensing identity for small N") { require_pass(verify::sensing_identity_suite(24)); }

TEST_CASE("sampling statistics") { require_pass(verify::sampling_statistics_suite(108)); }

TEST_CASE("SZA bias on a short run") {
    verify::BiasStudy study;
    study.realizations = 200;
    study.seed = 109;
    const auto rep = verify::sza_bias_study(study);
    require_pass(rep.result);
    CHECK(rep.mean_error.size() == 32);
}
