#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "analysis.hpp"
#include "errors.hpp"
#include "scenario_io.hpp"

using namespace qpma;

namespace {

IncidenceAssignment assignment(std::initializer_list<std::uint32_t> bits,
                               std::size_t blocks = 1) {
    IncidenceAssignment a;
    for (std::uint32_t b : bits) {
        a.push_back(IncidenceVector(blocks, b));
    }
    return a;
}

Scenario tampered_example(ByzantineSpec::Mode mode, std::uint32_t delta = 1) {
    Scenario sc = example_scenario();
    ByzantineSpec byz;
    byz.party = 0;
    byz.mode = mode;
    byz.blocks = {0};
    byz.phase_delta = delta;
    sc.byzantine = byz;
    return sc;
}

} // namespace

TEST_CASE("pad-averaged eavesdropper states are indistinguishable") {
    // Worked pair: members (1,1,.) vs (0,0,.) with every intercept choice.
    const std::vector<IncidenceAssignment> pair = {assignment({1, 1, 0}),
                                                   assignment({0, 0, 0})};
    CHECK(verify_security(3, 1, 3, 0, pair, {1}) < 1e-10);
    CHECK(verify_security(3, 1, 3, 0, pair, {2}) < 1e-10);
    CHECK(verify_security(3, 1, 3, 0, pair, {1, 2}) < 1e-10);

    // Identical assignments trivially coincide.
    const std::vector<IncidenceAssignment> same = {assignment({1, 0, 1}),
                                                   assignment({1, 0, 1})};
    CHECK(verify_security(3, 1, 3, 0, same, {1, 2}) == 0.0);

    // Leader elsewhere, K = 2, exhaustive small pairs.
    const std::vector<IncidenceAssignment> wide = {
        {{1, 1}, {0, 1}, {1, 0}}, {{0, 0}, {1, 0}, {0, 1}}};
    CHECK(verify_security(3, 2, 3, 2, wide, {0, 1}) < 1e-10);
}

TEST_CASE("security checks reject malformed intercepts") {
    const std::vector<IncidenceAssignment> pair = {assignment({1, 1, 0}),
                                                   assignment({0, 0, 0})};
    CHECK_THROWS_AS(verify_security(3, 1, 3, 0, pair, {0}), ValidationError);
    CHECK_THROWS_AS(verify_security(3, 1, 3, 0, pair, {}), ValidationError);
    CHECK_THROWS_AS(verify_security(3, 1, 4, 0, pair, {1}), ValidationError);
    CHECK_THROWS_AS(
        verify_security(3, 1, 3, 0, {assignment({1, 1, 0})}, {1}),
        ValidationError);
}

TEST_CASE("privacy posteriors match the counting posterior") {
    // One member among three parties: seeing outcome 1 points at each party
    // with probability 1/3.
    const PrivacyPosteriors one = verify_privacy(3, 1, 3, 0.5, 0, 0, 1);
    REQUIRE(one.conditioning_possible);
    CHECK(one.from_protocol == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(one.from_sum == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // P > N: outcome N forces every party in, outcome 0 forces every party
    // out.
    const PrivacyPosteriors all = verify_privacy(3, 1, 5, 0.5, 1, 0, 3);
    REQUIRE(all.conditioning_possible);
    CHECK(all.from_protocol == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(all.from_sum == doctest::Approx(1.0).epsilon(1e-12));

    const PrivacyPosteriors none = verify_privacy(3, 1, 5, 0.5, 1, 0, 0);
    REQUIRE(none.conditioning_possible);
    CHECK(none.from_protocol == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(none.from_sum == doctest::Approx(0.0).epsilon(1e-12));

    // P > N leaves the labels in (N, P) unreachable.
    CHECK(!verify_privacy(3, 1, 5, 0.5, 0, 0, 4).conditioning_possible);
}

TEST_CASE("privacy posteriors agree across the q and (k,l,m) grid") {
    for (double q : {0.25, 0.5, 0.75}) {
        for (std::size_t k = 1; k <= 2; ++k) {
            for (std::size_t party = 0; party < 3; ++party) {
                for (std::size_t element = 0; element < k; ++element) {
                    for (std::uint32_t m = 0; m < 3; ++m) {
                        const PrivacyPosteriors post =
                            verify_privacy(3, k, 3, q, party, element, m);
                        REQUIRE(post.conditioning_possible);
                        CHECK(std::abs(post.from_protocol - post.from_sum) <
                              1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("privacy guard rejects oversized enumerations") {
    CHECK_THROWS_AS(verify_privacy(5, 5, 5, 0.5, 0, 0, 0), GuardError);
    CHECK_THROWS_AS(verify_privacy(3, 1, 3, 1.5, 0, 0, 0), ValidationError);
    CHECK_THROWS_AS(verify_privacy(3, 1, 3, 0.5, 3, 0, 0), ValidationError);
}

TEST_CASE("exhaustive correctness over small grids") {
    const CorrectnessResult small = verify_correctness_exhaustive(2, 2, 2);
    CHECK(small.pass);
    CHECK(small.configurations == 16);
    CHECK(small.label_mismatches == 0);
    CHECK(small.max_probability_error < 1e-10);

    const CorrectnessResult wrap = verify_correctness_exhaustive(3, 1, 3);
    CHECK(wrap.pass);
    CHECK(wrap.configurations == 8);

    CHECK_THROWS_AS(verify_correctness_exhaustive(5, 4, 5), GuardError);
}

TEST_CASE("all parties holding an element wraps to zero when P = N") {
    Scenario sc;
    sc.parties = 3;
    sc.leader = 0;
    sc.universe = {"x"};
    sc.party_sets = std::vector<std::vector<std::string>>{{"x"}, {"x"}, {"x"}};
    const RunTrace trace = execute(sc);
    CHECK(trace.outcomes[0].label == 0);
    CHECK(trace.report.per_element[0].refined == 3);
}

TEST_CASE("wrong-phase tampering stays invisible and shifts the outcome") {
    const Scenario sc = tampered_example(ByzantineSpec::Mode::WrongPhase, 1);
    const RunTrace trace = execute(sc);
    // Block 0 (element a) reads 2+1 = 0 mod 3 instead of 2; never flagged.
    CHECK(!trace.outcomes[0].byzantine);
    CHECK(trace.outcomes[0].label == 0);
    CHECK(trace.outcomes[1].label == 1); // untouched blocks stay correct

    const ByzantineStats stats = byzantine_experiment(sc, 300);
    CHECK(stats.detection_rate == 0.0);
    CHECK(stats.misreport_rate == 1.0);
    CHECK(stats.mean_exact_detection < 1e-12);
}

TEST_CASE("identity phase tamper is a no-op") {
    const Scenario sc = tampered_example(ByzantineSpec::Mode::WrongPhase, 0);
    const ByzantineStats stats = byzantine_experiment(sc, 50);
    CHECK(stats.detection_rate == 0.0);
    CHECK(stats.misreport_rate == 0.0);
}

TEST_CASE("shift tampering is always detected") {
    const Scenario sc = tampered_example(ByzantineSpec::Mode::Shift);
    const ByzantineStats stats = byzantine_experiment(sc, 300);
    CHECK(stats.detection_rate == 1.0);
    CHECK(stats.mean_exact_detection == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("haar tampering is detected at the projector rate") {
    const Scenario sc = tampered_example(ByzantineSpec::Mode::RandomUnitary);
    const std::size_t trials = 800;
    const ByzantineStats stats = byzantine_experiment(sc, trials);
    CHECK(stats.mean_exact_detection > 0.0);
    CHECK(stats.mean_exact_detection < 1.0);
    CHECK(std::abs(stats.detection_rate - stats.mean_exact_detection) <
          5.0 / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("byzantine experiment requires a tamper spec") {
    CHECK_THROWS_AS(byzantine_experiment(example_scenario(), 10),
                    ValidationError);
}

TEST_CASE("entropy checks recover the reference values") {
    for (std::uint32_t p : {2u, 3u, 5u}) {
        const EntropyChecks checks = verify_entropy_checks(p, 3);
        CHECK(std::abs(checks.pure_fourier) < 1e-10);
        CHECK(std::abs(checks.fourier_mixture - std::log2(double(p))) < 1e-10);
        CHECK(std::abs(checks.single_site_reduction - std::log2(double(p))) <
              1e-10);
    }
}

TEST_CASE("the verification grid passes and renders a table") {
    VerifyOptions options;
    options.max_parties = 2;
    options.max_blocks = 1;
    options.max_prime = 2;
    options.trials = 100;
    const VerifyReport report = run_verification_grid(options);
    CHECK(report.all_pass());
    CHECK(!report.rows.empty());

    const std::string table = render_verification(report);
    CHECK(table.find("qpma verification v1") != std::string::npos);
    CHECK(table.find("result = pass") != std::string::npos);
    CHECK(table.find("FAIL") == std::string::npos);
}
