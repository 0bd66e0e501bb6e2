#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "errors.hpp"
#include "field.hpp"
#include "rng.hpp"
#include "state.hpp"

using namespace qpma;

namespace {

double max_amplitude_gap(const DenseBlockState& a, const DenseBlockState& b) {
    REQUIRE(a.dimension() == b.dimension());
    double gap = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        gap = std::max(gap, std::abs(a.amplitude(i) - b.amplitude(i)));
    }
    return gap;
}

} // namespace

TEST_CASE("psi is the uniform GHZ superposition") {
    const DenseBlockState psi = make_psi(3, 3);
    const double amp = 1.0 / std::sqrt(3.0);
    // |000>, |111>, |222> sit at indices 0, 13, 26.
    CHECK(std::abs(psi.amplitude(0) - amp) < 1e-15);
    CHECK(std::abs(psi.amplitude(13) - amp) < 1e-15);
    CHECK(std::abs(psi.amplitude(26) - amp) < 1e-15);
    double off_support = 0.0;
    for (std::size_t i = 0; i < psi.dimension(); ++i) {
        if (i != 0 && i != 13 && i != 26) {
            off_support += std::abs(psi.amplitude(i));
        }
    }
    CHECK(off_support == 0.0);

    const DenseBlockState single = make_psi(2, 1);
    CHECK(std::abs(single.amplitude(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(single.amplitude(1) - 1.0 / std::sqrt(2.0)) < 1e-15);

    double norm = 0.0;
    for (std::size_t i = 0; i < psi.dimension(); ++i) {
        norm += std::norm(psi.amplitude(i));
    }
    CHECK(std::abs(norm - 1.0) < 1e-12);
}

TEST_CASE("phi_m carries omega^{mk} phases on the GHZ strings") {
    const PrimeField f3(3);
    const DenseBlockState phi1 = make_phi(3, 3, 1);
    const double scale = 1.0 / std::sqrt(3.0);
    CHECK(std::abs(phi1.amplitude(0) - scale) < 1e-15);
    CHECK(std::abs(phi1.amplitude(13) - scale * f3.omega(1)) < 1e-15);
    CHECK(std::abs(phi1.amplitude(26) - scale * f3.omega(2)) < 1e-15);

    CHECK(max_amplitude_gap(make_phi(3, 3, 0), make_psi(3, 3)) == 0.0);

    // omega^4 = omega^1 on |222>.
    const DenseBlockState phi2 = make_phi(3, 3, 2);
    CHECK(std::abs(phi2.amplitude(26) - scale * f3.omega(1)) < 1e-15);
}

TEST_CASE("clock_apply realizes the phase encoding") {
    const DenseBlockState psi = make_psi(3, 3);
    CHECK(max_amplitude_gap(clock_apply(psi, 0, 1), make_phi(3, 3, 1)) < 1e-15);
    CHECK(max_amplitude_gap(clock_apply(psi, 1, 0), psi) == 0.0);
    // Blind to which party applied the phase.
    CHECK(max_amplitude_gap(clock_apply(psi, 2, 1), clock_apply(psi, 0, 1)) <
          1e-15);
    CHECK_THROWS_AS(clock_apply(psi, 3, 1), ValidationError);
}

TEST_CASE("clock_apply preserves the 2-norm") {
    RandomStream rng(11);
    for (std::uint32_t p : {2u, 3u, 5u}) {
        DenseBlockState state = make_psi(p, 2);
        for (int i = 0; i < 20; ++i) {
            state = clock_apply(state, rng.uniform_below(2),
                                rng.uniform_below(p));
            double norm = 0.0;
            for (std::size_t j = 0; j < state.dimension(); ++j) {
                norm += std::norm(state.amplitude(j));
            }
            CHECK(std::abs(norm - 1.0) < 1e-13);
        }
    }
}

TEST_CASE("site-blindness holds on arbitrary GHZ-subspace states") {
    RandomStream rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::uint32_t> exps(3);
        for (auto& e : exps) {
            e = rng.uniform_below(3);
        }
        const DenseBlockState ghz =
            structured_to_dense(PhaseBlockState(3, 3, exps));
        const std::uint32_t power = rng.uniform_below(3);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(max_amplitude_gap(clock_apply(ghz, i, power),
                                        clock_apply(ghz, j, power)) < 1e-15);
            }
        }
    }
}

TEST_CASE("per-site powers collapse to their sum at one site") {
    RandomStream rng(37);
    for (std::uint32_t p : {2u, 3u, 5u}) {
        for (std::size_t n : {2, 3}) {
            for (int trial = 0; trial < 25; ++trial) {
                std::vector<std::uint32_t> powers(n);
                std::uint32_t total = 0;
                for (auto& f : powers) {
                    f = rng.uniform_below(p);
                    total = (total + f) % p;
                }
                DenseBlockState separate = make_psi(p, n);
                for (std::size_t site = 0; site < n; ++site) {
                    separate = clock_apply(separate, site, powers[site]);
                }
                const DenseBlockState lumped =
                    clock_apply(make_psi(p, n), 0, total);
                CHECK(max_amplitude_gap(separate, lumped) < 1e-14);
            }
        }
    }
}

TEST_CASE("structured_apply updates exponents exactly") {
    const PhaseBlockState psi(3, 3);
    const PhaseBlockState stepped = structured_apply(psi, 0, 1);
    CHECK(stepped.exponents() == std::vector<std::uint32_t>{0, 1, 2});

    CHECK(structured_apply(psi, 1, 0).exponents() == psi.exponents());
    CHECK_THROWS_AS(structured_apply(psi, 5, 1), ValidationError);

    // Exponent additivity: a then b equals a+b mod P.
    RandomStream rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t a = rng.uniform_below(3);
        const std::uint32_t b = rng.uniform_below(3);
        const PhaseBlockState two_steps =
            structured_apply(structured_apply(psi, 0, a), 2, b);
        const PhaseBlockState one_step = structured_apply(psi, 1, (a + b) % 3);
        CHECK(two_steps.exponents() == one_step.exponents());
    }
}

TEST_CASE("structured_to_dense bridges the engines") {
    CHECK(max_amplitude_gap(structured_to_dense(PhaseBlockState(3, 3)),
                            make_psi(3, 3)) == 0.0);
    for (std::uint32_t m = 0; m < 5; ++m) {
        CHECK(max_amplitude_gap(
                  structured_to_dense(PhaseBlockState::fourier(5, 2, m)),
                  make_phi(5, 2, m)) == 0.0);
    }
    const DenseBlockState d =
        structured_to_dense(PhaseBlockState(3, 2, {0, 2, 1}));
    CHECK(std::abs(std::abs(inner(d, d)) - 1.0) < 1e-14);
}

TEST_CASE("engine equivalence on random phase sequences") {
    RandomStream rng(101);
    for (std::uint32_t p : {2u, 3u, 5u}) {
        for (std::size_t n : {1, 2, 3}) {
            for (int seq = 0; seq < 50; ++seq) {
                PhaseBlockState structured(p, n);
                DenseBlockState dense = make_psi(p, n);
                const std::size_t length = 1 + rng.uniform_below(15);
                for (std::size_t i = 0; i < length; ++i) {
                    const std::size_t site =
                        rng.uniform_below(static_cast<std::uint32_t>(n));
                    const std::uint32_t power = rng.uniform_below(p);
                    structured = structured_apply(structured, site, power);
                    dense = clock_apply(dense, site, power);
                }
                CHECK(max_amplitude_gap(structured_to_dense(structured),
                                        dense) < 1e-12);
            }
        }
    }
}

TEST_CASE("fourier_label recognizes exactly the phi_m exponent patterns") {
    for (std::uint32_t m = 0; m < 5; ++m) {
        const auto label = fourier_label(PhaseBlockState::fourier(5, 3, m));
        REQUIRE(label.has_value());
        CHECK(*label == m);
    }
    CHECK(!fourier_label(PhaseBlockState(3, 2, {0, 2, 2})).has_value());
    // e_0 != 0 cannot come from phase applications on psi.
    CHECK(!fourier_label(PhaseBlockState(3, 2, {1, 1, 1})).has_value());
}

TEST_CASE("fourier states are orthonormal") {
    for (std::uint32_t p : {2u, 3u, 5u}) {
        for (std::size_t n : {1, 2, 3}) {
            for (std::uint32_t m = 0; m < p; ++m) {
                for (std::uint32_t k = 0; k < p; ++k) {
                    const Complex overlap =
                        inner(make_phi(p, n, m), make_phi(p, n, k));
                    const double expected = m == k ? 1.0 : 0.0;
                    CHECK(std::abs(overlap - expected) < 1e-13);
                }
            }
        }
    }
    CHECK_THROWS_AS(inner(make_psi(2, 2), make_psi(3, 2)), ValidationError);
}

TEST_CASE("the block PVM satisfies the projector axioms") {
    const BlockPvm pvm(3, 3);
    CHECK(pvm.label_count() == 4);
    CHECK(pvm.rank(0) == 1);
    CHECK(pvm.rank(pvm.byzantine_index()) == 24); // 27 - 3

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(27, 27);
    for (std::size_t label = 0; label < pvm.label_count(); ++label) {
        const Eigen::MatrixXcd proj = pvm.projector(label);
        CHECK((proj * proj - proj).cwiseAbs().maxCoeff() < 1e-12);
        sum += proj;
    }
    CHECK((sum - Eigen::MatrixXcd::Identity(27, 27)).cwiseAbs().maxCoeff() <
          1e-12);

    // For N = 1 the Fourier states span everything.
    const BlockPvm qubit(2, 1);
    CHECK(qubit.rank(qubit.byzantine_index()) == 0);
    CHECK(qubit.probability(make_psi(2, 1), qubit.byzantine_index()) == 0.0);
}

TEST_CASE("measurement reads Fourier labels with certainty") {
    const BlockPvm pvm(3, 3);
    RandomStream rng(7);

    const MeasurementOutcome phi2 = measure(make_phi(3, 3, 2), pvm, rng);
    CHECK(!phi2.byzantine);
    CHECK(phi2.label == 2);
    CHECK(phi2.probability == doctest::Approx(1.0).epsilon(1e-12));

    const MeasurementOutcome psi = measure(make_psi(3, 3), pvm, rng);
    CHECK(!psi.byzantine);
    CHECK(psi.label == 0);

    const MeasurementOutcome off = measure(
        DenseBlockState::basis(3, 3, {0, 0, 1}), pvm, rng);
    CHECK(off.byzantine);
    CHECK(off.probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measurement is deterministic for a fixed seed") {
    const BlockPvm pvm(2, 2);
    // |00> measured in the Fourier basis is a fair coin between phi_0, phi_1.
    const DenseBlockState state = DenseBlockState::basis(2, 2, {0, 0});
    std::vector<std::uint32_t> first, second;
    for (int round = 0; round < 2; ++round) {
        RandomStream rng(99);
        std::vector<std::uint32_t>& out = round == 0 ? first : second;
        for (int i = 0; i < 50; ++i) {
            const MeasurementOutcome o = measure(state, pvm, rng);
            CHECK(!o.byzantine);
            out.push_back(o.label);
        }
    }
    CHECK(first == second);
}

TEST_CASE("measurement samples match projector weights") {
    const BlockPvm pvm(2, 1);
    // (|0> + |1>)/sqrt(2) = phi_0 exactly: deterministic label 0.
    RandomStream rng(3);
    for (int i = 0; i < 20; ++i) {
        CHECK(measure(make_psi(2, 1), pvm, rng).label == 0);
    }
    // A computational basis state splits 50/50 between phi_0 and phi_1.
    std::size_t ones = 0;
    const DenseBlockState zero = DenseBlockState::basis(2, 1, {0});
    for (int i = 0; i < 2000; ++i) {
        ones += measure(zero, pvm, rng).label;
    }
    CHECK(ones > 800);
    CHECK(ones < 1200);
}

TEST_CASE("partial traces of GHZ states are maximally mixed") {
    for (std::uint32_t m = 0; m < 3; ++m) {
        const DensityMatrix rho = partial_trace(make_phi(3, 3, m), {0});
        CHECK((rho.matrix() - Eigen::MatrixXcd::Identity(3, 3) / 3.0)
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
        CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-12);
    }

    const DensityMatrix kept =
        partial_trace(DenseBlockState::basis(2, 2, {0, 1}), {0});
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 2);
    expected(0, 0) = 1.0;
    CHECK((kept.matrix() - expected).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(partial_trace(make_psi(2, 2), {}), ValidationError);
    CHECK_THROWS_AS(partial_trace(make_psi(2, 2), {0, 0}), ValidationError);
    CHECK_THROWS_AS(partial_trace(make_psi(2, 2), {2}), ValidationError);

    // Two kept sites of a three-site GHZ: diagonal on the doubled strings.
    const DensityMatrix pair = partial_trace(make_phi(3, 3, 1), {0, 2});
    for (std::uint32_t k = 0; k < 3; ++k) {
        CHECK(std::abs(pair.matrix()(k * 3 + k, k * 3 + k) - 1.0 / 3.0) <
              1e-14);
    }
    CHECK(std::abs(pair.matrix()(0, 4)) == 0.0); // no coherence survives
}

TEST_CASE("mix_ensemble forms convex mixtures") {
    const DenseBlockState phi1 = make_phi(3, 2, 1);
    const DensityMatrix pure = mix_ensemble({{1.0, phi1}});
    Eigen::VectorXcd v(9);
    for (std::size_t i = 0; i < 9; ++i) {
        v(i) = phi1.amplitude(i);
    }
    CHECK((pure.matrix() - v * v.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    std::vector<std::pair<double, DenseBlockState>> fourier;
    for (std::uint32_t m = 0; m < 3; ++m) {
        fourier.emplace_back(1.0 / 3.0, make_phi(3, 2, m));
    }
    const DensityMatrix mixed = mix_ensemble(fourier);
    // The Fourier phases average to zero off the diagonal.
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(9, 9);
    expected(0, 0) = expected(4, 4) = expected(8, 8) = 1.0 / 3.0;
    CHECK((mixed.matrix() - expected).cwiseAbs().maxCoeff() < 1e-14);

    const DensityMatrix coin =
        mix_ensemble({{0.5, DenseBlockState::basis(2, 1, {0})},
                      {0.5, DenseBlockState::basis(2, 1, {1})}});
    CHECK((coin.matrix() - Eigen::MatrixXcd::Identity(2, 2) / 2.0)
              .cwiseAbs()
              .maxCoeff() < 1e-14);

    CHECK_THROWS_AS(mix_ensemble({{0.7, phi1}}), ValidationError);
    CHECK_THROWS_AS(mix_ensemble({{-0.5, phi1}, {1.5, phi1}}),
                    ValidationError);
}

TEST_CASE("trace distance separates exactly the distinct states") {
    const DensityMatrix rho = partial_trace(make_psi(3, 2), {0});
    CHECK(trace_distance(rho, rho) == 0.0);

    const DensityMatrix zero =
        mix_ensemble({{1.0, DenseBlockState::basis(2, 1, {0})}});
    const DensityMatrix one =
        mix_ensemble({{1.0, DenseBlockState::basis(2, 1, {1})}});
    CHECK(trace_distance(zero, one) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(trace_distance(rho, zero), ValidationError);
}

TEST_CASE("entropy of pure and mixed reference states") {
    const DensityMatrix pure = mix_ensemble({{1.0, make_phi(3, 2, 1)}});
    CHECK(std::abs(von_neumann_entropy(pure)) < 1e-10);

    const DensityMatrix reduced = partial_trace(make_psi(5, 2), {1});
    CHECK(std::abs(von_neumann_entropy(reduced) - std::log2(5.0)) < 1e-10);
}

TEST_CASE("shift and haar tampering leave the GHZ subspace") {
    const DenseBlockState shifted = shift_apply(make_phi(3, 3, 1), 1);
    const BlockPvm pvm(3, 3);
    CHECK(pvm.probability(shifted, pvm.byzantine_index()) ==
          doctest::Approx(1.0).epsilon(1e-14));

    // Shift on a basis string increments exactly the targeted digit.
    const DenseBlockState bumped =
        shift_apply(DenseBlockState::basis(3, 2, {2, 1}), 0);
    CHECK(std::abs(bumped.amplitude(1) - 1.0) < 1e-15); // |01>

    RandomStream rng(17);
    const Eigen::MatrixXcd u = haar_unitary(3, rng);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    const DenseBlockState rotated = site_unitary_apply(make_phi(3, 3, 0), 0, u);
    double norm = 0.0;
    for (std::size_t i = 0; i < rotated.dimension(); ++i) {
        norm += std::norm(rotated.amplitude(i));
    }
    CHECK(std::abs(norm - 1.0) < 1e-12);

    CHECK_THROWS_AS(
        site_unitary_apply(make_psi(3, 2), 0, Eigen::MatrixXcd::Zero(3, 3)),
        ValidationError);
}

TEST_CASE("dimension guards reject oversized blocks") {
    CHECK_THROWS_AS(dense_dimension(7, 9), GuardError); // 7^9 > 10^7
    CHECK_THROWS_AS(make_psi(11, 8), GuardError);
    CHECK_NOTHROW(dense_dimension(5, 9)); // 5^9 < 10^7
}

TEST_CASE("state constructors enforce their invariants") {
    CHECK_THROWS_AS(DenseBlockState(3, 2, std::vector<Complex>(9, 0.0)),
                    ValidationError); // unnormalized
    CHECK_THROWS_AS(DenseBlockState(3, 2, std::vector<Complex>(8, 0.0)),
                    ValidationError); // wrong length
    CHECK_THROWS_AS(PhaseBlockState(3, 2, {0, 1}), ValidationError);
    CHECK_THROWS_AS(PhaseBlockState(3, 2, {0, 1, 5}), ValidationError);
    CHECK_THROWS_AS(DenseBlockState::basis(3, 2, {0, 3}), ValidationError);
}
