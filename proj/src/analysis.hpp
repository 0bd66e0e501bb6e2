#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "protocol.hpp"

namespace qpma {

// One candidate assignment of per-party rows (N vectors of length K).
using IncidenceAssignment = std::vector<IncidenceVector>;

// Eavesdropper indistinguishability. For every block and every pair of
// assignments, computes the intercepted parties' reduced density matrix of
// the encoded state averaged exactly over all pad values, and returns the
// maximum trace distance found. The scheme is secure iff this is 0.
// intercepted must be a nonempty set of non-leader parties.
double verify_security(std::size_t parties, std::size_t blocks,
                       std::uint32_t prime, std::size_t leader,
                       const std::vector<IncidenceAssignment>& assignments,
                       const std::vector<std::size_t>& intercepted,
                       bool leader_encodes = true);

struct PrivacyPosteriors {
    // False when the conditioning event has probability zero under the prior.
    bool conditioning_possible = false;
    double from_protocol = 0.0; // P(row bit = 1 | measurement outcome at block)
    double from_sum = 0.0;      // P(row bit = 1 | sum of column mod P)
};

// Leader-side privacy: enumerates all 2^{NK} incidence configurations under
// an iid Bernoulli(q) prior, runs the protocol on each, and compares the
// posterior of (E_party)_element conditioned on the measurement outcome with
// the posterior conditioned on the column sum mod P. Guard: N*K <= 20.
PrivacyPosteriors verify_privacy(std::size_t parties, std::size_t blocks,
                                 std::uint32_t prime, double q,
                                 std::size_t party, std::size_t element,
                                 std::uint32_t outcome);

struct CorrectnessResult {
    bool pass = false;
    std::size_t configurations = 0;
    std::size_t label_mismatches = 0;
    double max_probability_error = 0.0; // max |1 - P(correct outcome)|
};

// Runs the protocol on every incidence configuration and checks that every
// block reads sum mod P, with dense-oracle probability 1 within 1e-10.
// Guard: 2^{NK} <= 2^16.
CorrectnessResult verify_correctness_exhaustive(std::size_t parties,
                                                std::size_t blocks,
                                                std::uint32_t prime);

struct ByzantineStats {
    std::size_t trials = 0;
    double detection_rate = 0.0;  // trials flagged BYZANTINE on a tampered block
    double misreport_rate = 0.0;  // in-subspace outcome != true sum mod P
    double mean_exact_detection = 0.0; // mean exact per-trial flag probability
};

// Repeats the tampered protocol run with per-trial seeds. The scenario must
// carry a ByzantineSpec.
ByzantineStats byzantine_experiment(const Scenario& scenario,
                                    std::size_t trials);

struct EntropyChecks {
    std::uint32_t prime = 0;
    double pure_fourier = 0.0;          // expect 0
    double fourier_mixture = 0.0;       // expect log2 P
    double single_site_reduction = 0.0; // expect log2 P
};

EntropyChecks verify_entropy_checks(std::uint32_t prime, std::size_t sites);

struct VerifyOptions {
    std::size_t max_parties = 3;
    std::size_t max_blocks = 2;
    std::uint32_t max_prime = 3;
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    std::vector<double> qs = {0.25, 0.5, 0.75};
};

struct VerifyRow {
    std::string case_id;
    std::string quantity; // an absolute deviation, compared against tolerance
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool all_pass() const;
};

// Runs every analysis verifier over the bounded grid.
VerifyReport run_verification_grid(const VerifyOptions& options);

std::string render_verification(const VerifyReport& report);

} // namespace qpma
