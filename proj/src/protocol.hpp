#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "field.hpp"
#include "state.hpp"

namespace qpma {

// 0/1 membership marks over the ordered universal set, viewed in Z_P. The
// summation variant reuses the same shape with arbitrary values in [0, P).
using IncidenceVector = std::vector<std::uint32_t>;

// Uniform one-time pad in F_P^K, pre-shared between a party and the leader.
using RandomPad = std::vector<std::uint32_t>;

struct ByzantineSpec {
    enum class Mode {
        // Applies Z^{intended + phase_delta} instead of the protocol phase.
        WrongPhase,
        // Applies the cyclic shift |k> -> |k+1 mod P> on its site.
        Shift,
        // Applies a seeded Haar-random single-qudit unitary on its site.
        RandomUnitary,
    };

    std::size_t party = 0;
    Mode mode = Mode::WrongPhase;
    std::vector<std::size_t> blocks;
    std::uint32_t phase_delta = 1; // WrongPhase only; tamper when != 0 mod P
};

enum class ScenarioMode { Membership, Summation };

// Full description of one protocol run: parties, element universe, per-party
// sets (explicit or generated), leader, optional prime override, seeds and
// optional tampering.
struct Scenario {
    ScenarioMode mode = ScenarioMode::Membership;
    std::size_t parties = 0;
    std::size_t leader = 0;
    std::uint64_t master_seed = 0;
    bool leader_encodes = true;
    std::optional<std::uint32_t> prime_override;
    std::optional<ByzantineSpec> byzantine;

    // Membership: ordered universal set, plus either explicit sets or a
    // Bernoulli membership probability for seeded generation.
    std::vector<std::string> universe;
    std::optional<std::vector<std::vector<std::string>>> party_sets;
    std::optional<double> membership_q;

    // Summation: one length-K input vector over [0, P) per party.
    std::optional<std::vector<std::vector<std::uint32_t>>> inputs;

    // Throws ValidationError naming the violated invariant.
    void validate() const;

    std::uint32_t effective_prime() const;
    std::size_t block_count() const;
};

// Bijection element label <-> [K], stable in universe order.
std::map<std::string, std::size_t> canonical_ordering(
    const std::vector<std::string>& universe);

IncidenceVector incidence(const std::vector<std::string>& party_set,
                          const std::map<std::string, std::size_t>& ordering);

// One per-element block of N qudits. Starts structured (GHZ subspace) and is
// promoted to the dense engine only when a non-phase tamper operation hits it.
class BlockRegister {
public:
    BlockRegister(std::uint32_t prime, std::size_t sites);

    void apply_phase(std::size_t site, std::uint32_t power);
    void apply_shift(std::size_t site);
    void apply_unitary(std::size_t site, const Eigen::MatrixXcd& u);

    bool structured() const;
    const PhaseBlockState& phase_state() const;
    DenseBlockState dense() const;

    // Fourier index m when the register holds exactly phi_m. Exact for the
    // structured engine; within 1e-12 overlap for the dense engine.
    std::optional<std::uint32_t> label() const;

private:
    void promote();

    std::variant<PhaseBlockState, DenseBlockState> state_;
};

// The quantum system a party transmits to the leader, realized in simulation
// as the per-block phase powers it applied (plus a tamper marker).
struct AnswerMessage {
    std::size_t party = 0;
    std::vector<std::uint32_t> powers; // applied power per block
    bool tampered = false;
    std::size_t qudit_count = 0; // = K
};

struct SetupState {
    std::vector<BlockRegister> blocks; // K registers, all phi_0
    std::vector<RandomPad> pads;       // per party; all-zero for the leader
};

// Shared state + pads. Throws ValidationError on a composite or undersized
// prime override.
SetupState setup(std::size_t parties, std::size_t blocks, std::uint32_t prime,
                 std::size_t leader, std::uint64_t master_seed);

// Honest encoding: applies Z^{(pad + row)_l} at the party's site on every
// block and returns the answer carrying the party's qudits.
AnswerMessage encode_party(std::size_t party, const IncidenceVector& row,
                           const RandomPad& pad,
                           std::vector<BlockRegister>& blocks,
                           const PrimeField& field);

// Pad removal: applies Z^{-(pad_k)_l} for every non-leader party k on every
// block. Requires one answer per non-leader party.
void leader_decode(const std::vector<AnswerMessage>& answers,
                   const std::vector<RandomPad>& pads, std::size_t leader,
                   std::vector<BlockRegister>& blocks, const PrimeField& field);

std::vector<MeasurementOutcome> measure_blocks(
    const std::vector<BlockRegister>& blocks, const BlockPvm& pvm,
    RandomStream& rng);

struct ElementReport {
    std::string label;
    MeasurementOutcome outcome;
    bool leader_member = false;          // (E_L)_l, or leader input != 0
    std::optional<std::uint32_t> refined; // count after leader refinement
};

struct AggregationReport {
    ScenarioMode mode = ScenarioMode::Membership;
    std::size_t parties = 0;
    std::size_t blocks = 0;
    std::uint32_t prime = 0;
    std::size_t leader = 0;
    bool leader_encodes = true;
    std::uint64_t master_seed = 0;
    std::vector<std::string> decoded_labels; // "phi_m" or "non-fourier"
    std::vector<ElementReport> per_element;
    std::size_t downloaded_qudits = 0; // (N-1) * K
    double download_cost_bits = 0.0;
    double per_element_cost_bits = 0.0;
    std::uint64_t transcript_digest = 0;
};

// Everything a run produced, for verification code that needs more than the
// report (final states, pads, per-party rows).
struct RunTrace {
    std::uint32_t prime = 0;
    std::vector<IncidenceVector> rows; // incidence vectors or summation inputs
    std::vector<RandomPad> pads;
    std::vector<AnswerMessage> answers;
    std::vector<BlockRegister> decoded; // pre-measurement
    std::vector<MeasurementOutcome> outcomes;
    AggregationReport report;
};

// Full pipeline: setup -> encode -> transmit -> decode -> measure -> report.
RunTrace execute(const Scenario& scenario);

AggregationReport run_qpma(const Scenario& scenario);

// Summation variant: per-block outcome is sum of party inputs mod P.
AggregationReport run_summation(const Scenario& scenario);

// (N-1) * K * log2(P).
double download_cost_bits(std::size_t parties, std::size_t blocks,
                          std::uint32_t prime);

// (N-1) * log2(P).
double per_element_cost_bits(std::size_t parties, std::uint32_t prime);

} // namespace qpma
