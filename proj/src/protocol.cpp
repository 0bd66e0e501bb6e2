#include "protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "digest.hpp"
#include "errors.hpp"

namespace qpma {

namespace {

std::string mode_name(ScenarioMode mode) {
    return mode == ScenarioMode::Membership ? "membership" : "summation";
}

} // namespace

void Scenario::validate() const {
    if (parties < 2) {
        throw ValidationError("parties: must be at least 2");
    }
    if (leader >= parties) {
        throw ValidationError("leader: index out of range");
    }
    if (prime_override) {
        if (!is_prime(*prime_override)) {
            throw ValidationError("prime: " + std::to_string(*prime_override) +
                                  " is not prime");
        }
        if (*prime_override < parties) {
            throw ValidationError("prime: override must be >= parties");
        }
    }
    const std::uint32_t p = effective_prime();

    if (mode == ScenarioMode::Membership) {
        if (inputs) {
            throw ValidationError("input: only valid in summation mode");
        }
        if (universe.empty()) {
            throw ValidationError("universe: must list at least one element");
        }
        canonical_ordering(universe); // rejects duplicate labels
        if (party_sets && membership_q) {
            throw ValidationError(
                "sets: explicit set lines and membership_q are exclusive");
        }
        if (!party_sets && !membership_q) {
            throw ValidationError(
                "sets: provide one set line per party or membership_q");
        }
        if (membership_q && (*membership_q < 0.0 || *membership_q > 1.0)) {
            throw ValidationError("membership_q: must lie in [0, 1]");
        }
        if (party_sets) {
            if (party_sets->size() != parties) {
                throw ValidationError("sets: need exactly one set per party");
            }
            const auto ordering = canonical_ordering(universe);
            for (std::size_t i = 0; i < parties; ++i) {
                std::set<std::string> seen;
                for (const std::string& label : (*party_sets)[i]) {
                    if (!ordering.count(label)) {
                        throw ValidationError("set." + std::to_string(i) +
                                              ": label '" + label +
                                              "' not in universe");
                    }
                    if (!seen.insert(label).second) {
                        throw ValidationError("set." + std::to_string(i) +
                                              ": duplicate label '" + label +
                                              "'");
                    }
                }
            }
        }
    } else {
        if (!universe.empty() || party_sets || membership_q) {
            throw ValidationError(
                "universe/sets: only valid in membership mode");
        }
        if (!inputs) {
            throw ValidationError("input: one input line per party required");
        }
        if (inputs->size() != parties) {
            throw ValidationError("input: need exactly one line per party");
        }
        const std::size_t k = inputs->front().size();
        if (k == 0) {
            throw ValidationError("input: vectors must be nonempty");
        }
        for (std::size_t i = 0; i < parties; ++i) {
            if ((*inputs)[i].size() != k) {
                throw ValidationError("input." + std::to_string(i) +
                                      ": length differs from input.0");
            }
            for (std::uint32_t v : (*inputs)[i]) {
                if (v >= p) {
                    throw ValidationError("input." + std::to_string(i) +
                                          ": value " + std::to_string(v) +
                                          " not in [0, " + std::to_string(p) +
                                          ")");
                }
            }
        }
    }

    if (byzantine) {
        if (byzantine->party >= parties) {
            throw ValidationError("byzantine.party: index out of range");
        }
        if (byzantine->party == leader) {
            throw ValidationError(
                "byzantine.party: leader qudits are not transmitted");
        }
        if (byzantine->blocks.empty()) {
            throw ValidationError("byzantine.blocks: must be nonempty");
        }
        for (std::size_t l : byzantine->blocks) {
            if (l >= block_count()) {
                throw ValidationError("byzantine.blocks: index out of range");
            }
        }
    }

    dense_dimension(p, parties); // enforce the memory guard up front
}

std::uint32_t Scenario::effective_prime() const {
    if (prime_override) {
        return *prime_override;
    }
    return smallest_prime_geq(static_cast<std::uint32_t>(parties));
}

std::size_t Scenario::block_count() const {
    if (mode == ScenarioMode::Membership) {
        return universe.size();
    }
    return inputs && !inputs->empty() ? inputs->front().size() : 0;
}

std::map<std::string, std::size_t> canonical_ordering(
    const std::vector<std::string>& universe) {
    std::map<std::string, std::size_t> ordering;
    for (std::size_t i = 0; i < universe.size(); ++i) {
        if (!ordering.emplace(universe[i], i).second) {
            throw ValidationError("universe: duplicate label '" + universe[i] +
                                  "'");
        }
    }
    return ordering;
}

IncidenceVector incidence(const std::vector<std::string>& party_set,
                          const std::map<std::string, std::size_t>& ordering) {
    IncidenceVector e(ordering.size(), 0);
    for (const std::string& label : party_set) {
        auto it = ordering.find(label);
        if (it == ordering.end()) {
            throw ValidationError("incidence: label '" + label +
                                  "' not in universe");
        }
        e[it->second] = 1;
    }
    return e;
}

BlockRegister::BlockRegister(std::uint32_t prime, std::size_t sites)
    : state_(PhaseBlockState(prime, sites)) {}

void BlockRegister::apply_phase(std::size_t site, std::uint32_t power) {
    if (auto* phase = std::get_if<PhaseBlockState>(&state_)) {
        state_ = structured_apply(*phase, site, power);
    } else {
        state_ = clock_apply(std::get<DenseBlockState>(state_), site, power);
    }
}

void BlockRegister::apply_shift(std::size_t site) {
    promote();
    state_ = shift_apply(std::get<DenseBlockState>(state_), site);
}

void BlockRegister::apply_unitary(std::size_t site, const Eigen::MatrixXcd& u) {
    promote();
    state_ = site_unitary_apply(std::get<DenseBlockState>(state_), site, u);
}

bool BlockRegister::structured() const {
    return std::holds_alternative<PhaseBlockState>(state_);
}

const PhaseBlockState& BlockRegister::phase_state() const {
    return std::get<PhaseBlockState>(state_);
}

DenseBlockState BlockRegister::dense() const {
    if (auto* phase = std::get_if<PhaseBlockState>(&state_)) {
        return structured_to_dense(*phase);
    }
    return std::get<DenseBlockState>(state_);
}

std::optional<std::uint32_t> BlockRegister::label() const {
    if (auto* phase = std::get_if<PhaseBlockState>(&state_)) {
        return fourier_label(*phase);
    }
    const DenseBlockState& d = std::get<DenseBlockState>(state_);
    for (std::uint32_t m = 0; m < d.prime(); ++m) {
        if (std::norm(inner(make_phi(d.prime(), d.sites(), m), d)) >
            1.0 - 1e-12) {
            return m;
        }
    }
    return std::nullopt;
}

void BlockRegister::promote() {
    if (auto* phase = std::get_if<PhaseBlockState>(&state_)) {
        state_ = structured_to_dense(*phase);
    }
}

SetupState setup(std::size_t parties, std::size_t blocks, std::uint32_t prime,
                 std::size_t leader, std::uint64_t master_seed) {
    if (!is_prime(prime)) {
        throw ValidationError("prime: " + std::to_string(prime) +
                              " is not prime");
    }
    if (prime < parties) {
        throw ValidationError("prime: override must be >= parties");
    }
    if (leader >= parties) {
        throw ValidationError("leader: index out of range");
    }

    SetupState st;
    st.blocks.assign(blocks, BlockRegister(prime, parties));
    st.pads.resize(parties);
    for (std::size_t i = 0; i < parties; ++i) {
        st.pads[i].assign(blocks, 0);
        if (i == leader) {
            continue; // the leader shares no pad with itself
        }
        RandomStream pad_rng = RandomStream::derive(master_seed, "pads", i);
        for (std::size_t l = 0; l < blocks; ++l) {
            st.pads[i][l] = pad_rng.uniform_below(prime);
        }
    }
    return st;
}

AnswerMessage encode_party(std::size_t party, const IncidenceVector& row,
                           const RandomPad& pad,
                           std::vector<BlockRegister>& blocks,
                           const PrimeField& field) {
    if (row.size() != blocks.size() || pad.size() != blocks.size()) {
        throw ValidationError("encode: row/pad length does not match blocks");
    }
    AnswerMessage msg;
    msg.party = party;
    msg.qudit_count = blocks.size();
    msg.powers.resize(blocks.size());
    for (std::size_t l = 0; l < blocks.size(); ++l) {
        const std::uint32_t power = field.add(field.reduce(pad[l]),
                                              field.reduce(row[l]));
        blocks[l].apply_phase(party, power);
        msg.powers[l] = power;
    }
    return msg;
}

void leader_decode(const std::vector<AnswerMessage>& answers,
                   const std::vector<RandomPad>& pads, std::size_t leader,
                   std::vector<BlockRegister>& blocks,
                   const PrimeField& field) {
    std::set<std::size_t> received;
    for (const AnswerMessage& msg : answers) {
        received.insert(msg.party);
    }
    for (std::size_t k = 0; k < pads.size(); ++k) {
        if (k == leader) {
            continue;
        }
        if (!received.count(k)) {
            throw ValidationError("protocol abort: missing answer from party " +
                                  std::to_string(k));
        }
        for (std::size_t l = 0; l < blocks.size(); ++l) {
            blocks[l].apply_phase(k, field.neg(field.reduce(pads[k][l])));
        }
    }
}

std::vector<MeasurementOutcome> measure_blocks(
    const std::vector<BlockRegister>& blocks, const BlockPvm& pvm,
    RandomStream& rng) {
    std::vector<MeasurementOutcome> outcomes;
    outcomes.reserve(blocks.size());
    for (const BlockRegister& block : blocks) {
        outcomes.push_back(measure(block.dense(), pvm, rng));
    }
    return outcomes;
}

namespace {

std::vector<IncidenceVector> resolve_rows(const Scenario& scenario) {
    const std::size_t k = scenario.block_count();
    std::vector<IncidenceVector> rows(scenario.parties);
    if (scenario.mode == ScenarioMode::Summation) {
        for (std::size_t i = 0; i < scenario.parties; ++i) {
            rows[i] = (*scenario.inputs)[i];
        }
        return rows;
    }
    if (scenario.party_sets) {
        const auto ordering = canonical_ordering(scenario.universe);
        for (std::size_t i = 0; i < scenario.parties; ++i) {
            rows[i] = incidence((*scenario.party_sets)[i], ordering);
        }
        return rows;
    }
    for (std::size_t i = 0; i < scenario.parties; ++i) {
        RandomStream set_rng =
            RandomStream::derive(scenario.master_seed, "sets", i);
        rows[i].assign(k, 0);
        for (std::size_t l = 0; l < k; ++l) {
            rows[i][l] = set_rng.uniform01() < *scenario.membership_q ? 1 : 0;
        }
    }
    return rows;
}

void apply_tamper(const ByzantineSpec& spec, const PrimeField& field,
                  std::vector<BlockRegister>& blocks, AnswerMessage& msg,
                  RandomStream& tamper_rng) {
    for (std::size_t l : spec.blocks) {
        switch (spec.mode) {
        case ByzantineSpec::Mode::WrongPhase: {
            const std::uint32_t delta = field.reduce(spec.phase_delta);
            blocks[l].apply_phase(spec.party, delta);
            msg.powers[l] = field.add(msg.powers[l], delta);
            break;
        }
        case ByzantineSpec::Mode::Shift:
            blocks[l].apply_shift(spec.party);
            break;
        case ByzantineSpec::Mode::RandomUnitary:
            blocks[l].apply_unitary(spec.party,
                                    haar_unitary(field.modulus(), tamper_rng));
            break;
        }
    }
    msg.tampered = true;
}

std::uint64_t transcript_digest(const Scenario& scenario, std::uint32_t prime,
                                const std::vector<AnswerMessage>& answers) {
    Fnv1a64 f;
    f.update("qpma-transcript-v1");
    f.update(mode_name(scenario.mode));
    f.update_u64(scenario.parties);
    f.update_u64(scenario.block_count());
    f.update_u64(prime);
    f.update_u64(scenario.leader);
    f.update_u64(scenario.leader_encodes ? 1 : 0);
    for (const AnswerMessage& msg : answers) {
        f.update_u64(msg.party);
        f.update_u64(msg.tampered ? 1 : 0);
        for (std::uint32_t power : msg.powers) {
            f.update_u64(power);
        }
    }
    return f.value();
}

} // namespace

RunTrace execute(const Scenario& scenario) {
    scenario.validate();
    const std::uint32_t p = scenario.effective_prime();
    const std::size_t n = scenario.parties;
    const std::size_t k = scenario.block_count();
    const PrimeField field(p);

    RunTrace trace;
    trace.prime = p;
    trace.rows = resolve_rows(scenario);

    SetupState st = setup(n, k, p, scenario.leader, scenario.master_seed);
    trace.pads = st.pads;

    RandomStream tamper_rng =
        RandomStream::derive(scenario.master_seed, "byzantine");
    for (std::size_t i = 0; i < n; ++i) {
        if (i == scenario.leader) {
            if (scenario.leader_encodes) {
                // The leader never transmits, so it encodes with a zero pad
                // and its answer stays local.
                encode_party(i, trace.rows[i], st.pads[i], st.blocks, field);
            }
            continue;
        }
        AnswerMessage msg =
            encode_party(i, trace.rows[i], st.pads[i], st.blocks, field);
        if (scenario.byzantine && scenario.byzantine->party == i) {
            apply_tamper(*scenario.byzantine, field, st.blocks, msg,
                         tamper_rng);
        }
        trace.answers.push_back(std::move(msg));
    }

    leader_decode(trace.answers, st.pads, scenario.leader, st.blocks, field);
    trace.decoded = st.blocks;

    const BlockPvm pvm(p, n);
    RandomStream measure_rng =
        RandomStream::derive(scenario.master_seed, "measure");
    trace.outcomes = measure_blocks(trace.decoded, pvm, measure_rng);

    AggregationReport& report = trace.report;
    report.mode = scenario.mode;
    report.parties = n;
    report.blocks = k;
    report.prime = p;
    report.leader = scenario.leader;
    report.leader_encodes = scenario.leader_encodes;
    report.master_seed = scenario.master_seed;
    report.downloaded_qudits = (n - 1) * k;
    report.download_cost_bits = download_cost_bits(n, k, p);
    report.per_element_cost_bits = per_element_cost_bits(n, p);
    report.transcript_digest = transcript_digest(scenario, p, trace.answers);

    for (const BlockRegister& block : trace.decoded) {
        const auto label = block.label();
        report.decoded_labels.push_back(
            label ? "phi_" + std::to_string(*label) : "non-fourier");
    }

    const IncidenceVector& leader_row = trace.rows[scenario.leader];
    for (std::size_t l = 0; l < k; ++l) {
        ElementReport element;
        element.label = scenario.mode == ScenarioMode::Membership
                            ? scenario.universe[l]
                            : std::to_string(l);
        element.outcome = trace.outcomes[l];
        if (scenario.mode == ScenarioMode::Membership) {
            element.leader_member = leader_row[l] == 1;
        }
        if (!element.outcome.byzantine) {
            const std::uint32_t m = element.outcome.label;
            if (scenario.leader_encodes) {
                // When P = N, an all-member element also reads 0; the leader
                // disambiguates through its own membership.
                if (scenario.mode == ScenarioMode::Membership && m == 0 &&
                    element.leader_member) {
                    element.refined = static_cast<std::uint32_t>(n);
                }
            } else {
                // Without the leader's contribution the raw outcome misses
                // exactly the leader's own row entry.
                element.refined =
                    scenario.mode == ScenarioMode::Membership
                        ? m + leader_row[l]
                        : field.add(m, field.reduce(leader_row[l]));
            }
        }
        report.per_element.push_back(std::move(element));
    }
    return trace;
}

AggregationReport run_qpma(const Scenario& scenario) {
    if (scenario.mode != ScenarioMode::Membership) {
        throw ValidationError("run: scenario mode must be membership");
    }
    return execute(scenario).report;
}

AggregationReport run_summation(const Scenario& scenario) {
    if (scenario.mode != ScenarioMode::Summation) {
        throw ValidationError("sum: scenario mode must be summation");
    }
    return execute(scenario).report;
}

double download_cost_bits(std::size_t parties, std::size_t blocks,
                          std::uint32_t prime) {
    return static_cast<double>(parties - 1) * static_cast<double>(blocks) *
           std::log2(static_cast<double>(prime));
}

double per_element_cost_bits(std::size_t parties, std::uint32_t prime) {
    return static_cast<double>(parties - 1) *
           std::log2(static_cast<double>(prime));
}

} // namespace qpma
