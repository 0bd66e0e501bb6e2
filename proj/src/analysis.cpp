#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace qpma {

namespace {

bool bit(std::uint64_t mask, std::size_t index) {
    return (mask >> index) & 1;
}

// Encoded dense block state for one pad/row combination: every party applies
// its clock power at its own site, starting from psi. Dense-oracle route.
DenseBlockState encoded_block(std::uint32_t prime, std::size_t parties,
                              const std::vector<std::uint32_t>& powers) {
    DenseBlockState state = make_psi(prime, parties);
    for (std::size_t i = 0; i < parties; ++i) {
        if (powers[i] % prime != 0) {
            state = clock_apply(state, i, powers[i]);
        }
    }
    return state;
}

} // namespace

double verify_security(std::size_t parties, std::size_t blocks,
                       std::uint32_t prime, std::size_t leader,
                       const std::vector<IncidenceAssignment>& assignments,
                       const std::vector<std::size_t>& intercepted,
                       bool leader_encodes) {
    if (!is_prime(prime) || prime < parties) {
        throw ValidationError("security: prime must be a prime >= parties");
    }
    if (leader >= parties) {
        throw ValidationError("security: leader index out of range");
    }
    if (intercepted.empty()) {
        throw ValidationError("security: intercept set is empty");
    }
    std::set<std::size_t> tap(intercepted.begin(), intercepted.end());
    for (std::size_t site : tap) {
        if (site >= parties || site == leader) {
            throw ValidationError(
                "security: intercepted sites must be non-leader parties");
        }
    }
    if (assignments.size() < 2) {
        throw ValidationError("security: need at least two assignments");
    }
    for (const IncidenceAssignment& a : assignments) {
        if (a.size() != parties) {
            throw ValidationError("security: assignment row count mismatch");
        }
        for (const IncidenceVector& row : a) {
            if (row.size() != blocks) {
                throw ValidationError(
                    "security: assignment column count mismatch");
            }
        }
    }

    // Exact averaging enumerates every pad vector of the N-1 non-leader
    // parties per block.
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i + 1 < parties; ++i) {
        combos *= prime;
        if (combos > 1'000'000) {
            throw GuardError("security: pad enumeration exceeds guard");
        }
    }

    std::vector<std::size_t> pad_parties;
    for (std::size_t i = 0; i < parties; ++i) {
        if (i != leader) {
            pad_parties.push_back(i);
        }
    }
    const std::vector<std::size_t> keep(tap.begin(), tap.end());
    const PrimeField field(prime);
    const double weight = 1.0 / static_cast<double>(combos);

    double max_distance = 0.0;
    for (std::size_t l = 0; l < blocks; ++l) {
        std::vector<DensityMatrix> rhos;
        rhos.reserve(assignments.size());
        for (const IncidenceAssignment& assignment : assignments) {
            Eigen::MatrixXcd acc;
            for (std::uint64_t combo = 0; combo < combos; ++combo) {
                std::vector<std::uint32_t> powers(parties, 0);
                std::uint64_t rest = combo;
                for (std::size_t i : pad_parties) {
                    const std::uint32_t pad =
                        static_cast<std::uint32_t>(rest % prime);
                    rest /= prime;
                    powers[i] = field.add(pad, field.reduce(assignment[i][l]));
                }
                if (leader_encodes) {
                    powers[leader] = field.reduce(assignment[leader][l]);
                }
                const DensityMatrix reduced = partial_trace(
                    encoded_block(prime, parties, powers), keep);
                if (acc.size() == 0) {
                    acc = weight * reduced.matrix();
                } else {
                    acc += weight * reduced.matrix();
                }
            }
            rhos.emplace_back(std::move(acc));
        }
        for (std::size_t a = 0; a < rhos.size(); ++a) {
            for (std::size_t b = a + 1; b < rhos.size(); ++b) {
                max_distance =
                    std::max(max_distance, trace_distance(rhos[a], rhos[b]));
            }
        }
    }
    return max_distance;
}

PrivacyPosteriors verify_privacy(std::size_t parties, std::size_t blocks,
                                 std::uint32_t prime, double q,
                                 std::size_t party, std::size_t element,
                                 std::uint32_t outcome) {
    if (!is_prime(prime) || prime < parties) {
        throw ValidationError("privacy: prime must be a prime >= parties");
    }
    if (party >= parties || element >= blocks) {
        throw ValidationError("privacy: party or element index out of range");
    }
    if (outcome >= prime) {
        throw ValidationError("privacy: outcome must lie in [0, P)");
    }
    if (q < 0.0 || q > 1.0) {
        throw ValidationError("privacy: q must lie in [0, 1]");
    }
    const std::size_t cells = parties * blocks;
    if (cells > 20) {
        throw GuardError("privacy: enumeration guard N*K <= 20 exceeded");
    }

    const PrimeField field(prime);
    const BlockPvm pvm(prime, parties);
    double protocol_num = 0.0, protocol_den = 0.0;
    double sum_num = 0.0, sum_den = 0.0;

    for (std::uint64_t mask = 0; mask < (1ULL << cells); ++mask) {
        double weight = 1.0;
        for (std::size_t c = 0; c < cells; ++c) {
            weight *= bit(mask, c) ? q : 1.0 - q;
        }
        if (weight == 0.0) {
            continue;
        }
        std::vector<IncidenceVector> rows(parties);
        for (std::size_t i = 0; i < parties; ++i) {
            rows[i].assign(blocks, 0);
            for (std::size_t l = 0; l < blocks; ++l) {
                rows[i][l] = bit(mask, i * blocks + l) ? 1 : 0;
            }
        }
        const bool holds = rows[party][element] == 1;

        // Protocol route: encode/decode through the pipeline primitives and
        // read the quantum measurement law at the target block.
        SetupState st = setup(parties, blocks, prime, 0, mask);
        std::vector<AnswerMessage> answers;
        for (std::size_t i = 0; i < parties; ++i) {
            AnswerMessage msg =
                encode_party(i, rows[i], st.pads[i], st.blocks, field);
            if (i != 0) {
                answers.push_back(std::move(msg));
            }
        }
        leader_decode(answers, st.pads, 0, st.blocks, field);
        const double prob =
            pvm.probability(st.blocks[element].dense(), outcome);
        protocol_num += holds ? weight * prob : 0.0;
        protocol_den += weight * prob;

        // Counting route: condition directly on the column sum mod P.
        std::uint32_t sum = 0;
        for (std::size_t i = 0; i < parties; ++i) {
            sum = field.add(sum, rows[i][element]);
        }
        if (sum == outcome) {
            sum_num += holds ? weight : 0.0;
            sum_den += weight;
        }
    }

    PrivacyPosteriors result;
    result.conditioning_possible = sum_den > 0.0;
    if (result.conditioning_possible) {
        result.from_protocol = protocol_num / protocol_den;
        result.from_sum = sum_num / sum_den;
    }
    return result;
}

CorrectnessResult verify_correctness_exhaustive(std::size_t parties,
                                                std::size_t blocks,
                                                std::uint32_t prime) {
    const std::size_t cells = parties * blocks;
    if (cells > 16) {
        throw GuardError("correctness: enumeration guard 2^(N*K) <= 2^16");
    }
    std::vector<std::string> universe;
    for (std::size_t l = 0; l < blocks; ++l) {
        universe.push_back("e" + std::to_string(l));
    }
    const PrimeField field(prime);
    const BlockPvm pvm(prime, parties);

    CorrectnessResult result;
    result.configurations = std::size_t{1} << cells;
    for (std::uint64_t mask = 0; mask < (1ULL << cells); ++mask) {
        Scenario sc;
        sc.mode = ScenarioMode::Membership;
        sc.parties = parties;
        sc.leader = 0;
        sc.prime_override = prime;
        sc.master_seed = mask;
        sc.universe = universe;
        std::vector<std::vector<std::string>> sets(parties);
        for (std::size_t i = 0; i < parties; ++i) {
            for (std::size_t l = 0; l < blocks; ++l) {
                if (bit(mask, i * blocks + l)) {
                    sets[i].push_back(universe[l]);
                }
            }
        }
        sc.party_sets = std::move(sets);

        const RunTrace trace = execute(sc);
        for (std::size_t l = 0; l < blocks; ++l) {
            std::uint32_t expected = 0;
            for (std::size_t i = 0; i < parties; ++i) {
                expected = field.add(expected, trace.rows[i][l]);
            }
            if (trace.outcomes[l].byzantine ||
                trace.outcomes[l].label != expected) {
                ++result.label_mismatches;
            }
            const double prob =
                pvm.probability(trace.decoded[l].dense(), expected);
            result.max_probability_error =
                std::max(result.max_probability_error, std::abs(1.0 - prob));
        }
    }
    result.pass = result.label_mismatches == 0 &&
                  result.max_probability_error <= 1e-10;
    return result;
}

ByzantineStats byzantine_experiment(const Scenario& scenario,
                                    std::size_t trials) {
    if (!scenario.byzantine) {
        throw ValidationError("byzantine: scenario carries no tamper spec");
    }
    if (trials < 1) {
        throw ValidationError("byzantine: trials must be >= 1");
    }
    scenario.validate();
    const std::uint32_t p = scenario.effective_prime();
    const PrimeField field(p);
    const BlockPvm pvm(p, scenario.parties);

    ByzantineStats stats;
    stats.trials = trials;
    std::size_t detected = 0, misreported = 0;
    double exact_sum = 0.0;

    for (std::size_t t = 0; t < trials; ++t) {
        Scenario trial = scenario;
        trial.master_seed =
            RandomStream::derive(scenario.master_seed, "byz-trial", t)
                .next_u64();
        const RunTrace trace = execute(trial);

        bool flagged = false, misreport = false;
        double miss_all = 1.0; // probability that no tampered block flags
        for (std::size_t l : scenario.byzantine->blocks) {
            std::uint32_t expected = 0;
            for (std::size_t i = 0; i < scenario.parties; ++i) {
                if (i == scenario.leader && !scenario.leader_encodes) {
                    continue;
                }
                expected = field.add(expected, field.reduce(trace.rows[i][l]));
            }
            const MeasurementOutcome& outcome = trace.outcomes[l];
            if (outcome.byzantine) {
                flagged = true;
            } else if (outcome.label != expected) {
                misreport = true;
            }
            miss_all *= 1.0 - pvm.probability(trace.decoded[l].dense(),
                                              pvm.byzantine_index());
        }
        detected += flagged ? 1 : 0;
        misreported += misreport ? 1 : 0;
        exact_sum += 1.0 - miss_all;
    }

    stats.detection_rate =
        static_cast<double>(detected) / static_cast<double>(trials);
    stats.misreport_rate =
        static_cast<double>(misreported) / static_cast<double>(trials);
    stats.mean_exact_detection = exact_sum / static_cast<double>(trials);
    return stats;
}

EntropyChecks verify_entropy_checks(std::uint32_t prime, std::size_t sites) {
    EntropyChecks checks;
    checks.prime = prime;

    const DenseBlockState phi1 = make_phi(prime, sites, 1 % prime);
    checks.pure_fourier = von_neumann_entropy(mix_ensemble({{1.0, phi1}}));

    std::vector<std::pair<double, DenseBlockState>> ensemble;
    for (std::uint32_t m = 0; m < prime; ++m) {
        ensemble.emplace_back(1.0 / prime, make_phi(prime, sites, m));
    }
    checks.fourier_mixture = von_neumann_entropy(mix_ensemble(ensemble));

    checks.single_site_reduction =
        von_neumann_entropy(partial_trace(make_psi(prime, sites), {0}));
    return checks;
}

bool VerifyReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const VerifyRow& r) { return r.pass; });
}

namespace {

void add_row(VerifyReport& report, std::string case_id, std::string quantity,
             double value, double tolerance) {
    report.rows.push_back({std::move(case_id), std::move(quantity), value,
                           tolerance, value <= tolerance});
}

double fourier_orthonormality_deviation(std::uint32_t prime,
                                        std::size_t sites) {
    std::vector<DenseBlockState> phi;
    for (std::uint32_t m = 0; m < prime; ++m) {
        phi.push_back(make_phi(prime, sites, m));
    }
    double deviation = 0.0;
    for (std::uint32_t m = 0; m < prime; ++m) {
        for (std::uint32_t n = 0; n < prime; ++n) {
            const double delta = m == n ? 1.0 : 0.0;
            deviation =
                std::max(deviation, std::abs(inner(phi[m], phi[n]) - delta));
        }
    }
    return deviation;
}

double engine_equivalence_deviation(std::uint32_t prime, std::size_t sites,
                                    std::size_t sequences, RandomStream& rng) {
    double deviation = 0.0;
    for (std::size_t s = 0; s < sequences; ++s) {
        PhaseBlockState structured(prime, sites);
        DenseBlockState dense = make_psi(prime, sites);
        const std::size_t length = 1 + rng.uniform_below(20);
        for (std::size_t op = 0; op < length; ++op) {
            const std::size_t site =
                rng.uniform_below(static_cast<std::uint32_t>(sites));
            const std::uint32_t power = rng.uniform_below(prime);
            structured = structured_apply(structured, site, power);
            dense = clock_apply(dense, site, power);
        }
        const DenseBlockState bridged = structured_to_dense(structured);
        for (std::size_t i = 0; i < dense.dimension(); ++i) {
            deviation = std::max(
                deviation, std::abs(bridged.amplitude(i) - dense.amplitude(i)));
        }
    }
    return deviation;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t max_prime) {
    std::vector<std::uint32_t> primes;
    for (std::uint32_t p = 2; p <= max_prime; ++p) {
        if (is_prime(p)) {
            primes.push_back(p);
        }
    }
    return primes;
}

// Keeps grid cells cheap; the verifier functions themselves enforce the
// hard guards for direct calls.
bool grid_feasible(std::uint32_t prime, std::size_t sites) {
    std::uint64_t dim = 1;
    for (std::size_t i = 0; i < sites; ++i) {
        dim *= prime;
        if (dim > 10'000) {
            return false;
        }
    }
    return true;
}

std::vector<IncidenceAssignment> enumerate_assignments(std::size_t parties,
                                                       std::size_t blocks,
                                                       std::uint64_t seed) {
    const std::size_t cells = parties * blocks;
    std::vector<IncidenceAssignment> assignments;
    auto from_mask = [&](std::uint64_t mask) {
        IncidenceAssignment a(parties);
        for (std::size_t i = 0; i < parties; ++i) {
            a[i].assign(blocks, 0);
            for (std::size_t l = 0; l < blocks; ++l) {
                a[i][l] = bit(mask, i * blocks + l) ? 1 : 0;
            }
        }
        return a;
    };
    if (cells <= 6) {
        for (std::uint64_t mask = 0; mask < (1ULL << cells); ++mask) {
            assignments.push_back(from_mask(mask));
        }
    } else {
        RandomStream rng = RandomStream::derive(seed, "security-sample");
        std::set<std::uint64_t> chosen;
        while (chosen.size() < 64) {
            chosen.insert(rng.next_u64() & ((1ULL << cells) - 1));
        }
        for (std::uint64_t mask : chosen) {
            assignments.push_back(from_mask(mask));
        }
    }
    return assignments;
}

Scenario byzantine_grid_scenario(std::size_t parties, std::size_t blocks,
                                 ByzantineSpec::Mode mode,
                                 std::uint64_t seed) {
    Scenario sc;
    sc.mode = ScenarioMode::Membership;
    sc.parties = parties;
    sc.leader = 0;
    sc.master_seed = seed;
    std::vector<std::vector<std::string>> sets(parties);
    for (std::size_t l = 0; l < blocks; ++l) {
        sc.universe.push_back("e" + std::to_string(l));
        for (std::size_t i = 0; i < parties; ++i) {
            if ((i + l) % 2 == 0) {
                sets[i].push_back(sc.universe.back());
            }
        }
    }
    sc.party_sets = std::move(sets);
    ByzantineSpec byz;
    byz.party = 1;
    byz.mode = mode;
    byz.blocks = {0};
    sc.byzantine = byz;
    return sc;
}

} // namespace

VerifyReport run_verification_grid(const VerifyOptions& options) {
    VerifyReport report;
    const auto primes = primes_up_to(options.max_prime);

    for (std::uint32_t p : primes) {
        for (std::size_t n = 1; n <= std::min<std::size_t>(options.max_parties, 3);
             ++n) {
            add_row(report,
                    "fourier/P" + std::to_string(p) + "N" + std::to_string(n),
                    "max|<phi_m|phi_n>-delta_mn|",
                    fourier_orthonormality_deviation(p, n), 1e-13);
        }
    }

    for (std::uint32_t p : primes) {
        for (std::size_t n = 1; n <= options.max_parties; ++n) {
            if (!grid_feasible(p, n)) {
                continue;
            }
            RandomStream rng = RandomStream::derive(
                options.seed, "engine", p * 100 + n);
            add_row(report,
                    "engine/P" + std::to_string(p) + "N" + std::to_string(n),
                    "max|structured-dense| (200 sequences)",
                    engine_equivalence_deviation(p, n, 200, rng), 1e-12);
        }
    }

    for (std::size_t n = 2; n <= options.max_parties; ++n) {
        const std::uint32_t p =
            smallest_prime_geq(static_cast<std::uint32_t>(n));
        if (p > options.max_prime || !grid_feasible(p, n)) {
            continue;
        }
        for (std::size_t k = 1; k <= options.max_blocks && n * k <= 16; ++k) {
            const std::string id = "correctness/N" + std::to_string(n) + "K" +
                                   std::to_string(k) + "P" + std::to_string(p);
            const CorrectnessResult res =
                verify_correctness_exhaustive(n, k, p);
            add_row(report, id, "outcome mismatches",
                    static_cast<double>(res.label_mismatches), 0.0);
            add_row(report, id, "max|1-P(outcome=sum)|",
                    res.max_probability_error, 1e-10);
        }
    }

    // The exact pad averaging scales as P^(N-1) states per assignment and
    // block; the security and privacy sections stay on the n <= 3 grid.
    const std::size_t small_n = std::min<std::size_t>(options.max_parties, 3);
    for (std::size_t n = 2; n <= small_n; ++n) {
        const std::uint32_t p =
            smallest_prime_geq(static_cast<std::uint32_t>(n));
        if (p > options.max_prime || !grid_feasible(p, n)) {
            continue;
        }
        for (std::size_t k = 1; k <= options.max_blocks; ++k) {
            const auto assignments = enumerate_assignments(n, k, options.seed);
            const std::string id = "security/N" + std::to_string(n) + "K" +
                                   std::to_string(k) + "P" + std::to_string(p);
            double single = 0.0;
            for (std::size_t site = 0; site < n; ++site) {
                if (site == 0) {
                    continue; // leader 0 is never intercepted
                }
                single = std::max(
                    single, verify_security(n, k, p, 0, assignments, {site}));
            }
            add_row(report, id + "/single-link",
                    "max pad-averaged trace distance", single, 1e-10);
            std::vector<std::size_t> all;
            for (std::size_t site = 1; site < n; ++site) {
                all.push_back(site);
            }
            add_row(report, id + "/all-links",
                    "max pad-averaged trace distance",
                    verify_security(n, k, p, 0, assignments, all), 1e-10);
        }
    }

    for (std::size_t n = 2; n <= small_n; ++n) {
        const std::uint32_t p =
            smallest_prime_geq(static_cast<std::uint32_t>(n));
        if (p > options.max_prime || !grid_feasible(p, n)) {
            continue;
        }
        for (std::size_t k = 1; k <= options.max_blocks && n * k <= 8; ++k) {
            for (double q : options.qs) {
                double gap = 0.0;
                for (std::size_t party = 0; party < n; ++party) {
                    for (std::size_t element = 0; element < k; ++element) {
                        for (std::uint32_t m = 0; m < p; ++m) {
                            const PrivacyPosteriors post = verify_privacy(
                                n, k, p, q, party, element, m);
                            if (post.conditioning_possible) {
                                gap = std::max(
                                    gap, std::abs(post.from_protocol -
                                                  post.from_sum));
                            }
                        }
                    }
                }
                char qs[16];
                std::snprintf(qs, sizeof(qs), "%.2f", q);
                add_row(report,
                        "privacy/N" + std::to_string(n) + "K" +
                            std::to_string(k) + "P" + std::to_string(p) + "q" +
                            qs,
                        "max|posterior gap|", gap, 1e-12);
            }
        }
    }

    // Largest n <= min(3, max_parties) whose default prime fits the bound.
    std::size_t byz_n = 0;
    for (std::size_t n = std::min<std::size_t>(3, options.max_parties); n >= 2;
         --n) {
        if (smallest_prime_geq(static_cast<std::uint32_t>(n)) <=
            options.max_prime) {
            byz_n = n;
            break;
        }
    }
    if (byz_n >= 2) {
        const std::size_t n = byz_n;
        const std::size_t k = std::min<std::size_t>(2, options.max_blocks);
        const ByzantineStats wrong = byzantine_experiment(
            byzantine_grid_scenario(n, k, ByzantineSpec::Mode::WrongPhase,
                                    options.seed),
            options.trials);
        add_row(report, "byzantine/wrong-phase", "|detection_rate - 0|",
                wrong.detection_rate, 0.0);
        add_row(report, "byzantine/wrong-phase", "|misreport_rate - 1|",
                std::abs(wrong.misreport_rate - 1.0), 0.0);

        const ByzantineStats shift = byzantine_experiment(
            byzantine_grid_scenario(n, k, ByzantineSpec::Mode::Shift,
                                    options.seed),
            options.trials);
        add_row(report, "byzantine/shift", "|detection_rate - 1|",
                std::abs(shift.detection_rate - 1.0), 0.0);
        add_row(report, "byzantine/shift", "|exact detection prob - 1|",
                std::abs(shift.mean_exact_detection - 1.0), 1e-12);

        const ByzantineStats haar = byzantine_experiment(
            byzantine_grid_scenario(n, k, ByzantineSpec::Mode::RandomUnitary,
                                    options.seed),
            options.trials);
        add_row(report, "byzantine/random-unitary",
                "|detection_rate - mean exact prob|",
                std::abs(haar.detection_rate - haar.mean_exact_detection),
                5.0 / std::sqrt(static_cast<double>(options.trials)));
    }

    for (std::uint32_t p : primes) {
        const std::size_t n = std::min<std::size_t>(3, options.max_parties);
        if (n < 1 || !grid_feasible(p, n)) {
            continue;
        }
        const EntropyChecks checks = verify_entropy_checks(p, n);
        const std::string id =
            "entropy/P" + std::to_string(p) + "N" + std::to_string(n);
        add_row(report, id, "|S(pure phi)|", std::abs(checks.pure_fourier),
                1e-10);
        add_row(report, id, "|S(fourier mixture) - log2 P|",
                std::abs(checks.fourier_mixture - std::log2(double(p))),
                1e-10);
        add_row(report, id, "|S(single-site reduction) - log2 P|",
                std::abs(checks.single_site_reduction - std::log2(double(p))),
                1e-10);
    }

    return report;
}

std::string render_verification(const VerifyReport& report) {
    std::ostringstream out;
    out << "qpma verification v1\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-36s %-42s %12s %10s %s\n", "case",
                  "quantity", "value", "tolerance", "status");
    out << line;
    for (const VerifyRow& row : report.rows) {
        std::snprintf(line, sizeof(line), "%-36s %-42s %12.3e %10.1e %s\n",
                      row.case_id.c_str(), row.quantity.c_str(), row.value,
                      row.tolerance, row.pass ? "pass" : "FAIL");
        out << line;
    }
    out << "result = " << (report.all_pass() ? "pass" : "FAIL") << " ("
        << report.rows.size() << " cases)\n";
    return out.str();
}

} // namespace qpma
