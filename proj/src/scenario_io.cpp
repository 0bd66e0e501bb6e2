#include "scenario_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace qpma {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value,
                                    std::size_t line) {
    std::vector<std::string> items;
    if (trim(value).empty()) {
        return items;
    }
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw ParseError("empty list item", line);
        }
        items.push_back(item);
    }
    return items;
}

std::uint64_t parse_u64(const std::string& value, std::size_t line) {
    std::uint64_t out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("expected a non-negative integer, got '" + value + "'",
                         line);
    }
    return out;
}

double parse_double(const std::string& value, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument(value);
        }
        return out;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + value + "'", line);
    }
}

bool parse_bool(const std::string& value, std::size_t line) {
    if (value == "true") {
        return true;
    }
    if (value == "false") {
        return false;
    }
    throw ParseError("expected true or false, got '" + value + "'", line);
}

ByzantineSpec::Mode parse_tamper_mode(const std::string& value,
                                      std::size_t line) {
    if (value == "wrong_phase") {
        return ByzantineSpec::Mode::WrongPhase;
    }
    if (value == "shift") {
        return ByzantineSpec::Mode::Shift;
    }
    if (value == "random_unitary") {
        return ByzantineSpec::Mode::RandomUnitary;
    }
    throw ParseError(
        "byzantine.mode must be wrong_phase, shift or random_unitary", line);
}

// Index suffix of keys like set.3 / input.0.
std::size_t parse_key_index(const std::string& key, std::size_t dot,
                            std::size_t line) {
    return static_cast<std::size_t>(parse_u64(key.substr(dot + 1), line));
}

} // namespace

Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    std::map<std::size_t, std::vector<std::string>> sets;
    std::map<std::size_t, std::vector<std::uint32_t>> inputs;
    std::map<std::string, std::size_t> seen; // key -> first line
    bool have_parties = false;
    ByzantineSpec byz;
    bool byz_party_set = false, byz_mode_set = false, byz_blocks_set = false;

    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected 'key = value'", line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("missing key before '='", line_no);
        }
        auto [it, inserted] = seen.emplace(key, line_no);
        if (!inserted) {
            throw ParseError("duplicate key '" + key + "' (first on line " +
                                 std::to_string(it->second) + ")",
                             line_no);
        }

        if (key == "mode") {
            if (value == "membership") {
                sc.mode = ScenarioMode::Membership;
            } else if (value == "summation") {
                sc.mode = ScenarioMode::Summation;
            } else {
                throw ParseError("mode must be membership or summation",
                                 line_no);
            }
        } else if (key == "parties") {
            sc.parties = static_cast<std::size_t>(parse_u64(value, line_no));
            have_parties = true;
        } else if (key == "leader") {
            sc.leader = static_cast<std::size_t>(parse_u64(value, line_no));
        } else if (key == "seed") {
            sc.master_seed = parse_u64(value, line_no);
        } else if (key == "prime") {
            sc.prime_override =
                static_cast<std::uint32_t>(parse_u64(value, line_no));
        } else if (key == "leader_encodes") {
            sc.leader_encodes = parse_bool(value, line_no);
        } else if (key == "universe") {
            sc.universe = split_list(value, line_no);
        } else if (key == "membership_q") {
            sc.membership_q = parse_double(value, line_no);
        } else if (key.rfind("set.", 0) == 0) {
            sets[parse_key_index(key, 3, line_no)] = split_list(value, line_no);
        } else if (key.rfind("input.", 0) == 0) {
            std::vector<std::uint32_t> row;
            for (const std::string& item : split_list(value, line_no)) {
                row.push_back(
                    static_cast<std::uint32_t>(parse_u64(item, line_no)));
            }
            inputs[parse_key_index(key, 5, line_no)] = std::move(row);
        } else if (key == "byzantine.party") {
            byz.party = static_cast<std::size_t>(parse_u64(value, line_no));
            byz_party_set = true;
        } else if (key == "byzantine.mode") {
            byz.mode = parse_tamper_mode(value, line_no);
            byz_mode_set = true;
        } else if (key == "byzantine.blocks") {
            for (const std::string& item : split_list(value, line_no)) {
                byz.blocks.push_back(
                    static_cast<std::size_t>(parse_u64(item, line_no)));
            }
            byz_blocks_set = true;
        } else if (key == "byzantine.phase_delta") {
            byz.phase_delta =
                static_cast<std::uint32_t>(parse_u64(value, line_no));
        } else {
            throw ParseError("unknown key '" + key + "'", line_no);
        }
    }

    if (!have_parties) {
        throw ValidationError("parties: key required");
    }
    if (!sets.empty()) {
        std::vector<std::vector<std::string>> party_sets(sc.parties);
        for (auto& [index, labels] : sets) {
            if (index >= sc.parties) {
                throw ValidationError("set." + std::to_string(index) +
                                      ": party index out of range");
            }
            party_sets[index] = std::move(labels);
        }
        if (sets.size() != sc.parties) {
            throw ValidationError("sets: need exactly one set per party");
        }
        sc.party_sets = std::move(party_sets);
    }
    if (!inputs.empty()) {
        std::vector<std::vector<std::uint32_t>> rows(sc.parties);
        for (auto& [index, row] : inputs) {
            if (index >= sc.parties) {
                throw ValidationError("input." + std::to_string(index) +
                                      ": party index out of range");
            }
            rows[index] = std::move(row);
        }
        if (inputs.size() != sc.parties) {
            throw ValidationError("input: need exactly one line per party");
        }
        sc.inputs = std::move(rows);
    }
    if (byz_party_set || byz_mode_set || byz_blocks_set) {
        if (!byz_party_set || !byz_mode_set || !byz_blocks_set) {
            throw ValidationError(
                "byzantine: party, mode and blocks are all required");
        }
        sc.byzantine = std::move(byz);
    }

    sc.validate();
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) {
        throw ParseError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_scenario_text(buffer.str());
}

Scenario example_scenario() {
    Scenario sc;
    sc.mode = ScenarioMode::Membership;
    sc.parties = 3;
    sc.leader = 1;
    sc.master_seed = 42;
    sc.universe = {"a", "b", "c", "d"};
    sc.party_sets = std::vector<std::vector<std::string>>{
        {"a", "c"}, {"a", "b", "c"}, {"c"}};
    return sc;
}

namespace {

std::string join(const std::vector<std::string>& items,
                 const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) {
            out += sep;
        }
        out += items[i];
    }
    return out;
}

std::string format_fixed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

std::string format_hex(std::uint64_t value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(value));
    return buf;
}

} // namespace

std::string render_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "mode = "
        << (sc.mode == ScenarioMode::Membership ? "membership" : "summation")
        << "\n";
    out << "parties = " << sc.parties << "\n";
    out << "leader = " << sc.leader << "\n";
    out << "seed = " << sc.master_seed << "\n";
    if (sc.prime_override) {
        out << "prime = " << *sc.prime_override << "\n";
    }
    if (!sc.leader_encodes) {
        out << "leader_encodes = false\n";
    }
    if (!sc.universe.empty()) {
        out << "universe = " << join(sc.universe, ", ") << "\n";
    }
    if (sc.party_sets) {
        for (std::size_t i = 0; i < sc.party_sets->size(); ++i) {
            out << "set." << i << " = " << join((*sc.party_sets)[i], ", ")
                << "\n";
        }
    }
    if (sc.membership_q) {
        out << "membership_q = " << format_fixed(*sc.membership_q) << "\n";
    }
    if (sc.inputs) {
        for (std::size_t i = 0; i < sc.inputs->size(); ++i) {
            std::vector<std::string> items;
            for (std::uint32_t v : (*sc.inputs)[i]) {
                items.push_back(std::to_string(v));
            }
            out << "input." << i << " = " << join(items, ", ") << "\n";
        }
    }
    if (sc.byzantine) {
        out << "byzantine.party = " << sc.byzantine->party << "\n";
        out << "byzantine.mode = ";
        switch (sc.byzantine->mode) {
        case ByzantineSpec::Mode::WrongPhase:
            out << "wrong_phase";
            break;
        case ByzantineSpec::Mode::Shift:
            out << "shift";
            break;
        case ByzantineSpec::Mode::RandomUnitary:
            out << "random_unitary";
            break;
        }
        out << "\n";
        std::vector<std::string> items;
        for (std::size_t b : sc.byzantine->blocks) {
            items.push_back(std::to_string(b));
        }
        out << "byzantine.blocks = " << join(items, ", ") << "\n";
        if (sc.byzantine->mode == ByzantineSpec::Mode::WrongPhase) {
            out << "byzantine.phase_delta = " << sc.byzantine->phase_delta
                << "\n";
        }
    }
    return out.str();
}

std::string render_report(const AggregationReport& report) {
    const bool membership = report.mode == ScenarioMode::Membership;
    std::ostringstream out;
    out << "qpma report v1\n";
    out << "mode = " << (membership ? "membership" : "summation") << "\n";
    out << "parties = " << report.parties << "\n";
    out << "blocks = " << report.blocks << "\n";
    out << "prime = " << report.prime << "\n";
    out << "leader = " << report.leader << "\n";
    out << "leader_encodes = " << (report.leader_encodes ? "true" : "false")
        << "\n";
    out << "seed = " << report.master_seed << "\n";
    out << "downloaded_qudits = " << report.downloaded_qudits << "\n";
    out << "download_cost_bits = " << format_fixed(report.download_cost_bits)
        << "\n";
    out << "per_element_cost_bits = "
        << format_fixed(report.per_element_cost_bits) << "\n";
    out << "decoded_blocks = " << join(report.decoded_labels, " ") << "\n";
    for (const ElementReport& element : report.per_element) {
        out << (membership ? "element " : "block ") << element.label << " = ";
        if (element.outcome.byzantine) {
            out << "BYZANTINE";
        } else {
            out << element.outcome.label;
            if (element.refined &&
                *element.refined != element.outcome.label) {
                out << " (refined " << *element.refined << ")";
            }
        }
        out << "\n";
    }
    out << "transcript_digest = " << format_hex(report.transcript_digest)
        << "\n";
    return out.str();
}

} // namespace qpma
