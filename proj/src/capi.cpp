#include "qpma.h"

#include <cstring>
#include <new>
#include <string>

#include "analysis.hpp"
#include "errors.hpp"
#include "protocol.hpp"
#include "scenario_io.hpp"

struct qpma_scenario {
    qpma::Scenario value;
};

struct qpma_report {
    qpma::AggregationReport value;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

char* copy_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out) {
        std::memcpy(out, s.c_str(), s.size() + 1);
    }
    return out;
}

// Runs a fallible body, translating exceptions into status codes.
template <typename Fn>
qpma_status guarded(Fn&& body) {
    try {
        g_last_error.clear();
        return body();
    } catch (const qpma::ParseError& e) {
        set_error(e.what());
        return QPMA_ERR_PARSE;
    } catch (const qpma::ValidationError& e) {
        set_error(e.what());
        return QPMA_ERR_VALIDATION;
    } catch (const qpma::GuardError& e) {
        set_error(e.what());
        return QPMA_ERR_GUARD;
    } catch (const std::exception& e) {
        set_error(e.what());
        return QPMA_ERROR;
    } catch (...) {
        set_error("unknown error");
        return QPMA_ERROR;
    }
}

} // namespace

extern "C" {

const char* qpma_version(void) { return "1.0.0"; }

const char* qpma_status_name(qpma_status status) {
    switch (status) {
    case QPMA_OK:
        return "ok";
    case QPMA_ERROR:
        return "error";
    case QPMA_ERR_PARSE:
        return "parse error";
    case QPMA_ERR_VALIDATION:
        return "validation error";
    case QPMA_ERR_VERIFICATION:
        return "verification failure";
    case QPMA_ERR_GUARD:
        return "guard exceeded";
    case QPMA_ERR_ARGUMENT:
        return "bad argument";
    }
    return "unknown";
}

const char* qpma_last_error(void) { return g_last_error.c_str(); }

void qpma_string_free(char* text) { delete[] text; }

qpma_status qpma_scenario_load(const char* path, qpma_scenario** out) {
    if (!path || !out) {
        return QPMA_ERR_ARGUMENT;
    }
    return guarded([&] {
        *out = new qpma_scenario{qpma::parse_scenario_file(path)};
        return QPMA_OK;
    });
}

qpma_status qpma_scenario_parse(const char* text, qpma_scenario** out) {
    if (!text || !out) {
        return QPMA_ERR_ARGUMENT;
    }
    return guarded([&] {
        *out = new qpma_scenario{qpma::parse_scenario_text(text)};
        return QPMA_OK;
    });
}

qpma_status qpma_scenario_example(qpma_scenario** out) {
    if (!out) {
        return QPMA_ERR_ARGUMENT;
    }
    return guarded([&] {
        *out = new qpma_scenario{qpma::example_scenario()};
        return QPMA_OK;
    });
}

void qpma_scenario_free(qpma_scenario* scenario) { delete scenario; }

qpma_status qpma_scenario_mode(const qpma_scenario* scenario, qpma_mode* out) {
    if (!scenario || !out) {
        return QPMA_ERR_ARGUMENT;
    }
    *out = scenario->value.mode == qpma::ScenarioMode::Membership
               ? QPMA_MODE_MEMBERSHIP
               : QPMA_MODE_SUMMATION;
    return QPMA_OK;
}

qpma_status qpma_scenario_set_seed(qpma_scenario* scenario, uint64_t seed) {
    if (!scenario) {
        return QPMA_ERR_ARGUMENT;
    }
    scenario->value.master_seed = seed;
    return QPMA_OK;
}

qpma_status qpma_scenario_set_leader_encodes(qpma_scenario* scenario,
                                             int leader_encodes) {
    if (!scenario) {
        return QPMA_ERR_ARGUMENT;
    }
    scenario->value.leader_encodes = leader_encodes != 0;
    return QPMA_OK;
}

qpma_status qpma_scenario_set_membership_q(qpma_scenario* scenario, double q) {
    if (!scenario) {
        return QPMA_ERR_ARGUMENT;
    }
    return guarded([&] {
        qpma::Scenario updated = scenario->value;
        updated.party_sets.reset();
        updated.membership_q = q;
        updated.validate();
        scenario->value = std::move(updated);
        return QPMA_OK;
    });
}

qpma_status qpma_scenario_render(const qpma_scenario* scenario, char** text) {
    if (!scenario || !text) {
        return QPMA_ERR_ARGUMENT;
    }
    return guarded([&] {
        *text = copy_string(qpma::render_scenario(scenario->value));
        return *text ? QPMA_OK : QPMA_ERROR;
    });
}

qpma_status qpma_run(const qpma_scenario* scenario, qpma_report** out) {
    if (!scenario || !out) {
        return QPMA_ERR_ARGUMENT;
    }
    return guarded([&] {
        *out = new qpma_report{qpma::execute(scenario->value).report};
        return QPMA_OK;
    });
}

void qpma_report_free(qpma_report* report) { delete report; }

qpma_status qpma_report_render(const qpma_report* report, char** text) {
    if (!report || !text) {
        return QPMA_ERR_ARGUMENT;
    }
    return guarded([&] {
        *text = copy_string(qpma::render_report(report->value));
        return *text ? QPMA_OK : QPMA_ERROR;
    });
}

qpma_status qpma_report_element_count(const qpma_report* report, size_t* out) {
    if (!report || !out) {
        return QPMA_ERR_ARGUMENT;
    }
    *out = report->value.per_element.size();
    return QPMA_OK;
}

qpma_status qpma_report_outcome(const qpma_report* report, size_t index,
                                int64_t* count, int* byzantine) {
    if (!report || !count || !byzantine) {
        return QPMA_ERR_ARGUMENT;
    }
    if (index >= report->value.per_element.size()) {
        set_error("outcome index out of range");
        return QPMA_ERR_ARGUMENT;
    }
    const qpma::ElementReport& element = report->value.per_element[index];
    *byzantine = element.outcome.byzantine ? 1 : 0;
    if (element.outcome.byzantine) {
        *count = -1;
    } else if (element.refined) {
        *count = *element.refined;
    } else {
        *count = element.outcome.label;
    }
    return QPMA_OK;
}

qpma_status qpma_report_digest(const qpma_report* report, uint64_t* out) {
    if (!report || !out) {
        return QPMA_ERR_ARGUMENT;
    }
    *out = report->value.transcript_digest;
    return QPMA_OK;
}

qpma_status qpma_report_download_cost(const qpma_report* report, double* bits,
                                      size_t* qudits) {
    if (!report || !bits || !qudits) {
        return QPMA_ERR_ARGUMENT;
    }
    *bits = report->value.download_cost_bits;
    *qudits = report->value.downloaded_qudits;
    return QPMA_OK;
}

void qpma_verify_options_init(qpma_verify_options* options) {
    if (!options) {
        return;
    }
    options->max_parties = 3;
    options->max_blocks = 2;
    options->max_prime = 3;
    options->trials = 2000;
    options->seed = 1;
}

qpma_status qpma_verify(const qpma_verify_options* options, char** text,
                        int* all_passed) {
    if (!options || !text || !all_passed) {
        return QPMA_ERR_ARGUMENT;
    }
    return guarded([&]() -> qpma_status {
        qpma::VerifyOptions opts;
        opts.max_parties = options->max_parties;
        opts.max_blocks = options->max_blocks;
        opts.max_prime = options->max_prime;
        opts.trials = options->trials;
        opts.seed = options->seed;
        const qpma::VerifyReport report = qpma::run_verification_grid(opts);
        *text = copy_string(qpma::render_verification(report));
        if (!*text) {
            return QPMA_ERROR;
        }
        *all_passed = report.all_pass() ? 1 : 0;
        if (!report.all_pass()) {
            set_error("verification grid reported failing cases");
            return QPMA_ERR_VERIFICATION;
        }
        return QPMA_OK;
    });
}

} // extern "C"
