/* qpma: N-party quantum private membership aggregation simulator.
 *
 * C interface to the simulator core. All objects are opaque handles created
 * and destroyed through this API; every fallible call returns a qpma_status
 * and leaves a human-readable message in qpma_last_error() on failure.
 * Returned strings are owned by the caller and released with
 * qpma_string_free().
 */
#ifndef QPMA_H
#define QPMA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QPMA_API __declspec(dllexport)
#else
#define QPMA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qpma_status {
    QPMA_OK = 0,
    QPMA_ERROR = 1,            /* unexpected internal failure */
    QPMA_ERR_PARSE = 2,        /* malformed scenario text or missing file */
    QPMA_ERR_VALIDATION = 3,   /* a scenario invariant is violated */
    QPMA_ERR_VERIFICATION = 4, /* a verification case failed */
    QPMA_ERR_GUARD = 5,        /* a size guard was exceeded */
    QPMA_ERR_ARGUMENT = 6      /* null pointer or bad argument */
} qpma_status;

typedef enum qpma_mode {
    QPMA_MODE_MEMBERSHIP = 0,
    QPMA_MODE_SUMMATION = 1
} qpma_mode;

typedef struct qpma_scenario qpma_scenario;
typedef struct qpma_report qpma_report;

QPMA_API const char* qpma_version(void);
QPMA_API const char* qpma_status_name(qpma_status status);

/* Message for the most recent failure on this thread; empty if none. */
QPMA_API const char* qpma_last_error(void);

QPMA_API void qpma_string_free(char* text);

/* Scenario handles ------------------------------------------------------- */

QPMA_API qpma_status qpma_scenario_load(const char* path,
                                        qpma_scenario** out);
QPMA_API qpma_status qpma_scenario_parse(const char* text,
                                         qpma_scenario** out);
/* The bundled three-party worked example (universe a,b,c,d; leader 1). */
QPMA_API qpma_status qpma_scenario_example(qpma_scenario** out);
QPMA_API void qpma_scenario_free(qpma_scenario* scenario);

QPMA_API qpma_status qpma_scenario_mode(const qpma_scenario* scenario,
                                        qpma_mode* out);
QPMA_API qpma_status qpma_scenario_set_seed(qpma_scenario* scenario,
                                            uint64_t seed);
QPMA_API qpma_status qpma_scenario_set_leader_encodes(qpma_scenario* scenario,
                                                      int leader_encodes);
/* Replaces explicit party sets with seeded Bernoulli(q) membership. */
QPMA_API qpma_status qpma_scenario_set_membership_q(qpma_scenario* scenario,
                                                    double q);
QPMA_API qpma_status qpma_scenario_render(const qpma_scenario* scenario,
                                          char** text);

/* Protocol runs ---------------------------------------------------------- */

/* Executes the scenario (membership aggregation or summation per its mode)
 * and produces a report handle. */
QPMA_API qpma_status qpma_run(const qpma_scenario* scenario,
                              qpma_report** out);
QPMA_API void qpma_report_free(qpma_report* report);

/* Deterministic report text (byte-stable for fixed scenario and seed). */
QPMA_API qpma_status qpma_report_render(const qpma_report* report,
                                        char** text);
QPMA_API qpma_status qpma_report_element_count(const qpma_report* report,
                                               size_t* out);
/* Outcome of one element/block: count is the refined count when the leader's
 * own membership pins it down, otherwise the raw measured label; byzantine is
 * nonzero when the measurement landed in the complement projector. */
QPMA_API qpma_status qpma_report_outcome(const qpma_report* report,
                                         size_t index, int64_t* count,
                                         int* byzantine);
QPMA_API qpma_status qpma_report_digest(const qpma_report* report,
                                        uint64_t* out);
QPMA_API qpma_status qpma_report_download_cost(const qpma_report* report,
                                               double* bits, size_t* qudits);

/* Verification grid ------------------------------------------------------ */

typedef struct qpma_verify_options {
    size_t max_parties;
    size_t max_blocks;
    uint32_t max_prime;
    size_t trials;
    uint64_t seed;
} qpma_verify_options;

QPMA_API void qpma_verify_options_init(qpma_verify_options* options);

/* Runs the verification grid. *all_passed is set to 1/0; the rendered table
 * is returned in *text. Returns QPMA_ERR_VERIFICATION when a case fails. */
QPMA_API qpma_status qpma_verify(const qpma_verify_options* options,
                                 char** text, int* all_passed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QPMA_H */
