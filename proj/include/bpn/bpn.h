#ifndef BPN_BPN_H
#define BPN_BPN_H

/* C interface to the business process net library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Strings returned through char** parameters are
 * heap copies released with bpn_string_free. Every call returns a status;
 * on failure bpn_last_error() describes the failure for the calling thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BPN_BUILDING)
#    define BPN_API __declspec(dllexport)
#  else
#    define BPN_API __declspec(dllimport)
#  endif
#else
#  define BPN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bpn_model bpn_model;
typedef struct bpn_script bpn_script;

typedef enum bpn_status {
    BPN_OK = 0,
    BPN_ERR_PARSE = 1,         /* syntax, names, duplicate definitions */
    BPN_ERR_ILL_FORMED = 2,    /* a model violates the net constraints */
    BPN_ERR_RULE = 3,          /* a refinement step was rejected */
    BPN_ERR_NO_NET = 4,
    BPN_ERR_SIMULATION = 5,    /* bad environment fragments or firing rules */
    BPN_ERR_SEARCH_BUDGET = 6,
    BPN_ERR_ARGUMENT = 7,      /* null handle or out-parameter */
    BPN_ERR_INTERNAL = 8
} bpn_status;

typedef enum bpn_verdict {
    BPN_REFINES = 0,
    BPN_DOES_NOT_MATCH = 2,
    BPN_SCRIPT_FAILS = 3
} bpn_verdict;

BPN_API const char* bpn_version(void);

/* Message of the last failed call on this thread, "" if none. */
BPN_API const char* bpn_last_error(void);
/* Symbolic error code of the last failure, e.g. "UnknownPort". */
BPN_API const char* bpn_last_error_code(void);
/* 1-based index of the failing script step after BPN_ERR_RULE from
 * bpn_apply, 0 otherwise. */
BPN_API size_t bpn_last_error_step(void);

BPN_API void bpn_string_free(char* s);

BPN_API bpn_status bpn_model_parse(const char* text, const char* file, bpn_model** out);
BPN_API void bpn_model_free(bpn_model* model);
BPN_API bpn_status bpn_model_print(const bpn_model* model, char** out);
BPN_API const char* bpn_model_root(const bpn_model* model);

/* One `CODE location: message` line per violation; *count may be NULL. */
BPN_API bpn_status bpn_model_validate(const bpn_model* model, char** report, size_t* count);

BPN_API bpn_status bpn_model_isomorphic(const bpn_model* a, const bpn_model* b, int* result);

BPN_API bpn_status bpn_script_parse(const char* text, const char* file, bpn_script** out);
BPN_API void bpn_script_free(bpn_script* script);
BPN_API bpn_status bpn_script_print(const bpn_script* script, char** out);
BPN_API size_t bpn_script_length(const bpn_script* script);

/* Replays the script. `refinements` (may be NULL) receives the
 * `old ~> {new, ...}` lines. */
BPN_API bpn_status bpn_apply(const bpn_model* model, const bpn_script* script, bpn_model** out,
                             char** refinements);

BPN_API bpn_status bpn_check(const bpn_model* base, const bpn_model* refined, const bpn_script* script,
                             bpn_verdict* verdict, char** detail);

/* Searches for a script of at most max_steps steps; *out is NULL when none
 * exists. node_limit 0 selects the default budget. */
BPN_API bpn_status bpn_derive(const bpn_model* base, const bpn_model* refined, size_t max_steps,
                              size_t node_limit, bpn_script** out);

/* env_text and *outputs use `port label = payload` lines. `trace` (may be
 * NULL) receives one `process#rule` line per firing. */
BPN_API bpn_status bpn_simulate(const bpn_model* model, const char* env_text, char** outputs, char** trace);

BPN_API bpn_status bpn_check_confluence(const bpn_model* model, const char* env_text, size_t trials,
                                        uint64_t seed, int* confluent);

/* owner NULL selects the root. */
BPN_API bpn_status bpn_export_dot(const bpn_model* model, const char* owner, int depth, char** out);

#ifdef __cplusplus
}
#endif

#endif
