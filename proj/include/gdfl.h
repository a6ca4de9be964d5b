/* C API of the gdfl shared library: a deterministic decentralized federated
 * learning simulator with per-node, per-round, per-phase energy and CO2
 * accounting. All objects are opaque handles; every call that can fail
 * returns a gdfl_status, with a thread-local message behind gdfl_last_error().
 *
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with gdfl_string_free().
 */
#ifndef GDFL_H
#define GDFL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gdfl_status {
  GDFL_OK = 0,
  GDFL_E_PARSE = 1,      /* malformed JSON / CSV */
  GDFL_E_SCHEMA = 2,     /* missing or mistyped field */
  GDFL_E_VALIDATION = 3, /* invariant violated (message names the field) */
  GDFL_E_IO = 4,         /* unreadable / unwritable path */
  GDFL_E_NUMERIC = 5,    /* training diverged */
  GDFL_E_RUNTIME = 6,    /* other runtime failure */
  GDFL_E_ARG = 7         /* null handle or bad argument */
} gdfl_status;

typedef struct gdfl_scenario gdfl_scenario; /* validated scenario config */
typedef struct gdfl_run gdfl_run;           /* run result / imported ledger */

uint32_t gdfl_abi_version(void);
const char* gdfl_status_name(gdfl_status status);

/* Message for the most recent failure on this thread; never NULL. */
const char* gdfl_last_error(void);

void gdfl_string_free(char* s);

/* --- scenarios --------------------------------------------------------- */

gdfl_status gdfl_scenario_load_file(const char* path, gdfl_scenario** out);
gdfl_status gdfl_scenario_load_json(const char* json_text, gdfl_scenario** out);
void gdfl_scenario_free(gdfl_scenario* scenario);

/* Canonical JSON form (stable key order, lossless floats). */
gdfl_status gdfl_scenario_to_json(const gdfl_scenario* scenario, char** out_json);
gdfl_status gdfl_scenario_fingerprint(const gdfl_scenario* scenario, char** out_hex);

/* Converts a profile registry CSV into the scenario "nodes" JSON array. */
gdfl_status gdfl_profiles_csv_to_json(const char* path, char** out_json);

/* --- runs -------------------------------------------------------------- */

gdfl_status gdfl_run_scenario(const gdfl_scenario* scenario, gdfl_run** out);
void gdfl_run_free(gdfl_run* run);

/* format: "csv" or "json". */
gdfl_status gdfl_run_export(const gdfl_run* run, const char* format, const char* path);
gdfl_status gdfl_run_summary_json(const gdfl_run* run, char** out_json);
gdfl_status gdfl_run_fingerprint(const gdfl_run* run, char** out_hex);

/* Neighbor lists of the run's topology as a JSON array of arrays. */
gdfl_status gdfl_run_adjacency_json(const gdfl_run* run, char** out_json);

/* Re-import a previously exported ledger (.csv or .json). */
gdfl_status gdfl_ledger_load(const char* path, gdfl_run** out);

#ifdef __cplusplus
}
#endif

#endif /* GDFL_H */
