/*
 * wsnlight C API — wireless sensor network lighting simulator.
 *
 * Scenarios and results are opaque handles; every constructor has a matching
 * _free. Functions returning wsn_status set a thread-local message
 * retrievable with wsn_last_error(). Strings returned as const char* borrow
 * the handle's storage and stay valid until it is freed; strings returned as
 * char** are owned by the caller and released with wsn_string_free().
 */
#ifndef WSNLIGHT_H
#define WSNLIGHT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wsn_status {
    WSN_OK = 0,
    WSN_ERR_ARGUMENT = 1,   /* null handle / bad parameter */
    WSN_ERR_IO = 2,         /* file not readable */
    WSN_ERR_PARSE = 3,      /* malformed scenario text */
    WSN_ERR_VALIDATION = 4, /* scenario violates an invariant */
    WSN_ERR_INTERNAL = 5
} wsn_status;

typedef struct wsn_scenario wsn_scenario;
typedef struct wsn_result wsn_result;

const char* wsn_status_name(wsn_status s);
const char* wsn_last_error(void);

/* ---- scenarios ---------------------------------------------------------- */

wsn_status wsn_scenario_from_file(const char* path, wsn_scenario** out);
wsn_status wsn_scenario_from_string(const char* json_text, wsn_scenario** out);

/* Built-in five-lamp office from the reference result table: 400 lux target,
 * 12 h daily use split into a daylit and a dark half, 30 simulated days. */
wsn_status wsn_scenario_table2(wsn_scenario** out);

void wsn_scenario_free(wsn_scenario* sc);

void wsn_scenario_set_seed(wsn_scenario* sc, uint64_t seed);
void wsn_scenario_set_duration(wsn_scenario* sc, double seconds);
/* csv of record kinds to keep: "tx,rx,drop,state,dim,energy", "all", "none" */
wsn_status wsn_scenario_set_trace(wsn_scenario* sc, const char* kinds_csv);
const char* wsn_scenario_name(const wsn_scenario* sc);

/* WSN_OK (possibly with warnings) or WSN_ERR_VALIDATION. *diagnostics_out,
 * when non-null, receives the newline-joined diagnostic list. */
wsn_status wsn_scenario_validate(const wsn_scenario* sc, char** diagnostics_out);

/* ---- simulation ---------------------------------------------------------- */

wsn_status wsn_run(const wsn_scenario* sc, wsn_result** out);
void wsn_result_free(wsn_result* r);

const char* wsn_result_trace_text(wsn_result* r);  /* tab-separated records */
const char* wsn_result_report_text(wsn_result* r); /* one metric per line */
const char* wsn_result_report_csv(wsn_result* r);

typedef struct wsn_energy {
    double total_wh_day;
    double total_wh_month;
    double baseline_wh_day;
    double baseline_wh_month;
    double savings_wh_month;
} wsn_energy;

wsn_status wsn_result_energy(const wsn_result* r, wsn_energy* out);

/* Seconds until the master entered normal operation; negative if it never
 * finished commissioning within the run. */
double wsn_result_commissioning_time(const wsn_result* r);

/* ---- closed-form reference arithmetic ------------------------------------- */

typedef struct wsn_table2_figures {
    double normal_wh_day;    /* 2400 */
    double normal_wh_month;  /* 72000 */
    double proposed_wh_day;  /* 1920 */
    double proposed_wh_month; /* 57600 */
    double savings_wh_month; /* 14400 */
} wsn_table2_figures;

/* The reference comparison computed by the energy ledger alone: five 40 W
 * lamps, 12 h/day; the proposed schedule runs the four corner lamps at half
 * power for the daylit six hours. */
void wsn_table2_arithmetic(wsn_table2_figures* out);

void wsn_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* WSNLIGHT_H */
