/* C interface to the gnssheight estimation library.
 *
 * All functions return gh_status; out-parameters are written only on GH_OK.
 * After a non-GH_OK return, gh_last_error() yields a message valid on the
 * calling thread until the next failing call. Handles are freed with their
 * matching *_free function; strings returned through char** are released
 * with gh_string_free.
 */
#ifndef GNSSHEIGHT_H
#define GNSSHEIGHT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gh_status {
    GH_OK = 0,
    GH_EINVAL = 1,      /* null/invalid argument */
    GH_EIO = 2,         /* file system failure */
    GH_EPARSE = 3,      /* malformed CSV/JSON input */
    GH_ECONFIG = 4,     /* invalid configuration or parameters */
    GH_EGEOMETRY = 5,   /* geometric precondition violated */
    GH_EDEGENERATE = 6, /* dataset cannot support the operation */
    GH_ENUMERIC = 7,    /* numerical failure */
    GH_EINTERNAL = 8    /* unexpected internal error */
} gh_status;

typedef struct gh_observations gh_observations;
typedef struct gh_footprint gh_footprint;
typedef struct gh_dataset gh_dataset;
typedef struct gh_estimate gh_estimate;

/* 4PL parameters: p(x) = d + (a - d) / (1 + exp(-b (x - c))). */
typedef struct gh_fourpl {
    double a;
    double b;
    double c;
    double d;
} gh_fourpl;

typedef struct gh_convergence {
    int max_iterations;           /* default 10 */
    double label_change_fraction; /* default 0.01 */
    double param_rel_tol;         /* default 1e-4 */
} gh_convergence;

typedef struct gh_summary {
    size_t epochs;           /* distinct timestamps */
    size_t recorded;         /* rows with a C/N0 value */
    size_t blocked;          /* rows with an empty C/N0 cell */
    size_t total;            /* recorded + blocked */
    size_t intersecting;     /* rays entering the footprint (the dataset tuples) */
    size_t inside_footprint; /* rows discarded: receiver inside the footprint */
} gh_summary;

/* Signal-classifier fit against truth labels. The fit and McFadden R2 use
 * received rows; the 0.5-threshold confusion matrix covers every
 * truth-labelled row (blocked rows classify closed). */
typedef struct gh_fit_report {
    gh_fourpl params;
    double log_likelihood; /* summed over fit rows */
    int converged;
    int iterations;
    double mcfadden_r2;
    size_t true_open;    /* truth open, classified open */
    size_t false_open;   /* truth closed, classified open */
    size_t false_closed; /* truth open, classified closed */
    size_t true_closed;  /* truth closed, classified closed */
    size_t fit_rows;     /* rows entering the likelihood */
} gh_fit_report;

const char* gh_version(void);
const char* gh_last_error(void);
void gh_string_free(char* s);

/* Observation logs (CSV; geodetic lat/lon or planar x/y schema). */
gh_status gh_observations_load(const char* path, gh_observations** out);
gh_status gh_observations_parse(const char* csv_text, gh_observations** out);
void gh_observations_free(gh_observations* obs);
gh_status gh_observations_counts(const gh_observations* obs, size_t* rows,
                                 size_t* malformed, size_t* duplicate_pairs);
/* Receiver altitude override: every record's altitude becomes
 * ground_alt + 1.0 (antenna height above terrain). */
gh_status gh_observations_override_altitude(gh_observations* obs, double ground_alt);

/* Building footprints (JSON; local-metres or wgs84 ring). */
gh_status gh_footprint_load(const char* path, gh_footprint** out);
gh_status gh_footprint_parse(const char* json_text, gh_footprint** out);
void gh_footprint_free(gh_footprint* fp);

/* Ray-footprint reduction: elevation filter [elev_min, elev_max], ray entry
 * per record, intersection heights collected into a per-building dataset. */
gh_status gh_dataset_build(const gh_observations* obs, const gh_footprint* fp,
                           double elev_min, double elev_max, gh_dataset** out);
void gh_dataset_free(gh_dataset* ds);
gh_status gh_dataset_summary(const gh_dataset* ds, gh_summary* out);
gh_status gh_dataset_tuple_count(const gh_dataset* ds, size_t* out);

/* algo is one of "4plb", "4pl", "hinge", "bayes". cfg may be NULL for
 * defaults (it only affects "4plb"). Estimation never mutates the dataset;
 * concurrent runs on one dataset are safe. */
gh_status gh_run_estimator(const gh_dataset* ds, const char* algo,
                           const gh_fourpl* init_signal, const gh_convergence* cfg,
                           gh_estimate** out);
void gh_estimate_free(gh_estimate* est);
gh_status gh_estimate_point(const gh_estimate* est, double* out);
gh_status gh_estimate_range(const gh_estimate* est, double* low, double* high);
gh_status gh_estimate_converged(const gh_estimate* est, int* out);
gh_status gh_estimate_iterations(const gh_estimate* est, int* out);
gh_status gh_estimate_map_params(const gh_estimate* est, gh_fourpl* out);
gh_status gh_estimate_signal_params(const gh_estimate* est, gh_fourpl* out);
/* Owned by the estimate; empty string when absent. */
const char* gh_estimate_failure_reason(const gh_estimate* est);
const char* gh_estimate_warning(const gh_estimate* est);
const char* gh_estimate_algorithm(const gh_estimate* est);
gh_status gh_estimate_to_json(const gh_estimate* est, char** out);

/* Synthetic scene: scene_json is the scene config document. seed_override,
 * when non-NULL, replaces the config seed. Outputs: observation CSV, truth
 * JSON, and the footprint JSON re-emitted for downstream estimation. Any
 * output pointer may be NULL to skip it. */
gh_status gh_simulate(const char* scene_json, const uint64_t* seed_override,
                      char** csv_out, char** truth_json_out, char** footprint_json_out);

/* Fits the signal 4PL on truth-labelled received rows. */
gh_status gh_fit_signal_classifier(const gh_observations* obs, const gh_fourpl* init,
                                   gh_fit_report* out);
/* {"a":..., "b":..., "c":..., "d":..., "log_likelihood":..., "converged":...,
 *  "iterations":...} */
gh_status gh_fit_report_to_json(const gh_fit_report* report, char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GNSSHEIGHT_H */
