#ifndef CFRCA_H
#define CFRCA_H

#include <stddef.h>
#include <stdint.h>

#if defined(CFRCA_BUILDING_LIBRARY)
#define CFRCA_API __attribute__((visibility("default")))
#else
#define CFRCA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfrca_status {
    CFRCA_OK = 0,
    CFRCA_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad range, unknown name */
    CFRCA_ERR_VALIDATION = 2,
    CFRCA_ERR_PARSE = 3,
    CFRCA_ERR_NUMERIC = 4,
    CFRCA_ERR_IO = 5,
    CFRCA_ERR_INTERNAL = 6
} cfrca_status;

typedef struct cfrca_panel cfrca_panel;
typedef struct cfrca_dataset cfrca_dataset;
typedef struct cfrca_graph cfrca_graph;
typedef struct cfrca_model cfrca_model;
typedef struct cfrca_report cfrca_report;

/* Message for the last failing call on this thread; never NULL. */
CFRCA_API const char* cfrca_last_error(void);
CFRCA_API const char* cfrca_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
CFRCA_API void cfrca_string_free(char* s);

/* ---- count panels ---- */

CFRCA_API cfrca_status cfrca_panel_from_event_log(const char* csv_text, double slot_width,
                                                  const char* const* variables, size_t n_variables,
                                                  cfrca_panel** out);
CFRCA_API cfrca_status cfrca_panel_from_csv(const char* csv_text, cfrca_panel** out);
CFRCA_API cfrca_status cfrca_panel_to_csv(const cfrca_panel* panel, char** out);
CFRCA_API size_t cfrca_panel_slots(const cfrca_panel* panel);
CFRCA_API size_t cfrca_panel_variables(const cfrca_panel* panel);
CFRCA_API void cfrca_panel_free(cfrca_panel* panel);

/* Relevance report as JSON; *filtered keeps the retained variables. */
CFRCA_API cfrca_status cfrca_relevance_filter(const cfrca_panel* panel, const char* target, double alpha,
                                              double periodicity_threshold, uint64_t seed, char** report_json,
                                              cfrca_panel** filtered);

/* ---- simulator ---- */

typedef struct cfrca_sim_config {
    size_t n_slots;
    double baseline_rate;
    double coupling_weight;
    double alarm_gain;
    double nominal_threshold;
    double fault_ramp;
    uint64_t seed;
} cfrca_sim_config;

CFRCA_API void cfrca_sim_config_default(cfrca_sim_config* config);
CFRCA_API cfrca_status cfrca_simulate(const cfrca_sim_config* config, size_t n_instances, cfrca_dataset** out);
CFRCA_API cfrca_status cfrca_generate_normal(const cfrca_sim_config* config, cfrca_panel** out);
CFRCA_API cfrca_status cfrca_dataset_save(const cfrca_dataset* dataset, const char* dir);
CFRCA_API cfrca_status cfrca_dataset_load(const char* dir, cfrca_dataset** out);
CFRCA_API size_t cfrca_dataset_size(const cfrca_dataset* dataset);
CFRCA_API cfrca_status cfrca_dataset_instance(const cfrca_dataset* dataset, size_t index, cfrca_panel** panel,
                                              char** injected_channel, size_t* true_poif, size_t* crash_slot);
CFRCA_API void cfrca_dataset_free(cfrca_dataset* dataset);

/* ---- causal graphs ---- */

CFRCA_API cfrca_status cfrca_ground_truth_graph(cfrca_graph** out);
/* PC-stable over each instance's slots up to its crash, lag-augmented and pooled. */
CFRCA_API cfrca_status cfrca_discover(const cfrca_dataset* dataset, int max_lag, double alpha, cfrca_graph** out);
CFRCA_API cfrca_status cfrca_graph_to_json(const cfrca_graph* graph, char** out);
CFRCA_API cfrca_status cfrca_graph_from_json(const char* json_text, cfrca_graph** out);
CFRCA_API cfrca_status cfrca_graph_shd(const cfrca_graph* a, const cfrca_graph* b, size_t* out);
CFRCA_API size_t cfrca_graph_edge_count(const cfrca_graph* graph);
CFRCA_API void cfrca_graph_free(cfrca_graph* graph);

/* ---- model ---- */

typedef struct cfrca_train_options {
    int K;
    double smoothing;
    double train_fraction;
    int quantile_binning; /* 0: nominal-envelope edges, 1: equal-frequency edges */
} cfrca_train_options;

CFRCA_API void cfrca_train_options_default(cfrca_train_options* options);
/* Fits on the leading train split; *rmse is the held-out mean RMSE and
   *split_json records both index sets (either may be NULL). */
CFRCA_API cfrca_status cfrca_train(const cfrca_dataset* dataset, const cfrca_graph* graph,
                                   const cfrca_train_options* options, cfrca_model** model, double* rmse,
                                   char** split_json);
CFRCA_API cfrca_status cfrca_model_save(const cfrca_model* model, const char* path);
CFRCA_API cfrca_status cfrca_model_load(const char* path, cfrca_model** out);
CFRCA_API cfrca_status cfrca_model_to_json(const cfrca_model* model, char** out);
CFRCA_API void cfrca_model_free(cfrca_model* model);

/* ---- diagnosis ---- */

typedef struct cfrca_diagnose_options {
    double theta;
    size_t alpha_steps;       /* used when alphas is NULL */
    const double* alphas;     /* explicit counts for the recourse sweep */
    size_t n_alphas;
    int most_likely_first;    /* 0: least likely path ranked first */
} cfrca_diagnose_options;

CFRCA_API void cfrca_diagnose_options_default(cfrca_diagnose_options* options);
CFRCA_API cfrca_status cfrca_diagnose(const cfrca_model* model, const cfrca_panel* panel,
                                      const cfrca_diagnose_options* options, cfrca_report** out);
CFRCA_API int cfrca_report_detected(const cfrca_report* report);
CFRCA_API size_t cfrca_report_poif(const cfrca_report* report);
CFRCA_API size_t cfrca_report_path_count(const cfrca_report* report);
CFRCA_API size_t cfrca_report_recourse_count(const cfrca_report* report);
CFRCA_API cfrca_status cfrca_report_to_json(const cfrca_report* report, char** out);
CFRCA_API cfrca_status cfrca_report_pf_csv(const cfrca_report* report, char** out);
CFRCA_API cfrca_status cfrca_report_recourse_csv(const cfrca_report* report, char** out);
CFRCA_API void cfrca_report_free(cfrca_report* report);

/* ---- experiment ---- */

typedef struct cfrca_experiment_options {
    size_t n_instances;
    size_t n_nominal;
    const double* alphas;
    size_t n_alphas;
    int max_lag;
    double theta;
} cfrca_experiment_options;

CFRCA_API void cfrca_experiment_options_default(cfrca_experiment_options* options);
CFRCA_API cfrca_status cfrca_run_experiment(const cfrca_sim_config* config, const cfrca_experiment_options* options,
                                            char** summary_json);

#ifdef __cplusplus
}
#endif

#endif
