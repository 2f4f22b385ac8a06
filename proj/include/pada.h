/* C interface to the PADA library: functional time series fitting,
 * reconstruction, forecasting, simulation and benchmarking behind opaque
 * handles. Every function returns a status; the message for the most recent
 * failure on the calling thread is available from pada_last_error(). */
#ifndef PADA_H
#define PADA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PADA_API __declspec(dllexport)
#else
#define PADA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pada_status {
  PADA_OK = 0,
  PADA_ERR_INVALID_ARGUMENT = 1,
  PADA_ERR_DIMENSION = 2,
  PADA_ERR_IO = 3,
  PADA_ERR_PARSE = 4,
  PADA_ERR_NUMERIC = 5,
  PADA_ERR_CHECKSUM = 6,
  PADA_ERR_UNKNOWN_KEY = 7,
  PADA_ERR_INTERNAL = 8
} pada_status;

typedef struct pada_config pada_config;
typedef struct pada_dataset pada_dataset;
typedef struct pada_model pada_model;

PADA_API const char* pada_version(void);
/* message of the last failed call on this thread; empty string if none */
PADA_API const char* pada_last_error(void);
/* frees strings returned through char** out-parameters */
PADA_API void pada_string_free(char* s);

/* ---- configuration -------------------------------------------------- */
/* A config holds model, simulation and run options. Keys and values match
 * the JSON run-config schema; apply merges one JSON object, so later calls
 * override earlier ones (file first, then flag overrides). */
PADA_API pada_status pada_config_create(pada_config** out);
PADA_API void pada_config_destroy(pada_config* cfg);
PADA_API pada_status pada_config_apply_json(pada_config* cfg,
                                            const char* json_text);
PADA_API pada_status pada_config_get_f64(const pada_config* cfg,
                                         const char* key, double* out);
PADA_API pada_status pada_config_get_i64(const pada_config* cfg,
                                         const char* key, int64_t* out);
PADA_API pada_status pada_config_get_str(const pada_config* cfg,
                                         const char* key, char** out);

/* ---- datasets ------------------------------------------------------- */
PADA_API pada_status pada_dataset_create(pada_dataset** out);
PADA_API void pada_dataset_destroy(pada_dataset* data);
/* times ascending in [0,1]; curve index is the series position */
PADA_API pada_status pada_dataset_add_curve(pada_dataset* data,
                                            const double* times,
                                            const double* values, size_t n);
/* `curve_id,time,value` file; ascending id defines the series order */
PADA_API pada_status pada_dataset_read_csv(const char* path,
                                           pada_dataset** out);
PADA_API pada_status pada_dataset_write_csv(const pada_dataset* data,
                                            const char* path);
PADA_API size_t pada_dataset_curve_count(const pada_dataset* data);
/* ids missing inside the file's id range (empty curves, skipped on read) */
PADA_API size_t pada_dataset_gap_count(const pada_dataset* data);
PADA_API long pada_dataset_gap_id(const pada_dataset* data, size_t i);

/* generates the synthetic benchmark panel selected by the config */
PADA_API pada_status pada_simulate_dataset(const pada_config* cfg,
                                           pada_dataset** out);

/* ---- models --------------------------------------------------------- */
PADA_API pada_status pada_fit(const pada_dataset* data,
                              const pada_config* cfg, pada_model** out);
PADA_API void pada_model_destroy(pada_model* model);
/* bundle directory: manifest.json plus checksummed binary arrays */
PADA_API pada_status pada_model_save(const pada_model* model,
                                     const char* dir);
PADA_API pada_status pada_model_load(const char* dir, pada_model** out);

PADA_API size_t pada_model_component_count(const pada_model* model);
PADA_API size_t pada_model_grid_size(const pada_model* model);
PADA_API size_t pada_model_curve_count(const pada_model* model);
/* original curve id of series position j (0-based); j+1 when the model was
 * fitted without ids */
PADA_API long pada_model_curve_id(const pada_model* model, size_t j);
PADA_API pada_status pada_model_sigma2(const pada_model* model, double* out);
PADA_API pada_status pada_model_lag_span(const pada_model* model, size_t k,
                                         int* out);
PADA_API pada_status pada_model_sup_norm(const pada_model* model, size_t k,
                                         double* out);
/* fitted mean on the grid; out has grid_size entries */
PADA_API pada_status pada_model_mean(const pada_model* model, double* out);
/* one-line-per-field summary (diagnostics, norms, lags) as JSON text */
PADA_API pada_status pada_model_info_json(const pada_model* model,
                                          char** out);

/* ---- reconstruction and forecasting --------------------------------- */
/* fitted curves for the whole training span; out is curve_count x
 * grid_size, row-major */
PADA_API pada_status pada_reconstruct(const pada_model* model, double* out);
/* point forecasts for the next `steps` curves; out is steps x grid_size */
PADA_API pada_status pada_forecast(const pada_model* model, int steps,
                                   double* out);
/* pointwise credible bands; each buffer is rows x grid_size, row-major,
 * rows = curve_count (reconstruction) or steps (forecast). Forecast bands
 * include observation noise, reconstruction bands cover the latent curve.
 * draws <= 0 uses the fitted config's draw count. */
PADA_API pada_status pada_reconstruct_bands(const pada_model* model,
                                            double level, int draws,
                                            uint64_t seed, double* lower,
                                            double* center, double* upper);
PADA_API pada_status pada_forecast_bands(const pada_model* model, int steps,
                                         double level, int draws,
                                         uint64_t seed, double* lower,
                                         double* center, double* upper);

/* ---- benchmarking ---------------------------------------------------- */
/* Monte Carlo study over the configured simulation; returns the report as
 * JSON and as a method-per-row CSV table. Either out pointer may be NULL. */
PADA_API pada_status pada_bench_run(const pada_config* cfg, char** json_out,
                                    char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* PADA_H */
