/* ict.h - C interface to the interpolation-consistency training library.
 *
 * All functions return ICT_OK (0) on success. On failure they return a
 * nonzero status and leave a human-readable message in ict_last_error()
 * (thread-local). Out-parameters are untouched on failure. Every handle
 * obtained from this API must be released with the matching *_free call.
 */
#ifndef ICT_H
#define ICT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ict_status {
    ICT_OK = 0,
    ICT_ERROR_USAGE = 2,   /* invalid argument, config or file format */
    ICT_ERROR_NUMERIC = 3  /* non-finite loss or gradient during training */
} ict_status;

const char* ict_last_error(void);
const char* ict_version(void);

/* ---- datasets ---------------------------------------------------------- */

typedef struct ict_dataset ict_dataset;

int ict_dataset_two_moons(int64_t n, double noise_sd, uint64_t seed, ict_dataset** out);
int ict_dataset_load_csv(const char* path, int class_count /* 0 = infer */, ict_dataset** out);
int ict_dataset_save_csv(const ict_dataset* ds, const char* path);
int64_t ict_dataset_rows(const ict_dataset* ds);
int ict_dataset_dim(const ict_dataset* ds);
int ict_dataset_class_count(const ict_dataset* ds);
uint64_t ict_dataset_fingerprint(const ict_dataset* ds);
void ict_dataset_free(ict_dataset* ds);

/* ---- models ------------------------------------------------------------ */

typedef struct ict_model ict_model;

int ict_model_load(const char* checkpoint_path, ict_model** out);
int ict_model_save(const ict_model* model, const char* checkpoint_path);
int ict_model_input_dim(const ict_model* model);
int ict_model_class_count(const ict_model* model);

/* Class probabilities for `rows` samples of `cols` features (row-major).
 * probs_out must hold rows * class_count doubles. */
int ict_model_predict(const ict_model* model, const double* x, int64_t rows, int cols,
                      double* probs_out);

/* Error percentage of the model on a labeled dataset. */
int ict_model_error_rate(const ict_model* model, const ict_dataset* ds, double* percent_out);

/* Class-probability lattice written as CSV rows `x,y,p0,...,p{C-1}`.
 * Requires a 2-D input model. */
int ict_model_export_boundary(const ict_model* model, double x_min, double x_max, double y_min,
                              double y_max, int res_x, int res_y, const char* csv_path);

void ict_model_free(ict_model* model);

/* ---- training runs ----------------------------------------------------- */

/* config_text: flat `key = value` lines with optional [section] headers;
 * training settings live under [train] (or as `train.key`). Later lines
 * override earlier ones. Writes manifest.txt, trace.csv and student/teacher
 * checkpoints under out_dir. final_test_error_out may be NULL. */
int ict_train_run(const char* config_text, const char* out_dir, double* final_test_error_out);

/* Runs `trials` training runs with seeds seed+0..seed+trials-1 under
 * out_dir/trial_<i> and writes an aggregate report (mean, sample sd,
 * per-trial errors, config fingerprint) to report_path. */
int ict_experiment_run(const char* config_text, int trials, const char* out_dir,
                       const char* report_path, double* mean_out, double* sd_out);

/* Dataset generation: generator is "two_moons" or "gaussian_clusters";
 * parameters come from [generate] keys in config_text. Writes the CSV and a
 * provenance sidecar at out_path(.meta). */
int ict_generate_run(const char* generator, const char* config_text, const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ICT_H */
