/* imsprep: EM-based preprocessing for MCC/IMS spectrum-chromatograms.
 *
 * C API of the shared library. All functions return an imsprep_status;
 * on failure imsprep_last_error() yields a thread-local message. Objects
 * are opaque handles owned by the caller and released with the matching
 * _destroy / imsprep_string_free call.
 */
#ifndef IMSPREP_H
#define IMSPREP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum imsprep_status {
    IMSPREP_OK = 0,
    IMSPREP_ERR_CONTRACT = 1,
    IMSPREP_ERR_IO = 2,
    IMSPREP_ERR_FORMAT = 3,
    IMSPREP_ERR_NUMERIC = 4,
    IMSPREP_ERR_MODEL = 5,
    IMSPREP_ERR_UNKNOWN = 6
} imsprep_status;

typedef struct imsprep_imsc imsprep_imsc;
typedef struct imsprep_peak_set imsprep_peak_set;
typedef struct imsprep_clustering imsprep_clustering;

const char* imsprep_version(void);

/* Message of the last failing call on this thread; empty string if none. */
const char* imsprep_last_error(void);

/* Deterministic per-stream seed derivation shared with the CLI. */
uint64_t imsprep_derive_seed(uint64_t seed, uint64_t stream);

void imsprep_string_free(char* text);

/* ---- spectrum-chromatogram matrices ---------------------------------- */

imsprep_status imsprep_imsc_create(size_t rows, size_t cols, double retention_max, double rim_max,
                                   imsprep_imsc** out);
void imsprep_imsc_destroy(imsprep_imsc* imsc);
size_t imsprep_imsc_rows(const imsprep_imsc* imsc);
size_t imsprep_imsc_cols(const imsprep_imsc* imsc);
imsprep_status imsprep_imsc_get(const imsprep_imsc* imsc, size_t row, size_t col, double* out);
imsprep_status imsprep_imsc_set(imsprep_imsc* imsc, size_t row, size_t col, double value);

imsprep_status imsprep_imsc_read_csv(const char* path, imsprep_imsc** out);
imsprep_status imsprep_imsc_write_csv(const imsprep_imsc* imsc, const char* path);

/* ---- denoising -------------------------------------------------------- */

typedef struct imsprep_denoise_report {
    double mu_n, sigma_n, mu_s, lambda_s;
    double omega_n, omega_s, omega_b;
    size_t iterations;
    int converged;
} imsprep_denoise_report;

imsprep_status imsprep_denoise_em(const imsprep_imsc* input, int rho, double epsilon,
                                  size_t max_iterations, int uniform_range_raw, imsprep_imsc** out,
                                  imsprep_denoise_report* report /* may be NULL */);

imsprep_status imsprep_smooth_gaussian(const imsprep_imsc* input, int window, double sigma,
                                       imsprep_imsc** out);
imsprep_status imsprep_smooth_savitzky_golay(const imsprep_imsc* input, int window, int order,
                                             imsprep_imsc** out);
imsprep_status imsprep_smooth_fft_lowpass(const imsprep_imsc* input, double cutoff_fraction,
                                          imsprep_imsc** out);

/* ---- baseline correction ---------------------------------------------- */

typedef struct imsprep_baseline_report {
    size_t columns;
    size_t converged_columns;
    size_t max_iterations_used;
    double mean_subtracted_level;
} imsprep_baseline_report;

imsprep_status imsprep_baseline_em(const imsprep_imsc* input, double epsilon, size_t max_iterations,
                                   imsprep_imsc** out, imsprep_baseline_report* report /* may be NULL */);
imsprep_status imsprep_baseline_naive(const imsprep_imsc* input, imsprep_imsc** out);
imsprep_status imsprep_baseline_median(const imsprep_imsc* input, imsprep_imsc** out);

/* ---- peak lists -------------------------------------------------------- */

imsprep_status imsprep_peaks_create(imsprep_peak_set** out);
void imsprep_peaks_destroy(imsprep_peak_set* peaks);
size_t imsprep_peaks_size(const imsprep_peak_set* peaks);
/* label < 0 means "unknown" */
imsprep_status imsprep_peaks_add(imsprep_peak_set* peaks, const char* measurement, int64_t peak_id,
                                 double retention_s, double rim, int64_t label);
imsprep_status imsprep_peaks_get(const imsprep_peak_set* peaks, size_t index, const char** measurement,
                                 int64_t* peak_id, double* retention_s, double* rim, int64_t* label);
imsprep_status imsprep_peaks_read_csv(const char* path, imsprep_peak_set** out);
imsprep_status imsprep_peaks_write_csv(const imsprep_peak_set* peaks, const char* path);

/* ---- clustering -------------------------------------------------------- */

typedef struct imsprep_cluster_report {
    size_t clusters;
    size_t iterations;
    int converged;
    size_t merges;
} imsprep_cluster_report;

imsprep_status imsprep_cluster_em(const imsprep_peak_set* peaks, double epsilon, size_t max_iterations,
                                  imsprep_clustering** out, imsprep_cluster_report* report);
imsprep_status imsprep_cluster_kmeanspp(const imsprep_peak_set* peaks, size_t k, uint64_t seed,
                                        imsprep_clustering** out);
imsprep_status imsprep_cluster_dbscan(const imsprep_peak_set* peaks, double eps, size_t min_pts,
                                      imsprep_clustering** out);
void imsprep_clustering_destroy(imsprep_clustering* clustering);
size_t imsprep_clustering_size(const imsprep_clustering* clustering);
imsprep_status imsprep_clustering_assignment(const imsprep_clustering* clustering, size_t peak_index,
                                             size_t* cluster_index);
/* Serializes clusters, assignments and the merge protocol; free with
 * imsprep_string_free. */
imsprep_status imsprep_clustering_to_json(const imsprep_clustering* clustering, char** out);

/* ---- simulation -------------------------------------------------------- */

typedef struct imsprep_sim_config {
    size_t rows, cols;
    uint64_t seed;
    size_t min_peaks, max_peaks;
    int with_noise;
    int with_baseline;
    double noise_intensity; /* sinusoid amplitude */
    /* RIM-axis peak width interval, override of the generator default */
    double sigma_t_min, sigma_t_max;
} imsprep_sim_config;

/* Fills a config with the generator defaults (1200 x 2500, 5..10 peaks,
 * noise on, baseline off). */
void imsprep_sim_config_default(imsprep_sim_config* config);

/* Any output pointer may be NULL when that artifact is not needed.
 * truth_json describes the drawn peaks, noise and baseline. */
imsprep_status imsprep_simulate_imsc(const imsprep_sim_config* config, imsprep_imsc** clean,
                                     imsprep_imsc** corrupted, char** truth_json);

imsprep_status imsprep_simulate_cluster_scenario(uint64_t seed, int with_noise, imsprep_peak_set** out,
                                                 char** truth_json);

/* ---- evaluation metrics ------------------------------------------------ */

imsprep_status imsprep_cosine_similarity(const imsprep_imsc* a, const imsprep_imsc* b, double* out);
imsprep_status imsprep_fmi(size_t n, const int64_t* truth, const int64_t* predicted, double* out);
imsprep_status imsprep_nvi(size_t n, const int64_t* truth, const int64_t* predicted, double* out);

/* ---- experiment runner ------------------------------------------------- */

typedef struct imsprep_experiment_config {
    uint64_t seed;
    size_t replicates;
    size_t rows, cols;
    size_t min_peaks, max_peaks;
    int rho;
    double epsilon;
    size_t max_iterations;
    int smoother_window;
    double gaussian_sigma;
    int savitzky_golay_order;
    double fft_cutoff_fraction;
    double dbscan_eps;
    size_t dbscan_min_pts;
    size_t members_min, members_max;
    double sigma_t_min, sigma_t_max;
    unsigned threads; /* 0 = hardware */
} imsprep_experiment_config;

void imsprep_experiment_config_default(imsprep_experiment_config* config);

/* experiment is one of "denoising", "baseline", "clustering",
 * "clustering_noise". The three outputs are CSV documents; any may be
 * NULL. */
imsprep_status imsprep_run_experiment(const char* experiment, const imsprep_experiment_config* config,
                                      char** scores_csv, char** summary_csv, char** histogram_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IMSPREP_H */
