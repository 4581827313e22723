#include "imsprep/imsprep.h"

#include <algorithm>
#include <cstring>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "core/baseline.hpp"
#include "core/cluster.hpp"
#include "core/csv_io.hpp"
#include "core/denoise.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "core/simulate.hpp"
#include "core/types.hpp"
#include "core/version.hpp"

using namespace imsprep;

struct imsprep_imsc {
    Imsc value;
};

struct imsprep_peak_set {
    std::vector<PeakLocation> peaks;
};

struct imsprep_clustering {
    Clustering clustering;
    MergeLog merge_log;
    std::vector<PeakLocation> peaks;  // copied so JSON export has the tags
};

namespace {

thread_local std::string last_error;

imsprep_status status_from_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::contract: return IMSPREP_ERR_CONTRACT;
        case ErrorCode::io: return IMSPREP_ERR_IO;
        case ErrorCode::format: return IMSPREP_ERR_FORMAT;
        case ErrorCode::numeric: return IMSPREP_ERR_NUMERIC;
        case ErrorCode::model: return IMSPREP_ERR_MODEL;
    }
    return IMSPREP_ERR_UNKNOWN;
}

// Runs fn, translating exceptions into status codes + last_error.
template <typename Fn>
imsprep_status guarded(Fn&& fn) {
    try {
        fn();
        last_error.clear();
        return IMSPREP_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_from_code(e.code());
    } catch (const std::exception& e) {
        last_error = e.what();
        return IMSPREP_ERR_UNKNOWN;
    } catch (...) {
        last_error = "unknown error";
        return IMSPREP_ERR_UNKNOWN;
    }
}

void require(bool condition, const char* message) {
    if (!condition) throw ContractError(message);
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

nlohmann::json peak_params_json(const std::vector<PeakDescriptors>& descriptors,
                                const std::vector<PeakParams>& params) {
    nlohmann::json peaks = nlohmann::json::array();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const PeakParams& p = params[i];
        const PeakDescriptors& d = descriptors[i];
        peaks.push_back({{"mu_t", p.mu_t},
                         {"lambda_t", p.lambda_t},
                         {"offset_t", p.offset_t},
                         {"mu_r", p.mu_r},
                         {"lambda_r", p.lambda_r},
                         {"offset_r", p.offset_r},
                         {"volume", p.volume},
                         {"mean_t", d.rim.mean},
                         {"stddev_t", d.rim.stddev},
                         {"mode_t", d.rim.mode},
                         {"mean_r", d.retention.mean},
                         {"stddev_r", d.retention.stddev},
                         {"mode_r", d.retention.mode}});
    }
    return peaks;
}

}  // namespace

extern "C" {

const char* imsprep_version(void) { return kVersion; }

const char* imsprep_last_error(void) { return last_error.c_str(); }

uint64_t imsprep_derive_seed(uint64_t seed, uint64_t stream) { return derive_seed(seed, stream); }

void imsprep_string_free(char* text) { delete[] text; }

imsprep_status imsprep_imsc_create(size_t rows, size_t cols, double retention_max, double rim_max,
                                   imsprep_imsc** out) {
    return guarded([&] {
        require(out != nullptr, "imsc_create: null output");
        AxisConfig axes{rows, cols, retention_max, rim_max};
        *out = new imsprep_imsc{Imsc(axes)};
    });
}

void imsprep_imsc_destroy(imsprep_imsc* imsc) { delete imsc; }

size_t imsprep_imsc_rows(const imsprep_imsc* imsc) { return imsc ? imsc->value.rows() : 0; }

size_t imsprep_imsc_cols(const imsprep_imsc* imsc) { return imsc ? imsc->value.cols() : 0; }

imsprep_status imsprep_imsc_get(const imsprep_imsc* imsc, size_t row, size_t col, double* out) {
    return guarded([&] {
        require(imsc && out, "imsc_get: null argument");
        require(row < imsc->value.rows() && col < imsc->value.cols(), "imsc_get: index out of range");
        *out = imsc->value(row, col);
    });
}

imsprep_status imsprep_imsc_set(imsprep_imsc* imsc, size_t row, size_t col, double value) {
    return guarded([&] {
        require(imsc != nullptr, "imsc_set: null handle");
        require(row < imsc->value.rows() && col < imsc->value.cols(), "imsc_set: index out of range");
        imsc->value(row, col) = value;
    });
}

imsprep_status imsprep_imsc_read_csv(const char* path, imsprep_imsc** out) {
    return guarded([&] {
        require(path && out, "imsc_read_csv: null argument");
        *out = new imsprep_imsc{read_imsc(path)};
    });
}

imsprep_status imsprep_imsc_write_csv(const imsprep_imsc* imsc, const char* path) {
    return guarded([&] {
        require(imsc && path, "imsc_write_csv: null argument");
        write_imsc(imsc->value, path);
    });
}

imsprep_status imsprep_denoise_em(const imsprep_imsc* input, int rho, double epsilon,
                                  size_t max_iterations, int uniform_range_raw, imsprep_imsc** out,
                                  imsprep_denoise_report* report) {
    return guarded([&] {
        require(input && out, "denoise_em: null argument");
        em::Config config{epsilon, max_iterations};
        DenoiseResult result = denoise_em(input->value, rho, config, uniform_range_raw != 0);
        if (report) {
            *report = {result.params.mu_n,    result.params.sigma_n, result.params.mu_s,
                       result.params.lambda_s, result.params.omega_n, result.params.omega_s,
                       result.params.omega_b,  result.iterations,     result.converged ? 1 : 0};
        }
        *out = new imsprep_imsc{std::move(result.denoised)};
    });
}

imsprep_status imsprep_smooth_gaussian(const imsprep_imsc* input, int window, double sigma,
                                       imsprep_imsc** out) {
    return guarded([&] {
        require(input && out, "smooth_gaussian: null argument");
        *out = new imsprep_imsc{smooth_gaussian(input->value, window, sigma)};
    });
}

imsprep_status imsprep_smooth_savitzky_golay(const imsprep_imsc* input, int window, int order,
                                             imsprep_imsc** out) {
    return guarded([&] {
        require(input && out, "smooth_savitzky_golay: null argument");
        *out = new imsprep_imsc{smooth_savitzky_golay(input->value, window, order)};
    });
}

imsprep_status imsprep_smooth_fft_lowpass(const imsprep_imsc* input, double cutoff_fraction,
                                          imsprep_imsc** out) {
    return guarded([&] {
        require(input && out, "smooth_fft_lowpass: null argument");
        *out = new imsprep_imsc{smooth_fft_lowpass(input->value, cutoff_fraction)};
    });
}

imsprep_status imsprep_baseline_em(const imsprep_imsc* input, double epsilon, size_t max_iterations,
                                   imsprep_imsc** out, imsprep_baseline_report* report) {
    return guarded([&] {
        require(input && out, "baseline_em: null argument");
        em::Config config{epsilon, max_iterations};
        BaselineCorrection result = correct_baseline_em(input->value, config);
        if (report) {
            imsprep_baseline_report r{result.fits.size(), 0, 0, 0.0};
            for (const BaselineFit& fit : result.fits) {
                if (fit.converged) ++r.converged_columns;
                r.max_iterations_used = std::max(r.max_iterations_used, fit.iterations);
                r.mean_subtracted_level += fit.b;
            }
            if (!result.fits.empty()) r.mean_subtracted_level /= static_cast<double>(result.fits.size());
            *report = r;
        }
        *out = new imsprep_imsc{std::move(result.corrected)};
    });
}

imsprep_status imsprep_baseline_naive(const imsprep_imsc* input, imsprep_imsc** out) {
    return guarded([&] {
        require(input && out, "baseline_naive: null argument");
        *out = new imsprep_imsc{baseline_naive(input->value)};
    });
}

imsprep_status imsprep_baseline_median(const imsprep_imsc* input, imsprep_imsc** out) {
    return guarded([&] {
        require(input && out, "baseline_median: null argument");
        *out = new imsprep_imsc{baseline_median(input->value)};
    });
}

imsprep_status imsprep_peaks_create(imsprep_peak_set** out) {
    return guarded([&] {
        require(out != nullptr, "peaks_create: null output");
        *out = new imsprep_peak_set{};
    });
}

void imsprep_peaks_destroy(imsprep_peak_set* peaks) { delete peaks; }

size_t imsprep_peaks_size(const imsprep_peak_set* peaks) { return peaks ? peaks->peaks.size() : 0; }

imsprep_status imsprep_peaks_add(imsprep_peak_set* peaks, const char* measurement, int64_t peak_id,
                                 double retention_s, double rim, int64_t label) {
    return guarded([&] {
        require(peaks && measurement, "peaks_add: null argument");
        require(retention_s >= 0.0 && rim >= 0.0, "peaks_add: coordinates must be nonnegative");
        PeakLocation p;
        p.measurement = measurement;
        p.peak_id = peak_id;
        p.retention = retention_s;
        p.rim = rim;
        if (label >= 0) p.truth_label = label;
        peaks->peaks.push_back(std::move(p));
    });
}

imsprep_status imsprep_peaks_get(const imsprep_peak_set* peaks, size_t index, const char** measurement,
                                 int64_t* peak_id, double* retention_s, double* rim, int64_t* label) {
    return guarded([&] {
        require(peaks != nullptr, "peaks_get: null handle");
        require(index < peaks->peaks.size(), "peaks_get: index out of range");
        const PeakLocation& p = peaks->peaks[index];
        if (measurement) *measurement = p.measurement.c_str();
        if (peak_id) *peak_id = p.peak_id;
        if (retention_s) *retention_s = p.retention;
        if (rim) *rim = p.rim;
        if (label) *label = p.truth_label ? *p.truth_label : -1;
    });
}

imsprep_status imsprep_peaks_read_csv(const char* path, imsprep_peak_set** out) {
    return guarded([&] {
        require(path && out, "peaks_read_csv: null argument");
        *out = new imsprep_peak_set{read_peaks(path)};
    });
}

imsprep_status imsprep_peaks_write_csv(const imsprep_peak_set* peaks, const char* path) {
    return guarded([&] {
        require(peaks && path, "peaks_write_csv: null argument");
        write_peaks(peaks->peaks, path);
    });
}

imsprep_status imsprep_cluster_em(const imsprep_peak_set* peaks, double epsilon, size_t max_iterations,
                                  imsprep_clustering** out, imsprep_cluster_report* report) {
    return guarded([&] {
        require(peaks && out, "cluster_em: null argument");
        em::Config config{epsilon, max_iterations};
        EmClusterResult result = em_cluster(peaks->peaks, config);
        if (report) {
            *report = {result.clustering.clusters.size(), result.iterations, result.converged ? 1 : 0,
                       result.merge_log.size()};
        }
        *out = new imsprep_clustering{std::move(result.clustering), std::move(result.merge_log),
                                      peaks->peaks};
    });
}

imsprep_status imsprep_cluster_kmeanspp(const imsprep_peak_set* peaks, size_t k, uint64_t seed,
                                        imsprep_clustering** out) {
    return guarded([&] {
        require(peaks && out, "cluster_kmeanspp: null argument");
        *out = new imsprep_clustering{kmeanspp_cluster(peaks->peaks, k, seed), {}, peaks->peaks};
    });
}

imsprep_status imsprep_cluster_dbscan(const imsprep_peak_set* peaks, double eps, size_t min_pts,
                                      imsprep_clustering** out) {
    return guarded([&] {
        require(peaks && out, "cluster_dbscan: null argument");
        *out = new imsprep_clustering{dbscan_cluster(peaks->peaks, eps, min_pts), {}, peaks->peaks};
    });
}

void imsprep_clustering_destroy(imsprep_clustering* clustering) { delete clustering; }

size_t imsprep_clustering_size(const imsprep_clustering* clustering) {
    return clustering ? clustering->clustering.clusters.size() : 0;
}

imsprep_status imsprep_clustering_assignment(const imsprep_clustering* clustering, size_t peak_index,
                                             size_t* cluster_index) {
    return guarded([&] {
        require(clustering && cluster_index, "clustering_assignment: null argument");
        require(peak_index < clustering->clustering.assignments.size(),
                "clustering_assignment: index out of range");
        *cluster_index = clustering->clustering.assignments[peak_index];
    });
}

imsprep_status imsprep_clustering_to_json(const imsprep_clustering* clustering, char** out) {
    return guarded([&] {
        require(clustering && out, "clustering_to_json: null argument");
        *out = copy_string(
            clustering_to_json(clustering->clustering, &clustering->merge_log, clustering->peaks));
    });
}

void imsprep_sim_config_default(imsprep_sim_config* config) {
    if (!config) return;
    const DescriptorIntervals intervals;
    config->rows = 1200;
    config->cols = 2500;
    config->seed = 1;
    config->min_peaks = 5;
    config->max_peaks = 10;
    config->with_noise = 1;
    config->with_baseline = 0;
    config->noise_intensity = 1.0;
    config->sigma_t_min = intervals.sigma_t_min;
    config->sigma_t_max = intervals.sigma_t_max;
}

imsprep_status imsprep_simulate_imsc(const imsprep_sim_config* config, imsprep_imsc** clean,
                                     imsprep_imsc** corrupted, char** truth_json) {
    return guarded([&] {
        require(config != nullptr, "simulate_imsc: null config");
        MeasurementConfig mc;
        mc.axes = AxisConfig{config->rows, config->cols};
        mc.min_peaks = config->min_peaks;
        mc.max_peaks = config->max_peaks;
        mc.intervals.sigma_t_min = config->sigma_t_min;
        mc.intervals.sigma_t_max = config->sigma_t_max;
        mc.noise.intensity = config->noise_intensity;
        mc.with_noise = config->with_noise != 0;
        mc.with_baseline = config->with_baseline != 0;
        Rng rng(config->seed);
        Measurement m = simulate_measurement(mc, rng);

        if (truth_json) {
            nlohmann::json doc;
            doc["seed"] = config->seed;
            doc["peaks"] = peak_params_json(m.descriptors, m.peak_params);
            if (m.noise) {
                doc["noise"] = {{"mu", mc.noise.mu},
                                {"sigma", mc.noise.sigma},
                                {"intensity", mc.noise.intensity},
                                {"row_frequencies_hz", m.noise->row_frequencies}};
            }
            if (m.baseline) {
                doc["baseline"] = {{"lambda_alpha", m.baseline->draw.lambda_alpha},
                                   {"lambda_beta", m.baseline->draw.lambda_beta},
                                   {"omega", m.baseline->draw.omega},
                                   {"tau", m.baseline->draw.tau},
                                   {"clamped_rows", m.baseline->draw.clamped_rows}};
            }
            *truth_json = copy_string(doc.dump(2));
        }
        if (corrupted) {
            if (m.baseline) {
                *corrupted = new imsprep_imsc{std::move(m.baseline->with_baseline)};
            } else if (m.noise) {
                *corrupted = new imsprep_imsc{std::move(m.noise->noisy)};
            } else {
                *corrupted = new imsprep_imsc{m.clean};
            }
        }
        if (clean) *clean = new imsprep_imsc{std::move(m.clean)};
    });
}

imsprep_status imsprep_simulate_cluster_scenario(uint64_t seed, int with_noise, imsprep_peak_set** out,
                                                 char** truth_json) {
    return guarded([&] {
        require(out != nullptr, "simulate_cluster_scenario: null output");
        Rng rng(seed);
        LabeledPeakSet set = simulate_cluster_scenario(rng, with_noise != 0);
        if (truth_json) {
            nlohmann::json doc;
            doc["seed"] = seed;
            doc["noise_points"] = set.noise_points;
            doc["clusters"] = nlohmann::json::array();
            for (const ScenarioCluster& c : set.clusters) {
                const char* shape = c.shape == ClusterShape::normal ? "normal"
                                    : c.shape == ClusterShape::exponential ? "exponential"
                                                                           : "uniform_ellipse";
                doc["clusters"].push_back({{"label", c.label},
                                           {"centroid_t", c.centroid_t},
                                           {"centroid_r", c.centroid_r},
                                           {"shape", shape},
                                           {"members", c.member_count}});
            }
            *truth_json = copy_string(doc.dump(2));
        }
        *out = new imsprep_peak_set{std::move(set.peaks)};
    });
}

imsprep_status imsprep_cosine_similarity(const imsprep_imsc* a, const imsprep_imsc* b, double* out) {
    return guarded([&] {
        require(a && b && out, "cosine_similarity: null argument");
        *out = cosine_similarity(a->value, b->value);
    });
}

imsprep_status imsprep_fmi(size_t n, const int64_t* truth, const int64_t* predicted, double* out) {
    return guarded([&] {
        require(truth && predicted && out, "fmi: null argument");
        *out = fmi({truth, n}, {predicted, n});
    });
}

imsprep_status imsprep_nvi(size_t n, const int64_t* truth, const int64_t* predicted, double* out) {
    return guarded([&] {
        require(truth && predicted && out, "nvi: null argument");
        *out = nvi({truth, n}, {predicted, n});
    });
}

void imsprep_experiment_config_default(imsprep_experiment_config* config) {
    if (!config) return;
    const ExperimentConfig defaults;
    config->seed = defaults.seed;
    config->replicates = defaults.replicates;
    config->rows = defaults.rows;
    config->cols = defaults.cols;
    config->min_peaks = defaults.min_peaks;
    config->max_peaks = defaults.max_peaks;
    config->rho = defaults.rho;
    config->epsilon = defaults.em.epsilon;
    config->max_iterations = defaults.em.max_iterations;
    config->smoother_window = defaults.smoother.window;
    config->gaussian_sigma = defaults.smoother.sigma;
    config->savitzky_golay_order = defaults.smoother.order;
    config->fft_cutoff_fraction = defaults.smoother.cutoff_fraction;
    config->dbscan_eps = defaults.dbscan_eps;
    config->dbscan_min_pts = defaults.dbscan_min_pts;
    config->members_min = defaults.scenario.members_min;
    config->members_max = defaults.scenario.members_max;
    config->sigma_t_min = defaults.intervals.sigma_t_min;
    config->sigma_t_max = defaults.intervals.sigma_t_max;
    config->threads = defaults.threads;
}

imsprep_status imsprep_run_experiment(const char* experiment, const imsprep_experiment_config* config,
                                      char** scores_csv, char** summary_csv, char** histogram_csv) {
    return guarded([&] {
        require(experiment && config, "run_experiment: null argument");
        ExperimentConfig cfg;
        cfg.seed = config->seed;
        cfg.replicates = config->replicates;
        cfg.rows = config->rows;
        cfg.cols = config->cols;
        cfg.min_peaks = config->min_peaks;
        cfg.max_peaks = config->max_peaks;
        cfg.rho = config->rho;
        cfg.em.epsilon = config->epsilon;
        cfg.em.max_iterations = config->max_iterations;
        cfg.smoother.window = config->smoother_window;
        cfg.smoother.sigma = config->gaussian_sigma;
        cfg.smoother.order = config->savitzky_golay_order;
        cfg.smoother.cutoff_fraction = config->fft_cutoff_fraction;
        cfg.dbscan_eps = config->dbscan_eps;
        cfg.dbscan_min_pts = config->dbscan_min_pts;
        cfg.scenario.members_min = config->members_min;
        cfg.scenario.members_max = config->members_max;
        cfg.intervals.sigma_t_min = config->sigma_t_min;
        cfg.intervals.sigma_t_max = config->sigma_t_max;
        cfg.threads = config->threads;

        const ExperimentResult result = run_experiment(experiment_kind_from_name(experiment), cfg);
        if (scores_csv) *scores_csv = copy_string(scores_to_csv(result));
        if (summary_csv) *summary_csv = copy_string(summaries_to_csv(result));
        if (histogram_csv) *histogram_csv = copy_string(histograms_to_csv(result));
    });
}

}  // extern "C"
