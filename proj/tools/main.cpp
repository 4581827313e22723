// imsprep command line front end. Links only the public C API of the
// shared library; orchestration of files, manifests and exit codes lives
// here.

#include <sys/stat.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imsprep/imsprep.h"
#include "nlohmann/json.hpp"

namespace {

// exit codes: 0 success, 1 contract/format error, 2 i/o error
int exit_code_for(imsprep_status status) {
    switch (status) {
        case IMSPREP_OK: return 0;
        case IMSPREP_ERR_IO: return 2;
        default: return 1;
    }
}

struct CliError {
    int code;
    std::string message;
};

void check(imsprep_status status, const std::string& context) {
    if (status != IMSPREP_OK) {
        throw CliError{exit_code_for(status), context + ": " + imsprep_last_error()};
    }
}

struct ImscDeleter {
    void operator()(imsprep_imsc* p) const { imsprep_imsc_destroy(p); }
};
struct PeaksDeleter {
    void operator()(imsprep_peak_set* p) const { imsprep_peaks_destroy(p); }
};
struct ClusteringDeleter {
    void operator()(imsprep_clustering* p) const { imsprep_clustering_destroy(p); }
};
using ImscPtr = std::unique_ptr<imsprep_imsc, ImscDeleter>;
using PeaksPtr = std::unique_ptr<imsprep_peak_set, PeaksDeleter>;
using ClusteringPtr = std::unique_ptr<imsprep_clustering, ClusteringDeleter>;

std::string take_string(char* text) {
    std::string out = text ? text : "";
    imsprep_string_free(text);
    return out;
}

void ensure_directory(const std::string& path) {
    struct stat st {};
    if (stat(path.c_str(), &st) == 0) {
        if (!S_ISDIR(st.st_mode)) throw CliError{2, "'" + path + "' exists and is not a directory"};
        return;
    }
    if (mkdir(path.c_str(), 0755) != 0) throw CliError{2, "cannot create directory '" + path + "'"};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{2, "cannot write '" + path + "'"};
    out << content;
    if (!out.flush()) throw CliError{2, "write failed for '" + path + "'"};
}

std::string zero_pad(std::size_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*zu", width, value);
    return buf;
}

ImscPtr read_imsc_file(const std::string& path) {
    imsprep_imsc* raw = nullptr;
    check(imsprep_imsc_read_csv(path.c_str(), &raw), "reading '" + path + "'");
    return ImscPtr(raw);
}

// ---- simulate --------------------------------------------------------

struct SimulateOptions {
    std::uint64_t seed = 1;
    std::size_t replicates = 1;
    std::size_t rows = 1200, cols = 2500;
    std::size_t min_peaks = 5, max_peaks = 10;
    bool no_noise = false;
    bool with_baseline = false;
    double noise_intensity = 1.0;
    double sigma_t_min = 0.0, sigma_t_max = 0.0;  // 0 keeps defaults
    bool scenario = false;
    bool scenario_noise = false;
    std::string out_dir = "out";
};

int run_simulate(const SimulateOptions& opt) {
    ensure_directory(opt.out_dir);

    nlohmann::json manifest;
    manifest["command"] = "simulate";
    manifest["version"] = imsprep_version();
    manifest["seed"] = opt.seed;
    manifest["replicates"] = opt.replicates;

    if (opt.scenario) {
        manifest["kind"] = "scenario";
        manifest["with_noise"] = opt.scenario_noise;
        for (std::size_t rep = 0; rep < opt.replicates; ++rep) {
            const std::uint64_t rep_seed = imsprep_derive_seed(opt.seed, rep);
            imsprep_peak_set* raw_peaks = nullptr;
            char* truth = nullptr;
            check(imsprep_simulate_cluster_scenario(rep_seed, opt.scenario_noise ? 1 : 0, &raw_peaks, &truth),
                  "simulating scenario");
            PeaksPtr peaks(raw_peaks);
            const std::string tag = zero_pad(rep, 3);
            check(imsprep_peaks_write_csv(peaks.get(), (opt.out_dir + "/peaks_" + tag + ".csv").c_str()),
                  "writing peaks");
            write_file(opt.out_dir + "/truth_" + tag + ".json", take_string(truth));
        }
    } else {
        manifest["kind"] = "imsc";
        manifest["rows"] = opt.rows;
        manifest["cols"] = opt.cols;
        manifest["min_peaks"] = opt.min_peaks;
        manifest["max_peaks"] = opt.max_peaks;
        manifest["noise"] = !opt.no_noise;
        manifest["baseline"] = opt.with_baseline;
        for (std::size_t rep = 0; rep < opt.replicates; ++rep) {
            imsprep_sim_config config;
            imsprep_sim_config_default(&config);
            config.rows = opt.rows;
            config.cols = opt.cols;
            config.seed = imsprep_derive_seed(opt.seed, rep);
            config.min_peaks = opt.min_peaks;
            config.max_peaks = opt.max_peaks;
            config.with_noise = opt.no_noise ? 0 : 1;
            config.with_baseline = opt.with_baseline ? 1 : 0;
            config.noise_intensity = opt.noise_intensity;
            if (opt.sigma_t_min > 0.0) config.sigma_t_min = opt.sigma_t_min;
            if (opt.sigma_t_max > 0.0) config.sigma_t_max = opt.sigma_t_max;

            imsprep_imsc* raw_clean = nullptr;
            imsprep_imsc* raw_corrupted = nullptr;
            char* truth = nullptr;
            const bool corrupted_wanted = !opt.no_noise || opt.with_baseline;
            check(imsprep_simulate_imsc(&config, &raw_clean, corrupted_wanted ? &raw_corrupted : nullptr,
                                        &truth),
                  "simulating imsc");
            ImscPtr clean(raw_clean);
            ImscPtr corrupted(raw_corrupted);

            const std::string tag = zero_pad(rep, 3);
            check(imsprep_imsc_write_csv(clean.get(), (opt.out_dir + "/clean_" + tag + ".csv").c_str()),
                  "writing clean imsc");
            if (corrupted) {
                const char* name = opt.with_baseline ? "/baselined_" : "/noisy_";
                check(imsprep_imsc_write_csv(corrupted.get(), (opt.out_dir + name + tag + ".csv").c_str()),
                      "writing corrupted imsc");
            }
            write_file(opt.out_dir + "/truth_" + tag + ".json", take_string(truth));
        }
    }
    write_file(opt.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    return 0;
}

// ---- process ---------------------------------------------------------

struct ProcessOptions {
    std::string input;
    std::string output;
    std::string report_path;
    std::string method;
    int rho = 4;
    double epsilon = 0.001;
    std::size_t max_iterations = 1000;
    bool uniform_range_raw = false;
    int window = 9;
    double sigma = 2.0;
    int order = 2;
    double cutoff = 0.1;
    std::size_t k = 0;
    std::uint64_t seed = 1;
    double dbscan_eps = 1.0;
    std::size_t min_pts = 2;
};

std::string report_path_or_default(const ProcessOptions& opt) {
    return opt.report_path.empty() ? opt.output + ".report.json" : opt.report_path;
}

int run_process_denoise(const ProcessOptions& opt) {
    ImscPtr input = read_imsc_file(opt.input);
    ImscPtr output;
    nlohmann::json report;
    report["command"] = "process denoise";
    report["method"] = opt.method;
    report["input"] = opt.input;
    report["version"] = imsprep_version();

    imsprep_imsc* raw = nullptr;
    if (opt.method == "em") {
        imsprep_denoise_report em_report{};
        check(imsprep_denoise_em(input.get(), opt.rho, opt.epsilon, opt.max_iterations,
                                 opt.uniform_range_raw ? 1 : 0, &raw, &em_report),
              "denoising");
        report["rho"] = opt.rho;
        report["epsilon"] = opt.epsilon;
        report["max_iterations"] = opt.max_iterations;
        report["iterations"] = em_report.iterations;
        report["converged"] = em_report.converged != 0;
        report["mu_n"] = em_report.mu_n;
        report["sigma_n"] = em_report.sigma_n;
        report["mu_s"] = em_report.mu_s;
        report["lambda_s"] = em_report.lambda_s;
        report["omega_n"] = em_report.omega_n;
        report["omega_s"] = em_report.omega_s;
        // a background weight away from zero flags an anomalous measurement
        report["omega_b"] = em_report.omega_b;
    } else if (opt.method == "gaussian") {
        check(imsprep_smooth_gaussian(input.get(), opt.window, opt.sigma, &raw), "smoothing");
        report["window"] = opt.window;
        report["sigma"] = opt.sigma;
    } else if (opt.method == "savitzky_golay") {
        check(imsprep_smooth_savitzky_golay(input.get(), opt.window, opt.order, &raw), "smoothing");
        report["window"] = opt.window;
        report["order"] = opt.order;
    } else if (opt.method == "fft_lowpass") {
        check(imsprep_smooth_fft_lowpass(input.get(), opt.cutoff, &raw), "smoothing");
        report["cutoff_fraction"] = opt.cutoff;
    } else {
        throw CliError{1, "unknown denoise method '" + opt.method + "'"};
    }
    output.reset(raw);
    check(imsprep_imsc_write_csv(output.get(), opt.output.c_str()), "writing '" + opt.output + "'");
    write_file(report_path_or_default(opt), report.dump(2) + "\n");
    return 0;
}

int run_process_baseline(const ProcessOptions& opt) {
    ImscPtr input = read_imsc_file(opt.input);
    nlohmann::json report;
    report["command"] = "process baseline";
    report["method"] = opt.method;
    report["input"] = opt.input;
    report["version"] = imsprep_version();

    imsprep_imsc* raw = nullptr;
    if (opt.method == "em") {
        imsprep_baseline_report em_report{};
        check(imsprep_baseline_em(input.get(), opt.epsilon, opt.max_iterations, &raw, &em_report),
              "correcting baseline");
        report["epsilon"] = opt.epsilon;
        report["max_iterations"] = opt.max_iterations;
        report["columns"] = em_report.columns;
        report["converged_columns"] = em_report.converged_columns;
        report["max_iterations_used"] = em_report.max_iterations_used;
        report["mean_subtracted_level"] = em_report.mean_subtracted_level;
    } else if (opt.method == "naive") {
        check(imsprep_baseline_naive(input.get(), &raw), "correcting baseline");
    } else if (opt.method == "median") {
        check(imsprep_baseline_median(input.get(), &raw), "correcting baseline");
    } else {
        throw CliError{1, "unknown baseline method '" + opt.method + "'"};
    }
    ImscPtr output(raw);
    check(imsprep_imsc_write_csv(output.get(), opt.output.c_str()), "writing '" + opt.output + "'");
    write_file(report_path_or_default(opt), report.dump(2) + "\n");
    return 0;
}

int run_process_cluster(const ProcessOptions& opt) {
    imsprep_peak_set* raw_peaks = nullptr;
    check(imsprep_peaks_read_csv(opt.input.c_str(), &raw_peaks), "reading '" + opt.input + "'");
    PeaksPtr peaks(raw_peaks);

    nlohmann::json report;
    report["command"] = "process cluster";
    report["method"] = opt.method;
    report["input"] = opt.input;
    report["version"] = imsprep_version();
    report["peaks"] = imsprep_peaks_size(peaks.get());

    imsprep_clustering* raw = nullptr;
    if (opt.method == "em") {
        imsprep_cluster_report em_report{};
        check(imsprep_cluster_em(peaks.get(), opt.epsilon, opt.max_iterations, &raw, &em_report),
              "clustering");
        report["epsilon"] = opt.epsilon;
        report["max_iterations"] = opt.max_iterations;
        report["iterations"] = em_report.iterations;
        report["converged"] = em_report.converged != 0;
        report["clusters"] = em_report.clusters;
        report["merges"] = em_report.merges;
    } else if (opt.method == "kmeanspp") {
        std::size_t k = opt.k;
        if (k == 0) {
            // fall back to the number of distinct labels when present
            std::vector<std::int64_t> labels;
            for (std::size_t i = 0; i < imsprep_peaks_size(peaks.get()); ++i) {
                std::int64_t label = -1;
                check(imsprep_peaks_get(peaks.get(), i, nullptr, nullptr, nullptr, nullptr, &label),
                      "reading peaks");
                if (label >= 0) labels.push_back(label);
            }
            std::sort(labels.begin(), labels.end());
            labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
            if (labels.empty()) throw CliError{1, "kmeanspp needs --k or labeled peaks"};
            k = labels.size();
        }
        check(imsprep_cluster_kmeanspp(peaks.get(), k, opt.seed, &raw), "clustering");
        report["k"] = k;
        report["seed"] = opt.seed;
    } else if (opt.method == "dbscan") {
        check(imsprep_cluster_dbscan(peaks.get(), opt.dbscan_eps, opt.min_pts, &raw), "clustering");
        report["eps"] = opt.dbscan_eps;
        report["min_pts"] = opt.min_pts;
    } else {
        throw CliError{1, "unknown cluster method '" + opt.method + "'"};
    }
    ClusteringPtr clustering(raw);
    report["clusters"] = imsprep_clustering_size(clustering.get());

    char* json = nullptr;
    check(imsprep_clustering_to_json(clustering.get(), &json), "serializing clustering");
    write_file(opt.output, take_string(json) + "\n");
    write_file(report_path_or_default(opt), report.dump(2) + "\n");
    return 0;
}

// ---- evaluate ---------------------------------------------------------

struct EvaluateOptions {
    std::string experiment;
    std::string out_dir = "out";
    imsprep_experiment_config config{};
};

int run_evaluate(const EvaluateOptions& opt) {
    ensure_directory(opt.out_dir);
    char* scores = nullptr;
    char* summary = nullptr;
    char* histogram = nullptr;
    check(imsprep_run_experiment(opt.experiment.c_str(), &opt.config, &scores, &summary, &histogram),
          "running experiment");
    write_file(opt.out_dir + "/scores.csv", take_string(scores));
    write_file(opt.out_dir + "/summary.csv", take_string(summary));
    write_file(opt.out_dir + "/histogram.csv", take_string(histogram));

    nlohmann::json manifest;
    manifest["command"] = "evaluate";
    manifest["experiment"] = opt.experiment;
    manifest["version"] = imsprep_version();
    manifest["seed"] = opt.config.seed;
    manifest["replicates"] = opt.config.replicates;
    manifest["rows"] = opt.config.rows;
    manifest["cols"] = opt.config.cols;
    manifest["min_peaks"] = opt.config.min_peaks;
    manifest["max_peaks"] = opt.config.max_peaks;
    manifest["rho"] = opt.config.rho;
    manifest["epsilon"] = opt.config.epsilon;
    manifest["max_iterations"] = opt.config.max_iterations;
    manifest["smoother_window"] = opt.config.smoother_window;
    manifest["gaussian_sigma"] = opt.config.gaussian_sigma;
    manifest["savitzky_golay_order"] = opt.config.savitzky_golay_order;
    manifest["fft_cutoff_fraction"] = opt.config.fft_cutoff_fraction;
    manifest["dbscan_eps"] = opt.config.dbscan_eps;
    manifest["dbscan_min_pts"] = opt.config.dbscan_min_pts;
    manifest["members_min"] = opt.config.members_min;
    manifest["members_max"] = opt.config.members_max;
    manifest["sigma_t_min"] = opt.config.sigma_t_min;
    manifest["sigma_t_max"] = opt.config.sigma_t_max;
    write_file(opt.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EM-based preprocessing and evaluation for MCC/IMS spectrum-chromatograms"};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "generate measurements or peak scenarios");
    simulate->add_option("--seed", sim.seed, "base seed");
    simulate->add_option("--replicates", sim.replicates, "number of replicates");
    simulate->add_option("--rows", sim.rows, "retention time points");
    simulate->add_option("--cols", sim.cols, "RIM points");
    simulate->add_option("--min-peaks", sim.min_peaks, "minimum peaks per measurement");
    simulate->add_option("--max-peaks", sim.max_peaks, "maximum peaks per measurement");
    simulate->add_flag("--no-noise", sim.no_noise, "skip device noise");
    simulate->add_flag("--baseline", sim.with_baseline, "add the RIP baseline");
    simulate->add_option("--noise-intensity", sim.noise_intensity, "sinusoid amplitude");
    simulate->add_option("--sigma-t-min", sim.sigma_t_min, "RIM peak width interval lower bound");
    simulate->add_option("--sigma-t-max", sim.sigma_t_max, "RIM peak width interval upper bound");
    simulate->add_flag("--scenario", sim.scenario, "generate clustered peak locations instead");
    simulate->add_flag("--scenario-noise", sim.scenario_noise, "add 200 noise singletons to the scenario");
    simulate->add_option("--out", sim.out_dir, "output directory");

    ProcessOptions proc;
    CLI::App* process = app.add_subcommand("process", "apply one method to one input file");
    process->require_subcommand(1);

    CLI::App* denoise = process->add_subcommand("denoise", "denoise an IMSC");
    denoise->add_option("--method", proc.method, "em|gaussian|savitzky_golay|fft_lowpass")->required();
    denoise->add_option("--input", proc.input)->required();
    denoise->add_option("--out", proc.output)->required();
    denoise->add_option("--report", proc.report_path, "JSON fit report path (default: <out>.report.json)");
    denoise->add_option("--rho", proc.rho, "smoothing margin in index units");
    denoise->add_option("--epsilon", proc.epsilon, "EM convergence threshold");
    denoise->add_option("--max-iterations", proc.max_iterations);
    denoise->add_flag("--uniform-range-raw", proc.uniform_range_raw,
                      "uniform component spans the raw matrix range");
    denoise->add_option("--window", proc.window, "gaussian / savitzky-golay window");
    denoise->add_option("--sigma", proc.sigma, "gaussian kernel sigma");
    denoise->add_option("--order", proc.order, "savitzky-golay polynomial order");
    denoise->add_option("--cutoff", proc.cutoff, "fft low-pass cutoff fraction");

    CLI::App* baseline = process->add_subcommand("baseline", "baseline-correct an IMSC");
    baseline->add_option("--method", proc.method, "em|naive|median")->required();
    baseline->add_option("--input", proc.input)->required();
    baseline->add_option("--out", proc.output)->required();
    baseline->add_option("--report", proc.report_path, "JSON fit report path (default: <out>.report.json)");
    baseline->add_option("--epsilon", proc.epsilon, "EM convergence threshold");
    baseline->add_option("--max-iterations", proc.max_iterations);

    CLI::App* cluster = process->add_subcommand("cluster", "cluster a peak list");
    cluster->add_option("--method", proc.method, "em|kmeanspp|dbscan")->required();
    cluster->add_option("--input", proc.input, "peak CSV")->required();
    cluster->add_option("--out", proc.output, "clustering JSON")->required();
    cluster->add_option("--report", proc.report_path, "JSON fit report path (default: <out>.report.json)");
    cluster->add_option("--epsilon", proc.epsilon, "EM convergence threshold");
    cluster->add_option("--max-iterations", proc.max_iterations);
    cluster->add_option("--k", proc.k, "kmeanspp cluster count (default: distinct labels)");
    cluster->add_option("--seed", proc.seed, "kmeanspp seed");
    cluster->add_option("--dbscan-eps", proc.dbscan_eps, "dbscan radius in scaled units");
    cluster->add_option("--min-pts", proc.min_pts, "dbscan core threshold");

    EvaluateOptions eval;
    imsprep_experiment_config_default(&eval.config);
    CLI::App* evaluate = app.add_subcommand("evaluate", "run a full comparison experiment");
    evaluate->add_option("experiment", eval.experiment, "denoising|baseline|clustering|clustering_noise")
        ->required();
    evaluate->add_option("--seed", eval.config.seed);
    evaluate->add_option("--replicates", eval.config.replicates);
    evaluate->add_option("--rows", eval.config.rows);
    evaluate->add_option("--cols", eval.config.cols);
    evaluate->add_option("--min-peaks", eval.config.min_peaks);
    evaluate->add_option("--max-peaks", eval.config.max_peaks);
    evaluate->add_option("--rho", eval.config.rho);
    evaluate->add_option("--epsilon", eval.config.epsilon);
    evaluate->add_option("--max-iterations", eval.config.max_iterations);
    evaluate->add_option("--window", eval.config.smoother_window);
    evaluate->add_option("--sigma", eval.config.gaussian_sigma);
    evaluate->add_option("--order", eval.config.savitzky_golay_order);
    evaluate->add_option("--cutoff", eval.config.fft_cutoff_fraction);
    evaluate->add_option("--dbscan-eps", eval.config.dbscan_eps);
    evaluate->add_option("--min-pts", eval.config.dbscan_min_pts);
    evaluate->add_option("--members-min", eval.config.members_min);
    evaluate->add_option("--members-max", eval.config.members_max);
    evaluate->add_option("--sigma-t-min", eval.config.sigma_t_min);
    evaluate->add_option("--sigma-t-max", eval.config.sigma_t_max);
    evaluate->add_option("--threads", eval.config.threads, "worker threads (0 = hardware)");
    evaluate->add_option("--out", eval.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (process->parsed()) {
            if (denoise->parsed()) return run_process_denoise(proc);
            if (baseline->parsed()) return run_process_baseline(proc);
            if (cluster->parsed()) return run_process_cluster(proc);
        }
        if (evaluate->parsed()) return run_evaluate(eval);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
