#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/denoise.hpp"
#include "core/em.hpp"
#include "core/simulate.hpp"

namespace imsprep {

enum class ExperimentKind { denoising, baseline, clustering, clustering_noise };

ExperimentKind experiment_kind_from_name(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t replicates = 100;
    // grid for the denoising / baseline experiments
    std::size_t rows = 1200;
    std::size_t cols = 2500;
    std::size_t min_peaks = 5, max_peaks = 10;
    int rho = kDefaultSmoothingMargin;
    em::Config em;
    SmootherParams smoother;
    bool uniform_range_raw = false;
    DescriptorIntervals intervals;
    NoiseModel noise;
    BaselineModel baseline;
    // clustering scenario
    ScenarioConfig scenario;
    double dbscan_eps = 1.0;
    std::size_t dbscan_min_pts = 2;
    // 0 picks the hardware thread count
    unsigned threads = 0;
    std::size_t histogram_bins = 20;
};

struct ScoreRow {
    std::size_t replicate = 0;
    std::string method;
    std::string score_name;
    double score = 0.0;
};

struct ScoreSummary {
    std::string method;
    std::string score_name;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

struct HistogramRow {
    std::string score_name;
    std::string method;
    double bin_lo = 0.0;
    double bin_hi = 0.0;
    std::size_t count = 0;
};

struct ExperimentResult {
    ExperimentKind kind = ExperimentKind::denoising;
    std::vector<ScoreRow> rows;  // sorted by (replicate, method, score_name)
    std::vector<ScoreSummary> summaries;
    std::vector<HistogramRow> histograms;

    double mean_of(const std::string& method, const std::string& score_name) const;
};

// Runs the full generate -> corrupt -> correct -> score loop. Replicates
// execute on a small worker pool with per-replicate seed streams; the
// output is deterministic for a fixed config regardless of thread count.
ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& config);

// CSV renderings of the result tables (header included, LF endings).
std::string scores_to_csv(const ExperimentResult& result);
std::string summaries_to_csv(const ExperimentResult& result);
std::string histograms_to_csv(const ExperimentResult& result);

}  // namespace imsprep
