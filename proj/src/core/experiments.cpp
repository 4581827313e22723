#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "core/baseline.hpp"
#include "core/cluster.hpp"
#include "core/csv_io.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"

namespace imsprep {

ExperimentKind experiment_kind_from_name(const std::string& name) {
    if (name == "denoising") return ExperimentKind::denoising;
    if (name == "baseline") return ExperimentKind::baseline;
    if (name == "clustering") return ExperimentKind::clustering;
    if (name == "clustering_noise") return ExperimentKind::clustering_noise;
    throw ContractError("unknown experiment '" + name + "'");
}

std::string experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::denoising: return "denoising";
        case ExperimentKind::baseline: return "baseline";
        case ExperimentKind::clustering: return "clustering";
        case ExperimentKind::clustering_noise: return "clustering_noise";
    }
    return "unknown";
}

namespace {

std::vector<ScoreRow> run_denoising_replicate(std::size_t rep, const ExperimentConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, rep));
    MeasurementConfig mc;
    mc.axes = AxisConfig{cfg.rows, cfg.cols};
    mc.min_peaks = cfg.min_peaks;
    mc.max_peaks = cfg.max_peaks;
    mc.intervals = cfg.intervals;
    mc.noise = cfg.noise;
    const Measurement m = simulate_measurement(mc, rng);
    const Imsc& noisy = m.noise->noisy;

    std::vector<ScoreRow> rows;
    const DenoiseResult em = denoise_em(noisy, cfg.rho, cfg.em, cfg.uniform_range_raw);
    rows.push_back({rep, "em", "cosine_similarity", cosine_similarity(m.clean, em.denoised)});
    rows.push_back({rep, "em", "iterations", static_cast<double>(em.iterations)});
    rows.push_back({rep, "gaussian", "cosine_similarity",
                    cosine_similarity(m.clean, smooth_gaussian(noisy, cfg.smoother.window, cfg.smoother.sigma))});
    rows.push_back(
        {rep, "savitzky_golay", "cosine_similarity",
         cosine_similarity(m.clean, smooth_savitzky_golay(noisy, cfg.smoother.window, cfg.smoother.order))});
    rows.push_back({rep, "fft_lowpass", "cosine_similarity",
                    cosine_similarity(m.clean, smooth_fft_lowpass(noisy, cfg.smoother.cutoff_fraction))});
    return rows;
}

std::vector<ScoreRow> run_baseline_replicate(std::size_t rep, const ExperimentConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, rep));
    MeasurementConfig mc;
    mc.axes = AxisConfig{cfg.rows, cfg.cols};
    mc.min_peaks = cfg.min_peaks;
    mc.max_peaks = cfg.max_peaks;
    mc.intervals = cfg.intervals;
    mc.noise = cfg.noise;
    mc.baseline = cfg.baseline;
    mc.with_baseline = true;
    const Measurement m = simulate_measurement(mc, rng);
    const Imsc& corrupted = m.baseline->with_baseline;

    std::vector<ScoreRow> rows;
    rows.push_back({rep, "em", "cosine_similarity",
                    cosine_similarity(m.clean, correct_baseline_em(corrupted, cfg.em).corrected)});
    rows.push_back({rep, "naive", "cosine_similarity", cosine_similarity(m.clean, baseline_naive(corrupted))});
    rows.push_back({rep, "median", "cosine_similarity", cosine_similarity(m.clean, baseline_median(corrupted))});
    return rows;
}

std::vector<ScoreRow> run_clustering_replicate(std::size_t rep, const ExperimentConfig& cfg, bool with_noise) {
    Rng rng(derive_seed(cfg.seed, rep));
    const LabeledPeakSet scenario = simulate_cluster_scenario(rng, with_noise, cfg.scenario);

    std::vector<std::int64_t> truth;
    truth.reserve(scenario.peaks.size());
    for (const PeakLocation& p : scenario.peaks) truth.push_back(*p.truth_label);

    const EmClusterResult em = em_cluster(scenario.peaks, cfg.em);
    // K-means++ gets the true number of compound clusters as an
    // advantage; it has no concept of noise, so in the noise scenario the
    // singletons necessarily land inside those clusters
    const Clustering km = kmeanspp_cluster(scenario.peaks, scenario.clusters.size(), rng.next_u64());
    const Clustering db = dbscan_cluster(scenario.peaks, cfg.dbscan_eps, cfg.dbscan_min_pts);

    std::vector<ScoreRow> rows;
    auto add = [&](const std::string& method, const Clustering& clustering) {
        const auto labels = labels_from_assignments(clustering.assignments);
        rows.push_back({rep, method, "fmi", fmi(truth, labels)});
        rows.push_back({rep, method, "nvi", nvi(truth, labels)});
    };
    add("em", em.clustering);
    add("kmeanspp", km);
    add("dbscan", db);
    rows.push_back({rep, "em", "iterations", static_cast<double>(em.iterations)});
    return rows;
}

}  // namespace

double ExperimentResult::mean_of(const std::string& method, const std::string& score_name) const {
    for (const ScoreSummary& s : summaries) {
        if (s.method == method && s.score_name == score_name) return s.mean;
    }
    throw ContractError("no summary for method '" + method + "', score '" + score_name + "'");
}

ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& cfg) {
    if (cfg.replicates < 1) throw ContractError("experiment: replicates must be >= 1");

    auto run_one = [&](std::size_t rep) {
        switch (kind) {
            case ExperimentKind::denoising: return run_denoising_replicate(rep, cfg);
            case ExperimentKind::baseline: return run_baseline_replicate(rep, cfg);
            case ExperimentKind::clustering: return run_clustering_replicate(rep, cfg, false);
            case ExperimentKind::clustering_noise: return run_clustering_replicate(rep, cfg, true);
        }
        throw ContractError("unknown experiment kind");
    };

    std::vector<std::vector<ScoreRow>> per_replicate(cfg.replicates);
    unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.replicates));

    if (threads <= 1) {
        for (std::size_t rep = 0; rep < cfg.replicates; ++rep) per_replicate[rep] = run_one(rep);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            while (true) {
                const std::size_t rep = next.fetch_add(1);
                if (rep >= cfg.replicates) return;
                try {
                    per_replicate[rep] = run_one(rep);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    ExperimentResult result;
    result.kind = kind;
    for (auto& rows : per_replicate) {
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
    std::sort(result.rows.begin(), result.rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
        return std::tie(a.replicate, a.method, a.score_name) < std::tie(b.replicate, b.method, b.score_name);
    });

    // summaries: mean and sample stddev per (method, score)
    std::map<std::pair<std::string, std::string>, std::vector<double>> grouped;
    for (const ScoreRow& row : result.rows) grouped[{row.method, row.score_name}].push_back(row.score);
    for (const auto& [key, values] : grouped) {
        ScoreSummary s;
        s.method = key.first;
        s.score_name = key.second;
        s.count = values.size();
        for (double v : values) s.mean += v;
        s.mean /= static_cast<double>(values.size());
        if (values.size() > 1) {
            double acc = 0.0;
            for (double v : values) acc += (v - s.mean) * (v - s.mean);
            s.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
        }
        result.summaries.push_back(s);
    }

    // shared-axis histograms per score name, split by method
    std::map<std::string, std::pair<double, double>> ranges;
    for (const ScoreRow& row : result.rows) {
        if (row.score_name == "iterations") continue;
        auto it = ranges.find(row.score_name);
        if (it == ranges.end()) {
            ranges.emplace(row.score_name, std::make_pair(row.score, row.score));
        } else {
            it->second.first = std::min(it->second.first, row.score);
            it->second.second = std::max(it->second.second, row.score);
        }
    }
    for (const auto& [score_name, range] : ranges) {
        const double lo = range.first;
        const double width = std::max(range.second - range.first, 1e-12);
        const double bin_width = width / static_cast<double>(cfg.histogram_bins);
        std::map<std::string, std::vector<std::size_t>> counts;
        for (const ScoreRow& row : result.rows) {
            if (row.score_name != score_name) continue;
            auto& bins = counts.try_emplace(row.method, cfg.histogram_bins, 0).first->second;
            auto bin = static_cast<std::size_t>((row.score - lo) / bin_width);
            bin = std::min(bin, cfg.histogram_bins - 1);
            ++bins[bin];
        }
        for (const auto& [method, bins] : counts) {
            for (std::size_t b = 0; b < bins.size(); ++b) {
                result.histograms.push_back({score_name, method, lo + bin_width * static_cast<double>(b),
                                             lo + bin_width * static_cast<double>(b + 1), bins[b]});
            }
        }
    }
    return result;
}

std::string scores_to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "replicate,method,score_name,score\n";
    for (const ScoreRow& row : result.rows) {
        out << row.replicate << ',' << row.method << ',' << row.score_name << ','
            << format_double(row.score) << "\n";
    }
    return out.str();
}

std::string summaries_to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "method,score_name,mean,stddev,count\n";
    for (const ScoreSummary& s : result.summaries) {
        out << s.method << ',' << s.score_name << ',' << format_double(s.mean) << ','
            << format_double(s.stddev) << ',' << s.count << "\n";
    }
    return out.str();
}

std::string histograms_to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "score_name,method,bin_lo,bin_hi,count\n";
    for (const HistogramRow& row : result.histograms) {
        out << row.score_name << ',' << row.method << ',' << format_double(row.bin_lo) << ','
            << format_double(row.bin_hi) << ',' << row.count << "\n";
    }
    return out.str();
}

}  // namespace imsprep
