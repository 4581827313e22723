#include <algorithm>

#include "core/baseline.hpp"
#include "core/denoise.hpp"
#include "core/experiments.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "core/simulate.hpp"
#include "doctest.h"

using namespace imsprep;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.seed = 5;
    cfg.replicates = 3;
    cfg.rows = 40;
    cfg.cols = 100;
    return cfg;
}

}  // namespace

TEST_CASE("baseline correction improves similarity to the clean matrix") {
    Rng rng(223);
    MeasurementConfig mc;
    mc.axes = AxisConfig{120, 300};
    mc.with_baseline = true;
    const Measurement m = simulate_measurement(mc, rng);
    const Imsc& corrupted = m.baseline->with_baseline;

    const double before = cosine_similarity(m.clean, corrupted);
    const Imsc corrected = correct_baseline_em(corrupted, {}).corrected;
    const double after = cosine_similarity(m.clean, corrected);
    CHECK(after > before);
}

TEST_CASE("denoising lowers the noise floor of a simulated measurement") {
    Rng rng(227);
    MeasurementConfig mc;
    mc.axes = AxisConfig{120, 300};
    const Measurement m = simulate_measurement(mc, rng);
    const DenoiseResult result = denoise_em(m.noise->noisy, 4, {});

    // peak-free region taken from the ground truth
    double before = 0.0, after = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < m.clean.size(); ++i) {
        if (m.clean.values()[i] > 1e-6) continue;
        before += std::abs(m.noise->noisy.values()[i]);
        after += std::abs(result.denoised.values()[i]);
        ++count;
    }
    REQUIRE(count > 0);
    CHECK(after <= before);
}

TEST_CASE("experiment rows are sorted and deterministic across thread counts") {
    ExperimentConfig cfg = small_config();
    cfg.threads = 1;
    const ExperimentResult serial = run_experiment(ExperimentKind::denoising, cfg);
    cfg.threads = 2;
    const ExperimentResult parallel = run_experiment(ExperimentKind::denoising, cfg);

    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        REQUIRE(serial.rows[i].replicate == parallel.rows[i].replicate);
        REQUIRE(serial.rows[i].method == parallel.rows[i].method);
        REQUIRE(serial.rows[i].score_name == parallel.rows[i].score_name);
        REQUIRE(serial.rows[i].score == parallel.rows[i].score);
    }
    CHECK(std::is_sorted(serial.rows.begin(), serial.rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
        return std::tie(a.replicate, a.method, a.score_name) < std::tie(b.replicate, b.method, b.score_name);
    }));
    CHECK(scores_to_csv(serial) == scores_to_csv(parallel));
}

TEST_CASE("experiment csv renderings carry the documented headers") {
    ExperimentConfig cfg = small_config();
    cfg.replicates = 2;
    const ExperimentResult r = run_experiment(ExperimentKind::clustering, cfg);
    CHECK(scores_to_csv(r).rfind("replicate,method,score_name,score\n", 0) == 0);
    CHECK(summaries_to_csv(r).rfind("method,score_name,mean,stddev,count\n", 0) == 0);
    CHECK(histograms_to_csv(r).rfind("score_name,method,bin_lo,bin_hi,count\n", 0) == 0);
    CHECK_NOTHROW(r.mean_of("em", "fmi"));
    CHECK_THROWS_AS(r.mean_of("em", "nope"), ContractError);
    CHECK_THROWS_AS(experiment_kind_from_name("nope"), ContractError);
}

TEST_CASE("histogram bins cover every score") {
    ExperimentConfig cfg = small_config();
    cfg.replicates = 4;
    const ExperimentResult r = run_experiment(ExperimentKind::baseline, cfg);
    std::size_t histogram_total = 0;
    for (const HistogramRow& row : r.histograms) histogram_total += row.count;
    std::size_t score_total = 0;
    for (const ScoreRow& row : r.rows) {
        if (row.score_name == "cosine_similarity") ++score_total;
    }
    CHECK(histogram_total == score_total);
}
