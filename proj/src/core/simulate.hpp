#pragma once

#include <optional>
#include <span>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace imsprep {

// Shifted inverse Gaussian density; zero at and below the offset.
double shifted_ig_pdf(double x, double mu, double lambda, double offset);

struct IgParams {
    double mu = 0.0;
    double lambda = 0.0;
    double offset = 0.0;
};

// (mu, lambda, o) -> (mean, stddev, mode)
IgDescriptors descriptors_from_params(double mu, double lambda, double offset);

// Inverse of descriptors_from_params. The descriptor map folds two
// parameter tuples onto the same descriptors (the mean-mode gap as a
// function of mu rises to a single maximum of (2 sqrt(1.5) - sqrt(3)) *
// stddev and falls again); the smooth-peak branch with mu >= sqrt(1.5) *
// stddev is returned, its conjugate being a near-offset spike. Throws
// when mode >= mean or the gap exceeds the attainable maximum.
IgParams params_from_descriptors(double mean, double stddev, double mode);

// Uniform sampling intervals for the seven peak descriptors.
struct DescriptorIntervals {
    double mode_t_min = 0.551, mode_t_max = 1.015;
    double sigma_t_min = 0.0046, sigma_t_max = 0.0174;
    double mean_gap_t_min = 0.00058, mean_gap_t_max = 0.0029;  // mean - mode
    double mode_r_min = 25.0, mode_r_max = 250.0;
    double sigma_r_min = 4.0, sigma_r_max = 7.5;
    double mean_gap_r_min = 0.5, mean_gap_r_max = 2.5;
    double volume_min = 1.45, volume_max = 14.5;
};

PeakDescriptors sample_peak_descriptors(Rng& rng, const DescriptorIntervals& intervals = {});

PeakParams peak_params_from_descriptors(const PeakDescriptors& d);

// Sum of the separable 2D peak densities over the grid coordinates.
Imsc synthesize_imsc(std::span<const PeakParams> peaks, const AxisConfig& axes);

// Device noise: a Gaussian per cell plus a per-spectrum sinusoid whose
// frequency is drawn once per retention row.
struct NoiseModel {
    double mu = 0.8;          // signal units
    double sigma = 2.0;       // signal units
    double intensity = 1.0;   // sinusoid amplitude i
    double freq_min = 1000.0; // Hz
    double freq_max = 6000.0; // Hz
};

struct NoiseResult {
    Imsc noisy;
    std::vector<double> row_frequencies;
};

NoiseResult add_noise(const Imsc& m, const NoiseModel& model, Rng& rng);

// RIP baseline model: a two-component inverse Gaussian profile over the
// RIM axis scaled by the spectrum intensity budget left after peaks.
struct BaselineModel {
    double mu_alpha = 0.174, o_alpha = 0.443;
    double lambda_alpha_min = 0.087, lambda_alpha_max = 0.127;
    double mu_beta = 0.127, o_beta = 0.353;
    double lambda_beta_min = 23.2, lambda_beta_max = 29.0;
    double omega_min = 0.6, omega_max = 0.7;
    double tau_mean = 60000.0, tau_sigma = 600.0;  // signal units
};

struct BaselineDraw {
    double lambda_alpha = 0.0;
    double lambda_beta = 0.0;
    double omega = 0.0;
    std::vector<double> tau;          // per-row intensity sums
    std::size_t clamped_rows = 0;     // rows where tau' fell below zero
};

struct BaselineResult {
    Imsc with_baseline;
    Imsc baseline;  // exactly what was added, for oracle use
    BaselineDraw draw;
};

// Profile of B at a RIM coordinate (density over the RIM axis).
double baseline_profile(double rim, const BaselineModel& model, const BaselineDraw& draw);

// Adds the drawn baseline to `target`. `peak_row_mass` is the per-row
// intensity already consumed by peaks (the row sums of the clean matrix).
BaselineResult add_baseline_to(const Imsc& target, std::span<const double> peak_row_mass,
                               const BaselineModel& model, Rng& rng);

// Convenience for a clean synthesized matrix: row mass is its own row sums.
BaselineResult add_baseline(const Imsc& clean, const BaselineModel& model, Rng& rng);

// Clustered peak-location scenario with a dense and a sparse region and
// three per-cluster member distributions.
struct ScenarioConfig {
    double measurement_t_min = 0.0, measurement_t_max = 1.45;
    double measurement_r_min = 0.0, measurement_r_max = 600.0;
    double dense_t_min = 0.5, dense_t_max = 0.7;
    double dense_r_min = 4.0, dense_r_max = 60.0;
    double sparse_t_min = 0.5, sparse_t_max = 1.2;
    double sparse_r_min = 4.0, sparse_r_max = 450.0;
    std::size_t dense_clusters = 30;
    std::size_t sparse_clusters = 20;
    std::size_t members_min = 3, members_max = 10;
    std::size_t noise_points = 200;
};

enum class ClusterShape { normal, exponential, uniform_ellipse };

struct ScenarioCluster {
    std::int64_t label = 0;
    double centroid_t = 0.0;
    double centroid_r = 0.0;
    ClusterShape shape = ClusterShape::normal;
    std::size_t member_count = 0;
};

struct LabeledPeakSet {
    std::vector<PeakLocation> peaks;
    std::vector<ScenarioCluster> clusters;
    std::size_t noise_points = 0;
};

LabeledPeakSet simulate_cluster_scenario(Rng& rng, bool with_noise, const ScenarioConfig& config = {});

// One fully simulated measurement, the common input of the experiments.
struct MeasurementConfig {
    AxisConfig axes{1200, 2500};
    std::size_t min_peaks = 5, max_peaks = 10;
    DescriptorIntervals intervals;
    NoiseModel noise;
    BaselineModel baseline;
    bool with_noise = true;
    bool with_baseline = false;
};

struct Measurement {
    std::vector<PeakDescriptors> descriptors;
    std::vector<PeakParams> peak_params;
    Imsc clean;
    std::optional<NoiseResult> noise;
    std::optional<BaselineResult> baseline;  // applied on top of the noisy matrix
};

Measurement simulate_measurement(const MeasurementConfig& config, Rng& rng);

}  // namespace imsprep
