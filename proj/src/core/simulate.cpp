#include "core/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace imsprep {

double shifted_ig_pdf(double x, double mu, double lambda, double offset) {
    if (!(mu > 0.0) || !(lambda > 0.0)) {
        throw ContractError("shifted_ig_pdf: mu and lambda must be > 0");
    }
    const double z = x - offset;
    if (z <= 0.0) return 0.0;
    const double d = z - mu;
    return std::sqrt(lambda / (2.0 * std::numbers::pi * z * z * z)) *
           std::exp(-lambda * d * d / (2.0 * mu * mu * z));
}

IgDescriptors descriptors_from_params(double mu, double lambda, double offset) {
    if (!(mu > 0.0) || !(lambda > 0.0)) {
        throw ContractError("descriptors_from_params: mu and lambda must be > 0");
    }
    IgDescriptors d;
    d.mean = mu + offset;
    d.stddev = std::sqrt(mu * mu * mu / lambda);
    const double ratio = 3.0 * mu / (2.0 * lambda);
    // mu (sqrt(1 + r^2) - r) rewritten to avoid cancellation at large r
    d.mode = mu / (std::sqrt(1.0 + ratio * ratio) + ratio) + offset;
    return d;
}

namespace {

// Mean-mode gap of an inverse Gaussian with unit stddev as a function of
// u = mu / sigma. With a = 3 / (2u) the gap is u + a - sqrt(u^2 + a^2),
// and since 2ua = 3 this collapses to the cancellation-free
//   gap(u) = 3 / (u + a + sqrt(u^2 + a^2)).
// The gap rises to its maximum of 2 sqrt(1.5) - sqrt(3) at u = sqrt(1.5)
// and falls again, so the descriptor map is two-to-one: the conjugate
// roots satisfy u1 * u2 = 1.5.
double unit_gap(double u) {
    const double a = 3.0 / (2.0 * u);
    return 3.0 / (u + a + std::sqrt(u * u + a * a));
}

const double kMaxUnitGap = 2.0 * std::sqrt(1.5) - std::sqrt(3.0);

}  // namespace

IgParams params_from_descriptors(double mean, double stddev, double mode) {
    if (!(stddev > 0.0)) {
        throw ContractError("params_from_descriptors: stddev must be > 0");
    }
    const double gap = mean - mode;
    if (!(gap > 0.0)) {
        throw ContractError("params_from_descriptors: mode must lie strictly below the mean");
    }
    const double ratio = gap / stddev;
    if (ratio > kMaxUnitGap) {
        throw ContractError(
            "params_from_descriptors: mean-mode gap exceeds the attainable maximum of about 0.7174 "
            "standard deviations; no inverse Gaussian has these descriptors");
    }

    // Bisect the decreasing branch u in [sqrt(1.5), inf). This picks the
    // weakly-skewed solution whose density is a smooth bump; the
    // conjugate root mu' = 1.5 sigma^2 / mu concentrates its mass in a
    // near-offset spike far narrower than any realistic peak.
    double lo = std::sqrt(1.5);
    double hi = std::max(2.0 * lo, 3.0 / ratio + 2.0);
    for (int i = 0; i < 200 && (hi - lo) > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (unit_gap(mid) > ratio) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double u = 0.5 * (lo + hi);

    IgParams p;
    p.mu = u * stddev;
    p.lambda = p.mu * p.mu * p.mu / (stddev * stddev);
    p.offset = mean - p.mu;
    return p;
}

PeakDescriptors sample_peak_descriptors(Rng& rng, const DescriptorIntervals& iv) {
    PeakDescriptors d;
    d.rim.mode = rng.uniform(iv.mode_t_min, iv.mode_t_max);
    d.rim.stddev = rng.uniform(iv.sigma_t_min, iv.sigma_t_max);
    d.rim.mean = d.rim.mode + rng.uniform(iv.mean_gap_t_min, iv.mean_gap_t_max);
    d.retention.mode = rng.uniform(iv.mode_r_min, iv.mode_r_max);
    d.retention.stddev = rng.uniform(iv.sigma_r_min, iv.sigma_r_max);
    d.retention.mean = d.retention.mode + rng.uniform(iv.mean_gap_r_min, iv.mean_gap_r_max);
    d.volume = rng.uniform(iv.volume_min, iv.volume_max);
    return d;
}

PeakParams peak_params_from_descriptors(const PeakDescriptors& d) {
    const IgParams t = params_from_descriptors(d.rim.mean, d.rim.stddev, d.rim.mode);
    const IgParams r = params_from_descriptors(d.retention.mean, d.retention.stddev, d.retention.mode);
    PeakParams p;
    p.mu_t = t.mu;
    p.lambda_t = t.lambda;
    p.offset_t = t.offset;
    p.mu_r = r.mu;
    p.lambda_r = r.lambda;
    p.offset_r = r.offset;
    p.volume = d.volume;
    return p;
}

Imsc synthesize_imsc(std::span<const PeakParams> peaks, const AxisConfig& axes) {
    axes.validate();
    Imsc out(axes);
    // the peak density is separable, so evaluate each axis once
    std::vector<double> row_density(axes.num_rows);
    std::vector<double> col_density(axes.num_cols);
    for (const PeakParams& p : peaks) {
        for (std::size_t r = 0; r < axes.num_rows; ++r) {
            row_density[r] = shifted_ig_pdf(axes.retention_at(r), p.mu_r, p.lambda_r, p.offset_r);
        }
        for (std::size_t c = 0; c < axes.num_cols; ++c) {
            col_density[c] = shifted_ig_pdf(axes.rim_at(c), p.mu_t, p.lambda_t, p.offset_t);
        }
        for (std::size_t r = 0; r < axes.num_rows; ++r) {
            const double row_term = p.volume * row_density[r];
            if (row_term == 0.0) continue;
            double* row = &out.values()[r * axes.num_cols];
            for (std::size_t c = 0; c < axes.num_cols; ++c) {
                row[c] += row_term * col_density[c];
            }
        }
    }
    return out;
}

NoiseResult add_noise(const Imsc& m, const NoiseModel& model, Rng& rng) {
    if (!(model.sigma > 0.0)) throw ContractError("add_noise: sigma must be > 0");
    if (!(model.freq_min > 0.0) || !(model.freq_max >= model.freq_min)) {
        throw ContractError("add_noise: frequency range must be positive and ordered");
    }
    const AxisConfig& axes = m.axes();
    NoiseResult result{m, {}};
    result.row_frequencies.reserve(axes.num_rows);
    const double tube_sq = axes.tube_length * axes.tube_length;
    for (std::size_t r = 0; r < axes.num_rows; ++r) {
        const double freq = rng.uniform(model.freq_min, model.freq_max);
        result.row_frequencies.push_back(freq);
        const double angular = axes.voltage / (freq * tube_sq);
        for (std::size_t c = 0; c < axes.num_cols; ++c) {
            result.noisy(r, c) += rng.normal(model.mu, model.sigma) +
                                  model.intensity * std::sin(angular * axes.rim_at(c));
        }
    }
    return result;
}

double baseline_profile(double rim, const BaselineModel& model, const BaselineDraw& draw) {
    return draw.omega * shifted_ig_pdf(rim, model.mu_alpha, draw.lambda_alpha, model.o_alpha) +
           (1.0 - draw.omega) * shifted_ig_pdf(rim, model.mu_beta, draw.lambda_beta, model.o_beta);
}

BaselineResult add_baseline_to(const Imsc& target, std::span<const double> peak_row_mass,
                               const BaselineModel& model, Rng& rng) {
    const AxisConfig& axes = target.axes();
    if (peak_row_mass.size() != axes.num_rows) {
        throw ContractError("add_baseline: peak row mass size does not match the matrix");
    }

    BaselineResult result{target, Imsc(axes), {}};
    result.draw.lambda_alpha = rng.uniform(model.lambda_alpha_min, model.lambda_alpha_max);
    result.draw.lambda_beta = rng.uniform(model.lambda_beta_min, model.lambda_beta_max);
    result.draw.omega = rng.uniform(model.omega_min, model.omega_max);
    result.draw.tau.reserve(axes.num_rows);
    for (std::size_t r = 0; r < axes.num_rows; ++r) {
        result.draw.tau.push_back(rng.normal(model.tau_mean, model.tau_sigma));
    }

    // B is a density over the RIM axis; scaling by the cell width turns it
    // into per-cell mass so a peak-free row sums to tau' up to the
    // discretization error of the profile
    std::vector<double> cell_mass(axes.num_cols);
    const double rim_step = axes.rim_step();
    for (std::size_t c = 0; c < axes.num_cols; ++c) {
        cell_mass[c] = baseline_profile(axes.rim_at(c), model, result.draw) * rim_step;
    }

    for (std::size_t r = 0; r < axes.num_rows; ++r) {
        double tau_prime = result.draw.tau[r] - peak_row_mass[r];
        if (tau_prime < 0.0) {
            tau_prime = 0.0;
            ++result.draw.clamped_rows;
        }
        for (std::size_t c = 0; c < axes.num_cols; ++c) {
            const double added = tau_prime * cell_mass[c];
            result.baseline(r, c) = added;
            result.with_baseline(r, c) += added;
        }
    }
    return result;
}

BaselineResult add_baseline(const Imsc& clean, const BaselineModel& model, Rng& rng) {
    std::vector<double> row_mass(clean.rows(), 0.0);
    for (std::size_t r = 0; r < clean.rows(); ++r) {
        for (std::size_t c = 0; c < clean.cols(); ++c) row_mass[r] += clean(r, c);
    }
    return add_baseline_to(clean, row_mass, model, rng);
}

namespace {

bool inside_measurement(double t, double r, const ScenarioConfig& cfg) {
    return t >= cfg.measurement_t_min && t <= cfg.measurement_t_max && r >= cfg.measurement_r_min &&
           r <= cfg.measurement_r_max;
}

// One member draw for the given cluster shape; resampled until it lands
// inside the measurement box.
std::pair<double, double> draw_member(Rng& rng, const ScenarioCluster& cluster,
                                      const ScenarioConfig& cfg) {
    const double mu_t = cluster.centroid_t;
    const double mu_r = cluster.centroid_r;
    while (true) {
        double t = 0.0, r = 0.0;
        switch (cluster.shape) {
            case ClusterShape::normal: {
                t = rng.normal(mu_t, 0.002);
                r = rng.normal(mu_r, mu_r * 0.002 + 0.2);
                break;
            }
            case ClusterShape::exponential: {
                // Laplace scales: the single-cell RIM width in t, the
                // normal-shape sigma in r
                t = rng.laplace(mu_t, 1.45 / 2500.0);
                r = rng.laplace(mu_r, mu_r * 0.002 + 0.2);
                break;
            }
            case ClusterShape::uniform_ellipse: {
                const double rho_t = 0.006;
                const double rho_r = mu_r * 0.02 + 1.0;
                const double radius = std::sqrt(rng.uniform());
                const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
                t = mu_t + rho_t * radius * std::cos(angle);
                r = mu_r + rho_r * radius * std::sin(angle);
                break;
            }
        }
        if (inside_measurement(t, r, cfg)) return {t, r};
    }
}

}  // namespace

LabeledPeakSet simulate_cluster_scenario(Rng& rng, bool with_noise, const ScenarioConfig& cfg) {
    LabeledPeakSet out;
    const std::size_t cluster_count = cfg.dense_clusters + cfg.sparse_clusters;
    out.clusters.reserve(cluster_count);
    for (std::size_t j = 0; j < cluster_count; ++j) {
        ScenarioCluster cluster;
        cluster.label = static_cast<std::int64_t>(j);
        if (j < cfg.dense_clusters) {
            cluster.centroid_t = rng.uniform(cfg.dense_t_min, cfg.dense_t_max);
            cluster.centroid_r = rng.uniform(cfg.dense_r_min, cfg.dense_r_max);
        } else {
            cluster.centroid_t = rng.uniform(cfg.sparse_t_min, cfg.sparse_t_max);
            cluster.centroid_r = rng.uniform(cfg.sparse_r_min, cfg.sparse_r_max);
        }
        out.clusters.push_back(cluster);
    }

    std::int64_t peak_id = 0;
    for (ScenarioCluster& cluster : out.clusters) {
        cluster.shape = static_cast<ClusterShape>(rng.uniform_int(0, 2));
        cluster.member_count = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(cfg.members_min), static_cast<std::int64_t>(cfg.members_max)));
        for (std::size_t member = 0; member < cluster.member_count; ++member) {
            const auto [t, r] = draw_member(rng, cluster, cfg);
            PeakLocation p;
            p.measurement = "m" + std::to_string(member);
            p.peak_id = peak_id++;
            p.retention = r;
            p.rim = t;
            p.truth_label = cluster.label;
            out.peaks.push_back(std::move(p));
        }
    }

    if (with_noise) {
        out.noise_points = cfg.noise_points;
        for (std::size_t i = 0; i < cfg.noise_points; ++i) {
            PeakLocation p;
            p.measurement = "noise";
            p.peak_id = peak_id++;
            p.rim = rng.uniform(cfg.measurement_t_min, cfg.measurement_t_max);
            p.retention = rng.uniform(cfg.measurement_r_min, cfg.measurement_r_max);
            p.truth_label = static_cast<std::int64_t>(cluster_count + i);  // singleton partition
            out.peaks.push_back(std::move(p));
        }
    }
    return out;
}

Measurement simulate_measurement(const MeasurementConfig& config, Rng& rng) {
    if (config.min_peaks < 1 || config.max_peaks < config.min_peaks) {
        throw ContractError("simulate_measurement: invalid peak count range");
    }
    Measurement m;
    const auto count = rng.uniform_int(static_cast<std::int64_t>(config.min_peaks),
                                       static_cast<std::int64_t>(config.max_peaks));
    m.descriptors.reserve(static_cast<std::size_t>(count));
    m.peak_params.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        m.descriptors.push_back(sample_peak_descriptors(rng, config.intervals));
        m.peak_params.push_back(peak_params_from_descriptors(m.descriptors.back()));
    }
    m.clean = synthesize_imsc(m.peak_params, config.axes);

    const Imsc* current = &m.clean;
    if (config.with_noise) {
        m.noise = add_noise(*current, config.noise, rng);
        current = &m.noise->noisy;
    }
    if (config.with_baseline) {
        std::vector<double> row_mass(m.clean.rows(), 0.0);
        for (std::size_t r = 0; r < m.clean.rows(); ++r) {
            for (std::size_t c = 0; c < m.clean.cols(); ++c) row_mass[r] += m.clean(r, c);
        }
        m.baseline = add_baseline_to(*current, row_mass, config.baseline, rng);
    }
    return m;
}

}  // namespace imsprep
