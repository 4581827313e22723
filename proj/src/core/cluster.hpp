#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/em.hpp"
#include "core/types.hpp"

namespace imsprep {

// Variance floors for the per-cluster 2D Gaussians. Singleton-initialized
// clusters would otherwise collapse to zero variance.
inline constexpr double kClusterSigmaFloorRim = 0.003;  // Vs/cm^2

inline double cluster_sigma_floor_retention(double mu_r) { return (0.1 * mu_r + 3.0) / 3.0; }

// Coordinates rescaled so one unit roughly equals the merge tolerance in
// each dimension; K-means++ and DBSCAN measure distances here.
struct ScaledPoint {
    double t = 0.0;
    double r = 0.0;
};

ScaledPoint merge_scaled(const PeakLocation& peak);

struct MergeEvent {
    std::size_t iteration = 0;
    std::size_t absorbed_id = 0;
    std::size_t survivor_id = 0;
};

using MergeLog = std::vector<MergeEvent>;

struct EmClusterResult {
    Clustering clustering;
    MergeLog merge_log;
    std::size_t iterations = 0;
    bool converged = false;
    // per-iteration cluster counts, recorded after each merge scan
    std::vector<std::size_t> cluster_count_history;
    // smallest (sigma - floor) observed across all M-steps; >= 0 means the
    // floors held on every iteration
    double min_sigma_floor_margin = 0.0;
};

// EM clustering with one initial cluster per peak and dynamic merging of
// clusters whose centers come closer than the minimum peak distance.
// Hard assignments follow the protocoled merges, not argmax membership.
EmClusterResult em_cluster(std::span<const PeakLocation> peaks, const em::Config& config);

// K-means++ seeding plus Lloyd iterations in merge-scaled coordinates.
Clustering kmeanspp_cluster(std::span<const PeakLocation> peaks, std::size_t k, std::uint64_t seed);

// Density-based clustering in merge-scaled coordinates; points not
// reachable from any core point become singleton clusters so scores stay
// defined on a full partition.
Clustering dbscan_cluster(std::span<const PeakLocation> peaks, double eps, std::size_t min_pts);

// JSON export: clusters, per-peak assignments and the merge protocol.
std::string clustering_to_json(const Clustering& clustering, const MergeLog* merge_log,
                               std::span<const PeakLocation> peaks);

namespace cluster_model {

// theta_j = (mu_r, sigma_r, mu_t, sigma_t)
double log_density(std::size_t component, const PeakLocation& x, std::span<const double> theta);

// Weighted per-dimension Gaussian estimates with the sigma floors applied.
// Returns the smallest (sigma - floor) across the updated components;
// components with zero total membership keep their parameters.
double m_step(std::span<const PeakLocation> data, em::State& state);

}  // namespace cluster_model

}  // namespace imsprep
