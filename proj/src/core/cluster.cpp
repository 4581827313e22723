#include "core/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <nlohmann/json.hpp>

#include "core/densities.hpp"
#include "core/rng.hpp"

namespace imsprep {

namespace {

constexpr double kMergeToleranceRim = 0.003;  // Vs/cm^2

bool centers_mergeable(double mu_t_a, double mu_r_a, double mu_t_b, double mu_r_b) {
    const double retention_tolerance = 0.001 * std::max(mu_r_a, mu_r_b) + 3.0;
    return std::abs(mu_t_a - mu_t_b) < kMergeToleranceRim &&
           std::abs(mu_r_a - mu_r_b) < retention_tolerance;
}

}  // namespace

namespace cluster_model {

double log_density(std::size_t, const PeakLocation& x, std::span<const double> theta) {
    const double zr = (x.retention - theta[0]) / theta[1];
    const double zt = (x.rim - theta[2]) / theta[3];
    return -kLogTwoPi - std::log(theta[1]) - std::log(theta[3]) - 0.5 * (zr * zr + zt * zt);
}

double m_step(std::span<const PeakLocation> data, em::State& state) {
    const std::size_t n = data.size();
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < state.components(); ++j) {
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) wsum += state.memberships(i, j);
        if (!(wsum > 0.0)) continue;  // dead component keeps its parameters

        double mu_r = 0.0, mu_t = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mu_r += state.memberships(i, j) * data[i].retention;
            mu_t += state.memberships(i, j) * data[i].rim;
        }
        mu_r /= wsum;
        mu_t /= wsum;
        double var_r = 0.0, var_t = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            var_r += state.memberships(i, j) * (data[i].retention - mu_r) * (data[i].retention - mu_r);
            var_t += state.memberships(i, j) * (data[i].rim - mu_t) * (data[i].rim - mu_t);
        }
        const double sigma_r_raw = std::sqrt(var_r / wsum);
        const double sigma_t_raw = std::sqrt(var_t / wsum);
        const double floor_r = cluster_sigma_floor_retention(mu_r);
        state.params[j][0] = mu_r;
        state.params[j][1] = std::max(sigma_r_raw, floor_r);
        state.params[j][2] = mu_t;
        state.params[j][3] = std::max(sigma_t_raw, kClusterSigmaFloorRim);
        min_margin = std::min({min_margin, state.params[j][1] - floor_r,
                               state.params[j][3] - kClusterSigmaFloorRim});
    }
    return min_margin;
}

}  // namespace cluster_model

namespace {

ClusterParams params_from_members(std::span<const PeakLocation> peaks,
                                  const std::vector<std::size_t>& members, std::size_t total) {
    ClusterParams p;
    for (std::size_t i : members) {
        p.mu_r += peaks[i].retention;
        p.mu_t += peaks[i].rim;
    }
    const double n = static_cast<double>(members.size());
    p.mu_r /= n;
    p.mu_t /= n;
    double var_r = 0.0, var_t = 0.0;
    for (std::size_t i : members) {
        var_r += (peaks[i].retention - p.mu_r) * (peaks[i].retention - p.mu_r);
        var_t += (peaks[i].rim - p.mu_t) * (peaks[i].rim - p.mu_t);
    }
    p.sigma_r = std::max(std::sqrt(var_r / n), cluster_sigma_floor_retention(p.mu_r));
    p.sigma_t = std::max(std::sqrt(var_t / n), kClusterSigmaFloorRim);
    p.omega = n / static_cast<double>(total);
    return p;
}

Clustering clustering_from_hard_assignments(std::span<const PeakLocation> peaks,
                                            const std::vector<std::size_t>& assignment) {
    const std::size_t cluster_count = assignment.empty()
                                          ? 0
                                          : *std::max_element(assignment.begin(), assignment.end()) + 1;
    std::vector<std::vector<std::size_t>> members(cluster_count);
    for (std::size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);

    Clustering out;
    out.assignments = assignment;
    out.clusters.reserve(cluster_count);
    for (std::size_t j = 0; j < cluster_count; ++j) {
        out.clusters.push_back(params_from_members(peaks, members[j], peaks.size()));
        out.cluster_ids.push_back(j);
    }
    return out;
}

}  // namespace

ScaledPoint merge_scaled(const PeakLocation& peak) {
    return {peak.rim / kMergeToleranceRim, peak.retention / (0.001 * peak.retention + 3.0)};
}

EmClusterResult em_cluster(std::span<const PeakLocation> peaks, const em::Config& config) {
    const std::size_t n = peaks.size();
    if (n == 0) throw ContractError("em_cluster: empty peak list");

    em::State initial;
    initial.weights.assign(n, 1.0 / static_cast<double>(n));
    initial.params.reserve(n);
    for (const PeakLocation& p : peaks) {
        initial.params.push_back(
            {p.retention, cluster_sigma_floor_retention(p.retention), p.rim, kClusterSigmaFloorRim});
    }

    EmClusterResult result;
    result.min_sigma_floor_margin = std::numeric_limits<double>::infinity();

    // stable ids: the initial singleton index; owner[i] follows peak i
    // through the merge protocol
    std::vector<std::size_t> cluster_ids(n);
    std::vector<std::size_t> owner(n);
    for (std::size_t i = 0; i < n; ++i) cluster_ids[i] = owner[i] = i;

    auto merge_hook = [&](std::size_t iteration, std::span<const PeakLocation>, em::State& state) {
        // means need one iteration to move towards each other; reporting
        // the skipped scan as a restructure keeps the loop alive until
        // the first real scan has run (coincident peaks are already at a
        // parameter fixed point in iteration 1)
        if (iteration < 2) {
            result.cluster_count_history.push_back(state.components());
            return true;
        }
        bool merged_any = false;
        for (std::size_t j = 0; j < state.components(); ++j) {
            for (std::size_t k = j + 1; k < state.components();) {
                const auto& pj = state.params[j];
                const auto& pk = state.params[k];
                if (!centers_mergeable(pj[2], pj[0], pk[2], pk[0])) {
                    ++k;
                    continue;
                }
                // survivor is the heavier cluster; its location wins, the
                // weights and memberships are summed into slot j
                const bool k_survives = state.weights[k] > state.weights[j];
                const std::size_t survivor_id = k_survives ? cluster_ids[k] : cluster_ids[j];
                const std::size_t absorbed_id = k_survives ? cluster_ids[j] : cluster_ids[k];
                if (k_survives) state.params[j] = state.params[k];
                state.weights[j] += state.weights[k];
                for (std::size_t i = 0; i < n; ++i) {
                    state.memberships(i, j) += state.memberships(i, k);
                }
                state.weights.erase(state.weights.begin() + static_cast<std::ptrdiff_t>(k));
                state.params.erase(state.params.begin() + static_cast<std::ptrdiff_t>(k));
                state.memberships.remove_column(k);
                cluster_ids[j] = survivor_id;
                cluster_ids.erase(cluster_ids.begin() + static_cast<std::ptrdiff_t>(k));
                for (std::size_t i = 0; i < n; ++i) {
                    if (owner[i] == absorbed_id) owner[i] = survivor_id;
                }
                result.merge_log.push_back({iteration, absorbed_id, survivor_id});
                merged_any = true;
            }
        }
        result.cluster_count_history.push_back(state.components());
        return merged_any;
    };

    auto m_step = [&](std::span<const PeakLocation> data, em::State& state) {
        result.min_sigma_floor_margin =
            std::min(result.min_sigma_floor_margin, cluster_model::m_step(data, state));
    };

    em::RunResult run = em::run_em<PeakLocation>(peaks, cluster_model::log_density, std::move(initial),
                                                 m_step, merge_hook, config);
    result.iterations = run.iterations;
    result.converged = run.converged;

    // map surviving ids to slots and collect the final clustering
    Clustering& clustering = result.clustering;
    const std::size_t c_count = run.state.components();
    std::vector<std::size_t> id_to_slot(n, 0);
    for (std::size_t slot = 0; slot < c_count; ++slot) {
        id_to_slot[cluster_ids[slot]] = slot;
        const auto& theta = run.state.params[slot];
        clustering.clusters.push_back({theta[0], theta[1], theta[2], theta[3], run.state.weights[slot]});
        clustering.cluster_ids.push_back(cluster_ids[slot]);
    }
    clustering.assignments.resize(n);
    clustering.argmax_assignments.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        clustering.assignments[i] = id_to_slot[owner[i]];
        std::size_t best = 0;
        for (std::size_t j = 1; j < c_count; ++j) {
            if (run.state.memberships(i, j) > run.state.memberships(i, best)) best = j;
        }
        clustering.argmax_assignments[i] = best;
    }
    clustering.memberships = std::move(run.state.memberships);
    return result;
}

Clustering kmeanspp_cluster(std::span<const PeakLocation> peaks, std::size_t k, std::uint64_t seed) {
    const std::size_t n = peaks.size();
    if (n == 0) throw ContractError("kmeanspp_cluster: empty peak list");
    if (k < 1 || k > n) throw ContractError("kmeanspp_cluster: k must be in [1, n]");

    std::vector<ScaledPoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = merge_scaled(peaks[i]);
    auto dist_sq = [&](const ScaledPoint& a, const ScaledPoint& b) {
        return (a.t - b.t) * (a.t - b.t) + (a.r - b.r) * (a.r - b.r);
    };

    Rng rng(seed);
    std::vector<ScaledPoint> centers;
    centers.reserve(k);
    centers.push_back(pts[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))]);
    std::vector<double> min_dist(n);
    for (std::size_t i = 0; i < n; ++i) min_dist[i] = dist_sq(pts[i], centers[0]);
    while (centers.size() < k) {
        centers.push_back(pts[rng.discrete(min_dist)]);  // D^2 seeding
        for (std::size_t i = 0; i < n; ++i) {
            min_dist[i] = std::min(min_dist[i], dist_sq(pts[i], centers.back()));
        }
    }

    // Lloyd iterations to a fixed point of the assignments
    std::vector<std::size_t> assignment(n, 0);
    for (std::size_t iter = 0; iter < 1000; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = dist_sq(pts[i], centers[0]);
            for (std::size_t j = 1; j < k; ++j) {
                const double d = dist_sq(pts[i], centers[j]);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        std::vector<ScaledPoint> sums(k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assignment[i]].t += pts[i].t;
            sums[assignment[i]].r += pts[i].r;
            ++counts[assignment[i]];
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] == 0) continue;  // empty cluster keeps its center
            centers[j] = {sums[j].t / static_cast<double>(counts[j]),
                          sums[j].r / static_cast<double>(counts[j])};
        }
    }

    // drop empty clusters so assignments index a dense cluster list
    std::vector<std::size_t> remap(k, 0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assignment) ++counts[a];
    std::size_t next = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] > 0) remap[j] = next++;
    }
    for (std::size_t& a : assignment) a = remap[a];
    return clustering_from_hard_assignments(peaks, assignment);
}

Clustering dbscan_cluster(std::span<const PeakLocation> peaks, double eps, std::size_t min_pts) {
    if (!(eps > 0.0)) throw ContractError("dbscan_cluster: eps must be > 0");
    if (min_pts < 1) throw ContractError("dbscan_cluster: min_pts must be >= 1");
    const std::size_t n = peaks.size();
    if (n == 0) throw ContractError("dbscan_cluster: empty peak list");

    std::vector<ScaledPoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = merge_scaled(peaks[i]);
    const double eps_sq = eps * eps;
    auto neighbors_of = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j) {
            const double dt = pts[i].t - pts[j].t;
            const double dr = pts[i].r - pts[j].r;
            if (dt * dt + dr * dr <= eps_sq) out.push_back(j);  // includes i itself
        }
        return out;
    };

    constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> assignment(n, kUnassigned);
    std::vector<bool> expanded(n, false);
    std::size_t next_cluster = 0;

    for (std::size_t i = 0; i < n; ++i) {
        if (assignment[i] != kUnassigned || expanded[i]) continue;
        auto seed_neighbors = neighbors_of(i);
        if (seed_neighbors.size() < min_pts) continue;  // not core; may become border later

        const std::size_t cluster = next_cluster++;
        assignment[i] = cluster;
        std::deque<std::size_t> frontier(seed_neighbors.begin(), seed_neighbors.end());
        expanded[i] = true;
        while (!frontier.empty()) {
            const std::size_t q = frontier.front();
            frontier.pop_front();
            if (assignment[q] == kUnassigned) assignment[q] = cluster;  // first reaching core wins
            if (expanded[q]) continue;
            expanded[q] = true;
            auto q_neighbors = neighbors_of(q);
            if (q_neighbors.size() >= min_pts && assignment[q] == cluster) {
                for (std::size_t r : q_neighbors) {
                    if (assignment[r] == kUnassigned || !expanded[r]) frontier.push_back(r);
                }
            }
        }
    }
    // noise points become singleton clusters so the result is a partition
    for (std::size_t i = 0; i < n; ++i) {
        if (assignment[i] == kUnassigned) assignment[i] = next_cluster++;
    }
    return clustering_from_hard_assignments(peaks, assignment);
}

std::string clustering_to_json(const Clustering& clustering, const MergeLog* merge_log,
                               std::span<const PeakLocation> peaks) {
    nlohmann::json doc;
    doc["clusters"] = nlohmann::json::array();
    for (std::size_t j = 0; j < clustering.clusters.size(); ++j) {
        const ClusterParams& p = clustering.clusters[j];
        doc["clusters"].push_back({{"id", clustering.cluster_ids[j]},
                                   {"omega", p.omega},
                                   {"mu_r_s", p.mu_r},
                                   {"sigma_r_s", p.sigma_r},
                                   {"mu_t", p.mu_t},
                                   {"sigma_t", p.sigma_t}});
    }
    doc["assignments"] = nlohmann::json::array();
    for (std::size_t i = 0; i < clustering.assignments.size(); ++i) {
        doc["assignments"].push_back({{"measurement", i < peaks.size() ? peaks[i].measurement : ""},
                                      {"peak_id", i < peaks.size() ? peaks[i].peak_id : 0},
                                      {"cluster_id", clustering.cluster_ids[clustering.assignments[i]]}});
    }
    doc["merge_log"] = nlohmann::json::array();
    if (merge_log) {
        for (const MergeEvent& e : *merge_log) {
            doc["merge_log"].push_back(
                {{"iteration", e.iteration}, {"absorbed_id", e.absorbed_id}, {"survivor_id", e.survivor_id}});
        }
    }
    return doc.dump(2);
}

}  // namespace imsprep
