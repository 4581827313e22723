#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace imsprep {

// Raw device ADC range (12-bit converter, positive and negative mode).
// Simulated and processed intensities are unbounded reals; the bound only
// matters when ingesting device captures, which this project does not do.
inline constexpr double kDeviceSignalMin = -2048.0;
inline constexpr double kDeviceSignalMax = 2047.0;

// Grid geometry of a spectrum-chromatogram plus the drift-tube constants
// needed by the noise generator. Rows are retention time points, columns
// are reduced-inverse-mobility (RIM) points. Coordinates are 1-based:
// row r sits at r * retention_max / num_rows.
struct AxisConfig {
    std::size_t num_rows = 0;
    std::size_t num_cols = 0;
    double retention_max = 600.0;  // seconds
    double rim_max = 1.45;         // Vs/cm^2
    double voltage = 4830.0;       // drift tube voltage U, volts
    double tube_length = 12.0;     // drift tube length, cm

    double retention_step() const { return retention_max / static_cast<double>(num_rows); }
    double rim_step() const { return rim_max / static_cast<double>(num_cols); }
    // 0-based indices map to 1-based grid coordinates.
    double retention_at(std::size_t row) const { return static_cast<double>(row + 1) * retention_step(); }
    double rim_at(std::size_t col) const { return static_cast<double>(col + 1) * rim_step(); }

    void validate() const;
};

// One measurement: an axes description plus a dense row-major intensity
// matrix. Immutable by convention after construction; every processing
// step allocates a fresh matrix.
class Imsc {
public:
    Imsc() = default;
    explicit Imsc(AxisConfig axes, double fill = 0.0);
    Imsc(AxisConfig axes, std::vector<double> values);

    std::size_t rows() const { return axes_.num_rows; }
    std::size_t cols() const { return axes_.num_cols; }
    std::size_t size() const { return values_.size(); }
    const AxisConfig& axes() const { return axes_; }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * axes_.num_cols + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * axes_.num_cols + c]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double min_value() const;
    double max_value() const;

private:
    AxisConfig axes_;
    std::vector<double> values_;
};

// 2D peak model parameters: a shifted inverse Gaussian per axis plus a
// volume factor.
struct PeakParams {
    double mu_t = 0.0;      // Vs/cm^2
    double lambda_t = 0.0;  // Vs/cm^2
    double offset_t = 0.0;  // Vs/cm^2
    double mu_r = 0.0;      // s
    double lambda_r = 0.0;  // s
    double offset_r = 0.0;  // s
    double volume = 0.0;    // signal * Vs/cm^2 * s
};

// Descriptor form of one axis of the peak model.
struct IgDescriptors {
    double mean = 0.0;
    double stddev = 0.0;
    double mode = 0.0;
};

// Descriptor form of the full 2D peak model.
struct PeakDescriptors {
    IgDescriptors rim;        // T axis
    IgDescriptors retention;  // R axis
    double volume = 0.0;
};

// A located peak, optionally tagged with the ground-truth partition it
// belongs to (simulation only).
struct PeakLocation {
    std::string measurement;  // opaque tag
    std::int64_t peak_id = 0;
    double retention = 0.0;  // s
    double rim = 0.0;        // Vs/cm^2
    std::optional<std::int64_t> truth_label;
};

// Fitted per-cluster parameters: axis-aligned 2D Gaussian plus weight.
struct ClusterParams {
    double mu_r = 0.0;
    double sigma_r = 0.0;
    double mu_t = 0.0;
    double sigma_t = 0.0;
    double omega = 0.0;
};

// Minimal dense row-major matrix used for membership weights.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    bool empty() const { return data.empty(); }

    void remove_column(std::size_t c);
};

// Result of a clustering run. Hard assignments index into `clusters`.
// For the EM method `memberships` holds the final soft weights and
// `argmax_assignments` the per-peak argmax of those weights (exported for
// inspection; the protocol-based `assignments` are authoritative).
struct Clustering {
    std::vector<std::size_t> assignments;
    std::vector<ClusterParams> clusters;
    std::vector<std::size_t> cluster_ids;  // stable ids, parallel to clusters
    Matrix memberships;                    // optional, empty when not applicable
    std::vector<std::size_t> argmax_assignments;
};

}  // namespace imsprep
