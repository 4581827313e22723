#pragma once

#include <span>
#include <vector>

#include "core/em.hpp"
#include "core/types.hpp"

namespace imsprep {

inline constexpr double kBaselineSigmaFloor = 1e-6;

// Per-chromatogram fit of the Gaussian-baseline / uniform-signal mixture.
struct BaselineFit {
    double mu = 0.0;
    double sigma = kBaselineSigmaFloor;
    double omega_b = 1.0;
    double omega_s = 0.0;
    double b = 0.0;  // subtracted level, mu + 2 sigma
    std::size_t iterations = 0;
    bool converged = true;
};

// Mode of the unit-width histogram: values are binned to the nearest
// integer k (bin [k-0.5, k+0.5)); ties break toward the smaller center.
double histogram_mode(std::span<const double> chromatogram);

// EM with mu initialized at the histogram mode, sigma = 1, omega_b = 0.9.
// A constant chromatogram skips EM and returns the degenerate fit.
BaselineFit fit_baseline(std::span<const double> chromatogram, const em::Config& config);

struct BaselineCorrection {
    Imsc corrected;
    std::vector<BaselineFit> fits;  // one per column
};

// Fits every chromatogram (column) independently, subtracts b = mu + 2
// sigma and clamps negatives to zero.
BaselineCorrection correct_baseline_em(const Imsc& s, const em::Config& config);

enum class BaselineMethod { em, naive, median };

// naive: subtracts the first spectrum from every row. median: subtracts
// the per-column median. Both clamp negatives to zero.
Imsc baseline_naive(const Imsc& s);
Imsc baseline_median(const Imsc& s);
Imsc reference_baseline(const Imsc& s, BaselineMethod method);

// Model internals for tests (component order: 0 baseline, 1 signal).
namespace baseline_model {

em::LogDensityFn<double> log_density(double min_value, double max_value);
em::State initial_state(double mu, double sigma, double omega_b);
void m_step(std::span<const double> data, em::State& state);

}  // namespace baseline_model

}  // namespace imsprep
