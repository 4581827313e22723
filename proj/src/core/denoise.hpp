#pragma once

#include <optional>
#include <span>
#include <utility>

#include "core/em.hpp"
#include "core/types.hpp"

namespace imsprep {

// Minimum distance between two distinguishable peaks in reduced inverse
// mobility; at 2500 RIM points over 1.45 Vs/cm^2 this is about 5 index
// units, which motivates the default smoothing margin of 4.
inline constexpr double kMinPeakDistanceRim = 0.003;  // Vs/cm^2
inline constexpr int kDefaultSmoothingMargin = 4;     // rho, index units

// Parameters of the three-component intensity mixture: Gaussian noise,
// inverse-Gaussian signal and a uniform background catch-all.
struct DenoiseParams {
    double mu_n = 0.0;
    double sigma_n = 1.0;
    double mu_s = 1.0;
    double lambda_s = 1.0;
    double omega_n = 1.0 / 3.0;
    double omega_s = 1.0 / 3.0;
    double omega_b = 1.0 / 3.0;
    int rho = kDefaultSmoothingMargin;
};

// Mean over the window [r-rho, r+rho] x [t-rho, t+rho] clipped to the
// matrix; boundary cells divide by the number of existing entries.
Imsc local_average(const Imsc& s, int rho);

// Starting parameters estimated from the smoothed matrix: noise moments
// from the first and last 10% of columns of every spectrum, weights from
// the mu_n + 3 sigma_n census, signal moments from the exceedance set.
// Throws ModelError when no cell exceeds the census threshold.
DenoiseParams init_denoise(const Imsc& a);

struct DenoiseFit {
    DenoiseParams params;
    Matrix memberships;  // columns: noise, signal, background
    std::size_t iterations = 0;
    bool converged = false;
};

// EM over the flattened matrix. The uniform component spans
// [uniform_range.first, uniform_range.second]; by default the range of A.
DenoiseFit fit_denoise(const Imsc& a, const DenoiseParams& init, const em::Config& config,
                       std::optional<std::pair<double, double>> uniform_range = std::nullopt);

struct DenoiseResult {
    Imsc denoised;
    DenoiseParams params;
    std::size_t iterations = 0;
    bool converged = false;
};

// Full pipeline: local_average -> init -> fit on the smoothed matrix,
// then s_plus = s * (1 - W_noise) applied to the original intensities.
// With uniform_range_raw the background component spans the range of the
// raw matrix instead of the smoothed one.
DenoiseResult denoise_em(const Imsc& s, int rho, const em::Config& config, bool uniform_range_raw = false);

// Reference smoothers used for comparison.
Imsc smooth_gaussian(const Imsc& s, int window, double sigma);
Imsc smooth_savitzky_golay(const Imsc& s, int window, int order);
Imsc smooth_fft_lowpass(const Imsc& s, double cutoff_fraction);

enum class Smoother { gaussian, savitzky_golay, fft_lowpass };

struct SmootherParams {
    int window = 2 * kDefaultSmoothingMargin + 1;
    double sigma = kDefaultSmoothingMargin / 2.0;
    int order = 2;
    double cutoff_fraction = 0.1;
};

Imsc reference_smooth(const Imsc& s, Smoother method, const SmootherParams& params = {});

// Internals of the mixture model, exposed so tests can drive the E/M
// steps directly. Component order: 0 noise, 1 signal, 2 background.
namespace denoise_model {

em::LogDensityFn<double> log_density(double range_min, double range_max);
em::State initial_state(const DenoiseParams& p);
void m_step(std::span<const double> data, em::State& state);
DenoiseParams params_from_state(const em::State& state, int rho);

}  // namespace denoise_model

}  // namespace imsprep
