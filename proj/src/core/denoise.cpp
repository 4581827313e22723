#include "core/denoise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "core/densities.hpp"

namespace imsprep {

Imsc local_average(const Imsc& s, int rho) {
    if (rho < 0) throw ContractError("local_average: rho must be >= 0");
    const std::size_t rows = s.rows();
    const std::size_t cols = s.cols();
    if (rho == 0) return s;

    // Summed-area table with a zero top row / left column.
    std::vector<double> integral((rows + 1) * (cols + 1), 0.0);
    const std::size_t stride = cols + 1;
    for (std::size_t r = 0; r < rows; ++r) {
        double row_acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            row_acc += s(r, c);
            integral[(r + 1) * stride + (c + 1)] = integral[r * stride + (c + 1)] + row_acc;
        }
    }

    Imsc out(s.axes());
    const auto irows = static_cast<std::ptrdiff_t>(rows);
    const auto icols = static_cast<std::ptrdiff_t>(cols);
    for (std::ptrdiff_t r = 0; r < irows; ++r) {
        const std::size_t r0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, r - rho));
        const std::size_t r1 = static_cast<std::size_t>(std::min<std::ptrdiff_t>(irows - 1, r + rho));
        for (std::ptrdiff_t c = 0; c < icols; ++c) {
            const std::size_t c0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, c - rho));
            const std::size_t c1 = static_cast<std::size_t>(std::min<std::ptrdiff_t>(icols - 1, c + rho));
            const double sum = integral[(r1 + 1) * stride + (c1 + 1)] - integral[r0 * stride + (c1 + 1)] -
                               integral[(r1 + 1) * stride + c0] + integral[r0 * stride + c0];
            const double count = static_cast<double>((r1 - r0 + 1) * (c1 - c0 + 1));
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = sum / count;
        }
    }
    return out;
}

DenoiseParams init_denoise(const Imsc& a) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    const std::size_t margin = std::max<std::size_t>(1, cols / 10);

    double sum = 0.0, sq_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c >= margin && c + margin < cols) continue;
            const double v = a(r, c);
            sum += v;
            sq_sum += v * v;
            ++count;
        }
    }
    DenoiseParams p;
    p.mu_n = sum / static_cast<double>(count);
    const double var = std::max(0.0, sq_sum / static_cast<double>(count) - p.mu_n * p.mu_n);
    p.sigma_n = std::max(std::sqrt(var), 1e-6);

    const double threshold = p.mu_n + 3.0 * p.sigma_n;
    std::size_t below = 0;
    double signal_sum = 0.0;
    std::size_t signal_count = 0;
    for (double v : a.values()) {
        if (v <= threshold) {
            ++below;
        } else {
            signal_sum += v;
            ++signal_count;
        }
    }
    if (signal_count == 0) {
        throw ModelError("init_denoise: no signal-like cells above mu_n + 3 sigma_n");
    }
    p.omega_n = static_cast<double>(below) / static_cast<double>(a.size());
    p.omega_s = (1.0 - p.omega_n) * 0.999;
    p.omega_b = (1.0 - p.omega_n) * 0.001;

    p.mu_s = signal_sum / static_cast<double>(signal_count);
    double recip_sum = 0.0;
    for (double v : a.values()) {
        if (v > threshold) recip_sum += 1.0 / v - 1.0 / p.mu_s;
    }
    p.lambda_s = static_cast<double>(signal_count) / std::max(recip_sum, 1e-12);
    return p;
}

namespace denoise_model {

em::LogDensityFn<double> log_density(double range_min, double range_max) {
    const double range = range_max - range_min;
    if (!(range > 0.0)) {
        throw ModelError("denoise: uniform component needs a positive intensity range");
    }
    const double log_uniform = log_uniform_pdf(range);
    return [log_uniform](std::size_t component, const double& x, std::span<const double> theta) {
        switch (component) {
            case 0: return log_gaussian_pdf(x, theta[0], theta[1]);
            case 1: return log_inverse_gaussian_pdf(x, theta[0], theta[1]);
            default: return log_uniform;
        }
    };
}

em::State initial_state(const DenoiseParams& p) {
    em::State state;
    state.weights = {p.omega_n, p.omega_s, p.omega_b};
    state.params = {{p.mu_n, p.sigma_n}, {p.mu_s, p.lambda_s}, {}};
    return state;
}

void m_step(std::span<const double> data, em::State& state) {
    const std::size_t n = data.size();
    std::vector<double> w(n);

    auto column = [&](std::size_t c) {
        for (std::size_t i = 0; i < n; ++i) w[i] = state.memberships(i, c);
    };

    column(0);
    if (weight_sum(w) > 0.0) {
        const double mu = weighted_mean(data, w);
        state.params[0][0] = mu;
        state.params[0][1] = std::max(weighted_stddev(data, w, mu), 1e-6);
    }
    column(1);
    if (weight_sum(w) > 0.0) {
        const double mu = weighted_mean(data, w);
        state.params[1][0] = mu;
        state.params[1][1] = weighted_ig_lambda(data, w, mu);
    }
    // the uniform component has no free parameters
}

DenoiseParams params_from_state(const em::State& state, int rho) {
    DenoiseParams p;
    p.mu_n = state.params[0][0];
    p.sigma_n = state.params[0][1];
    p.mu_s = state.params[1][0];
    p.lambda_s = state.params[1][1];
    p.omega_n = state.weights[0];
    p.omega_s = state.weights[1];
    p.omega_b = state.weights[2];
    p.rho = rho;
    return p;
}

}  // namespace denoise_model

DenoiseFit fit_denoise(const Imsc& a, const DenoiseParams& init, const em::Config& config,
                       std::optional<std::pair<double, double>> uniform_range) {
    const double range_min = uniform_range ? uniform_range->first : a.min_value();
    const double range_max = uniform_range ? uniform_range->second : a.max_value();

    const auto log_density = denoise_model::log_density(range_min, range_max);
    em::RunResult run = em::run_em<double>(a.values(), log_density, denoise_model::initial_state(init),
                                           denoise_model::m_step, nullptr, config);

    DenoiseFit fit;
    fit.params = denoise_model::params_from_state(run.state, init.rho);
    fit.memberships = std::move(run.state.memberships);
    fit.iterations = run.iterations;
    fit.converged = run.converged;
    return fit;
}

DenoiseResult denoise_em(const Imsc& s, int rho, const em::Config& config, bool uniform_range_raw) {
    if (s.size() == 0) throw ContractError("denoise_em: empty matrix");
    const Imsc a = local_average(s, rho);
    DenoiseParams init = init_denoise(a);
    init.rho = rho;
    std::optional<std::pair<double, double>> range;
    if (uniform_range_raw) range = {s.min_value(), s.max_value()};
    DenoiseFit fit = fit_denoise(a, init, config, range);

    DenoiseResult result{Imsc(s.axes()), fit.params, fit.iterations, fit.converged};
    // memberships were estimated on the smoothed matrix but the attenuation
    // applies to the original intensities
    for (std::size_t i = 0; i < s.size(); ++i) {
        result.denoised.values()[i] = s.values()[i] * (1.0 - fit.memberships(i, 0));
    }
    return result;
}

namespace {

void check_window(const Imsc& s, int window) {
    if (window < 1 || window % 2 == 0) {
        throw ContractError("smoother window must be odd and positive");
    }
    if (static_cast<std::size_t>(window) > s.rows() || static_cast<std::size_t>(window) > s.cols()) {
        throw ContractError("smoother window larger than matrix");
    }
}

// Separable convolution along both axes with per-position kernel
// renormalization at the clipped boundaries.
Imsc separable_filter(const Imsc& s, const std::vector<double>& kernel) {
    const int half = static_cast<int>(kernel.size() / 2);
    const auto rows = static_cast<std::ptrdiff_t>(s.rows());
    const auto cols = static_cast<std::ptrdiff_t>(s.cols());

    Imsc tmp(s.axes());
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            double acc = 0.0, norm = 0.0;
            for (int k = -half; k <= half; ++k) {
                const std::ptrdiff_t cc = c + k;
                if (cc < 0 || cc >= cols) continue;
                const double kv = kernel[static_cast<std::size_t>(k + half)];
                acc += kv * s(static_cast<std::size_t>(r), static_cast<std::size_t>(cc));
                norm += kv;
            }
            tmp(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc / norm;
        }
    }
    Imsc out(s.axes());
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
        for (std::ptrdiff_t r = 0; r < rows; ++r) {
            double acc = 0.0, norm = 0.0;
            for (int k = -half; k <= half; ++k) {
                const std::ptrdiff_t rr = r + k;
                if (rr < 0 || rr >= rows) continue;
                const double kv = kernel[static_cast<std::size_t>(k + half)];
                acc += kv * tmp(static_cast<std::size_t>(rr), static_cast<std::size_t>(c));
                norm += kv;
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc / norm;
        }
    }
    return out;
}

// Solves the small symmetric system of the polynomial least-squares fit by
// Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (std::abs(m[pivot][col]) < 1e-300) {
            throw ContractError("savitzky-golay: singular fit (order too high for window)");
        }
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m[r][col] / m[col][col];
            for (std::size_t k = col; k < n; ++k) m[r][k] -= f * m[col][k];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= m[i][k] * x[k];
        x[i] = acc / m[i][i];
    }
    return x;
}

// Weights of the least-squares polynomial value at offset 0 for a window
// spanning offsets [-left, right]. Fitting an order-q polynomial over any
// window reproduces polynomials up to order q exactly, so boundary windows
// are simply clipped instead of mirrored.
std::vector<double> sg_weights(int left, int right, int order) {
    const int len = left + right + 1;
    const std::size_t terms = static_cast<std::size_t>(order) + 1;
    // normal equations X^T X beta = X^T y; the smoothed value is beta_0
    std::vector<std::vector<double>> xtx(terms, std::vector<double>(terms, 0.0));
    for (int d = -left; d <= right; ++d) {
        double pi = 1.0;
        std::vector<double> powers(2 * terms - 1);
        for (std::size_t k = 0; k < powers.size(); ++k) {
            powers[k] = pi;
            pi *= d;
        }
        for (std::size_t a = 0; a < terms; ++a) {
            for (std::size_t b = 0; b < terms; ++b) xtx[a][b] += powers[a + b];
        }
    }
    // row 0 of (X^T X)^{-1} X^T gives the weights; compute via solves
    std::vector<double> weights(static_cast<std::size_t>(len));
    for (int j = 0; j < len; ++j) {
        std::vector<double> rhs(terms, 0.0);
        double pi = 1.0;
        const int d = j - left;
        for (std::size_t k = 0; k < terms; ++k) {
            rhs[k] = pi;
            pi *= d;
        }
        weights[static_cast<std::size_t>(j)] = solve_dense(xtx, rhs)[0];
    }
    return weights;
}

// One Savitzky-Golay pass along an axis; coefficient rows are shared by
// every line, so the per-position tables are built once.
void sg_pass(const Imsc& in, Imsc& out, int window, int order, bool along_columns) {
    const int half = window / 2;
    const std::ptrdiff_t length =
        static_cast<std::ptrdiff_t>(along_columns ? in.rows() : in.cols());
    const std::ptrdiff_t lines = static_cast<std::ptrdiff_t>(along_columns ? in.cols() : in.rows());

    std::vector<std::vector<double>> tables(static_cast<std::size_t>(length));
    for (std::ptrdiff_t p = 0; p < length; ++p) {
        const int left = static_cast<int>(std::min<std::ptrdiff_t>(half, p));
        const int right = static_cast<int>(std::min<std::ptrdiff_t>(half, length - 1 - p));
        tables[static_cast<std::size_t>(p)] = sg_weights(left, right, order);
    }

    for (std::ptrdiff_t line = 0; line < lines; ++line) {
        for (std::ptrdiff_t p = 0; p < length; ++p) {
            const int left = static_cast<int>(std::min<std::ptrdiff_t>(half, p));
            const auto& w = tables[static_cast<std::size_t>(p)];
            double acc = 0.0;
            for (std::size_t k = 0; k < w.size(); ++k) {
                const std::ptrdiff_t q = p - left + static_cast<std::ptrdiff_t>(k);
                const double v = along_columns ? in(static_cast<std::size_t>(q), static_cast<std::size_t>(line))
                                               : in(static_cast<std::size_t>(line), static_cast<std::size_t>(q));
                acc += w[k] * v;
            }
            if (along_columns) {
                out(static_cast<std::size_t>(p), static_cast<std::size_t>(line)) = acc;
            } else {
                out(static_cast<std::size_t>(line), static_cast<std::size_t>(p)) = acc;
            }
        }
    }
}

std::mutex fftw_plan_mutex;

}  // namespace

Imsc smooth_gaussian(const Imsc& s, int window, double sigma) {
    check_window(s, window);
    if (!(sigma > 0.0)) throw ContractError("smooth_gaussian: sigma must be > 0");
    const int half = window / 2;
    std::vector<double> kernel(static_cast<std::size_t>(window));
    for (int k = -half; k <= half; ++k) {
        kernel[static_cast<std::size_t>(k + half)] = std::exp(-0.5 * (k / sigma) * (k / sigma));
    }
    return separable_filter(s, kernel);
}

Imsc smooth_savitzky_golay(const Imsc& s, int window, int order) {
    check_window(s, window);
    if (order < 0 || order >= window) {
        throw ContractError("smooth_savitzky_golay: order must be in [0, window)");
    }
    Imsc tmp(s.axes());
    sg_pass(s, tmp, window, order, false);
    Imsc out(s.axes());
    sg_pass(tmp, out, window, order, true);
    return out;
}

Imsc smooth_fft_lowpass(const Imsc& s, double cutoff_fraction) {
    if (!(cutoff_fraction > 0.0) || cutoff_fraction > 1.0) {
        throw ContractError("smooth_fft_lowpass: cutoff fraction must be in (0, 1]");
    }
    const std::size_t rows = s.rows();
    const std::size_t cols = s.cols();
    const std::size_t spectrum_cols = cols / 2 + 1;

    std::vector<double> in(s.values().begin(), s.values().end());
    std::vector<fftw_complex> spectrum(rows * spectrum_cols);

    fftw_plan forward, backward;
    {
        // FFTW planning is not thread-safe; execution on private arrays is.
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        forward = fftw_plan_dft_r2c_2d(static_cast<int>(rows), static_cast<int>(cols), in.data(),
                                       spectrum.data(), FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
        backward = fftw_plan_dft_c2r_2d(static_cast<int>(rows), static_cast<int>(cols), spectrum.data(),
                                        in.data(), FFTW_ESTIMATE);
    }
    fftw_execute(forward);

    // elliptical passband: semi-axes are cutoff_fraction of each Nyquist
    const double radius_r = cutoff_fraction * static_cast<double>(rows) / 2.0;
    const double radius_c = cutoff_fraction * static_cast<double>(cols) / 2.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double fr = static_cast<double>(std::min(r, rows - r));
        for (std::size_t c = 0; c < spectrum_cols; ++c) {
            const double fc = static_cast<double>(c);
            const double zr = fr / radius_r;
            const double zc = fc / radius_c;
            if (zr * zr + zc * zc > 1.0) {
                spectrum[r * spectrum_cols + c][0] = 0.0;
                spectrum[r * spectrum_cols + c][1] = 0.0;
            }
        }
    }
    fftw_execute(backward);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }

    Imsc out(s.axes());
    const double scale = 1.0 / static_cast<double>(rows * cols);
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = in[i] * scale;
    return out;
}

Imsc reference_smooth(const Imsc& s, Smoother method, const SmootherParams& params) {
    switch (method) {
        case Smoother::gaussian: return smooth_gaussian(s, params.window, params.sigma);
        case Smoother::savitzky_golay: return smooth_savitzky_golay(s, params.window, params.order);
        case Smoother::fft_lowpass: return smooth_fft_lowpass(s, params.cutoff_fraction);
    }
    throw ContractError("reference_smooth: unknown method");
}

}  // namespace imsprep
