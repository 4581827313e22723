#include "core/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/densities.hpp"

namespace imsprep {

double histogram_mode(std::span<const double> chromatogram) {
    if (chromatogram.empty()) throw ContractError("histogram_mode: empty chromatogram");
    std::map<long long, std::size_t> bins;
    for (double v : chromatogram) {
        const long long center = static_cast<long long>(std::floor(v + 0.5));
        ++bins[center];
    }
    long long best = bins.begin()->first;
    std::size_t best_count = 0;
    for (const auto& [center, count] : bins) {  // ascending centers, first max wins
        if (count > best_count) {
            best = center;
            best_count = count;
        }
    }
    return static_cast<double>(best);
}

namespace baseline_model {

em::LogDensityFn<double> log_density(double min_value, double max_value) {
    const double log_uniform = log_uniform_pdf(max_value - min_value);
    return [log_uniform](std::size_t component, const double& x, std::span<const double> theta) {
        return component == 0 ? log_gaussian_pdf(x, theta[0], theta[1]) : log_uniform;
    };
}

em::State initial_state(double mu, double sigma, double omega_b) {
    em::State state;
    state.weights = {omega_b, 1.0 - omega_b};
    state.params = {{mu, sigma}, {}};
    return state;
}

void m_step(std::span<const double> data, em::State& state) {
    const std::size_t n = data.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = state.memberships(i, 0);
    if (weight_sum(w) > 0.0) {
        const double mu = weighted_mean(data, w);
        state.params[0][0] = mu;
        state.params[0][1] = std::max(weighted_stddev(data, w, mu), kBaselineSigmaFloor);
    }
}

}  // namespace baseline_model

BaselineFit fit_baseline(std::span<const double> chromatogram, const em::Config& config) {
    if (chromatogram.empty()) throw ContractError("fit_baseline: empty chromatogram");
    const auto [min_it, max_it] = std::minmax_element(chromatogram.begin(), chromatogram.end());
    const double min_value = *min_it;
    const double max_value = *max_it;

    BaselineFit fit;
    if (min_value == max_value) {
        // constant chromatogram: no uniform component possible
        fit.mu = min_value;
        fit.sigma = kBaselineSigmaFloor;
        fit.omega_b = 1.0;
        fit.omega_s = 0.0;
        fit.b = fit.mu + 2.0 * fit.sigma;
        return fit;
    }

    const auto log_density = baseline_model::log_density(min_value, max_value);
    em::State initial = baseline_model::initial_state(histogram_mode(chromatogram), 1.0, 0.9);
    em::RunResult run =
        em::run_em<double>(chromatogram, log_density, std::move(initial), baseline_model::m_step, nullptr, config);

    fit.mu = run.state.params[0][0];
    fit.sigma = run.state.params[0][1];
    fit.omega_b = run.state.weights[0];
    fit.omega_s = run.state.weights[1];
    fit.b = fit.mu + 2.0 * fit.sigma;
    fit.iterations = run.iterations;
    fit.converged = run.converged;
    return fit;
}

BaselineCorrection correct_baseline_em(const Imsc& s, const em::Config& config) {
    const std::size_t rows = s.rows();
    const std::size_t cols = s.cols();
    BaselineCorrection result{Imsc(s.axes()), {}};
    result.fits.reserve(cols);

    std::vector<double> column(rows);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) column[r] = s(r, c);
        BaselineFit fit = fit_baseline(column, config);
        for (std::size_t r = 0; r < rows; ++r) {
            result.corrected(r, c) = std::max(s(r, c) - fit.b, 0.0);
        }
        result.fits.push_back(fit);
    }
    return result;
}

Imsc baseline_naive(const Imsc& s) {
    if (s.rows() < 2) throw ContractError("baseline_naive: needs at least two spectra");
    Imsc out(s.axes());
    for (std::size_t r = 0; r < s.rows(); ++r) {
        for (std::size_t c = 0; c < s.cols(); ++c) {
            out(r, c) = std::max(s(r, c) - s(0, c), 0.0);
        }
    }
    return out;
}

Imsc baseline_median(const Imsc& s) {
    if (s.rows() < 1) throw ContractError("baseline_median: empty matrix");
    Imsc out(s.axes());
    std::vector<double> column(s.rows());
    for (std::size_t c = 0; c < s.cols(); ++c) {
        for (std::size_t r = 0; r < s.rows(); ++r) column[r] = s(r, c);
        std::sort(column.begin(), column.end());
        const std::size_t mid = column.size() / 2;
        const double median = column.size() % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
        for (std::size_t r = 0; r < s.rows(); ++r) {
            out(r, c) = std::max(s(r, c) - median, 0.0);
        }
    }
    return out;
}

Imsc reference_baseline(const Imsc& s, BaselineMethod method) {
    switch (method) {
        case BaselineMethod::naive: return baseline_naive(s);
        case BaselineMethod::median: return baseline_median(s);
        case BaselineMethod::em: return correct_baseline_em(s, {}).corrected;
    }
    throw ContractError("reference_baseline: unknown method");
}

}  // namespace imsprep
