#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace imsprep {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

inline double log_gaussian_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return -0.5 * (kLogTwoPi + z * z) - std::log(sigma);
}

inline double gaussian_pdf(double x, double mu, double sigma) {
    return std::exp(log_gaussian_pdf(x, mu, sigma));
}

// Inverse Gaussian log-density; the support is x > 0.
inline double log_inverse_gaussian_pdf(double x, double mu, double lambda) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    const double d = x - mu;
    return 0.5 * (std::log(lambda) - kLogTwoPi - 3.0 * std::log(x)) - lambda * d * d / (2.0 * mu * mu * x);
}

inline double log_uniform_pdf(double range) {
    return -std::log(range);
}

// Weighted maximum-likelihood building blocks shared by the mixture
// M-steps. All take parallel value/weight spans; weight sums of zero keep
// callers responsible for leaving parameters untouched.

inline double weight_sum(std::span<const double> weights) {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

inline double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        num += weights[i] * values[i];
        den += weights[i];
    }
    return num / den;
}

inline double weighted_stddev(std::span<const double> values, std::span<const double> weights, double mu) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mu;
        num += weights[i] * d * d;
        den += weights[i];
    }
    return std::sqrt(num / den);
}

// Weighted inverse-Gaussian shape estimate
//   lambda = sum_i w_i / sum_i w_i (1/x_i - 1/mu).
// Terms with zero weight are skipped so out-of-support values (x <= 0,
// which receive zero membership) cannot poison the sum. The denominator is
// nonnegative by the weighted AM-HM inequality; it degenerates to 0 only
// when all weighted values coincide, where the estimate is floored.
inline double weighted_ig_lambda(std::span<const double> values, std::span<const double> weights, double mu) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] == 0.0) continue;
        num += weights[i];
        den += weights[i] * (1.0 / values[i] - 1.0 / mu);
    }
    return num / std::max(den, 1e-12);
}

}  // namespace imsprep
