// Test-only helpers: independent oracles (numerical maximization,
// quadrature, brute-force pair counting) and samplers. Nothing here may
// call into the implementation paths it is used to check.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace testsupport {

// Composite Simpson quadrature on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
    const double h = (b - a) / (2.0 * panels);
    double acc = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) {
        acc += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

// Golden-section maximizer for unimodal functions on [a, b].
inline double maximize(const std::function<double(double)>& f, double a, double b, int iterations = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iterations; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Nelder-Mead minimizer, good enough to locate smooth unconstrained
// optima to ~1e-8 relative. Used as the independent weighted-likelihood
// maximizer for the M-step equivalence checks.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> start, double scale = 0.1,
                                       int iterations = 4000) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += scale * (std::abs(start[i]) > 1e-12 ? std::abs(start[i]) : 1.0);
    }
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = f(simplex[i]);

    auto order = [&] {
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = i + 1; j <= n; ++j) {
                if (values[j] < values[i]) {
                    std::swap(values[i], values[j]);
                    std::swap(simplex[i], simplex[j]);
                }
            }
        }
    };

    for (int iter = 0; iter < iterations; ++iter) {
        order();
        if (std::abs(values[n] - values[0]) < 1e-13 * (std::abs(values[0]) + 1e-13)) break;
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
            return p;
        };
        std::vector<double> reflected = blend(-1.0);
        const double fr = f(reflected);
        if (fr < values[0]) {
            std::vector<double> expanded = blend(-2.0);
            const double fe = f(expanded);
            simplex[n] = fe < fr ? expanded : reflected;
            values[n] = std::min(fe, fr);
        } else if (fr < values[n - 1]) {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            std::vector<double> contracted = blend(0.5);
            const double fc = f(contracted);
            if (fc < values[n]) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    }
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    return simplex[0];
}

// Pair-enumeration Fowlkes-Mallows, the O(n^2) definition.
inline double brute_force_fmi(std::span<const std::int64_t> truth, std::span<const std::int64_t> predicted) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (std::size_t j = i + 1; j < truth.size(); ++j) {
            const bool connected = truth[i] == truth[j];
            const bool clustered = predicted[i] == predicted[j];
            if (connected && clustered) tp += 1.0;
            if (!connected && clustered) fp += 1.0;
            if (connected && !clustered) fn += 1.0;
        }
    }
    if (tp + fp == 0.0 || tp + fn == 0.0) return 0.0;
    return std::sqrt(tp / (tp + fp) * (tp / (tp + fn)));
}

// Inverse Gaussian sampler (Michael, Schucany and Haas); test-only, the
// library itself never samples this distribution.
inline double sample_inverse_gaussian(imsprep::Rng& rng, double mu, double lambda) {
    const double nu = rng.normal(0.0, 1.0);
    const double y = nu * nu;
    const double x = mu + mu * mu * y / (2.0 * lambda) -
                     mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    const double u = rng.uniform();
    return u <= mu / (mu + x) ? x : mu * mu / x;
}

}  // namespace testsupport
