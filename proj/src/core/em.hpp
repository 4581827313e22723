#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/types.hpp"

namespace imsprep::em {

struct Config {
    double epsilon = 0.001;          // relative-change convergence threshold
    std::size_t max_iterations = 1000;
};

// Mixture weights, per-component parameter vectors and the membership
// matrix W (n x C, row i sums to 1 after an E-step). Component parameter
// meaning is owned by the concrete model.
struct State {
    std::vector<double> weights;
    std::vector<std::vector<double>> params;
    Matrix memberships;

    std::size_t components() const { return weights.size(); }
};

// log f_c(x | theta_c); -infinity marks x outside the component's support.
template <typename Datum>
using LogDensityFn = std::function<double(std::size_t component, const Datum& x, std::span<const double> theta)>;

// Updates theta from data and memberships; weights are E-step territory.
template <typename Datum>
using MStepFn = std::function<void(std::span<const Datum> data, State& state)>;

// Runs between E- and M-step (cluster merging). Returns true when it
// restructured the state, which suppresses the convergence test for the
// iteration.
template <typename Datum>
using IterationHookFn = std::function<bool(std::size_t iteration, std::span<const Datum> data, State& state)>;

// Relative change kappa = |a - b| / max(|a|, |b|), defined as 0 when both
// values are 0.
inline double relative_change(double before, double after) {
    if (before == 0.0 && after == 0.0) return 0.0;
    return std::abs(after - before) / std::max(std::abs(after), std::abs(before));
}

// True when every component parameter and every mixture weight changed by
// less than epsilon in relative terms. Throws on shape mismatch.
bool has_converged(const State& before, const State& after, double epsilon);

bool same_shape(const State& a, const State& b);

// Membership update: W(i,c) = w_c f_c(x_i) / sum_k w_k f_k(x_i), followed
// by the weight update w*_c = mean_i W(i,c). Computed in log space with
// max subtraction so underflowing densities stay usable.
template <typename Datum>
void e_step(std::span<const Datum> data, const LogDensityFn<Datum>& log_density, State& state) {
    const std::size_t n = data.size();
    const std::size_t c_count = state.components();
    if (c_count < 1) throw ContractError("e_step: mixture needs at least one component");
    if (state.memberships.rows != n || state.memberships.cols != c_count) {
        state.memberships = Matrix(n, c_count);
    }

    std::vector<double> log_weights(c_count);
    for (std::size_t c = 0; c < c_count; ++c) {
        log_weights[c] =
            state.weights[c] > 0.0 ? std::log(state.weights[c]) : -std::numeric_limits<double>::infinity();
    }

    std::vector<double> column_sums(c_count, 0.0);
    std::vector<double> log_terms(c_count);
    for (std::size_t i = 0; i < n; ++i) {
        double max_term = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < c_count; ++c) {
            double term = log_weights[c];
            if (term != -std::numeric_limits<double>::infinity()) {
                term += log_density(c, data[i], state.params[c]);
            }
            if (std::isnan(term)) {
                throw NumericError("e_step: NaN density for datum " + std::to_string(i) +
                                   " in component " + std::to_string(c));
            }
            log_terms[c] = term;
            if (term > max_term) max_term = term;
        }
        if (max_term == -std::numeric_limits<double>::infinity()) {
            throw ModelError("e_step: all component densities vanish at datum " + std::to_string(i));
        }
        double denom = 0.0;
        for (std::size_t c = 0; c < c_count; ++c) {
            log_terms[c] = std::exp(log_terms[c] - max_term);
            denom += log_terms[c];
        }
        for (std::size_t c = 0; c < c_count; ++c) {
            const double w = log_terms[c] / denom;
            state.memberships(i, c) = w;
            column_sums[c] += w;
        }
    }
    for (std::size_t c = 0; c < c_count; ++c) {
        state.weights[c] = column_sums[c] / static_cast<double>(n);
    }
}

// Observed-data log-likelihood sum_i log sum_c w_c f_c(x_i).
template <typename Datum>
double log_likelihood(std::span<const Datum> data, const LogDensityFn<Datum>& log_density,
                      const State& state) {
    double total = 0.0;
    std::vector<double> terms(state.components());
    for (const Datum& x : data) {
        double max_term = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < state.components(); ++c) {
            double term = state.weights[c] > 0.0
                              ? std::log(state.weights[c]) + log_density(c, x, state.params[c])
                              : -std::numeric_limits<double>::infinity();
            terms[c] = term;
            if (term > max_term) max_term = term;
        }
        if (max_term == -std::numeric_limits<double>::infinity()) {
            return -std::numeric_limits<double>::infinity();
        }
        double acc = 0.0;
        for (double t : terms) acc += std::exp(t - max_term);
        total += max_term + std::log(acc);
    }
    return total;
}

struct RunResult {
    State state;
    std::size_t iterations = 0;
    bool converged = false;
};

// The EM loop: e_step, optional hook, m_step, convergence test over all
// parameters and weights. Hitting max_iterations is reported, not thrown.
template <typename Datum>
RunResult run_em(std::span<const Datum> data, const LogDensityFn<Datum>& log_density, State initial,
                 const MStepFn<Datum>& m_step, const IterationHookFn<Datum>& hook, const Config& config) {
    if (!(config.epsilon > 0.0)) throw ContractError("em config: epsilon must be > 0");
    if (config.max_iterations < 1) throw ContractError("em config: max_iterations must be >= 1");

    RunResult result;
    result.state = std::move(initial);
    State snapshot = result.state;  // weights and params of the previous iteration

    for (std::size_t iteration = 1; iteration <= config.max_iterations; ++iteration) {
        e_step(data, log_density, result.state);
        bool restructured = false;
        if (hook) restructured = hook(iteration, data, result.state);
        m_step(data, result.state);

        result.iterations = iteration;
        if (!restructured && same_shape(snapshot, result.state) &&
            has_converged(snapshot, result.state, config.epsilon)) {
            result.converged = true;
            return result;
        }
        snapshot.weights = result.state.weights;
        snapshot.params = result.state.params;
    }
    return result;
}

}  // namespace imsprep::em
