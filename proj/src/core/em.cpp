#include "core/em.hpp"

namespace imsprep::em {

bool same_shape(const State& a, const State& b) {
    if (a.weights.size() != b.weights.size() || a.params.size() != b.params.size()) return false;
    for (std::size_t c = 0; c < a.params.size(); ++c) {
        if (a.params[c].size() != b.params[c].size()) return false;
    }
    return true;
}

bool has_converged(const State& before, const State& after, double epsilon) {
    if (!same_shape(before, after)) {
        throw ContractError("has_converged: parameter shapes differ");
    }
    for (std::size_t c = 0; c < before.weights.size(); ++c) {
        if (relative_change(before.weights[c], after.weights[c]) >= epsilon) return false;
    }
    for (std::size_t c = 0; c < before.params.size(); ++c) {
        for (std::size_t q = 0; q < before.params[c].size(); ++q) {
            if (relative_change(before.params[c][q], after.params[c][q]) >= epsilon) return false;
        }
    }
    return true;
}

}  // namespace imsprep::em
