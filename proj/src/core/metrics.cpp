#include "core/metrics.hpp"

#include <cmath>
#include <unordered_map>

#include "core/errors.hpp"

namespace imsprep {

double cosine_similarity(const Imsc& m, const Imsc& n) {
    if (m.rows() != n.rows() || m.cols() != n.cols()) {
        throw ContractError("cosine_similarity: dimension mismatch");
    }
    double dot = 0.0, norm_m = 0.0, norm_n = 0.0;
    const auto mv = m.values();
    const auto nv = n.values();
    for (std::size_t i = 0; i < mv.size(); ++i) {
        dot += mv[i] * nv[i];
        norm_m += mv[i] * mv[i];
        norm_n += nv[i] * nv[i];
    }
    if (!(norm_m > 0.0) || !(norm_n > 0.0)) {
        throw ContractError("cosine_similarity: undefined for an all-zero matrix");
    }
    return dot / (std::sqrt(norm_m) * std::sqrt(norm_n));
}

ContingencyTable ContingencyTable::build(std::span<const std::int64_t> truth,
                                         std::span<const std::int64_t> predicted) {
    if (truth.size() != predicted.size()) {
        throw ContractError("contingency table: assignments cover different point sets");
    }
    std::unordered_map<std::int64_t, std::size_t> row_index, col_index;
    for (std::int64_t t : truth) row_index.emplace(t, row_index.size());
    for (std::int64_t p : predicted) col_index.emplace(p, col_index.size());

    ContingencyTable table;
    table.n = truth.size();
    table.counts.assign(row_index.size(), std::vector<std::size_t>(col_index.size(), 0));
    table.row_sums.assign(row_index.size(), 0);
    table.col_sums.assign(col_index.size(), 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const std::size_t r = row_index.at(truth[i]);
        const std::size_t c = col_index.at(predicted[i]);
        ++table.counts[r][c];
        ++table.row_sums[r];
        ++table.col_sums[c];
    }
    return table;
}

namespace {

double pairs(std::size_t count) {
    return 0.5 * static_cast<double>(count) * static_cast<double>(count - 1);
}

}  // namespace

double fmi(std::span<const std::int64_t> truth, std::span<const std::int64_t> predicted) {
    const ContingencyTable table = ContingencyTable::build(truth, predicted);
    // pair counts through the table: TP from cells, TP+FP from cluster
    // sizes, TP+FN from partition sizes
    double tp = 0.0;
    for (const auto& row : table.counts) {
        for (std::size_t cell : row) tp += pairs(cell);
    }
    double clustered = 0.0;  // TP + FP
    for (std::size_t s : table.col_sums) clustered += pairs(s);
    double connected = 0.0;  // TP + FN
    for (std::size_t s : table.row_sums) connected += pairs(s);

    if (!(clustered > 0.0) || !(connected > 0.0)) return 0.0;
    return std::sqrt(tp / clustered * (tp / connected));
}

double nvi(std::span<const std::int64_t> truth, std::span<const std::int64_t> predicted) {
    const ContingencyTable table = ContingencyTable::build(truth, predicted);
    const double n = static_cast<double>(table.n);

    auto entropy_of_sums = [&](const std::vector<std::size_t>& sums) {
        double h = 0.0;
        for (std::size_t s : sums) {
            if (s == 0) continue;
            const double p = static_cast<double>(s) / n;
            h -= p * std::log(p);
        }
        return h;
    };
    const double h_truth = entropy_of_sums(table.row_sums);
    const double h_predicted = entropy_of_sums(table.col_sums);

    double h_truth_given_predicted = 0.0;
    double h_predicted_given_truth = 0.0;
    for (std::size_t i = 0; i < table.counts.size(); ++i) {
        for (std::size_t j = 0; j < table.counts[i].size(); ++j) {
            const std::size_t a = table.counts[i][j];
            if (a == 0) continue;
            const double p = static_cast<double>(a) / n;
            h_truth_given_predicted -=
                p * std::log(static_cast<double>(a) / static_cast<double>(table.col_sums[j]));
            h_predicted_given_truth -=
                p * std::log(static_cast<double>(a) / static_cast<double>(table.row_sums[i]));
        }
    }
    if (h_truth != 0.0) {
        return (h_truth_given_predicted + h_predicted_given_truth) / h_truth;
    }
    return h_predicted;
}

std::vector<std::int64_t> labels_from_assignments(const std::vector<std::size_t>& assignments) {
    std::vector<std::int64_t> out;
    out.reserve(assignments.size());
    for (std::size_t a : assignments) out.push_back(static_cast<std::int64_t>(a));
    return out;
}

}  // namespace imsprep
