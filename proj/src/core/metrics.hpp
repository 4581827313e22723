#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/types.hpp"

namespace imsprep {

// Cosine of the angle between two matrices read as flat vectors, in
// [-1, 1]. Throws on dimension mismatch or when either matrix is all
// zeros.
double cosine_similarity(const Imsc& m, const Imsc& n);

// Counts of points per (true partition, predicted cluster) pair. Labels
// may be arbitrary integers; they are densified on construction.
struct ContingencyTable {
    std::size_t n = 0;
    std::vector<std::vector<std::size_t>> counts;  // |P| x |C|
    std::vector<std::size_t> row_sums;             // per partition
    std::vector<std::size_t> col_sums;             // per cluster

    static ContingencyTable build(std::span<const std::int64_t> truth,
                                  std::span<const std::int64_t> predicted);
};

// Fowlkes-Mallows index: geometric mean of pairwise precision and recall
// over unordered point pairs. 0/0 counts as 0.
double fmi(std::span<const std::int64_t> truth, std::span<const std::int64_t> predicted);

// Normalized variation of information with natural logarithms;
// (H(P|C) + H(C|P)) / H(P), or H(C) when H(P) = 0.
double nvi(std::span<const std::int64_t> truth, std::span<const std::int64_t> predicted);

// Adapters for clustering output.
std::vector<std::int64_t> labels_from_assignments(const std::vector<std::size_t>& assignments);

}  // namespace imsprep
