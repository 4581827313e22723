#include "core/types.hpp"

#include <algorithm>
#include <cmath>

namespace imsprep {

void AxisConfig::validate() const {
    if (num_rows < 1 || num_cols < 1) {
        throw ContractError("axis config: num_rows and num_cols must be >= 1");
    }
    if (!(retention_max > 0.0) || !(rim_max > 0.0)) {
        throw ContractError("axis config: retention_max and rim_max must be > 0");
    }
    if (!(voltage > 0.0) || !(tube_length > 0.0)) {
        throw ContractError("axis config: voltage and tube_length must be > 0");
    }
}

Imsc::Imsc(AxisConfig axes, double fill) : axes_(axes) {
    axes_.validate();
    values_.assign(axes_.num_rows * axes_.num_cols, fill);
}

Imsc::Imsc(AxisConfig axes, std::vector<double> values) : axes_(axes), values_(std::move(values)) {
    axes_.validate();
    if (values_.size() != axes_.num_rows * axes_.num_cols) {
        throw ContractError("imsc: value count does not match axes dimensions");
    }
}

double Imsc::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double Imsc::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

void Matrix::remove_column(std::size_t c) {
    std::size_t out = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (j == c) continue;
            data[out++] = data[r * cols + j];
        }
    }
    cols -= 1;
    data.resize(rows * cols);
}

}  // namespace imsprep
