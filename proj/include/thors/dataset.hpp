#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace thors {

/// Feature matrix (rows = instances) with binary labels. Missing cells are
/// stored as NaN until imputed.
struct Dataset {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    std::size_t rows() const { return labels.size(); }
    std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
    std::size_t count(int label) const;
    bool has_missing() const;

    /// Rows in the given order (indices may repeat).
    Dataset subset(const std::vector<std::size_t>& rows) const;
    /// Columns in the given order.
    Dataset select_columns(const std::vector<std::size_t>& cols) const;

    /// Throws Error(InvalidArgument) on shape mismatch or labels outside {0,1}.
    void validate() const;
};

} // namespace thors
