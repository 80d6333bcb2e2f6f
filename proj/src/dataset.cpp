#include "thors/dataset.hpp"

#include "thors/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thors {

std::size_t Dataset::count(int label) const
{
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

bool Dataset::has_missing() const
{
    return features.array().isNaN().any();
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const
{
    Dataset out;
    out.feature_names = feature_names;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(labels[rows[i]]);
    }
    return out;
}

Dataset Dataset::select_columns(const std::vector<std::size_t>& cols) const
{
    Dataset out;
    out.labels = labels;
    out.features.resize(features.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.features.col(static_cast<Eigen::Index>(j)) = features.col(static_cast<Eigen::Index>(cols[j]));
        out.feature_names.push_back(cols[j] < feature_names.size() ? feature_names[cols[j]]
                                                                   : "x" + std::to_string(cols[j]));
    }
    return out;
}

void Dataset::validate() const
{
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw Error(ErrorCode::InvalidArgument, "feature rows and labels differ in length");
    }
    if (!feature_names.empty() && feature_names.size() != cols()) {
        throw Error(ErrorCode::InvalidArgument, "feature_names length does not match columns");
    }
    for (int y : labels) {
        if (y != 0 && y != 1) {
            throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
        }
    }
}

} // namespace thors
