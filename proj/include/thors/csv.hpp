#pragma once

#include "thors/dataset.hpp"
#include "thors/validation.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace thors {

enum class NaPolicy {
    Mark,   // "na", "NA", "nan", "?" and empty cells become NaN (imputed later)
    Reject, // any such cell is an UnparseableCell error
};

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads a headered numeric CSV. The label column is compared as text with
/// `positive_value` (1 if equal, 0 otherwise); every other column must parse
/// as a number or a missing token.
///
/// Errors: Io (cannot open), MissingColumn, UnparseableCell (message carries
/// 1-based row and column), SingleClassData.
Dataset load_csv(const std::string& path, const std::string& label_col,
                 const std::string& positive_value, NaPolicy na_policy = NaPolicy::Mark);

/// Same, from an in-memory string.
Dataset parse_csv(std::string_view text, const std::string& label_col,
                  const std::string& positive_value, NaPolicy na_policy = NaPolicy::Mark);

/// External scores: a headered CSV with `score` and `label` (0/1) columns.
std::vector<LabeledScore> load_scores_csv(const std::string& path);
std::vector<LabeledScore> parse_scores_csv(std::string_view text);

/// Shortest round-trippable decimal form; "nan"/"inf"/"-inf" for specials.
std::string format_number(double v);

} // namespace thors
