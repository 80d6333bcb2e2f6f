#include "thors/csv.hpp"

#include "thors/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace thors {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

bool is_missing_token(const std::string& s) {
    return s.empty() || s == "na" || s == "NA" || s == "nan" || s == "NaN" || s == "?";
}

bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::Io, "error reading " + path);
    return ss.str();
}

// Lines without the trailing newline; blank lines dropped. A UTF-8 BOM on
// the first line is removed.
std::vector<std::string_view> lines_of(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!trim(line).empty()) out.push_back(line);
        pos = nl + 1;
    }
    return out;
}

std::string cell_ref(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

} // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

Dataset parse_csv(std::string_view text, const std::string& label_col,
                  const std::string& positive_value, NaPolicy na_policy) {
    auto lines = lines_of(text);
    if (lines.empty()) throw Error(ErrorCode::InvalidArgument, "CSV has no header row");
    auto header = split_csv_line(lines[0]);
    std::size_t label_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == label_col) {
            label_idx = j;
            break;
        }
    }
    if (label_idx == header.size())
        throw Error(ErrorCode::MissingColumn, "label column '" + label_col + "' not in header");

    Dataset ds;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != label_idx) ds.feature_names.push_back(header[j]);
    const std::size_t n = lines.size() - 1;
    const std::size_t d = ds.feature_names.size();
    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ds.labels.resize(n);

    const std::string positive = trim(positive_value);
    for (std::size_t i = 0; i < n; ++i) {
        auto fields = split_csv_line(lines[i + 1]);
        const std::size_t file_row = i + 2; // 1-based, header is row 1
        if (fields.size() != header.size())
            throw Error(ErrorCode::UnparseableCell,
                        "row " + std::to_string(file_row) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
        std::size_t col = 0;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (j == label_idx) {
                ds.labels[i] = fields[j] == positive ? 1 : 0;
                continue;
            }
            double v = 0.0;
            if (is_missing_token(fields[j])) {
                if (na_policy == NaPolicy::Reject)
                    throw Error(ErrorCode::UnparseableCell,
                                "missing value at " + cell_ref(file_row, j + 1));
                v = std::numeric_limits<double>::quiet_NaN();
            } else if (!parse_double(fields[j], v) || !std::isfinite(v)) {
                throw Error(ErrorCode::UnparseableCell, "cannot parse '" + fields[j] + "' at " +
                                                            cell_ref(file_row, j + 1));
            }
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col++)) = v;
        }
    }
    if (ds.count(0) == 0 || ds.count(1) == 0)
        throw Error(ErrorCode::SingleClassData, "data contains a single class");
    return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_col,
                 const std::string& positive_value, NaPolicy na_policy) {
    return parse_csv(read_file(path), label_col, positive_value, na_policy);
}

std::vector<LabeledScore> parse_scores_csv(std::string_view text) {
    auto lines = lines_of(text);
    if (lines.empty()) throw Error(ErrorCode::InvalidArgument, "score CSV has no header row");
    auto header = split_csv_line(lines[0]);
    std::size_t si = header.size();
    std::size_t li = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == "score") si = j;
        if (header[j] == "label") li = j;
    }
    if (si == header.size()) throw Error(ErrorCode::MissingColumn, "score CSV lacks 'score'");
    if (li == header.size()) throw Error(ErrorCode::MissingColumn, "score CSV lacks 'label'");

    std::vector<LabeledScore> out;
    out.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_csv_line(lines[i]);
        const std::size_t file_row = i + 1;
        if (fields.size() != header.size())
            throw Error(ErrorCode::UnparseableCell,
                        "row " + std::to_string(file_row) + " has the wrong number of fields");
        double s = 0.0;
        if (!parse_double(fields[si], s))
            throw Error(ErrorCode::UnparseableCell,
                        "cannot parse score '" + fields[si] + "' at " + cell_ref(file_row, si + 1));
        int label = 0;
        if (fields[li] == "1")
            label = 1;
        else if (fields[li] != "0")
            throw Error(ErrorCode::UnparseableCell, "label must be 0 or 1 at " +
                                                        cell_ref(file_row, li + 1));
        out.emplace_back(s, label);
    }
    return out;
}

std::vector<LabeledScore> load_scores_csv(const std::string& path) {
    return parse_scores_csv(read_file(path));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace thors
