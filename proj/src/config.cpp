#include "thors/experiment.hpp"

#include "thors/csv.hpp"
#include "thors/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace thors {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw Error(ErrorCode::InvalidArgument, "bad value for '" + key + "': '" + value + "'");
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v);
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    bad_value(key, v);
}

std::vector<std::string> split_list(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

} // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap map;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidArgument,
                        "config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw Error(ErrorCode::InvalidArgument,
                        "config line " + std::to_string(lineno) + ": empty key");
        map[key] = trim(line.substr(eq + 1));
    }
    return map;
}

ConfigMap read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& map) {
    ExperimentConfig cfg;
    bool costs_given[2] = {false, false};

    if (auto it = map.find("synthetic"); it != map.end() && !it->second.empty()) {
        if (it->second == "custom")
            cfg.synthetic = SyntheticSpec{};
        else
            cfg.synthetic = synthetic_preset(it->second);
    }

    for (const auto& [key, value] : map) {
        if (key == "synthetic") continue;
        if (key.rfind("synthetic.", 0) == 0) {
            if (!cfg.synthetic)
                throw Error(ErrorCode::InvalidArgument, "'" + key + "' needs 'synthetic' set");
            auto& s = *cfg.synthetic;
            const std::string sub = key.substr(10);
            if (sub == "rows")
                s.rows = to_u64(key, value);
            else if (sub == "imbalance")
                s.imbalance = to_double(key, value);
            else if (sub == "dim")
                s.dim = to_u64(key, value);
            else if (sub == "informative")
                s.informative = to_u64(key, value);
            else if (sub == "separation")
                s.separation = to_double(key, value);
            else if (sub == "missing_rate")
                s.missing_rate = to_double(key, value);
            else
                throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
        } else if (key == "data") {
            cfg.data_path = value;
        } else if (key == "label_col") {
            cfg.label_col = value;
        } else if (key == "positive_value") {
            cfg.positive_value = value;
        } else if (key == "fn_cost") {
            cfg.fn_cost = to_double(key, value);
            costs_given[0] = true;
        } else if (key == "fp_cost") {
            cfg.fp_cost = to_double(key, value);
            costs_given[1] = true;
        } else if (key == "scorers") {
            cfg.scorers.clear();
            for (const auto& s : split_list(value, ',')) cfg.scorers.push_back(parse_scorer_kind(s));
        } else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& m : split_list(value, ',')) cfg.methods.push_back(parse_method(m));
        } else if (key == "rounds") {
            cfg.rounds = to_u64(key, value);
        } else if (key == "split") {
            auto parts = split_list(value, ':');
            if (parts.size() != 3) bad_value(key, value);
            for (int i = 0; i < 3; ++i) cfg.split[i] = to_double(key, parts[i]);
        } else if (key == "select_k") {
            cfg.select_k = to_u64(key, value);
        } else if (key == "seed") {
            cfg.seed = to_u64(key, value);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "threads") {
            cfg.threads = to_u64(key, value);
        } else if (key == "metacost_m") {
            cfg.metacost_replicates = to_u64(key, value);
        } else if (key == "grid_steps") {
            cfg.grid_steps = to_u64(key, value);
        } else if (key == "record_timing") {
            cfg.record_timing = to_bool(key, value);
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
        }
    }
    if (cfg.synthetic) {
        if (!costs_given[0]) cfg.fn_cost = cfg.synthetic->fn_cost;
        if (!costs_given[1]) cfg.fp_cost = cfg.synthetic->fp_cost;
    }
    cfg.validate();
    return cfg;
}

ConfigMap ExperimentConfig::to_map() const {
    ConfigMap m;
    if (!data_path.empty()) m["data"] = data_path;
    if (synthetic) {
        m["synthetic"] = synthetic->name;
        m["synthetic.rows"] = std::to_string(synthetic->rows);
        m["synthetic.imbalance"] = format_number(synthetic->imbalance);
        m["synthetic.dim"] = std::to_string(synthetic->dim);
        m["synthetic.informative"] = std::to_string(synthetic->informative);
        m["synthetic.separation"] = format_number(synthetic->separation);
        m["synthetic.missing_rate"] = format_number(synthetic->missing_rate);
    }
    m["label_col"] = label_col;
    m["positive_value"] = positive_value;
    m["fn_cost"] = format_number(fn_cost);
    m["fp_cost"] = format_number(fp_cost);
    std::vector<std::string> names;
    for (auto s : scorers) names.emplace_back(to_string(s));
    m["scorers"] = join(names, ",");
    names.clear();
    for (auto x : methods) names.emplace_back(to_string(x));
    m["methods"] = join(names, ",");
    m["rounds"] = std::to_string(rounds);
    m["split"] = format_number(split[0]) + ":" + format_number(split[1]) + ":" +
                 format_number(split[2]);
    m["select_k"] = std::to_string(select_k);
    m["seed"] = std::to_string(seed);
    m["output_dir"] = output_dir;
    m["threads"] = std::to_string(threads);
    m["metacost_m"] = std::to_string(metacost_replicates);
    m["grid_steps"] = std::to_string(grid_steps);
    m["record_timing"] = record_timing ? "true" : "false";
    return m;
}

void ExperimentConfig::validate() const {
    if (data_path.empty() == !synthetic.has_value())
        throw Error(ErrorCode::InvalidArgument, "exactly one of 'data' and 'synthetic' is required");
    CostMatrix check(fn_cost, fp_cost);
    (void)check;
    if (scorers.empty()) throw Error(ErrorCode::InvalidArgument, "no scorers configured");
    if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods configured");
    if (rounds < 1) throw Error(ErrorCode::InvalidArgument, "rounds must be >= 1");
    for (double r : split)
        if (!(r > 0.0) || !std::isfinite(r))
            throw Error(ErrorCode::InvalidArgument, "split ratios must be positive");
    if (metacost_replicates < 1)
        throw Error(ErrorCode::InvalidArgument, "metacost_m must be >= 1");
    if (grid_steps < 1) throw Error(ErrorCode::InvalidArgument, "grid_steps must be >= 1");
}

} // namespace thors
