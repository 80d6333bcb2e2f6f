#include "thors/experiment.hpp"

#include "thors/bounds.hpp"
#include "thors/csv.hpp"
#include "thors/error.hpp"
#include "thors/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace thors {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kSplitAttempts = 100;
constexpr std::uint64_t kDataStream = 0xDA7A5EEDULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<LabeledScore> labeled(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<LabeledScore> out;
    out.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out.emplace_back(scores[i], labels[i]);
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "error writing " + path.string());
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / double(v.size() - 1));
}

} // namespace

DataSplit split_dataset(const Dataset& ds, const std::array<double, 3>& ratios, std::uint64_t seed) {
    double total = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0) || !std::isfinite(r))
            throw Error(ErrorCode::InvalidArgument, "split ratios must be positive");
        total += r;
    }
    const std::size_t n = ds.rows();
    const auto cut1 = static_cast<std::size_t>(std::floor(double(n) * ratios[0] / total + 1e-9));
    const auto cut2 = static_cast<std::size_t>(
        std::floor(double(n) * (ratios[0] + ratios[1]) / total + 1e-9));

    std::vector<std::size_t> perm(n);
    for (std::size_t attempt = 0; attempt < kSplitAttempts; ++attempt) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(derive_seed(seed, attempt));
        for (std::size_t i = n; i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(perm[i - 1], perm[pick(rng)]);
        }
        DataSplit out{ds.subset({perm.begin(), perm.begin() + cut1}),
                      ds.subset({perm.begin() + cut1, perm.begin() + cut2}),
                      ds.subset({perm.begin() + cut2, perm.end()})};
        bool ok = true;
        for (const Dataset* part : {&out.train, &out.valid, &out.test})
            ok = ok && part->count(0) > 0 && part->count(1) > 0;
        if (ok) return out;
    }
    throw Error(ErrorCode::SplitFailed, "could not split so that every part holds both classes");
}

Preprocessor Preprocessor::fit(const Dataset& train, std::size_t select_k) {
    Preprocessor p;
    const std::size_t d = train.cols();
    p.impute_means.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < train.rows(); ++i) {
            const double v = train.features(Eigen::Index(i), Eigen::Index(j));
            if (!std::isnan(v)) {
                sum += v;
                ++count;
            }
        }
        p.impute_means[j] = count ? sum / double(count) : 0.0;
    }
    Preprocessor impute_only{p.impute_means, {}};
    for (std::size_t j = 0; j < d; ++j) impute_only.selected.push_back(j);
    const std::size_t k = select_k == 0 ? d : std::min(select_k, d);
    p.selected = anova_f_select(impute_only.apply(train), k);
    return p;
}

Dataset Preprocessor::apply(const Dataset& ds) const {
    if (ds.cols() != impute_means.size())
        throw Error(ErrorCode::InvalidArgument, "column count differs from the fitted data");
    Dataset filled = ds;
    for (Eigen::Index i = 0; i < filled.features.rows(); ++i)
        for (Eigen::Index j = 0; j < filled.features.cols(); ++j)
            if (std::isnan(filled.features(i, j))) filled.features(i, j) = impute_means[std::size_t(j)];
    return filled.select_columns(selected);
}

ExperimentData load_experiment_data(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentData out;
    if (cfg.synthetic) {
        out.synthetic = generate_synthetic(*cfg.synthetic, derive_seed(cfg.seed, kDataStream));
        out.data = out.synthetic->data;
    } else {
        out.data = load_csv(cfg.data_path, cfg.label_col, cfg.positive_value);
    }
    return out;
}

namespace {

MethodOutcome run_threshold_method(Method m, const Scorer& scorer, const ValidationScores& vs,
                                   const std::vector<LabeledScore>& test, const CostMatrix& cm,
                                   std::size_t grid_steps, const ThresholdSelection& sel) {
    MethodOutcome out;
    out.method = m;
    switch (m) {
    case Method::Thors: out.threshold = sel.c_star; break;
    case Method::Null: out.threshold = null_threshold(scorer.type).threshold; break;
    case Method::Theoretical: out.threshold = theoretical_threshold(cm, scorer.type); break;
    case Method::Empirical: out.threshold = empirical_threshold(vs, cm, grid_steps); break;
    default: throw Error(ErrorCode::InvalidArgument, "not a threshold method");
    }
    out.test_cost = test_cost(test, out.threshold, cm);
    return out;
}

} // namespace

RoundResult run_round(const ExperimentConfig& cfg, const ExperimentData& data, std::size_t round,
                      std::uint64_t round_seed) {
    const CostMatrix cm = cfg.costs();
    RoundResult rr;
    rr.round = round;
    rr.seed = round_seed;

    const DataSplit parts = split_dataset(data.data, cfg.split, derive_seed(round_seed, 0));
    rr.n_train = parts.train.rows();
    rr.n_valid = parts.valid.rows();
    rr.n_test = parts.test.rows();
    if (data.synthetic) rr.bayes_cost = bayes_test_cost(*data.synthetic, parts.test, cm);

    const Preprocessor prep = Preprocessor::fit(parts.train, cfg.select_k);
    const Dataset train = prep.apply(parts.train);
    const Dataset valid = prep.apply(parts.valid);
    const Dataset test = prep.apply(parts.test);

    for (std::size_t si = 0; si < cfg.scorers.size(); ++si) {
        const ScorerKind kind = cfg.scorers[si];
        ScorerOutcome so;
        so.scorer = kind;
        const std::uint64_t scorer_seed = derive_seed(round_seed, 1 + si);

        std::optional<Scorer> scorer;
        std::optional<ValidationScores> vs;
        std::vector<LabeledScore> test_scores;
        double valid_scoring_seconds = 0.0;
        try {
            auto t0 = Clock::now();
            scorer = train_scorer(kind, train, cm);
            so.train_seconds = seconds_since(t0);
            t0 = Clock::now();
            auto valid_scores = labeled(score(*scorer, valid.features), valid.labels);
            vs = ValidationScores::build(valid_scores);
            valid_scoring_seconds = seconds_since(t0);
            test_scores = labeled(score(*scorer, test.features), test.labels);
            so.n0 = vs->n0();
            so.n1 = vs->n1();
            so.selection = select_threshold(*vs, cm);
        } catch (const std::exception& e) {
            so.error = e.what();
        }

        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            const Method m = cfg.methods[mi];
            MethodOutcome out;
            out.method = m;
            out.threshold = kNaN;
            out.test_cost = kNaN;
            if (!so.error.empty()) {
                out.error = "scorer failed: " + so.error;
                so.methods.push_back(out);
                continue;
            }
            const auto t0 = Clock::now();
            try {
                if (is_threshold_method(m)) {
                    ThresholdSelection sel = so.selection;
                    if (m == Method::Thors) sel = select_threshold(*vs, cm);
                    out = run_threshold_method(m, *scorer, *vs, test_scores, cm, cfg.grid_steps, sel);
                    out.seconds = seconds_since(t0) + valid_scoring_seconds;
                } else {
                    Scorer retrained;
                    const std::uint64_t seed = derive_seed(scorer_seed, mi);
                    if (m == Method::Metacost) {
                        Trainer trainer = [&](const Dataset& d) { return train_scorer(kind, d, cm); };
                        retrained = metacost(train, cm, trainer, seed,
                                             {cfg.metacost_replicates, 1})
                                        .scorer;
                    } else {
                        retrained = train_scorer(kind, crs_resample(train, cm, seed), cm);
                    }
                    const double t = null_threshold(retrained.type).threshold;
                    out.test_cost =
                        test_cost(labeled(score(retrained, test.features), test.labels), t, cm);
                    out.seconds = seconds_since(t0);
                }
            } catch (const std::exception& e) {
                out.error = e.what();
                out.test_cost = kNaN;
                out.threshold = kNaN;
                out.seconds = seconds_since(t0);
            }
            out.method = m;
            so.methods.push_back(out);
        }
        rr.scorers.push_back(std::move(so));
    }
    return rr;
}

const SummaryRow* SummaryTable::find(ScorerKind s, Method m) const {
    for (const auto& r : rows)
        if (r.scorer == s && r.method == m) return &r;
    return nullptr;
}

SummaryTable summarize(const ExperimentConfig& cfg, const std::vector<RoundResult>& rounds) {
    SummaryTable table;
    auto find_outcome = [](const RoundResult& rr, std::size_t si, Method m) -> const MethodOutcome* {
        if (si >= rr.scorers.size()) return nullptr;
        for (const auto& mo : rr.scorers[si].methods)
            if (mo.method == m) return &mo;
        return nullptr;
    };
    const bool has_thors =
        std::find(cfg.methods.begin(), cfg.methods.end(), Method::Thors) != cfg.methods.end();

    for (std::size_t si = 0; si < cfg.scorers.size(); ++si) {
        for (Method m : cfg.methods) {
            SummaryRow row;
            row.scorer = cfg.scorers[si];
            row.method = m;
            std::vector<double> costs;
            std::vector<double> secs;
            for (const auto& rr : rounds) {
                const MethodOutcome* mo = find_outcome(rr, si, m);
                if (mo && mo->ok()) {
                    costs.push_back(mo->test_cost);
                    secs.push_back(mo->seconds);
                }
                if (m == Method::Thors || !has_thors) continue;
                const MethodOutcome* th = find_outcome(rr, si, Method::Thors);
                if (!mo || !th || !mo->ok() || !th->ok()) {
                    ++row.errors;
                    continue;
                }
                const double tol = 1e-9 * std::max({1.0, std::abs(th->test_cost), std::abs(mo->test_cost)});
                if (th->test_cost < mo->test_cost - tol)
                    ++row.wins;
                else if (th->test_cost > mo->test_cost + tol)
                    ++row.losses;
                else
                    ++row.ties;
            }
            row.rounds_ok = costs.size();
            row.mean_cost = mean_of(costs);
            row.std_cost = sample_sd(costs);
            row.mean_seconds = mean_of(secs);
            table.rows.push_back(row);
        }
    }
    std::vector<double> bayes;
    for (const auto& rr : rounds)
        if (rr.bayes_cost) bayes.push_back(*rr.bayes_cost);
    if (!bayes.empty()) {
        table.bayes_mean_cost = mean_of(bayes);
        table.bayes_std_cost = sample_sd(bayes);
    }
    return table;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, load_experiment_data(cfg));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentData& data) {
    cfg.validate();
    ExperimentResult result;
    result.rounds.resize(cfg.rounds);
    parallel_for(cfg.rounds, cfg.threads, [&](std::size_t r) {
        result.rounds[r] = run_round(cfg, data, r, derive_seed(cfg.seed, r));
    });
    result.summary = summarize(cfg, result.rounds);
    return result;
}

std::string rounds_csv(const ExperimentConfig& cfg, const ExperimentResult& result) {
    (void)cfg;
    std::ostringstream out;
    out << "round,seed,n_train,n_valid,n_test,scorer,method,test_cost,threshold,error\n";
    for (const auto& rr : result.rounds) {
        const std::string prefix = std::to_string(rr.round) + "," + std::to_string(rr.seed) + "," +
                                   std::to_string(rr.n_train) + "," + std::to_string(rr.n_valid) +
                                   "," + std::to_string(rr.n_test) + ",";
        for (const auto& so : rr.scorers) {
            for (const auto& mo : so.methods) {
                out << prefix << to_string(so.scorer) << "," << to_string(mo.method) << ","
                    << format_number(mo.test_cost) << "," << format_number(mo.threshold) << ","
                    << csv_field(mo.error) << "\n";
            }
        }
        if (rr.bayes_cost)
            out << prefix << "oracle,bayes," << format_number(*rr.bayes_cost) << ",nan,\n";
    }
    return out.str();
}

std::string summary_csv(const SummaryTable& table) {
    std::ostringstream out;
    out << "scorer,method,rounds_ok,mean_cost,std_cost,wins,losses,ties,errors\n";
    for (const auto& r : table.rows) {
        out << to_string(r.scorer) << "," << to_string(r.method) << "," << r.rounds_ok << ","
            << format_number(r.mean_cost) << "," << format_number(r.std_cost) << ",";
        if (r.method == Method::Thors)
            out << ",,,\n";
        else
            out << r.wins << "," << r.losses << "," << r.ties << "," << r.errors << "\n";
    }
    if (table.bayes_mean_cost)
        out << "oracle,bayes,," << format_number(*table.bayes_mean_cost) << ","
            << format_number(*table.bayes_std_cost) << ",,,,\n";
    return out.str();
}

std::string timing_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "scorer,method,mean_seconds\n";
    for (const auto& r : result.summary.rows)
        out << to_string(r.scorer) << "," << to_string(r.method) << ","
            << format_number(r.mean_seconds) << "\n";
    return out.str();
}

void write_reports(const ExperimentConfig& cfg, const ExperimentResult& result) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

    write_text(dir / "rounds.csv", rounds_csv(cfg, result));
    write_text(dir / "summary.csv", summary_csv(result.summary));
    std::vector<std::string> files{"rounds.csv", "summary.csv"};
    if (cfg.record_timing) {
        write_text(dir / "timing.csv", timing_csv(result));
        files.push_back("timing.csv");
    }

    nlohmann::ordered_json manifest;
    manifest["tool"] = "thors";
    manifest["version"] = THORS_VERSION;
    manifest["compiler"] = __VERSION__;
    manifest["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
    manifest["config"] = cfg.to_map();
    manifest["data_source"] = cfg.synthetic ? "synthetic:" + cfg.synthetic->name : cfg.data_path;
    std::vector<std::uint64_t> seeds;
    for (const auto& rr : result.rounds) seeds.push_back(rr.seed);
    manifest["round_seeds"] = seeds;
    files.push_back("manifest.json");
    manifest["files"] = files;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

double BoundCurve::log_linear_r2() const {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : points) {
        if (!p.n_v) continue;
        xs.push_back(p.target_ratio);
        ys.push_back(std::log(double(*p.n_v)));
    }
    if (xs.size() < 3) return kNaN;
    const double mx = mean_of(xs);
    const double my = mean_of(ys);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (syy == 0.0) return 1.0;
    return sxy * sxy / (sxx * syy);
}

bool BoundCurve::monotone_decreasing() const {
    std::vector<std::pair<double, std::size_t>> pts;
    for (const auto& p : points)
        if (p.n_v) pts.emplace_back(p.target_ratio, *p.n_v);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].second > pts[i - 1].second) return false;
    return true;
}

BoundCurve bound_curve(const ExperimentConfig& cfg, double target_confidence,
                       const std::vector<double>& ratio_grid) {
    return bound_curve(cfg, load_experiment_data(cfg), target_confidence, ratio_grid);
}

BoundCurve bound_curve(const ExperimentConfig& cfg, const ExperimentData& data,
                       double target_confidence, const std::vector<double>& ratio_grid) {
    ExperimentConfig ref = cfg;
    ref.scorers = {cfg.scorers.front()};
    ref.methods = {Method::Thors};
    const RoundResult rr = run_round(ref, data, 0, derive_seed(cfg.seed, 0));
    const ScorerOutcome& so = rr.scorers.front();
    if (!so.error.empty()) throw Error(ErrorCode::InvalidArgument, "reference round failed: " + so.error);

    BoundCurve curve;
    curve.scorer = so.scorer;
    curve.q0 = double(so.n0 - so.selection.k0) / double(so.n0 + 1);
    curve.q1 = double(so.selection.k1) / double(so.n1 + 1);
    curve.pi0 = double(so.n0) / double(so.n0 + so.n1);
    curve.pi1 = double(so.n1) / double(so.n0 + so.n1);
    curve.n_te = rr.n_test;
    curve.current_n_v = rr.n_valid;
    curve.target_confidence = target_confidence;

    SizeQuery q;
    q.q0 = curve.q0;
    q.q1 = curve.q1;
    q.pi0 = curve.pi0;
    q.pi1 = curve.pi1;
    q.cm = cfg.costs();
    q.n_te = curve.n_te;
    q.target_confidence = target_confidence;
    for (double ratio : ratio_grid) {
        BoundCurvePoint p;
        p.target_ratio = ratio;
        q.target_ratio = ratio;
        try {
            p.n_v = estimate_validation_size(q);
            p.status = "ok";
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Unachievable) throw;
            p.status = std::string("unachievable: ") + e.what();
        }
        curve.points.push_back(p);
    }
    return curve;
}

} // namespace thors
