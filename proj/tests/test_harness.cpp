#include "thors/csv.hpp"
#include "thors/error.hpp"
#include "thors/experiment.hpp"
#include "thors/random.hpp"
#include "thors/synthetic.hpp"
#include "thors/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace thors;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("thors_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    SyntheticSpec s;
    s.rows = 1500;
    s.imbalance = 3.0;
    s.dim = 6;
    s.informative = 3;
    s.separation = 2.0;
    cfg.synthetic = s;
    cfg.fn_cost = 10.0;
    cfg.fp_cost = 1.0;
    cfg.rounds = 4;
    cfg.seed = 123;
    cfg.metacost_replicates = 5;
    cfg.select_k = 4;
    cfg.scorers = {ScorerKind::Logistic, ScorerKind::LDA};
    return cfg;
}

} // namespace

TEST_CASE("csv: exact matrix and label mapping") {
    auto ds = parse_csv("a,class,b\n1,yes,2.5\n-3,no,4e1\n0.5,yes,-1\n", "class", "yes");
    REQUIRE(ds.rows() == 3);
    REQUIRE(ds.cols() == 2);
    CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(ds.labels == std::vector<int>{1, 0, 1});
    Eigen::MatrixXd want(3, 2);
    want << 1, 2.5, -3, 40, 0.5, -1;
    CHECK(ds.features == want);
}

TEST_CASE("csv: missing cells and quoting") {
    auto ds = parse_csv("x,y,label\nna,1,1\n2,,0\n\"3\",?,1\n4,NA,0\n", "label", "1");
    CHECK(std::isnan(ds.features(0, 0)));
    CHECK(std::isnan(ds.features(1, 1)));
    CHECK(std::isnan(ds.features(2, 1)));
    CHECK(std::isnan(ds.features(3, 1)));
    CHECK(ds.features(2, 0) == 3.0);
    CHECK(ds.has_missing());
    try {
        parse_csv("x,label\nna,1\n2,0\n", "label", "1", NaPolicy::Reject);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnparseableCell);
    }
    auto f = split_csv_line("a,\"b,c\",\"say \"\"hi\"\"\"");
    REQUIRE(f.size() == 3);
    CHECK(f[1] == "b,c");
    CHECK(f[2] == "say \"hi\"");
}

TEST_CASE("csv: errors") {
    try {
        parse_csv("x,y\n1,2\n", "label", "1");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingColumn);
    }
    try {
        parse_csv("x,label\n1,1\nabc,0\n", "label", "1");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnparseableCell);
        CHECK(std::string(e.what()).find("row 3, column 1") != std::string::npos);
    }
    try {
        parse_csv("x,label\n1,1\n2,1\n", "label", "1");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingleClassData);
    }
    try {
        load_csv("/nonexistent/file.csv", "label", "1");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
    CHECK_THROWS_AS(parse_csv("x,label\n1,1,3\n", "label", "1"), Error);
}

TEST_CASE("score csv") {
    auto s = parse_scores_csv("label,score\n1,0.9\n0,0.2\n");
    REQUIRE(s.size() == 2);
    CHECK(s[0].score == 0.9);
    CHECK(s[0].label == 1);
    CHECK_THROWS_AS(parse_scores_csv("score\n0.1\n"), Error);
    CHECK_THROWS_AS(parse_scores_csv("score,label\n0.1,2\n"), Error);
    try {
        parse_scores_csv("score,label\nnan,1\n");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteScore);
    }
}

TEST_CASE("format_number round trips") {
    for (double v : {0.1, 1.0 / 3.0, 12169.0, -2.5e-300, 1e22}) CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(NAN) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("split: sizes, determinism, degenerate input") {
    SyntheticSpec s = synthetic_preset("telescope");
    auto sd = generate_synthetic(s, 1);
    CHECK(sd.data.rows() == 19020);
    CHECK(sd.data.count(1) == 6688);
    auto parts = split_dataset(sd.data, {2, 2, 1}, 5);
    CHECK(parts.train.rows() == 7608);
    CHECK(parts.valid.rows() == 7608);
    CHECK(parts.test.rows() == 3804);
    auto again = split_dataset(sd.data, {2, 2, 1}, 5);
    CHECK(again.test.features == parts.test.features);
    auto other = split_dataset(sd.data, {2, 2, 1}, 6);
    CHECK(other.test.features != parts.test.features);

    Dataset tiny;
    tiny.features = Eigen::MatrixXd::Zero(3, 1);
    tiny.labels = {0, 1, 0};
    try {
        split_dataset(tiny, {2, 2, 1}, 1);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SplitFailed);
    }
    CHECK_THROWS_AS(split_dataset(sd.data, {2, 0, 1}, 1), Error);
}

TEST_CASE("synthetic presets") {
    auto t = synthetic_preset("trucks");
    CHECK(t.rows == 60000);
    CHECK(t.fn_cost == 500.0);
    CHECK(t.fp_cost == 1.0);
    auto sd = generate_synthetic(t, 3);
    CHECK(sd.data.count(1) == 1000);
    auto inc = generate_synthetic(synthetic_preset("income"), 3);
    CHECK(inc.data.count(1) == 7841);
    CHECK_THROWS_AS(synthetic_preset("iris"), Error);
    auto again = generate_synthetic(t, 3);
    CHECK(again.data.features == sd.data.features);

    // Bayes rule cost: no other cut on the Bayes score does better in expectation;
    // on a big sample it beats nearby cuts.
    SyntheticSpec s;
    s.rows = 200000;
    s.imbalance = 4.0;
    s.separation = 1.5;
    auto big = generate_synthetic(s, 9);
    CostMatrix cm(5.0, 1.0);
    const double tb = bayes_threshold(big, cm);
    auto cost_at = [&](double t) {
        double c = 0;
        for (std::size_t i = 0; i < big.data.rows(); ++i) {
            const int pred = bayes_score(big, big.data.features.row(Eigen::Index(i))) > t;
            c += cm.cost(big.data.labels[i], pred);
        }
        return c;
    };
    CHECK(bayes_test_cost(big, big.data, cm) == cost_at(tb));
    CHECK(cost_at(tb) < cost_at(tb + 0.5));
    CHECK(cost_at(tb) < cost_at(tb - 0.5));
}

TEST_CASE("preprocessor is fitted on training rows only") {
    SyntheticSpec s;
    s.rows = 2000;
    s.dim = 8;
    s.informative = 2;
    s.missing_rate = 0.1;
    auto sd = generate_synthetic(s, 4);
    auto parts = split_dataset(sd.data, {2, 2, 1}, 2);
    auto p = Preprocessor::fit(parts.train, 3);
    CHECK(p.selected.size() == 3);
    std::set<std::size_t> sel(p.selected.begin(), p.selected.end());
    CHECK(sel.count(0) == 1);
    CHECK(sel.count(1) == 1);

    // Means equal NaN-skipping training means.
    for (std::size_t j = 0; j < 8; ++j) {
        double sum = 0;
        int n = 0;
        for (Eigen::Index i = 0; i < parts.train.features.rows(); ++i) {
            const double v = parts.train.features(i, Eigen::Index(j));
            if (!std::isnan(v)) {
                sum += v;
                ++n;
            }
        }
        CHECK(p.impute_means[j] == doctest::Approx(sum / n));
    }
    // Scrambling validation / test rows does not move any fitted statistic.
    Dataset poisoned = parts.valid;
    poisoned.features.setConstant(1e6);
    auto p2 = Preprocessor::fit(parts.train, 3);
    CHECK(p2.impute_means == p.impute_means);
    CHECK(p2.selected == p.selected);
    auto applied = p.apply(parts.test);
    CHECK_FALSE(applied.has_missing());
    CHECK(applied.cols() == 3);
    CHECK(p.apply(poisoned).features.maxCoeff() == 1e6);
}

TEST_CASE("config parsing and overrides") {
    auto map = parse_config_text(
        "# comment\nsynthetic = trucks\nrounds = 3 # inline\nmethods = thors, null\nsplit = 3:1:1\n");
    auto cfg = ExperimentConfig::from_map(map);
    CHECK(cfg.synthetic->rows == 60000);
    CHECK(cfg.fn_cost == 500.0);
    CHECK(cfg.rounds == 3);
    CHECK(cfg.methods == std::vector<Method>{Method::Thors, Method::Null});
    CHECK(cfg.split[0] == 3.0);
    map["fn_cost"] = "50";
    CHECK(ExperimentConfig::from_map(map).fn_cost == 50.0);
    auto back = ExperimentConfig::from_map(ExperimentConfig::from_map(map).to_map());
    CHECK(back.fn_cost == 50.0);
    CHECK(back.synthetic->imbalance == 59.0);

    CHECK_THROWS_AS(parse_config_text("no equals sign\n"), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"synthetic", "trucks"}, {"bogus", "1"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"synthetic", "trucks"}, {"rounds", "0"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"synthetic", "trucks"}, {"split", "1:-1:1"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"rounds", "2"}}), Error);
    CHECK_THROWS_AS(ExperimentConfig::from_map({{"synthetic", "trucks"}, {"data", "x.csv"}}), Error);
    try {
        read_config_file("/nonexistent.cfg");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
}

TEST_CASE("run_round: separable data gives zero THORS cost") {
    // x0 equals the label, x1 is noise; ANOVA keeps x0, so every class
    // scores a single value.
    ExperimentData data;
    const std::size_t n = 1000;
    data.data.features.resize(n, 2);
    data.data.labels.resize(n);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        data.data.labels[i] = int(i % 3 == 0);
        data.data.features(Eigen::Index(i), 0) = data.data.labels[i];
        data.data.features(Eigen::Index(i), 1) = z(rng);
    }
    ExperimentConfig cfg;
    cfg.data_path = "in-memory";
    cfg.select_k = 1;
    cfg.fn_cost = 5.0;
    cfg.methods = {Method::Thors};
    for (auto kind : {ScorerKind::Logistic, ScorerKind::GaussianNB, ScorerKind::LDA}) {
        cfg.scorers = {kind};
        auto rr = run_round(cfg, data, 0, 77);
        REQUIRE(rr.scorers.size() == 1);
        REQUIRE(rr.scorers[0].methods[0].ok());
        CHECK(rr.scorers[0].methods[0].test_cost == 0.0);
    }
}

TEST_CASE("run_round: deterministic and records method errors") {
    auto cfg = small_config();
    auto data = load_experiment_data(cfg);
    auto a = run_round(cfg, data, 0, 555);
    auto b = run_round(cfg, data, 0, 555);
    REQUIRE(a.scorers.size() == 2);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            CHECK(a.scorers[s].methods[m].error == b.scorers[s].methods[m].error);
            if (a.scorers[s].methods[m].ok())
                CHECK(a.scorers[s].methods[m].test_cost == b.scorers[s].methods[m].test_cost);
        }
    CHECK(a.bayes_cost == b.bayes_cost);
    // The theoretical threshold needs probabilities; LDA gives discriminants.
    const auto& lda = a.scorers[1];
    CHECK(lda.scorer == ScorerKind::LDA);
    for (const auto& mo : lda.methods) {
        if (mo.method == Method::Theoretical) {
            CHECK_FALSE(mo.ok());
        } else {
            CHECK(mo.ok());
        }
    }
    CHECK(a.n_train + a.n_valid + a.n_test == 1500);
}

TEST_CASE("run_experiment: summary invariants") {
    auto cfg = small_config();
    auto res = run_experiment(cfg);
    CHECK(res.rounds.size() == 4);
    for (const auto& row : res.summary.rows) {
        if (row.method == Method::Thors) continue;
        CHECK(row.wins + row.losses + row.ties + row.errors == cfg.rounds);
    }
    const auto* th = res.summary.find(ScorerKind::LDA, Method::Theoretical);
    REQUIRE(th != nullptr);
    CHECK(th->errors == cfg.rounds);
    CHECK(th->rounds_ok == 0);
    CHECK(res.summary.bayes_mean_cost.has_value());

    cfg.rounds = 1;
    auto one = run_experiment(cfg);
    for (const auto& row : one.summary.rows)
        if (row.rounds_ok == 1) CHECK(row.std_cost == 0.0);
}

TEST_CASE("run_experiment: thread count does not change reports") {
    auto cfg = small_config();
    cfg.methods = {Method::Thors, Method::Null, Method::Empirical, Method::Metacost, Method::Crs};
    cfg.output_dir = scratch_dir("serial").string();
    cfg.threads = 1;
    write_reports(cfg, run_experiment(cfg));
    auto par = cfg;
    par.output_dir = scratch_dir("parallel").string();
    par.threads = 4;
    write_reports(par, run_experiment(par));
    for (const char* f : {"rounds.csv", "summary.csv"})
        CHECK(slurp(fs::path(cfg.output_dir) / f) == slurp(fs::path(par.output_dir) / f));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "manifest.json"));
    CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "timing.csv"));
    cfg.record_timing = true;
    write_reports(cfg, run_experiment(cfg));
    CHECK(fs::exists(fs::path(cfg.output_dir) / "timing.csv"));
}

TEST_CASE("run_experiment from a CSV file") {
    auto dir = scratch_dir("csvdata");
    auto sd = generate_synthetic(small_config().synthetic.value(), 2);
    std::ofstream out(dir / "data.csv");
    out << "a,b,c,d,e,f,target\n";
    for (std::size_t i = 0; i < sd.data.rows(); ++i) {
        for (Eigen::Index j = 0; j < 6; ++j) {
            if (i % 50 == 3 && j == 2)
                out << "na,";
            else
                out << format_number(sd.data.features(Eigen::Index(i), j)) << ",";
        }
        out << (sd.data.labels[i] ? "pos" : "neg") << "\n";
    }
    out.close();
    ExperimentConfig cfg;
    cfg.data_path = (dir / "data.csv").string();
    cfg.label_col = "target";
    cfg.positive_value = "pos";
    cfg.rounds = 2;
    cfg.methods = {Method::Thors, Method::Null};
    auto res = run_experiment(cfg);
    CHECK_FALSE(res.summary.bayes_mean_cost.has_value());
    CHECK(res.summary.find(ScorerKind::Logistic, Method::Thors)->rounds_ok == 2);
}

TEST_CASE("bound curve") {
    auto cfg = small_config();
    auto curve = bound_curve(cfg, 0.95, {1.0, 1.5, 2.0, 3.0});
    REQUIRE(curve.points.size() == 4);
    CHECK_FALSE(curve.points[0].n_v.has_value());
    CHECK(curve.points[0].status.find("unachievable") == 0);
    for (std::size_t i = 1; i < 4; ++i) CHECK(curve.points[i].n_v.has_value());
    CHECK(curve.monotone_decreasing());
    CHECK(*curve.points[1].n_v > *curve.points[3].n_v);
    CHECK(curve.n_te == 300);
    CHECK(curve.current_n_v == 600);

    BoundCurve line;
    for (int i = 0; i < 4; ++i) line.points.push_back({1.0 + i, std::size_t(std::llround(1000 * std::exp(-i))), "ok"});
    CHECK(line.log_linear_r2() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("verify bounds: small run") {
    VerifyConfig vc;
    vc.simulations = 300;
    vc.seed = 5;
    auto rep = verify_bounds(vc);
    CHECK(rep.fpr_rows.size() == 20);
    CHECK(rep.bernstein_rows.size() == 3);
    CHECK(rep.all_passed());

    vc.threads = 3;
    auto rep2 = verify_bounds(vc);
    CHECK(rep2.interval_coverage == rep.interval_coverage);
    CHECK(rep2.spread_rows[1].sd == rep.spread_rows[1].sd);

    // n_v = 50: the two-sided floor is vacuous but coverage is still reported.
    VerifyConfig small;
    small.simulations = 200;
    small.n0 = 25;
    small.n1 = 25;
    small.epsilon = 0.05;
    auto rs = verify_bounds(small);
    CHECK(rs.vacuous_count == small.simulations);
    CHECK(rs.interval_floor == 0.0);
    CHECK(rs.interval_coverage >= 0.0);

    VerifyConfig bad;
    bad.simulations = 1;
    CHECK_THROWS_AS(verify_bounds(bad), Error);
}
