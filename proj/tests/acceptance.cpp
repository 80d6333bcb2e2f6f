// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "oracles.hpp"

#include "cli.hpp"
#include "thors/bounds.hpp"
#include "thors/classifiers.hpp"
#include "thors/experiment.hpp"
#include "thors/threshold.hpp"
#include "thors/validation.hpp"
#include "thors/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace thors;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

void criterion_1() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> size(10, 500);
    std::uniform_real_distribution<double> beta(1e-6, 1.0 - 1e-6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> levels(3, 60);
    int mismatches = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = size(rng);
        const double b = beta(rng);
        const int lv = levels(rng); // coarse rounding injects ties
        const double p1 = 0.05 + 0.9 * u(rng);
        std::vector<LabeledScore> inst;
        for (std::size_t i = 0; i < n; ++i) {
            const int y = i == 0 ? 0 : i == 1 ? 1 : int(u(rng) < p1);
            const double raw = u(rng) + 0.4 * y;
            inst.emplace_back(std::round(raw * lv) / lv, y);
        }
        CostMatrix cm(1.0, b);
        auto vs = ValidationScores::build(inst);
        auto sel = select_threshold(vs, cm);
        const double got = oracle::direct_cost(inst, sel.c_star, cm);
        const double want = oracle::brute_force_min(inst, cm).cost;
        if (got != want) ++mismatches;
    }
    const double secs = since(t0);
    report(1, mismatches == 0 && secs < 5.0, "selection matches brute force on 1000 tied instances",
           std::to_string(mismatches) + " mismatches, " + fmt("%.2f s", secs));
}

double time_selection(std::size_t n, int reps) {
    std::mt19937_64 rng(n);
    std::normal_distribution<double> z(0.0, 1.0);
    std::bernoulli_distribution coin(0.3);
    std::vector<LabeledScore> scores;
    scores.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = coin(rng);
        scores.emplace_back(z(rng) + 1.5 * y, y);
    }
    CostMatrix cm(5.0, 1.0);
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        auto vs = ValidationScores::build(scores);
        auto sel = select_threshold(vs, cm);
        const double s = since(t0);
        if (sel.k_star == 0) std::printf("unexpected\n");
        best = std::min(best, s);
    }
    return best;
}

void criterion_2() {
    time_selection(100000, 1); // warm up
    const double t5 = time_selection(100000, 7);
    const double t6 = time_selection(1000000, 7);
    const double ratio = t6 / t5;
    report(2, t6 < 1.0 && ratio <= 14.0, "selection on 1e6 scores under 1 s, time ratio 1e6/1e5 <= 14",
           fmt("t(1e6) = %.3f s", t6) + fmt(", t(1e5) = %.4f s", t5) + fmt(", ratio %.2f", ratio));
}

VerifyReport verify_report() {
    VerifyConfig vc;
    vc.simulations = 2000;
    vc.n0 = 200;
    vc.n1 = 200;
    vc.seed = 2024;
    vc.threads = 0;
    return verify_bounds(vc);
}

void criterion_3(const VerifyReport& rep) {
    bool fpr_ok = rep.fpr_rows.size() == 20;
    double worst = 0.0;
    for (const auto& r : rep.fpr_rows) {
        fpr_ok = fpr_ok && r.inside;
        worst = std::max({worst, r.lower - r.empirical, r.empirical - r.upper});
    }
    std::size_t fnr_inside = 0;
    for (const auto& r : rep.fnr_rows) fnr_inside += r.inside;
    report(3, fpr_ok, "empirical FPR CDF inside the binomial bracket at 20 grid points (S=2000, n0=n1=200)",
           "k0=" + std::to_string(rep.k0_fixed) + fmt(", worst excursion %.4f", worst) +
               ", FNR side " + std::to_string(fnr_inside) + "/" + std::to_string(rep.fnr_rows.size()) +
               " inside");
}

void criterion_4() {
    std::mt19937_64 rng(4242);
    const std::size_t draws = 100000;
    bool ok = true;
    std::ostringstream detail;
    double worst_z = 0.0;
    struct Case {
        std::size_t n0, k0, n1, k1;
    };
    for (const Case c : {Case{9, 4, 9, 4}, Case{20, 15, 30, 3}, Case{200, 120, 50, 7}}) {
        const auto m = order_stat_moments(c.n0, c.k0, c.n1, c.k1);
        std::vector<double> y1(draws), y0(draws);
        for (std::size_t i = 0; i < draws; ++i) {
            y1[i] = oracle::uniform_order_stat(rng, c.n1, c.k1 + 1);
            y0[i] = 1.0 - oracle::uniform_order_stat(rng, c.n0, c.k0);
        }
        auto check = [&](const std::vector<double>& y, double mean, double var) {
            const auto mv = oracle::mean_var(y);
            double m4 = 0.0;
            for (double v : y) m4 += std::pow(v - mv.mean, 4);
            m4 /= double(y.size());
            const double se_mean = std::sqrt(mv.var / double(y.size()));
            const double se_var = std::sqrt((m4 - mv.var * mv.var) / double(y.size()));
            const double z_mean = std::abs(mv.mean - mean) / se_mean;
            const double z_var = std::abs(mv.var - var) / se_var;
            worst_z = std::max({worst_z, z_mean, z_var});
            ok = ok && z_mean <= 3.0 && z_var <= 3.0;
        };
        check(y1, m.mean_y1, m.var_y1);
        check(y0, m.mean_y0, m.var_y0);
    }
    report(4, ok, "order-statistic means and variances match Monte-Carlo within 3 SE at 1e5 draws",
           fmt("largest deviation %.2f SE over 3 configurations", worst_z));
}

void criterion_5(const VerifyReport& rep) {
    std::ostringstream d;
    for (const auto& r : rep.bernstein_rows)
        d << "t=" << r.t << ": " << fmt("%.3f", r.empirical) << " vs floor " << fmt("%.3f", r.floor) << "; ";
    d << "interval coverage " << fmt("%.3f", rep.interval_coverage) << " vs floor "
      << fmt("%.3f", rep.interval_floor);
    report(5, rep.bernstein_passed && rep.interval_passed,
           "Bernstein and Hoeffding floors hold in simulation", d.str());
}

void criterion_6() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::ostringstream d;
    for (const char* preset : {"trucks", "income", "telescope"}) {
        ExperimentConfig cfg = ExperimentConfig::from_map({{"synthetic", preset}, {"seed", "11"}});
        auto curve = bound_curve(cfg, 0.95, kDefaultRatioGrid);
        bool all = true;
        for (const auto& p : curve.points) all = all && p.n_v.has_value();
        const double r2 = curve.log_linear_r2();
        const bool mono = curve.monotone_decreasing();
        ok = ok && all && mono && r2 > 0.95;
        d << preset << ": R2=" << fmt("%.3f", r2) << (mono ? " monotone" : " NOT monotone") << " n_v=[";
        for (std::size_t i = 0; i < curve.points.size(); ++i)
            d << (i ? "," : "") << (curve.points[i].n_v ? std::to_string(*curve.points[i].n_v) : "-");
        d << "]; ";
    }
    const double secs = since(t0);
    d << fmt("%.2f s", secs);
    report(6, ok && secs < 10.0, "bound curve over ratios {1.1,1.3,1.5,2,3}: log(n_v) linear fit R2 > 0.95, monotone",
           d.str());
}

void criterion_7() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::ostringstream d;
    for (const char* preset : {"trucks", "income", "telescope"}) {
        ExperimentConfig cfg = ExperimentConfig::from_map(
            {{"synthetic", preset}, {"seed", "2019"}, {"rounds", "20"}, {"scorers", "logit"},
             {"methods", "thors,null,empirical"}, {"threads", "0"}});
        auto res = run_experiment(cfg);
        const auto& s = res.summary;
        const double th = s.find(ScorerKind::Logistic, Method::Thors)->mean_cost;
        const auto* nl = s.find(ScorerKind::Logistic, Method::Null);
        const auto* em = s.find(ScorerKind::Logistic, Method::Empirical);
        const double bayes = *s.bayes_mean_cost;
        const bool a = th < nl->mean_cost;
        const bool b = th <= 1.05 * bayes;
        const bool c = th <= em->mean_cost;
        ok = ok && a && b && c;
        d << preset << ": thors " << fmt("%.1f", th) << " null " << fmt("%.1f", nl->mean_cost) << " ("
          << nl->wins << "/" << nl->losses << ") empirical " << fmt("%.1f", em->mean_cost) << " bayes "
          << fmt("%.1f", bayes) << fmt(" ratio %.3f", th / bayes) << " [a" << (a ? "+" : "-") << " b"
          << (b ? "+" : "-") << " c" << (c ? "+" : "-") << "]; ";
    }
    const double secs = since(t0);
    d << fmt("%.1f s", secs);
    report(7, ok && secs < 120.0,
           "synthetic benchmark: THORS < null, <= 1.05x Bayes, <= empirical on three presets", d.str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_8() {
    const fs::path root = fs::temp_directory_path() / "thors_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream cfg(root / "exp.cfg");
        cfg << "synthetic = telescope\nseed = 99\nrounds = 6\nscorers = logit,nb,lda\n"
               "methods = thors,null,theoretical,empirical,metacost,crs\nmetacost_m = 10\n";
    }
    auto run_once = [&](const std::string& name, const std::string& threads) {
        std::ostringstream out, err;
        const int code = cli::run({"experiment", "--config", (root / "exp.cfg").string(), "--threads", threads,
                                   "--output-dir", (root / name).string()},
                                  out, err);
        return code;
    };
    const int c1 = run_once("a", "4");
    const int c2 = run_once("b", "4");
    const int c3 = run_once("c", "1");
    bool same = c1 == 0 && c2 == 0 && c3 == 0;
    for (const char* f : {"rounds.csv", "summary.csv"}) {
        const std::string a = slurp(root / "a" / f);
        same = same && !a.empty() && a == slurp(root / "b" / f) && a == slurp(root / "c" / f);
    }
    report(8, same, "repeated experiment runs give byte-identical CSVs (4 threads twice, 1 thread)",
           "rounds.csv and summary.csv compared");
}

void criterion_9() {
    std::mt19937_64 rng(909);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_int_distribution<int> nrows(8, 40), ncols(1, 5);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const int n = nrows(rng), d = ncols(rng);
        Eigen::MatrixXd x(n, d);
        std::vector<int> y(std::size_t(n), 0);
        for (int i = 0; i < n; ++i) {
            y[std::size_t(i)] = i < 2 ? i : int(z(rng) > 0);
            for (int j = 0; j < d; ++j) x(i, j) = z(rng) + 0.8 * y[std::size_t(i)];
        }
        const Eigen::VectorXd w = cost_weights(y, CostMatrix(1.0 + 9.0 * std::abs(z(rng)), 1.0));
        Eigen::VectorXd p(d + 1);
        for (int i = 0; i <= d; ++i) p(i) = z(rng);
        Eigen::VectorXd g;
        logistic_loss(x, y, w, p, 1e-3, &g);
        for (int i = 0; i <= d; ++i) {
            const double h = 1e-6;
            Eigen::VectorXd a = p, b = p;
            a(i) += h;
            b(i) -= h;
            const double fd =
                (logistic_loss(x, y, w, a, 1e-3, nullptr) - logistic_loss(x, y, w, b, 1e-3, nullptr)) / (2 * h);
            const double rel = std::abs(fd - g(i)) / std::max({1e-8, std::abs(fd), std::abs(g(i))});
            worst = std::max(worst, rel);
        }
    }
    report(9, worst < 1e-5, "logistic gradient matches central differences on 20 instances",
           fmt("worst relative error %.2e", worst));
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    const VerifyReport rep = verify_report();
    criterion_3(rep);
    criterion_4();
    criterion_5(rep);
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
