#include "cli.hpp"

#include "thors/bounds.hpp"
#include "thors/csv.hpp"
#include "thors/error.hpp"
#include "thors/experiment.hpp"
#include "thors/threshold.hpp"
#include "thors/validation.hpp"
#include "thors/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>

namespace thors::cli {

namespace {

using json = nlohmann::ordered_json;

// JSON cannot hold NaN/inf; those go out as strings.
json num(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

json bernstein_json(const BernsteinBound& bb, const std::vector<double>& ts) {
    json j;
    j["c_star"] = num(bb.c_star_expected);
    j["m"] = num(bb.m_const);
    j["sigma"] = num(bb.sigma);
    json tails = json::array();
    for (double t : ts) {
        tails.push_back({{"t", t},
                         {"cost_at_most", num(bb.c_star_expected + t * bb.sigma)},
                         {"probability_floor", num(bernstein_tail(bb, t))}});
    }
    j["tails"] = tails;
    return j;
}

json interval_json(const CostInterval& ci) {
    json j;
    j["epsilon"] = num(ci.epsilon);
    j["c1"] = num(ci.c1);
    j["c2"] = num(ci.c2);
    j["c_eps"] = num(ci.c_eps);
    j["lower"] = num(ci.c1 - ci.c_eps);
    j["upper"] = num(ci.c2 + ci.c_eps);
    j["prob_two_sided"] = num(ci.prob_two_sided);
    j["prob_upper"] = num(ci.prob_upper);
    j["prob_two_sided_raw"] = num(ci.prob_two_sided_raw);
    j["prob_upper_raw"] = num(ci.prob_upper_raw);
    j["vacuous"] = ci.vacuous;
    return j;
}

// Hoeffding block for a context: a fixed epsilon if given, otherwise the
// smallest epsilon meeting `confidence`. Sets `unachievable` instead of
// throwing when no epsilon <= 1 works.
json hoeffding_json(const BoundContext& ctx, const std::optional<double>& epsilon,
                    double confidence, bool& unachievable) {
    if (epsilon) return interval_json(cost_interval(ctx, *epsilon));
    try {
        json j = interval_json(cost_interval(ctx, solve_epsilon(ctx, confidence)));
        j["target_confidence"] = confidence;
        return j;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Unachievable) throw;
        unachievable = true;
        return json{{"status", "unachievable"}, {"target_confidence", confidence}, {"reason", e.what()}};
    }
}

json context_json(const BoundContext& ctx) {
    return json{{"n0", ctx.n0},   {"n1", ctx.n1},   {"k0", ctx.k0},   {"k1", ctx.k1},
                {"pi0", ctx.pi0}, {"pi1", ctx.pi1}, {"n_te", ctx.n_te},
                {"fn_cost", ctx.cm.fn_cost()}, {"fp_cost", ctx.cm.fp_cost()},
                {"beta", ctx.cm.beta()}};
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

struct CostArgs {
    double fn_cost = 1.0;
    double fp_cost = 1.0;
};

void add_cost_options(CLI::App* sub, CostArgs& c, bool required) {
    auto* a = sub->add_option("--fn-cost", c.fn_cost, "cost of a false negative, C(1,0)");
    auto* b = sub->add_option("--fp-cost", c.fp_cost, "cost of a false positive, C(0,1)");
    if (required) {
        a->required();
        b->required();
    }
}

void warn_beta(const CostMatrix& cm, std::ostream& err) {
    if (cm.beta_warning())
        err << "warning: fp_cost >= fn_cost (beta = " << cm.beta()
            << "); the order-statistic analysis assumes beta < 1\n";
}

int code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::Unachievable: return kExitUnachievable;
    case ErrorCode::Io: return kExitIo;
    default: return kExitValidation;
    }
}

std::string summary_text(const SummaryTable& t) {
    std::ostringstream os;
    os << std::left << std::setw(8) << "scorer" << std::setw(13) << "method" << std::right
       << std::setw(16) << "mean_cost" << std::setw(14) << "std_cost" << std::setw(10) << "w/l/t"
       << "\n";
    for (const auto& r : t.rows) {
        os << std::left << std::setw(8) << to_string(r.scorer) << std::setw(13)
           << to_string(r.method) << std::right << std::setw(16) << std::fixed
           << std::setprecision(2) << r.mean_cost << std::setw(14) << r.std_cost;
        if (r.method == Method::Thors)
            os << std::setw(10) << "-";
        else
            os << std::setw(10)
               << (std::to_string(r.wins) + "/" + std::to_string(r.losses) + "/" +
                   std::to_string(r.ties));
        if (r.errors) os << "  (" << r.errors << " errors)";
        os << "\n";
    }
    if (t.bayes_mean_cost)
        os << std::left << std::setw(8) << "oracle" << std::setw(13) << "bayes" << std::right
           << std::setw(16) << *t.bayes_mean_cost << std::setw(14) << *t.bayes_std_cost << "\n";
    return os.str();
}

std::string bound_curve_csv(const BoundCurve& c) {
    std::ostringstream os;
    os << "target_ratio,n_v,status\n";
    for (const auto& p : c.points)
        os << format_number(p.target_ratio) << "," << (p.n_v ? std::to_string(*p.n_v) : "") << ","
           << p.status << "\n";
    return os.str();
}

json bound_curve_json(const BoundCurve& c) {
    json pts = json::array();
    for (const auto& p : c.points)
        pts.push_back({{"target_ratio", p.target_ratio},
                       {"n_v", p.n_v ? json(*p.n_v) : json(nullptr)},
                       {"status", p.status}});
    return json{{"scorer", std::string(to_string(c.scorer))},
                {"q0", c.q0},
                {"q1", c.q1},
                {"pi0", c.pi0},
                {"pi1", c.pi1},
                {"n_te", c.n_te},
                {"current_n_v", c.current_n_v},
                {"target_confidence", c.target_confidence},
                {"log_linear_r2", num(c.log_linear_r2())},
                {"monotone_decreasing", c.monotone_decreasing()},
                {"points", pts}};
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Order-statistic threshold selection for cost-sensitive classification", "thors"};
    app.require_subcommand(1);

    // threshold
    auto* th = app.add_subcommand("threshold", "select a threshold from a scores CSV and report guarantees");
    std::string th_scores;
    CostArgs th_cost;
    std::size_t th_nte = 1;
    double th_conf = 0.95;
    std::optional<double> th_eps;
    std::vector<double> th_t{1.0, 2.0, 3.0};
    bool th_all_pos = false;
    th->add_option("--scores", th_scores, "CSV with score,label columns")->required();
    add_cost_options(th, th_cost, true);
    th->add_option("--n-te", th_nte, "number of future instances the cost is summed over");
    th->add_option("--confidence", th_conf, "confidence for the solved Hoeffding epsilon");
    th->add_option("--epsilon", th_eps, "fixed Hoeffding epsilon (skips solving)");
    th->add_option("--t", th_t, "Bernstein t values")->delimiter(',');
    th->add_flag("--allow-all-positive", th_all_pos, "also consider predicting every instance positive");

    // experiment
    auto* ex = app.add_subcommand("experiment", "run the benchmark protocol and write CSV reports");
    std::string ex_config;
    ex->add_option("--config", ex_config, "key = value config file");
    struct Override {
        const char* flag;
        const char* key;
        const char* help;
        std::string value;
    };
    std::vector<std::unique_ptr<Override>> overrides;
    for (auto [flag, key, help] : std::initializer_list<std::tuple<const char*, const char*, const char*>>{
             {"--data", "data", "input CSV"},
             {"--synthetic", "synthetic", "synthetic preset: trucks, income, telescope, custom"},
             {"--synthetic-rows", "synthetic.rows", "synthetic row count"},
             {"--synthetic-imbalance", "synthetic.imbalance", "majority:minority ratio"},
             {"--synthetic-dim", "synthetic.dim", "feature count"},
             {"--synthetic-informative", "synthetic.informative", "informative feature count"},
             {"--synthetic-separation", "synthetic.separation", "distance between class means"},
             {"--synthetic-missing-rate", "synthetic.missing_rate", "fraction of cells blanked"},
             {"--label-col", "label_col", "label column name"},
             {"--positive-value", "positive_value", "label text of the positive class"},
             {"--fn-cost", "fn_cost", "cost of a false negative"},
             {"--fp-cost", "fp_cost", "cost of a false positive"},
             {"--scorers", "scorers", "comma list of logit, nb, lda"},
             {"--methods", "methods", "comma list of thors, null, theoretical, empirical, metacost, crs"},
             {"--rounds", "rounds", "number of rounds"},
             {"--split", "split", "train:valid:test ratios"},
             {"--select-k", "select_k", "features kept by ANOVA F selection (0 = all)"},
             {"--seed", "seed", "master seed"},
             {"--output-dir", "output_dir", "report directory"},
             {"--threads", "threads", "rounds run concurrently (0 = all cores)"},
             {"--metacost-m", "metacost_m", "Metacost bootstrap replicates"},
             {"--grid-steps", "grid_steps", "empirical baseline grid steps"},
             {"--record-timing", "record_timing", "also write timing.csv (true/false)"}}) {
        overrides.push_back(std::make_unique<Override>(Override{flag, key, help, {}}));
        ex->add_option(flag, overrides.back()->value, help);
    }
    bool ex_curve = false;
    double ex_curve_conf = 0.95;
    std::vector<double> ex_ratios = kDefaultRatioGrid;
    ex->add_flag("--bound-curve", ex_curve, "also write bound_curve.csv");
    ex->add_option("--curve-confidence", ex_curve_conf, "confidence for the bound curve");
    ex->add_option("--ratios", ex_ratios, "target ratios for the bound curve")->delimiter(',');

    // bounds
    auto* bd = app.add_subcommand("bounds", "guarantee report for given counts");
    std::size_t bd_n0 = 0, bd_n1 = 0, bd_k0 = 0, bd_k1 = 0, bd_nte = 1;
    std::optional<double> bd_pi1;
    CostArgs bd_cost;
    std::optional<double> bd_eps;
    double bd_conf = 0.95;
    std::vector<double> bd_t{1.0, 2.0, 3.0};
    std::vector<double> bd_x;
    bd->add_option("--n0", bd_n0, "class-0 validation count")->required();
    bd->add_option("--n1", bd_n1, "class-1 validation count")->required();
    bd->add_option("--k0", bd_k0, "class-0 scores at or below the threshold")->required();
    bd->add_option("--k1", bd_k1, "class-1 scores at or below the threshold")->required();
    bd->add_option("--pi1", bd_pi1, "class-1 prior (default n1 / (n0 + n1))");
    bd->add_option("--n-te", bd_nte, "number of future instances");
    add_cost_options(bd, bd_cost, true);
    bd->add_option("--epsilon", bd_eps, "fixed Hoeffding epsilon");
    bd->add_option("--confidence", bd_conf, "confidence for the solved epsilon");
    bd->add_option("--t", bd_t, "Bernstein t values")->delimiter(',');
    bd->add_option("--x", bd_x, "points at which to bracket P(FPR <= x) and P(FNR <= x)")->delimiter(',');

    // size
    auto* sz = app.add_subcommand("size", "validation size for a target cost ratio and confidence");
    SizeQuery sq;
    double sz_pi1 = 0.5;
    CostArgs sz_cost;
    std::string sz_config;
    std::vector<double> sz_ratios;
    auto* q0_opt = sz->add_option("--q0", sq.q0, "(n0 - k0) / (n0 + 1)");
    auto* q1_opt = sz->add_option("--q1", sq.q1, "k1 / (n1 + 1)");
    sz->add_option("--pi1", sz_pi1, "class-1 prior");
    sz->add_option("--n-te", sq.n_te, "number of future instances");
    add_cost_options(sz, sz_cost, false);
    sz->add_option("--ratio", sq.target_ratio, "target upper bound as a multiple of C2");
    sz->add_option("--confidence", sq.target_confidence, "target confidence");
    auto* cfg_opt = sz->add_option("--config", sz_config,
                                   "experiment config: freeze q0, q1 from its first round and emit a curve");
    sz->add_option("--ratios", sz_ratios, "ratio grid for --config")->delimiter(',');
    cfg_opt->excludes(q0_opt)->excludes(q1_opt);

    // verify
    auto* vf = app.add_subcommand("verify", "Monte-Carlo check of the bounds");
    VerifyConfig vc;
    vf->add_option("--simulations", vc.simulations, "number of simulated validation sets");
    vf->add_option("--n0", vc.n0, "class-0 validation count");
    vf->add_option("--n1", vc.n1, "class-1 validation count");
    vf->add_option("--mu", vc.mu, "class-1 score mean (class 0 is N(0,1))");
    vf->add_option("--fn-cost", vc.fn_cost, "cost of a false negative");
    vf->add_option("--fp-cost", vc.fp_cost, "cost of a false positive");
    vf->add_option("--n-te", vc.n_te, "number of future instances");
    vf->add_option("--epsilon", vc.epsilon, "Hoeffding epsilon");
    vf->add_option("--t", vc.t_values, "Bernstein t values")->delimiter(',');
    vf->add_option("--grid-points", vc.grid_points, "CDF grid points");
    vf->add_option("--seed", vc.seed, "master seed");
    vf->add_option("--threads", vc.threads, "worker threads (0 = all cores)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (*th) {
            const CostMatrix cm(th_cost.fn_cost, th_cost.fp_cost);
            warn_beta(cm, err);
            const auto scores = load_scores_csv(th_scores);
            const auto vs = ValidationScores::build(scores);
            const auto sel = select_threshold(vs, cm, {th_all_pos});
            const auto ctx = BoundContext::from_selection(vs, sel, cm, th_nte);
            bool unachievable = false;
            json j;
            j["threshold"] = num(sel.c_star);
            j["rule"] = "predict 1 iff score > threshold";
            j["k_star"] = sel.k_star;
            j["objective"] = sel.objective;
            j["empirical_fpr"] = sel.empirical_fpr;
            j["empirical_fnr"] = sel.empirical_fnr;
            j["empirical_cost_per_sample"] = sel.empirical_cost_per_sample;
            j["beta_warning"] = cm.beta_warning();
            j["context"] = context_json(ctx);
            j["bernstein"] = bernstein_json(bernstein_params(ctx), th_t);
            j["hoeffding"] = hoeffding_json(ctx, th_eps, th_conf, unachievable);
            write_json(out, j);
            return unachievable ? kExitUnachievable : kExitOk;
        }

        if (*ex) {
            ConfigMap map;
            if (!ex_config.empty()) map = read_config_file(ex_config);
            for (const auto& o : overrides)
                if (ex->count(o->flag)) map[o->key] = o->value;
            const auto cfg = ExperimentConfig::from_map(map);
            warn_beta(cfg.costs(), err);
            const auto data = load_experiment_data(cfg);
            const auto result = run_experiment(cfg, data);
            write_reports(cfg, result);
            out << summary_text(result.summary);
            if (ex_curve) {
                const auto curve = bound_curve(cfg, data, ex_curve_conf, ex_ratios);
                std::ofstream f(std::filesystem::path(cfg.output_dir) / "bound_curve.csv");
                if (!f) throw Error(ErrorCode::Io, "cannot write bound_curve.csv");
                f << bound_curve_csv(curve);
            }
            out << "reports written to " << cfg.output_dir << "\n";
            return kExitOk;
        }

        if (*bd) {
            BoundContext ctx;
            ctx.n0 = bd_n0;
            ctx.n1 = bd_n1;
            ctx.k0 = bd_k0;
            ctx.k1 = bd_k1;
            ctx.n_te = bd_nte;
            ctx.cm = CostMatrix(bd_cost.fn_cost, bd_cost.fp_cost);
            const double total = double(bd_n0 + bd_n1);
            ctx.pi1 = bd_pi1 ? *bd_pi1 : (total > 0 ? double(bd_n1) / total : 0.5);
            ctx.pi0 = 1.0 - ctx.pi1;
            ctx.validate();
            warn_beta(ctx.cm, err);
            bool unachievable = false;
            json j;
            j["context"] = context_json(ctx);
            const auto mom = order_stat_moments(ctx.n0, ctx.k0, ctx.n1, ctx.k1);
            j["moments"] = {{"mean_y0", mom.mean_y0}, {"var_y0", mom.var_y0},
                            {"mean_y1", mom.mean_y1}, {"var_y1", mom.var_y1}};
            json cdf = json::array();
            for (double x : bd_x) {
                const auto f = fpr_cdf_bounds(x, ctx.n0, ctx.k0);
                const auto g = fnr_cdf_bounds(x, ctx.n1, ctx.k1);
                cdf.push_back({{"x", x},
                               {"fpr_lower", f.lower}, {"fpr_upper", f.upper},
                               {"fnr_lower", g.lower}, {"fnr_upper", g.upper}});
            }
            j["cdf_brackets"] = cdf;
            j["bernstein"] = bernstein_json(bernstein_params(ctx), bd_t);
            j["hoeffding"] = hoeffding_json(ctx, bd_eps, bd_conf, unachievable);
            write_json(out, j);
            return unachievable ? kExitUnachievable : kExitOk;
        }

        if (*sz) {
            if (!sz_config.empty()) {
                const auto cfg = ExperimentConfig::from_map(read_config_file(sz_config));
                const auto curve = bound_curve(cfg, sq.target_confidence,
                                               sz_ratios.empty() ? kDefaultRatioGrid : sz_ratios);
                write_json(out, bound_curve_json(curve));
                for (const auto& p : curve.points)
                    if (!p.n_v) return kExitUnachievable;
                return kExitOk;
            }
            if (!*q0_opt || !*q1_opt)
                throw Error(ErrorCode::InvalidArgument, "size needs --q0 and --q1, or --config");
            sq.cm = CostMatrix(sz_cost.fn_cost, sz_cost.fp_cost);
            sq.pi1 = sz_pi1;
            sq.pi0 = 1.0 - sz_pi1;
            const std::size_t n_v = estimate_validation_size(sq);
            write_json(out, json{{"n_v", n_v},
                                 {"target_ratio", sq.target_ratio},
                                 {"target_confidence", sq.target_confidence},
                                 {"prob_upper_at_n_v", size_query_prob_upper(sq, double(n_v))}});
            return kExitOk;
        }

        if (*vf) {
            const auto rep = verify_bounds(vc);
            json j;
            j["config"] = {{"simulations", vc.simulations}, {"n0", vc.n0}, {"n1", vc.n1},
                           {"mu", vc.mu}, {"fn_cost", vc.fn_cost}, {"fp_cost", vc.fp_cost},
                           {"n_te", vc.n_te}, {"epsilon", vc.epsilon}, {"seed", vc.seed}};
            auto cdf_rows = [](const std::vector<CdfCheckRow>& rows) {
                json a = json::array();
                for (const auto& r : rows)
                    a.push_back({{"x", r.x}, {"empirical", r.empirical}, {"lower", r.lower},
                                 {"upper", r.upper}, {"inside", r.inside}});
                return a;
            };
            j["cdf"] = {{"passed", rep.cdf_passed}, {"k0", rep.k0_fixed}, {"k1", rep.k1_fixed},
                        {"fpr", cdf_rows(rep.fpr_rows)}, {"fnr", cdf_rows(rep.fnr_rows)}};
            json tails = json::array();
            for (const auto& r : rep.bernstein_rows)
                tails.push_back({{"t", r.t}, {"empirical", r.empirical}, {"floor", r.floor},
                                 {"se", r.se}, {"passed", r.passed}});
            j["bernstein"] = {{"passed", rep.bernstein_passed}, {"rows", tails}};
            j["interval"] = {{"passed", rep.interval_passed},
                             {"coverage", rep.interval_coverage},
                             {"floor", rep.interval_floor},
                             {"se", rep.interval_se},
                             {"upper_coverage", rep.upper_coverage},
                             {"upper_floor", rep.upper_floor},
                             {"vacuous_simulations", rep.vacuous_count}};
            json spread = json::array();
            for (const auto& r : rep.spread_rows)
                spread.push_back({{"n_v", r.n_v}, {"mean", r.mean}, {"sd", r.sd}});
            j["spread"] = {{"passed", rep.spread_passed}, {"rows", spread}};
            j["all_passed"] = rep.all_passed();
            write_json(out, j);
            return rep.all_passed() ? kExitOk : kExitFailedCheck;
        }
    } catch (const Error& e) {
        err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

} // namespace thors::cli
