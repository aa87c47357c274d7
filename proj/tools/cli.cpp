#include "cli.hpp"
#include <CLI11.hpp>
#include <ebicsel/ebic.hpp>
#include <ebicsel/error.hpp>
#include <ebicsel/experiment.hpp>
#include <ebicsel/pipeline.hpp>
#include <ebicsel/report.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace ebicsel::cli {
namespace {

namespace fs = std::filesystem;

struct IoFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct RunArgs
{
    std::string config_path;
    std::string profile = "desk";
    std::string out_dir = "ebicsel-out";
    bool force = false;

    std::optional<std::uint64_t> seed;
    std::optional<long> replicates;
    std::optional<unsigned> workers;
    std::vector<std::string> structures;
    std::vector<int> c_values;
    std::vector<long> n_values;
    std::vector<double> h_values;
    std::vector<std::string> gammas;
    std::optional<std::string> placement;
    std::optional<bool> fixed_beta;
    std::optional<double> rho;
    std::optional<long> block_size;
    std::optional<double> eig_min;
    std::optional<double> eig_max;
    std::optional<long> calibration_n;
    std::optional<double> sis_exponent;
    std::optional<long> screen_target;
    std::optional<double> scad_a;
    std::optional<long> num_lambdas;
    std::optional<double> lambda_min_ratio;
    std::optional<double> cd_tol;
    std::optional<long> cd_max_iter;
};

struct ScoreArgs
{
    std::string path;
    long response_col = 0; // 1-based; 0 means last
    std::string gamma = "sc";
    std::optional<double> sis_exponent;
    std::optional<long> screen_target;
    std::optional<double> scad_a;
};

struct Commands
{
    CLI::App app{"Feature selection with the extended BIC: simulation study, scoring, numeric checks.", "ebicsel"};
    CLI::App* run = nullptr;
    CLI::App* score = nullptr;
    CLI::App* verify = nullptr;
    RunArgs run_args;
    ScoreArgs score_args;
};

void add_pipeline_options(CLI::App& cmd, std::optional<double>& sis_exponent,
                          std::optional<long>& screen_target, std::optional<double>& scad_a)
{
    cmd.add_option("--sis-exponent", sis_exponent, "SIS keeps ceil(n^x) features [1.5]");
    cmd.add_option("--screen-target", screen_target, "Lasso screening target and candidate size cap [n/2]");
    cmd.add_option("--scad-a", scad_a, "SCAD concavity parameter [3.7]");
}

void build(Commands& c)
{
    c.app.require_subcommand(1);
    c.app.set_help_all_flag("--help-all", "Help for every subcommand");

    auto& r = c.run_args;
    c.run = c.app.add_subcommand("run", "Run the simulation study and write logs and tables");
    auto* run = c.run;
    run->add_option("--config", r.config_path,
                    "Flat key = value file; keys are the long option names without dashes");
    run->add_option("--profile", r.profile, "Base study before overrides: desk or full")
        ->check(CLI::IsMember({"desk", "full"}))
        ->capture_default_str();
    run->add_option("--out", r.out_dir, "Output directory")->envname("EBICSEL_OUT_DIR")->capture_default_str();
    run->add_flag("--force", r.force, "Write into an existing output directory");
    run->add_option("--seed", r.seed, "Master seed [20260101]");
    run->add_option("--replicates", r.replicates, "Replicates per setting [desk 50, full 200]");
    run->add_option("--workers", r.workers, "Worker threads, 0 for all cores [0]");
    run->add_option("--structures", r.structures, "Covariance structures among I, II, III [desk I]")->delimiter(',');
    run->add_option("--c-values", r.c_values, "Sparsity multipliers c [desk 1]")->delimiter(',');
    run->add_option("--n-values", r.n_values, "Sample sizes [desk 100,200]")->delimiter(',');
    run->add_option("--h-values", r.h_values, "Heritabilities in (0, 1) [0.4,0.6,0.8]")->delimiter(',');
    run->add_option("--gammas", r.gammas,
                    "EBIC index policies as label=policy or policy; policy is bic, sc, mbic, "
                    "fixed:<g> or sc:<C> [bic,sc,mbic]")
        ->delimiter(',');
    run->add_option("--placement", r.placement, "Relevant feature positions: evenly or first [evenly]")
        ->check(CLI::IsMember({"evenly", "first"}));
    run->add_option("--fixed-beta", r.fixed_beta, "One coefficient draw per setting (true/false) [false]");
    run->add_option("--rho", r.rho, "Correlation parameter of structures I and II [0.5]");
    run->add_option("--block-size", r.block_size, "Block size of structures II and III [50]");
    run->add_option("--eig-min", r.eig_min, "Smallest prescribed eigenvalue of structure III blocks [1]");
    run->add_option("--eig-max", r.eig_max, "Largest prescribed eigenvalue of structure III blocks [50]");
    run->add_option("--calibration-n", r.calibration_n, "Sample size whose schedule fixes the noise level [100]");
    add_pipeline_options(*run, r.sis_exponent, r.screen_target, r.scad_a);
    run->add_option("--num-lambdas", r.num_lambdas, "Length of the penalty grid [100]");
    run->add_option("--lambda-min-ratio", r.lambda_min_ratio, "Smallest penalty as a fraction of the largest [1e-3]");
    run->add_option("--cd-tol", r.cd_tol, "Coordinate descent tolerance on coefficient change [1e-7]");
    run->add_option("--cd-max-iter", r.cd_max_iter, "Coordinate descent sweep limit [10000]");

    auto& s = c.score_args;
    c.score = c.app.add_subcommand("score", "Run the two-stage selection once on a numeric matrix file");
    c.score->add_option("file", s.path, "Delimited numeric matrix, optional header line")->required();
    c.score->add_option("--response-col", s.response_col, "1-based response column [last]");
    c.score->add_option("--gamma", s.gamma, "EBIC index policy: bic, sc, mbic, fixed:<g> or sc:<C>")
        ->capture_default_str();
    add_pipeline_options(*c.score, s.sis_exponent, s.screen_target, s.scad_a);

    c.verify = c.app.add_subcommand("verify", "Numeric checks of the model-size and chi-square bounds");
}

// Config items as extra `run` arguments; keys already given on the command line win.
std::vector<std::string> config_arguments(const Commands& parsed)
{
    const std::string& path = parsed.run_args.config_path;
    if (!fs::exists(path)) throw IoFailure("cannot read config file " + path);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::FileError&) {
        throw IoFailure("cannot read config file " + path);
    }

    std::vector<std::string> args;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue; // section markers
        const bool top = item.parents.empty() || (item.parents.size() == 1 &&
                                                  (item.parents[0] == "default" || item.parents[0] == "run"));
        const CLI::Option* opt = top && item.name != "config" ? parsed.run->get_option_no_throw("--" + item.name)
                                                              : nullptr;
        if (!opt) throw CLI::ConfigError("unknown config key '" + item.fullname() + "'");
        if (opt->count() > 0) continue;
        if (opt->get_expected_min() == 0) {
            args.push_back("--" + item.name + "=" + (item.inputs.empty() ? "true" : item.inputs.front()));
            continue;
        }
        if (item.inputs.empty()) throw CLI::ConfigError("config key '" + item.name + "' has no value");
        args.push_back("--" + item.name);
        for (const auto& v : item.inputs) args.push_back(v);
    }
    return args;
}

LabeledGamma parse_labeled_gamma(const std::string& text)
{
    const auto eq = text.find('=');
    const std::string label = eq == std::string::npos ? text : text.substr(0, eq);
    const std::string policy = eq == std::string::npos ? text : text.substr(eq + 1);
    return {label, GammaPolicy::parse(policy)};
}

template <class Field, class Value>
void assign(Field& field, const std::optional<Value>& v)
{
    if (v) field = static_cast<Field>(*v);
}

void apply_pipeline(PipelineConfig& p, const std::optional<double>& sis_exponent,
                    const std::optional<long>& screen_target, const std::optional<double>& scad_a)
{
    assign(p.sis_budget_exponent, sis_exponent);
    assign(p.screen_target, screen_target);
    if (scad_a) p.penalty = PenaltySpec::scad(*scad_a);
}

StudyConfig study_from(const RunArgs& r)
{
    StudyConfig cfg = r.profile == "full" ? StudyConfig::full() : StudyConfig::desk();
    assign(cfg.master_seed, r.seed);
    assign(cfg.replicates, r.replicates);
    assign(cfg.workers, r.workers);
    if (!r.structures.empty()) {
        cfg.structures.clear();
        for (const auto& s : r.structures) cfg.structures.push_back(parse_covariance_kind(s));
    }
    if (!r.c_values.empty()) cfg.c_values = r.c_values;
    if (!r.n_values.empty()) cfg.n_values.assign(r.n_values.begin(), r.n_values.end());
    if (!r.h_values.empty()) cfg.h_values = r.h_values;
    if (!r.gammas.empty()) {
        cfg.gamma_policies.clear();
        for (const auto& g : r.gammas) cfg.gamma_policies.push_back(parse_labeled_gamma(g));
    }
    if (r.placement) cfg.placement = *r.placement == "first" ? SupportPlacement::First : SupportPlacement::EvenlySpaced;
    assign(cfg.fixed_beta, r.fixed_beta);
    assign(cfg.rho, r.rho);
    assign(cfg.block_size, r.block_size);
    assign(cfg.eig_min, r.eig_min);
    assign(cfg.eig_max, r.eig_max);
    assign(cfg.calibration_n, r.calibration_n);
    apply_pipeline(cfg.pipeline, r.sis_exponent, r.screen_target, r.scad_a);
    assign(cfg.pipeline.path.num_lambdas, r.num_lambdas);
    assign(cfg.pipeline.path.lambda_min_ratio, r.lambda_min_ratio);
    assign(cfg.pipeline.path.cd.tol, r.cd_tol);
    assign(cfg.pipeline.path.cd.max_iter, r.cd_max_iter);
    cfg.validate();
    return cfg;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw IoFailure("cannot write " + path.string());
}

int do_run(const RunArgs& r, std::ostream& out, std::ostream& err)
{
    const StudyConfig cfg = study_from(r);
    const fs::path dir = r.out_dir;
    if (fs::exists(dir) && !r.force) {
        throw IoFailure("output directory " + dir.string() + " exists; pass --force to overwrite");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());

    const std::size_t total =
        cfg.structures.size() * cfg.c_values.size() * cfg.n_values.size() * cfg.h_values.size();
    std::size_t done = 0;
    const auto res = run_study(cfg, [&](const SettingKey& k) {
        err << '[' << ++done << '/' << total << "] structure " << to_string(k.structure) << " c=" << k.c
            << " n=" << k.n << " h=" << k.h << '\n';
    });

    std::ostringstream reps, summary;
    write_replicate_csv(reps, res.records);
    write_summary_csv(summary, res.summaries);
    const std::string table = emit_table(res.summaries, TableFormat::Markdown);
    write_file(dir / "replicates.csv", reps.str());
    write_file(dir / "summary.csv", summary.str());
    write_file(dir / "table.md", table);
    write_file(dir / "table.csv", emit_table(res.summaries, TableFormat::Csv));

    out << table;
    for (const auto& s : res.summaries) {
        if (s.flagged) {
            out << "flagged: structure " << to_string(s.setting.structure) << " c=" << s.setting.c
                << " n=" << s.setting.n << " h=" << s.setting.h << ' ' << s.gamma_label << " ("
                << s.failures << " failures, " << s.replicates_completed << " completed)\n";
        }
    }
    return ok;
}

std::vector<double> parse_numbers(const std::string& line, bool& numeric)
{
    std::vector<double> v;
    numeric = true;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        char* end = nullptr;
        const double x = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) numeric = false;
        v.push_back(x);
        token.clear();
    };
    for (char ch : line) {
        if (ch == ',' || ch == ';' || std::isspace(static_cast<unsigned char>(ch))) flush();
        else token += ch;
    }
    flush();
    return v;
}

Eigen::MatrixXd read_matrix(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw IoFailure("cannot read " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    for (std::size_t lineno = 1; std::getline(f, line); ++lineno) {
        bool numeric = true;
        auto v = parse_numbers(line, numeric);
        if (v.empty()) continue;
        if (!numeric) {
            if (rows.empty() && lineno == 1) continue; // header
            throw InvalidData(path + ":" + std::to_string(lineno) + ": non-numeric field");
        }
        if (!rows.empty() && v.size() != rows.front().size()) {
            throw InvalidData(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(rows.front().size()) + " fields");
        }
        rows.push_back(std::move(v));
    }
    if (rows.empty()) throw InvalidData(path + ": no data rows");
    Eigen::MatrixXd m(static_cast<index_t>(rows.size()), static_cast<index_t>(rows.front().size()));
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

int do_score(const ScoreArgs& s, std::ostream& out)
{
    Eigen::MatrixXd m;
    try {
        m = read_matrix(s.path);
    } catch (const InvalidData& e) {
        throw IoFailure(e.what());
    }
    if (m.cols() < 2) throw IoFailure(s.path + ": need a response column and at least one feature");
    const index_t col = s.response_col == 0 ? m.cols() - 1 : static_cast<index_t>(s.response_col) - 1;
    if (col < 0 || col >= m.cols()) throw InvalidConfig("--response-col out of range");

    const Eigen::VectorXd y = m.col(col);
    Eigen::MatrixXd x(m.rows(), m.cols() - 1);
    x << m.leftCols(col), m.rightCols(m.cols() - 1 - col);

    PipelineConfig cfg;
    cfg.gamma = GammaPolicy::parse(s.gamma);
    apply_pipeline(cfg, s.sis_exponent, s.screen_target, s.scad_a);
    const auto res = run_two_stage(x, y, cfg);

    out << "n " << x.rows() << " p " << x.cols() << " gamma " << res.gamma << '\n';
    out << "selected";
    for (auto j : res.selected) out << ' ' << j + 1;
    out << '\n';
    char buf[96];
    std::snprintf(buf, sizeof buf, "lambda_star %.6g ebic_star %.6f\n", res.lambda_star, res.ebic_star);
    out << buf << "lambda size ebic\n";
    for (const auto& t : res.per_lambda_scores) {
        std::snprintf(buf, sizeof buf, "%.6g %lld %.6f\n", t.lambda, static_cast<long long>(t.support_size), t.ebic);
        out << buf;
    }
    for (const auto& k : res.skipped) out << "skipped size " << k.support.size() << ": " << k.reason << '\n';
    return ok;
}

int do_verify(std::ostream& out)
{
    bool all = true;
    char buf[160];
    auto report = [&](bool pass, const std::string& what) {
        all = all && pass;
        out << (pass ? "PASS " : "FAIL ") << what << '\n';
    };

    // Model-count growth: ln C(p, j) / (j ln p (1 - δ)) with j = ⌈p^{1/3}⌉ tends to 1 from above.
    double prev = INFINITY;
    bool decreasing = true;
    for (int m : {6, 9, 12, 15}) {
        const auto p = static_cast<std::int64_t>(std::llround(std::pow(10.0, m)));
        const auto j = ceil_power(p, 1.0 / 3.0);
        const double r = lemma1_ratio(p, j);
        std::snprintf(buf, sizeof buf, "  log-binomial ratio p=1e%d j=%lld: %.10f", m, static_cast<long long>(j), r);
        out << buf << '\n';
        decreasing = decreasing && r < prev;
        prev = r;
    }
    report(decreasing && prev < 1.06, "log-binomial ratio decreases toward 1 (final < 1.06)");

    bool within = true, shrinking = true;
    for (int k = 1; k <= 20; ++k) {
        const double e800 = std::abs(chi2_tail_ratio(k, 800.0) - 1.0);
        const double e1600 = std::abs(chi2_tail_ratio(k, 1600.0) - 1.0);
        std::snprintf(buf, sizeof buf, "  chi-square tail k=%2d: |ratio-1| %.3e at m=800, %.3e at m=1600", k, e800, e1600);
        out << buf << '\n';
        within = within && e800 < 0.05;
        // k = 2 is exact at every m
        shrinking = shrinking && (e1600 < e800 || (e800 < 1e-12 && e1600 < 1e-12));
    }
    report(within, "chi-square tail approximation within 5% at m=800 for k<=20");
    report(shrinking, "chi-square tail approximation error shrinks from m=800 to m=1600");

    bool identity = true, above = true;
    for (std::int64_t n : {50, 100, 200, 500, 1000}) {
        for (std::int64_t p : {150, 595, 6655, 74622, 1000000}) {
            const double expected = 1.0 - std::log(static_cast<double>(n)) / (2.0 * std::log(static_cast<double>(p)));
            identity = identity && gamma_threshold(n, p, 0.0) == expected;
            if (p > n) above = above && gamma_sc(n, p, 4.0) > gamma_threshold(n, p, 0.0);
        }
    }
    report(identity, "consistency threshold at delta=0 equals 1 - ln n / (2 ln p)");
    report(above, "scaled-consistent gamma (C=4) exceeds the threshold whenever p > n");
    return all ? ok : failure;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    // CLI11 parses a reversed argument list without the program name.
    auto parse = [&](Commands& c, const std::vector<std::string>& a) {
        std::vector<std::string> rev(a.rbegin(), a.rend() - (a.empty() ? 0 : 1));
        c.app.parse(rev);
    };

    auto cmds = std::make_unique<Commands>();
    build(*cmds);
    try {
        parse(*cmds, args);
        if (cmds->run->parsed() && !cmds->run_args.config_path.empty()) {
            std::vector<std::string> extended = args;
            const auto extra = config_arguments(*cmds);
            extended.insert(extended.end(), extra.begin(), extra.end());
            cmds = std::make_unique<Commands>();
            build(*cmds);
            parse(*cmds, extended);
        }
    } catch (const CLI::CallForHelp&) {
        out << cmds->app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << cmds->app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "ebicsel: " << e.what() << '\n';
        return bad_config;
    } catch (const IoFailure& e) {
        err << "ebicsel: " << e.what() << '\n';
        return io_error;
    }

    try {
        if (cmds->run->parsed()) return do_run(cmds->run_args, out, err);
        if (cmds->score->parsed()) return do_score(cmds->score_args, out);
        return do_verify(out);
    } catch (const InvalidConfig& e) {
        err << "ebicsel: invalid configuration: " << e.what() << '\n';
        return bad_config;
    } catch (const InvalidArgument& e) {
        err << "ebicsel: invalid configuration: " << e.what() << '\n';
        return bad_config;
    } catch (const IoFailure& e) {
        err << "ebicsel: " << e.what() << '\n';
        return io_error;
    } catch (const std::exception& e) {
        err << "ebicsel: " << e.what() << '\n';
        return failure;
    }
}

} // namespace ebicsel::cli
