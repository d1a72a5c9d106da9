#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drkit/analysis.hpp"
#include "drkit/divergence.hpp"
#include "drkit/io.hpp"
#include "drkit/metrics.hpp"
#include "drkit/report.hpp"
#include "drkit/theorem.hpp"
#include "drkit/version.hpp"

// Subcommand front-end. Exit codes: 0 success, 1 data error, 2 usage error,
// 3 failed theorem assertion.

namespace drkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAssertion = 3;

namespace detail {

struct CommonOptions {
    std::string results;
    std::string results_format = "auto";  // auto|csv|jsonl
    std::string out;
    std::string format = "json";  // json|markdown|csv
    double epsilon = kDefaultEpsilon;
    std::string score_scale = "percent";
    std::uint64_t seed = 1;
    bool deterministic = false;
    bool allow_out_of_range = false;
};

inline io::ParseOptions parse_options(const CommonOptions& opts) {
    io::ParseOptions p;
    if (opts.results_format == "csv") {
        p.format = io::ResultsFormat::Csv;
    } else if (opts.results_format == "jsonl") {
        p.format = io::ResultsFormat::Jsonl;
    } else {
        p.format = io::infer_results_format(opts.results);
    }
    p.score_scale =
        opts.score_scale == "unit" ? io::ScoreScale::Unit : io::ScoreScale::Percent;
    p.allow_out_of_range = opts.allow_out_of_range;
    return p;
}

inline io::ReportFormat report_format(const std::string& name) {
    if (name == "markdown") return io::ReportFormat::Markdown;
    if (name == "csv") return io::ReportFormat::Csv;
    return io::ReportFormat::Json;
}

inline std::string fmt(double v) { return io::detail::format_double(v); }

inline void echo_common(report::Report& r, const CommonOptions& opts,
                        const std::string& subcommand) {
    r.config["command"] = subcommand;
    r.config["epsilon"] = fmt(opts.epsilon);
    r.config["score_scale"] = opts.score_scale;
    r.config["seed"] = std::to_string(opts.seed);
    r.config["format"] = opts.format;
    if (!opts.results.empty()) r.config["results"] = opts.results;
    r.generated_at = opts.deterministic ? std::string(io::kZeroTimestamp)
                                        : io::current_timestamp_utc();
}

inline void collect_diagnostics(report::Report& r, const TaskSummary& s) {
    r.diagnostics.skipped_shifts += s.skipped_shifts;
    if (const auto it = s.ordering_counts.find(Ordering::Degenerate);
        it != s.ordering_counts.end()) {
        r.diagnostics.degenerate_orderings += it->second;
    }
    if (const auto it = s.scenario_counts.find(Scenario::Boundary);
        it != s.scenario_counts.end()) {
        r.diagnostics.boundary_scenarios += it->second;
    }
    if (!s.full_cross_product) {
        r.diagnostics.warnings.push_back("matrix " + s.task + "/" + s.model +
                                         " is not a full cross-product");
    }
}

inline void print_summary_line(const TaskSummary& s) {
    std::cout << s.task << "/" << s.model << ": shifts=" << s.n_shifts
              << " avg_drop=" << fmt(s.avg_drop) << " worst_sd=" << fmt(s.worst_sd)
              << " worst_td=" << fmt(s.worst_td) << "\n";
}

inline void write_or_print(const report::Report& r, const CommonOptions& opts,
                           const std::vector<io::Section>& csv_sections) {
    if (!opts.out.empty()) {
        io::emit_report(r, report_format(opts.format), opts.out, csv_sections);
    }
}

// task -> model -> shifts, in deterministic order
using ShiftsByTask = std::map<std::string, std::map<std::string, std::vector<ShiftMetrics>>>;

struct LoadedResults {
    std::vector<PerformanceMatrix> matrices;
    ShiftsByTask shifts;
};

inline LoadedResults load_results(const CommonOptions& opts) {
    const auto records = io::parse_results(opts.results, parse_options(opts));
    LoadedResults loaded;
    loaded.matrices = build_matrix(records);
    for (const auto& m : loaded.matrices) {
        loaded.shifts[m.task][m.model] = computable_shifts(m, opts.epsilon).shifts;
    }
    return loaded;
}

}  // namespace detail

// --- analyze -----------------------------------------------------------------

inline int cmd_analyze(const detail::CommonOptions& opts) {
    const auto loaded = detail::load_results(opts);
    report::Report r;
    detail::echo_common(r, opts, "analyze");
    for (const auto& m : loaded.matrices) {
        const auto s = task_summary(m, opts.epsilon);
        detail::collect_diagnostics(r, s);
        detail::print_summary_line(s);
        r.summaries.push_back(s);
    }
    detail::write_or_print(r, opts, {io::Section::Summaries});
    return kExitOk;
}

// --- characterize ------------------------------------------------------------

struct CharacterizeOptions {
    std::string pooling = "task";  // task|model|all
    std::string ranking = "sd";    // sd|td
    std::vector<std::size_t> ks;
    double alpha = 0.05;
    unsigned comparisons = 1;
    bool chi_grouped = false;
};

namespace detail {

inline std::vector<std::size_t> default_ks(std::size_t n_shifts) {
    std::set<std::size_t> ks{1};
    for (const std::size_t div : {10, 4, 2}) {
        ks.insert(std::max<std::size_t>(1, n_shifts / div));
    }
    ks.insert(n_shifts);
    return {ks.begin(), ks.end()};
}

inline void characterize_group(report::Report& r, const std::string& task_key,
                               const std::string& group,
                               const std::vector<ShiftMetrics>& shifts) {
    try {
        r.tasks[task_key].characterizations.push_back(
            analysis::characterize(shifts, task_key, group));
    } catch (const Error& e) {
        if (e.code() != Errc::too_few_shifts) throw;
        r.diagnostics.warnings.push_back("characterization skipped for " + task_key + "/" +
                                         group + ": " + e.what());
    }
}

inline void analyze_task_pool(report::Report& r, const std::string& task_key,
                              const std::vector<ShiftMetrics>& pooled,
                              const CharacterizeOptions& copts) {
    auto& section = r.tasks[task_key];
    try {
        section.scenario_test =
            analysis::scenario_test(pooled, copts.alpha, copts.comparisons, copts.chi_grouped);
    } catch (const Error& e) {
        if (e.code() != Errc::all_degenerate) throw;
        r.diagnostics.warnings.push_back("scenario test skipped for " + task_key + ": " +
                                         e.what());
    }
    const auto ks = copts.ks.empty() ? default_ks(pooled.size()) : copts.ks;
    const auto key = copts.ranking == "td" ? DropKind::TargetDrop : DropKind::SourceDrop;
    section.challenge_curve = analysis::challenge_curve(pooled, key, ks);
}

}  // namespace detail

inline int cmd_characterize(const detail::CommonOptions& opts, const CharacterizeOptions& copts) {
    const auto loaded = detail::load_results(opts);
    report::Report r;
    detail::echo_common(r, opts, "characterize");
    r.config["pooling"] = copts.pooling;
    r.config["ranking"] = copts.ranking;
    r.config["alpha"] = detail::fmt(copts.alpha);
    r.config["comparisons"] = std::to_string(copts.comparisons);
    r.config["chi_grouped"] = copts.chi_grouped ? "true" : "false";

    for (const auto& m : loaded.matrices) {
        const auto s = task_summary(m, opts.epsilon);
        detail::collect_diagnostics(r, s);
        r.summaries.push_back(s);
    }

    if (copts.pooling == "all") {
        std::vector<ShiftMetrics> pooled;
        for (const auto& [task, models] : loaded.shifts) {
            for (const auto& [model, shifts] : models) {
                pooled.insert(pooled.end(), shifts.begin(), shifts.end());
            }
        }
        const std::string key = "(all tasks)";
        detail::characterize_group(r, key, "pooled", pooled);
        detail::analyze_task_pool(r, key, pooled, copts);
    } else {
        for (const auto& [task, models] : loaded.shifts) {
            std::vector<ShiftMetrics> pooled;
            for (const auto& [model, shifts] : models) {
                pooled.insert(pooled.end(), shifts.begin(), shifts.end());
                if (copts.pooling == "model") {
                    detail::characterize_group(r, task, model, shifts);
                }
            }
            if (copts.pooling == "task") {
                detail::characterize_group(r, task, "pooled", pooled);
            }
            detail::analyze_task_pool(r, task, pooled, copts);
        }
    }

    for (const auto& [task, section] : r.tasks) {
        if (section.scenario_test) {
            const auto& chi = section.scenario_test->chi;
            std::cout << task << ": chi2=" << detail::fmt(chi.statistic)
                      << " p=" << detail::fmt(chi.p_value)
                      << (chi.reject ? " (reject uniform)" : " (uniform not rejected)") << "\n";
        }
    }
    detail::write_or_print(r, opts, {io::Section::Summaries});
    return kExitOk;
}

// --- divergence ---------------------------------------------------------------

struct DivergenceOptions {
    std::string corpora_dir;
    std::string corpora_jsonl;
    std::size_t top_k = 10000;
    std::string stopwords_file;
    std::string log_base = "2";  // 2|e
    std::size_t min_token_length = 1;
};

inline int cmd_divergence(const detail::CommonOptions& opts, const DivergenceOptions& dopts) {
    divergence::DivergenceConfig cfg;
    cfg.top_k = dopts.top_k;
    cfg.min_token_length = dopts.min_token_length;
    cfg.log_base = dopts.log_base == "e" ? divergence::LogBase::E : divergence::LogBase::Two;
    if (!dopts.stopwords_file.empty()) cfg.stopwords = io::load_stopwords(dopts.stopwords_file);

    const auto corpora = dopts.corpora_jsonl.empty()
                             ? io::load_corpora_dir(dopts.corpora_dir)
                             : io::load_corpora_jsonl(dopts.corpora_jsonl);
    const auto matrix = divergence::divergence_matrix(corpora, cfg);

    report::Report r;
    detail::echo_common(r, opts, "divergence");
    r.config["top_k"] = std::to_string(dopts.top_k);
    r.config["log_base"] = dopts.log_base;
    r.config["min_token_length"] = std::to_string(dopts.min_token_length);
    if (!dopts.stopwords_file.empty()) r.config["stopwords"] = dopts.stopwords_file;
    r.config["corpora"] =
        dopts.corpora_jsonl.empty() ? dopts.corpora_dir : dopts.corpora_jsonl;

    report::DivergenceSection section;
    for (const auto& [pair, result] : matrix.results) section.pairs.push_back(result);
    section.failures = matrix.failures;

    if (!opts.results.empty()) {
        const auto loaded = detail::load_results(opts);
        const auto values = matrix.values();
        for (const auto& [task, models] : loaded.shifts) {
            std::vector<ShiftMetrics> pooled;
            for (const auto& [model, shifts] : models) {
                pooled.insert(pooled.end(), shifts.begin(), shifts.end());
            }
            try {
                section.predictor_correlations[task] =
                    analysis::predictor_correlations(pooled, values);
            } catch (const Error& e) {
                if (e.code() != Errc::missing_divergence && e.code() != Errc::too_few_shifts) {
                    throw;
                }
                r.diagnostics.warnings.push_back("predictor correlations skipped for " + task +
                                                 ": " + e.what());
            }
        }
    }

    for (const auto& p : section.pairs) {
        std::cout << p.pair.first.name << " <-> " << p.pair.second.name
                  << ": jsd=" << detail::fmt(p.jsd) << " vocab=" << p.vocab_size_used << "\n";
    }
    for (const auto& f : section.failures) std::cerr << "pair failed: " << f << "\n";

    const bool had_failures = !section.failures.empty();
    r.divergence = std::move(section);
    detail::write_or_print(r, opts, {io::Section::Divergence});
    return had_failures ? kExitDataError : kExitOk;
}

// --- verify-theorem ------------------------------------------------------------

struct TheoremOptions {
    std::string atoms_file;
    std::uint64_t trials = 100000;
    std::size_t seeds = 0;  // sweep mode when > 0
    std::size_t domains = 4;
    double base = 0.0;
    double difficulty_mean = 0.0;
    double difficulty_sd = 2.0;
    double penalty_sd = 1.5;
    double weight_source = 0.35;
    double weight_target = 0.65;
    double noise_sd = 0.0;
    std::string pair_mode = "replacement";  // replacement|distinct
    std::size_t workers = 1;
    double tol = 1e-12;
    double margin_tol = 1e-9;
    std::string trace_file;
    std::uint64_t trace_rows = 100000;
};

namespace detail {

inline theorem::SimConfig sim_config(const CommonOptions& opts, const TheoremOptions& topts) {
    theorem::SimConfig cfg;
    cfg.n_domains = topts.domains;
    cfg.base = topts.base;
    cfg.difficulty_mean = topts.difficulty_mean;
    cfg.difficulty_sd = topts.difficulty_sd;
    cfg.penalty_sd = topts.penalty_sd;
    cfg.weight_source = topts.weight_source;
    cfg.weight_target = topts.weight_target;
    cfg.noise_sd = topts.noise_sd;
    cfg.pair_mode = topts.pair_mode == "distinct" ? theorem::PairMode::DistinctOrderedPairs
                                                  : theorem::PairMode::IndependentWithReplacement;
    cfg.seed = opts.seed;
    cfg.trials = topts.trials;
    cfg.workers = topts.workers;
    return cfg;
}

inline nlohmann::json encode(const theorem::MomentSet& m) {
    return nlohmann::json{
        {"e_ss", m.e_ss},           {"e_tt", m.e_tt},
        {"e_st", m.e_st},           {"var_ss", m.var_ss},
        {"var_tt", m.var_tt},       {"var_st", m.var_st},
        {"cov_ss_tt", m.cov_ss_tt}, {"cov_ss_st", m.cov_ss_st},
        {"cov_tt_st", m.cov_tt_st}, {"x", m.x},
        {"y", m.y},                 {"e_sd", m.e_sd},
        {"e_td", m.e_td},           {"var_sd", m.var_sd},
        {"var_td", m.var_td},       {"cov_idd_sd", m.cov_idd_sd},
        {"cov_idd_td", m.cov_idd_td}, {"e_sd2", m.e_sd2},
        {"e_td2", m.e_td2},         {"e_abs_sd", m.e_abs_sd},
        {"e_abs_td", m.e_abs_td}};
}

inline nlohmann::json encode(const theorem::EquivalenceReport& eq) {
    return nlohmann::json{{"c1", eq.c1},
                          {"c2", eq.c2},
                          {"c3", eq.c3},
                          {"c4_sq", eq.c4_sq},
                          {"c4_abs", eq.c4_abs},
                          {"margin", eq.margin},
                          {"hypotheses_ok", eq.hypotheses_ok},
                          {"applicable", eq.applicable},
                          {"all_agree_proved", eq.all_agree_proved},
                          {"abs_variant_agrees", eq.abs_variant_agrees}};
}

inline nlohmann::json encode(const theorem::IdentityReport& ids) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : ids.identities) {
        nlohmann::json j{{"name", c.name},       {"lhs", c.lhs},   {"rhs", c.rhs},
                         {"residual", c.residual}, {"checked", c.checked}, {"pass", c.pass}};
        if (!c.note.empty()) j["note"] = c.note;
        arr.push_back(j);
    }
    return arr;
}

// exact checks on one joint; returns false on an assertion failure
inline bool report_joint_checks(const theorem::MomentSet& m, double tol, double margin_tol,
                                nlohmann::json& out) {
    const auto hyp = theorem::check_hypotheses(m, tol);
    const auto ids = theorem::verify_identities(m, tol);
    const auto eq = theorem::check_equivalence(m, margin_tol, tol);
    out["moments"] = encode(m);
    out["hypotheses"] = nlohmann::json{{"mean_equal", hyp.mean_equal},
                                       {"mean_residual", hyp.mean_residual},
                                       {"var_equal", hyp.var_equal},
                                       {"var_residual", hyp.var_residual},
                                       {"cov_zero", hyp.cov_zero},
                                       {"cov_residual", hyp.cov_residual}};
    out["identities"] = encode(ids);
    out["equivalence"] = encode(eq);

    std::cout << "hypotheses: mean_equal=" << hyp.mean_equal << " var_equal=" << hyp.var_equal
              << " cov_zero=" << hyp.cov_zero << "\n";
    for (const auto& c : ids.identities) {
        std::cout << "identity [" << c.name << "]: "
                  << (c.checked ? (c.pass ? "pass" : "FAIL") : "skipped")
                  << " residual=" << fmt(c.residual) << "\n";
    }
    std::cout << "conditions: c1=" << eq.c1 << " c2=" << eq.c2 << " c3=" << eq.c3
              << " c4_sq=" << eq.c4_sq << " c4_abs=" << eq.c4_abs
              << " margin=" << fmt(eq.margin) << "\n";
    if (eq.applicable && !eq.abs_variant_agrees) {
        std::cerr << "note: E|SD| vs E|TD| sign disagrees with the second-moment form\n";
    }
    const bool identities_ok = ids.all_checked_pass();
    const bool equivalence_ok = !eq.applicable || eq.all_agree_proved;
    return identities_ok && equivalence_ok;
}

}  // namespace detail

inline int cmd_verify_theorem(const detail::CommonOptions& opts, const TheoremOptions& topts) {
    nlohmann::json out;
    out["tool_version"] = std::string(kVersion);
    out["command"] = "verify-theorem";
    out["seed"] = opts.seed;
    out["config"] = nlohmann::json{{"domains", topts.domains},
                                   {"base", topts.base},
                                   {"difficulty_mean", topts.difficulty_mean},
                                   {"difficulty_sd", topts.difficulty_sd},
                                   {"penalty_sd", topts.penalty_sd},
                                   {"weight_source", topts.weight_source},
                                   {"weight_target", topts.weight_target},
                                   {"noise_sd", topts.noise_sd},
                                   {"pair_mode", topts.pair_mode},
                                   {"tol", topts.tol},
                                   {"margin_tol", topts.margin_tol}};
    bool ok = true;

    if (!topts.atoms_file.empty()) {
        const auto joint = io::parse_atoms_csv(topts.atoms_file);
        out["mode"] = "atoms";
        out["atoms"] = joint.atoms.size();
        ok = detail::report_joint_checks(theorem::exact_moments(joint), topts.tol,
                                         topts.margin_tol, out);
    } else if (topts.seeds > 0) {
        theorem::SweepConfig sweep;
        sweep.generator = detail::sim_config(opts, topts);
        sweep.first_seed = opts.seed;
        sweep.joints = topts.seeds;
        sweep.identity_tol = topts.tol;
        sweep.margin_tol = topts.margin_tol;
        const auto sw = theorem::equivalence_sweep(sweep);
        out["mode"] = "sweep";
        out["sweep"] = nlohmann::json{{"joints_generated", sw.joints_generated},
                                      {"asserted", sw.asserted},
                                      {"sign_agreements", sw.sign_agreements},
                                      {"identity_failures", sw.identity_failures},
                                      {"hypothesis_failures", sw.hypothesis_failures},
                                      {"below_margin", sw.below_margin},
                                      {"abs_disagreements", sw.abs_disagreements},
                                      {"min_margin_asserted", sw.min_margin_asserted},
                                      {"max_identity_residual", sw.max_identity_residual}};
        std::cout << "sweep: " << sw.asserted << " joints asserted, " << sw.sign_agreements
                  << " sign agreements, max identity residual "
                  << detail::fmt(sw.max_identity_residual) << ", min margin "
                  << detail::fmt(sw.min_margin_asserted) << "\n";
        if (sw.abs_disagreements > 0) {
            std::cerr << "note: " << sw.abs_disagreements
                      << " joints where the E|.| variant disagrees\n";
        }
        ok = sw.all_ok() && sw.asserted == topts.seeds;
    } else {
        const auto cfg = detail::sim_config(opts, topts);
        out["mode"] = "simulate";
        out["trials"] = cfg.trials;
        out["workers"] = cfg.workers;
        // exact checks on the generated space are the assertable part
        const auto joint =
            theorem::build_domain_space_joint(theorem::make_domain_space(cfg, cfg.seed),
                                              cfg.pair_mode);
        nlohmann::json exact_out;
        ok = detail::report_joint_checks(theorem::exact_moments(joint), topts.tol,
                                         topts.margin_tol, exact_out);
        out["exact"] = exact_out;

        const auto sim = theorem::simulate(cfg);
        out["empirical"] = nlohmann::json{{"moments", detail::encode(sim.moments)},
                                          {"equivalence", detail::encode(sim.equivalence)}};
        std::cout << "simulated " << sim.trials << " trials on " << sim.workers
                  << " worker(s): empirical y=" << detail::fmt(sim.moments.y)
                  << " (exact y=" << detail::fmt(theorem::exact_moments(joint).y) << ")\n";
        if (!topts.trace_file.empty()) {
            io::write_trace_csv(cfg, topts.trace_file, topts.trace_rows);
        }
    }

    out["ok"] = ok;
    if (!opts.out.empty()) io::write_file(opts.out, out.dump(2) + "\n");
    std::cout << (ok ? "theorem checks passed" : "theorem checks FAILED") << "\n";
    return ok ? kExitOk : kExitAssertion;
}

// --- wiring -------------------------------------------------------------------

inline int run(int argc, const char* const* argv) {
    CLI::App app{"domain-robustness drop metrics, theorem checks, and divergence analysis"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "flat key-value config file with [subcommand] sections");
    app.require_subcommand(1);

    detail::CommonOptions opts;
    const auto add_common = [&](CLI::App* cmd, bool results_required) {
        auto* res = cmd->add_option("--results", opts.results, "results file (CSV or JSONL)");
        if (results_required) res->required();
        cmd->add_option("--results-format", opts.results_format)
            ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
        cmd->add_option("--out", opts.out, "report output path");
        cmd->add_option("--format", opts.format, "report format")
            ->check(CLI::IsMember({"json", "markdown", "csv"}));
        cmd->add_option("--epsilon", opts.epsilon, "tie tolerance on the score scale");
        cmd->add_option("--score-scale", opts.score_scale)
            ->check(CLI::IsMember({"percent", "unit"}));
        cmd->add_option("--seed", opts.seed, "seed for randomized procedures");
        cmd->add_flag("--deterministic", opts.deterministic,
                      "zero timestamps so reports are byte-stable");
        cmd->add_flag("--allow-out-of-range", opts.allow_out_of_range,
                      "accept scores outside the native range");
    };

    auto* analyze = app.add_subcommand("analyze", "per-(task, model) drop summaries");
    add_common(analyze, true);

    auto* characterize =
        app.add_subcommand("characterize", "drop characterization, scenario test, curves");
    CharacterizeOptions copts;
    add_common(characterize, true);
    characterize->add_option("--pooling", copts.pooling)
        ->check(CLI::IsMember({"task", "model", "all"}));
    characterize->add_option("--ranking", copts.ranking)->check(CLI::IsMember({"sd", "td"}));
    characterize->add_option("--ks", copts.ks, "challenge-curve sizes")->delimiter(',');
    characterize->add_option("--alpha", copts.alpha, "chi-square significance level");
    characterize->add_option("--comparisons", copts.comparisons,
                             "Bonferroni comparison count");
    characterize->add_flag("--chi-grouped", copts.chi_grouped,
                           "test the four scenario groups instead of six orderings");

    auto* diverge = app.add_subcommand("divergence", "pairwise corpus divergence");
    DivergenceOptions dopts;
    add_common(diverge, false);
    auto* dir_opt = diverge->add_option("--corpora", dopts.corpora_dir,
                                        "directory of <domain>/<doc> text files");
    auto* jsonl_opt =
        diverge->add_option("--corpora-jsonl", dopts.corpora_jsonl, "JSONL corpus file");
    dir_opt->excludes(jsonl_opt);
    diverge->add_option("--top-k", dopts.top_k, "vocabulary size per pair");
    diverge->add_option("--stopwords", dopts.stopwords_file, "stopword file, one per line");
    diverge->add_option("--log-base", dopts.log_base)->check(CLI::IsMember({"2", "e"}));
    diverge->add_option("--min-token-length", dopts.min_token_length);

    auto* verify = app.add_subcommand("verify-theorem", "moment equivalence checks");
    TheoremOptions topts;
    add_common(verify, false);
    verify->add_option("--atoms", topts.atoms_file, "CSV of atoms ss,tt,st,prob");
    verify->add_option("--trials", topts.trials, "simulation trial count");
    verify->add_option("--seeds", topts.seeds, "sweep over this many random joints");
    verify->add_option("--domains", topts.domains);
    verify->add_option("--base", topts.base);
    verify->add_option("--difficulty-mean", topts.difficulty_mean);
    verify->add_option("--difficulty-sd", topts.difficulty_sd);
    verify->add_option("--penalty-sd", topts.penalty_sd);
    verify->add_option("--weight-source", topts.weight_source);
    verify->add_option("--weight-target", topts.weight_target);
    verify->add_option("--noise-sd", topts.noise_sd);
    verify->add_option("--pair-mode", topts.pair_mode)
        ->check(CLI::IsMember({"replacement", "distinct"}));
    verify->add_option("--workers", topts.workers);
    verify->add_option("--tol", topts.tol, "identity/hypothesis tolerance");
    verify->add_option("--margin-tol", topts.margin_tol, "sign-assertion margin");
    verify->add_option("--trace", topts.trace_file, "write trial trace CSV here");
    verify->add_option("--trace-rows", topts.trace_rows);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(opts);
        if (characterize->parsed()) return cmd_characterize(opts, copts);
        if (diverge->parsed()) {
            if (dopts.corpora_dir.empty() && dopts.corpora_jsonl.empty()) {
                std::cerr << "divergence: one of --corpora or --corpora-jsonl is required\n";
                return kExitUsage;
            }
            return cmd_divergence(opts, dopts);
        }
        if (verify->parsed()) return cmd_verify_theorem(opts, topts);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::assertion_failure ? kExitAssertion : kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitUsage;
}

inline int run(const std::vector<std::string>& args) {
    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("drkit");
    for (const auto& a : args) argv_storage.push_back(a);
    std::vector<const char*> argv;
    argv.reserve(argv_storage.size());
    for (const auto& s : argv_storage) argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace drkit::cli
