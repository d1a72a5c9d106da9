#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drkit/analysis.hpp"
#include "drkit/divergence.hpp"
#include "drkit/error.hpp"
#include "drkit/metrics.hpp"
#include "drkit/version.hpp"

// Report assembly and its canonical JSON form. JSON is the lossless format:
// parse(emit(r)) reproduces r field for field (doubles survive via
// shortest-round-trip printing).

namespace drkit::report {

using nlohmann::json;

struct TaskAnalysis {
    std::vector<analysis::CharacterizationRow> characterizations;
    std::optional<analysis::ScenarioTestReport> scenario_test;
    std::vector<analysis::ChallengeCurvePoint> challenge_curve;

    bool operator==(const TaskAnalysis&) const = default;
};

struct DivergenceSection {
    std::vector<divergence::DivergenceResult> pairs;
    std::vector<std::string> failures;
    std::map<std::string, analysis::PredictorCorrelations> predictor_correlations;  // per task

    bool operator==(const DivergenceSection&) const = default;
};

struct Diagnostics {
    std::size_t skipped_shifts = 0;        // ordered pairs dropped for missing cells
    std::size_t degenerate_orderings = 0;  // ties excluded from ordering counts
    std::size_t boundary_scenarios = 0;    // ties excluded from scenario counts
    std::vector<std::string> warnings;

    bool operator==(const Diagnostics&) const = default;
};

struct Report {
    std::string tool_version{kVersion};
    std::string generated_at;
    std::map<std::string, std::string> config;  // effective flag values
    std::vector<TaskSummary> summaries;         // one per (task, model)
    std::map<std::string, TaskAnalysis> tasks;  // characterization sections per task
    std::optional<DivergenceSection> divergence;
    Diagnostics diagnostics;

    bool operator==(const Report&) const = default;
};

// --- encoding ---------------------------------------------------------------

namespace detail {

inline json encode_pair(const DomainPair& p) { return json::array({p.first.name, p.second.name}); }

inline DomainPair decode_pair(const json& j) {
    return {DomainId(j.at(0).get<std::string>()), DomainId(j.at(1).get<std::string>())};
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v.has_value()) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace detail

inline json encode(const TaskSummary& s) {
    json j;
    j["task"] = s.task;
    j["model"] = s.model;
    j["n_shifts"] = s.n_shifts;
    j["skipped_shifts"] = s.skipped_shifts;
    j["avg_ss"] = s.avg_ss;
    j["avg_tt"] = s.avg_tt;
    j["avg_st"] = s.avg_st;
    j["avg_drop"] = s.avg_drop;
    j["mean_sd"] = s.mean_sd;
    j["mean_td"] = s.mean_td;
    detail::put_optional(j, "var_sd", s.var_sd);
    detail::put_optional(j, "var_td", s.var_td);
    detail::put_optional(j, "std_sd", s.std_sd);
    detail::put_optional(j, "std_td", s.std_td);
    j["worst_sd"] = s.worst_sd;
    j["worst_sd_shift"] = detail::encode_pair(s.worst_sd_shift);
    j["worst_td"] = s.worst_td;
    j["worst_td_shift"] = detail::encode_pair(s.worst_td_shift);
    j["full_cross_product"] = s.full_cross_product;
    json scenarios = json::object();
    for (const auto& [k, v] : s.scenario_counts) scenarios[std::string(to_string(k))] = v;
    j["scenario_counts"] = scenarios;
    json orderings = json::object();
    for (const auto& [k, v] : s.ordering_counts) orderings[std::string(to_string(k))] = v;
    j["ordering_counts"] = orderings;
    return j;
}

inline TaskSummary decode_task_summary(const json& j) {
    TaskSummary s;
    s.task = j.at("task").get<std::string>();
    s.model = j.at("model").get<std::string>();
    s.n_shifts = j.at("n_shifts").get<std::size_t>();
    s.skipped_shifts = j.at("skipped_shifts").get<std::size_t>();
    s.avg_ss = j.at("avg_ss").get<double>();
    s.avg_tt = j.at("avg_tt").get<double>();
    s.avg_st = j.at("avg_st").get<double>();
    s.avg_drop = j.at("avg_drop").get<double>();
    s.mean_sd = j.at("mean_sd").get<double>();
    s.mean_td = j.at("mean_td").get<double>();
    s.var_sd = detail::get_optional<double>(j, "var_sd");
    s.var_td = detail::get_optional<double>(j, "var_td");
    s.std_sd = detail::get_optional<double>(j, "std_sd");
    s.std_td = detail::get_optional<double>(j, "std_td");
    s.worst_sd = j.at("worst_sd").get<double>();
    s.worst_sd_shift = detail::decode_pair(j.at("worst_sd_shift"));
    s.worst_td = j.at("worst_td").get<double>();
    s.worst_td_shift = detail::decode_pair(j.at("worst_td_shift"));
    s.full_cross_product = j.at("full_cross_product").get<bool>();
    for (const auto& [k, v] : j.at("scenario_counts").items()) {
        const auto scenario = scenario_from_string(k);
        if (!scenario) raise(Errc::schema_error, "unknown scenario '" + k + "'");
        s.scenario_counts[*scenario] = v.get<std::size_t>();
    }
    for (const auto& [k, v] : j.at("ordering_counts").items()) {
        const auto ordering = ordering_from_string(k);
        if (!ordering) raise(Errc::schema_error, "unknown ordering '" + k + "'");
        s.ordering_counts[*ordering] = v.get<std::size_t>();
    }
    return s;
}

inline json encode(const analysis::CharacterizationRow& r) {
    json j;
    j["task"] = r.task;
    j["model_group"] = r.model_group;
    j["n_shifts"] = r.n_shifts;
    j["var_sd"] = r.var_sd;
    j["var_td"] = r.var_td;
    j["std_sd"] = r.std_sd;
    j["std_td"] = r.std_td;
    j["worst_sd"] = r.worst_sd;
    j["worst_td"] = r.worst_td;
    detail::put_optional(j, "pearson_st_ss", r.pearson_st_ss);
    detail::put_optional(j, "pearson_st_tt", r.pearson_st_tt);
    detail::put_optional(j, "spearman_st_ss", r.spearman_st_ss);
    detail::put_optional(j, "spearman_st_tt", r.spearman_st_tt);
    detail::put_optional(j, "r2_idd_sd", r.r2_idd_sd);
    detail::put_optional(j, "r2_idd_td", r.r2_idd_td);
    j["mad_st_ss"] = r.mad_st_ss;
    j["mad_st_tt"] = r.mad_st_tt;
    j["drop_moment_signs_agree"] = r.drop_moment_signs_agree;
    j["notes"] = r.notes;
    return j;
}

inline analysis::CharacterizationRow decode_characterization(const json& j) {
    analysis::CharacterizationRow r;
    r.task = j.at("task").get<std::string>();
    r.model_group = j.at("model_group").get<std::string>();
    r.n_shifts = j.at("n_shifts").get<std::size_t>();
    r.var_sd = j.at("var_sd").get<double>();
    r.var_td = j.at("var_td").get<double>();
    r.std_sd = j.at("std_sd").get<double>();
    r.std_td = j.at("std_td").get<double>();
    r.worst_sd = j.at("worst_sd").get<double>();
    r.worst_td = j.at("worst_td").get<double>();
    r.pearson_st_ss = detail::get_optional<double>(j, "pearson_st_ss");
    r.pearson_st_tt = detail::get_optional<double>(j, "pearson_st_tt");
    r.spearman_st_ss = detail::get_optional<double>(j, "spearman_st_ss");
    r.spearman_st_tt = detail::get_optional<double>(j, "spearman_st_tt");
    r.r2_idd_sd = detail::get_optional<double>(j, "r2_idd_sd");
    r.r2_idd_td = detail::get_optional<double>(j, "r2_idd_td");
    r.mad_st_ss = j.at("mad_st_ss").get<double>();
    r.mad_st_tt = j.at("mad_st_tt").get<double>();
    r.drop_moment_signs_agree = j.at("drop_moment_signs_agree").get<bool>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
}

inline json encode(const stats::ChiSquareResult& c) {
    return json{{"statistic", c.statistic},     {"df", c.df},
                {"p_value", c.p_value},         {"alpha", c.alpha},
                {"alpha_adjusted", c.alpha_adjusted}, {"reject", c.reject}};
}

inline stats::ChiSquareResult decode_chi(const json& j) {
    stats::ChiSquareResult c;
    c.statistic = j.at("statistic").get<double>();
    c.df = j.at("df").get<unsigned>();
    c.p_value = j.at("p_value").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.alpha_adjusted = j.at("alpha_adjusted").get<double>();
    c.reject = j.at("reject").get<bool>();
    return c;
}

inline json encode(const analysis::ScenarioTestReport& r) {
    json j;
    json orderings = json::object();
    for (const auto& [k, v] : r.ordering_counts) orderings[std::string(to_string(k))] = v;
    j["ordering_counts"] = orderings;
    j["excluded_degenerate"] = r.excluded_degenerate;
    j["total_shifts"] = r.total_shifts;
    j["chi_square"] = encode(r.chi);
    j["grouped_by_scenario"] = r.grouped_by_scenario;
    json counts = json::object(), proportions = json::object();
    for (const auto& [k, v] : r.scenario_counts) counts[std::string(to_string(k))] = v;
    for (const auto& [k, v] : r.scenario_proportions) proportions[std::string(to_string(k))] = v;
    j["scenario_counts"] = counts;
    j["excluded_boundary"] = r.excluded_boundary;
    j["scenario_proportions"] = proportions;
    return j;
}

inline analysis::ScenarioTestReport decode_scenario_test(const json& j) {
    analysis::ScenarioTestReport r;
    for (const auto& [k, v] : j.at("ordering_counts").items()) {
        const auto o = ordering_from_string(k);
        if (!o) raise(Errc::schema_error, "unknown ordering '" + k + "'");
        r.ordering_counts[*o] = v.get<std::size_t>();
    }
    r.excluded_degenerate = j.at("excluded_degenerate").get<std::size_t>();
    r.total_shifts = j.at("total_shifts").get<std::size_t>();
    r.chi = decode_chi(j.at("chi_square"));
    r.grouped_by_scenario = j.at("grouped_by_scenario").get<bool>();
    for (const auto& [k, v] : j.at("scenario_counts").items()) {
        const auto s = scenario_from_string(k);
        if (!s) raise(Errc::schema_error, "unknown scenario '" + k + "'");
        r.scenario_counts[*s] = v.get<std::size_t>();
    }
    r.excluded_boundary = j.at("excluded_boundary").get<std::size_t>();
    for (const auto& [k, v] : j.at("scenario_proportions").items()) {
        const auto s = scenario_from_string(k);
        if (!s) raise(Errc::schema_error, "unknown scenario '" + k + "'");
        r.scenario_proportions[*s] = v.get<double>();
    }
    return r;
}

inline json encode(const analysis::ChallengeCurvePoint& p) {
    return json{{"k", p.k},
                {"avg_sd_over_top_k", p.avg_sd_over_top_k},
                {"avg_td_over_top_k", p.avg_td_over_top_k},
                {"ranking_key", std::string(to_string(p.ranking_key))}};
}

inline analysis::ChallengeCurvePoint decode_curve_point(const json& j) {
    analysis::ChallengeCurvePoint p;
    p.k = j.at("k").get<std::size_t>();
    p.avg_sd_over_top_k = j.at("avg_sd_over_top_k").get<double>();
    p.avg_td_over_top_k = j.at("avg_td_over_top_k").get<double>();
    p.ranking_key = j.at("ranking_key").get<std::string>() == "sd" ? DropKind::SourceDrop
                                                                   : DropKind::TargetDrop;
    return p;
}

inline json encode(const analysis::PredictorCorrelations& p) {
    json j;
    j["n_shifts"] = p.n_shifts;
    detail::put_optional(j, "js_vs_sd", p.js_vs_sd);
    detail::put_optional(j, "js_vs_td", p.js_vs_td);
    detail::put_optional(j, "idd_vs_sd", p.idd_vs_sd);
    detail::put_optional(j, "idd_vs_td", p.idd_vs_td);
    j["notes"] = p.notes;
    return j;
}

inline analysis::PredictorCorrelations decode_predictor_correlations(const json& j) {
    analysis::PredictorCorrelations p;
    p.n_shifts = j.at("n_shifts").get<std::size_t>();
    p.js_vs_sd = detail::get_optional<double>(j, "js_vs_sd");
    p.js_vs_td = detail::get_optional<double>(j, "js_vs_td");
    p.idd_vs_sd = detail::get_optional<double>(j, "idd_vs_sd");
    p.idd_vs_td = detail::get_optional<double>(j, "idd_vs_td");
    p.notes = j.at("notes").get<std::vector<std::string>>();
    return p;
}

inline json encode(const divergence::DivergenceResult& r) {
    return json{{"pair", detail::encode_pair(r.pair)},
                {"jsd", r.jsd},
                {"vocab_size_used", r.vocab_size_used}};
}

inline divergence::DivergenceResult decode_divergence_result(const json& j) {
    divergence::DivergenceResult r;
    r.pair = detail::decode_pair(j.at("pair"));
    r.jsd = j.at("jsd").get<double>();
    r.vocab_size_used = j.at("vocab_size_used").get<std::size_t>();
    return r;
}

inline json to_json(const Report& r) {
    json j;
    j["tool_version"] = r.tool_version;
    j["generated_at"] = r.generated_at;
    j["config"] = r.config;

    json summaries = json::array();
    for (const auto& s : r.summaries) summaries.push_back(encode(s));
    j["summaries"] = summaries;

    json tasks = json::object();
    for (const auto& [task, analysis_section] : r.tasks) {
        json t;
        json rows = json::array();
        for (const auto& row : analysis_section.characterizations) rows.push_back(encode(row));
        t["characterizations"] = rows;
        if (analysis_section.scenario_test) {
            t["scenario_test"] = encode(*analysis_section.scenario_test);
        }
        json curve = json::array();
        for (const auto& p : analysis_section.challenge_curve) curve.push_back(encode(p));
        t["challenge_curve"] = curve;
        tasks[task] = t;
    }
    j["tasks"] = tasks;

    if (r.divergence) {
        json d;
        json pairs = json::array();
        for (const auto& p : r.divergence->pairs) pairs.push_back(encode(p));
        d["pairs"] = pairs;
        d["failures"] = r.divergence->failures;
        json pc = json::object();
        for (const auto& [task, table] : r.divergence->predictor_correlations) {
            pc[task] = encode(table);
        }
        d["predictor_correlations"] = pc;
        j["divergence"] = d;
    }

    j["diagnostics"] = json{{"skipped_shifts", r.diagnostics.skipped_shifts},
                            {"degenerate_orderings", r.diagnostics.degenerate_orderings},
                            {"boundary_scenarios", r.diagnostics.boundary_scenarios},
                            {"warnings", r.diagnostics.warnings}};
    return j;
}

inline Report from_json(const json& j) {
    Report r;
    r.tool_version = j.at("tool_version").get<std::string>();
    r.generated_at = j.at("generated_at").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    for (const auto& s : j.at("summaries")) r.summaries.push_back(decode_task_summary(s));
    for (const auto& [task, t] : j.at("tasks").items()) {
        TaskAnalysis section;
        for (const auto& row : t.at("characterizations")) {
            section.characterizations.push_back(decode_characterization(row));
        }
        if (t.contains("scenario_test")) {
            section.scenario_test = decode_scenario_test(t.at("scenario_test"));
        }
        for (const auto& p : t.at("challenge_curve")) {
            section.challenge_curve.push_back(decode_curve_point(p));
        }
        r.tasks[task] = std::move(section);
    }
    if (j.contains("divergence")) {
        DivergenceSection d;
        for (const auto& p : j.at("divergence").at("pairs")) {
            d.pairs.push_back(decode_divergence_result(p));
        }
        d.failures = j.at("divergence").at("failures").get<std::vector<std::string>>();
        for (const auto& [task, table] : j.at("divergence").at("predictor_correlations").items()) {
            d.predictor_correlations[task] = decode_predictor_correlations(table);
        }
        r.divergence = std::move(d);
    }
    const auto& diag = j.at("diagnostics");
    r.diagnostics.skipped_shifts = diag.at("skipped_shifts").get<std::size_t>();
    r.diagnostics.degenerate_orderings = diag.at("degenerate_orderings").get<std::size_t>();
    r.diagnostics.boundary_scenarios = diag.at("boundary_scenarios").get<std::size_t>();
    r.diagnostics.warnings = diag.at("warnings").get<std::vector<std::string>>();
    return r;
}

}  // namespace drkit::report
