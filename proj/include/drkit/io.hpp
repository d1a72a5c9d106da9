#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "drkit/divergence.hpp"
#include "drkit/error.hpp"
#include "drkit/metrics.hpp"
#include "drkit/report.hpp"
#include "drkit/theorem.hpp"

namespace drkit::io {

enum class ResultsFormat : std::uint8_t { Csv, Jsonl };
enum class ScoreScale : std::uint8_t { Percent, Unit };
enum class ReportFormat : std::uint8_t { Json, Markdown, Csv };

struct ParseOptions {
    ResultsFormat format = ResultsFormat::Csv;
    ScoreScale score_scale = ScoreScale::Percent;
    bool allow_out_of_range = false;  // widens the accepted score range
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

inline double parse_double(const std::string& text, std::size_t line_no) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        raise(Errc::schema_error,
              "line " + std::to_string(line_no) + ": not a number: '" + text + "'");
    }
    return value;
}

inline double normalize_score(double raw, const ParseOptions& opts, std::size_t line_no) {
    if (!std::isfinite(raw)) {
        raise(Errc::schema_error, "line " + std::to_string(line_no) + ": non-finite score");
    }
    const double hi = opts.score_scale == ScoreScale::Percent ? 100.0 : 1.0;
    if (!opts.allow_out_of_range && (raw < 0.0 || raw > hi)) {
        raise(Errc::score_out_of_range, "line " + std::to_string(line_no) + ": score " +
                                            std::to_string(raw) + " outside [0, " +
                                            std::to_string(hi) + "]");
    }
    return opts.score_scale == ScoreScale::Unit ? raw * 100.0 : raw;
}

// shortest representation that round-trips, locale-independent
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string format_fixed2(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, ptr);
}

inline void check_duplicate(std::map<std::tuple<std::string, std::string, std::string, std::string>,
                                     std::size_t>& seen,
                            const RunRecord& r, std::size_t line_no) {
    const auto key = std::make_tuple(r.task, r.model, r.source.name, r.target.name);
    const auto [it, inserted] = seen.insert({key, line_no});
    if (!inserted) {
        raise(Errc::duplicate_key, "line " + std::to_string(line_no) + ": duplicate of line " +
                                       std::to_string(it->second) + " (" + r.task + ", " +
                                       r.model + ", " + r.source.name + ", " + r.target.name +
                                       ")");
    }
}

}  // namespace detail

inline constexpr std::string_view kResultsCsvHeader = "task,model,source,target,score";

/// CSV results: exact header, five trimmed fields per row, empty lines
/// skipped. Throws before returning anything on the first malformed row.
inline std::vector<RunRecord> parse_results_csv(std::istream& in, const ParseOptions& opts) {
    std::vector<RunRecord> records;
    std::map<std::tuple<std::string, std::string, std::string, std::string>, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        if (!header_seen) {
            if (trimmed != kResultsCsvHeader) {
                raise(Errc::schema_error, "line " + std::to_string(line_no) +
                                              ": expected header '" +
                                              std::string(kResultsCsvHeader) + "', got '" +
                                              trimmed + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 5) {
            raise(Errc::schema_error, "line " + std::to_string(line_no) + ": expected 5 fields, got " +
                                          std::to_string(fields.size()));
        }
        RunRecord r;
        r.task = fields[0];
        r.model = fields[1];
        r.source = DomainId(fields[2]);
        r.target = DomainId(fields[3]);
        if (r.task.empty() || r.model.empty() || r.source.empty() || r.target.empty()) {
            raise(Errc::schema_error, "line " + std::to_string(line_no) + ": empty key field");
        }
        r.score = detail::normalize_score(detail::parse_double(fields[4], line_no), opts, line_no);
        detail::check_duplicate(seen, r, line_no);
        records.push_back(std::move(r));
    }
    if (!header_seen) raise(Errc::schema_error, "missing header row");
    return records;
}

/// JSONL results: one object per line with task/model/source/target strings
/// and a numeric score.
inline std::vector<RunRecord> parse_results_jsonl(std::istream& in, const ParseOptions& opts) {
    std::vector<RunRecord> records;
    std::map<std::tuple<std::string, std::string, std::string, std::string>, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(trimmed);
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::schema_error, "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object()) {
            raise(Errc::schema_error, "line " + std::to_string(line_no) + ": not an object");
        }
        RunRecord r;
        try {
            r.task = detail::trim(j.at("task").get<std::string>());
            r.model = detail::trim(j.at("model").get<std::string>());
            r.source = DomainId(j.at("source").get<std::string>());
            r.target = DomainId(j.at("target").get<std::string>());
            if (!j.at("score").is_number()) {
                raise(Errc::schema_error,
                      "line " + std::to_string(line_no) + ": score must be a number");
            }
            r.score = detail::normalize_score(j.at("score").get<double>(), opts, line_no);
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::schema_error, "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (r.task.empty() || r.model.empty() || r.source.empty() || r.target.empty()) {
            raise(Errc::schema_error, "line " + std::to_string(line_no) + ": empty key field");
        }
        detail::check_duplicate(seen, r, line_no);
        records.push_back(std::move(r));
    }
    return records;
}

inline ResultsFormat infer_results_format(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return ResultsFormat::Jsonl;
    return ResultsFormat::Csv;
}

inline std::vector<RunRecord> parse_results(const std::filesystem::path& path,
                                            const ParseOptions& opts) {
    std::ifstream in(path);
    if (!in) raise(Errc::schema_error, "cannot open results file: " + path.string());
    if (opts.format == ResultsFormat::Csv) return parse_results_csv(in, opts);
    return parse_results_jsonl(in, opts);
}

/// Atom file for the theorem checker: CSV with header ss,tt,st,prob.
inline theorem::DiscreteJoint parse_atoms_csv(std::istream& in) {
    theorem::DiscreteJoint joint;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        if (!header_seen) {
            if (trimmed != "ss,tt,st,prob") {
                raise(Errc::schema_error, "line " + std::to_string(line_no) +
                                              ": expected header 'ss,tt,st,prob'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 4) {
            raise(Errc::schema_error, "line " + std::to_string(line_no) + ": expected 4 fields");
        }
        joint.atoms.push_back({detail::parse_double(fields[0], line_no),
                               detail::parse_double(fields[1], line_no),
                               detail::parse_double(fields[2], line_no),
                               detail::parse_double(fields[3], line_no)});
    }
    if (!header_seen) raise(Errc::schema_error, "missing header row");
    return joint;
}

inline theorem::DiscreteJoint parse_atoms_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::schema_error, "cannot open atoms file: " + path.string());
    return parse_atoms_csv(in);
}

// --- corpora ---------------------------------------------------------------

/// Directory layout: one subdirectory per domain, one document per file.
inline std::vector<divergence::Corpus> load_corpora_dir(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) {
        raise(Errc::schema_error, "not a corpora directory: " + root.string());
    }
    std::vector<divergence::Corpus> corpora;
    std::vector<fs::path> domains;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) domains.push_back(entry.path());
    }
    std::ranges::sort(domains);
    for (const auto& dir : domains) {
        divergence::Corpus corpus;
        corpus.domain = DomainId(dir.filename().string());
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::ranges::sort(files);
        for (const auto& file : files) {
            std::ifstream in(file, std::ios::binary);
            if (!in) raise(Errc::schema_error, "cannot open document: " + file.string());
            std::ostringstream buffer;
            buffer << in.rdbuf();
            corpus.documents.push_back(std::move(buffer).str());
        }
        corpora.push_back(std::move(corpus));
    }
    return corpora;
}

/// JSONL layout: one {"domain": ..., "text": ...} object per line.
inline std::vector<divergence::Corpus> load_corpora_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::schema_error, "cannot open corpora file: " + path.string());
    std::map<DomainId, std::vector<std::string>> grouped;
    std::vector<DomainId> order;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(trimmed);
            const DomainId domain(j.at("domain").get<std::string>());
            if (!grouped.contains(domain)) order.push_back(domain);
            grouped[domain].push_back(j.at("text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::schema_error, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    std::vector<divergence::Corpus> corpora;
    corpora.reserve(order.size());
    for (const auto& domain : order) {
        corpora.push_back({domain, std::move(grouped[domain])});
    }
    return corpora;
}

/// Stopword file: one word per line, lowercased, blank lines skipped.
inline std::set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::schema_error, "cannot open stopword file: " + path.string());
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = detail::trim(line);
        if (w.empty()) continue;
        std::ranges::transform(w, w.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        words.insert(std::move(w));
    }
    return words;
}

// --- emission ----------------------------------------------------------------

enum class Section : std::uint8_t { Summaries, Characterization, Divergence };

inline void require_section(const report::Report& r, Section s) {
    switch (s) {
        case Section::Summaries:
            if (r.summaries.empty()) raise(Errc::unpopulated_section, "summaries");
            return;
        case Section::Characterization:
            if (r.tasks.empty()) raise(Errc::unpopulated_section, "characterization");
            return;
        case Section::Divergence:
            if (!r.divergence) raise(Errc::unpopulated_section, "divergence");
            return;
    }
}

inline std::string emit_json(const report::Report& r) { return report::to_json(r).dump(2) + "\n"; }

/// One table per task, columns as in the headline results tables, two
/// decimals. Statistics are computed on unrounded values; rounding happens
/// only here.
inline std::string emit_markdown(const report::Report& r) {
    std::ostringstream out;
    out << "# Domain robustness report\n\n";
    out << "generated_at: " << r.generated_at << "  \ntool_version: " << r.tool_version << "\n";

    std::map<std::string, std::vector<const TaskSummary*>> by_task;
    for (const auto& s : r.summaries) by_task[s.task].push_back(&s);
    for (const auto& [task, summaries] : by_task) {
        out << "\n## " << task << "\n\n";
        out << "| model | AVG SS | AVG ST | Δ̄ | W_SD | W_TD |\n";
        out << "|---|---|---|---|---|---|\n";
        for (const auto* s : summaries) {
            out << "| " << s->model << " | " << detail::format_fixed2(s->avg_ss) << " | "
                << detail::format_fixed2(s->avg_st) << " | " << detail::format_fixed2(s->avg_drop)
                << " | " << detail::format_fixed2(s->worst_sd) << " | "
                << detail::format_fixed2(s->worst_td) << " |\n";
        }
    }

    if (!r.tasks.empty()) {
        out << "\n## Scenario proportions\n\n";
        out << "| task | classic | observed | unobserved | no_challenge | chi2 | p |\n";
        out << "|---|---|---|---|---|---|---|\n";
        for (const auto& [task, section] : r.tasks) {
            if (!section.scenario_test) continue;
            const auto& st = *section.scenario_test;
            out << "| " << task;
            for (const auto scenario : {Scenario::Classic, Scenario::Observed,
                                        Scenario::Unobserved, Scenario::NoChallenge}) {
                const auto it = st.scenario_proportions.find(scenario);
                out << " | "
                    << detail::format_fixed2(it == st.scenario_proportions.end() ? 0.0
                                                                                 : it->second);
            }
            out << " | " << detail::format_fixed2(st.chi.statistic) << " | "
                << detail::format_double(st.chi.p_value) << " |\n";
        }
    }

    if (r.divergence) {
        out << "\n## Pairwise divergence\n\n";
        out << "| domain a | domain b | jsd | vocab |\n|---|---|---|---|\n";
        for (const auto& p : r.divergence->pairs) {
            out << "| " << p.pair.first.name << " | " << p.pair.second.name << " | "
                << detail::format_double(p.jsd) << " | " << p.vocab_size_used << " |\n";
        }
    }
    return std::move(out).str();
}

/// Flat machine CSV, one row per (task, model); full precision.
inline std::string emit_csv(const report::Report& r,
                            const std::vector<Section>& sections = {Section::Summaries}) {
    for (const auto s : sections) require_section(r, s);
    std::ostringstream out;
    const bool want_summaries =
        std::ranges::find(sections, Section::Summaries) != sections.end();
    const bool want_divergence =
        std::ranges::find(sections, Section::Divergence) != sections.end();
    if (want_summaries) {
        out << "task,model,n_shifts,skipped_shifts,avg_ss,avg_tt,avg_st,avg_drop,mean_sd,mean_td,"
               "var_sd,var_td,worst_sd,worst_td\n";
        for (const auto& s : r.summaries) {
            out << s.task << ',' << s.model << ',' << s.n_shifts << ',' << s.skipped_shifts << ','
                << detail::format_double(s.avg_ss) << ',' << detail::format_double(s.avg_tt) << ','
                << detail::format_double(s.avg_st) << ',' << detail::format_double(s.avg_drop)
                << ',' << detail::format_double(s.mean_sd) << ','
                << detail::format_double(s.mean_td) << ','
                << (s.var_sd ? detail::format_double(*s.var_sd) : "") << ','
                << (s.var_td ? detail::format_double(*s.var_td) : "") << ','
                << detail::format_double(s.worst_sd) << ',' << detail::format_double(s.worst_td)
                << '\n';
        }
    }
    if (want_divergence) {
        if (want_summaries) out << '\n';
        out << "domain_a,domain_b,jsd,vocab_size_used\n";
        for (const auto& p : r.divergence->pairs) {
            out << p.pair.first.name << ',' << p.pair.second.name << ','
                << detail::format_double(p.jsd) << ',' << p.vocab_size_used << '\n';
        }
    }
    return std::move(out).str();
}

inline std::string render_report(const report::Report& r, ReportFormat format,
                                 const std::vector<Section>& csv_sections = {Section::Summaries}) {
    switch (format) {
        case ReportFormat::Json: return emit_json(r);
        case ReportFormat::Markdown: return emit_markdown(r);
        case ReportFormat::Csv: return emit_csv(r, csv_sections);
    }
    raise(Errc::invalid_config, "unknown report format");
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::write_failure, "cannot open for writing: " + path.string());
    out << content;
    if (!out) raise(Errc::write_failure, "short write: " + path.string());
}

inline void emit_report(const report::Report& r, ReportFormat format,
                        const std::filesystem::path& path,
                        const std::vector<Section>& csv_sections = {Section::Summaries}) {
    write_file(path, render_report(r, format, csv_sections));
}

inline std::string current_timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline constexpr std::string_view kZeroTimestamp = "1970-01-01T00:00:00Z";

/// Simulation trace as CSV of (trial, ss, tt, st); rows are re-derived from
/// the per-trial substreams, so the file matches what simulate() consumed.
inline void write_trace_csv(const theorem::SimConfig& config, const std::filesystem::path& path,
                            std::uint64_t max_rows) {
    config.validate();
    const auto space = theorem::make_domain_space(config, config.seed);
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::write_failure, "cannot open for writing: " + path.string());
    out << "trial,ss,tt,st\n";
    const std::uint64_t rows = std::min<std::uint64_t>(config.trials, max_rows);
    for (std::uint64_t i = 0; i < rows; ++i) {
        const auto s = theorem::draw_trial(space, config, i);
        out << i << ',' << detail::format_double(s.ss) << ',' << detail::format_double(s.tt)
            << ',' << detail::format_double(s.st) << '\n';
    }
    if (!out) raise(Errc::write_failure, "short write: " + path.string());
}

}  // namespace drkit::io
