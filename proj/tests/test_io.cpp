#include "drkit/io.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "drkit/report.hpp"

using namespace drkit;
using namespace drkit::io;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("drkit_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

bool has_code(const Error& e, Errc c) { return e.code() == c; }

std::vector<RunRecord> parse_csv_string(std::string_view text, ParseOptions opts = {}) {
    std::istringstream in{std::string(text)};
    return parse_results_csv(in, opts);
}

report::Report sample_report() {
    std::vector<RunRecord> records;
    const char* domains[] = {"books", "beauty", "games"};
    double v = 60.0;
    for (const char* model : {"roberta", "t5"}) {
        for (const char* s : domains) {
            for (const char* t : domains) {
                records.push_back({"sa", model, DomainId(s), DomainId(t), v});
                v += 0.7;
                if (v > 95.0) v = 60.0;
            }
        }
    }
    report::Report r;
    r.generated_at = std::string(kZeroTimestamp);
    r.config = {{"epsilon", "1e-9"}, {"results", "inline"}};
    for (const auto& m : build_matrix(records)) {
        r.summaries.push_back(task_summary(m));
        const auto shifts = computable_shifts(m).shifts;
        auto& section = r.tasks[m.task];
        section.characterizations.push_back(
            analysis::characterize(shifts, m.task, m.model));
        section.scenario_test = analysis::scenario_test(shifts, 0.05, 14);
        const std::vector<std::size_t> ks{1, 3};
        section.challenge_curve = analysis::challenge_curve(shifts, DropKind::SourceDrop, ks);
    }
    report::DivergenceSection d;
    d.pairs.push_back({{DomainId("beauty"), DomainId("books")}, 0.25, 123});
    d.pairs.push_back({{DomainId("beauty"), DomainId("games")}, 0.5, 98});
    d.failures.push_back("(books, games): empty_after_filtering: corpus 'games'");
    analysis::PredictorCorrelations pc;
    pc.n_shifts = 6;
    pc.js_vs_sd = 0.7;
    pc.idd_vs_sd = 0.9;
    pc.notes.push_back("spearman(JS,TD) undefined: constant input");
    d.predictor_correlations["sa"] = pc;
    r.divergence = d;
    r.diagnostics.skipped_shifts = 2;
    r.diagnostics.warnings.push_back("matrix sa/t5 is not a full cross-product");
    return r;
}

}  // namespace

TEST_CASE("parse_results_csv happy path") {
    const auto records = parse_csv_string(
        "task,model,source,target,score\n"
        "sa,roberta,books,beauty,91.25\n"
        "\n"
        "sa,roberta,books,books,93.5\n");
    REQUIRE(records.size() == 2);
    CHECK(records[0].task == "sa");
    CHECK(records[0].model == "roberta");
    CHECK(records[0].source == DomainId("books"));
    CHECK(records[0].target == DomainId("beauty"));
    CHECK(records[0].score == 91.25);
}

TEST_CASE("parse_results_csv tolerates CRLF and padding") {
    const auto records = parse_csv_string(
        "task,model,source,target,score\r\n"
        " sa , roberta , books , beauty , 88.5 \r\n");
    REQUIRE(records.size() == 1);
    CHECK(records[0].model == "roberta");
    CHECK(records[0].score == 88.5);
}

TEST_CASE("parse_results_csv error cases") {
    CHECK_THROWS_MATCHES(parse_csv_string("a,b,c\nsa,m,x,y,50\n"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::schema_error); }));
    CHECK_THROWS_MATCHES(
        parse_csv_string("task,model,source,target,score\nsa,m,x,y,abc\n"), Error,
        Catch::Matchers::Predicate<Error>([](const Error& e) {
            return has_code(e, Errc::schema_error) &&
                   std::string(e.what()).find("line 2") != std::string::npos;
        }));
    CHECK_THROWS_MATCHES(
        parse_csv_string("task,model,source,target,score\nsa,m,x,y,50\nsa,m,x,y,60\n"), Error,
        Catch::Matchers::Predicate<Error>([](const Error& e) {
            return has_code(e, Errc::duplicate_key) &&
                   std::string(e.what()).find("line 3") != std::string::npos &&
                   std::string(e.what()).find("line 2") != std::string::npos;
        }));
    CHECK_THROWS_MATCHES(
        parse_csv_string("task,model,source,target,score\nsa,m,x,y,130.5\n"), Error,
        Catch::Matchers::Predicate<Error>(
            [](const Error& e) { return has_code(e, Errc::score_out_of_range); }));
    CHECK_THROWS_MATCHES(parse_csv_string("task,model,source,target,score\nsa,m,,y,50\n"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::schema_error); }));
}

TEST_CASE("score scale handling") {
    ParseOptions unit;
    unit.score_scale = ScoreScale::Unit;
    const auto records =
        parse_csv_string("task,model,source,target,score\nsa,m,x,y,0.85\n", unit);
    CHECK(records[0].score == 85.0);

    CHECK_THROWS_MATCHES(
        parse_csv_string("task,model,source,target,score\nsa,m,x,y,1.5\n", unit), Error,
        Catch::Matchers::Predicate<Error>(
            [](const Error& e) { return has_code(e, Errc::score_out_of_range); }));

    ParseOptions widened;
    widened.allow_out_of_range = true;
    CHECK(parse_csv_string("task,model,source,target,score\nsa,m,x,y,130.5\n", widened)[0].score ==
          130.5);
}

TEST_CASE("parse_results_jsonl") {
    const std::string text =
        R"({"task":"sa","model":"m","source":"books","target":"beauty","score":91.25})"
        "\n\n"
        R"({"task":"sa","model":"m","source":"books","target":"books","score":95})"
        "\n";
    std::istringstream in(text);
    const auto records = parse_results_jsonl(in, ParseOptions{});
    REQUIRE(records.size() == 2);
    CHECK(records[1].score == 95.0);

    std::istringstream bad(R"({"task":"sa","model":"m","source":"x","target":"y"})");
    CHECK_THROWS_MATCHES(parse_results_jsonl(bad, ParseOptions{}), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::schema_error); }));
}

TEST_CASE("atoms csv") {
    std::istringstream in(
        "ss,tt,st,prob\n"
        "1,0,0,0.5\n"
        "0,1,0,0.5\n");
    const auto joint = parse_atoms_csv(in);
    REQUIRE(joint.atoms.size() == 2);
    CHECK(joint.atoms[0].ss == 1.0);
    CHECK(joint.atoms[1].prob == 0.5);

    std::istringstream bad("ss,tt,st\n1,2,3\n");
    CHECK_THROWS_MATCHES(parse_atoms_csv(bad), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::schema_error); }));
}

TEST_CASE("report JSON round-trip is lossless") {
    const auto r = sample_report();
    const std::string text = emit_json(r);
    const auto parsed = report::from_json(nlohmann::json::parse(text));
    CHECK(parsed == r);
    // and a second emit is byte-identical
    CHECK(emit_json(parsed) == text);
}

TEST_CASE("markdown rounds to two decimals") {
    report::Report r;
    r.generated_at = std::string(kZeroTimestamp);
    TaskSummary s;
    s.task = "sa";
    s.model = "roberta";
    s.n_shifts = 2;
    s.avg_ss = 90.0;
    s.avg_tt = 90.0;
    s.avg_st = 85.0;
    s.avg_drop = 5.0;
    s.mean_sd = 5.004;
    s.mean_td = 5.0;
    s.worst_sd = 15.126;
    s.worst_td = 5.1251;
    r.summaries.push_back(s);
    const auto text = emit_markdown(r);
    CHECK(text.find("| roberta | 90.00 | 85.00 | 5.00 | 15.13 | 5.13 |") != std::string::npos);
}

TEST_CASE("csv emission and section gating") {
    const auto r = sample_report();
    const auto text = emit_csv(r);
    CHECK(text.rfind("task,model,", 0) == 0);
    CHECK(text.find("sa,roberta,") != std::string::npos);

    const auto with_divergence = emit_csv(r, {Section::Summaries, Section::Divergence});
    CHECK(with_divergence.find("domain_a,domain_b,jsd,vocab_size_used") != std::string::npos);
    CHECK(with_divergence.find("beauty,books,0.25,123") != std::string::npos);

    report::Report no_div = r;
    no_div.divergence.reset();
    CHECK_THROWS_MATCHES(emit_csv(no_div, {Section::Summaries, Section::Divergence}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return has_code(e, Errc::unpopulated_section);
                         }));
}

TEST_CASE("corpora directory loader") {
    TempDir tmp;
    fs::create_directories(tmp.path / "books");
    fs::create_directories(tmp.path / "beauty");
    write(tmp.path / "books" / "doc1.txt", "a book about dragons");
    write(tmp.path / "books" / "doc2.txt", "another book");
    write(tmp.path / "beauty" / "doc1.txt", "lipstick review");
    const auto corpora = load_corpora_dir(tmp.path);
    REQUIRE(corpora.size() == 2);
    CHECK(corpora[0].domain == DomainId("beauty"));  // sorted
    CHECK(corpora[1].documents.size() == 2);

    CHECK_THROWS_MATCHES(load_corpora_dir(tmp.path / "missing"), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::schema_error); }));
}

TEST_CASE("corpora jsonl loader groups by domain") {
    TempDir tmp;
    write(tmp.path / "c.jsonl",
          R"({"domain":"books","text":"a book"})"
          "\n"
          R"({"domain":"beauty","text":"a cream"})"
          "\n"
          R"({"domain":"books","text":"a sequel"})"
          "\n");
    const auto corpora = load_corpora_jsonl(tmp.path / "c.jsonl");
    REQUIRE(corpora.size() == 2);
    CHECK(corpora[0].domain == DomainId("books"));  // first-seen order
    CHECK(corpora[0].documents.size() == 2);
}

TEST_CASE("stopword file loader") {
    TempDir tmp;
    write(tmp.path / "stop.txt", "The\nAND\n\nof\n");
    const auto words = load_stopwords(tmp.path / "stop.txt");
    CHECK(words == std::set<std::string>{"the", "and", "of"});
}

TEST_CASE("trace export re-derives simulation draws") {
    TempDir tmp;
    theorem::SimConfig cfg;
    cfg.trials = 50;
    cfg.seed = 7;
    write_trace_csv(cfg, tmp.path / "trace.csv", 10);
    std::ifstream in(tmp.path / "trace.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "trial,ss,tt,st");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 10);
}

TEST_CASE("emit_report writes files") {
    TempDir tmp;
    const auto r = sample_report();
    emit_report(r, ReportFormat::Json, tmp.path / "report.json");
    emit_report(r, ReportFormat::Markdown, tmp.path / "report.md");
    CHECK(fs::file_size(tmp.path / "report.json") > 100);
    CHECK(fs::file_size(tmp.path / "report.md") > 100);
}
