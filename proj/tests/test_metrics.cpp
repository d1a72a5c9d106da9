#include "drkit/metrics.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "drkit/rng.hpp"
#include "drkit/statistics.hpp"

using namespace drkit;

namespace {

PerformanceMatrix make_matrix(const std::string& task, const std::string& model,
                              const std::vector<std::tuple<std::string, std::string, double>>& cells) {
    std::vector<RunRecord> records;
    for (const auto& [s, t, v] : cells) {
        records.push_back({task, model, DomainId(s), DomainId(t), v});
    }
    auto matrices = build_matrix(records);
    REQUIRE(matrices.size() == 1);
    return matrices.front();
}

// the thought-experiment grid: A->A 90, B->B 80, C->C 70, A->B 75, A->C 75
PerformanceMatrix figure1_matrix() {
    return make_matrix("sa", "m", {{"a", "a", 90.0},
                                   {"b", "b", 80.0},
                                   {"c", "c", 70.0},
                                   {"a", "b", 75.0},
                                   {"a", "c", 75.0}});
}

PerformanceMatrix random_full_matrix(SplitMix64& rng, std::size_t n_domains) {
    std::vector<std::tuple<std::string, std::string, double>> cells;
    for (std::size_t s = 0; s < n_domains; ++s) {
        for (std::size_t t = 0; t < n_domains; ++t) {
            cells.emplace_back("d" + std::to_string(s), "d" + std::to_string(t),
                               rng.uniform(40.0, 100.0));
        }
    }
    return make_matrix("task", "model", cells);
}

bool has_code(const Error& e, Errc c) { return e.code() == c; }

}  // namespace

TEST_CASE("build_matrix completeness flag") {
    const auto diag_only = make_matrix("t", "m", {{"a", "a", 90.0}, {"b", "b", 80.0}});
    CHECK_FALSE(diag_only.is_full_cross_product());
    CHECK(diag_only.domains.size() == 2);

    std::vector<std::tuple<std::string, std::string, double>> cells;
    for (const std::string s : {"a", "b", "c"}) {
        for (const std::string t : {"a", "b", "c"}) cells.emplace_back(s, t, 50.0);
    }
    CHECK(make_matrix("t", "m", cells).is_full_cross_product());
}

TEST_CASE("build_matrix rejects duplicates and empty input") {
    const std::vector<RunRecord> dup{{"t", "m", DomainId("a"), DomainId("b"), 1.0},
                                     {"t", "m", DomainId("a"), DomainId("b"), 2.0}};
    CHECK_THROWS_MATCHES(build_matrix(dup), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::duplicate_key); }));
    CHECK_THROWS_MATCHES(build_matrix(std::vector<RunRecord>{}), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::empty_input); }));
}

TEST_CASE("build_matrix splits by task and model") {
    const std::vector<RunRecord> records{{"t1", "m", DomainId("a"), DomainId("a"), 1.0},
                                         {"t2", "m", DomainId("a"), DomainId("a"), 2.0},
                                         {"t1", "m2", DomainId("a"), DomainId("a"), 3.0}};
    CHECK(build_matrix(records).size() == 3);
}

TEST_CASE("domain ids trim surrounding whitespace") {
    CHECK(DomainId("  books \t") == DomainId("books"));
    CHECK(DomainId("books") != DomainId("beauty"));
}

TEST_CASE("shift metrics on the classic thought experiment") {
    const auto m = figure1_matrix();
    const auto ab = shift_metrics(m, DomainId("a"), DomainId("b"));
    CHECK(ab.ss == 90.0);
    CHECK(ab.tt == 80.0);
    CHECK(ab.st == 75.0);
    CHECK(ab.sd == 15.0);
    CHECK(ab.td == 5.0);
    CHECK(ab.idd == 10.0);
    CHECK(ab.scenario == Scenario::Classic);
    CHECK(ab.ordering == Ordering::StTtSs);

    const auto ac = shift_metrics(m, DomainId("a"), DomainId("c"));
    CHECK(ac.sd == 15.0);
    CHECK(ac.td == -5.0);
    CHECK(ac.idd == 20.0);
    CHECK(ac.scenario == Scenario::Observed);
}

TEST_CASE("shift metrics all-equal case is a boundary tie") {
    const auto m = make_matrix(
        "t", "m", {{"a", "a", 70.0}, {"b", "b", 70.0}, {"a", "b", 70.0}});
    const auto s = shift_metrics(m, DomainId("a"), DomainId("b"));
    CHECK(s.sd == 0.0);
    CHECK(s.td == 0.0);
    CHECK(s.idd == 0.0);
    CHECK(s.scenario == Scenario::Boundary);
    CHECK(s.ordering == Ordering::Degenerate);
}

TEST_CASE("shift metrics errors") {
    const auto m = figure1_matrix();
    CHECK_THROWS_MATCHES(shift_metrics(m, DomainId("b"), DomainId("a")), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::missing_cell); }));
    CHECK_THROWS_MATCHES(shift_metrics(m, DomainId("a"), DomainId("a")), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::same_domain); }));
}

TEST_CASE("classify_scenario sign table") {
    CHECK(classify_scenario(15.0, 5.0) == Scenario::Classic);
    CHECK(classify_scenario(15.0, -5.0) == Scenario::Observed);
    CHECK(classify_scenario(-3.0, 4.0) == Scenario::Unobserved);
    CHECK(classify_scenario(-3.0, -4.0) == Scenario::NoChallenge);
    CHECK(classify_scenario(0.0, 7.0, 1e-9) == Scenario::Boundary);
    CHECK(classify_scenario(7.0, 1e-10, 1e-9) == Scenario::Boundary);
}

TEST_CASE("classify_scenario depends only on drop signs") {
    SplitMix64 rng(31);
    for (int iter = 0; iter < 200; ++iter) {
        const double sd = rng.uniform(-20.0, 20.0);
        const double td = rng.uniform(-20.0, 20.0);
        const double k = rng.uniform(0.1, 50.0);
        CHECK(classify_scenario(sd, td) == classify_scenario(k * sd, k * td));
    }
}

TEST_CASE("classify_ordering") {
    CHECK(classify_ordering(90.0, 80.0, 75.0) == Ordering::StTtSs);
    CHECK(classify_ordering(70.0, 90.0, 75.0) == Ordering::SsStTt);
    CHECK(classify_ordering(50.0, 50.0 + 1e-12, 60.0, 1e-9) == Ordering::Degenerate);
    CHECK(classify_ordering(80.0, 90.0, 75.0) == Ordering::StSsTt);
    CHECK(classify_ordering(90.0, 70.0, 75.0) == Ordering::TtStSs);
    CHECK(classify_ordering(70.0, 80.0, 90.0) == Ordering::SsTtSt);
    CHECK(classify_ordering(80.0, 70.0, 90.0) == Ordering::TtSsSt);
}

TEST_CASE("classify_ordering is shift invariant") {
    SplitMix64 rng(37);
    for (int iter = 0; iter < 200; ++iter) {
        const double ss = rng.uniform(0.0, 100.0);
        const double tt = rng.uniform(0.0, 100.0);
        const double st = rng.uniform(0.0, 100.0);
        const double c = rng.uniform(-40.0, 40.0);
        CHECK(classify_ordering(ss, tt, st) == classify_ordering(ss + c, tt + c, st + c));
    }
}

TEST_CASE("task_summary two-domain hand case") {
    // SS(A)=90, SS(B)=80, ST(A->B)=75, ST(B->A)=85
    const auto m = make_matrix(
        "t", "m", {{"a", "a", 90.0}, {"b", "b", 80.0}, {"a", "b", 75.0}, {"b", "a", 85.0}});
    const auto s = task_summary(m);
    CHECK(s.n_shifts == 2);
    CHECK_THAT(s.avg_drop, Catch::Matchers::WithinAbs(5.0, 1e-12));
    CHECK_THAT(s.mean_sd, Catch::Matchers::WithinAbs(5.0, 1e-12));
    CHECK_THAT(s.mean_td, Catch::Matchers::WithinAbs(5.0, 1e-12));
    CHECK(s.worst_sd == 15.0);
    CHECK(s.worst_sd_shift == DomainPair{DomainId("a"), DomainId("b")});
    CHECK(s.worst_td == 5.0);

    // L1 distance between cross-domain and the two in-domain views
    const auto shifts = computable_shifts(m).shifts;
    std::vector<double> st_v, ss_v;
    for (const auto& sh : shifts) {
        st_v.push_back(sh.st);
        ss_v.push_back(sh.ss);
    }
    CHECK_THAT(stats::mean_abs_deviation(st_v, ss_v), Catch::Matchers::WithinAbs(10.0, 1e-12));
}

TEST_CASE("task_summary skips shifts with missing cells") {
    // diagonal for c missing: every shift touching c is skipped
    const auto m = make_matrix("t", "m",
                               {{"a", "a", 90.0},
                                {"b", "b", 80.0},
                                {"a", "b", 75.0},
                                {"b", "a", 85.0},
                                {"a", "c", 60.0},
                                {"c", "a", 65.0}});
    const auto s = task_summary(m);
    CHECK(s.n_shifts == 2);
    CHECK(s.skipped_shifts == 4);  // a<->c, b<->c in both directions
    CHECK_FALSE(s.full_cross_product);
}

TEST_CASE("task_summary with no computable shift") {
    const auto m = make_matrix("t", "m", {{"a", "a", 90.0}, {"b", "b", 80.0}});
    CHECK_THROWS_MATCHES(task_summary(m), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return has_code(e, Errc::no_shifts); }));
}

TEST_CASE("single-shift summary has no variance") {
    const auto m = make_matrix(
        "t", "m", {{"a", "a", 90.0}, {"b", "b", 80.0}, {"a", "b", 75.0}});
    const auto s = task_summary(m);
    CHECK(s.n_shifts == 1);
    CHECK_FALSE(s.var_sd.has_value());
    CHECK_FALSE(s.std_td.has_value());
}

TEST_CASE("full cross-product identities hold on randomized matrices") {
    SplitMix64 rng(41);
    for (int iter = 0; iter < 1000; ++iter) {
        const std::size_t n = 3 + static_cast<std::size_t>(rng.below(6));  // 3..8 domains
        const auto m = random_full_matrix(rng, n);
        REQUIRE(m.is_full_cross_product());

        const auto set = computable_shifts(m);
        CHECK(set.skipped == 0);
        for (const auto& sh : set.shifts) {
            CHECK(std::abs(sh.sd - (sh.td + sh.idd)) <= 1e-12);
        }

        const auto s = task_summary(m);
        CHECK(s.n_shifts == n * (n - 1));
        CHECK(std::abs(s.avg_ss - s.avg_tt) <= 1e-12);
        CHECK(std::abs(s.mean_sd - s.avg_drop) <= 1e-12);
        CHECK(std::abs(s.mean_td - s.avg_drop) <= 1e-12);

        // scenario labels partition the shifts
        std::size_t total = 0;
        for (const auto& [_, c] : s.scenario_counts) total += c;
        CHECK(total == s.n_shifts);

        CHECK(s.worst_sd >= s.mean_sd);
        CHECK(s.worst_td >= s.mean_td);
    }
}

TEST_CASE("avg_per_source_worst_drop") {
    const auto mk = [](const std::string& src, double sd, double td) {
        ShiftMetrics m;
        m.source = DomainId(src);
        m.target = DomainId(src + "_t");
        m.sd = sd;
        m.td = td;
        return m;
    };
    const std::vector<ShiftMetrics> one{mk("a", 3.0, 1.0), mk("a", 7.0, 2.0)};
    CHECK(avg_per_source_worst_drop(one, DropKind::SourceDrop) == 7.0);

    const std::vector<ShiftMetrics> two{mk("a", 7.0, 0.0), mk("b", 1.0, 0.0)};
    CHECK(avg_per_source_worst_drop(two, DropKind::SourceDrop) == 4.0);

    const std::vector<ShiftMetrics> flat{mk("a", 2.5, 2.5), mk("b", 2.5, 2.5)};
    CHECK(avg_per_source_worst_drop(flat, DropKind::TargetDrop) == 2.5);

    CHECK_THROWS_MATCHES(avg_per_source_worst_drop(std::vector<ShiftMetrics>{},
                                                   DropKind::SourceDrop),
                         Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return has_code(e, Errc::empty_source_group);
                         }));
}
