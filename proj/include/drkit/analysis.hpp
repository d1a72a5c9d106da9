#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drkit/error.hpp"
#include "drkit/metrics.hpp"
#include "drkit/statistics.hpp"

// Task-level characterization of a shift list: drop spread, how the
// cross-domain score tracks each in-domain score, how much of each drop the
// in-domain difference explains, ordering statistics, and divergence-based
// drop predictors.

namespace drkit::analysis {

struct CharacterizationRow {
    std::string task;
    std::string model_group;
    std::size_t n_shifts = 0;

    double var_sd = 0.0, var_td = 0.0;
    double std_sd = 0.0, std_td = 0.0;
    double worst_sd = 0.0, worst_td = 0.0;

    // absent when the underlying series is constant
    std::optional<double> pearson_st_ss, pearson_st_tt;
    std::optional<double> spearman_st_ss, spearman_st_tt;
    std::optional<double> r2_idd_sd, r2_idd_td;

    double mad_st_ss = 0.0;  // mean |SS - ST| == mean |SD|
    double mad_st_tt = 0.0;  // mean |TT - ST| == mean |TD|

    // first-moment vs second-moment view of the SD/TD comparison; they are
    // equivalent in expectation but can disagree on finite samples
    bool drop_moment_signs_agree = true;
    std::vector<std::string> notes;

    bool operator==(const CharacterizationRow&) const = default;
};

namespace detail {

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

template <typename Fn>
std::optional<double> try_stat(Fn&& fn, std::vector<std::string>& notes, const std::string& what) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.code() == Errc::constant_input || e.code() == Errc::constant_predictor) {
            notes.push_back(what + " undefined: " + e.what());
            return std::nullopt;
        }
        throw;
    }
}

}  // namespace detail

inline CharacterizationRow characterize(std::span<const ShiftMetrics> shifts,
                                        const std::string& task,
                                        const std::string& model_group) {
    if (shifts.size() < 3) {
        raise(Errc::too_few_shifts, "characterization needs >= 3 shifts, got " +
                                        std::to_string(shifts.size()));
    }
    std::vector<double> ss, tt, st, sd, td, idd;
    for (const auto& m : shifts) {
        ss.push_back(m.ss);
        tt.push_back(m.tt);
        st.push_back(m.st);
        sd.push_back(m.sd);
        td.push_back(m.td);
        idd.push_back(m.idd);
    }

    CharacterizationRow row;
    row.task = task;
    row.model_group = model_group;
    row.n_shifts = shifts.size();
    row.var_sd = stats::sample_var(sd);
    row.var_td = stats::sample_var(td);
    row.std_sd = std::sqrt(row.var_sd);
    row.std_td = std::sqrt(row.var_td);
    row.worst_sd = *std::ranges::max_element(sd);
    row.worst_td = *std::ranges::max_element(td);

    row.pearson_st_ss =
        detail::try_stat([&] { return stats::pearson(st, ss); }, row.notes, "pearson(ST,SS)");
    row.pearson_st_tt =
        detail::try_stat([&] { return stats::pearson(st, tt); }, row.notes, "pearson(ST,TT)");
    row.spearman_st_ss =
        detail::try_stat([&] { return stats::spearman(st, ss); }, row.notes, "spearman(ST,SS)");
    row.spearman_st_tt =
        detail::try_stat([&] { return stats::spearman(st, tt); }, row.notes, "spearman(ST,TT)");

    // R^2 of a constant drop is vacuous; report it absent rather than 1.0
    const auto r2_of = [&](const std::vector<double>& drop,
                           const std::string& what) -> std::optional<double> {
        if (stats::detail::is_constant(drop)) {
            row.notes.push_back(what + " undefined: drop series is constant");
            return std::nullopt;
        }
        return detail::try_stat([&] { return stats::r_squared(idd, drop); }, row.notes, what);
    };
    row.r2_idd_sd = r2_of(sd, "r2(IDD,SD)");
    row.r2_idd_td = r2_of(td, "r2(IDD,TD)");

    row.mad_st_ss = stats::mean_abs_deviation(st, ss);
    row.mad_st_tt = stats::mean_abs_deviation(st, tt);

    const int var_sign = detail::sign_of(row.var_sd - row.var_td);
    const int mad_sign = detail::sign_of(row.mad_st_ss - row.mad_st_tt);
    row.drop_moment_signs_agree = var_sign == mad_sign;
    if (!row.drop_moment_signs_agree) {
        row.notes.push_back("sign(var_sd - var_td) != sign(mean|SD| - mean|TD|) on this sample");
    }
    return row;
}

/// Ordering-frequency test against the uniform null, plus the four-scenario
/// proportions. The grouped variant pools the six orderings into the four
/// scenarios with expected probabilities (2,2,1,1)/6.
struct ScenarioTestReport {
    std::map<Ordering, std::size_t> ordering_counts;  // the six strict orderings
    std::size_t excluded_degenerate = 0;
    std::size_t total_shifts = 0;
    stats::ChiSquareResult chi;
    bool grouped_by_scenario = false;

    std::map<Scenario, std::size_t> scenario_counts;  // Boundary excluded
    std::size_t excluded_boundary = 0;
    std::map<Scenario, double> scenario_proportions;

    bool operator==(const ScenarioTestReport&) const = default;
};

inline ScenarioTestReport scenario_test(std::span<const ShiftMetrics> shifts, double alpha = 0.05,
                                        unsigned comparisons = 1,
                                        bool grouped_by_scenario = false) {
    ScenarioTestReport report;
    report.total_shifts = shifts.size();
    report.grouped_by_scenario = grouped_by_scenario;
    for (auto o : kStrictOrderings) report.ordering_counts[o] = 0;
    for (auto s : {Scenario::Classic, Scenario::Observed, Scenario::Unobserved,
                   Scenario::NoChallenge}) {
        report.scenario_counts[s] = 0;
    }

    for (const auto& m : shifts) {
        if (m.ordering == Ordering::Degenerate) {
            ++report.excluded_degenerate;
        } else {
            ++report.ordering_counts[m.ordering];
        }
        if (m.scenario == Scenario::Boundary) {
            ++report.excluded_boundary;
        } else {
            ++report.scenario_counts[m.scenario];
        }
    }
    const std::size_t valid = shifts.size() - report.excluded_degenerate;
    if (valid == 0) raise(Errc::all_degenerate, "every shift is degenerate within epsilon");

    if (grouped_by_scenario) {
        // ordering counts grouped into scenarios; expected (2,2,1,1)/6
        const std::vector<std::uint64_t> counts{
            report.ordering_counts.at(Ordering::StSsTt) +
                report.ordering_counts.at(Ordering::StTtSs),
            report.ordering_counts.at(Ordering::SsTtSt) +
                report.ordering_counts.at(Ordering::TtSsSt),
            report.ordering_counts.at(Ordering::TtStSs),
            report.ordering_counts.at(Ordering::SsStTt)};
        const std::vector<double> probs{2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        report.chi = stats::chi_square_gof(counts, probs, alpha, comparisons);
    } else {
        std::vector<std::uint64_t> counts;
        counts.reserve(6);
        for (auto o : kStrictOrderings) counts.push_back(report.ordering_counts.at(o));
        report.chi = stats::chi_square_uniform(counts, alpha, comparisons);
    }

    std::size_t scenario_total = 0;
    for (const auto& [_, c] : report.scenario_counts) scenario_total += c;
    for (const auto& [s, c] : report.scenario_counts) {
        report.scenario_proportions[s] =
            scenario_total == 0 ? 0.0
                                : static_cast<double>(c) / static_cast<double>(scenario_total);
    }
    return report;
}

struct ChallengeCurvePoint {
    std::size_t k = 0;
    double avg_sd_over_top_k = 0.0;
    double avg_td_over_top_k = 0.0;
    DropKind ranking_key = DropKind::SourceDrop;

    bool operator==(const ChallengeCurvePoint&) const = default;
};

/// Average SD and TD over the k hardest shifts by the ranking key, for each
/// requested k. Ties in the key fall back to (source, target) order so the
/// curve is deterministic.
inline std::vector<ChallengeCurvePoint> challenge_curve(std::span<const ShiftMetrics> shifts,
                                                        DropKind ranking_key,
                                                        std::span<const std::size_t> ks) {
    if (shifts.empty()) raise(Errc::no_shifts, "challenge curve needs at least one shift");
    std::vector<std::size_t> order(shifts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto key = [&](std::size_t i) {
        return ranking_key == DropKind::SourceDrop ? shifts[i].sd : shifts[i].td;
    };
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
        if (key(a) != key(b)) return key(a) > key(b);
        return std::tie(shifts[a].source, shifts[a].target) <
               std::tie(shifts[b].source, shifts[b].target);
    });

    std::vector<ChallengeCurvePoint> points;
    points.reserve(ks.size());
    for (const std::size_t k : ks) {
        if (k == 0) raise(Errc::invalid_config, "k must be positive");
        if (k > shifts.size()) {
            raise(Errc::k_too_large, "k = " + std::to_string(k) + " exceeds " +
                                         std::to_string(shifts.size()) + " shifts");
        }
        drkit::detail::Accumulator sum_sd, sum_td;
        for (std::size_t i = 0; i < k; ++i) {
            sum_sd.add(shifts[order[i]].sd);
            sum_td.add(shifts[order[i]].td);
        }
        points.push_back({k, sum_sd.value() / static_cast<double>(k),
                          sum_td.value() / static_cast<double>(k), ranking_key});
    }
    return points;
}

/// Spearman correlations of the two drop predictors (pairwise corpus
/// divergence and the in-domain difference) against each drop.
struct PredictorCorrelations {
    std::size_t n_shifts = 0;
    std::optional<double> js_vs_sd, js_vs_td;
    std::optional<double> idd_vs_sd, idd_vs_td;
    std::vector<std::string> notes;

    bool operator==(const PredictorCorrelations&) const = default;
};

inline PredictorCorrelations predictor_correlations(
    std::span<const ShiftMetrics> shifts, const std::map<DomainPair, double>& divergences) {
    if (shifts.size() < 3) {
        raise(Errc::too_few_shifts,
              "predictor correlations need >= 3 shifts, got " + std::to_string(shifts.size()));
    }
    std::vector<double> js, sd, td, idd;
    for (const auto& m : shifts) {
        auto it = divergences.find({m.source, m.target});
        if (it == divergences.end()) it = divergences.find({m.target, m.source});
        if (it == divergences.end()) {
            raise(Errc::missing_divergence,
                  "no divergence for pair (" + m.source.name + ", " + m.target.name + ")");
        }
        js.push_back(it->second);
        sd.push_back(m.sd);
        td.push_back(m.td);
        idd.push_back(m.idd);
    }

    PredictorCorrelations out;
    out.n_shifts = shifts.size();
    out.js_vs_sd =
        detail::try_stat([&] { return stats::spearman(js, sd); }, out.notes, "spearman(JS,SD)");
    out.js_vs_td =
        detail::try_stat([&] { return stats::spearman(js, td); }, out.notes, "spearman(JS,TD)");
    out.idd_vs_sd =
        detail::try_stat([&] { return stats::spearman(idd, sd); }, out.notes, "spearman(IDD,SD)");
    out.idd_vs_td =
        detail::try_stat([&] { return stats::spearman(idd, td); }, out.notes, "spearman(IDD,TD)");
    return out;
}

}  // namespace drkit::analysis
