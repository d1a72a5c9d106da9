#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drkit/detail/sum.hpp"
#include "drkit/error.hpp"
#include "drkit/statistics.hpp"

namespace drkit {

/// Scores live on the task metric's native 0-100 scale (F1, BertScore).
/// Range/finiteness is enforced at ingestion, not here.
using Score = double;

/// Default tie tolerance on the 0-100 score scale. Drops within this band of
/// zero are treated as ties and routed to Boundary / Degenerate.
inline constexpr double kDefaultEpsilon = 1e-9;

struct DomainId {
    std::string name;

    DomainId() = default;
    explicit DomainId(std::string_view raw) : name(trim(raw)) {}

    static std::string trim(std::string_view s) {
        const auto begin = s.find_first_not_of(" \t\r\n");
        if (begin == std::string_view::npos) return {};
        const auto end = s.find_last_not_of(" \t\r\n");
        return std::string(s.substr(begin, end - begin + 1));
    }

    bool empty() const { return name.empty(); }
    auto operator<=>(const DomainId&) const = default;
};

using DomainPair = std::pair<DomainId, DomainId>;

/// One cross-domain evaluation result: train on `source`, test on `target`.
/// Diagonal rows (source == target) carry the in-domain scores.
struct RunRecord {
    std::string task;
    std::string model;
    DomainId source;
    DomainId target;
    Score score = 0.0;

    auto key() const { return std::tie(task, model, source, target); }
    bool operator==(const RunRecord&) const = default;
};

/// Source x target score grid for one (task, model).
struct PerformanceMatrix {
    std::string task;
    std::string model;
    std::vector<DomainId> domains;  // sorted union of sources and targets
    std::map<DomainPair, Score> scores;

    std::optional<Score> score(const DomainId& source, const DomainId& target) const {
        const auto it = scores.find({source, target});
        if (it == scores.end()) return std::nullopt;
        return it->second;
    }

    /// True iff all n^2 (source, target) cells are present.
    bool is_full_cross_product() const {
        return scores.size() == domains.size() * domains.size();
    }
};

/// Shift scenario, determined by the signs of the source and target drops.
/// Boundary absorbs shifts where either drop is a tie within epsilon.
enum class Scenario : std::uint8_t { Classic, Observed, Unobserved, NoChallenge, Boundary };

constexpr std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::Classic: return "classic";
        case Scenario::Observed: return "observed";
        case Scenario::Unobserved: return "unobserved";
        case Scenario::NoChallenge: return "no_challenge";
        case Scenario::Boundary: return "boundary";
    }
    return "unknown";
}

inline std::optional<Scenario> scenario_from_string(std::string_view s) {
    for (auto v : {Scenario::Classic, Scenario::Observed, Scenario::Unobserved,
                   Scenario::NoChallenge, Scenario::Boundary}) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

/// Strict ordering of the (SS, TT, ST) triplet, named low-to-high;
/// StTtSs means ST < TT < SS. Degenerate marks any tie within epsilon.
enum class Ordering : std::uint8_t {
    StSsTt,  // ST < SS < TT  (classic)
    StTtSs,  // ST < TT < SS  (classic)
    TtStSs,  // TT < ST < SS  (observed)
    SsStTt,  // SS < ST < TT  (unobserved)
    SsTtSt,  // SS < TT < ST  (no challenge)
    TtSsSt,  // TT < SS < ST  (no challenge)
    Degenerate,
};

inline constexpr Ordering kStrictOrderings[6] = {
    Ordering::StSsTt, Ordering::StTtSs, Ordering::TtStSs,
    Ordering::SsStTt, Ordering::SsTtSt, Ordering::TtSsSt,
};

constexpr std::string_view to_string(Ordering o) {
    switch (o) {
        case Ordering::StSsTt: return "ST<SS<TT";
        case Ordering::StTtSs: return "ST<TT<SS";
        case Ordering::TtStSs: return "TT<ST<SS";
        case Ordering::SsStTt: return "SS<ST<TT";
        case Ordering::SsTtSt: return "SS<TT<ST";
        case Ordering::TtSsSt: return "TT<SS<ST";
        case Ordering::Degenerate: return "degenerate";
    }
    return "unknown";
}

inline std::optional<Ordering> ordering_from_string(std::string_view s) {
    for (auto v : kStrictOrderings) {
        if (to_string(v) == s) return v;
    }
    if (s == "degenerate") return Ordering::Degenerate;
    return std::nullopt;
}

/// Scenario label from the two drop values.
inline Scenario classify_scenario(double sd, double td, double epsilon = kDefaultEpsilon) {
    if (std::abs(sd) <= epsilon || std::abs(td) <= epsilon) return Scenario::Boundary;
    if (sd > 0.0) return td > 0.0 ? Scenario::Classic : Scenario::Observed;
    return td > 0.0 ? Scenario::Unobserved : Scenario::NoChallenge;
}

/// Ordering label of the performance triplet; Degenerate when any pairwise
/// gap is within epsilon.
inline Ordering classify_ordering(double ss, double tt, double st,
                                  double epsilon = kDefaultEpsilon) {
    if (std::abs(ss - tt) <= epsilon || std::abs(ss - st) <= epsilon ||
        std::abs(tt - st) <= epsilon) {
        return Ordering::Degenerate;
    }
    if (st < ss && ss < tt) return Ordering::StSsTt;
    if (st < tt && tt < ss) return Ordering::StTtSs;
    if (tt < st && st < ss) return Ordering::TtStSs;
    if (ss < st && st < tt) return Ordering::SsStTt;
    if (ss < tt && tt < st) return Ordering::SsTtSt;
    return Ordering::TtSsSt;
}

/// Performance triplet and drop metrics of one domain shift.
struct ShiftMetrics {
    DomainId source;
    DomainId target;
    double ss = 0.0;   // source in-domain performance
    double tt = 0.0;   // target in-domain performance
    double st = 0.0;   // cross-domain performance
    double sd = 0.0;   // source drop, SS - ST
    double td = 0.0;   // target drop, TT - ST
    double idd = 0.0;  // in-domain difference, SS - TT
    Scenario scenario = Scenario::Boundary;
    Ordering ordering = Ordering::Degenerate;

    bool operator==(const ShiftMetrics&) const = default;
};

inline ShiftMetrics shift_metrics(const PerformanceMatrix& matrix, const DomainId& source,
                                  const DomainId& target, double epsilon = kDefaultEpsilon) {
    if (source == target) {
        raise(Errc::same_domain, "shift requires source != target (" + source.name + ")");
    }
    const auto cell = [&](const DomainId& s, const DomainId& t) {
        const auto v = matrix.score(s, t);
        if (!v) {
            raise(Errc::missing_cell,
                  "missing cell (" + s.name + " -> " + t.name + ") in " + matrix.task + "/" +
                      matrix.model);
        }
        return *v;
    };
    ShiftMetrics m;
    m.source = source;
    m.target = target;
    m.ss = cell(source, source);
    m.tt = cell(target, target);
    m.st = cell(source, target);
    m.sd = m.ss - m.st;
    m.td = m.tt - m.st;
    m.idd = m.ss - m.tt;
    m.scenario = classify_scenario(m.sd, m.td, epsilon);
    m.ordering = classify_ordering(m.ss, m.tt, m.st, epsilon);
    return m;
}

/// All computable shifts of a matrix in (source, target) lexicographic order,
/// plus the number of ordered pairs skipped for missing cells.
struct ShiftSet {
    std::vector<ShiftMetrics> shifts;
    std::size_t skipped = 0;  // ordered pairs with a missing SS/TT/ST cell
};

inline ShiftSet computable_shifts(const PerformanceMatrix& matrix,
                                  double epsilon = kDefaultEpsilon) {
    ShiftSet out;
    for (const auto& source : matrix.domains) {
        for (const auto& target : matrix.domains) {
            if (source == target) continue;
            if (!matrix.score(source, source) || !matrix.score(target, target) ||
                !matrix.score(source, target)) {
                ++out.skipped;
                continue;
            }
            out.shifts.push_back(shift_metrics(matrix, source, target, epsilon));
        }
    }
    return out;
}

/// Task-level aggregates over every computable shift of one matrix.
struct TaskSummary {
    std::string task;
    std::string model;
    std::size_t n_shifts = 0;
    std::size_t skipped_shifts = 0;

    double avg_ss = 0.0;
    double avg_tt = 0.0;
    double avg_st = 0.0;
    double avg_drop = 0.0;  // avg_ss - avg_st

    double mean_sd = 0.0;
    double mean_td = 0.0;
    std::optional<double> var_sd;  // absent when n_shifts < 2
    std::optional<double> var_td;
    std::optional<double> std_sd;
    std::optional<double> std_td;

    double worst_sd = 0.0;
    DomainPair worst_sd_shift;
    double worst_td = 0.0;
    DomainPair worst_td_shift;

    std::map<Scenario, std::size_t> scenario_counts;
    std::map<Ordering, std::size_t> ordering_counts;
    bool full_cross_product = false;

    bool operator==(const TaskSummary&) const = default;
};

inline TaskSummary task_summary(const PerformanceMatrix& matrix,
                                double epsilon = kDefaultEpsilon) {
    const auto set = computable_shifts(matrix, epsilon);
    if (set.shifts.empty()) {
        raise(Errc::no_shifts, "no computable shift in " + matrix.task + "/" + matrix.model);
    }

    TaskSummary s;
    s.task = matrix.task;
    s.model = matrix.model;
    s.n_shifts = set.shifts.size();
    s.skipped_shifts = set.skipped;
    s.full_cross_product = matrix.is_full_cross_product();

    std::vector<double> ss, tt, st, sd, td;
    for (const auto& m : set.shifts) {
        ss.push_back(m.ss);
        tt.push_back(m.tt);
        st.push_back(m.st);
        sd.push_back(m.sd);
        td.push_back(m.td);
        ++s.scenario_counts[m.scenario];
        ++s.ordering_counts[m.ordering];
    }
    s.avg_ss = detail::mean(ss);
    s.avg_tt = detail::mean(tt);
    s.avg_st = detail::mean(st);
    s.avg_drop = s.avg_ss - s.avg_st;
    s.mean_sd = detail::mean(sd);
    s.mean_td = detail::mean(td);
    if (s.n_shifts >= 2) {
        s.var_sd = stats::sample_var(sd);
        s.var_td = stats::sample_var(td);
        s.std_sd = std::sqrt(*s.var_sd);
        s.std_td = std::sqrt(*s.var_td);
    }

    // Shifts are enumerated in (source, target) order, so strict > keeps the
    // lexicographically first shift on ties.
    const auto& first = set.shifts.front();
    s.worst_sd = first.sd;
    s.worst_sd_shift = {first.source, first.target};
    s.worst_td = first.td;
    s.worst_td_shift = {first.source, first.target};
    for (const auto& m : set.shifts) {
        if (m.sd > s.worst_sd) {
            s.worst_sd = m.sd;
            s.worst_sd_shift = {m.source, m.target};
        }
        if (m.td > s.worst_td) {
            s.worst_td = m.td;
            s.worst_td_shift = {m.source, m.target};
        }
    }
    return s;
}

enum class DropKind : std::uint8_t { SourceDrop, TargetDrop };

constexpr std::string_view to_string(DropKind k) {
    return k == DropKind::SourceDrop ? "sd" : "td";
}

/// Mean over source domains of the largest drop observed from that source.
inline double avg_per_source_worst_drop(std::span<const ShiftMetrics> shifts, DropKind which) {
    if (shifts.empty()) raise(Errc::empty_source_group, "no shifts to group by source");
    std::map<DomainId, double> worst;
    for (const auto& m : shifts) {
        const double drop = which == DropKind::SourceDrop ? m.sd : m.td;
        auto [it, inserted] = worst.try_emplace(m.source, drop);
        if (!inserted) it->second = std::max(it->second, drop);
    }
    std::vector<double> maxima;
    maxima.reserve(worst.size());
    for (const auto& [_, v] : worst) maxima.push_back(v);
    return detail::mean(maxima);
}

/// Groups records into one matrix per distinct (task, model).
inline std::vector<PerformanceMatrix> build_matrix(std::span<const RunRecord> records) {
    if (records.empty()) raise(Errc::empty_input, "no run records");
    std::map<std::pair<std::string, std::string>, PerformanceMatrix> grouped;
    for (const auto& r : records) {
        auto& matrix = grouped[{r.task, r.model}];
        matrix.task = r.task;
        matrix.model = r.model;
        const auto [_, inserted] = matrix.scores.insert({{r.source, r.target}, r.score});
        if (!inserted) {
            raise(Errc::duplicate_key, "duplicate record (" + r.task + ", " + r.model + ", " +
                                           r.source.name + ", " + r.target.name + ")");
        }
    }
    std::vector<PerformanceMatrix> out;
    out.reserve(grouped.size());
    for (auto& [_, matrix] : grouped) {
        std::set<DomainId> domains;
        for (const auto& [pair, score] : matrix.scores) {
            domains.insert(pair.first);
            domains.insert(pair.second);
        }
        matrix.domains.assign(domains.begin(), domains.end());
        out.push_back(std::move(matrix));
    }
    return out;
}

}  // namespace drkit
