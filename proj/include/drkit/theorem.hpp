#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "drkit/detail/sum.hpp"
#include "drkit/error.hpp"
#include "drkit/rng.hpp"

// Moment-level verification of the four-way equivalence between
//   (1) Cov[TT,ST] > Cov[SS,ST]
//   (2) Cov[IDD,SD]^2 > Cov[IDD,TD]^2
//   (3) Var[SD] > Var[TD]
//   (4) E[SD^2] > E[TD^2]   (second-moment form; the E|.| form is measured
//       separately and reported, never asserted)
// under the hypotheses E[SS]=E[TT], Var[SS]=Var[TT], Cov[SS,TT]=0.
// Two routes are provided: exact enumeration over a finite joint, and a
// seeded Monte Carlo whose output is independent of worker count.

namespace drkit::theorem {

/// One support point of a finite joint distribution over (SS, TT, ST).
struct JointAtom {
    double ss = 0.0;
    double tt = 0.0;
    double st = 0.0;
    double prob = 0.0;

    bool operator==(const JointAtom&) const = default;
};

struct DiscreteJoint {
    std::vector<JointAtom> atoms;
};

inline void validate(const DiscreteJoint& joint) {
    if (joint.atoms.empty()) raise(Errc::invalid_probabilities, "joint has no atoms");
    long double total = 0.0L;
    for (const auto& a : joint.atoms) {
        if (!(a.prob > 0.0) || a.prob > 1.0) {
            raise(Errc::invalid_probabilities, "atom probability must be in (0, 1]");
        }
        if (!std::isfinite(a.ss) || !std::isfinite(a.tt) || !std::isfinite(a.st)) {
            raise(Errc::invalid_probabilities, "atom values must be finite");
        }
        total += static_cast<long double>(a.prob);
    }
    if (std::abs(static_cast<double>(total) - 1.0) > 1e-12) {
        raise(Errc::invalid_probabilities,
              "probabilities sum to " + std::to_string(static_cast<double>(total)));
    }
}

/// Moments of the (SS, TT, ST) triplet and of the derived drops. Populated
/// either exactly from a DiscreteJoint (population moments) or empirically
/// from simulation draws (sample moments, n-1 for variances/covariances).
struct MomentSet {
    double e_ss = 0.0, e_tt = 0.0, e_st = 0.0;
    double var_ss = 0.0, var_tt = 0.0, var_st = 0.0;
    double cov_ss_tt = 0.0, cov_ss_st = 0.0, cov_tt_st = 0.0;

    double x = 0.0;  // Var[SS]
    double y = 0.0;  // Cov[TT,ST] - Cov[SS,ST]

    double e_sd = 0.0, e_td = 0.0;
    double var_sd = 0.0, var_td = 0.0;
    double cov_idd_sd = 0.0, cov_idd_td = 0.0;
    double e_sd2 = 0.0, e_td2 = 0.0;
    double e_abs_sd = 0.0, e_abs_td = 0.0;

    double e_ss_st = 0.0, e_tt_st = 0.0;  // raw cross moments
    // E[TT*ST] - E[SS*ST] accumulated as E[(TT-SS)*ST]; the raw moments above
    // are too large for a 1e-12-accurate difference on the 0-100 score scale.
    double cross_gap = 0.0;

    bool operator==(const MomentSet&) const = default;
};

/// Exact population moments of a finite joint, by probability-weighted
/// enumeration. Accumulates in extended precision and centers second moments
/// so the proof-identity residuals stay below 1e-12.
inline MomentSet exact_moments(const DiscreteJoint& joint) {
    validate(joint);
    using ld = long double;
    const ld c = joint.atoms.front().ss;  // common conditioning shift

    ld total = 0.0L;
    ld m_ss = 0.0L, m_tt = 0.0L, m_st = 0.0L;
    for (const auto& a : joint.atoms) {
        const ld p = a.prob;
        total += p;
        m_ss += p * (static_cast<ld>(a.ss) - c);
        m_tt += p * (static_cast<ld>(a.tt) - c);
        m_st += p * (static_cast<ld>(a.st) - c);
    }
    m_ss /= total;
    m_tt /= total;
    m_st /= total;

    const ld e_sd = m_ss - m_st;
    const ld e_td = m_tt - m_st;
    const ld e_idd = m_ss - m_tt;

    ld v_ss = 0.0L, v_tt = 0.0L, v_st = 0.0L;
    ld c_ss_tt = 0.0L, c_ss_st = 0.0L, c_tt_st = 0.0L;
    ld v_sd = 0.0L, v_td = 0.0L, c_idd_sd = 0.0L, c_idd_td = 0.0L;
    ld e_sd2 = 0.0L, e_td2 = 0.0L, e_abs_sd = 0.0L, e_abs_td = 0.0L;
    ld e_ss_st = 0.0L, e_tt_st = 0.0L, cross_gap = 0.0L;
    for (const auto& a : joint.atoms) {
        const ld p = static_cast<ld>(a.prob) / total;
        const ld dss = (static_cast<ld>(a.ss) - c) - m_ss;
        const ld dtt = (static_cast<ld>(a.tt) - c) - m_tt;
        const ld dst = (static_cast<ld>(a.st) - c) - m_st;
        v_ss += p * dss * dss;
        v_tt += p * dtt * dtt;
        v_st += p * dst * dst;
        c_ss_tt += p * dss * dtt;
        c_ss_st += p * dss * dst;
        c_tt_st += p * dtt * dst;

        const ld sd = static_cast<ld>(a.ss) - static_cast<ld>(a.st);
        const ld td = static_cast<ld>(a.tt) - static_cast<ld>(a.st);
        const ld idd = static_cast<ld>(a.ss) - static_cast<ld>(a.tt);
        v_sd += p * (sd - e_sd) * (sd - e_sd);
        v_td += p * (td - e_td) * (td - e_td);
        c_idd_sd += p * (idd - e_idd) * (sd - e_sd);
        c_idd_td += p * (idd - e_idd) * (td - e_td);
        e_sd2 += p * sd * sd;
        e_td2 += p * td * td;
        e_abs_sd += p * (sd < 0 ? -sd : sd);
        e_abs_td += p * (td < 0 ? -td : td);

        e_ss_st += p * static_cast<ld>(a.ss) * static_cast<ld>(a.st);
        e_tt_st += p * static_cast<ld>(a.tt) * static_cast<ld>(a.st);
        cross_gap += p * (static_cast<ld>(a.tt) - static_cast<ld>(a.ss)) *
                     static_cast<ld>(a.st);
    }

    MomentSet m;
    m.e_ss = static_cast<double>(c + m_ss);
    m.e_tt = static_cast<double>(c + m_tt);
    m.e_st = static_cast<double>(c + m_st);
    m.var_ss = static_cast<double>(v_ss);
    m.var_tt = static_cast<double>(v_tt);
    m.var_st = static_cast<double>(v_st);
    m.cov_ss_tt = static_cast<double>(c_ss_tt);
    m.cov_ss_st = static_cast<double>(c_ss_st);
    m.cov_tt_st = static_cast<double>(c_tt_st);
    m.x = m.var_ss;
    m.y = static_cast<double>(c_tt_st - c_ss_st);
    m.e_sd = static_cast<double>(e_sd);
    m.e_td = static_cast<double>(e_td);
    m.var_sd = static_cast<double>(v_sd);
    m.var_td = static_cast<double>(v_td);
    m.cov_idd_sd = static_cast<double>(c_idd_sd);
    m.cov_idd_td = static_cast<double>(c_idd_td);
    m.e_sd2 = static_cast<double>(e_sd2);
    m.e_td2 = static_cast<double>(e_td2);
    m.e_abs_sd = static_cast<double>(e_abs_sd);
    m.e_abs_td = static_cast<double>(e_abs_td);
    m.e_ss_st = static_cast<double>(e_ss_st);
    m.e_tt_st = static_cast<double>(e_tt_st);
    m.cross_gap = static_cast<double>(cross_gap);
    return m;
}

/// Which of the theorem's standing assumptions a moment set satisfies.
struct HypothesisReport {
    double tolerance = 1e-12;
    bool mean_equal = false;
    double mean_residual = 0.0;  // |E[SS] - E[TT]|
    bool var_equal = false;
    double var_residual = 0.0;  // |Var[SS] - Var[TT]|
    bool cov_zero = false;
    double cov_residual = 0.0;  // |Cov[SS,TT]|

    bool all() const { return mean_equal && var_equal && cov_zero; }
};

inline HypothesisReport check_hypotheses(const MomentSet& m, double tol = 1e-12) {
    HypothesisReport r;
    r.tolerance = tol;
    r.mean_residual = std::abs(m.e_ss - m.e_tt);
    r.var_residual = std::abs(m.var_ss - m.var_tt);
    r.cov_residual = std::abs(m.cov_ss_tt);
    r.mean_equal = r.mean_residual <= tol;
    r.var_equal = r.var_residual <= tol;
    r.cov_zero = r.cov_residual <= tol;
    return r;
}

struct IdentityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    bool checked = false;  // false when a required hypothesis fails
    bool pass = false;
    std::string note;
};

struct IdentityReport {
    std::vector<IdentityCheck> identities;
    double max_residual = 0.0;  // over checked identities

    bool all_checked_pass() const {
        return std::ranges::all_of(identities,
                                   [](const auto& c) { return !c.checked || c.pass; });
    }
    bool any_skipped() const {
        return std::ranges::any_of(identities, [](const auto& c) { return !c.checked; });
    }
};

/// Proof-step identities. Each is gated on the hypotheses its derivation
/// uses; gated-out identities are reported as skipped, not failed.
inline IdentityReport verify_identities(const MomentSet& m, double tol = 1e-12) {
    const auto hyp = check_hypotheses(m, tol);
    IdentityReport report;
    const auto add = [&](std::string name, double lhs, double rhs, bool hypotheses_met,
                         std::string note) {
        IdentityCheck c;
        c.name = std::move(name);
        c.lhs = lhs;
        c.rhs = rhs;
        c.residual = std::abs(lhs - rhs);
        c.checked = hypotheses_met;
        c.pass = hypotheses_met && c.residual <= tol;
        if (!hypotheses_met) c.note = std::move(note);
        if (c.checked) report.max_residual = std::max(report.max_residual, c.residual);
        report.identities.push_back(std::move(c));
    };

    add("cov_idd_sd = x + y", m.cov_idd_sd, m.x + m.y, hyp.cov_zero,
        "needs Cov[SS,TT] = 0");
    add("cov_idd_td = -x + y", m.cov_idd_td, -m.x + m.y, hyp.cov_zero && hyp.var_equal,
        "needs Cov[SS,TT] = 0 and Var[SS] = Var[TT]");
    add("var_sd - var_td = 2y", m.var_sd - m.var_td, 2.0 * m.y, hyp.var_equal,
        "needs Var[SS] = Var[TT]");
    add("e_sd2 - e_td2 = 2(E[TT*ST] - E[SS*ST])", m.e_sd2 - m.e_td2, 2.0 * m.cross_gap,
        hyp.mean_equal && hyp.var_equal, "needs E[SS]=E[TT] and Var[SS]=Var[TT]");
    return report;
}

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

/// Signs of the four equivalent conditions plus the absolute-value variant.
/// all_agree_proved is meaningful only when the hypotheses hold and the
/// margin |y| clears the tolerance; the E|.| variant is tracked but carries
/// no assertion.
struct EquivalenceReport {
    int c1 = 0;      // sign(Cov[TT,ST] - Cov[SS,ST])
    int c2 = 0;      // sign(Cov[IDD,SD]^2 - Cov[IDD,TD]^2)
    int c3 = 0;      // sign(Var[SD] - Var[TD])
    int c4_sq = 0;   // sign(E[SD^2] - E[TD^2])
    int c4_abs = 0;  // sign(E|SD| - E|TD|)
    double margin = 0.0;  // |y|
    bool hypotheses_ok = false;
    bool applicable = false;  // hypotheses_ok && margin > margin_tol
    bool all_agree_proved = false;
    bool abs_variant_agrees = false;

    bool operator==(const EquivalenceReport&) const = default;
};

inline EquivalenceReport check_equivalence(const MomentSet& m, double margin_tol = 1e-9,
                                           double hypothesis_tol = 1e-12) {
    EquivalenceReport r;
    r.c1 = sign_of(m.y);
    r.c2 = sign_of(m.cov_idd_sd * m.cov_idd_sd - m.cov_idd_td * m.cov_idd_td);
    r.c3 = sign_of(m.var_sd - m.var_td);
    r.c4_sq = sign_of(m.e_sd2 - m.e_td2);
    r.c4_abs = sign_of(m.e_abs_sd - m.e_abs_td);
    r.margin = std::abs(m.y);
    r.hypotheses_ok = check_hypotheses(m, hypothesis_tol).all();
    r.applicable = r.hypotheses_ok && r.margin > margin_tol;
    r.all_agree_proved =
        r.applicable && r.c1 != 0 && r.c1 == r.c2 && r.c1 == r.c3 && r.c1 == r.c4_sq;
    r.abs_variant_agrees = r.c4_abs == r.c4_sq;
    return r;
}

// --- generative domain space ------------------------------------------------

enum class PairMode : std::uint8_t {
    IndependentWithReplacement,  // all n^2 ordered pairs, diagonal included
    DistinctOrderedPairs,        // all n(n-1) ordered pairs with s != t
};

constexpr std::string_view to_string(PairMode m) {
    return m == PairMode::IndependentWithReplacement ? "replacement" : "distinct";
}

/// Deterministic score model over n domains:
///   SS = base - delta_s
///   TT = base - delta_t
///   ST = base - w_s*delta_s - w_t*delta_t - penalty(s,t)     for s != t
/// Diagonal pairs collapse to the in-domain score.
struct DomainSpace {
    double base = 0.0;
    std::vector<double> difficulty;       // delta per domain
    std::vector<double> transfer_penalty; // row-major n*n, >= 0, diagonal unused
    double weight_source = 0.5;           // w_s
    double weight_target = 0.5;           // w_t

    std::size_t size() const { return difficulty.size(); }

    double in_domain(std::size_t d) const { return base - difficulty[d]; }

    double cross_domain(std::size_t s, std::size_t t) const {
        if (s == t) return in_domain(s);
        return base - weight_source * difficulty[s] - weight_target * difficulty[t] -
               transfer_penalty[s * size() + t];
    }

    void validate() const {
        if (size() < 2) raise(Errc::too_few_domains, "domain space needs n >= 2");
        if (transfer_penalty.size() != size() * size()) {
            raise(Errc::invalid_config, "transfer penalty matrix must be n*n");
        }
        for (double p : transfer_penalty) {
            if (!(p >= 0.0)) raise(Errc::invalid_config, "transfer penalties must be >= 0");
        }
        if (!std::isfinite(weight_source) || !std::isfinite(weight_target) ||
            !std::isfinite(base)) {
            raise(Errc::invalid_config, "non-finite domain space parameter");
        }
        for (double d : difficulty) {
            if (!std::isfinite(d)) raise(Errc::invalid_config, "non-finite difficulty");
        }
    }
};

/// Enumerates the ordered pairs of a domain space into a uniform joint.
inline DiscreteJoint build_domain_space_joint(const DomainSpace& space, PairMode mode) {
    space.validate();
    const std::size_t n = space.size();
    DiscreteJoint joint;
    const bool with_diagonal = mode == PairMode::IndependentWithReplacement;
    const std::size_t pairs = with_diagonal ? n * n : n * (n - 1);
    const double prob = 1.0 / static_cast<double>(pairs);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = 0; t < n; ++t) {
            if (!with_diagonal && s == t) continue;
            joint.atoms.push_back(
                {space.in_domain(s), space.in_domain(t), space.cross_domain(s, t), prob});
        }
    }
    return joint;
}

/// Generator + sampler parameters for the Monte Carlo route.
struct SimConfig {
    std::size_t n_domains = 4;
    double base = 0.0;
    double difficulty_mean = 0.0;  // mu_delta
    double difficulty_sd = 2.0;    // sigma_delta
    double penalty_sd = 1.5;       // half-normal scale of transfer penalties
    double weight_source = 0.35;   // w_s
    double weight_target = 0.65;   // w_t
    double noise_sd = 0.0;         // per-observation score noise
    PairMode pair_mode = PairMode::IndependentWithReplacement;
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    std::size_t workers = 1;

    void validate() const {
        if (n_domains < 2) raise(Errc::invalid_config, "n_domains must be >= 2");
        if (trials < 2) raise(Errc::invalid_config, "trials must be >= 2");
        if (!(difficulty_sd >= 0.0) || !(penalty_sd >= 0.0) || !(noise_sd >= 0.0)) {
            raise(Errc::invalid_config, "sigma parameters must be >= 0");
        }
        if (!std::isfinite(weight_source) || !std::isfinite(weight_target) ||
            !std::isfinite(base) || !std::isfinite(difficulty_mean)) {
            raise(Errc::invalid_config, "non-finite generator parameter");
        }
        if (workers < 1) raise(Errc::invalid_config, "workers must be >= 1");
    }
};

/// Draws difficulties and penalties for the configured space shape.
inline DomainSpace make_domain_space(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    SplitMix64 rng(seed ^ 0xd1f3a9b5c7e20481ULL);
    DomainSpace space;
    space.base = config.base;
    space.weight_source = config.weight_source;
    space.weight_target = config.weight_target;
    space.difficulty.resize(config.n_domains);
    for (auto& d : space.difficulty) d = rng.normal(config.difficulty_mean, config.difficulty_sd);
    space.transfer_penalty.assign(config.n_domains * config.n_domains, 0.0);
    for (std::size_t s = 0; s < config.n_domains; ++s) {
        for (std::size_t t = 0; t < config.n_domains; ++t) {
            if (s == t) continue;
            space.transfer_penalty[s * config.n_domains + t] =
                std::abs(rng.normal(0.0, config.penalty_sd));
        }
    }
    return space;
}

struct TrialSample {
    double ss = 0.0, tt = 0.0, st = 0.0;
};

/// One trial, a pure function of (config, space, trial index). Shared by the
/// simulator and the trace exporter so both see identical draws.
inline TrialSample draw_trial(const DomainSpace& space, const SimConfig& config,
                              std::uint64_t trial_index) {
    SplitMix64 rng(config.seed, trial_index);
    const std::size_t n = space.size();
    const auto s = static_cast<std::size_t>(rng.below(n));
    std::size_t t;
    if (config.pair_mode == PairMode::DistinctOrderedPairs) {
        t = static_cast<std::size_t>(rng.below(n - 1));
        if (t >= s) ++t;
    } else {
        t = static_cast<std::size_t>(rng.below(n));
    }
    TrialSample sample{space.in_domain(s), space.in_domain(t), space.cross_domain(s, t)};
    if (config.noise_sd > 0.0) {
        sample.ss += rng.normal(0.0, config.noise_sd);
        sample.tt += rng.normal(0.0, config.noise_sd);
        sample.st += rng.normal(0.0, config.noise_sd);
    }
    return sample;
}

namespace detail {

// Per-block accumulator of centered sums. Blocks have a fixed extent, so the
// reduction order never depends on how blocks were assigned to workers.
inline constexpr std::uint64_t kBlockTrials = 8192;

struct BlockSums {
    double ss = 0, tt = 0, st = 0;
    double ss2 = 0, tt2 = 0, st2 = 0;
    double ss_tt = 0, ss_st = 0, tt_st = 0;
    double abs_sd = 0, abs_td = 0;
};

inline BlockSums accumulate_block(const DomainSpace& space, const SimConfig& config,
                                  std::uint64_t begin, std::uint64_t end) {
    BlockSums b;
    const double c = space.base;
    for (std::uint64_t i = begin; i < end; ++i) {
        const auto s = draw_trial(space, config, i);
        const double ss = s.ss - c, tt = s.tt - c, st = s.st - c;
        b.ss += ss;
        b.tt += tt;
        b.st += st;
        b.ss2 += ss * ss;
        b.tt2 += tt * tt;
        b.st2 += st * st;
        b.ss_tt += ss * tt;
        b.ss_st += ss * st;
        b.tt_st += tt * st;
        b.abs_sd += std::abs(ss - st);
        b.abs_td += std::abs(tt - st);
    }
    return b;
}

}  // namespace detail

struct SimResult {
    MomentSet moments;  // sample moments over the drawn trials
    EquivalenceReport equivalence;
    std::uint64_t trials = 0;
    std::size_t workers = 1;
    DomainSpace space;
};

/// Seeded Monte Carlo over the generated domain space. Trials are split into
/// fixed-extent blocks claimed by workers; block partials are merged in block
/// order, so results are bit-identical for any worker count.
inline SimResult simulate(const SimConfig& config) {
    config.validate();
    const DomainSpace space = make_domain_space(config, config.seed);

    const std::uint64_t n_blocks =
        (config.trials + detail::kBlockTrials - 1) / detail::kBlockTrials;
    std::vector<detail::BlockSums> blocks(static_cast<std::size_t>(n_blocks));

    const std::size_t workers = std::max<std::size_t>(1, config.workers);
    std::atomic<std::uint64_t> next{0};
    const auto work = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            const std::uint64_t begin = b * detail::kBlockTrials;
            const std::uint64_t end = std::min(config.trials, begin + detail::kBlockTrials);
            blocks[static_cast<std::size_t>(b)] =
                detail::accumulate_block(space, config, begin, end);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // fixed-order merge
    drkit::detail::Accumulator ss, tt, st, ss2, tt2, st2, ss_tt, ss_st, tt_st, abs_sd, abs_td;
    for (const auto& b : blocks) {
        ss.add(b.ss);
        tt.add(b.tt);
        st.add(b.st);
        ss2.add(b.ss2);
        tt2.add(b.tt2);
        st2.add(b.st2);
        ss_tt.add(b.ss_tt);
        ss_st.add(b.ss_st);
        tt_st.add(b.tt_st);
        abs_sd.add(b.abs_sd);
        abs_td.add(b.abs_td);
    }

    const double n = static_cast<double>(config.trials);
    const double c = space.base;
    const double s_ss = ss.value(), s_tt = tt.value(), s_st = st.value();
    const double s_ss2 = ss2.value(), s_tt2 = tt2.value(), s_st2 = st2.value();
    const double s_ss_tt = ss_tt.value(), s_ss_st = ss_st.value(), s_tt_st = tt_st.value();

    const auto var_of = [&](double sum, double sum2) {
        return (sum2 - sum * sum / n) / (n - 1.0);
    };
    const auto cov_of = [&](double sum_a, double sum_b, double sum_ab) {
        return (sum_ab - sum_a * sum_b / n) / (n - 1.0);
    };

    MomentSet m;
    m.e_ss = c + s_ss / n;
    m.e_tt = c + s_tt / n;
    m.e_st = c + s_st / n;
    m.var_ss = var_of(s_ss, s_ss2);
    m.var_tt = var_of(s_tt, s_tt2);
    m.var_st = var_of(s_st, s_st2);
    m.cov_ss_tt = cov_of(s_ss, s_tt, s_ss_tt);
    m.cov_ss_st = cov_of(s_ss, s_st, s_ss_st);
    m.cov_tt_st = cov_of(s_tt, s_st, s_tt_st);
    m.x = m.var_ss;
    m.y = m.cov_tt_st - m.cov_ss_st;
    m.e_sd = (s_ss - s_st) / n;
    m.e_td = (s_tt - s_st) / n;
    // SD = SS - ST and IDD = SS - TT are shift-free, so their sums expand
    // bilinearly from the centered sums.
    const double s_sd = s_ss - s_st, s_td = s_tt - s_st, s_idd = s_ss - s_tt;
    const double s_sd2 = s_ss2 - 2.0 * s_ss_st + s_st2;
    const double s_td2 = s_tt2 - 2.0 * s_tt_st + s_st2;
    const double s_idd_sd = s_ss2 - s_ss_st - s_ss_tt + s_tt_st;
    const double s_idd_td = s_ss_tt - s_ss_st - s_tt2 + s_tt_st;
    m.var_sd = var_of(s_sd, s_sd2);
    m.var_td = var_of(s_td, s_td2);
    m.cov_idd_sd = cov_of(s_idd, s_sd, s_idd_sd);
    m.cov_idd_td = cov_of(s_idd, s_td, s_idd_td);
    m.e_sd2 = s_sd2 / n;
    m.e_td2 = s_td2 / n;
    m.e_abs_sd = abs_sd.value() / n;
    m.e_abs_td = abs_td.value() / n;
    m.e_ss_st = c * c + c * (s_ss + s_st) / n + s_ss_st / n;
    m.e_tt_st = c * c + c * (s_tt + s_st) / n + s_tt_st / n;
    m.cross_gap = c * (s_tt - s_ss) / n + (s_tt_st - s_ss_st) / n;

    SimResult result;
    result.moments = m;
    result.equivalence = check_equivalence(m);
    result.trials = config.trials;
    result.workers = workers;
    result.space = space;
    return result;
}

// --- randomized equivalence sweep -------------------------------------------

struct SweepConfig {
    SimConfig generator;          // space shape; trials/workers unused here
    std::uint64_t first_seed = 1;
    std::size_t joints = 1000;    // joints with margin > margin_tol to collect
    double identity_tol = 1e-12;
    double margin_tol = 1e-9;
    std::size_t max_attempts_factor = 16;
};

struct SweepOutcome {
    std::size_t joints_generated = 0;
    std::size_t asserted = 0;          // hypotheses ok and margin > margin_tol
    std::size_t sign_agreements = 0;   // among asserted
    std::size_t identity_failures = 0;
    std::size_t hypothesis_failures = 0;
    std::size_t below_margin = 0;
    std::size_t abs_disagreements = 0;  // c4_abs vs c4_sq among asserted
    double min_margin_asserted = 0.0;
    double max_identity_residual = 0.0;

    bool all_ok() const {
        return asserted > 0 && sign_agreements == asserted && identity_failures == 0 &&
               hypothesis_failures == 0;
    }
};

/// Generates randomized domain-space joints until `joints` of them clear the
/// margin gate, checking identities and sign agreement on each.
inline SweepOutcome equivalence_sweep(const SweepConfig& sweep) {
    SweepOutcome out;
    const std::size_t max_attempts = sweep.joints * sweep.max_attempts_factor;
    std::uint64_t seed = sweep.first_seed;
    bool first_asserted = true;
    while (out.asserted < sweep.joints && out.joints_generated < max_attempts) {
        SimConfig gen = sweep.generator;
        gen.seed = seed++;
        const auto space = make_domain_space(gen, gen.seed);
        const auto joint = build_domain_space_joint(space, gen.pair_mode);
        const auto m = exact_moments(joint);
        ++out.joints_generated;

        if (!check_hypotheses(m, sweep.identity_tol).all()) {
            ++out.hypothesis_failures;
            continue;
        }
        const auto ids = verify_identities(m, sweep.identity_tol);
        out.max_identity_residual = std::max(out.max_identity_residual, ids.max_residual);
        if (!ids.all_checked_pass()) ++out.identity_failures;

        const auto eq = check_equivalence(m, sweep.margin_tol, sweep.identity_tol);
        if (!eq.applicable) {
            ++out.below_margin;
            continue;
        }
        ++out.asserted;
        if (eq.all_agree_proved) ++out.sign_agreements;
        if (!eq.abs_variant_agrees) ++out.abs_disagreements;
        if (first_asserted || eq.margin < out.min_margin_asserted) {
            out.min_margin_asserted = eq.margin;
            first_asserted = false;
        }
    }
    return out;
}

}  // namespace drkit::theorem
