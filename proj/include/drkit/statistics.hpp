#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "drkit/detail/sum.hpp"
#include "drkit/error.hpp"

namespace drkit::stats {

namespace detail {

inline void require_paired(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        raise(Errc::length_mismatch, "series lengths differ (" + std::to_string(xs.size()) +
                                         " vs " + std::to_string(ys.size()) + ")");
    }
    if (xs.empty()) raise(Errc::empty_input, "empty series");
}

inline bool is_constant(std::span<const double> xs) {
    return std::ranges::all_of(xs, [&](double v) { return v == xs.front(); });
}

}  // namespace detail

inline double mean(std::span<const double> xs) {
    if (xs.empty()) raise(Errc::empty_input, "mean of empty series");
    return drkit::detail::mean(xs);
}

/// Unbiased sample variance (n-1 denominator), two-pass.
inline double sample_var(std::span<const double> xs) {
    if (xs.size() < 2) raise(Errc::insufficient_data, "variance needs n >= 2");
    const double m = drkit::detail::mean(xs);
    drkit::detail::Accumulator acc;
    for (double x : xs) acc.add((x - m) * (x - m));
    return acc.value() / static_cast<double>(xs.size() - 1);
}

/// Unbiased sample covariance (n-1 denominator), two-pass.
inline double sample_cov(std::span<const double> xs, std::span<const double> ys) {
    detail::require_paired(xs, ys);
    if (xs.size() < 2) raise(Errc::insufficient_data, "covariance needs n >= 2");
    const double mx = drkit::detail::mean(xs);
    const double my = drkit::detail::mean(ys);
    drkit::detail::Accumulator acc;
    for (std::size_t i = 0; i < xs.size(); ++i) acc.add((xs[i] - mx) * (ys[i] - my));
    return acc.value() / static_cast<double>(xs.size() - 1);
}

inline double sample_std(std::span<const double> xs) { return std::sqrt(sample_var(xs)); }

/// Pearson correlation coefficient. Both series must be non-constant.
inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    detail::require_paired(xs, ys);
    if (xs.size() < 2) raise(Errc::insufficient_data, "correlation needs n >= 2");
    if (detail::is_constant(xs) || detail::is_constant(ys)) {
        raise(Errc::constant_input, "correlation of a constant series is undefined");
    }
    const double r = sample_cov(xs, ys) / (sample_std(xs) * sample_std(ys));
    return std::clamp(r, -1.0, 1.0);
}

/// Fractional ranks (1-based), ties get the average of the ranks they span.
inline std::vector<double> fractional_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rank correlation: Pearson over fractional (average-tie) ranks.
/// Exactly +/-1 when the rank vectors agree or mirror each other, so strictly
/// monotone inputs are not at the mercy of sqrt rounding.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
    detail::require_paired(xs, ys);
    if (xs.size() < 2) raise(Errc::insufficient_data, "correlation needs n >= 2");
    const auto rx = fractional_ranks(xs);
    const auto ry = fractional_ranks(ys);
    if (detail::is_constant(rx) || detail::is_constant(ry)) {
        raise(Errc::constant_input, "rank correlation of a constant series is undefined");
    }
    bool agree = true, mirror = true;
    const double flip = static_cast<double>(rx.size()) + 1.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        agree = agree && rx[i] == ry[i];
        mirror = mirror && rx[i] == flip - ry[i];
    }
    if (agree) return 1.0;
    if (mirror) return -1.0;
    return pearson(rx, ry);
}

/// Coefficient of determination of the least-squares fit of y on x,
/// R^2 = 1 - SSE/SST. A constant y is reproduced exactly by the fit, so it
/// yields 1.0; a constant x leaves the regression undefined.
inline double r_squared(std::span<const double> xs, std::span<const double> ys) {
    detail::require_paired(xs, ys);
    if (xs.size() < 2) raise(Errc::insufficient_data, "regression needs n >= 2");
    if (detail::is_constant(xs)) {
        raise(Errc::constant_predictor, "regression on a constant predictor is undefined");
    }
    if (detail::is_constant(ys)) return 1.0;
    const double mx = drkit::detail::mean(xs);
    const double my = drkit::detail::mean(ys);
    drkit::detail::Accumulator sxx, sxy, syy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx.add((xs[i] - mx) * (xs[i] - mx));
        sxy.add((xs[i] - mx) * (ys[i] - my));
        syy.add((ys[i] - my) * (ys[i] - my));
    }
    const double slope = sxy.value() / sxx.value();
    drkit::detail::Accumulator sse;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double resid = (ys[i] - my) - slope * (xs[i] - mx);
        sse.add(resid * resid);
    }
    return std::clamp(1.0 - sse.value() / syy.value(), 0.0, 1.0);
}

/// Mean absolute elementwise deviation between two equal-length series.
inline double mean_abs_deviation(std::span<const double> as, std::span<const double> bs) {
    detail::require_paired(as, bs);
    drkit::detail::Accumulator acc;
    for (std::size_t i = 0; i < as.size(); ++i) acc.add(std::abs(as[i] - bs[i]));
    return acc.value() / static_cast<double>(as.size());
}

/// Bonferroni-adjusted significance level for m comparisons.
inline double bonferroni(double alpha, unsigned m) {
    if (!(alpha > 0.0 && alpha < 1.0)) raise(Errc::invalid_config, "alpha must be in (0,1)");
    if (m < 1) raise(Errc::invalid_config, "m must be >= 1");
    return alpha / static_cast<double>(m);
}

// --- regularized incomplete gamma -----------------------------------------
//
// P(a,x) by series for x < a+1, Q(a,x) by continued fraction (modified Lentz)
// otherwise. Self-contained so chi-square p-values are bit-reproducible;
// absolute error is well below the 1e-10 the callers rely on.

namespace detail {

inline double gamma_p_series(double a, double x) {
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return std::exp(log_prefix) * sum;
}

inline double gamma_q_continued_fraction(double a, double x) {
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefix) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(x)) {
        raise(Errc::invalid_config, "regularized_gamma_p needs a > 0, x >= 0");
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_continued_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || !std::isfinite(x)) {
        raise(Errc::invalid_config, "regularized_gamma_q needs a > 0, x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_continued_fraction(a, x);
}

/// Chi-square survival function: P(X > statistic) for X ~ chi2(df).
inline double chi_square_p_value(double statistic, unsigned df) {
    if (df < 1) raise(Errc::invalid_config, "chi-square df must be >= 1");
    if (statistic < 0.0) raise(Errc::invalid_config, "chi-square statistic must be >= 0");
    return regularized_gamma_q(static_cast<double>(df) / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
    double statistic = 0.0;
    unsigned df = 0;
    double p_value = 1.0;
    double alpha = 0.05;
    double alpha_adjusted = 0.05;
    bool reject = false;

    bool operator==(const ChiSquareResult&) const = default;
};

/// Goodness-of-fit test of observed counts against category probabilities.
/// `expected_probs` must sum to ~1 with every entry positive.
inline ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts,
                                      std::span<const double> expected_probs,
                                      double alpha = 0.05, unsigned comparisons = 1) {
    if (counts.size() < 2) raise(Errc::empty_counts, "need at least 2 categories");
    if (counts.size() != expected_probs.size()) {
        raise(Errc::length_mismatch, "counts and expected_probs lengths differ");
    }
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) raise(Errc::all_zero, "all counts are zero");
    double prob_total = 0.0;
    for (double p : expected_probs) {
        if (!(p > 0.0)) raise(Errc::invalid_config, "expected probabilities must be positive");
        prob_total += p;
    }
    if (std::abs(prob_total - 1.0) > 1e-9) {
        raise(Errc::invalid_config, "expected probabilities must sum to 1");
    }

    drkit::detail::Accumulator acc;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = static_cast<double>(total) * expected_probs[i];
        const double diff = static_cast<double>(counts[i]) - expected;
        acc.add(diff * diff / expected);
    }

    ChiSquareResult r;
    r.statistic = acc.value();
    r.df = static_cast<unsigned>(counts.size() - 1);
    r.p_value = chi_square_p_value(r.statistic, r.df);
    r.alpha = alpha;
    r.alpha_adjusted = bonferroni(alpha, comparisons);
    r.reject = r.p_value < r.alpha_adjusted;
    return r;
}

/// Goodness-of-fit against the uniform distribution over k categories.
inline ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts,
                                          double alpha = 0.05, unsigned comparisons = 1) {
    if (counts.size() < 2) raise(Errc::empty_counts, "need at least 2 categories");
    const std::vector<double> uniform(counts.size(), 1.0 / static_cast<double>(counts.size()));
    return chi_square_gof(counts, uniform, alpha, comparisons);
}

}  // namespace drkit::stats
