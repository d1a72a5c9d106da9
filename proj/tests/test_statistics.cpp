#include "drkit/statistics.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "drkit/rng.hpp"
#include "oracles.hpp"

using drkit::Errc;
using drkit::Error;
using namespace drkit::stats;

namespace {
std::vector<double> random_series(drkit::SplitMix64& rng, std::size_t n, double lo, double hi) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.uniform(lo, hi);
    return xs;
}
}  // namespace

TEST_CASE("spearman on monotone series") {
    CHECK(spearman(std::vector{1.0, 2.0, 3.0}, std::vector{10.0, 20.0, 30.0}) == 1.0);
    CHECK(spearman(std::vector{1.0, 2.0, 3.0}, std::vector{30.0, 20.0, 10.0}) == -1.0);
}

TEST_CASE("spearman hand case") {
    const std::vector<double> xs{1, 2, 3, 4}, ys{2, 1, 4, 3};
    // rank vectors are (1,2,3,4) and (2,1,4,3); Pearson over them is 0.6
    CHECK_THAT(spearman(xs, ys), Catch::Matchers::WithinAbs(0.6, 1e-12));
    CHECK_THAT(spearman(xs, ys), Catch::Matchers::WithinAbs(oracle::spearman(xs, ys), 1e-12));
}

TEST_CASE("spearman ties use average ranks") {
    const auto r = fractional_ranks(std::vector{3.0, 1.0, 3.0, 2.0});
    CHECK(r == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("spearman rejects constant series") {
    CHECK_THROWS_MATCHES(spearman(std::vector{1.0, 1.0, 1.0}, std::vector{1.0, 2.0, 3.0}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::constant_input;
                         }));
}

TEST_CASE("spearman is invariant under increasing transforms") {
    drkit::SplitMix64 rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        const auto xs = random_series(rng, 20, -5.0, 5.0);
        const auto ys = random_series(rng, 20, -5.0, 5.0);
        auto tx = xs;
        for (auto& v : tx) v = std::exp(v);  // strictly increasing
        auto ty = ys;
        for (auto& v : ty) v = 3.0 * v + 11.0;
        CHECK_THAT(spearman(tx, ty), Catch::Matchers::WithinAbs(spearman(xs, ys), 1e-12));
    }
}

TEST_CASE("pearson exact affine relations") {
    const std::vector<double> xs{0.5, 1.5, 2.0, 9.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(2.0 * x + 3.0);
    CHECK_THAT(pearson(xs, ys), Catch::Matchers::WithinAbs(1.0, 1e-15));
    for (auto& y : ys) y = -y;
    CHECK_THAT(pearson(xs, ys), Catch::Matchers::WithinAbs(-1.0, 1e-15));
}

TEST_CASE("pearson hand case") {
    CHECK_THAT(pearson(std::vector{0.0, 1.0, 2.0}, std::vector{0.0, 1.0, 0.0}),
               Catch::Matchers::WithinAbs(0.0, 1e-15));
}

TEST_CASE("pearson matches brute-force definition on random data") {
    drkit::SplitMix64 rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        const auto xs = random_series(rng, 15, 0.0, 100.0);
        const auto ys = random_series(rng, 15, 0.0, 100.0);
        CHECK_THAT(pearson(xs, ys), Catch::Matchers::WithinAbs(oracle::pearson(xs, ys), 1e-12));
    }
}

TEST_CASE("pearson sign flips under affine maps") {
    drkit::SplitMix64 rng(13);
    const auto xs = random_series(rng, 25, -1.0, 1.0);
    const auto ys = random_series(rng, 25, -1.0, 1.0);
    const double base = pearson(xs, ys);
    auto ax = xs;
    for (auto& v : ax) v = -2.5 * v + 1.0;
    auto cy = ys;
    for (auto& v : cy) v = 4.0 * v - 7.0;
    CHECK_THAT(pearson(ax, cy), Catch::Matchers::WithinAbs(-base, 1e-12));
}

TEST_CASE("r_squared perfect fit and degenerate y") {
    const std::vector<double> xs{1, 2, 3, 4};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.0 * x - 1.0);
    CHECK_THAT(r_squared(xs, ys), Catch::Matchers::WithinAbs(1.0, 1e-15));
    CHECK(r_squared(xs, std::vector{5.0, 5.0, 5.0, 5.0}) == 1.0);
    CHECK_THROWS_MATCHES(r_squared(std::vector{2.0, 2.0, 2.0}, std::vector{1.0, 2.0, 3.0}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::constant_predictor;
                         }));
}

TEST_CASE("r_squared hand case equals pearson squared") {
    const std::vector<double> xs{1, 2, 3, 4}, ys{1, 3, 2, 5};
    const double r2 = r_squared(xs, ys);
    CHECK_THAT(r2, Catch::Matchers::WithinAbs(0.6914285714285714, 1e-12));
    CHECK_THAT(r2, Catch::Matchers::WithinAbs(oracle::r_squared_ols(xs, ys), 1e-12));
    const double r = pearson(xs, ys);
    CHECK_THAT(r2, Catch::Matchers::WithinAbs(r * r, 1e-12));
}

TEST_CASE("r_squared equals pearson squared on random samples") {
    drkit::SplitMix64 rng(17);
    for (int iter = 0; iter < 1000; ++iter) {
        const auto xs = random_series(rng, 10, 0.0, 50.0);
        const auto ys = random_series(rng, 10, 0.0, 50.0);
        const double r = pearson(xs, ys);
        CHECK_THAT(r_squared(xs, ys), Catch::Matchers::WithinAbs(r * r, 1e-10));
    }
}

TEST_CASE("mean_abs_deviation") {
    const std::vector<double> a{1.0, 2.0}, b{0.0, 4.0};
    CHECK(mean_abs_deviation(a, a) == 0.0);
    CHECK(mean_abs_deviation(a, b) == 1.5);
    CHECK_THROWS_MATCHES(mean_abs_deviation(a, std::vector{1.0}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::length_mismatch;
                         }));
    CHECK_THROWS_MATCHES(mean_abs_deviation(std::vector<double>{}, std::vector<double>{}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::empty_input;
                         }));
}

TEST_CASE("mean_abs_deviation is zero iff series are identical") {
    drkit::SplitMix64 rng(19);
    for (int iter = 0; iter < 50; ++iter) {
        auto a = random_series(rng, 8, -10.0, 10.0);
        auto b = a;
        CHECK(mean_abs_deviation(a, b) == 0.0);
        b[static_cast<std::size_t>(rng.below(8))] += 0.5;
        CHECK(mean_abs_deviation(a, b) > 0.0);
    }
}

TEST_CASE("sample variance and covariance") {
    const std::vector<double> c{4.0, 4.0, 4.0};
    CHECK(sample_var(c) == 0.0);

    drkit::SplitMix64 rng(23);
    const auto xs = random_series(rng, 12, 0.0, 100.0);
    auto neg = xs;
    for (auto& v : neg) v = -v;
    CHECK_THAT(sample_cov(xs, xs), Catch::Matchers::WithinAbs(sample_var(xs), 1e-9));
    CHECK_THAT(sample_cov(xs, neg), Catch::Matchers::WithinAbs(-sample_var(xs), 1e-9));
    CHECK_THAT(sample_var(xs), Catch::Matchers::WithinAbs(oracle::sample_var(xs), 1e-9));

    CHECK_THROWS_MATCHES(sample_var(std::vector{1.0}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::insufficient_data;
                         }));
}

TEST_CASE("regularized gamma against frozen reference values") {
    // chi-square upper tails, reference values from an independent
    // implementation of the distribution function.
    const struct {
        double stat;
        unsigned df;
        double expected;
    } cases[] = {
        {0.0, 5, 1.0},
        {1.5, 5, 0.9130698145443954},
        {5.0, 5, 0.4158801869955079},
        {11.07, 5, 0.050009618622405425},
        {25.0, 5, 0.0001393337911856263},
        {3.0, 1, 0.08326451666355042},
        {7.81, 3, 0.05010605635000589},
    };
    for (const auto& c : cases) {
        CHECK_THAT(chi_square_p_value(c.stat, c.df),
                   Catch::Matchers::WithinAbs(c.expected, 1e-10));
    }
    // extreme tail stays finite and tiny
    CHECK(chi_square_p_value(600.0, 1) < 1e-100);
    CHECK(chi_square_p_value(600.0, 1) > 0.0);
}

TEST_CASE("chi-square p-values match numeric integration oracle") {
    drkit::SplitMix64 rng(29);
    for (int iter = 0; iter < 60; ++iter) {
        const unsigned df = 1 + static_cast<unsigned>(rng.below(12));
        const double stat = rng.uniform(0.05, 40.0);
        CHECK_THAT(chi_square_p_value(stat, df),
                   Catch::Matchers::WithinAbs(oracle::chi2_upper_tail(stat, df), 1e-9));
    }
}

TEST_CASE("chi-square p-value decreases in the statistic") {
    double prev = 1.0;
    for (double stat = 0.5; stat < 60.0; stat += 0.5) {
        const double p = chi_square_p_value(stat, 5);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("chi_square_uniform closed forms") {
    const std::vector<std::uint64_t> even{10, 10, 10, 10, 10, 10};
    auto r = chi_square_uniform(even);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(r.df == 5);
    CHECK_FALSE(r.reject);

    // all N observations in one of six categories: statistic = 5N
    const std::uint64_t n = 600;
    const std::vector<std::uint64_t> lump{n, 0, 0, 0, 0, 0};
    r = chi_square_uniform(lump);
    CHECK_THAT(r.statistic, Catch::Matchers::WithinAbs(5.0 * static_cast<double>(n), 1e-9));
    CHECK(r.reject);

    // k = 2, counts (N, 0): statistic = N, df = 1
    const std::vector<std::uint64_t> two{n, 0};
    r = chi_square_uniform(two);
    CHECK_THAT(r.statistic, Catch::Matchers::WithinAbs(static_cast<double>(n), 1e-9));
    CHECK(r.df == 1);

    CHECK_THROWS_MATCHES(chi_square_uniform(std::vector<std::uint64_t>{5}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::empty_counts;
                         }));
    CHECK_THROWS_MATCHES(chi_square_uniform(std::vector<std::uint64_t>{0, 0, 0}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == Errc::all_zero;
                         }));
}

TEST_CASE("chi_square_gof with non-uniform expected probabilities") {
    // grouped scenario categories: expected (2,2,1,1)/6
    const std::vector<std::uint64_t> counts{200, 200, 100, 100};
    const std::vector<double> probs{2.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    const auto r = chi_square_gof(counts, probs);
    CHECK_THAT(r.statistic, Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK(r.df == 3);
}

TEST_CASE("bonferroni") {
    CHECK_THAT(bonferroni(0.05, 14), Catch::Matchers::WithinAbs(0.0035714285714285718, 1e-15));
    CHECK(std::round(bonferroni(0.05, 14) * 1e4) / 1e4 == 0.0036);
    CHECK(bonferroni(0.05, 1) == 0.05);
    CHECK(bonferroni(0.10, 2) == 0.05);
}

TEST_CASE("chi-square rejection rate is calibrated under the uniform null") {
    // 10,000 simulated trials of 600 draws over 6 categories at alpha = 0.05.
    drkit::SplitMix64 rng(2024);
    const int trials = 10000;
    int rejected = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<std::uint64_t> counts(6, 0);
        for (int i = 0; i < 600; ++i) ++counts[rng.below(6)];
        if (chi_square_uniform(counts, 0.05).reject) ++rejected;
    }
    const double rate = static_cast<double>(rejected) / trials;
    CHECK(rate >= 0.04);
    CHECK(rate <= 0.06);
}
