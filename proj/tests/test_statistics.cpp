#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "llmpso/errors.hpp"
#include "llmpso/statistics.hpp"
#include "test_support.hpp"

using namespace llmpso;

TEST_CASE("t quantiles") {
    CHECK(student_t_quantile(0.95, 2) == doctest::Approx(4.302652730).epsilon(1e-9));
    CHECK(student_t_quantile(0.95, 9) == doctest::Approx(2.262157163).epsilon(1e-9));
    for (int dof = 1; dof <= 30; ++dof) {
        CHECK(student_t_quantile(0.95, dof) ==
              doctest::Approx(testing::t975_reference(dof)).epsilon(1e-7));
    }
}

TEST_CASE("confidence intervals from three runs") {
    const std::vector<double> rmse{0.1343, 0.1344, 0.1358};
    const auto a = summarize(rmse);
    CHECK(a.n == 3);
    CHECK(std::abs(a.ci_low - 0.1327) <= 1e-4);
    CHECK(std::abs(a.ci_high - 0.1369) <= 1e-4);

    const std::vector<double> acc{0.8515, 0.8587, 0.8521};
    const auto b = summarize(acc);
    CHECK(std::abs(b.ci_low - 0.8442) <= 1e-4);
    CHECK(std::abs(b.ci_high - 0.8640) <= 1e-4);
}

TEST_CASE("single sample is degenerate") {
    const std::vector<double> one{5.0};
    const auto s = summarize(one);
    CHECK(s.degenerate);
    CHECK(s.mean == 5.0);
    CHECK(s.std == 0.0);
    CHECK(s.ci_low == 5.0);
    CHECK(s.ci_high == 5.0);
}

TEST_CASE("constant samples give a zero-width interval") {
    const std::vector<double> same{2.0, 2.0, 2.0, 2.0};
    const auto s = summarize(same);
    CHECK_FALSE(s.degenerate);
    CHECK(s.ci_low == 2.0);
    CHECK(s.ci_high == 2.0);
}

TEST_CASE("invalid samples") {
    CHECK_THROWS_AS(summarize(std::vector<double>{}), config_error);
    CHECK_THROWS_AS(summarize(std::vector<double>{1.0, std::nan("")}), config_error);
    CHECK_THROWS_AS(summarize(std::vector<double>{1.0, INFINITY}), config_error);
}

TEST_CASE("summaries match textbook formulas on random samples") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> size(2, 30);
    std::normal_distribution<double> value(100.0, 25.0);
    std::map<int, double> t975;
    for (int round = 0; round < 300; ++round) {
        const int n = size(rng);
        std::vector<double> x(n);
        for (auto& v : x) v = value(rng);

        double sum = 0.0;
        for (double v : x) sum += v;
        const double mean = sum / n;
        double ss = 0.0;
        for (double v : x) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / (n - 1));
        if (!t975.contains(n - 1)) t975[n - 1] = testing::t975_reference(n - 1);
        const double half = t975[n - 1] * sd / std::sqrt(static_cast<double>(n));

        const auto s = summarize(x);
        CHECK(std::abs(s.mean - mean) <= 1e-9);
        CHECK(std::abs(s.std - sd) <= 1e-9);
        CHECK(std::abs(s.ci_low - (mean - half)) <= 1e-9);
        CHECK(std::abs(s.ci_high - (mean + half)) <= 1e-9);
        CHECK(s.ci_low <= s.mean);
        CHECK(s.mean <= s.ci_high);
        CHECK(s.samples == x);
    }
}
