#include <doctest.h>

#include <cmath>
#include <random>

#include "sdgame/analysis/structural_break.hpp"

using namespace sdgame::analysis;

namespace {

// Residual sum of squares of y on (1, t) over rounds [lo, hi).
double rss(const std::vector<double>& y, int lo, int hi) {
    double n = hi - lo, st = 0, sy = 0, stt = 0, sty = 0;
    for (int i = lo; i < hi; ++i) {
        const double t = i + 1;
        st += t;
        sy += y[i];
        stt += t * t;
        sty += t * y[i];
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    const double icept = (sy - slope * st) / n;
    double r = 0;
    for (int i = lo; i < hi; ++i) {
        const double e = y[i] - icept - slope * (i + 1);
        r += e * e;
    }
    return r;
}

double wald_at(const std::vector<double>& y, int tau) {
    const int T = static_cast<int>(y.size());
    const double restricted = rss(y, 0, T);
    const double unrestricted = rss(y, 0, tau - 1) + rss(y, tau - 1, T);
    return (restricted - unrestricted) / (unrestricted / (T - 4));
}

}  // namespace

TEST_SUITE("break") {

TEST_CASE("noiseless step at round 21") {
    std::vector<double> y(40, 0.5);
    for (int t = 20; t < 40; ++t) y[t] = 0.9;
    const auto r = sup_wald_break(y);
    CHECK(r.break_round == 21);
    CHECK(std::isinf(r.statistic));
    CHECK(r.p_value == doctest::Approx(1.0 / 1000.0));
}

TEST_CASE("Wald statistics agree with separate regressions") {
    std::mt19937 gen(4);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<double> y(40);
    for (int t = 0; t < 40; ++t) y[t] = (t < 25 ? 0.3 : 0.6) + 0.002 * t + noise(gen);
    const auto r = sup_wald_break(y, {4, 199, 3});
    REQUIRE(r.candidates.size() == r.wald.size());
    CHECK(r.candidates.front() == 5);
    CHECK(r.candidates.back() == 37);
    double best = -1;
    int arg = 0;
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        const double w = wald_at(y, r.candidates[i]);
        CHECK(r.wald[i] == doctest::Approx(w).epsilon(1e-9));
        if (w > best) {
            best = w;
            arg = r.candidates[i];
        }
    }
    CHECK(r.break_round == arg);
    CHECK(r.break_round == 26);
    CHECK(r.statistic == doctest::Approx(best));
    CHECK(r.p_value < 0.01);
}

TEST_CASE("no break in pure noise most of the time") {
    std::mt19937 gen(8);
    std::normal_distribution<double> noise(0.5, 0.1);
    int rejections = 0;
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> y(40);
        for (auto& v : y) v = noise(gen);
        rejections += sup_wald_break(y, {4, 199, static_cast<std::uint64_t>(rep)}).p_value < 0.05;
    }
    CHECK(rejections <= 8);
}

TEST_CASE("flat series and determinism") {
    const std::vector<double> flat(40, 0.4);
    const auto r = sup_wald_break(flat);
    CHECK(r.break_round == 0);
    CHECK(r.p_value == 1.0);

    std::vector<double> y(40);
    for (int t = 0; t < 40; ++t) y[t] = std::sin(t * 0.7) * 0.1 + (t >= 18 ? 0.2 : 0.0);
    const auto a = sup_wald_break(y, {4, 99, 5});
    const auto b = sup_wald_break(y, {4, 99, 5});
    CHECK(a.p_value == b.p_value);
    CHECK(a.statistic == b.statistic);
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(sup_wald_break(std::vector<double>(9, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(sup_wald_break(std::vector<double>(40, 0.0), {1, 10, 1}), std::invalid_argument);
    CHECK_THROWS_AS(sup_wald_break(std::vector<double>(12, 0.0), {7, 10, 1}), std::invalid_argument);
    CHECK_THROWS_AS(sup_wald_break(std::vector<double>(40, 0.0), {4, -1, 1}), std::invalid_argument);
}

}
