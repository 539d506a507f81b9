#include <doctest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "sdgame/analysis/tests.hpp"
#include "stats_oracle.hpp"

using namespace sdgame::analysis;

namespace {

const char* const kAlts[] = {"two-sided", "greater", "less"};

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("Mann-Whitney exact branch matches enumeration") {
    std::mt19937 gen(1);
    for (int trial = 0; trial < 400; ++trial) {
        const int n1 = 1 + static_cast<int>(gen() % 6), n2 = 1 + static_cast<int>(gen() % 6);
        std::vector<double> x(n1), y(n2);
        for (auto& v : x) v = static_cast<double>(gen() % 5);
        for (auto& v : y) v = static_cast<double>(gen() % 5);
        for (const char* alt : kAlts) {
            const auto r = mann_whitney_u(x, y, alternative_from_string(alt));
            CAPTURE(trial);
            CAPTURE(alt);
            CHECK(r.exact);
            CHECK(r.statistic == oracle::mw_u(x, y));
            CHECK(r.p_value == doctest::Approx(oracle::mw_p(x, y, alt)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Wilcoxon exact branch matches sign enumeration") {
    std::mt19937 gen(2);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 9);
        std::vector<double> a(n), b(n), d(n);
        for (int i = 0; i < n; ++i) {
            a[i] = static_cast<double>(gen() % 5);
            b[i] = static_cast<double>(gen() % 5);
            d[i] = a[i] - b[i];
        }
        if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0; })) {
            CHECK_THROWS_AS(wilcoxon_signed_rank(a, b, Alternative::TwoSided), std::invalid_argument);
            continue;
        }
        for (const char* alt : kAlts) {
            const auto r = wilcoxon_signed_rank(a, b, alternative_from_string(alt));
            CAPTURE(trial);
            CHECK(r.exact);
            auto nz = d;
            nz.erase(std::remove(nz.begin(), nz.end(), 0.0), nz.end());
            CHECK(r.statistic == oracle::wsr_w(nz));
            CHECK(r.p_value == doctest::Approx(oracle::wsr_p(d, alt)).epsilon(1e-12));
        }
    }
}

TEST_CASE("small exact values") {
    const std::vector<double> a = {1, 2}, b = {3, 4};
    const auto r = mann_whitney_u(a, b, Alternative::Less);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0 / 6.0));
    CHECK(mann_whitney_u(a, b, Alternative::TwoSided).p_value == doctest::Approx(2.0 / 6.0));
    CHECK(mann_whitney_u(a, b, Alternative::Greater).p_value == doctest::Approx(1.0));

    const std::vector<double> hi = {5, 6, 7, 8, 9}, lo = {1, 2, 3, 4, 5.5};
    const auto w = wilcoxon_signed_rank(hi, lo, Alternative::Greater);
    CHECK(w.statistic == 15.0);
    CHECK(w.p_value == doctest::Approx(1.0 / 32.0));
    CHECK(wilcoxon_signed_rank(hi, lo, Alternative::TwoSided).p_value == doctest::Approx(2.0 / 32.0));
}

// Reference values from an independent statistics package (normal
// approximation with tie and continuity corrections).
TEST_CASE("normal approximations") {
    const std::vector<double> x = {0.1, 0.35, 0.4, 0.4, 0.55, 0.6, 0.7, 0.75, 0.8, 0.95, 0.3, 0.45, 0.5};
    const std::vector<double> y = {0.05, 0.2, 0.25, 0.4, 0.4, 0.3, 0.35, 0.5, 0.15, 0.6, 0.22, 0.1};
    const double mw_ref[] = {0.012096417661950869, 0.0060482088309754345, 0.9948243765066492};
    for (int i = 0; i < 3; ++i) {
        const auto r = mann_whitney_u(x, y, alternative_from_string(kAlts[i]));
        CHECK(!r.exact);
        CHECK(r.statistic == 124.5);
        CHECK(r.p_value == doctest::Approx(mw_ref[i]).epsilon(1e-9));
    }

    const std::vector<double> a = {0.5, 0.6, 0.7, 0.2, 0.9, 0.4, 0.45, 0.8, 0.3, 0.65, 0.55, 0.75, 0.85, 0.35, 0.6, 0.5, 0.7};
    const std::vector<double> b = {0.4, 0.5, 0.75, 0.1, 0.6, 0.4, 0.3, 0.6, 0.35, 0.5, 0.5, 0.5, 0.6, 0.4, 0.3, 0.45, 0.2};
    const double wsr_ref[] = {0.0026722162702315856, 0.0013361081351157928, 0.998874337894047};
    for (int i = 0; i < 3; ++i) {
        const auto r = wilcoxon_signed_rank(a, b, alternative_from_string(kAlts[i]));
        CHECK(!r.exact);
        CHECK(r.n1 == 17);  // pairs, including the one zero difference
        CHECK(r.statistic == 126.5);
        CHECK(r.p_value == doctest::Approx(wsr_ref[i]).epsilon(1e-9));
    }

    const double pt_ref[] = {0.0015327592952492307, 0.0007663796476246154, 0.9992336203523754};
    const double ut_ref[] = {0.007875414964862224, 0.003937707482431112, 0.996062292517569};
    for (int i = 0; i < 3; ++i) {
        const auto pt = t_test(a, b, true, alternative_from_string(kAlts[i]));
        CHECK(pt.method == "PT");
        CHECK(pt.statistic == doctest::Approx(3.8122033965729196).epsilon(1e-12));
        CHECK(pt.p_value == doctest::Approx(pt_ref[i]).epsilon(1e-9));
        const auto ut = t_test(x, y, false, alternative_from_string(kAlts[i]));
        CHECK(ut.method == "UT");
        CHECK(ut.statistic == doctest::Approx(2.9281872754842957).epsilon(1e-12));
        CHECK(ut.p_value == doctest::Approx(ut_ref[i]).epsilon(1e-9));
    }
}

TEST_CASE("t statistic by hand") {
    // d = {1, 2, 3}: mean 2, sd 1, t = 2 / (1 / sqrt 3).
    const std::vector<double> a = {2, 4, 6}, b = {1, 2, 3};
    CHECK(t_test(a, b, true, Alternative::TwoSided).statistic == doctest::Approx(2.0 * std::sqrt(3.0)));
    // Welch with equal sizes and variances: (6 - 2) / sqrt(1/3 + 1/3) with var 1.
    const std::vector<double> x = {5, 6, 7}, y = {1, 2, 3};
    CHECK(t_test(x, y, false, Alternative::TwoSided).statistic == doctest::Approx(4.0 / std::sqrt(2.0 / 3.0)));
}

TEST_CASE("degenerate inputs") {
    const std::vector<double> same = {0.5, 0.5, 0.5};
    const auto t = t_test(same, same, true, Alternative::TwoSided);
    CHECK(t.statistic == 0.0);
    CHECK(t.p_value == 1.0);
    CHECK(t_test(same, same, false, Alternative::Greater).p_value == 0.5);
    const std::vector<double> shifted = {0.7, 0.7, 0.7};
    CHECK_THROWS_AS(t_test(shifted, same, true, Alternative::TwoSided), std::domain_error);
    CHECK_THROWS_AS(t_test(std::vector<double>{1}, std::vector<double>{2}, false, Alternative::TwoSided),
                    std::invalid_argument);
    CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, same, Alternative::TwoSided), std::invalid_argument);
    CHECK_THROWS_AS(wilcoxon_signed_rank(same, std::vector<double>{1, 2}, Alternative::TwoSided),
                    std::invalid_argument);
    // All-tied Mann-Whitney: no evidence either way.
    CHECK(mann_whitney_u(same, same, Alternative::TwoSided).p_value == doctest::Approx(1.0));
}

TEST_CASE("naming and JSON") {
    CHECK(to_string(Alternative::Greater) == "greater");
    CHECK(alternative_from_string("two-sided") == Alternative::TwoSided);
    CHECK_THROWS(alternative_from_string("sideways"));
    const auto j = mann_whitney_u(std::vector<double>{1, 2}, std::vector<double>{3, 4}, Alternative::Less).to_json();
    CHECK(j.at("method") == "MW");
    CHECK(j.at("alternative") == "less");
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975));
}

}
