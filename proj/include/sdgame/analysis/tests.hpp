#pragma once

#include <span>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace sdgame::analysis {

// Greater: sample 1 tends to exceed sample 2 (for paired data, the first
// member of each pair exceeds the second). Less is the mirror image.
enum class Alternative { TwoSided, Greater, Less };

std::string to_string(Alternative a);
Alternative alternative_from_string(const std::string& s);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    Alternative alternative = Alternative::TwoSided;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::string method;  // "MW", "WSR", "UT", "PT"
    bool exact = false;

    nlohmann::json to_json() const;
};

inline constexpr std::size_t kMannWhitneyExactLimit = 12;   // n1 + n2
inline constexpr std::size_t kWilcoxonExactLimit = 15;      // non-zero pairs

// U counts pairs with sample1 > sample2 (ties count one half). Exact
// permutation distribution (with mid-ranks) when n1 + n2 <= 12; otherwise
// the normal approximation with tie and continuity corrections.
// Throws std::invalid_argument on an empty sample.
TestResult mann_whitney_u(std::span<const double> sample1, std::span<const double> sample2,
                          Alternative alternative);

// Differences first - second; zero differences are dropped. The statistic
// is W+, the rank sum of positive differences. Exact sign enumeration when
// at most 15 differences remain. Throws std::invalid_argument when the
// samples differ in length or every difference is zero.
TestResult wilcoxon_signed_rank(std::span<const double> first, std::span<const double> second,
                                Alternative alternative);

// Student t: paired on first - second, or Welch's unpaired test.
// Zero variance with zero mean difference gives t = 0; zero variance with
// a non-zero difference throws std::domain_error.
TestResult t_test(std::span<const double> sample1, std::span<const double> sample2, bool paired,
                  Alternative alternative);

double normal_cdf(double z);

}  // namespace sdgame::analysis
