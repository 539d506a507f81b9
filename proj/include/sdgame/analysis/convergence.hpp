#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdgame/analysis/panel.hpp"

namespace sdgame::analysis {

// Strategy families a subject may settle on within one part.
//   Constant:    the same action every round.
//   Complement:  one action as superspreader, the other when peripheral.
//   Alternating: a fixed action as superspreader; when peripheral the action
//                flips between successive peripheral rounds.
// The last two exist only for star roles.
enum class Pattern { Constant, Complement, Alternating };

std::string to_string(Pattern p);
Pattern pattern_from_string(const std::string& s);

inline const std::vector<Pattern> kAllPatterns = {Pattern::Constant, Pattern::Complement, Pattern::Alternating};

struct ConvergenceResult {
    bool converged = false;
    int round = 0;                  // 1-based within the part; 0 if not converged
    std::optional<Pattern> pattern;
    bool action = false;            // constant action, or the superspreader action
    int phase = 0;                  // alternating: action in the first peripheral round

    nlohmann::json to_json() const;
};

// Earliest round n >= k such that rounds n-k+1..n follow one strategy and no
// later run of consecutive deviations from it exceeds a. Candidates tie-break
// by pattern order (constant, complement, alternating), then by action Yes
// before No, then phase. `decisions` and `roles` cover one part.
ConvergenceResult detect_convergence(std::span<const bool> decisions, std::span<const NodeRole> roles, int k, int a,
                                     const std::vector<Pattern>& patterns = kAllPatterns);

// share[t-1] = fraction of results converged by round t, t = 1..rounds.
std::vector<double> convergence_share_by_round(const std::vector<ConvergenceResult>& results, int rounds);

struct ConvergenceRow {
    Part part = Part::Baseline;
    std::string network;       // "all", "complete", "star"
    std::string intervention;  // "all", "fine", "nudge"
    std::size_t n = 0;
    std::optional<int> round_over_80;  // first round with more than 80% converged
    double percent_by_11 = 0.0;
    std::vector<double> share_by_round;
};

struct ConvergenceReport {
    int k = 4;
    int a = 2;
    // Indexed [group][subject][part].
    std::vector<std::vector<std::array<ConvergenceResult, 2>>> subjects;
    std::vector<ConvergenceRow> rows;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

ConvergenceReport convergence_report(const DecisionPanel& panel, int k = 4, int a = 2);

}  // namespace sdgame::analysis
