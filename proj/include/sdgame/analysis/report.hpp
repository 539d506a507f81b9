#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdgame/analysis/convergence.hpp"
#include "sdgame/analysis/panel.hpp"
#include "sdgame/analysis/structural_break.hpp"
#include "sdgame/analysis/tests.hpp"

namespace sdgame::analysis {

// One line of the group-level hypothesis table. Sample 1 and sample 2 are
// named in `hypothesis` ("Fine vs nudge", ...); deltas are sample 1 minus
// sample 2.
struct ReportRow {
    int part_no = 0;
    std::string part_title;
    std::string hypothesis;
    std::string contagion;  // "all" or e.g. "15%"
    std::string position;   // "all", a role, or "--"
    Alternative alternative = Alternative::TwoSided;
    std::string test;       // MW, WSR, UT, PT
    std::size_t n = 0;      // observations in sample 1
    std::size_t n2 = 0;
    double delta_mean = 0.0;
    double delta_median = 0.0;
    std::optional<TestResult> result;
    std::string note;       // why no result, when there is none

    std::string significance() const;
    nlohmann::json to_json() const;
};

struct TableOptions {
    RoundWindow window{11, 20};
    bool parametric = false;  // UT / PT instead of MW / WSR
};

std::vector<ReportRow> hypothesis_table(const DecisionPanel& panel, const TableOptions& options = {});
std::string render_table(const std::vector<ReportRow>& rows, const std::string& caption);

struct BreakRow {
    std::string subset;
    std::size_t groups = 0;
    BreakResult result;
};

// Break tests on the per-round mean distancing of all groups, of each
// intervention, and of each network-by-intervention cell.
std::vector<BreakRow> break_table(const DecisionPanel& panel, const BreakOptions& options = {});

struct AnalyzeOptions {
    RoundWindow window{11, 20};
    int k = 4;
    int a = 2;
    BreakOptions breaks;
};

struct AnalysisReport {
    std::size_t groups = 0;
    std::vector<ReportRow> main;
    std::vector<ReportRow> all_rounds;   // robustness: full parts
    std::vector<ReportRow> parametric;   // robustness: t-tests
    std::vector<BreakRow> breaks;
    ConvergenceReport convergence;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

AnalysisReport analyze_panel(const DecisionPanel& panel, const AnalyzeOptions& options = {});

}  // namespace sdgame::analysis
