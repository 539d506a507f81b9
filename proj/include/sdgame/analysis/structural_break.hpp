#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sdgame::analysis {

struct BreakOptions {
    int trim = 4;             // minimum observations in each regime
    int permutations = 999;
    std::uint64_t seed = 1;
};

struct BreakResult {
    int break_round = 0;      // first round of the second regime; 0 for a flat series
    double statistic = 0.0;   // sup-Wald; +inf when the split fits exactly
    double p_value = 1.0;
    std::vector<int> candidates;
    std::vector<double> wald;  // per candidate

    nlohmann::json to_json() const;
};

// Regresses the series on the round number (1-based) and tests for one
// break in intercept and slope at an unknown round. Candidate breaks leave
// at least `trim` rounds in each regime. The p value is the share of
// round permutations whose sup-Wald reaches the observed one, counting the
// observed series itself. Throws std::invalid_argument for fewer than 10
// rounds or a trim below 2.
BreakResult sup_wald_break(std::span<const double> series, const BreakOptions& options = {});

}  // namespace sdgame::analysis
