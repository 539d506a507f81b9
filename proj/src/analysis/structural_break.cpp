#include "sdgame/analysis/structural_break.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sdgame/rng.hpp"

namespace sdgame::analysis {

namespace {

// Residual sum of squares of the least-squares line through
// (t, y[t]) for t in [begin, end), with t the 1-based round.
double line_rss(std::span<const double> y, std::size_t begin, std::size_t end) {
    const double n = static_cast<double>(end - begin);
    double mx = 0.0, my = 0.0;
    for (auto t = begin; t < end; ++t) {
        mx += static_cast<double>(t + 1);
        my += y[t];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto t = begin; t < end; ++t) {
        const double dx = static_cast<double>(t + 1) - mx, dy = y[t] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    return std::max(0.0, syy - (sxx > 0.0 ? sxy * sxy / sxx : 0.0));
}

struct Scan {
    std::vector<double> wald;
    std::size_t argmax = 0;
    double sup = 0.0;
};

Scan scan(std::span<const double> y, const std::vector<int>& candidates, double tss) {
    const std::size_t T = y.size();
    const double restricted = line_rss(y, 0, T);
    const double df = static_cast<double>(T) - 4.0;
    Scan s;
    s.wald.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto tau = static_cast<std::size_t>(candidates[i]);
        double w = 0.0;
        if (tss > 0.0) {
            const double unrestricted = line_rss(y, 0, tau - 1) + line_rss(y, tau - 1, T);
            if (unrestricted <= 1e-12 * tss) {
                w = restricted - unrestricted > 1e-12 * tss ? std::numeric_limits<double>::infinity() : 0.0;
            } else {
                w = std::max(0.0, restricted - unrestricted) / (unrestricted / df);
            }
        }
        s.wald.push_back(w);
        if (i == 0 || w > s.sup) {
            s.sup = w;
            s.argmax = i;
        }
    }
    return s;
}

}  // namespace

nlohmann::json BreakResult::to_json() const {
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json("inf"); };
    nlohmann::json w = nlohmann::json::array();
    for (double x : wald) w.push_back(num(x));
    return {{"break_round", break_round}, {"statistic", num(statistic)}, {"p_value", p_value},
            {"candidates", candidates},   {"wald", w}};
}

BreakResult sup_wald_break(std::span<const double> series, const BreakOptions& options) {
    const int T = static_cast<int>(series.size());
    if (T < 10) throw std::invalid_argument("structural break test needs at least 10 rounds");
    if (options.trim < 2) throw std::invalid_argument("trim must leave at least 2 rounds per regime");
    if (T < 2 * options.trim) throw std::invalid_argument("series too short for the trimming window");
    if (options.permutations < 0) throw std::invalid_argument("permutation count must be non-negative");

    BreakResult r;
    for (int tau = options.trim + 1; tau <= T - options.trim + 1; ++tau) r.candidates.push_back(tau);

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= T;
    double tss = 0.0;
    for (double v : series) tss += (v - mean) * (v - mean);

    const auto observed = scan(series, r.candidates, tss);
    r.wald = observed.wald;
    r.statistic = observed.sup;
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (*hi - *lo <= 1e-12) {
        r.break_round = 0;
        r.p_value = 1.0;
        return r;
    }
    r.break_round = r.candidates[observed.argmax];

    Rng rng(options.seed);
    std::vector<double> shuffled(series.begin(), series.end());
    int reached = 0;
    for (int k = 0; k < options.permutations; ++k) {
        rng.shuffle(std::span<double>(shuffled));
        const double sup = scan(shuffled, r.candidates, tss).sup;
        // Relative slack absorbs rounding between equivalent orderings.
        if (sup >= observed.sup * (1.0 - 1e-12)) ++reached;
    }
    r.p_value = static_cast<double>(1 + reached) / static_cast<double>(1 + options.permutations);
    return r;
}

}  // namespace sdgame::analysis
