#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "sdgame/analysis/tests.hpp"

namespace sdgame::analysis {

namespace {

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // unbiased
};

Moments moments(std::span<const double> xs) {
    Moments m;
    const double n = static_cast<double>(xs.size());
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
    return m;
}

double t_p_value(double t, double df, Alternative alt) {
    const boost::math::students_t dist(df);
    switch (alt) {
        case Alternative::Greater: return boost::math::cdf(boost::math::complement(dist, t));
        case Alternative::Less: return boost::math::cdf(dist, t);
        case Alternative::TwoSided: return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
    }
    return 1.0;
}

TestResult finish(double diff, double se, double df, Alternative alt) {
    TestResult r;
    r.alternative = alt;
    if (se == 0.0) {
        if (diff != 0.0) throw std::domain_error("t-test: zero variance with a non-zero mean difference");
        r.statistic = 0.0;
        r.p_value = alt == Alternative::TwoSided ? 1.0 : 0.5;
        return r;
    }
    r.statistic = diff / se;
    r.p_value = t_p_value(r.statistic, df, alt);
    return r;
}

}  // namespace

TestResult t_test(std::span<const double> sample1, std::span<const double> sample2, bool paired,
                  Alternative alternative) {
    TestResult r;
    if (paired) {
        if (sample1.size() != sample2.size()) throw std::invalid_argument("paired t-test needs equal-length samples");
        if (sample1.size() < 2) throw std::invalid_argument("paired t-test needs at least two pairs");
        std::vector<double> d(sample1.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = sample1[i] - sample2[i];
        const auto m = moments(d);
        const double n = static_cast<double>(d.size());
        r = finish(m.mean, std::sqrt(m.var / n), n - 1.0, alternative);
        r.method = "PT";
    } else {
        if (sample1.size() < 2 || sample2.size() < 2)
            throw std::invalid_argument("unpaired t-test needs at least two observations per sample");
        const auto a = moments(sample1), b = moments(sample2);
        const double n1 = static_cast<double>(sample1.size()), n2 = static_cast<double>(sample2.size());
        const double va = a.var / n1, vb = b.var / n2;
        const double se = std::sqrt(va + vb);
        // Welch-Satterthwaite degrees of freedom.
        const double df = se > 0.0 ? (va + vb) * (va + vb) / (va * va / (n1 - 1.0) + vb * vb / (n2 - 1.0)) : n1 + n2 - 2.0;
        r = finish(a.mean - b.mean, se, df, alternative);
        r.method = "UT";
    }
    r.n1 = sample1.size();
    r.n2 = sample2.size();
    return r;
}

}  // namespace sdgame::analysis
