#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "tabaudit/error.hpp"
#include "tabaudit/stats.hpp"

namespace tabaudit::stats {

namespace {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    std::size_t n = 0;
};

Moments moments(std::span<const double> xs) {
    Moments m;
    m.n = xs.size();
    if (m.n == 0) return m;
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(m.n);
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = m.n > 1 ? ss / static_cast<double>(m.n - 1) : 0.0;
    return m;
}

}  // namespace

TTestResult welch_t_test(std::span<const double> xs, std::span<const double> ys, Alternative alternative) {
    if (xs.size() < 2 || ys.size() < 2) throw DegenerateSample("welch t-test needs at least two values per sample");
    const Moments x = moments(xs);
    const Moments y = moments(ys);
    const double vx = x.variance / static_cast<double>(x.n);
    const double vy = y.variance / static_cast<double>(y.n);
    if (vx + vy <= 0.0) throw DegenerateSample("welch t-test on two constant samples");

    TTestResult r;
    r.alternative = alternative;
    r.t_statistic = (x.mean - y.mean) / std::sqrt(vx + vy);
    r.degrees_of_freedom = (vx + vy) * (vx + vy) /
                           (vx * vx / static_cast<double>(x.n - 1) + vy * vy / static_cast<double>(y.n - 1));

    const boost::math::students_t dist(r.degrees_of_freedom);
    if (alternative == Alternative::TwoSided) {
        r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t_statistic)));
    } else {
        r.p_value = boost::math::cdf(boost::math::complement(dist, r.t_statistic));
    }
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    return r;
}

double one_sided_p(std::span<const double> xs, std::span<const double> ys) {
    try {
        return welch_t_test(xs, ys, Alternative::Greater).p_value;
    } catch (const DegenerateSample&) {
        if (xs.empty() || ys.empty()) return 1.0;
        const double mx = moments(xs).mean;
        const double my = moments(ys).mean;
        return mx > my ? 0.0 : 1.0;
    }
}

double binomial_upper_p(std::size_t successes, std::size_t n, double p) {
    if (successes == 0) return 1.0;
    if (successes > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
    return boost::math::cdf(boost::math::complement(dist, static_cast<double>(successes - 1)));
}

Interval wilson_interval(std::size_t successes, std::size_t n, double level) {
    Interval out;
    out.level = level;
    if (n == 0) return out;
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    out.low = successes == 0 ? 0.0 : std::max(0.0, center - half);
    out.high = successes == n ? 1.0 : std::min(1.0, center + half);
    return out;
}

}  // namespace tabaudit::stats
