#include "llmpso/statistics.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "llmpso/errors.hpp"

namespace llmpso {

double student_t_quantile(double confidence, double dof) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw config_error("confidence must be in (0, 1)");
    if (!(dof > 0.0)) throw config_error("degrees of freedom must be positive");
    const boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 1.0 - (1.0 - confidence) / 2.0);
}

TrialStatistics summarize(std::span<const double> samples, double confidence) {
    if (samples.empty()) throw config_error("cannot summarize an empty sample");
    for (double x : samples) {
        if (!std::isfinite(x)) throw config_error("cannot summarize a non-finite sample");
    }

    TrialStatistics s;
    s.samples.assign(samples.begin(), samples.end());
    s.n = samples.size();
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(s.n);

    if (s.n == 1) {
        s.degenerate = true;
        s.ci_low = s.ci_high = s.mean;
        return s;
    }

    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));

    const double half = student_t_quantile(confidence, static_cast<double>(s.n - 1)) * s.std /
                        std::sqrt(static_cast<double>(s.n));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    return s;
}

}  // namespace llmpso
