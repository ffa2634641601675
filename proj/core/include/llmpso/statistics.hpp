#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace llmpso {

struct TrialStatistics {
    std::vector<double> samples;
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation (n - 1)
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
    /// n == 1: std is undefined, reported as 0 with a zero-width interval.
    bool degenerate = false;

    bool operator==(const TrialStatistics&) const = default;
};

/// Two-sided Student-t quantile t(1 - alpha/2, dof).
double student_t_quantile(double confidence, double dof);

/// Mean, sample std and the 95% Student-t interval.
/// Throws config_error on an empty or non-finite sample.
TrialStatistics summarize(std::span<const double> samples, double confidence = 0.95);

}  // namespace llmpso
