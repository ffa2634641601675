#pragma once

#include <span>
#include <string>
#include <vector>

namespace llmpso {

struct Axis {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    double v_max = 1.0;  ///< velocity clamp, in units of the axis
    bool integral = false;
};

/// Velocity clamp for an axis of the given range: max(1, 0.2 * (max - min)).
double default_velocity_limit(double min, double max);

/// Ordered set of axes. Positions and velocities are indexed by axis.
class SearchSpace {
public:
    SearchSpace() = default;

    /// Throws config_error naming the first invalid axis.
    explicit SearchSpace(std::vector<Axis> axes);

    /// Neurons in [2, 200] and layers in [2, 5], in that order.
    static SearchSpace neurons_layers(int min_neurons = 2, int max_neurons = 200,
                                      int min_layers = 2, int max_layers = 5);

    /// n real axes over [-5.12, 5.12].
    static SearchSpace rastrigin(std::size_t dims = 2);

    std::size_t size() const noexcept { return axes_.size(); }
    const Axis& operator[](std::size_t k) const { return axes_[k]; }
    const std::vector<Axis>& axes() const noexcept { return axes_; }
    bool all_integral() const noexcept;

    /// Index of the axis with this name, or size() if absent.
    std::size_t find(const std::string& name) const noexcept;

    /// Clip to [min, max] on every axis. Positions stay real-valued.
    void clip(std::span<double> position) const;
    void clamp_velocity(std::span<double> velocity) const;

    /// Clip, then round integral axes to the nearest integer.
    std::vector<double> to_candidate(std::span<const double> position) const;

    bool contains(std::span<const double> position) const;

private:
    std::vector<Axis> axes_;
};

}  // namespace llmpso
