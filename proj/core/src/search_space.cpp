#include "llmpso/search_space.hpp"

#include <algorithm>
#include <cmath>

#include "llmpso/errors.hpp"

namespace llmpso {

double default_velocity_limit(double min, double max) {
    return std::max(1.0, 0.2 * (max - min));
}

SearchSpace::SearchSpace(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) {
        throw config_error("search space has no axes");
    }
    for (const auto& axis : axes_) {
        if (!std::isfinite(axis.min) || !std::isfinite(axis.max) || !(axis.min < axis.max)) {
            throw config_error("axis '" + axis.name + "': min must be below max");
        }
        if (!std::isfinite(axis.v_max) || !(axis.v_max > 0.0)) {
            throw config_error("axis '" + axis.name + "': v_max must be positive");
        }
        if (axis.integral && (axis.min != std::round(axis.min) || axis.max != std::round(axis.max))) {
            throw config_error("axis '" + axis.name + "': integral axis needs integer bounds");
        }
    }
}

SearchSpace SearchSpace::neurons_layers(int min_neurons, int max_neurons, int min_layers,
                                        int max_layers) {
    return SearchSpace({
        Axis{"neurons", double(min_neurons), double(max_neurons),
             default_velocity_limit(min_neurons, max_neurons), true},
        Axis{"layers", double(min_layers), double(max_layers),
             default_velocity_limit(min_layers, max_layers), true},
    });
}

SearchSpace SearchSpace::rastrigin(std::size_t dims) {
    if (dims == 0) throw config_error("rastrigin needs at least one dimension");
    std::vector<Axis> axes;
    axes.reserve(dims);
    for (std::size_t k = 0; k < dims; ++k) {
        axes.push_back(Axis{"x" + std::to_string(k + 1), -5.12, 5.12,
                            default_velocity_limit(-5.12, 5.12), false});
    }
    return SearchSpace(std::move(axes));
}

bool SearchSpace::all_integral() const noexcept {
    return std::all_of(axes_.begin(), axes_.end(), [](const Axis& a) { return a.integral; });
}

std::size_t SearchSpace::find(const std::string& name) const noexcept {
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        if (axes_[k].name == name) return k;
    }
    return axes_.size();
}

void SearchSpace::clip(std::span<double> position) const {
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        position[k] = std::clamp(position[k], axes_[k].min, axes_[k].max);
    }
}

void SearchSpace::clamp_velocity(std::span<double> velocity) const {
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        velocity[k] = std::clamp(velocity[k], -axes_[k].v_max, axes_[k].v_max);
    }
}

std::vector<double> SearchSpace::to_candidate(std::span<const double> position) const {
    if (position.size() != axes_.size()) {
        throw config_error("position has " + std::to_string(position.size()) +
                           " components, space has " + std::to_string(axes_.size()));
    }
    std::vector<double> candidate(position.begin(), position.end());
    clip(candidate);
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        // halves round away from zero
        if (axes_[k].integral) candidate[k] = std::round(candidate[k]);
    }
    return candidate;
}

bool SearchSpace::contains(std::span<const double> position) const {
    if (position.size() != axes_.size()) return false;
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        if (!(position[k] >= axes_[k].min && position[k] <= axes_[k].max)) return false;
    }
    return true;
}

}  // namespace llmpso
