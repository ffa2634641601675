#include "llmpso/objective.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "llmpso/errors.hpp"

namespace llmpso {

double rastrigin(std::span<const double> x, double a) {
    double sum = a * static_cast<double>(x.size());
    for (double xi : x) {
        if (!(xi >= -5.12 && xi <= 5.12)) {
            throw domain_error("rastrigin argument outside [-5.12, 5.12]: " + std::to_string(xi));
        }
        sum += xi * xi - a * std::cos(2.0 * std::numbers::pi * xi);
    }
    return sum;
}

double synthetic_landscape(int layers, int neurons) {
    if (layers < 2 || layers > 5) {
        throw domain_error("layers outside [2, 5]: " + std::to_string(layers));
    }
    if (neurons < 2 || neurons > 200) {
        throw domain_error("neurons outside [2, 200]: " + std::to_string(neurons));
    }
    const double l = layers - 3.0;
    const double n = (neurons - 120.0) / 200.0;
    const double s = std::sin(std::numbers::pi * neurons / 20.0);
    return 0.13 + 0.01 * (l * l / 9.0) + 0.01 * n * n + 0.002 * s * s;
}

double RastriginObjective::cost(std::span<const double> candidate) {
    return rastrigin(candidate, a_);
}

SyntheticObjective::SyntheticObjective(const SearchSpace& space)
    : layers_axis_(space.find("layers")), neurons_axis_(space.find("neurons")) {
    if (layers_axis_ == space.size() || neurons_axis_ == space.size()) {
        throw config_error("synthetic objective needs 'layers' and 'neurons' axes");
    }
}

double SyntheticObjective::cost(std::span<const double> candidate) {
    return synthetic_landscape(static_cast<int>(std::lround(candidate[layers_axis_])),
                               static_cast<int>(std::lround(candidate[neurons_axis_])));
}

ObjectiveHandle::ObjectiveHandle(std::unique_ptr<Objective> objective, SearchSpace space)
    : objective_(std::move(objective)), space_(std::move(space)) {
    if (!objective_) throw config_error("objective handle needs an objective");
}

Evaluation ObjectiveHandle::evaluate(std::span<const double> position) {
    Evaluation e;
    e.candidate = space_.to_candidate(position);
    const auto start = std::chrono::steady_clock::now();
    e.cost = objective_->cost(e.candidate);
    e.wall_time = std::chrono::steady_clock::now() - start;
    if (!std::isfinite(e.cost)) {
        throw evaluation_error(objective_->kind() + " returned a non-finite cost");
    }
    eval_count_.fetch_add(1);
    return e;
}

std::vector<Evaluation> ObjectiveHandle::evaluate_batch(
    const std::vector<std::vector<double>>& positions, bool parallel) {
    const std::size_t n = positions.size();
    std::vector<Evaluation> results(n);
    std::vector<std::exception_ptr> failures(n);

    const std::size_t threads =
        std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (parallel && threads > 1 && objective_->reentrant()) {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    results[i] = evaluate(positions[i]);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        };
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                results[i] = evaluate(positions[i]);
            } catch (...) {
                failures[i] = std::current_exception();
                break;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i]) continue;
        std::string message;
        try {
            std::rethrow_exception(failures[i]);
        } catch (const std::exception& ex) {
            message = ex.what();
        } catch (...) {
            message = "unknown failure";
        }
        throw step_error("evaluation of particle " + std::to_string(i) + " failed: " + message, i,
                         failures[i]);
    }
    return results;
}

GridScan scan_grid(ObjectiveHandle& objective) {
    const SearchSpace& space = objective.space();
    if (!space.all_integral()) throw config_error("grid scan needs an all-integral search space");

    GridScan scan;
    scan.cost = std::numeric_limits<double>::infinity();
    std::vector<double> point(space.size());
    for (std::size_t k = 0; k < space.size(); ++k) point[k] = space[k].min;

    // odometer over axes, last axis fastest
    while (true) {
        const Evaluation e = objective.evaluate(point);
        ++scan.points;
        if (e.cost < scan.cost) {
            scan.cost = e.cost;
            scan.argmin = e.candidate;
        }
        std::size_t k = space.size();
        while (k > 0) {
            --k;
            if (point[k] < space[k].max) {
                point[k] += 1.0;
                break;
            }
            point[k] = space[k].min;
            if (k == 0) return scan;
        }
    }
}

}  // namespace llmpso
