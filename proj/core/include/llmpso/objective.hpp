#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "llmpso/search_space.hpp"

namespace llmpso {

/// A cost function over candidates of a search space. Lower is better.
/// Candidates passed to cost() are already clipped and rounded.
class Objective {
public:
    virtual ~Objective() = default;

    virtual std::string kind() const = 0;
    /// True when cost() may be called concurrently.
    virtual bool reentrant() const = 0;
    virtual double cost(std::span<const double> candidate) = 0;
};

struct Evaluation {
    std::vector<double> candidate;
    double cost = 0.0;
    std::chrono::nanoseconds wall_time{0};
};

/// A*n + sum(x_i^2 - A*cos(2*pi*x_i)). Throws domain_error outside [-5.12, 5.12].
double rastrigin(std::span<const double> x, double a = 10.0);

/// Deterministic multimodal stand-in for a train-and-score cost over
/// (layers, neurons). Unique grid minimum 0.13 at (3, 120).
/// Throws domain_error outside layers [2, 5], neurons [2, 200].
double synthetic_landscape(int layers, int neurons);

class RastriginObjective final : public Objective {
public:
    explicit RastriginObjective(double a = 10.0) : a_(a) {}
    std::string kind() const override { return "rastrigin"; }
    bool reentrant() const override { return true; }
    double cost(std::span<const double> candidate) override;

private:
    double a_;
};

/// Reads the "layers" and "neurons" axes of the space it was built for.
class SyntheticObjective final : public Objective {
public:
    explicit SyntheticObjective(const SearchSpace& space);
    std::string kind() const override { return "synthetic"; }
    bool reentrant() const override { return true; }
    double cost(std::span<const double> candidate) override;

private:
    std::size_t layers_axis_;
    std::size_t neurons_axis_;
};

/// Owns an objective together with its search space and counts evaluations.
class ObjectiveHandle {
public:
    ObjectiveHandle(std::unique_ptr<Objective> objective, SearchSpace space);

    ObjectiveHandle(ObjectiveHandle&&) = delete;
    ObjectiveHandle& operator=(ObjectiveHandle&&) = delete;

    /// Projects the position onto the space, evaluates it and counts the call.
    /// Non-finite costs raise evaluation_error.
    Evaluation evaluate(std::span<const double> position);

    /// Evaluates in index order, or concurrently when `parallel` and the
    /// objective is reentrant. Results come back in index order either way.
    /// The first failing index (lowest) is reported through step_error.
    std::vector<Evaluation> evaluate_batch(const std::vector<std::vector<double>>& positions,
                                           bool parallel = false);

    std::size_t eval_count() const noexcept { return eval_count_.load(); }
    const SearchSpace& space() const noexcept { return space_; }
    bool reentrant() const { return objective_->reentrant(); }
    std::string kind() const { return objective_->kind(); }

private:
    std::unique_ptr<Objective> objective_;
    SearchSpace space_;
    std::atomic<std::size_t> eval_count_{0};
};

struct GridScan {
    std::vector<double> argmin;
    double cost = 0.0;
    std::size_t points = 0;
};

/// Exhaustive scan of an all-integral space. Ties keep the first point in
/// lexicographic axis order. Throws config_error on a real-valued axis.
GridScan scan_grid(ObjectiveHandle& objective);

}  // namespace llmpso
