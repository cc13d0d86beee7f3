#include "rtd/optimize.hpp"

#include "rtd/errors.hpp"

#include <cmath>
#include <string>

namespace rtd {

double OptimizerConfig::rate_at(int step) const {
    double rate = schedule.front().rate;
    for (const auto& change : schedule) {
        if (change.step <= step) rate = change.rate;
    }
    return rate;
}

void OptimizerConfig::validate() const {
    if (steps < 0) throw InputError("optimizer steps must be non-negative");
    if (schedule.empty()) throw InputError("learning-rate schedule must not be empty");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i].rate > 0.0) || !std::isfinite(schedule[i].rate)) {
            throw InputError("learning rates must be positive");
        }
        if (i > 0 && schedule[i].step <= schedule[i - 1].step) {
            throw InputError("learning-rate schedule must be sorted by step");
        }
    }
    if (beta < 0.0 || beta > 1.0) throw InputError("beta must lie in [0, 1]");
}

OptimizeResult minimize_rtd(const PointCloud& movable_init, const PointCloud& target,
                            const OptimizerConfig& config) {
    config.validate();
    PointCloud cloud = config.warmstart ? *config.warmstart : movable_init;
    if (cloud.size() != target.size()) {
        throw InputError("movable and target clouds must have equal size");
    }
    cloud.validate();
    target.validate();

    SubgradientOptions gopt;
    gopt.minimum_bypass = config.minimum_bypass;

    OptimizeResult result;
    result.trace.reserve(static_cast<std::size_t>(config.steps) + 1);
    for (int step = 0; step < config.steps; ++step) {
        Subgradient sg;
        try {
            sg = rtd_subgradient(cloud, target, gopt);
        } catch (const SingularityError& e) {
            throw SingularityError(e.first(), e.second(),
                                   "movable cloud at step " + std::to_string(step));
        }
        result.trace.push_back({step, sg.value});
        RowMatrix direction = sg.grads.d_x;
        if (config.smoothing) {
            direction = smooth_gradients(direction, cloud, config.neighborhood, config.beta);
        }
        cloud.points() -= config.rate_at(step) * direction;
    }
    result.trace.push_back({config.steps, rtd(cloud, target)});
    result.cloud = std::move(cloud);
    return result;
}

}  // namespace rtd
