#pragma once

#include "rtd/geometry.hpp"
#include "rtd/grad.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace rtd {

/// Piecewise-constant learning rate: entry (s, r) applies from step s on.
struct RateChange {
    int step = 0;
    double rate = 0.0;
};

struct OptimizerConfig {
    int steps = 100;
    std::vector<RateChange> schedule{{0, 0.1}};
    bool minimum_bypass = false;
    bool smoothing = false;
    Neighborhood neighborhood = Neighborhood::knn(8);
    double beta = 0.5;
    /// Replaces the movable starting cloud when set.
    std::optional<PointCloud> warmstart;

    /// Rate in effect at `step`.
    double rate_at(int step) const;
    void validate() const;
};

struct TracePoint {
    int step = 0;
    double rtd = 0.0;
};

struct OptimizeResult {
    PointCloud cloud;
    /// rtd before each step plus one final entry after the last step.
    std::vector<TracePoint> trace;
};

/// Plain subgradient descent on rtd(movable, target) over the movable
/// coordinates, with optional gradient smoothing and minimum bypassing.
/// A SingularityError is rethrown with the step index prepended.
OptimizeResult minimize_rtd(const PointCloud& movable_init, const PointCloud& target,
                            const OptimizerConfig& config);

}  // namespace rtd
