#pragma once

#include "rtd/geometry.hpp"
#include "rtd/rcross.hpp"

#include <vector>

namespace rtd {

/// Per-point subgradients with respect to both clouds.
struct GradientField {
    RowMatrix d_x;        ///< n x d, first cloud
    RowMatrix d_x_tilde;  ///< n x p, second cloud
};

struct SubgradientOptions {
    /// Drop the min-quadrant indicator whenever descent would shorten the
    /// entry, so both clouds receive the Euclidean direction.
    bool minimum_bypass = false;
    CrossVariant variant = CrossVariant::Min;
};

struct Subgradient {
    double value = 0.0;
    GradientField grads;
};

/// Which cloud an entry of the cross matrix depends on.
enum class Route { None, First, Second, Both };

/// One cross-matrix entry that received a nonzero coefficient, in the frame
/// of a single directional barcode (first = the cloud whose w builds w+).
struct RoutedEntry {
    int a = 0;
    int b = 0;
    double coefficient = 0.0;
    Route route = Route::None;

    friend bool operator==(const RoutedEntry&, const RoutedEntry&) = default;
};

/// Routing of every bar of R-Cross-Barcode_1(first, second): +1 on the entry
/// realising the destroyer's value, -1 on the creator edge.
std::vector<RoutedEntry> route_cross_barcode(const PointCloud& first, const PointCloud& second,
                                             const SubgradientOptions& options = {});

/// Value and subgradient of rtd(X, X~) with respect to both clouds.
/// Throws SingularityError if an active entry joins two coincident points.
Subgradient rtd_subgradient(const PointCloud& x, const PointCloud& x_tilde,
                            const SubgradientOptions& options = {});

struct Neighborhood {
    enum class Kind { Knn, Radius };
    Kind kind = Kind::Knn;
    int k = 8;
    double radius = 0.0;

    static Neighborhood knn(int k) { return {Kind::Knn, k, 0.0}; }
    static Neighborhood within(double r) { return {Kind::Radius, 0, r}; }
};

/// Blends every point's gradient with the mean gradient of its neighbours
/// (the point itself excluded): beta * own + (1 - beta) * mean(neighbours).
/// A point with no neighbours keeps its own gradient.
RowMatrix smooth_gradients(const RowMatrix& grads, const PointCloud& cloud,
                           const Neighborhood& neighborhood, double beta);

}  // namespace rtd
