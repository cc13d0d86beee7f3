#pragma once

#include "rtd/geometry.hpp"
#include "rtd/metrics.hpp"

#include <array>
#include <cmath>

namespace fixtures {

/// Unit square with vertex labels in cyclic order 2, 0, 1, 3.
inline rtd::PointCloud square() {
    rtd::RowMatrix p(4, 2);
    p << 1, 0,  //
        1, 1,   //
        0, 0,   //
        0, 1;
    return rtd::PointCloud(p);
}

/// Straight chain visiting the same labels in the same order. Both clouds
/// have the path 2-0-1-3 with unit edges as their minimum spanning tree.
inline rtd::PointCloud chain() {
    rtd::RowMatrix p(4, 2);
    p << 1, 0,  //
        2, 0,   //
        0, 0,   //
        3, 0;
    return rtd::PointCloud(p);
}

/// Two seven-point weight matrices whose cross barcode (first, second) has
/// four intervals, one of them [0.53, 0.57]: vertex 4 joins {3, 6, 7} at
/// 0.53 through the second matrix's edge (4, 7) and at 0.57 in the first.
/// Labels 1..7 are stored at indices 0..6.
struct SevenPoint {
    rtd::DistanceMatrix a;
    rtd::DistanceMatrix b;
};

inline SevenPoint seven_point() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(7, 7, 1.0);
    Eigen::MatrixXd b = Eigen::MatrixXd::Constant(7, 7, 1.0);
    a.diagonal().setZero();
    b.diagonal().setZero();
    auto set = [](Eigen::MatrixXd& m, int u, int v, double value) {
        m(u - 1, v - 1) = value;
        m(v - 1, u - 1) = value;
    };
    // shared: 3-6-7 chain
    for (auto* m : {&a, &b}) {
        set(*m, 3, 6, 0.10);
        set(*m, 6, 7, 0.15);
    }
    set(a, 1, 2, 0.20);
    set(b, 1, 2, 0.10);
    set(a, 2, 5, 0.30);
    set(b, 2, 5, 0.25);
    set(a, 4, 7, 0.57);
    set(b, 4, 7, 0.53);
    set(a, 3, 5, 0.90);
    set(b, 3, 5, 0.60);
    return {rtd::DistanceMatrix(a), rtd::DistanceMatrix(b)};
}

/// Intervals of the cross barcode of seven_point(), sorted by birth.
inline constexpr std::array<std::array<double, 2>, 4> kSevenPointBars{{
    {0.10, 0.20},
    {0.25, 0.30},
    {0.53, 0.57},
    {0.60, 0.90},
}};

/// Two clusters {1, 2} and {3, 4} about 1000 apart, intra-cluster distances
/// around 0.1. `shift` moves point 3 along the x axis; the minimum spanning
/// tree switches between edges (1, 4) and (2, 3) at shift = 0.
inline rtd::PointCloud two_cluster_switch(double shift) {
    rtd::RowMatrix p(4, 2);
    p << 0, 0,                  //
        0, 0.1,                 //
        1000.0 + shift, 0.15,   //
        1000.0, -0.05;
    return rtd::PointCloud(p);
}

/// The companion cloud: clusters {1, 2, 3} and {4}.
inline rtd::PointCloud two_cluster_reference() {
    rtd::RowMatrix p(4, 2);
    p << 0, 0,      //
        0, 0.1,     //
        0.1, 0.05,  //
        1000.1, -0.05;
    return rtd::PointCloud(p);
}

/// |L(+eps) - L(-eps)| for the TopoAE loss across the switch, divided by the
/// small term 0.5 (w14 - w~14)^2 that the switch replaces.
inline double topoae_jump_ratio(double eps) {
    const auto ref = two_cluster_reference();
    const double before = rtd::topoae_loss(two_cluster_switch(-eps), ref);
    const double after = rtd::topoae_loss(two_cluster_switch(eps), ref);
    const auto x = two_cluster_switch(eps);
    const double w14 = (x.row(0) - x.row(3)).norm();
    const double wt14 = (ref.row(0) - ref.row(3)).norm();
    return std::abs(after - before) / (0.5 * (w14 - wt14) * (w14 - wt14));
}

}  // namespace fixtures
