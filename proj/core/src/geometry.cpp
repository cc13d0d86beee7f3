#include "rtd/geometry.hpp"

#include "rtd/errors.hpp"

#include <cmath>
#include <string>

namespace rtd {

PointCloud::PointCloud(RowMatrix points) : points_(std::move(points)) {}

PointCloud::PointCloud(int n, int d) : points_(RowMatrix::Zero(n, d)) {}

void PointCloud::validate() const {
    if (points_.rows() < 1 || points_.cols() < 1) {
        throw InputError("point cloud must have at least one point and one coordinate, got " +
                         std::to_string(points_.rows()) + "x" + std::to_string(points_.cols()));
    }
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
        for (Eigen::Index k = 0; k < points_.cols(); ++k) {
            if (!std::isfinite(points_(i, k))) {
                throw InputError("non-finite coordinate at row " + std::to_string(i) +
                                 ", column " + std::to_string(k));
            }
        }
    }
}

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {
    if (w_.rows() != w_.cols()) {
        throw InputError("distance matrix must be square");
    }
    const auto n = w_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w_(i, i) != 0.0) {
            throw InputError("distance matrix diagonal must be zero at " + std::to_string(i));
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::isnan(w_(i, j)) || w_(i, j) < 0.0 || w_(i, j) != w_(j, i)) {
                throw InputError("distance matrix must be symmetric and non-negative at (" +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
    cloud.validate();
    const int n = cloud.size();
    DistanceMatrix w(n);
    const auto& p = cloud.points();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            w.set(i, j, (p.row(i) - p.row(j)).norm());
        }
    }
    return w;
}

namespace {

template <typename Op>
DistanceMatrix combine(const DistanceMatrix& a, const DistanceMatrix& b, Op op) {
    if (a.size() != b.size()) {
        throw InputError("cannot combine distance matrices of sizes " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
    }
    const int n = a.size();
    DistanceMatrix out(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            out.set(i, j, op(a(i, j), b(i, j)));
        }
    }
    return out;
}

}  // namespace

DistanceMatrix combine_min(const DistanceMatrix& a, const DistanceMatrix& b) {
    return combine(a, b, [](double x, double y) { return std::fmin(x, y); });
}

DistanceMatrix combine_max(const DistanceMatrix& a, const DistanceMatrix& b) {
    return combine(a, b, [](double x, double y) { return std::fmax(x, y); });
}

}  // namespace rtd
