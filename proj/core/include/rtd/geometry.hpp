#pragma once

#include <Eigen/Dense>

#include <limits>

namespace rtd {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Weight that never enters a filtration. IEEE infinity saturates under
/// min/max/+ which is exactly the behaviour the cross matrix needs.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// n points in R^d, one per row. Row i of two clouds with equal n refers to
/// the same underlying object.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(RowMatrix points);
    PointCloud(int n, int d);

    int size() const noexcept { return static_cast<int>(points_.rows()); }
    int dim() const noexcept { return static_cast<int>(points_.cols()); }

    const RowMatrix& points() const noexcept { return points_; }
    RowMatrix& points() noexcept { return points_; }

    auto row(int i) const { return points_.row(i); }
    double operator()(int i, int k) const { return points_(i, k); }
    double& operator()(int i, int k) { return points_(i, k); }

    bool operator==(const PointCloud& other) const {
        return points_.rows() == other.points_.rows() &&
               points_.cols() == other.points_.cols() && points_ == other.points_;
    }

    /// Throws InputError unless n >= 1, d >= 1 and every coordinate is finite.
    void validate() const;

private:
    RowMatrix points_;
};

/// Symmetric n x n weight matrix with zero diagonal. Entries may be kInfinity.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(int n) : w_(Eigen::MatrixXd::Zero(n, n)) {}
    /// Validates symmetry, zero diagonal and non-negativity.
    explicit DistanceMatrix(Eigen::MatrixXd w);

    int size() const noexcept { return static_cast<int>(w_.rows()); }
    double operator()(int i, int j) const { return w_(i, j); }

    /// Sets both (i, j) and (j, i).
    void set(int i, int j, double value) {
        w_(i, j) = value;
        w_(j, i) = value;
    }

    const Eigen::MatrixXd& matrix() const noexcept { return w_; }

private:
    Eigen::MatrixXd w_;
};

DistanceMatrix pairwise_distances(const PointCloud& cloud);

DistanceMatrix combine_min(const DistanceMatrix& a, const DistanceMatrix& b);
DistanceMatrix combine_max(const DistanceMatrix& a, const DistanceMatrix& b);

}  // namespace rtd
