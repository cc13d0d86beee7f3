#pragma once

#include "rtd/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace rtd {

enum class DatasetName { Circle, Random, Clusters2, Clusters3, Spheres, Torus, File };

/// Description of a synthetic (or file-backed) dataset. Sizes default to the
/// usual desk-scale values when left unset.
struct DatasetSpec {
    DatasetName name = DatasetName::Circle;
    std::uint64_t seed = 0;
    /// Total point count for circle/random/clusters2/torus, points per
    /// cluster for clusters3.
    std::optional<int> size;
    /// Spheres: points on each of the ten inner spheres and on the outer one.
    int points_per_sphere = 100;
    int outer_sphere_points = 500;
    /// Ambient dimension for spheres (default 101) and torus (default 100).
    std::optional<int> ambient_dim;
    std::string path;

    void validate() const;
};

DatasetName parse_dataset_name(const std::string& name);
std::string to_string(DatasetName name);

/// Seeded sampling; the same spec always yields the same cloud.
PointCloud generate(const DatasetSpec& spec);

/// Individual generators, exposed for tests and direct use.
PointCloud make_circle(int n, std::uint64_t seed);
PointCloud make_random_square(int n, std::uint64_t seed);
/// Half the points from a dense Gaussian (sigma 0.1), half from a sparse one
/// (sigma 0.5), both centred at the origin.
PointCloud make_two_clusters(int n, std::uint64_t seed);
/// Three Gaussian clusters (sigma 0.1) centred at (0,0), (1,0) and (5,0).
PointCloud make_three_clusters(int per_cluster, std::uint64_t seed);
/// Ten unit spheres inside one sphere of radius 5, all of dimension
/// ambient_dim - 1. Rows are grouped: inner spheres first, outer sphere last.
PointCloud make_spheres(int points_per_sphere, int outer_points, int ambient_dim, std::uint64_t seed);
/// Area-uniform samples of a torus (R = 2, r = 1) placed in ambient_dim
/// through a random orthonormal 3-frame.
PointCloud make_torus(int n, int ambient_dim, std::uint64_t seed);
/// Lemniscate of Bernoulli ("infinity sign"), x in [-1, 1].
PointCloud make_infinity_sign(int n, double noise, std::uint64_t seed);

inline constexpr int kSphereCount = 11;
inline constexpr double kInnerSphereRadius = 1.0;
inline constexpr double kOuterSphereRadius = 5.0;

/// Rectangular numeric CSV, one point per row. A first row containing a
/// non-numeric cell is treated as a header and skipped.
PointCloud load_csv(const std::string& path);
void save_csv(const PointCloud& cloud, const std::string& path);

}  // namespace rtd
