#include "rtd/datasets.hpp"

#include "rtd/errors.hpp"
#include "rtd/persistence.hpp"
#include "rtd/random.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace rtd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(int value, const char* what) {
    if (value < 1) throw InputError(std::string(what) + " must be >= 1");
}

/// Uniform point on the unit sphere S^{d-1}.
Eigen::RowVectorXd on_unit_sphere(Rng& rng, int d) {
    Eigen::RowVectorXd v(d);
    double norm = 0.0;
    while (norm < 1e-12) {
        for (int k = 0; k < d; ++k) v(k) = rng.normal();
        norm = v.norm();
    }
    return v / norm;
}

}  // namespace

void DatasetSpec::validate() const {
    if (size && *size < 1) throw InputError("dataset size must be >= 1");
    if (points_per_sphere < 1 || outer_sphere_points < 1) {
        throw InputError("sphere point counts must be >= 1");
    }
    if (ambient_dim && *ambient_dim < 2) throw InputError("ambient_dim must be >= 2");
    if (name == DatasetName::Torus && ambient_dim && *ambient_dim < 3) {
        throw InputError("torus needs ambient_dim >= 3");
    }
    if (name == DatasetName::File && path.empty()) throw InputError("file dataset needs a path");
}

DatasetName parse_dataset_name(const std::string& name) {
    if (name == "circle") return DatasetName::Circle;
    if (name == "random") return DatasetName::Random;
    if (name == "clusters2") return DatasetName::Clusters2;
    if (name == "clusters3") return DatasetName::Clusters3;
    if (name == "spheres") return DatasetName::Spheres;
    if (name == "torus") return DatasetName::Torus;
    if (name == "file") return DatasetName::File;
    throw InputError("unknown dataset '" + name + "'");
}

std::string to_string(DatasetName name) {
    switch (name) {
        case DatasetName::Circle: return "circle";
        case DatasetName::Random: return "random";
        case DatasetName::Clusters2: return "clusters2";
        case DatasetName::Clusters3: return "clusters3";
        case DatasetName::Spheres: return "spheres";
        case DatasetName::Torus: return "torus";
        case DatasetName::File: return "file";
    }
    return "unknown";
}

PointCloud generate(const DatasetSpec& spec) {
    spec.validate();
    switch (spec.name) {
        case DatasetName::Circle: return make_circle(spec.size.value_or(100), spec.seed);
        case DatasetName::Random: return make_random_square(spec.size.value_or(500), spec.seed);
        case DatasetName::Clusters2: return make_two_clusters(spec.size.value_or(200), spec.seed);
        case DatasetName::Clusters3: return make_three_clusters(spec.size.value_or(100), spec.seed);
        case DatasetName::Spheres:
            return make_spheres(spec.points_per_sphere, spec.outer_sphere_points,
                                spec.ambient_dim.value_or(101), spec.seed);
        case DatasetName::Torus:
            return make_torus(spec.size.value_or(5000), spec.ambient_dim.value_or(100), spec.seed);
        case DatasetName::File: return load_csv(spec.path);
    }
    throw InputError("unknown dataset");
}

PointCloud make_circle(int n, std::uint64_t seed) {
    require_positive(n, "circle size");
    Rng rng(seed);
    PointCloud cloud(n, 2);
    for (int i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, kTwoPi);
        cloud(i, 0) = std::cos(t);
        cloud(i, 1) = std::sin(t);
    }
    return cloud;
}

PointCloud make_random_square(int n, std::uint64_t seed) {
    require_positive(n, "random size");
    Rng rng(seed);
    PointCloud cloud(n, 2);
    for (int i = 0; i < n; ++i) {
        cloud(i, 0) = rng.uniform();
        cloud(i, 1) = rng.uniform();
    }
    return cloud;
}

PointCloud make_two_clusters(int n, std::uint64_t seed) {
    require_positive(n, "clusters2 size");
    Rng rng(seed);
    PointCloud cloud(n, 2);
    const int dense = n / 2;
    for (int i = 0; i < n; ++i) {
        const double sigma = i < dense ? 0.1 : 0.5;
        cloud(i, 0) = rng.normal(0.0, sigma);
        cloud(i, 1) = rng.normal(0.0, sigma);
    }
    return cloud;
}

PointCloud make_three_clusters(int per_cluster, std::uint64_t seed) {
    require_positive(per_cluster, "clusters3 size");
    Rng rng(seed);
    constexpr double centers[3][2] = {{0.0, 0.0}, {1.0, 0.0}, {5.0, 0.0}};
    PointCloud cloud(3 * per_cluster, 2);
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < per_cluster; ++i) {
            const int row = c * per_cluster + i;
            cloud(row, 0) = rng.normal(centers[c][0], 0.1);
            cloud(row, 1) = rng.normal(centers[c][1], 0.1);
        }
    }
    return cloud;
}

PointCloud make_spheres(int points_per_sphere, int outer_points, int ambient_dim,
                        std::uint64_t seed) {
    require_positive(points_per_sphere, "points per sphere");
    require_positive(outer_points, "outer sphere points");
    if (ambient_dim < 2) throw InputError("spheres need ambient_dim >= 2");
    Rng rng(seed);
    constexpr int inner = kSphereCount - 1;
    // Centres on a sphere of radius 2: inner spheres then reach at most
    // radius 3 < 5, and centres more than 2.2 apart keep them disjoint.
    constexpr double center_radius = 2.0;
    constexpr double min_center_gap = 2.2;
    std::vector<Eigen::RowVectorXd> centers;
    int attempts = 0;
    while (static_cast<int>(centers.size()) < inner) {
        if (++attempts > 100000) {
            throw InputError("cannot place disjoint inner spheres in dimension " +
                             std::to_string(ambient_dim));
        }
        const Eigen::RowVectorXd c = center_radius * on_unit_sphere(rng, ambient_dim);
        bool ok = true;
        for (const auto& other : centers) {
            if ((c - other).norm() <= min_center_gap) {
                ok = false;
                break;
            }
        }
        if (ok) centers.push_back(c);
    }
    PointCloud cloud(inner * points_per_sphere + outer_points, ambient_dim);
    int row = 0;
    for (const auto& c : centers) {
        for (int i = 0; i < points_per_sphere; ++i) {
            cloud.points().row(row++) = c + kInnerSphereRadius * on_unit_sphere(rng, ambient_dim);
        }
    }
    for (int i = 0; i < outer_points; ++i) {
        cloud.points().row(row++) = kOuterSphereRadius * on_unit_sphere(rng, ambient_dim);
    }
    return cloud;
}

PointCloud make_torus(int n, int ambient_dim, std::uint64_t seed) {
    require_positive(n, "torus size");
    if (ambient_dim < 3) throw InputError("torus needs ambient_dim >= 3");
    Rng rng(seed);
    constexpr double big = 2.0;
    constexpr double small = 1.0;
    // Orthonormal 3-frame from Gram-Schmidt on Gaussian vectors.
    Eigen::MatrixXd frame(3, ambient_dim);
    for (int r = 0; r < 3; ++r) {
        for (int k = 0; k < ambient_dim; ++k) frame(r, k) = rng.normal();
        for (int q = 0; q < r; ++q) frame.row(r) -= frame.row(r).dot(frame.row(q)) * frame.row(q);
        frame.row(r).normalize();
    }
    PointCloud cloud(n, ambient_dim);
    for (int i = 0; i < n; ++i) {
        // Area element is proportional to (R + r cos theta); reject accordingly.
        double theta = 0.0;
        while (true) {
            theta = rng.uniform(0.0, kTwoPi);
            if (rng.uniform() * (big + small) <= big + small * std::cos(theta)) break;
        }
        const double phi = rng.uniform(0.0, kTwoPi);
        const double ring = big + small * std::cos(theta);
        const Eigen::RowVector3d p(ring * std::cos(phi), ring * std::sin(phi), small * std::sin(theta));
        cloud.points().row(i) = p * frame;
    }
    return cloud;
}

PointCloud make_infinity_sign(int n, double noise, std::uint64_t seed) {
    require_positive(n, "infinity sign size");
    Rng rng(seed);
    PointCloud cloud(n, 2);
    for (int i = 0; i < n; ++i) {
        const double t = rng.uniform(0.0, kTwoPi);
        const double s = std::sin(t);
        const double c = std::cos(t);
        const double denom = 1.0 + s * s;
        cloud(i, 0) = c / denom + noise * rng.normal();
        cloud(i, 1) = s * c / denom + noise * rng.normal();
    }
    return cloud;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_number(std::string cell, double& out) {
    while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && std::isspace(static_cast<unsigned char>(cell[start]))) ++start;
    cell = cell.substr(start);
    if (cell.empty()) return false;
    try {
        std::size_t used = 0;
        out = std::stod(cell, &used);
        return used == cell.size();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

PointCloud load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        std::vector<double> values(cells.size());
        bool numeric = true;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (!parse_number(cells[k], values[k])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows.empty() && width == 0) {
                width = cells.size();  // header
                continue;
            }
            throw InputError(path + ":" + std::to_string(line_no) + ": non-numeric cell");
        }
        if (width == 0) width = values.size();
        if (values.size() != width) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(width) + " columns, got " + std::to_string(values.size()));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw InputError(path + ": no data rows");
    PointCloud cloud(static_cast<int>(rows.size()), static_cast<int>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < width; ++k) {
            cloud(static_cast<int>(i), static_cast<int>(k)) = rows[i][k];
        }
    }
    cloud.validate();
    return cloud;
}

void save_csv(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    for (int i = 0; i < cloud.size(); ++i) {
        for (int k = 0; k < cloud.dim(); ++k) {
            if (k > 0) out << ',';
            out << format_double(cloud(i, k));
        }
        out << '\n';
    }
}

}  // namespace rtd
