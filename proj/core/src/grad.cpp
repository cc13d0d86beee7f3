#include "rtd/grad.hpp"

#include "rtd/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

namespace rtd {

namespace {

constexpr double kCoincidence = 1e-12;

struct Directional {
    double value = 0.0;
    std::vector<RoutedEntry> entries;
};

/// Entry (a, b) of a simplex with the largest weight; ties go to the
/// lexicographically smallest vertex pair.
std::pair<int, int> argmax_entry(const FilteredSimplex& s, const CrossWeightMatrix& m) {
    const auto v = s.vertices();
    std::pair<int, int> best{v[0], v.size() > 1 ? v[1] : v[0]};
    double best_value = -1.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double value = m(v[i], v[j]);
            if (value > best_value) {
                best_value = value;
                best = {v[i], v[j]};
            }
        }
    }
    return best;
}

Route route_entry(int a, int b, double coefficient, const CrossWeightMatrix& m,
                  const DistanceMatrix& w, const DistanceMatrix& w_tilde,
                  const SubgradientOptions& options) {
    const int n = m.half();
    if (a > b) std::swap(a, b);
    if (b < n) return Route::None;
    const bool is_min = options.variant == CrossVariant::Min;
    if (a < n) {
        const int i = a;
        const int j = b - n;
        if (i == j) return Route::None;
        if (is_min) return Route::First;
        return w(i, j) > w_tilde(i, j) ? Route::First : Route::Second;
    }
    const int i = a - n;
    const int j = b - n;
    if (!is_min) return Route::First;
    // Bypass: when descent lowers the entry, both copies get the Euclidean
    // direction regardless of which one currently realises the minimum.
    if (options.minimum_bypass && coefficient > 0.0) return Route::Both;
    return w(i, j) < w_tilde(i, j) ? Route::First : Route::Second;
}

Directional directional(const DistanceMatrix& w, const DistanceMatrix& w_tilde,
                        const SubgradientOptions& options) {
    CrossOptions copt;
    copt.variant = options.variant;
    const auto cross = rcross_barcode(w, w_tilde, 1, copt);
    const CrossWeightMatrix m(w, w_tilde, options.variant);

    // Net coefficient per entry; entries are sorted so the summation order
    // is fixed.
    std::vector<std::pair<std::pair<int, int>, double>> raw;
    Directional out;
    for (const auto& bar : cross.barcode.bars) {
        if (!bar.finite()) {
            throw ContractError("cross barcode has an essential class in dimension 1");
        }
        out.value += bar.death - bar.birth;
        const auto& birth = cross.filtration[bar.birth_simplex];
        const auto& death = cross.filtration[*bar.death_simplex];
        raw.push_back({argmax_entry(death, m), 1.0});
        raw.push_back({argmax_entry(birth, m), -1.0});
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 0; i < raw.size();) {
        double coefficient = 0.0;
        std::size_t j = i;
        for (; j < raw.size() && raw[j].first == raw[i].first; ++j) coefficient += raw[j].second;
        if (coefficient != 0.0) {
            const auto [a, b] = raw[i].first;
            out.entries.push_back(
                RoutedEntry{a, b, coefficient, route_entry(a, b, coefficient, m, w, w_tilde, options)});
        }
        i = j;
    }
    return out;
}

void accumulate_edge(RowMatrix& grad, const PointCloud& cloud, int i, int j, double scale,
                     const char* which) {
    const Eigen::RowVectorXd diff = cloud.row(i) - cloud.row(j);
    const double norm = diff.norm();
    if (norm < kCoincidence) {
        throw SingularityError(i, j, which);
    }
    grad.row(i) += scale * diff / norm;
    grad.row(j) -= scale * diff / norm;
}

/// Pushes the entry coefficients of one direction onto the two clouds.
void apply_entries(const std::vector<RoutedEntry>& entries, int n, const PointCloud& first,
                   const PointCloud& second, RowMatrix& d_first, RowMatrix& d_second,
                   double scale) {
    for (const auto& e : entries) {
        const int a = std::min(e.a, e.b);
        const int b = std::max(e.a, e.b);
        const int i = a < n ? a : a - n;
        const int j = b - n;
        const double c = scale * e.coefficient;
        if (e.route == Route::First || e.route == Route::Both) {
            accumulate_edge(d_first, first, i, j, c, "first cloud");
        }
        if (e.route == Route::Second || e.route == Route::Both) {
            accumulate_edge(d_second, second, i, j, c, "second cloud");
        }
    }
}

void check_pair(const PointCloud& x, const PointCloud& x_tilde) {
    if (x.size() != x_tilde.size()) {
        throw InputError("point clouds must have equal size, got " + std::to_string(x.size()) +
                         " and " + std::to_string(x_tilde.size()));
    }
    x.validate();
    x_tilde.validate();
}

}  // namespace

std::vector<RoutedEntry> route_cross_barcode(const PointCloud& first, const PointCloud& second,
                                             const SubgradientOptions& options) {
    check_pair(first, second);
    return directional(pairwise_distances(first), pairwise_distances(second), options).entries;
}

Subgradient rtd_subgradient(const PointCloud& x, const PointCloud& x_tilde,
                            const SubgradientOptions& options) {
    check_pair(x, x_tilde);
    const auto w = pairwise_distances(x);
    const auto w_tilde = pairwise_distances(x_tilde);
    const int n = x.size();

    const auto forward = directional(w, w_tilde, options);
    const auto backward = directional(w_tilde, w, options);

    Subgradient out;
    out.value = 0.5 * (forward.value + backward.value);
    out.grads.d_x = RowMatrix::Zero(n, x.dim());
    out.grads.d_x_tilde = RowMatrix::Zero(n, x_tilde.dim());
    apply_entries(forward.entries, n, x, x_tilde, out.grads.d_x, out.grads.d_x_tilde, 0.5);
    apply_entries(backward.entries, n, x_tilde, x, out.grads.d_x_tilde, out.grads.d_x, 0.5);
    return out;
}

RowMatrix smooth_gradients(const RowMatrix& grads, const PointCloud& cloud,
                           const Neighborhood& neighborhood, double beta) {
    if (beta < 0.0 || beta > 1.0) throw InputError("smoothing weight must lie in [0, 1]");
    if (grads.rows() != cloud.size()) {
        throw InputError("gradient rows must match the cloud size");
    }
    if (neighborhood.kind == Neighborhood::Kind::Knn && neighborhood.k < 0) {
        throw InputError("knn neighbourhood size must be non-negative");
    }
    if (neighborhood.kind == Neighborhood::Kind::Radius && !(neighborhood.radius >= 0.0)) {
        throw InputError("neighbourhood radius must be non-negative");
    }
    const int n = cloud.size();
    const auto w = pairwise_distances(cloud);
    RowMatrix out(grads.rows(), grads.cols());
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<int> members;
        if (neighborhood.kind == Neighborhood::Kind::Knn) {
            std::iota(order.begin(), order.end(), 0);
            order.erase(order.begin() + i);
            const auto k = std::min<std::size_t>(static_cast<std::size_t>(neighborhood.k), order.size());
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                              [&](int a, int b) {
                                  if (w(i, a) != w(i, b)) return w(i, a) < w(i, b);
                                  return a < b;
                              });
            members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
            order.resize(static_cast<std::size_t>(n));  // restore for the next iota
        } else {
            for (int j = 0; j < n; ++j) {
                if (j != i && w(i, j) <= neighborhood.radius) members.push_back(j);
            }
        }
        if (members.empty()) {
            out.row(i) = grads.row(i);
            continue;
        }
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(grads.cols());
        for (int j : members) mean += grads.row(j);
        mean /= static_cast<double>(members.size());
        out.row(i) = beta * grads.row(i) + (1.0 - beta) * mean;
    }
    return out;
}

}  // namespace rtd
