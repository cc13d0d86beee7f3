#include "rtd/metrics.hpp"

#include "rtd/errors.hpp"
#include "rtd/random.hpp"
#include "rtd/rcross.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rtd {

namespace {

void require_pair(const PointCloud& x, const PointCloud& z, int min_n) {
    if (x.size() != z.size()) {
        throw InputError("clouds must have the same number of points, got " +
                         std::to_string(x.size()) + " and " + std::to_string(z.size()));
    }
    if (x.size() < min_n) {
        throw InputError("need at least " + std::to_string(min_n) + " points");
    }
}

double diagonal_cost(const Bar& a) { return 0.5 * (a.death - a.birth); }

double pair_cost(const Bar& a, const Bar& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

std::vector<Bar> finite_only(const std::vector<Bar>& bars) {
    std::vector<Bar> out;
    for (const auto& bar : bars) {
        if (bar.finite()) out.push_back(bar);
    }
    return out;
}

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// method with potentials, O(n^3)). Returns the column assigned to each row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) assignment[p[j] - 1] = j - 1;
    }
    return assignment;
}

/// Cost matrix of the diagonal-augmented bipartite graph: rows are A then
/// diagonal copies of B, columns are B then diagonal copies of A.
std::vector<std::vector<double>> augmented_costs(const std::vector<Bar>& a,
                                                 const std::vector<Bar>& b) {
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    std::vector<std::vector<double>> cost(na + nb, std::vector<double>(na + nb, 0.0));
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) cost[i][j] = pair_cost(a[i], b[j]);
        for (std::size_t j = nb; j < na + nb; ++j) cost[i][j] = diagonal_cost(a[i]);
    }
    for (std::size_t i = na; i < na + nb; ++i) {
        for (std::size_t j = 0; j < nb; ++j) cost[i][j] = diagonal_cost(b[j]);
    }
    return cost;
}

/// Kuhn's augmenting-path matching; true if every row can be matched using
/// only entries with cost <= threshold.
bool perfect_matching(const std::vector<std::vector<double>>& cost, double threshold) {
    const int n = static_cast<int>(cost.size());
    std::vector<int> match_col(n, -1);
    std::vector<char> seen;
    auto augment = [&](auto&& self, int row) -> bool {
        for (int col = 0; col < n; ++col) {
            if (cost[row][col] > threshold || seen[col]) continue;
            seen[col] = 1;
            if (match_col[col] < 0 || self(self, match_col[col])) {
                match_col[col] = row;
                return true;
            }
        }
        return false;
    };
    for (int row = 0; row < n; ++row) {
        seen.assign(n, 0);
        if (!augment(augment, row)) return false;
    }
    return true;
}

double finite_bottleneck(const std::vector<Bar>& a, const std::vector<Bar>& b) {
    if (a.empty() && b.empty()) return 0.0;
    const auto cost = augmented_costs(a, b);
    std::vector<double> candidates;
    for (const auto& row : cost) candidates.insert(candidates.end(), row.begin(), row.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::size_t lo = 0;
    std::size_t hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (perfect_matching(cost, candidates[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return candidates[lo];
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

PointCloud take_rows(const PointCloud& cloud, const std::vector<int>& rows) {
    PointCloud out(static_cast<int>(rows.size()), cloud.dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.points().row(static_cast<Eigen::Index>(i)) = cloud.row(rows[i]);
    }
    return out;
}

}  // namespace

double linear_correlation(const PointCloud& x, const PointCloud& z) {
    require_pair(x, z, 3);
    const auto wx = pairwise_distances(x);
    const auto wz = pairwise_distances(z);
    const int n = x.size();
    const double count = 0.5 * n * (n - 1);
    double mx = 0.0, mz = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            mx += wx(i, j);
            mz += wz(i, j);
        }
    }
    mx /= count;
    mz /= count;
    double sxz = 0.0, sxx = 0.0, szz = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = wx(i, j) - mx;
            const double dz = wz(i, j) - mz;
            sxz += dx * dz;
            sxx += dx * dx;
            szz += dz * dz;
        }
    }
    if (sxx <= 0.0 || szz <= 0.0) {
        throw InputError("linear correlation undefined: pairwise distances have zero variance");
    }
    return sxz / std::sqrt(sxx * szz);
}

double triplet_accuracy(const PointCloud& x, const PointCloud& z, int num_triplets,
                        std::uint64_t seed) {
    require_pair(x, z, 3);
    if (num_triplets < 1) throw InputError("num_triplets must be >= 1");
    Rng rng(seed);
    const auto n = static_cast<std::uint64_t>(x.size());
    const auto& px = x.points();
    const auto& pz = z.points();
    auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
    int agree = 0;
    for (int t = 0; t < num_triplets; ++t) {
        const auto i = static_cast<Eigen::Index>(rng.below(n));
        Eigen::Index j = i;
        while (j == i) j = static_cast<Eigen::Index>(rng.below(n));
        Eigen::Index k = i;
        while (k == i || k == j) k = static_cast<Eigen::Index>(rng.below(n));
        const double dx = (px.row(i) - px.row(j)).norm() - (px.row(i) - px.row(k)).norm();
        const double dz = (pz.row(i) - pz.row(j)).norm() - (pz.row(i) - pz.row(k)).norm();
        if (sign(dx) == sign(dz)) ++agree;
    }
    return static_cast<double>(agree) / num_triplets;
}

double wasserstein_distance(const std::vector<Bar>& a_in, const std::vector<Bar>& b_in, double order) {
    if (!(order >= 1.0)) throw InputError("Wasserstein order must be >= 1");
    const auto a = finite_only(a_in);
    const auto b = finite_only(b_in);
    if (a.empty() && b.empty()) return 0.0;
    auto cost = augmented_costs(a, b);
    for (auto& row : cost) {
        for (auto& c : row) c = std::pow(c, order);
    }
    const auto assignment = hungarian(cost);
    double total = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        total += cost[i][static_cast<std::size_t>(assignment[i])];
    }
    return std::pow(total, 1.0 / order);
}

double bottleneck_distance(const Barcode& a, const Barcode& b) {
    std::set<int> dims;
    for (const auto& bar : a.bars) dims.insert(bar.dim);
    for (const auto& bar : b.bars) dims.insert(bar.dim);
    double worst = 0.0;
    for (int d : dims) {
        const auto da = a.in_dim(d);
        const auto db = b.in_dim(d);
        std::vector<double> ea, eb;
        for (const auto& bar : da) {
            if (!bar.finite()) ea.push_back(bar.birth);
        }
        for (const auto& bar : db) {
            if (!bar.finite()) eb.push_back(bar.birth);
        }
        if (ea.size() != eb.size()) return kInfinity;
        std::sort(ea.begin(), ea.end());
        std::sort(eb.begin(), eb.end());
        for (std::size_t i = 0; i < ea.size(); ++i) worst = std::max(worst, std::abs(ea[i] - eb[i]));
        worst = std::max(worst, finite_bottleneck(finite_only(da), finite_only(db)));
    }
    return worst;
}

Barcode vr_barcode(const PointCloud& cloud, const std::set<int>& dims) {
    FiltrationOptions options;
    options.max_dim = dims.empty() ? 0 : *dims.rbegin() + 1;
    return compute_barcode(build_filtration(pairwise_distances(cloud), options), dims);
}

double wasserstein_h0(const PointCloud& x, const PointCloud& z, double order) {
    return wasserstein_distance(vr_barcode(x, {0}).bars, vr_barcode(z, {0}).bars, order);
}

double wasserstein_h1(const PointCloud& x, const PointCloud& z, double order) {
    return wasserstein_distance(vr_barcode(x, {1}).bars, vr_barcode(z, {1}).bars, order);
}

std::vector<std::pair<int, int>> minimum_spanning_tree(const DistanceMatrix& w) {
    const int n = w.size();
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    }
    std::stable_sort(edges.begin(), edges.end(), [&](const auto& e, const auto& f) {
        return w(e.first, e.second) < w(f.first, f.second);
    });
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::vector<std::pair<int, int>> tree;
    for (const auto& [i, j] : edges) {
        const int a = find(i);
        const int b = find(j);
        if (a == b) continue;
        parent[a] = b;
        tree.emplace_back(i, j);
        if (static_cast<int>(tree.size()) == n - 1) break;
    }
    return tree;
}

double topoae_loss(const PointCloud& x, const PointCloud& z) {
    require_pair(x, z, 2);
    const auto wx = pairwise_distances(x);
    const auto wz = pairwise_distances(z);
    double loss = 0.0;
    for (const auto& tree : {minimum_spanning_tree(wx), minimum_spanning_tree(wz)}) {
        for (const auto& [i, j] : tree) {
            const double diff = wx(i, j) - wz(i, j);
            loss += 0.5 * diff * diff;
        }
    }
    return loss;
}

EvalReport evaluate(const PointCloud& x, const PointCloud& z, const EvalOptions& options) {
    require_pair(x, z, 3);
    if (options.resamples < 0) throw InputError("resamples must be non-negative");
    const int n = x.size();
    const int sample = std::min(n, options.sample_size > 0 ? options.sample_size : 100);
    Rng rng(options.seed);

    EvalReport report;
    report.n = n;
    report.resamples = options.resamples;

    // Point values on the whole cloud (or a capped subsample of it).
    PointCloud fx = x;
    PointCloud fz = z;
    if (n > options.max_full_size) {
        auto perm = rng.permutation(n);
        perm.resize(static_cast<std::size_t>(options.max_full_size));
        fx = take_rows(x, perm);
        fz = take_rows(z, perm);
    }
    report.linear_correlation.value = linear_correlation(fx, fz);
    report.triplet_accuracy.value = triplet_accuracy(fx, fz, options.num_triplets, options.seed);
    report.wd_h0.value = wasserstein_h0(fx, fz);
    if (options.with_h1) report.wd_h1 = MetricValue{wasserstein_h1(fx, fz), 0.0};

    std::vector<double> lc, ta, h0, h1, rtds;
    const int rounds = std::max(1, options.resamples);
    for (int r = 0; r < rounds; ++r) {
        auto perm = rng.permutation(n);
        perm.resize(static_cast<std::size_t>(sample));
        std::sort(perm.begin(), perm.end());
        const auto sx = take_rows(x, perm);
        const auto sz = take_rows(z, perm);
        rtds.push_back(rtd(sx, sz));
        if (options.resamples == 0) break;
        lc.push_back(linear_correlation(sx, sz));
        ta.push_back(triplet_accuracy(sx, sz, options.num_triplets, options.seed + 1 + r));
        h0.push_back(wasserstein_h0(sx, sz));
        if (options.with_h1) h1.push_back(wasserstein_h1(sx, sz));
    }
    report.rtd = {mean(rtds), stddev(rtds)};
    report.linear_correlation.spread = stddev(lc);
    report.triplet_accuracy.spread = stddev(ta);
    report.wd_h0.spread = stddev(h0);
    if (report.wd_h1) report.wd_h1->spread = stddev(h1);
    return report;
}

namespace {

nlohmann::json metric_json(const MetricValue& m) { return {{"value", m.value}, {"sd", m.spread}}; }

MetricValue metric_from(const nlohmann::json& j) {
    return {j.at("value").get<double>(), j.at("sd").get<double>()};
}

}  // namespace

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["linear_correlation"] = metric_json(linear_correlation);
    j["triplet_accuracy"] = metric_json(triplet_accuracy);
    j["wd_h0"] = metric_json(wd_h0);
    j["wd_h1"] = wd_h1 ? metric_json(*wd_h1) : nlohmann::json(nullptr);
    j["rtd"] = metric_json(rtd);
    j["n"] = n;
    j["resamples"] = resamples;
    return j.dump(2);
}

EvalReport EvalReport::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        EvalReport r;
        r.linear_correlation = metric_from(j.at("linear_correlation"));
        r.triplet_accuracy = metric_from(j.at("triplet_accuracy"));
        r.wd_h0 = metric_from(j.at("wd_h0"));
        if (!j.at("wd_h1").is_null()) r.wd_h1 = metric_from(j.at("wd_h1"));
        r.rtd = metric_from(j.at("rtd"));
        r.n = j.at("n").get<int>();
        r.resamples = j.at("resamples").get<int>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed evaluation report: ") + e.what());
    }
}

}  // namespace rtd
