#include "fixtures.hpp"
#include "oracles.hpp"

#include "rtd/errors.hpp"
#include "rtd/metrics.hpp"
#include "rtd/rcross.hpp"

#include <doctest.h>

using namespace rtd;

namespace {

std::vector<Bar> bars_of(const std::vector<std::pair<double, double>>& pts) {
    std::vector<Bar> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Bar b;
        b.birth = pts[i].first;
        b.death = pts[i].second;
        b.dim = 1;
        b.death_simplex = i;
        out.push_back(b);
    }
    return out;
}

std::vector<std::pair<double, double>> random_diagram(Rng& rng, int count) {
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i < count; ++i) {
        const double b = rng.uniform();
        out.emplace_back(b, b + rng.uniform(0.01, 1.0));
    }
    return out;
}

std::vector<double> pair_distances(const RowMatrix& p) {
    const auto w = oracle::distances(p);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < w.rows(); ++j) out.push_back(w(i, j));
    }
    return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("linear correlation") {
    const RowMatrix x = oracle::random_points(15, 3, 1);
    const RowMatrix z = oracle::random_points(15, 2, 2);
    CHECK(linear_correlation(PointCloud(x), PointCloud(x)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(linear_correlation(PointCloud(x), PointCloud(RowMatrix(3.0 * x))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(linear_correlation(PointCloud(x), PointCloud(z)) ==
          doctest::Approx(oracle::pearson(pair_distances(x), pair_distances(z))).epsilon(1e-12));
    CHECK_THROWS_AS(linear_correlation(PointCloud(x), PointCloud(RowMatrix::Zero(15, 2))), InputError);
    CHECK_THROWS_AS(linear_correlation(PointCloud(x), PointCloud(z.topRows(10))), InputError);
}

TEST_CASE("triplet accuracy") {
    const PointCloud x(oracle::random_points(20, 3, 3));
    const PointCloud z(oracle::random_points(20, 3, 4));
    CHECK(triplet_accuracy(x, x, 2000, 1) == 1.0);
    CHECK(triplet_accuracy(x, PointCloud(RowMatrix(2.0 * x.points())), 2000, 1) == 1.0);
    const double a = triplet_accuracy(x, z, 2000, 5);
    CHECK(a == triplet_accuracy(x, z, 2000, 5));
    CHECK(a > 0.3);
    CHECK(a < 0.7);
    CHECK_THROWS_AS(triplet_accuracy(x, z, 0, 1), InputError);
}

TEST_CASE("wasserstein against exhaustive matching") {
    Rng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = random_diagram(rng, static_cast<int>(rng.below(4)));
        const auto b = random_diagram(rng, static_cast<int>(rng.below(4)));
        const auto [sum, mx] = oracle::brute_matching(a, b);
        CHECK(wasserstein_distance(bars_of(a), bars_of(b)) == doctest::Approx(sum).epsilon(1e-12));
        Barcode ba{bars_of(a)};
        Barcode bb{bars_of(b)};
        CHECK(bottleneck_distance(ba, bb) == doctest::Approx(mx).epsilon(1e-12));
        CHECK(bottleneck_distance(ba, bb) == bottleneck_distance(bb, ba));
    }
}

TEST_CASE("wasserstein basics") {
    const auto a = bars_of({{0.0, 1.0}, {0.2, 0.5}});
    CHECK(wasserstein_distance(a, a) == 0.0);
    CHECK(wasserstein_distance(a, {}) == doctest::Approx(0.5 + 0.15));
    CHECK(wasserstein_distance(a, {}, 2.0) == doctest::Approx(std::sqrt(0.25 + 0.0225)));
    CHECK(wasserstein_distance({}, {}) == 0.0);
    CHECK_THROWS_AS(wasserstein_distance(a, a, 0.5), InputError);
    // essential bars are ignored
    auto with_inf = a;
    Bar e;
    e.birth = 0.0;
    with_inf.push_back(e);
    CHECK(wasserstein_distance(with_inf, a) == 0.0);
}

TEST_CASE("bottleneck with essential bars") {
    Barcode a;
    Barcode b;
    Bar e;
    e.birth = 0.0;
    a.bars.push_back(e);
    CHECK(bottleneck_distance(a, b) == kInfinity);
    e.birth = 0.3;
    b.bars.push_back(e);
    CHECK(bottleneck_distance(a, b) == doctest::Approx(0.3));
    CHECK(bottleneck_distance(Barcode{}, Barcode{}) == 0.0);
}

TEST_CASE("minimum spanning tree") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto p = oracle::random_points(12, 2, 40 + seed);
        const auto w = oracle::distances(p);
        const auto tree = minimum_spanning_tree(DistanceMatrix(w));
        REQUIRE(tree.size() == 11);
        double total = 0.0;
        for (const auto& [i, j] : tree) total += w(i, j);
        // Prim's algorithm as the reference
        std::vector<bool> in(12, false);
        std::vector<double> best(12, kInfinity);
        best[0] = 0.0;
        double prim = 0.0;
        for (int step = 0; step < 12; ++step) {
            int u = -1;
            for (int v = 0; v < 12; ++v) {
                if (!in[v] && (u < 0 || best[v] < best[u])) u = v;
            }
            in[u] = true;
            prim += best[u];
            for (int v = 0; v < 12; ++v) best[v] = std::min(best[v], w(u, v));
        }
        CHECK(total == doctest::Approx(prim).epsilon(1e-12));
    }
}

TEST_CASE("topoae loss") {
    const PointCloud x(oracle::random_points(8, 2, 1));
    CHECK(topoae_loss(x, x) == 0.0);
    RowMatrix a(3, 1), b(3, 1);
    a << 0, 1, 3;
    b << 0, 2, 3;
    // MST of a: (0,1), (1,2) with diffs -1, 1; MST of b: (1,2), (0,1) again
    CHECK(topoae_loss(PointCloud(a), PointCloud(b)) == doctest::Approx(2.0));
    CHECK(topoae_loss(fixtures::chain(), fixtures::square()) == 0.0);
}

TEST_CASE("topoae loss jumps where the spanning tree switches") {
    const auto ref = fixtures::two_cluster_reference();
    const double eps = 1e-6;
    CHECK(fixtures::topoae_jump_ratio(eps) > 1e4);
    // the spanning tree of the moving cloud really changes
    const auto t0 = minimum_spanning_tree(pairwise_distances(fixtures::two_cluster_switch(-eps)));
    const auto t1 = minimum_spanning_tree(pairwise_distances(fixtures::two_cluster_switch(eps)));
    CHECK(t0 != t1);
    const double r0 = rtd::rtd(fixtures::two_cluster_switch(-eps), ref);
    const double r1 = rtd::rtd(fixtures::two_cluster_switch(eps), ref);
    CHECK(std::abs(r1 - r0) <= 2.0 * 2.0 * eps);
}

TEST_CASE("vr barcode helpers") {
    const PointCloud x(oracle::random_points(10, 2, 9));
    const auto bc = vr_barcode(x, {0});
    CHECK(bc.size() == 10);
    CHECK(wasserstein_h0(x, x) == 0.0);
    CHECK(wasserstein_h1(x, x) == 0.0);
    const PointCloud y(oracle::random_points(10, 2, 10));
    CHECK(wasserstein_h0(x, y) > 0.0);
}

TEST_CASE("evaluate") {
    const PointCloud x(oracle::random_points(30, 3, 11));
    EvalOptions opt;
    opt.num_triplets = 500;
    opt.resamples = 3;
    opt.sample_size = 20;
    opt.with_h1 = true;
    const auto self = evaluate(x, x, opt);
    CHECK(self.linear_correlation.value == doctest::Approx(1.0));
    CHECK(self.triplet_accuracy.value == 1.0);
    CHECK(self.wd_h0.value == 0.0);
    CHECK(self.rtd.value == 0.0);
    REQUIRE(self.wd_h1.has_value());

    const PointCloud z(oracle::random_points(30, 2, 12));
    const auto r = evaluate(x, z, opt);
    CHECK(r.rtd.value > 0.0);
    CHECK(r.n == 30);
    const auto back = EvalReport::from_json(r.to_json());
    CHECK(back.rtd.value == r.rtd.value);
    CHECK(back.linear_correlation.spread == r.linear_correlation.spread);
    CHECK(back.wd_h1->value == r.wd_h1->value);
    CHECK_THROWS_AS(EvalReport::from_json("{}"), InputError);
}

}
