#pragma once

#include "rtd/geometry.hpp"
#include "rtd/persistence.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rtd {

/// Pearson correlation between the n(n-1)/2 pairwise distances of X and Z.
/// Throws InputError when either set of distances has zero variance.
double linear_correlation(const PointCloud& x, const PointCloud& z);

/// Fraction of random triplets (i, j, k) on which d(i,j) - d(i,k) has the
/// same sign in both clouds. Exact ties agree only when tied in both.
double triplet_accuracy(const PointCloud& x, const PointCloud& z, int num_triplets,
                        std::uint64_t seed);

/// Diagram distances between the finite bars of two lists (points
/// (birth, death), L-infinity ground metric, unmatched points go to the
/// diagonal at cost (death - birth) / 2).
double wasserstein_distance(const std::vector<Bar>& a, const std::vector<Bar>& b, double order = 1.0);
/// Bottleneck distance, dimension by dimension, maximum over dimensions.
/// Essential bars are matched by sorted birth; a count mismatch gives kInfinity.
double bottleneck_distance(const Barcode& a, const Barcode& b);

/// Wasserstein distance between the finite H0 (resp. H1) diagrams of the
/// Vietoris-Rips filtrations of two clouds.
double wasserstein_h0(const PointCloud& x, const PointCloud& z, double order = 1.0);
double wasserstein_h1(const PointCloud& x, const PointCloud& z, double order = 1.0);

/// Ordinary VR barcode of a cloud in the given dimensions.
Barcode vr_barcode(const PointCloud& cloud, const std::set<int>& dims);

/// Edges of a minimum spanning tree (Kruskal, ties broken by (i, j)).
std::vector<std::pair<int, int>> minimum_spanning_tree(const DistanceMatrix& w);

/// MST-based topological loss: half the squared distance differences summed
/// over the MST edges of X plus the same sum over the MST edges of Z.
double topoae_loss(const PointCloud& x, const PointCloud& z);

struct EvalOptions {
    int num_triplets = 10000;
    std::uint64_t seed = 0;
    bool with_h1 = false;
    /// Number of random subsamples used for the spread estimates.
    int resamples = 5;
    /// Points per subsample; 0 means min(n, 100).
    int sample_size = 0;
    /// Clouds larger than this are evaluated on a subsample only.
    int max_full_size = 2000;
};

struct MetricValue {
    double value = 0.0;
    double spread = 0.0;  ///< standard deviation over subsamples
};

struct EvalReport {
    MetricValue linear_correlation;
    MetricValue triplet_accuracy;
    MetricValue wd_h0;
    std::optional<MetricValue> wd_h1;
    MetricValue rtd;
    int n = 0;
    int resamples = 0;

    std::string to_json() const;
    static EvalReport from_json(const std::string& text);
};

/// Runs every metric of the report on (X, Z).
EvalReport evaluate(const PointCloud& x, const PointCloud& z, const EvalOptions& options = {});

}  // namespace rtd
