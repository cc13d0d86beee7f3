#pragma once

#include "rtd/geometry.hpp"
#include "rtd/persistence.hpp"

namespace rtd {

enum class CrossVariant {
    /// Lower-right quadrant min(w, w~), off-diagonal quadrants built from w.
    Min,
    /// Lower-right quadrant w, off-diagonal quadrants built from max(w, w~).
    Max,
};

/// Weights of the auxiliary graph on 2N vertices. Vertices 0..N-1 are the
/// first copy, N..2N-1 the second copy:
///
///     m = | 0     w+^T |      w+ = w with the strictly lower triangle set to
///         | w+    low  |           kInfinity, diagonal kept at 0
///
/// The zero diagonal of w+ makes m(i, i+N) = 0, so the graph is connected at
/// threshold 0 and its H0 barcode is empty.
class CrossWeightMatrix {
public:
    CrossWeightMatrix(const DistanceMatrix& w, const DistanceMatrix& w_tilde, CrossVariant variant);

    int half() const noexcept { return half_; }
    const DistanceMatrix& weights() const noexcept { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    int half_;
    DistanceMatrix m_;
};

inline CrossWeightMatrix assemble_cross_matrix(const DistanceMatrix& w, const DistanceMatrix& w_tilde,
                                               CrossVariant variant = CrossVariant::Min) {
    return CrossWeightMatrix(w, w_tilde, variant);
}

/// Complex whose homology is the cross barcode.
enum class CrossComplex {
    /// Matrix for degree 1, Cone above.
    Auto,
    /// Vietoris-Rips complex of the 2N-vertex graph with weights m. Exact in
    /// degree 1; in higher degrees its bars can depend on the vertex order.
    Matrix,
    /// VR(ambient) plus a cone over VR(sub) with apex N, each cone simplex
    /// entering at the sub value of its base. Ambient/sub are min(w, w~)/w
    /// for the Min variant and w/max(w, w~) for Max. Its homology is that of
    /// the pair in every degree; no first-half exclusion applies.
    Cone,
};

struct CrossOptions {
    CrossVariant variant = CrossVariant::Min;
    CrossComplex complex = CrossComplex::Auto;
    /// Leave out simplices spanned by first-copy vertices. Does not change any
    /// barcode in dimension >= 1, only the amount of work.
    bool exclude_first_half = true;
    /// Degree 1 on the matrix complex only: build the filtration up to the
    /// first level past which no bar can be born or survive, instead of up
    /// to the largest weight. Bars are unchanged; `filtration` is then a
    /// prefix of the full one.
    bool truncate = true;
};

/// A cross barcode together with the filtration its simplex ids refer to.
struct CrossBarcode {
    Filtration filtration;
    Barcode barcode;
    int half = 0;
    CrossComplex complex = CrossComplex::Matrix;  ///< never Auto
};

/// Dimension-k barcode of the VR filtration of the cross matrix (k >= 1).
CrossBarcode rcross_barcode(const DistanceMatrix& w, const DistanceMatrix& w_tilde, int k,
                            const CrossOptions& options = {});
CrossBarcode rcross_barcode(const PointCloud& x, const PointCloud& x_tilde, int k,
                            const CrossOptions& options = {});

/// Total length of the dimension-k cross barcode.
double rtd_k(const DistanceMatrix& w, const DistanceMatrix& w_tilde, int k,
             const CrossOptions& options = {});
double rtd_k(const PointCloud& x, const PointCloud& x_tilde, int k, const CrossOptions& options = {});

/// Symmetrised divergence: (RTD_1(X, X~) + RTD_1(X~, X)) / 2.
double rtd(const PointCloud& x, const PointCloud& x_tilde, CrossVariant variant = CrossVariant::Min);
double rtd(const DistanceMatrix& w, const DistanceMatrix& w_tilde,
           CrossVariant variant = CrossVariant::Min);

}  // namespace rtd
