#include "rtd/rcross.hpp"

#include "rtd/errors.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace rtd {

CrossWeightMatrix::CrossWeightMatrix(const DistanceMatrix& w, const DistanceMatrix& w_tilde,
                                     CrossVariant variant)
    : half_(w.size()), m_(2 * w.size()) {
    if (w.size() != w_tilde.size()) {
        throw InputError("cross matrix needs equal sizes, got " + std::to_string(w.size()) +
                         " and " + std::to_string(w_tilde.size()));
    }
    if (half_ < 2) {
        throw InputError("cross matrix needs at least two points per cloud");
    }
    const DistanceMatrix outer = variant == CrossVariant::Min ? w : combine_max(w, w_tilde);
    const DistanceMatrix inner = variant == CrossVariant::Min ? combine_min(w, w_tilde) : w;
    const int n = half_;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // (w+)(j, i) sits at m(n + j, i); it is finite iff j <= i.
            const double plus = j > i ? kInfinity : outer(j, i);
            m_.set(n + j, i, plus);
            if (i < j) m_.set(n + i, n + j, inner(i, j));
        }
    }
}

namespace {

Filtration cone_filtration(const DistanceMatrix& sub, const DistanceMatrix& ambient, int max_dim) {
    const int apex = ambient.size();
    FiltrationOptions base_opt;
    base_opt.max_dim = max_dim;
    Filtration out = build_filtration(ambient, base_opt);
    FiltrationOptions sub_opt;
    sub_opt.max_dim = max_dim - 1;
    const Filtration bases = build_filtration(sub, sub_opt);
    out.reserve(out.size() + bases.size() + 1);
    const int apex_only[1] = {apex};
    out.emplace_back(apex_only, 0.0);
    std::vector<int> verts;
    for (const auto& s : bases) {
        verts.assign(s.vertices().begin(), s.vertices().end());
        verts.push_back(apex);
        out.emplace_back(verts, s.value());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Smallest level q such that every present edge above q is the longest edge
/// of a present triangle whose two other edges are shorter (or excluded).
/// Past q a new edge is homologous to a cycle that already existed, so once
/// H1 vanishes at some level >= q it stays zero: nothing is born later and
/// the prefix up to that level carries the whole degree-1 barcode.
double quiet_level(const DistanceMatrix& m, int excluded_below) {
    const int n = m.size();
    const auto& a = m.matrix();
    auto missing = [&](int u, int v) { return u < excluded_below && v < excluded_below; };
    double quiet = 0.0;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            const double e = a(u, v);
            if (e == kInfinity || missing(u, v) || e <= quiet) continue;
            bool witnessed = false;
            for (int c = 0; c < n && !witnessed; ++c) {
                if (c == u || c == v) continue;
                witnessed = (missing(u, c) || a(u, c) < e) && (missing(v, c) || a(v, c) < e);
            }
            if (!witnessed) quiet = e;
        }
    }
    return quiet;
}

bool has_essential(const Barcode& barcode) {
    return std::any_of(barcode.bars.begin(), barcode.bars.end(),
                       [](const Bar& bar) { return !bar.finite(); });
}

}  // namespace

CrossBarcode rcross_barcode(const DistanceMatrix& w, const DistanceMatrix& w_tilde, int k,
                            const CrossOptions& options) {
    if (k < 1) {
        throw ContractError("cross barcode degree must be >= 1; H0 is empty by construction");
    }
    const CrossWeightMatrix m(w, w_tilde, options.variant);
    const CrossComplex complex =
        options.complex == CrossComplex::Auto ? (k == 1 ? CrossComplex::Matrix : CrossComplex::Cone)
                                              : options.complex;
    if (complex == CrossComplex::Cone) {
        if (k + 2 > kMaxSimplexVertices) throw InputError("cross barcode degree too large");
        const bool is_min = options.variant == CrossVariant::Min;
        const DistanceMatrix sub = is_min ? w : combine_max(w, w_tilde);
        const DistanceMatrix ambient = is_min ? combine_min(w, w_tilde) : w;
        CrossBarcode out;
        out.half = m.half();
        out.complex = CrossComplex::Cone;
        out.filtration = cone_filtration(sub, ambient, k + 1);
        out.barcode = compute_barcode(out.filtration, {k});
        return out;
    }
    FiltrationOptions fopt;
    fopt.max_dim = k + 1;
    if (options.exclude_first_half) fopt.exclusion = exclude_first_half(m.half());
    CrossBarcode out;
    out.half = m.half();

    if (k == 1 && options.truncate) {
        double top = 0.0;
        double floor = kInfinity;
        const auto& a = m.weights().matrix();
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
                const double e = a(i, j);
                if (e == kInfinity) continue;
                top = std::max(top, e);
                if (e > 0.0) floor = std::min(floor, e);
            }
        }
        // Deaths are not known in advance; widen the prefix until H1 is zero
        // at its last level.
        for (double bound = quiet_level(m.weights(), options.exclude_first_half ? m.half() : 0);
             bound < top; bound = std::max(2.0 * bound, floor)) {
            fopt.max_value = bound;
            out.filtration = build_filtration(m.weights(), fopt);
            out.barcode = compute_barcode(out.filtration, {k});
            if (!has_essential(out.barcode)) return out;
        }
        fopt.max_value = kInfinity;
    }
    out.filtration = build_filtration(m.weights(), fopt);
    out.barcode = compute_barcode(out.filtration, {k});
    return out;
}

CrossBarcode rcross_barcode(const PointCloud& x, const PointCloud& x_tilde, int k,
                            const CrossOptions& options) {
    if (x.size() != x_tilde.size()) {
        throw InputError("point clouds must have equal size, got " + std::to_string(x.size()) +
                         " and " + std::to_string(x_tilde.size()));
    }
    return rcross_barcode(pairwise_distances(x), pairwise_distances(x_tilde), k, options);
}

double rtd_k(const DistanceMatrix& w, const DistanceMatrix& w_tilde, int k,
             const CrossOptions& options) {
    const auto cross = rcross_barcode(w, w_tilde, k, options);
    for (const auto& bar : cross.barcode.bars) {
        if (!bar.finite()) {
            throw ContractError("cross barcode has an essential class in dimension " +
                                std::to_string(k));
        }
    }
    return total_persistence(cross.barcode, k);
}

double rtd_k(const PointCloud& x, const PointCloud& x_tilde, int k, const CrossOptions& options) {
    if (x.size() != x_tilde.size()) {
        throw InputError("point clouds must have equal size");
    }
    return rtd_k(pairwise_distances(x), pairwise_distances(x_tilde), k, options);
}

double rtd(const DistanceMatrix& w, const DistanceMatrix& w_tilde, CrossVariant variant) {
    CrossOptions options;
    options.variant = variant;
    return 0.5 * (rtd_k(w, w_tilde, 1, options) + rtd_k(w_tilde, w, 1, options));
}

double rtd(const PointCloud& x, const PointCloud& x_tilde, CrossVariant variant) {
    if (x.size() != x_tilde.size()) {
        throw InputError("point clouds must have equal size");
    }
    return rtd(pairwise_distances(x), pairwise_distances(x_tilde), variant);
}

}  // namespace rtd
