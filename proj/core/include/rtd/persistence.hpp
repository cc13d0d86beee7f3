#pragma once

#include "rtd/geometry.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace rtd {

/// Maximum number of vertices a simplex may carry (dimension 15).
inline constexpr int kMaxSimplexVertices = 16;

/// A simplex of a Vietoris-Rips filtration: sorted vertex set plus the value
/// at which it enters, i.e. the maximal pairwise weight among its vertices.
class FilteredSimplex {
public:
    FilteredSimplex() = default;
    FilteredSimplex(std::span<const int> vertices, double value);

    int dim() const noexcept { return static_cast<int>(count_) - 1; }
    double value() const noexcept { return value_; }
    std::span<const std::uint16_t> vertices() const noexcept { return {verts_.data(), count_}; }
    int vertex(int i) const noexcept { return verts_[static_cast<std::size_t>(i)]; }

    /// Filtration order: (value, dim, lexicographic vertices).
    friend bool operator<(const FilteredSimplex& a, const FilteredSimplex& b);
    friend bool operator==(const FilteredSimplex& a, const FilteredSimplex& b);

private:
    std::array<std::uint16_t, kMaxSimplexVertices> verts_{};
    std::size_t count_ = 0;
    double value_ = 0.0;
};

using Filtration = std::vector<FilteredSimplex>;

/// Index of a simplex inside its filtration.
using SimplexId = std::size_t;

/// Returns true for vertex sets that must be left out. The kept simplices
/// form a relative complex only if the excluded ones are closed under taking
/// faces.
using ExclusionPredicate = std::function<bool(std::span<const std::uint16_t>)>;

/// Drops every simplex spanned only by vertices 0..half-1, those vertices
/// included.
ExclusionPredicate exclude_first_half(int half);

struct FiltrationOptions {
    int max_dim = 1;
    /// Simplices above this value are not generated. kInfinity keeps every
    /// simplex with a finite value; weights equal to kInfinity never enter.
    double max_value = kInfinity;
    ExclusionPredicate exclusion;
};

/// All simplices of dimension <= max_dim with finite value <= max_value,
/// sorted in filtration order.
Filtration build_filtration(const DistanceMatrix& w, const FiltrationOptions& options);

struct Bar {
    double birth = 0.0;
    double death = kInfinity;
    int dim = 0;
    SimplexId birth_simplex = 0;
    std::optional<SimplexId> death_simplex;

    bool finite() const noexcept { return death_simplex.has_value(); }
    double length() const noexcept { return death - birth; }
};

struct Barcode {
    std::vector<Bar> bars;

    std::vector<Bar> in_dim(int dim) const;
    bool empty() const noexcept { return bars.empty(); }
    std::size_t size() const noexcept { return bars.size(); }
};

/// Persistence pairs over Z/2 for the requested dimensions. Boundary faces
/// that are absent from the filtration (excluded simplices) are treated as
/// zero, i.e. homology relative to the excluded subcomplex.
///
/// Columns are reduced from the highest needed boundary dimension down, and
/// a column whose simplex is already a pivot one dimension up is skipped
/// (clearing). Zero-length bars are discarded. Throws ContractError when the
/// filtration is not sorted.
Barcode compute_barcode(const Filtration& filtration, const std::set<int>& dims);

/// Sum of (death - birth) over finite bars of the given dimension.
double total_persistence(const Barcode& barcode, int dim);

/// Writes `dim,birth,death` rows (death printed as `inf` for essential bars).
void write_barcode_csv(std::ostream& out, const Barcode& barcode);
void save_barcode_csv(const std::string& path, const Barcode& barcode);

/// Reads the CSV produced by write_barcode_csv. Simplex ids are left at zero.
Barcode load_barcode_csv(const std::string& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace rtd
