#include "rtd/persistence.hpp"

#include "rtd/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace rtd {

FilteredSimplex::FilteredSimplex(std::span<const int> vertices, double value) : value_(value) {
    if (vertices.empty() || vertices.size() > kMaxSimplexVertices) {
        throw InputError("simplex must have between 1 and " +
                         std::to_string(kMaxSimplexVertices) + " vertices");
    }
    count_ = vertices.size();
    for (std::size_t i = 0; i < count_; ++i) {
        if (vertices[i] < 0 || vertices[i] > std::numeric_limits<std::uint16_t>::max()) {
            throw InputError("vertex index out of range");
        }
        if (i > 0 && vertices[i] <= vertices[i - 1]) {
            throw InputError("simplex vertices must be strictly increasing");
        }
        verts_[i] = static_cast<std::uint16_t>(vertices[i]);
    }
}

bool operator<(const FilteredSimplex& a, const FilteredSimplex& b) {
    if (a.value_ != b.value_) return a.value_ < b.value_;
    if (a.count_ != b.count_) return a.count_ < b.count_;
    return std::lexicographical_compare(a.verts_.begin(), a.verts_.begin() + a.count_,
                                        b.verts_.begin(), b.verts_.begin() + b.count_);
}

bool operator==(const FilteredSimplex& a, const FilteredSimplex& b) {
    return a.value_ == b.value_ && a.count_ == b.count_ &&
           std::equal(a.verts_.begin(), a.verts_.begin() + a.count_, b.verts_.begin());
}

ExclusionPredicate exclude_first_half(int half) {
    return [half](std::span<const std::uint16_t> vertices) {
        // vertices are sorted, so the largest one decides
        return static_cast<int>(vertices.back()) < half;
    };
}

Filtration build_filtration(const DistanceMatrix& w, const FiltrationOptions& options) {
    if (options.max_dim < 0) {
        throw InputError("max_dim must be non-negative");
    }
    if (options.max_dim >= kMaxSimplexVertices) {
        throw InputError("max_dim exceeds the supported simplex dimension");
    }
    const int n = w.size();
    if (n > std::numeric_limits<std::uint16_t>::max()) {
        throw InputError("too many vertices for a filtration");
    }

    Filtration out;
    std::vector<int> current;
    std::vector<std::uint16_t> current16;
    current.reserve(static_cast<std::size_t>(options.max_dim) + 1);
    const auto& m = w.matrix();

    auto emit = [&](double value) {
        if (options.exclusion) {
            current16.assign(current.begin(), current.end());
            if (options.exclusion(current16)) return;
        }
        out.emplace_back(current, value);
    };

    // Depth-first over increasing vertex sets; a superset never has a smaller
    // value, so branches are pruned as soon as they exceed the bound.
    auto extend = [&](auto&& self, double value) -> void {
        if (static_cast<int>(current.size()) > options.max_dim) return;
        const double bound = options.max_value;
        for (int v = current.back() + 1; v < n; ++v) {
            double next = value;
            bool admissible = true;
            for (int u : current) {
                const double e = m(u, v);
                if (e == kInfinity || e > bound) {
                    admissible = false;
                    break;
                }
                next = std::max(next, e);
            }
            if (!admissible) continue;
            current.push_back(v);
            emit(next);
            self(self, next);
            current.pop_back();
        }
    };

    for (int v = 0; v < n; ++v) {
        current.assign(1, v);
        emit(0.0);
        extend(extend, 0.0);
    }
    // Depth-first emission is lexicographic within each dimension, so ordering
    // by (value, dim, emission index) is the filtration order. Sorting compact
    // keys is much cheaper than comparing whole simplices.
    std::vector<std::pair<double, std::uint64_t>> keys(out.size());
    for (std::size_t p = 0; p < out.size(); ++p) {
        keys[p] = {out[p].value(), (static_cast<std::uint64_t>(out[p].dim()) << 44) | p};
    }
    std::sort(keys.begin(), keys.end());
    Filtration sorted;
    sorted.reserve(out.size());
    constexpr std::uint64_t kIndexMask = (std::uint64_t{1} << 44) - 1;
    for (const auto& key : keys) sorted.push_back(out[key.second & kIndexMask]);
    return sorted;
}

std::vector<Bar> Barcode::in_dim(int dim) const {
    std::vector<Bar> out;
    for (const auto& bar : bars) {
        if (bar.dim == dim) out.push_back(bar);
    }
    return out;
}

namespace {

/// Maps vertex sets of one dimension to their rank among the simplices of
/// that dimension, through the combinatorial number system. Ranks follow
/// filtration order, so comparing ranks compares positions.
class SimplexIndex {
public:
    SimplexIndex(const Filtration& filtration, const std::vector<SimplexId>& members, int dim,
                 int vertex_count)
        : k_(dim + 1) {
        binom_.assign(static_cast<std::size_t>(vertex_count) + 1,
                      std::vector<std::uint64_t>(static_cast<std::size_t>(k_) + 1, 0));
        for (int v = 0; v <= vertex_count; ++v) {
            binom_[v][0] = 1;
            for (int j = 1; j <= k_ && j <= v; ++j) {
                const std::uint64_t a = binom_[v - 1][j - 1];
                const std::uint64_t b = binom_[v - 1][j];
                if (a > std::numeric_limits<std::uint64_t>::max() - b) {
                    throw InputError("simplex index overflow");
                }
                binom_[v][j] = a + b;
            }
        }
        const std::uint64_t total = binom_[vertex_count][k_];
        dense_ = total <= (std::uint64_t{1} << 26);
        if (dense_) table_.assign(total, kMissing);
        for (std::size_t r = 0; r < members.size(); ++r) {
            const auto key = key_of(filtration[members[r]].vertices());
            const auto rank = static_cast<std::uint32_t>(r);
            if (dense_) {
                table_[key] = rank;
            } else {
                sparse_.emplace(key, rank);
            }
        }
    }

    /// Rank of the face obtained by dropping vertex `skip`, or kMissing.
    std::uint32_t face(std::span<const std::uint16_t> vertices, std::size_t skip) const {
        std::uint64_t key = 0;
        int slot = 1;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (i == skip) continue;
            key += binom_[vertices[i]][slot++];
        }
        if (dense_) return table_[key];
        const auto it = sparse_.find(key);
        return it == sparse_.end() ? kMissing : it->second;
    }

    static constexpr std::uint32_t kMissing = std::numeric_limits<std::uint32_t>::max();

private:
    std::uint64_t key_of(std::span<const std::uint16_t> vertices) const {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < vertices.size(); ++i) key += binom_[vertices[i]][i + 1];
        return key;
    }

    int k_;
    std::vector<std::vector<std::uint64_t>> binom_;
    bool dense_ = true;
    std::vector<std::uint32_t> table_;
    std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
};

/// Sorted row indices of a column. The buffer only ever grows, so the hot
/// loop never reinitialises memory.
struct Column {
    std::vector<std::uint32_t> buffer;
    std::size_t size = 0;

    void ensure(std::size_t n) {
        if (buffer.size() < n) buffer.resize(2 * n);
    }
    bool empty() const noexcept { return size == 0; }
    std::uint32_t back() const { return buffer[size - 1]; }
    std::uint32_t* begin() noexcept { return buffer.data(); }
    std::uint32_t* end() noexcept { return buffer.data() + size; }
    void push_back(std::uint32_t row) {
        ensure(size + 1);
        buffer[size++] = row;
    }
};

/// target ^= [b, b_end) over Z/2; both sorted. Columns are short (a handful of
/// entries), so a plain merge beats the generic algorithms.
void add_columns(Column& target, const std::uint32_t* b, const std::uint32_t* const b_end,
                 Column& scratch) {
    scratch.ensure(target.size + static_cast<std::size_t>(b_end - b));
    const std::uint32_t* a = target.begin();
    const std::uint32_t* const a_end = target.end();
    std::uint32_t* out = scratch.begin();
    // Branch-free: the comparisons are unpredictable, so select instead.
    while (a != a_end && b != b_end) {
        const std::uint32_t x = *a;
        const std::uint32_t y = *b;
        *out = x < y ? x : y;
        out += x != y;
        a += x <= y;
        b += y <= x;
    }
    while (a != a_end) *out++ = *a++;
    while (b != b_end) *out++ = *b++;
    scratch.size = static_cast<std::size_t>(out - scratch.begin());
    std::swap(target, scratch);
}

}  // namespace

Barcode compute_barcode(const Filtration& filtration, const std::set<int>& dims) {
    for (std::size_t p = 1; p < filtration.size(); ++p) {
        if (filtration[p] < filtration[p - 1]) {
            throw ContractError("filtration is not sorted at position " + std::to_string(p));
        }
    }
    Barcode barcode;
    if (dims.empty() || filtration.empty()) return barcode;
    if (*dims.begin() < 0) throw InputError("barcode dimension must be non-negative");
    if (filtration.size() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
        throw InputError("filtration too large");
    }

    int vertex_count = 0;
    int filtration_dim = 0;
    for (const auto& s : filtration) {
        vertex_count = std::max(vertex_count, static_cast<int>(s.vertices().back()) + 1);
        filtration_dim = std::max(filtration_dim, s.dim());
    }
    // by_dim[d]: filtration positions of the d-simplices, in order.
    std::vector<std::vector<SimplexId>> by_dim(static_cast<std::size_t>(filtration_dim) + 1);
    for (SimplexId p = 0; p < filtration.size(); ++p) {
        by_dim[static_cast<std::size_t>(filtration[p].dim())].push_back(p);
    }

    const int top = *dims.rbegin() + 1;
    const int bottom = std::max(1, *dims.begin());

    // cleared[p]: p is the pivot of a reduced column one dimension up, so its
    // own column would reduce to zero. negative[p]: p has a nonzero reduced column.
    std::vector<char> cleared(filtration.size(), 0);
    std::vector<char> negative(filtration.size(), 0);
    // Reduced columns, stored back to back: column c is
    // reduced_rows[reduced_start[c] .. reduced_start[c + 1]). Rows are ranks
    // within the face dimension, which keeps the hot data small.
    std::vector<std::uint32_t> reduced_rows;
    std::vector<std::uint32_t> reduced_start;
    std::vector<std::int32_t> pivot_column;
    Column working;
    Column scratch;

    for (int b = std::min(top, filtration_dim); b >= bottom; --b) {
        const auto& rows = by_dim[static_cast<std::size_t>(b - 1)];
        const SimplexIndex faces(filtration, rows, b - 1, vertex_count);
        pivot_column.assign(rows.size(), -1);
        reduced_rows.clear();
        reduced_start.assign(1, 0);
        const bool wanted = dims.count(b - 1) > 0;
        for (const SimplexId j : by_dim[static_cast<std::size_t>(b)]) {
            if (cleared[j]) continue;
            working.size = 0;
            const auto verts = filtration[j].vertices();
            for (std::size_t skip = 0; skip < verts.size(); ++skip) {
                const std::uint32_t f = faces.face(verts, skip);
                if (f != SimplexIndex::kMissing) working.push_back(f);
            }
            std::sort(working.begin(), working.end());
            while (!working.empty()) {
                const auto owner = pivot_column[working.back()];
                if (owner < 0) break;
                const std::uint32_t* first = reduced_rows.data() + reduced_start[static_cast<std::size_t>(owner)];
                const std::uint32_t* last = reduced_rows.data() + reduced_start[static_cast<std::size_t>(owner) + 1];
                add_columns(working, first, last, scratch);
            }
            if (working.empty()) continue;
            pivot_column[working.back()] = static_cast<std::int32_t>(reduced_start.size() - 1);
            reduced_rows.insert(reduced_rows.end(), working.begin(), working.end());
            reduced_start.push_back(static_cast<std::uint32_t>(reduced_rows.size()));
            const SimplexId low = rows[working.back()];
            negative[j] = 1;
            cleared[low] = 1;
            if (wanted && filtration[j].value() > filtration[low].value()) {
                barcode.bars.push_back(Bar{filtration[low].value(), filtration[j].value(), b - 1,
                                           low, j});
            }
        }
    }

    // Essential classes: positive simplices that were never paired. Vertices
    // are always positive; higher simplices are positive iff their column
    // reduced to zero, which requires that boundary to have been processed.
    for (SimplexId p = 0; p < filtration.size(); ++p) {
        const int d = filtration[p].dim();
        if (!dims.count(d) || cleared[p] || negative[p]) continue;
        barcode.bars.push_back(Bar{filtration[p].value(), kInfinity, d, p, std::nullopt});
    }

    std::stable_sort(barcode.bars.begin(), barcode.bars.end(), [](const Bar& a, const Bar& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    return barcode;
}

double total_persistence(const Barcode& barcode, int dim) {
    double sum = 0.0;
    for (const auto& bar : barcode.bars) {
        if (bar.dim == dim && bar.finite()) sum += bar.death - bar.birth;
    }
    return sum;
}

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void write_barcode_csv(std::ostream& out, const Barcode& barcode) {
    out << "dim,birth,death\n";
    for (const auto& bar : barcode.bars) {
        out << bar.dim << ',' << format_double(bar.birth) << ','
            << (bar.finite() ? format_double(bar.death) : std::string("inf")) << '\n';
    }
}

void save_barcode_csv(const std::string& path, const Barcode& barcode) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    write_barcode_csv(out, barcode);
}

Barcode load_barcode_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    Barcode barcode;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("dim", 0) == 0)) continue;
        std::stringstream ss(line);
        std::string dim_s, birth_s, death_s;
        if (!std::getline(ss, dim_s, ',') || !std::getline(ss, birth_s, ',') ||
            !std::getline(ss, death_s)) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected dim,birth,death");
        }
        try {
            Bar bar;
            bar.dim = std::stoi(dim_s);
            bar.birth = std::stod(birth_s);
            if (death_s == "inf") {
                bar.death = kInfinity;
            } else {
                bar.death = std::stod(death_s);
                bar.death_simplex = 0;
            }
            barcode.bars.push_back(bar);
        } catch (const std::exception&) {
            throw InputError(path + ":" + std::to_string(line_no) + ": non-numeric barcode cell");
        }
    }
    return barcode;
}

}  // namespace rtd
