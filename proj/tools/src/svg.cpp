#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

namespace rtd::cli {

namespace {

constexpr std::array<const char*, 4> kDimColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    // degenerate spans get a unit window so the mapping stays finite
    void pad() {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double extra = 0.04 * (hi - lo);
        lo -= extra;
        hi += extra;
    }
    double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::string escape(const std::string& text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void open_svg(std::ostringstream& o, const PlotStyle& st) {
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << st.width << "\" height=\"" << st.height
      << "\" viewBox=\"0 0 " << st.width << ' ' << st.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!st.title.empty()) {
        o << "<text x=\"" << st.width / 2 << "\" y=\"" << st.margin / 2
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape(st.title)
          << "</text>\n";
    }
}

// Two axes through the lower-left corner with end labels.
void axes(std::ostringstream& o, const PlotStyle& st, const Range& x, const Range* y) {
    const int l = st.margin, r = st.width - st.margin, t = st.margin, b = st.height - st.margin;
    o << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << l << "\" y1=\"" << b << "\" x2=\"" << r << "\" y2=\"" << b << "\"/>\n"
      << "<line x1=\"" << l << "\" y1=\"" << b << "\" x2=\"" << l << "\" y2=\"" << t << "\"/>\n"
      << "</g>\n"
      << "<g font-family=\"sans-serif\" font-size=\"10\">\n"
      << "<text x=\"" << l << "\" y=\"" << b + 14 << "\" text-anchor=\"middle\">" << num(x.lo) << "</text>\n"
      << "<text x=\"" << r << "\" y=\"" << b + 14 << "\" text-anchor=\"middle\">" << num(x.hi) << "</text>\n";
    if (y) {
        o << "<text x=\"" << l - 4 << "\" y=\"" << b << "\" text-anchor=\"end\">" << num(y->lo) << "</text>\n"
          << "<text x=\"" << l - 4 << "\" y=\"" << t + 4 << "\" text-anchor=\"end\">" << num(y->hi)
          << "</text>\n";
    }
    o << "</g>\n";
}

}  // namespace

std::string scatter_svg(const PointCloud& cloud, const PlotStyle& st) {
    Range x{0.0, 0.0};
    Range y{0.0, 0.0};
    const bool flat = cloud.dim() < 2;
    if (cloud.size() > 0 && cloud.dim() > 0) {
        x = {cloud.points().col(0).minCoeff(), cloud.points().col(0).maxCoeff()};
        if (!flat) y = {cloud.points().col(1).minCoeff(), cloud.points().col(1).maxCoeff()};
    }
    x.pad();
    y.pad();
    std::ostringstream o;
    open_svg(o, st);
    axes(o, st, x, &y);
    const double l = st.margin, r = st.width - st.margin, t = st.margin, b = st.height - st.margin;
    o << "<g fill=\"" << kDimColors[0] << "\" fill-opacity=\"0.8\">\n";
    if (cloud.dim() > 0) {
        for (int i = 0; i < cloud.size(); ++i) {
            const double px = x.map(cloud(i, 0), l, r);
            const double py = y.map(flat ? 0.0 : cloud(i, 1), b, t);
            o << "<circle class=\"pt\" cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"2.5\"/>\n";
        }
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

std::string barcode_svg(const Barcode& barcode, const PlotStyle& st) {
    std::vector<Bar> bars = barcode.bars;
    std::sort(bars.begin(), bars.end(), [](const Bar& a, const Bar& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    Range x{0.0, 0.0};
    for (const auto& bar : bars) {
        x.hi = std::max(x.hi, bar.birth);
        if (bar.finite()) x.hi = std::max(x.hi, bar.death);
        x.lo = std::min(x.lo, bar.birth);
    }
    if (!(x.hi > x.lo)) x.hi = x.lo + 1.0;
    x.hi += 0.08 * (x.hi - x.lo);  // room for arrowheads

    std::ostringstream o;
    open_svg(o, st);
    axes(o, st, x, nullptr);
    const double l = st.margin, r = st.width - st.margin, t = st.margin, b = st.height - st.margin;
    const double step = bars.empty() ? 0.0 : (b - t) / static_cast<double>(bars.size() + 1);
    o << "<g stroke-width=\"2\" stroke-linecap=\"butt\">\n";
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto& bar = bars[i];
        const char* color = kDimColors[static_cast<std::size_t>(std::max(bar.dim, 0)) % kDimColors.size()];
        const double y = b - step * static_cast<double>(i + 1);
        const double x1 = x.map(bar.birth, l, r);
        const double x2 = bar.finite() ? x.map(bar.death, l, r) : r;
        o << "<line class=\"bar\" data-dim=\"" << bar.dim << "\" x1=\"" << num(x1) << "\" y1=\"" << num(y)
          << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y) << "\" stroke=\"" << color << "\"/>\n";
        if (!bar.finite()) {
            o << "<polygon points=\"" << num(r) << ',' << num(y - 4) << ' ' << num(r + 7) << ',' << num(y) << ' '
              << num(r) << ',' << num(y + 4) << "\" fill=\"" << color << "\"/>\n";
        }
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

}  // namespace rtd::cli
