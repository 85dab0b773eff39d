#ifndef INVLOC_IO_HPP
#define INVLOC_IO_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "invloc/core.hpp"
#include "invloc/inverse.hpp"

namespace invloc {

struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(std::size_t line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

namespace iodetail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) fields.push_back(cur);
    return fields;
}

inline double parse_number(const std::string& s, std::size_t line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(line_no, "not a number: '" + s + "'");
    }
    if (pos != s.size()) throw ParseError(line_no, "trailing characters in number: '" + s + "'");
    return v;
}

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace iodetail

inline NormTag parse_norm_tag(const std::string& text) {
    const std::string t = iodetail::lowercase(iodetail::trim(text));
    if (t == "sq" || t == "squaredeuclidean" || t == "squared_euclidean")
        return NormTag::SquaredEuclidean;
    if (t == "l2" || t == "euclidean") return NormTag::Euclidean;
    if (t == "l1" || t == "rectilinear") return NormTag::Rectilinear;
    throw std::invalid_argument("unknown norm tag: '" + text + "'");
}

inline const char* norm_name(NormTag norm) {
    switch (norm) {
        case NormTag::SquaredEuclidean: return "sq";
        case NormTag::Euclidean: return "l2";
        case NormTag::Rectilinear: return "l1";
    }
    return "?";
}

/// One site per line: a b w c1+ c2+ c1- c2- (comma or whitespace separated).
/// '#' lines are comments; an optional 'norm=<tag>' line sets the norm.
inline Instance parse_instance(std::istream& in) {
    std::vector<Site> sites;
    std::vector<CostVector> costs;
    NormTag norm = NormTag::SquaredEuclidean;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = iodetail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("norm=", 0) == 0) {
            try {
                norm = parse_norm_tag(t.substr(5));
            } catch (const std::invalid_argument& e) {
                throw ParseError(line_no, e.what());
            }
            continue;
        }
        const auto fields = iodetail::split_fields(t);
        if (fields.size() != 7)
            throw ParseError(line_no, "expected 7 fields, got " + std::to_string(fields.size()));
        double v[7];
        for (int i = 0; i < 7; ++i) v[i] = iodetail::parse_number(fields[i], line_no);
        if (v[2] < 0.0) throw ParseError(line_no, "negative weight");
        for (int i = 3; i < 7; ++i)
            if (v[i] < 0.0) throw ParseError(line_no, "negative cost");
        try {
            sites.emplace_back(Point(v[0], v[1]), v[2]);
            costs.emplace_back(v[3], v[4], v[5], v[6]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (sites.empty()) throw ParseError(line_no, "no sites (at least one required)");
    return Instance(std::move(sites), std::move(costs), norm);
}

/// Bare two-column coordinate files (OR-Library style): one "x y" per line.
inline std::vector<Point> load_xy_points(std::istream& in) {
    std::vector<Point> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = iodetail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = iodetail::split_fields(t);
        if (fields.size() != 2)
            throw ParseError(line_no, "expected 2 fields, got " + std::to_string(fields.size()));
        const double x = iodetail::parse_number(fields[0], line_no);
        const double y = iodetail::parse_number(fields[1], line_no);
        points.emplace_back(x, y);
    }
    return points;
}

/// Deterministic 64-bit LCG (Knuth MMIX constants); upper 53 bits -> [0,1).
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}
    double uniform(double lo, double hi) {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        const double u = static_cast<double>(state_ >> 11) / 9007199254740992.0;
        return lo + u * (hi - lo);
    }

private:
    std::uint64_t state_;
};

/// Attach seeded uniform weights and costs in [lo, hi] to bare points.
inline Instance attach_random_params(const std::vector<Point>& points, std::uint64_t seed,
                                     double lo, double hi,
                                     NormTag norm = NormTag::SquaredEuclidean) {
    if (points.empty()) throw std::invalid_argument("attach_random_params: empty point list");
    if (lo > hi) throw std::invalid_argument("attach_random_params: lo must be <= hi");
    Lcg64 rng(seed);
    std::vector<Site> sites;
    std::vector<CostVector> costs;
    sites.reserve(points.size());
    costs.reserve(points.size());
    for (const auto& p : points) {
        const double w = rng.uniform(lo, hi);
        const double c1 = rng.uniform(lo, hi);
        const double c2 = rng.uniform(lo, hi);
        const double c3 = rng.uniform(lo, hi);
        const double c4 = rng.uniform(lo, hi);
        sites.emplace_back(p, w);
        costs.emplace_back(c1, c2, c3, c4);
    }
    return Instance(std::move(sites), std::move(costs), norm);
}

inline const char* stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::GapMet: return "gap_met";
        case StopReason::Fixpoint: return "fixpoint";
        case StopReason::TargetHit: return "target_hit";
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::SubproblemFailed: return "subproblem_failed";
    }
    return "?";
}

/// Iteration trace as CSV plus trailing summary lines.
inline void emit_trace_csv(const SolveReport& report, std::ostream& out) {
    out << "k,x,y,f_k,f_target,gap,step_cost\n";
    out << std::fixed << std::setprecision(6);
    for (const auto& rec : report.iterations) {
        out << rec.k << ',' << rec.median.x << ',' << rec.median.y << ',' << rec.median_value
            << ',' << rec.target_value << ',' << rec.gap << ',' << rec.step_cost << '\n';
    }
    out << "accumulated_cost=" << report.accumulated_cost << '\n';
    out << "net_cost=" << report.net_cost << '\n';
    out << "stop=" << stop_reason_name(report.stop_reason) << '\n';
    out << "elapsed_s=" << report.elapsed_seconds << '\n';
}

/// Standalone SVG: hollow circles = initial sites, filled = final sites,
/// cross = target, thin segments = displacements.
inline void emit_svg(const Instance& initial, const SolveReport& report, const Point& target,
                     std::ostream& out) {
    double min_x = target.x, max_x = target.x, min_y = target.y, max_y = target.y;
    auto widen = [&](const Point& p) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    };
    for (const auto& s : initial.sites()) widen(s.position);
    for (const auto& p : report.final_coords) widen(p);

    double span_x = max_x - min_x, span_y = max_y - min_y;
    if (span_x <= 0.0) span_x = 1.0;
    if (span_y <= 0.0) span_y = 1.0;
    const double margin_x = 0.05 * span_x, margin_y = 0.05 * span_y;
    const double vb_x = min_x - margin_x, vb_y = min_y - margin_y;
    const double vb_w = span_x + 2.0 * margin_x, vb_h = span_y + 2.0 * margin_y;
    const double marker = 0.01 * std::max(vb_w, vb_h);

    out << std::fixed << std::setprecision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << vb_x << ' ' << vb_y << ' '
        << vb_w << ' ' << vb_h << "\">\n";
    // Flip y so larger coordinates plot upward.
    out << "<g transform=\"translate(0 " << (2.0 * vb_y + vb_h) << ") scale(1 -1)\">\n";
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const Point& a = initial.sites()[i].position;
        const Point& b = report.final_coords[i];
        out << "<line x1=\"" << a.x << "\" y1=\"" << a.y << "\" x2=\"" << b.x << "\" y2=\"" << b.y
            << "\" stroke=\"gray\" stroke-width=\"" << marker * 0.2 << "\"/>\n";
    }
    for (const auto& s : initial.sites())
        out << "<circle cx=\"" << s.position.x << "\" cy=\"" << s.position.y << "\" r=\"" << marker
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"" << marker * 0.3 << "\"/>\n";
    for (const auto& p : report.final_coords)
        out << "<circle cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\"" << marker
            << "\" fill=\"steelblue\"/>\n";
    const double c = 1.5 * marker;
    out << "<line x1=\"" << target.x - c << "\" y1=\"" << target.y << "\" x2=\"" << target.x + c
        << "\" y2=\"" << target.y << "\" stroke=\"red\" stroke-width=\"" << marker * 0.3
        << "\"/>\n";
    out << "<line x1=\"" << target.x << "\" y1=\"" << target.y - c << "\" x2=\"" << target.x
        << "\" y2=\"" << target.y + c << "\" stroke=\"red\" stroke-width=\"" << marker * 0.3
        << "\"/>\n";
    out << "</g>\n</svg>\n";
}

}  // namespace invloc

#endif  // INVLOC_IO_HPP
