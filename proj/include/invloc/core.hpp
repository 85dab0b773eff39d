#ifndef INVLOC_CORE_HPP
#define INVLOC_CORE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invloc {

/// Raised when an instance cannot be solved (e.g. total weight zero).
struct DegenerateInstanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an inverse subproblem has no feasible modification.
struct SubproblemInfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative subproblem solver fails to reach feasibility.
struct SubproblemFailureError : std::runtime_error {
    double best_residual;
    explicit SubproblemFailureError(const std::string& msg, double residual)
        : std::runtime_error(msg), best_residual(residual) {}
};

/// Raised when the LP engine gives up (pivot cap), distinct from Infeasible.
struct SolverFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    Point() = default;
    Point(double x_, double y_) : x(x_), y(y_) {
        if (!std::isfinite(x) || !std::isfinite(y))
            throw std::invalid_argument("Point: coordinates must be finite");
    }
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

struct Site {
    Point position;
    double weight = 0.0;

    Site() = default;
    Site(Point pos, double w) : position(pos), weight(w) {
        if (!std::isfinite(weight) || weight < 0.0)
            throw std::invalid_argument("Site: weight must be finite and nonnegative");
    }
};

/// Per-unit prices for moving one site: increases (r) and decreases (s) per axis.
struct CostVector {
    double inc_x = 0.0;
    double inc_y = 0.0;
    double dec_x = 0.0;
    double dec_y = 0.0;

    CostVector() = default;
    CostVector(double ix, double iy, double dx, double dy)
        : inc_x(ix), inc_y(iy), dec_x(dx), dec_y(dy) {
        for (double c : {inc_x, inc_y, dec_x, dec_y})
            if (!std::isfinite(c) || c < 0.0)
                throw std::invalid_argument("CostVector: entries must be finite and nonnegative");
    }
};

enum class NormTag { SquaredEuclidean, Euclidean, Rectilinear };

/// Immutable problem statement: client sites, modification prices, norm.
class Instance {
public:
    Instance(std::vector<Site> sites, std::vector<CostVector> costs, NormTag norm)
        : sites_(std::move(sites)), costs_(std::move(costs)), norm_(norm) {
        if (sites_.empty())
            throw std::invalid_argument("Instance: needs at least one site");
        if (sites_.size() != costs_.size())
            throw std::invalid_argument("Instance: sites and costs must have equal length");
    }

    const std::vector<Site>& sites() const { return sites_; }
    const std::vector<CostVector>& costs() const { return costs_; }
    NormTag norm() const { return norm_; }
    std::size_t size() const { return sites_.size(); }

    double total_weight() const {
        double w = 0.0;
        for (const auto& s : sites_) w += s.weight;
        return w;
    }

private:
    std::vector<Site> sites_;
    std::vector<CostVector> costs_;
    NormTag norm_;
};

/// Nonnegative per-site coordinate increases (r) and decreases (s).
struct Modification {
    std::vector<std::pair<double, double>> r;  // (r_i1, r_i2)
    std::vector<std::pair<double, double>> s;  // (s_i1, s_i2)

    static Modification zero(std::size_t n) {
        Modification m;
        m.r.assign(n, {0.0, 0.0});
        m.s.assign(n, {0.0, 0.0});
        return m;
    }

    std::size_t size() const { return r.size(); }
};

inline double distance(NormTag norm, const Point& p, const Point& q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    switch (norm) {
        case NormTag::SquaredEuclidean: return dx * dx + dy * dy;
        case NormTag::Euclidean: return std::sqrt(dx * dx + dy * dy);
        case NormTag::Rectilinear: return std::abs(dx) + std::abs(dy);
    }
    return 0.0;  // unreachable
}

/// Weighted sum of distances from x to every site.
inline double objective(const Instance& instance, const Point& x) {
    double total = 0.0;
    for (const auto& site : instance.sites())
        total += site.weight * distance(instance.norm(), x, site.position);
    return total;
}

/// New instance with coordinates shifted by r - s; weights, costs, norm kept.
inline Instance apply(const Instance& instance, const Modification& m) {
    if (m.r.size() != instance.size() || m.s.size() != instance.size())
        throw std::invalid_argument("apply: modification length mismatch");
    std::vector<Site> moved;
    moved.reserve(instance.size());
    for (std::size_t i = 0; i < instance.size(); ++i) {
        const Site& site = instance.sites()[i];
        moved.emplace_back(Point(site.position.x + m.r[i].first - m.s[i].first,
                                 site.position.y + m.r[i].second - m.s[i].second),
                           site.weight);
    }
    return Instance(std::move(moved), instance.costs(), instance.norm());
}

inline double modification_cost(const std::vector<CostVector>& costs, const Modification& m) {
    if (m.r.size() != costs.size() || m.s.size() != costs.size())
        throw std::invalid_argument("modification_cost: length mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        total += costs[i].inc_x * m.r[i].first + costs[i].inc_y * m.r[i].second +
                 costs[i].dec_x * m.s[i].first + costs[i].dec_y * m.s[i].second;
    }
    return total;
}

}  // namespace invloc

#endif  // INVLOC_CORE_HPP
