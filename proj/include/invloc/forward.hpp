#ifndef INVLOC_FORWARD_HPP
#define INVLOC_FORWARD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "invloc/core.hpp"

namespace invloc {

struct MedianResult {
    Point location;
    double value = 0.0;
    std::size_t iterations = 0;
};

namespace detail {
inline void require_positive_weight(const Instance& instance) {
    if (instance.total_weight() <= 0.0)
        throw DegenerateInstanceError("forward: total weight must be positive");
}
}  // namespace detail

/// Weighted centroid — the exact squared-Euclidean 1-median.
inline Point centroid(const Instance& instance) {
    detail::require_positive_weight(instance);
    double sx = 0.0, sy = 0.0, sw = 0.0;
    for (const auto& site : instance.sites()) {
        sx += site.weight * site.position.x;
        sy += site.weight * site.position.y;
        sw += site.weight;
    }
    return Point(sx / sw, sy / sw);
}

/// Fixed-point iteration for the Euclidean 1-median, started at the centroid.
/// An iterate landing on a site is nudged by tol in +x before continuing.
inline MedianResult weiszfeld(const Instance& instance, double tol = 1e-7,
                              std::size_t max_iter = 10000) {
    detail::require_positive_weight(instance);
    Point x = centroid(instance);
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        double num_x = 0.0, num_y = 0.0, denom = 0.0;
        double pull_x = 0.0, pull_y = 0.0, weight_here = 0.0;
        for (const auto& site : instance.sites()) {
            if (site.weight == 0.0) continue;
            const double d = distance(NormTag::Euclidean, x, site.position);
            if (d < 1e-12) {
                weight_here += site.weight;
                continue;
            }
            num_x += site.weight * site.position.x / d;
            num_y += site.weight * site.position.y / d;
            denom += site.weight / d;
            pull_x += site.weight * (site.position.x - x.x) / d;
            pull_y += site.weight * (site.position.y - x.y) / d;
        }
        if (weight_here > 0.0) {
            // A site is a 1-median iff the pull of the others does not exceed
            // its own weight; otherwise step off it and continue.
            if (std::hypot(pull_x, pull_y) <= weight_here + 1e-12) break;
            x = Point(x.x + tol, x.y);
            continue;
        }
        const Point next(num_x / denom, num_y / denom);
        const double move = distance(NormTag::Euclidean, x, next);
        x = next;
        if (move < tol) {
            ++it;
            break;
        }
    }
    return MedianResult{x, objective(instance, x), it};
}

/// Coordinate-separable lower weighted median — exact rectilinear 1-median.
inline Point weighted_median(const Instance& instance) {
    detail::require_positive_weight(instance);
    const double half = instance.total_weight() / 2.0;
    auto pick = [&](auto coord_of) {
        std::vector<std::size_t> order(instance.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return coord_of(instance.sites()[a]) < coord_of(instance.sites()[b]);
        });
        double cum = 0.0;
        for (std::size_t idx : order) {
            cum += instance.sites()[idx].weight;
            if (cum >= half) return coord_of(instance.sites()[idx]);
        }
        return coord_of(instance.sites()[order.back()]);
    };
    return Point(pick([](const Site& s) { return s.position.x; }),
                 pick([](const Site& s) { return s.position.y; }));
}

/// Forward minisum solve, dispatching on the instance norm.
inline MedianResult solve_median(const Instance& instance, double tol = 1e-7,
                                 std::size_t max_iter = 10000) {
    detail::require_positive_weight(instance);
    switch (instance.norm()) {
        case NormTag::SquaredEuclidean: {
            const Point c = centroid(instance);
            return MedianResult{c, objective(instance, c), 0};
        }
        case NormTag::Euclidean:
            return weiszfeld(instance, tol, max_iter);
        case NormTag::Rectilinear: {
            const Point m = weighted_median(instance);
            return MedianResult{m, objective(instance, m), 0};
        }
    }
    throw std::logic_error("solve_median: unknown norm");
}

}  // namespace invloc

#endif  // INVLOC_FORWARD_HPP
