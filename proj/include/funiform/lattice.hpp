#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "funiform/error.hpp"
#include "funiform/interp.hpp"
#include "funiform/metric.hpp"
#include "funiform/quadrature.hpp"

namespace funiform {

/// Maximal epsilon-separated point set on a metric interval.  Points are
/// ascending; consecutive points sit at distance >= epsilon and no interval
/// point can be added without breaking the separation.
struct EpsilonLattice {
    std::string metric_name;
    double epsilon = 0.0;
    std::vector<double> points;

    std::size_t size() const { return points.size(); }
};

namespace detail {

/// Coarse monotonicity probe: for anchors theta, d(theta, theta') must grow
/// strictly with |theta - theta'|.  Guards the sequential marching scheme.
inline void check_monotone_distance(const MetricSpace& ms) {
    const double lo = ms.space.lo, hi = ms.space.hi;
    const int anchors = 9, offsets = 12;
    for (int a = 0; a <= anchors; ++a) {
        const double t = lo + (hi - lo) * a / anchors;
        for (int sign : {-1, 1}) {
            double prev = 0.0;
            for (int k = 1; k <= offsets; ++k) {
                const double u = t + sign * (hi - lo) * k / (2.0 * offsets);
                if (u < lo || u > hi) break;
                const double d = ms.dist(t, u);
                if (!(d > prev - 1e-13))
                    throw input_error("build_epsilon_lattice: distance from " + std::to_string(t) +
                                      " is not increasing in |offset| near " + std::to_string(u));
                prev = d;
            }
        }
    }
}

} // namespace detail

/// Builds the lattice by marching from the lower interval endpoint: each next
/// point is the smallest t with dist(prev, t) >= epsilon, located by bisection
/// to 1e-12 in parameter units.  An epsilon larger than the space diameter
/// yields the single-point lattice {lo}.
inline EpsilonLattice build_epsilon_lattice(const MetricSpace& ms, double epsilon,
                                            double bisect_tol = 1e-12) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw input_error("build_epsilon_lattice: epsilon must be positive and finite");
    detail::check_monotone_distance(ms);

    EpsilonLattice lat;
    lat.metric_name = ms.name;
    lat.epsilon = epsilon;
    constexpr double separation_slack = 1e-10;
    const double hi = ms.space.hi;
    double prev = ms.space.lo;
    lat.points.push_back(prev);
    while (true) {
        const double dhi = ms.dist(prev, hi);
        if (dhi < epsilon) {
            // endpoint admissible within the separation slack; close the lattice
            if (dhi >= epsilon - separation_slack && hi > prev) lat.points.push_back(hi);
            break;
        }
        // invariant: dist(prev, b) >= epsilon > dist(prev, a)
        double a = prev, b = hi;
        while (b - a > bisect_tol) {
            const double mid = 0.5 * (a + b);
            if (ms.dist(prev, mid) >= epsilon)
                b = mid;
            else
                a = mid;
        }
        if (!(b > prev))
            throw numerical_error("build_epsilon_lattice: marching stalled at " + std::to_string(prev));
        lat.points.push_back(b);
        prev = b;
    }
    for (std::size_t i = 0; i + 1 < lat.points.size(); ++i)
        if (ms.dist(lat.points[i], lat.points[i + 1]) < epsilon - 1e-10)
            throw numerical_error("build_epsilon_lattice: separation lost after bisection");
    return lat;
}

/// Checks maximality against an equispaced audit grid: no candidate may be
/// insertable, i.e. sit at distance >= epsilon (plus slack matching the
/// bisection tolerance) from every lattice point.  Monotone distances mean
/// only the two bracketing lattice points need to be probed.
inline bool audit_lattice_maximality(const MetricSpace& ms, const EpsilonLattice& lat,
                                     std::size_t grid_points = 10000) {
    const std::vector<double>& p = lat.points;
    for (std::size_t i = 0; i <= grid_points; ++i) {
        const double c = ms.space.lo + (ms.space.hi - ms.space.lo) *
                                           static_cast<double>(i) / static_cast<double>(grid_points);
        auto it = std::lower_bound(p.begin(), p.end(), c);
        double dmin = std::numeric_limits<double>::infinity();
        if (it != p.end()) dmin = std::min(dmin, ms.dist(c, *it));
        if (it != p.begin()) dmin = std::min(dmin, ms.dist(c, *(it - 1)));
        if (dmin >= lat.epsilon + 1e-9) return false;
    }
    return true;
}

/// Pseudo-probability of a subinterval: the ratio of lattice cardinalities
/// |S_eps(sub)| / |S_eps(space)| at a common epsilon.
inline double pseudo_probability(const MetricSpace& ms, double epsilon, const Interval& sub) {
    if (!(sub.lo >= ms.space.lo - 1e-12) || !(sub.hi <= ms.space.hi + 1e-12) || !(sub.lo < sub.hi))
        throw input_error("pseudo_probability: subinterval must lie inside the metric space");
    MetricSpace restricted = ms;
    restricted.space = {std::max(sub.lo, ms.space.lo), std::min(sub.hi, ms.space.hi)};
    const EpsilonLattice whole = build_epsilon_lattice(ms, epsilon);
    const EpsilonLattice part = build_epsilon_lattice(restricted, epsilon);
    return static_cast<double>(part.size()) / static_cast<double>(whole.size());
}

/// Density estimate read off a lattice: empirical distribution function of
/// the points, interpolated by a monotone cubic, differentiated piecewise and
/// renormalized so the trapezoid integral over the grid is one.
struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> cdf;
};

inline DensityEstimate lattice_density(const EpsilonLattice& lat, std::size_t grid_size = 512) {
    const std::size_t m = lat.points.size();
    if (m < 10)
        throw input_error("lattice_density: need at least 10 lattice points, got " +
                          std::to_string(m));
    if (grid_size < 8) throw input_error("lattice_density: grid_size too small");

    std::vector<double> xs = lat.points;
    std::vector<double> ys(m);
    for (std::size_t i = 0; i < m; ++i)
        ys[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    const MonotoneCubic spline(std::move(xs), std::move(ys));

    DensityEstimate est;
    est.grid.resize(grid_size);
    est.density.resize(grid_size);
    est.cdf.resize(grid_size);
    const double a = lat.points.front(), b = lat.points.back();
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
        est.grid[i] = t;
        est.cdf[i] = std::min(1.0, std::max(0.0, spline(t)));
        est.density[i] = std::max(0.0, spline.derivative(t));
    }
    const double mass = quad::trapezoid(est.grid, est.density);
    if (!(mass > 0.0))
        throw numerical_error("lattice_density: interpolated density has no mass");
    for (double& d : est.density) d /= mass;
    return est;
}

} // namespace funiform
