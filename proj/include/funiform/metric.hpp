#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "funiform/box.hpp"
#include "funiform/error.hpp"
#include "funiform/quadrature.hpp"
#include "funiform/rng.hpp"

namespace funiform {

/// A one dimensional metric space: a parameter interval together with a
/// distance function on it.  dist must be a metric; verify_metric_axioms
/// performs a sampled check.
struct MetricSpace {
    std::string name;
    Interval space;
    std::function<double(double, double)> dist;
};

inline MetricSpace make_euclidean_metric(const Interval& iv) {
    MetricSpace ms;
    ms.name = "euclid";
    ms.space = iv;
    ms.dist = [](double a, double b) { return std::fabs(a - b); };
    return ms;
}

/// Euclidean norm of theta - theta_prime in any dimension; the vector-space
/// reference distance for local metric computations.
inline double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw input_error("euclidean_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Triangular density on (0, 1) with mode theta: rises linearly to 2 at the
/// mode, falls linearly to 0 at 1.
inline double triangular_pdf(double x, double theta) {
    if (!(theta > 0.0) || !(theta < 1.0))
        throw input_error("triangular_pdf: mode must lie strictly inside (0, 1)");
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return x <= theta ? 2.0 * x / theta : 2.0 * (1.0 - x) / (1.0 - theta);
}

/// Distribution function of the triangular density.
inline double triangular_cdf(double y, double theta) {
    if (!(theta > 0.0) || !(theta < 1.0))
        throw input_error("triangular_cdf: mode must lie strictly inside (0, 1)");
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    if (y <= theta) return y * y / theta;
    const double r = 1.0 - y;
    return 1.0 - r * r / (1.0 - theta);
}

/// Hellinger distance between triangular densities, evaluated by adaptive
/// quadrature split at the two density kinks.  The mode interval is shrunk to
/// [1e-4, 1-1e-4] to keep the family well defined.
inline MetricSpace make_hellinger_triangular_metric(double rel_tol = 1e-11) {
    MetricSpace ms;
    ms.name = "hellinger-tri";
    ms.space = {1e-4, 1.0 - 1e-4};
    ms.dist = [rel_tol](double t1, double t2) {
        if (t1 == t2) return 0.0;
        // integral of (sqrt p1 - sqrt p2)^2 expanded as 2 - 2 int sqrt(p1 p2);
        // the product form has no cancellation inside the integrand
        auto integrand = [t1, t2](double x) {
            return std::sqrt(triangular_pdf(x, t1) * triangular_pdf(x, t2));
        };
        const quad::QuadResult r =
            quad::integrate_split(integrand, 0.0, 1.0, {std::min(t1, t2), std::max(t1, t2)}, rel_tol);
        return std::sqrt(std::max(0.0, 2.0 - 2.0 * r.value));
    };
    return ms;
}

/// Kolmogorov distance between triangular distribution functions: the sup of
/// |F1 - F2| over a dense probe grid augmented with both modes, where the
/// piecewise quadratic difference attains its extrema.
inline MetricSpace make_kolmogorov_triangular_metric(std::size_t grid_points = 100000) {
    if (grid_points < 2) throw input_error("kolmogorov metric: need at least 2 grid points");
    MetricSpace ms;
    ms.name = "kolmogorov-tri";
    ms.space = {1e-4, 1.0 - 1e-4};
    ms.dist = [grid_points](double t1, double t2) {
        if (t1 == t2) return 0.0;
        double sup = 0.0;
        const double step = 1.0 / static_cast<double>(grid_points);
        for (std::size_t i = 1; i < grid_points; ++i) {
            const double y = static_cast<double>(i) * step;
            sup = std::max(sup, std::fabs(triangular_cdf(y, t1) - triangular_cdf(y, t2)));
        }
        sup = std::max(sup, std::fabs(triangular_cdf(t1, t1) - triangular_cdf(t1, t2)));
        sup = std::max(sup, std::fabs(triangular_cdf(t2, t1) - triangular_cdf(t2, t2)));
        return sup;
    };
    return ms;
}

/// Result of a sampled metric-axiom check.  Violations are reported, never
/// thrown, so callers can inspect near-misses from approximate distances.
struct AxiomReport {
    bool identity_pass = true;
    bool symmetry_pass = true;
    bool triangle_pass = true;
    double worst_identity = 0.0;  // max |d(a, a)|
    double worst_symmetry = 0.0;  // max |d(a, b) - d(b, a)|
    double worst_triangle = 0.0;  // max d(a, c) - d(a, b) - d(b, c)
    std::size_t samples = 0;

    bool all_pass() const { return identity_pass && symmetry_pass && triangle_pass; }
};

/// Samples points uniformly in the space and checks identity, symmetry and
/// the triangle inequality at the given absolute tolerance.
inline AxiomReport verify_metric_axioms(const MetricSpace& ms, std::size_t n_samples,
                                        std::uint64_t seed, double tol = 1e-10) {
    if (n_samples == 0) throw input_error("verify_metric_axioms: need at least one sample");
    Rng rng(seed, {0xA210});
    std::vector<double> pts(n_samples);
    for (double& p : pts) p = rng.uniform(ms.space.lo, ms.space.hi);

    AxiomReport rep;
    rep.samples = n_samples;
    for (std::size_t i = 0; i < n_samples; ++i) {
        rep.worst_identity = std::max(rep.worst_identity, std::fabs(ms.dist(pts[i], pts[i])));
        const std::size_t j = (i + 1) % n_samples;
        const std::size_t k = (i + n_samples / 2) % n_samples;
        const double dij = ms.dist(pts[i], pts[j]);
        const double dji = ms.dist(pts[j], pts[i]);
        rep.worst_symmetry = std::max(rep.worst_symmetry, std::fabs(dij - dji));
        const double dik = ms.dist(pts[i], pts[k]);
        const double djk = ms.dist(pts[j], pts[k]);
        rep.worst_triangle = std::max(rep.worst_triangle, dik - dij - djk);
    }
    rep.identity_pass = rep.worst_identity <= tol;
    rep.symmetry_pass = rep.worst_symmetry <= tol;
    rep.triangle_pass = rep.worst_triangle <= tol;
    return rep;
}

} // namespace funiform
