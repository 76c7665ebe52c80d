#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "funiform/box.hpp"
#include "funiform/error.hpp"
#include "funiform/linalg.hpp"
#include "funiform/models.hpp"
#include "funiform/optimize.hpp"
#include "funiform/prior.hpp"
#include "funiform/quadrature.hpp"
#include "funiform/rng.hpp"
#include "funiform/threads.hpp"

namespace funiform {

/// An experimental design: support points with nonnegative weights summing
/// to one.
struct Design {
    std::vector<double> points;
    std::vector<double> weights;
};

inline void validate_design(const Design& d, const Interval& x_range) {
    if (d.points.size() != d.weights.size() || d.points.empty())
        throw input_error("design: points and weights must be nonempty and equally sized");
    double sum = 0.0;
    for (std::size_t i = 0; i < d.points.size(); ++i) {
        if (d.weights[i] < 0.0) throw input_error("design: negative weight");
        if (!x_range.contains(d.points[i]))
            throw input_error("design: point " + std::to_string(d.points[i]) +
                              " outside the design region");
        sum += d.weights[i];
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw input_error("design: weights must sum to 1 within 1e-12, got " + std::to_string(sum));
}

/// Fisher-type information of a design at theta: det of the weighted Gram of
/// embedded Jacobians.  For the exponential model this is the scalar
/// sum of w_i x_i^2 exp(-2 theta x_i).  Returns 0 when degenerate.
inline double information(const Design& d, const std::vector<double>& theta_nl,
                          const ModelFunction& model) {
    const std::size_t p = model.nonlinear_slice.size();
    SmallMatrix g(p);
    for (std::size_t i = 0; i < d.points.size(); ++i) {
        if (d.weights[i] == 0.0) continue;
        const std::vector<double> j = model.jac(d.points[i], theta_nl);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) g(a, b) += d.weights[i] * j[a] * j[b];
    }
    const double det = linalg::det(g);
    return det > 0.0 ? det : 0.0;
}

inline double information(const Design& d, double theta, const ModelFunction& model) {
    return information(d, std::vector<double>{theta}, model);
}

/// Prior-weighted quadrature nodes for the Bayesian design criterion; built
/// once per prior, reused across many criterion evaluations.
struct CriterionNodes {
    std::vector<double> theta;
    std::vector<double> weight; // prior-density weighted, renormalized to sum 1
};

inline CriterionNodes make_criterion_nodes(const PriorDensity& prior, std::size_t n_nodes = 256) {
    if (prior.dim != 1) throw input_error("design criterion: prior must be one dimensional");
    const auto rule = quad::gauss_legendre(n_nodes, prior.box.dims[0].lo, prior.box.dims[0].hi);
    CriterionNodes nodes;
    nodes.theta.reserve(n_nodes);
    nodes.weight.reserve(n_nodes);
    double shift = -std::numeric_limits<double>::infinity();
    std::vector<double> logv(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        logv[i] = prior.log_unnorm({rule[i].x});
        if (std::isfinite(logv[i])) shift = std::max(shift, logv[i]);
    }
    if (!std::isfinite(shift))
        throw numerical_error("design criterion: prior vanishes at every quadrature node");
    double total = 0.0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double w = std::isfinite(logv[i]) ? rule[i].w * std::exp(logv[i] - shift) : 0.0;
        nodes.theta.push_back(rule[i].x);
        nodes.weight.push_back(w);
        total += w;
    }
    for (double& w : nodes.weight) w /= total;
    return nodes;
}

/// Average negative log information under the node weights; +infinity when
/// the information vanishes at any node carrying weight.
inline double criterion_value(const CriterionNodes& nodes, const Design& d,
                              const ModelFunction& model) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.theta.size(); ++i) {
        if (nodes.weight[i] == 0.0) continue;
        const double info = information(d, nodes.theta[i], model);
        if (!(info > 0.0)) return std::numeric_limits<double>::infinity();
        acc -= nodes.weight[i] * std::log(info);
    }
    return acc;
}

/// Bayesian design criterion -integral of log I(d, theta) against the prior,
/// by a 256-node prior-weighted Gauss-Legendre rule.
inline double bayesian_criterion(const Design& d, const PriorDensity& prior,
                                 const ModelFunction& model) {
    return criterion_value(make_criterion_nodes(prior), d, model);
}

/// Sorts points, merges clusters closer than merge_tol in x (weight-averaged
/// position, summed weight), drops weights below weight_floor, renormalizes.
inline Design canonicalize_design(const Design& d, double merge_tol = 0.05,
                                  double weight_floor = 0.005) {
    std::vector<std::size_t> order(d.points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return d.points[a] < d.points[b]; });
    Design merged;
    for (std::size_t k : order) {
        if (!merged.points.empty() && d.points[k] - merged.points.back() < merge_tol) {
            const double w0 = merged.weights.back(), w1 = d.weights[k];
            if (w0 + w1 > 0.0)
                merged.points.back() = (merged.points.back() * w0 + d.points[k] * w1) / (w0 + w1);
            merged.weights.back() = w0 + w1;
        } else {
            merged.points.push_back(d.points[k]);
            merged.weights.push_back(d.weights[k]);
        }
    }
    Design out;
    double total = 0.0;
    for (std::size_t i = 0; i < merged.points.size(); ++i) {
        if (merged.weights[i] < weight_floor) continue;
        out.points.push_back(merged.points[i]);
        out.weights.push_back(merged.weights[i]);
        total += merged.weights[i];
    }
    if (out.points.empty() || !(total > 0.0))
        throw numerical_error("canonicalize_design: all weight was dropped");
    for (double& w : out.weights) w /= total;
    return out;
}

struct OptimizedDesign {
    Design design;
    double criterion = std::numeric_limits<double>::infinity();
};

namespace detail {

/// Decodes a 2k-vector (logistic point coordinates, softmax weight scores)
/// into a design on x_range.
inline Design decode_design(const std::vector<double>& v, std::size_t k, const Interval& x_range) {
    Design d;
    d.points.resize(k);
    d.weights.resize(k);
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) shift = std::max(shift, v[k + i]);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        d.points[i] = x_range.lo + x_range.width() / (1.0 + std::exp(-v[i]));
        d.weights[i] = std::exp(v[k + i] - shift);
        total += d.weights[i];
    }
    for (double& w : d.weights) w /= total;
    return d;
}

} // namespace detail

/// Multistart Nelder-Mead search for the design minimizing the Bayesian
/// criterion, followed by canonicalization and a polish pass.  Deterministic
/// under the seed; starts run in parallel.
inline OptimizedDesign optimize_design(const ModelFunction& model, const PriorDensity& prior,
                                       const Interval& x_range, std::size_t max_points,
                                       std::uint64_t seed, std::size_t n_starts = 50,
                                       std::size_t n_threads = 0) {
    if (max_points < 1) throw input_error("optimize_design: max_points must be at least 1");
    const CriterionNodes nodes = make_criterion_nodes(prior);
    const std::size_t k = max_points;
    auto objective = [&](const std::vector<double>& v) {
        const Design d = detail::decode_design(v, k, x_range);
        const double c = criterion_value(nodes, d, model);
        return std::isfinite(c) ? c : 1e100;
    };
    std::vector<OptimResult> results(n_starts);
    parallel_for(n_starts, n_threads, [&](std::size_t s) {
        Rng rng(seed, {0xDE51u, s});
        std::vector<double> start(2 * k);
        for (std::size_t i = 0; i < k; ++i) start[i] = rng.uniform(-2.5, 2.5);
        for (std::size_t i = 0; i < k; ++i) start[k + i] = rng.uniform(-1.0, 1.0);
        results[s] = nelder_mead(objective, start, 0.8, 1e-10, 6000);
    });
    std::size_t best = 0;
    for (std::size_t s = 1; s < n_starts; ++s)
        if (results[s].value < results[best].value) best = s;
    if (!std::isfinite(results[best].value) || results[best].value >= 1e100)
        throw numerical_error("optimize_design: criterion not finite at any optimizer endpoint");
    // polish from the best start before discretizing the structure
    OptimResult polished = nelder_mead(objective, results[best].x, 0.05, 1e-12, 12000);
    Design canon = canonicalize_design(detail::decode_design(polished.x, k, x_range));
    // re-polish with the collapsed support to refine point locations
    const std::size_t kc = canon.points.size();
    std::vector<double> enc(2 * kc);
    for (std::size_t i = 0; i < kc; ++i) {
        const double frac = std::min(1.0 - 1e-9, std::max(1e-9, (canon.points[i] - x_range.lo) / x_range.width()));
        enc[i] = std::log(frac / (1.0 - frac));
        enc[kc + i] = std::log(canon.weights[i]);
    }
    auto objective_c = [&](const std::vector<double>& v) {
        const Design d = detail::decode_design(v, kc, x_range);
        const double c = criterion_value(nodes, d, model);
        return std::isfinite(c) ? c : 1e100;
    };
    OptimResult refit = nelder_mead(objective_c, enc, 0.05, 1e-12, 12000);
    OptimizedDesign out;
    out.design = canonicalize_design(detail::decode_design(refit.x, kc, x_range));
    out.criterion = criterion_value(nodes, out.design, model);
    const double unpolished = criterion_value(nodes, canon, model);
    if (unpolished < out.criterion) {
        out.design = canon;
        out.criterion = unpolished;
    }
    return out;
}

/// Locally optimal single-point design at theta.  For the exponential model
/// the point is clamp(1/theta, x_range) since x^2 exp(-2 theta x) peaks at
/// x = 1/theta; other scalar-embedding models use golden-section search.
inline Design local_optimal(double theta, const ModelFunction& model, const Interval& x_range) {
    if (theta < 0.0) throw input_error("local_optimal: theta must be nonnegative");
    double x_star;
    if (model.model_id == "exponential") {
        x_star = theta == 0.0 ? x_range.hi
                              : std::min(x_range.hi, std::max(x_range.lo, 1.0 / theta));
    } else {
        if (model.nonlinear_slice.size() != 1)
            throw input_error("local_optimal: model must have a scalar embedding");
        auto neg_info = [&](double x) {
            const std::vector<double> j = model.jac(x, {theta});
            return -j[0] * j[0];
        };
        x_star = golden_section(neg_info, x_range.lo, x_range.hi).x[0];
    }
    return Design{{x_star}, {1.0}};
}

/// Information ratio of a design against the locally optimal design at theta.
/// Zero-information designs yield 0.
inline double efficiency(const Design& d, double theta, const ModelFunction& model,
                         const Interval& x_range) {
    const double denom = information(local_optimal(theta, model, x_range), theta, model);
    if (!(denom > 0.0)) throw numerical_error("efficiency: locally optimal design has zero information");
    const double num = information(d, theta, model);
    return num > 0.0 ? num / denom : 0.0;
}

} // namespace funiform
