#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "funiform/box.hpp"
#include "funiform/error.hpp"
#include "funiform/interp.hpp"
#include "funiform/models.hpp"
#include "funiform/prior.hpp"

namespace funiform {

/// Normalized functional uniform prior for a model's scalar nonlinear
/// parameter on the given interval, each density evaluation running the full
/// Gram quadrature.  Exact but expensive per call.
inline PriorDensity build_fu_prior_exact(const ModelFunction& model, const Interval& interval,
                                         const WeightingMeasure& weighting = make_lebesgue()) {
    if (model.nonlinear_slice.size() != 1)
        throw input_error("build_fu_prior_exact: model must have one nonlinear parameter");
    ModelFunction m = model;
    m.param_box = make_box(interval);
    auto log_unnorm = [m, weighting](const std::vector<double>& t) {
        return functional_uniform_logdensity(m, t, weighting);
    };
    return normalize(log_unnorm, make_box(interval));
}

/// Smooth interpolant of a scalar log density tabulated on a uniform grid.
/// Returns -infinity outside the tabulated interval.
class TabulatedLogDensity {
public:
    TabulatedLogDensity(std::function<double(double)> f, double lo, double hi,
                        std::size_t n_points = 4097) {
        if (!(lo < hi)) throw input_error("TabulatedLogDensity: need lo < hi");
        if (n_points < 8) throw input_error("TabulatedLogDensity: need at least 8 grid points");
        std::vector<double> xs(n_points), ys(n_points);
        for (std::size_t i = 0; i < n_points; ++i) {
            xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
            ys[i] = f(xs[i]);
            if (!std::isfinite(ys[i]))
                throw numerical_error("TabulatedLogDensity: log density not finite at x = " +
                                      std::to_string(xs[i]));
        }
        lo_ = lo;
        hi_ = hi;
        spline_.emplace(std::move(xs), std::move(ys));
    }

    double operator()(double x) const {
        if (x < lo_ || x > hi_) return -std::numeric_limits<double>::infinity();
        return (*spline_)(x);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_ = 0.0, hi_ = 0.0;
    std::optional<MonotoneCubic> spline_;
};

/// Tabulated functional uniform log prior for hot loops (MCMC, design search):
/// the Gram quadrature runs once per grid point, later evaluations are O(1)
/// interpolations.  Unnormalized, like functional_uniform_logdensity.
inline TabulatedLogDensity tabulate_fu_logdensity(const ModelFunction& model,
                                                  const Interval& interval,
                                                  const WeightingMeasure& weighting = make_lebesgue(),
                                                  std::size_t n_points = 4097) {
    if (model.nonlinear_slice.size() != 1)
        throw input_error("tabulate_fu_logdensity: model must have one nonlinear parameter");
    ModelFunction m = model;
    m.param_box = make_box(interval);
    auto f = [&m, &weighting](double t) {
        return functional_uniform_logdensity(m, {t}, weighting);
    };
    return TabulatedLogDensity(f, interval.lo, interval.hi, n_points);
}

/// Normalized prior from a tabulated functional uniform log density.
inline PriorDensity build_fu_prior(const ModelFunction& model, const Interval& interval,
                                   const WeightingMeasure& weighting = make_lebesgue(),
                                   std::size_t n_points = 4097) {
    TabulatedLogDensity tab = tabulate_fu_logdensity(model, interval, weighting, n_points);
    auto log_unnorm = [tab](const std::vector<double>& t) { return tab(t[0]); };
    return normalize(log_unnorm, make_box(interval));
}

/// Normalized flat prior on an interval.
inline PriorDensity build_flat_prior(const Interval& interval) {
    return normalize([](const std::vector<double>&) { return 0.0; }, make_box(interval));
}

} // namespace funiform
