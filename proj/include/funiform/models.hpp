#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "funiform/box.hpp"
#include "funiform/error.hpp"
#include "funiform/linalg.hpp"
#include "funiform/quadrature.hpp"

namespace funiform {

/// Weighting measure on the design region: either Lebesgue measure or a
/// discrete probability measure on finitely many atoms.
struct WeightingMeasure {
    enum class Kind { lebesgue, discrete };
    Kind kind = Kind::lebesgue;
    std::vector<double> atoms;
    std::vector<double> weights; // nonnegative, sum to one
};

inline WeightingMeasure make_lebesgue() { return {}; }

inline WeightingMeasure make_discrete(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.size() != weights.size() || atoms.empty())
        throw input_error("make_discrete: atoms and weights must share a nonzero size");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw input_error("make_discrete: weights must be nonnegative and finite");
        sum += w;
    }
    if (!(sum > 0.0)) throw input_error("make_discrete: weights must not all vanish");
    for (double& w : weights) w /= sum;
    WeightingMeasure m;
    m.kind = WeightingMeasure::Kind::discrete;
    m.atoms = std::move(atoms);
    m.weights = std::move(weights);
    return m;
}

/// A regression mean function together with the function-space embedding of
/// its nonlinear coordinates.
///
/// mu(x, theta_full) is the full mean; jac(x, theta_nl) is the gradient of the
/// embedded shape (the part of the model the nonlinear coordinates sweep out)
/// with respect to theta_nl; jac_full(x, theta_full) is the gradient of mu in
/// all coordinates.  param_box constrains theta_nl for evaluation purposes.
struct ModelFunction {
    std::string model_id;
    std::size_t n_params = 0;
    std::vector<std::size_t> nonlinear_slice; // indices of theta_nl within theta_full
    Interval design_region;
    ParamBox param_box; // box for theta_nl
    std::function<double(double, const std::vector<double>&)> mu;
    std::function<std::vector<double>(double, const std::vector<double>&)> jac;
    std::function<std::vector<double>(double, const std::vector<double>&)> jac_full;
};

namespace detail {

inline void require_in_region(const ModelFunction& m, double x) {
    if (!m.design_region.contains(x, 1e-12))
        throw input_error(m.model_id + ": x = " + std::to_string(x) +
                          " outside the design region [" + std::to_string(m.design_region.lo) +
                          ", " + std::to_string(m.design_region.hi) + "]");
}

inline void require_in_box(const ModelFunction& m, const std::vector<double>& theta_nl) {
    if (theta_nl.size() != m.param_box.dim())
        throw input_error(m.model_id + ": expected " + std::to_string(m.param_box.dim()) +
                          " nonlinear parameters, got " + std::to_string(theta_nl.size()));
    if (!m.param_box.contains(theta_nl, 1e-12))
        throw input_error(m.model_id + ": nonlinear parameters outside the parameter box");
}

// x^t ln x extended by continuity with value 0 at x = 0 (t > 0).
inline double pow_log(double x, double t) {
    if (x == 0.0) return 0.0;
    return std::pow(x, t) * std::log(x);
}

} // namespace detail

/// Registry of the built-in models.
///   exponential  mu = exp(-theta x)          on x in [0, 10], theta in [0, 5]
///   emax         mu = t0 + t1 x/(t2 + x)     on x in [0, 4],  t2 in [0, 6]
///   power        mu = t0 + t1 x^t2           on x in [0, 1],  t2 in [0.05, 20]
///   linear       mu = t0 + t1 x              on x in [0, 1]
/// The embedded shape is exp(-theta x), x/(t2+x), x^t2 and t0 + t1 x
/// respectively; the linear model's shape is the model itself, so its
/// embedded Jacobian does not depend on theta at all.
inline ModelFunction make_model(const std::string& id) {
    ModelFunction m;
    m.model_id = id;
    if (id == "exponential") {
        m.n_params = 1;
        m.nonlinear_slice = {0};
        m.design_region = {0.0, 10.0};
        m.param_box = make_box({0.0}, {5.0});
        m.mu = [](double x, const std::vector<double>& th) { return std::exp(-th[0] * x); };
        m.jac = [](double x, const std::vector<double>& th) {
            return std::vector<double>{-x * std::exp(-th[0] * x)};
        };
        m.jac_full = m.jac;
    } else if (id == "emax") {
        m.n_params = 3;
        m.nonlinear_slice = {2};
        m.design_region = {0.0, 4.0};
        m.param_box = make_box({0.0}, {6.0});
        m.mu = [](double x, const std::vector<double>& th) {
            return th[0] + th[1] * x / (th[2] + x);
        };
        m.jac = [](double x, const std::vector<double>& th) {
            const double s = x + th[0];
            return std::vector<double>{-x / (s * s)};
        };
        m.jac_full = [](double x, const std::vector<double>& th) {
            const double s = x + th[2];
            return std::vector<double>{1.0, x / s, -th[1] * x / (s * s)};
        };
    } else if (id == "power") {
        m.n_params = 3;
        m.nonlinear_slice = {2};
        m.design_region = {0.0, 1.0};
        m.param_box = make_box({0.05}, {20.0});
        m.mu = [](double x, const std::vector<double>& th) {
            if (x == 0.0 && !(th[2] > 0.0))
                throw input_error("power: x = 0 requires a positive exponent");
            return th[0] + th[1] * (x == 0.0 ? 0.0 : std::pow(x, th[2]));
        };
        m.jac = [](double x, const std::vector<double>& th) {
            return std::vector<double>{detail::pow_log(x, th[0])};
        };
        m.jac_full = [](double x, const std::vector<double>& th) {
            if (x == 0.0 && !(th[2] > 0.0))
                throw input_error("power: x = 0 requires a positive exponent");
            const double xp = x == 0.0 ? 0.0 : std::pow(x, th[2]);
            return std::vector<double>{1.0, xp, th[1] * detail::pow_log(x, th[2])};
        };
    } else if (id == "linear") {
        m.n_params = 2;
        m.nonlinear_slice = {0, 1};
        m.design_region = {0.0, 1.0};
        m.param_box = make_box({-10.0, -10.0}, {10.0, 10.0});
        m.mu = [](double x, const std::vector<double>& th) { return th[0] + th[1] * x; };
        m.jac = [](double x, const std::vector<double>&) {
            return std::vector<double>{1.0, x};
        };
        m.jac_full = m.jac;
    } else {
        throw input_error("make_model: unknown model id '" + id + "'");
    }
    return m;
}

/// Mean function value with argument validation.
inline double model_mu(const ModelFunction& m, double x, const std::vector<double>& theta_full) {
    detail::require_in_region(m, x);
    if (theta_full.size() != m.n_params)
        throw input_error(m.model_id + ": expected " + std::to_string(m.n_params) +
                          " parameters, got " + std::to_string(theta_full.size()));
    return m.mu(x, theta_full);
}

/// Gradient of the embedded shape with respect to the nonlinear coordinates.
inline std::vector<double> embedded_jacobian(const ModelFunction& m, double x,
                                             const std::vector<double>& theta_nl) {
    detail::require_in_region(m, x);
    detail::require_in_box(m, theta_nl);
    return m.jac(x, theta_nl);
}

/// Gram matrix of the embedded Jacobian under the weighting measure:
/// Lebesgue entries are adaptive quadrature over the design region, discrete
/// entries are weighted sums over the atoms.  Symmetric by construction.
struct GramMatrix {
    SmallMatrix mat;
    double quadrature_error = 0.0;
};

inline GramMatrix gram_matrix(const ModelFunction& m, const std::vector<double>& theta_nl,
                              const WeightingMeasure& w, double rel_tol = 1e-9) {
    detail::require_in_box(m, theta_nl);
    const std::size_t p = m.nonlinear_slice.size();
    GramMatrix g;
    g.mat = SmallMatrix(p);
    if (w.kind == WeightingMeasure::Kind::discrete) {
        for (std::size_t k = 0; k < w.atoms.size(); ++k) {
            detail::require_in_region(m, w.atoms[k]);
            const std::vector<double> j = m.jac(w.atoms[k], theta_nl);
            for (std::size_t r = 0; r < p; ++r)
                for (std::size_t c = r; c < p; ++c) g.mat(r, c) += w.weights[k] * j[r] * j[c];
        }
    } else {
        for (std::size_t r = 0; r < p; ++r)
            for (std::size_t c = r; c < p; ++c) {
                auto entry = [&](double x) {
                    const std::vector<double> j = m.jac(x, theta_nl);
                    return j[r] * j[c];
                };
                const quad::QuadResult q =
                    quad::integrate(entry, m.design_region.lo, m.design_region.hi, rel_tol,
                                    quad::kDefaultEvalCap, 1e-14);
                g.mat(r, c) = q.value;
                g.quadrature_error = std::max(g.quadrature_error, q.error);
            }
    }
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < r; ++c) g.mat(r, c) = g.mat(c, r);
    return g;
}

/// Log density (up to an additive constant) of the functional uniform prior:
/// one half the log determinant of the Gram matrix of the embedded Jacobian.
/// A singular Gram matrix yields -inf and sets *singular when provided.
inline double functional_uniform_logdensity(const ModelFunction& m,
                                            const std::vector<double>& theta_nl,
                                            const WeightingMeasure& w,
                                            bool* singular = nullptr) {
    const GramMatrix g = gram_matrix(m, theta_nl, w);
    if (singular) *singular = false;
    double ld = 0.0;
    if (!linalg::logdet_spd(g.mat, ld)) {
        if (singular) *singular = true;
        return -std::numeric_limits<double>::infinity();
    }
    return 0.5 * ld;
}

/// Jeffreys-style prior for the homoscedastic normal residual model at a
/// fixed design: identical to the functional uniform log density under the
/// design's empirical measure, and implemented as exactly that call.
inline double jeffreys_logdensity(const ModelFunction& m, const std::vector<double>& theta_nl,
                                  const WeightingMeasure& design) {
    if (design.kind != WeightingMeasure::Kind::discrete)
        throw input_error("jeffreys_logdensity: a discrete design measure is required");
    return functional_uniform_logdensity(m, theta_nl, design);
}

/// Closed-form unnormalized functional uniform densities on the registry
/// design regions (Lebesgue weighting).  Each equals the quadrature route up
/// to one global constant.
///
/// exponential on [0,10]:  exp(-10 t) sqrt((exp(20 t) - 200 t^2 - 20 t - 1)/t^3),
///   evaluated through logs with a series guard below t = 1e-3 whose t -> 0+
///   limit is sqrt(8000/6).
/// emax shape on [0,4]:    1/sqrt(t^4 + 12 t^3 + 48 t^2 + 64 t)
/// power shape on [0,1]:   1/sqrt(2 t^3/3 + t^2 + t/2 + 1/12) = sqrt(12)/(2t+1)^{3/2}
inline double closed_form_prior(const std::string& model_id, double theta) {
    if (model_id == "exponential") {
        if (!(theta >= 0.0) || !(theta <= 5.0))
            throw input_error("closed_form_prior: exponential rate outside [0, 5]");
        if (theta < 1e-3) {
            const double u = 20.0 * theta;
            const double bracket = (u * u * u / 6.0 + u * u * u * u / 24.0 +
                                    u * u * u * u * u / 120.0);
            const double limit = theta == 0.0 ? 8000.0 / 6.0 : bracket / (theta * theta * theta);
            return std::exp(-10.0 * theta) * std::sqrt(limit);
        }
        // log((e^{20t} - 200 t^2 - 20 t - 1)) = 20 t + log1p(-(200 t^2 + 20 t + 1) e^{-20 t})
        const double lognum =
            20.0 * theta + std::log1p(-(200.0 * theta * theta + 20.0 * theta + 1.0) *
                                      std::exp(-20.0 * theta));
        return std::exp(-10.0 * theta + 0.5 * (lognum - 3.0 * std::log(theta)));
    }
    if (model_id == "emax") {
        if (!(theta > 0.0) || !(theta <= 6.0))
            throw input_error("closed_form_prior: emax parameter outside (0, 6]");
        const double poly = ((theta + 12.0) * theta + 48.0) * theta * theta + 64.0 * theta;
        return 1.0 / std::sqrt(poly);
    }
    if (model_id == "power") {
        if (!(theta >= 0.0) || !(theta <= 20.0))
            throw input_error("closed_form_prior: power exponent outside [0, 20]");
        const double poly = 2.0 * theta * theta * theta / 3.0 + theta * theta + 0.5 * theta +
                            1.0 / 12.0;
        return 1.0 / std::sqrt(poly);
    }
    throw input_error("closed_form_prior: no closed form for model '" + model_id + "'");
}

} // namespace funiform
