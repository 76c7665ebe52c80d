#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "funiform/box.hpp"
#include "funiform/error.hpp"
#include "funiform/interp.hpp"
#include "funiform/linalg.hpp"
#include "funiform/metric.hpp"
#include "funiform/quadrature.hpp"
#include "funiform/rng.hpp"

namespace funiform {

/// A normalized prior on a box, stored as the unnormalized log density plus
/// its log normalizing constant.  density(theta) integrates to one over the
/// box within norm_error.
struct PriorDensity {
    std::function<double(const std::vector<double>&)> log_unnorm;
    ParamBox box;
    double log_norm_const = 0.0;
    double norm_error = 0.0; // relative error bound of the normalizing integral
    std::size_t dim = 0;

    double logpdf(const std::vector<double>& theta) const {
        return log_unnorm(theta) - log_norm_const;
    }
    double pdf(const std::vector<double>& theta) const { return std::exp(logpdf(theta)); }
};

namespace detail {

/// Largest log value over a scan grid; used to shift exponentials.
inline double log_shift_1d(const std::function<double(const std::vector<double>&)>& f,
                           const Interval& iv, std::size_t n = 1024) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> arg(1);
    for (std::size_t i = 0; i <= n; ++i) {
        arg[0] = iv.lo + iv.width() * static_cast<double>(i) / static_cast<double>(n);
        best = std::max(best, f(arg));
    }
    if (!std::isfinite(best))
        throw numerical_error("normalize: log density is nowhere finite on the box");
    return best;
}

inline double tensor_integral(const std::function<double(const std::vector<double>&)>& f,
                              const ParamBox& box, double shift, std::size_t n_per_dim) {
    const std::size_t d = box.dim();
    std::vector<std::vector<quad::GaussNode>> rules(d);
    for (std::size_t i = 0; i < d; ++i)
        rules[i] = quad::gauss_legendre(n_per_dim, box.dims[i].lo, box.dims[i].hi);
    std::vector<std::size_t> ix(d, 0);
    std::vector<double> arg(d);
    double sum = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            arg[i] = rules[i][ix[i]].x;
            w *= rules[i][ix[i]].w;
        }
        const double lv = f(arg);
        if (std::isfinite(lv)) sum += w * std::exp(lv - shift);
        std::size_t k = 0;
        while (k < d && ++ix[k] == n_per_dim) ix[k++] = 0;
        if (k == d) break;
    }
    return sum;
}

} // namespace detail

/// Normalizes an unnormalized log density over a box of dimension at most 3.
/// One dimensional integrals use adaptive quadrature to relative 1e-9; two
/// and three dimensional ones use tensor Gauss-Legendre rules refined until
/// successive orders agree to relative 1e-6.
inline PriorDensity normalize(std::function<double(const std::vector<double>&)> log_unnorm,
                              const ParamBox& box) {
    const std::size_t d = box.dim();
    if (d == 0 || d > 3)
        throw input_error("normalize: box dimension must be 1, 2 or 3, got " + std::to_string(d));
    PriorDensity prior;
    prior.box = box;
    prior.dim = d;
    if (d == 1) {
        const double shift = detail::log_shift_1d(log_unnorm, box.dims[0]);
        auto g = [&](double x) {
            const double lv = log_unnorm({x});
            return std::isfinite(lv) ? std::exp(lv - shift) : 0.0;
        };
        const quad::QuadResult q =
            quad::integrate(g, box.dims[0].lo, box.dims[0].hi, 1e-9);
        if (!(q.value > 0.0))
            throw numerical_error("normalize: density integrates to zero over the box");
        prior.log_norm_const = shift + std::log(q.value);
        prior.norm_error = q.error / q.value;
    } else {
        double shift = -std::numeric_limits<double>::infinity();
        Rng rng(0x5eedu, {17});
        std::vector<double> arg(d);
        for (int i = 0; i < 4096; ++i) {
            for (std::size_t k = 0; k < d; ++k)
                arg[k] = rng.uniform(box.dims[k].lo, box.dims[k].hi);
            shift = std::max(shift, log_unnorm(arg));
        }
        if (!std::isfinite(shift))
            throw numerical_error("normalize: log density is nowhere finite on the box");
        double prev = detail::tensor_integral(log_unnorm, box, shift, 64);
        double cur = prev;
        double relchange = 1.0;
        for (std::size_t n : {96u, 128u, 160u}) {
            cur = detail::tensor_integral(log_unnorm, box, shift, n);
            relchange = std::fabs(cur - prev) / std::max(std::fabs(cur), 1e-300);
            if (relchange <= 1e-6) break;
            prev = cur;
        }
        if (relchange > 1e-6)
            throw numerical_error("normalize: tensor quadrature did not reach relative 1e-6");
        if (!(cur > 0.0))
            throw numerical_error("normalize: density integrates to zero over the box");
        prior.log_norm_const = shift + std::log(cur);
        prior.norm_error = relchange;
    }
    prior.log_unnorm = std::move(log_unnorm);
    return prior;
}

/// Distribution function and quantile function of a one dimensional prior.
/// The CDF comes from cumulative quadrature on a 2048-cell grid interpolated
/// monotonically; the quantile inverts it by bisection to 1e-10.
class CdfQuantile {
public:
    explicit CdfQuantile(const PriorDensity& prior, std::size_t cells = 2048) {
        if (prior.dim != 1) throw input_error("CdfQuantile: prior must be one dimensional");
        lo_ = prior.box.dims[0].lo;
        hi_ = prior.box.dims[0].hi;
        std::vector<double> knots(cells + 1), cum(cells + 1, 0.0);
        for (std::size_t i = 0; i <= cells; ++i)
            knots[i] = lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(cells);
        auto g = [&](double x) {
            const double lv = prior.log_unnorm({x}) - prior.log_norm_const;
            return std::isfinite(lv) ? std::exp(lv) : 0.0;
        };
        double acc = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            double v, e, l1;
            quad::detail::kronrod15(g, knots[i], knots[i + 1], v, e, l1);
            acc += std::max(0.0, v);
            cum[i + 1] = acc;
        }
        if (!(acc > 0.0)) throw numerical_error("CdfQuantile: zero total mass");
        for (double& c : cum) c /= acc;
        // strictly increasing knots are guaranteed; flat runs are fine for pchip
        spline_.emplace(std::move(knots), std::move(cum));
    }

    double cdf(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return 1.0;
        return std::min(1.0, std::max(0.0, (*spline_)(x)));
    }

    double quantile(double q) const {
        if (!(q >= 0.0 && q <= 1.0)) throw input_error("quantile: level must lie in [0, 1]");
        if (q <= 0.0) return lo_;
        if (q >= 1.0) return hi_;
        double a = lo_, b = hi_;
        while (b - a > 1e-10 * (1.0 + std::fabs(a) + std::fabs(b))) {
            const double mid = 0.5 * (a + b);
            if (cdf(mid) < q)
                a = mid;
            else
                b = mid;
        }
        return 0.5 * (a + b);
    }

private:
    double lo_, hi_;
    std::optional<MonotoneCubic> spline_;
};

/// Deterministic sampling from a prior.  One dimensional priors use inverse
/// CDF draws; two and three dimensional ones draw a cell from a midpoint-mass
/// multinomial over a tensor grid and jitter uniformly inside the cell, so
/// their exactness is limited by the grid resolution.
inline std::vector<std::vector<double>> sample(const PriorDensity& prior, std::size_t n,
                                               std::uint64_t seed) {
    std::vector<std::vector<double>> draws;
    draws.reserve(n);
    if (n == 0) return draws;
    Rng rng(seed, {0});
    if (prior.dim == 1) {
        const CdfQuantile cq(prior);
        for (std::size_t i = 0; i < n; ++i)
            draws.push_back({cq.quantile(rng.uniform01())});
        return draws;
    }
    const std::size_t cells_per_dim = prior.dim == 2 ? 96 : 32;
    const std::size_t d = prior.dim;
    std::size_t total_cells = 1;
    for (std::size_t i = 0; i < d; ++i) total_cells *= cells_per_dim;
    std::vector<double> logmass(total_cells);
    double shift = -std::numeric_limits<double>::infinity();
    std::vector<double> arg(d), width(d);
    for (std::size_t i = 0; i < d; ++i)
        width[i] = prior.box.dims[i].width() / static_cast<double>(cells_per_dim);
    for (std::size_t c = 0; c < total_cells; ++c) {
        std::size_t rem = c;
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t ix = rem % cells_per_dim;
            rem /= cells_per_dim;
            arg[i] = prior.box.dims[i].lo + (static_cast<double>(ix) + 0.5) * width[i];
        }
        logmass[c] = prior.log_unnorm(arg);
        if (std::isfinite(logmass[c])) shift = std::max(shift, logmass[c]);
    }
    std::vector<double> cumulative(total_cells);
    double acc = 0.0;
    for (std::size_t c = 0; c < total_cells; ++c) {
        acc += std::isfinite(logmass[c]) ? std::exp(logmass[c] - shift) : 0.0;
        cumulative[c] = acc;
    }
    if (!(acc > 0.0)) throw numerical_error("sample: zero total mass on the cell grid");
    for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform01() * acc;
        const std::size_t cell = static_cast<std::size_t>(
            std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        std::size_t rem = std::min(cell, total_cells - 1);
        std::vector<double> point(d);
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t ix = rem % cells_per_dim;
            rem /= cells_per_dim;
            point[i] = prior.box.dims[i].lo + (static_cast<double>(ix) + rng.uniform01()) * width[i];
        }
        draws.push_back(std::move(point));
    }
    return draws;
}

/// Local metric matrix: the Hessian of half the squared distance to theta0,
/// by second order central differences with per-coordinate steps
/// h_i = 1e-4 (1 + |theta0_i|).  theta0 must sit at least 2h inside the box.
inline SmallMatrix local_metric_fd(
    const std::function<double(const std::vector<double>&, const std::vector<double>&)>& dist,
    const std::vector<double>& theta0, const ParamBox& box) {
    const std::size_t d = theta0.size();
    if (box.dim() != d) throw input_error("local_metric_fd: box and point dimension mismatch");
    std::vector<double> h(d);
    for (std::size_t i = 0; i < d; ++i) {
        h[i] = 1e-4 * (1.0 + std::fabs(theta0[i]));
        if (theta0[i] - 2.0 * h[i] < box.dims[i].lo || theta0[i] + 2.0 * h[i] > box.dims[i].hi)
            throw input_error("local_metric_fd: theta0 must sit at least 2h = " +
                              std::to_string(2.0 * h[i]) + " inside the box in coordinate " +
                              std::to_string(i));
    }
    auto half_sq = [&](const std::vector<double>& t) {
        const double v = dist(t, theta0);
        return 0.5 * v * v;
    };
    SmallMatrix v(d);
    const double f0 = half_sq(theta0);
    std::vector<double> t = theta0;
    for (std::size_t i = 0; i < d; ++i) {
        t[i] = theta0[i] + h[i];
        const double fp = half_sq(t);
        t[i] = theta0[i] - h[i];
        const double fm = half_sq(t);
        t[i] = theta0[i];
        v(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            auto at = [&](double si, double sj) {
                t[i] = theta0[i] + si * h[i];
                t[j] = theta0[j] + sj * h[j];
                const double val = half_sq(t);
                t[i] = theta0[i];
                t[j] = theta0[j];
                return val;
            };
            const double mixed =
                (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h[i] * h[j]);
            v(i, j) = mixed;
            v(j, i) = mixed;
        }
    return v;
}

/// Convenience overload for a one dimensional MetricSpace.
inline SmallMatrix local_metric_fd(const MetricSpace& metric, const std::vector<double>& theta0) {
    if (theta0.size() != 1)
        throw input_error("local_metric_fd: a MetricSpace carries a one dimensional space");
    auto dist = [&metric](const std::vector<double>& a, const std::vector<double>& b) {
        return metric.dist(a[0], b[0]);
    };
    return local_metric_fd(dist, theta0, make_box(metric.space));
}

enum class CdfDirection { cdf, quantile };

/// One-shot CDF or quantile evaluation; heavy users should hold a
/// CdfQuantile instead of paying the grid construction per call.
inline double cdf_quantile(const PriorDensity& prior, double q_or_x, CdfDirection direction) {
    const CdfQuantile cq(prior);
    return direction == CdfDirection::cdf ? cq.cdf(q_or_x) : cq.quantile(q_or_x);
}

/// A change of parameters gamma -> theta = h(gamma) with forward map g,
/// inverse h and Jacobian H(gamma) = dh/dgamma.
struct Reparametrization {
    std::function<std::vector<double>(const std::vector<double>&)> g; // theta -> gamma
    std::function<std::vector<double>(const std::vector<double>&)> h; // gamma -> theta
    std::function<SmallMatrix(const std::vector<double>&)> H;         // dh/dgamma
    ParamBox gamma_box;
};

/// Probes g(h(gamma)) = gamma and H against finite differences of h on
/// sampled interior points; throws input_error on violation.
inline void validate_reparametrization(const Reparametrization& rep, std::size_t n_probe = 32,
                                       std::uint64_t seed = 0x9e37) {
    const std::size_t d = rep.gamma_box.dim();
    Rng rng(seed, {0xF00D});
    std::vector<double> gamma(d);
    for (std::size_t k = 0; k < n_probe; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            const Interval& iv = rep.gamma_box.dims[i];
            gamma[i] = iv.lo + iv.width() * (0.05 + 0.9 * rng.uniform01());
        }
        const std::vector<double> round_trip = rep.g(rep.h(gamma));
        for (std::size_t i = 0; i < d; ++i)
            if (std::fabs(round_trip[i] - gamma[i]) > 1e-10 * (1.0 + std::fabs(gamma[i])))
                throw input_error("reparametrization: g(h(gamma)) differs from gamma");
        const SmallMatrix jac = rep.H(gamma);
        for (std::size_t j = 0; j < d; ++j) {
            const double step = 1e-6 * (1.0 + std::fabs(gamma[j]));
            std::vector<double> gp = gamma, gm = gamma;
            gp[j] += step;
            gm[j] -= step;
            const std::vector<double> tp = rep.h(gp), tm = rep.h(gm);
            for (std::size_t i = 0; i < d; ++i) {
                const double fd = (tp[i] - tm[i]) / (2.0 * step);
                const double scale = std::max({std::fabs(jac(i, j)), std::fabs(fd), 1e-8});
                if (std::fabs(fd - jac(i, j)) > 1e-5 * scale)
                    throw input_error("reparametrization: Jacobian disagrees with finite differences");
            }
        }
    }
}

/// Transforms a prior to new coordinates gamma via theta = h(gamma):
/// log p(h(gamma)) + log |det H(gamma)|, renormalized over gamma_box.
inline PriorDensity reparametrize_density(const PriorDensity& prior, const Reparametrization& rep) {
    if (rep.gamma_box.dim() != prior.dim)
        throw input_error("reparametrize_density: dimension mismatch");
    validate_reparametrization(rep);
    auto base_log = prior.log_unnorm;
    auto h = rep.h;
    auto H = rep.H;
    auto log_new = [base_log, h, H](const std::vector<double>& gamma) {
        const double ad = std::fabs(linalg::det(H(gamma)));
        if (!(ad > 0.0)) return -std::numeric_limits<double>::infinity();
        return base_log(h(gamma)) + std::log(ad);
    };
    return normalize(log_new, rep.gamma_box);
}

} // namespace funiform
