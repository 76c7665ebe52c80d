#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "funiform/error.hpp"

namespace funiform {

struct OptimResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evals = 0;
    bool converged = false;
};

/// Scale factor used by the simplex diameter test.
inline double diam_scale(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::fabs(v));
    return s;
}

/// Derivative-free simplex minimizer with standard reflection, expansion,
/// contraction and shrink coefficients.  Stops when the simplex value spread
/// and diameter fall below tol, or at max_evals.
inline OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& start, double step = 0.1,
                               double tol = 1e-10, std::size_t max_evals = 20000) {
    const std::size_t d = start.size();
    if (d == 0) throw input_error("nelder_mead: empty start point");
    OptimResult res;
    std::vector<std::vector<double>> simplex(d + 1, start);
    for (std::size_t i = 0; i < d; ++i)
        simplex[i + 1][i] += (start[i] != 0.0 ? step * std::fabs(start[i]) : step);
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
        fv[i] = f(simplex[i]);
        ++res.evals;
    }
    std::vector<std::size_t> order(d + 1);
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };
    std::vector<double> centroid(d), xr(d), xe(d), xc(d);
    while (res.evals < max_evals) {
        sort_simplex();
        const std::size_t best = order[0], worst = order[d], second_worst = order[d - 1];
        double spread = std::fabs(fv[worst] - fv[best]);
        double diam = 0.0;
        for (std::size_t i = 1; i <= d; ++i)
            for (std::size_t k = 0; k < d; ++k)
                diam = std::max(diam, std::fabs(simplex[order[i]][k] - simplex[best][k]));
        if (spread <= tol * (1.0 + std::fabs(fv[best])) && diam <= tol * (1.0 + diam_scale(simplex[best]))) {
            res.converged = true;
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / static_cast<double>(d);
        for (std::size_t k = 0; k < d; ++k) xr[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
        const double fr = f(xr);
        ++res.evals;
        if (fr < fv[order[0]]) {
            for (std::size_t k = 0; k < d; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
            const double fe = f(xe);
            ++res.evals;
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            if (outside)
                for (std::size_t k = 0; k < d; ++k) xc[k] = centroid[k] + 0.5 * (xr[k] - centroid[k]);
            else
                for (std::size_t k = 0; k < d; ++k) xc[k] = centroid[k] + 0.5 * (simplex[worst][k] - centroid[k]);
            const double fc = f(xc);
            ++res.evals;
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < d; ++k)
                        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                    fv[i] = f(simplex[i]);
                    ++res.evals;
                }
            }
        }
    }
    sort_simplex();
    res.x = simplex[order[0]];
    res.value = fv[order[0]];
    return res;
}

/// Golden-section minimization of a unimodal function on [a, b].
inline OptimResult golden_section(const std::function<double(double)>& f, double a, double b,
                                  double tol = 1e-10, std::size_t max_evals = 10000) {
    if (!(a < b)) throw input_error("golden_section: need a < b");
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    OptimResult res;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    res.evals = 2;
    while (b - a > tol * (1.0 + std::fabs(a) + std::fabs(b)) && res.evals < max_evals) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++res.evals;
    }
    res.converged = res.evals < max_evals;
    const double xm = 0.5 * (a + b);
    res.x = {xm};
    res.value = f(xm);
    ++res.evals;
    return res;
}

} // namespace funiform
