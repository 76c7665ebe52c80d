#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "funiform/error.hpp"

namespace funiform::quad {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;       // absolute error estimate from the embedded rule
    std::size_t evals = 0;
    bool converged = false;
};

inline constexpr double kDefaultRelTol = 1e-9;
inline constexpr std::size_t kDefaultEvalCap = 200000;

namespace detail {

// Gauss-Kronrod 15(7) abscissae and weights on [-1, 1] (QUADPACK dqk15).
inline constexpr double kKronrodX[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

/// One K15/G7 application on [a, b]; err is |K15 - G7|.
template <class F>
void kronrod15(F&& f, double a, double b, double& value, double& err, double& l1) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double fx[8][2];
    for (int i = 0; i < 7; ++i) {
        fx[i][0] = f(mid - half * kKronrodX[i]);
        fx[i][1] = f(mid + half * kKronrodX[i]);
    }
    fx[7][0] = f(mid);
    fx[7][1] = 0.0;
    double k15 = kKronrodW[7] * fx[7][0];
    double g7 = kGaussW[3] * fx[7][0];
    double l1sum = kKronrodW[7] * std::fabs(fx[7][0]);
    for (int i = 0; i < 7; ++i) {
        const double pair = fx[i][0] + fx[i][1];
        k15 += kKronrodW[i] * pair;
        l1sum += kKronrodW[i] * (std::fabs(fx[i][0]) + std::fabs(fx[i][1]));
        if (i % 2 == 1) g7 += kGaussW[i / 2] * pair;
    }
    value = k15 * half;
    err = std::fabs((k15 - g7) * half);
    l1 = l1sum * half;
}

struct Piece {
    double a, b, value, err, l1;
    bool operator<(const Piece& o) const { return err < o.err; }
};

} // namespace detail

/// Globally adaptive Gauss-Kronrod 15(7) integration of f over [a, b]:
/// the interval with the largest embedded-rule error estimate is split until
/// the summed error meets max(rel_tol * scale, abs_tol) or the evaluation cap
/// is reached.  Interior nodes only, so integrable endpoint singularities are
/// tolerated.  Throws numerical_error when the target is unreachable.
template <class F>
QuadResult integrate_pieces(F&& f, const std::vector<std::pair<double, double>>& pieces,
                            double rel_tol, double abs_tol, std::size_t eval_cap) {
    std::priority_queue<detail::Piece> heap;
    std::size_t evals = 0;
    double total = 0.0, total_err = 0.0, total_l1 = 0.0;
    for (const auto& [a, b] : pieces) {
        if (!(a <= b)) throw input_error("integrate: interval endpoints out of order");
        if (a == b) continue;
        detail::Piece p{a, b, 0.0, 0.0, 0.0};
        detail::kronrod15(f, a, b, p.value, p.err, p.l1);
        evals += 15;
        total += p.value;
        total_err += p.err;
        total_l1 += p.l1;
        heap.push(p);
    }
    auto target = [&] {
        const double scale = std::max(std::fabs(total), total_l1);
        return std::max(rel_tol * scale, abs_tol);
    };
    while (!heap.empty() && total_err > target() && evals + 30 <= eval_cap) {
        const detail::Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // interval at floating point resolution; its error is irreducible
            total_err -= worst.err;
            continue;
        }
        detail::Piece left{worst.a, mid, 0, 0, 0}, right{mid, worst.b, 0, 0, 0};
        detail::kronrod15(f, left.a, left.b, left.value, left.err, left.l1);
        detail::kronrod15(f, right.a, right.b, right.value, right.err, right.l1);
        evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        total_l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }
    QuadResult res;
    res.value = total;
    res.error = total_err;
    res.evals = evals;
    res.converged = total_err <= target();
    if (!res.converged) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "integrate: error estimate %.3e above target %.3e after %zu evaluations",
                      total_err, target(), evals);
        throw numerical_error(msg);
    }
    return res;
}

template <class F>
QuadResult integrate(F&& f, double a, double b,
                     double rel_tol = kDefaultRelTol,
                     std::size_t eval_cap = kDefaultEvalCap,
                     double abs_tol = 0.0) {
    if (a == b) return {0.0, 0.0, 0, true};
    if (!(a < b)) throw input_error("integrate: lower limit must not exceed upper limit");
    return integrate_pieces(f, {{a, b}}, rel_tol, abs_tol, eval_cap);
}

/// Integration with interior breakpoints (kinks); the pieces share one global
/// error budget, so short pieces are never over-refined.
template <class F>
QuadResult integrate_split(F&& f, double a, double b,
                           const std::vector<double>& breakpoints,
                           double rel_tol = kDefaultRelTol,
                           std::size_t eval_cap = kDefaultEvalCap,
                           double abs_tol = 0.0) {
    if (!(a < b)) throw input_error("integrate_split: lower limit must precede upper limit");
    std::vector<double> knots;
    knots.push_back(a);
    for (double t : breakpoints)
        if (t > a && t < b) knots.push_back(t);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (knots[i + 1] > knots[i]) pieces.emplace_back(knots[i], knots[i + 1]);
    return integrate_pieces(f, pieces, rel_tol, abs_tol, eval_cap);
}

/// One Gauss-Legendre node/weight pair on [-1, 1].
struct GaussNode {
    double x;
    double w;
};

/// Gauss-Legendre nodes on [-1, 1] by Newton iteration on the recurrence.
/// Exact for polynomials of degree 2n-1; validated against moment integrals.
inline std::vector<GaussNode> gauss_legendre(std::size_t n) {
    if (n == 0) throw input_error("gauss_legendre: need at least one node");
    std::vector<GaussNode> nodes(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        // Tricomi initial guess for the i-th root of P_n.
        double x = std::cos(3.14159265358979323846 * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i].x = -x;
        nodes[n - 1 - i].x = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        nodes[i].w = w;
        nodes[n - 1 - i].w = w;
    }
    return nodes;
}

/// Gauss-Legendre rule mapped onto [a, b].
inline std::vector<GaussNode> gauss_legendre(std::size_t n, double a, double b) {
    std::vector<GaussNode> nodes = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (GaussNode& g : nodes) {
        g.x = mid + half * g.x;
        g.w *= half;
    }
    return nodes;
}

template <class F>
double gauss_legendre_integrate(F&& f, double a, double b, std::size_t n) {
    double sum = 0.0;
    for (const GaussNode& g : gauss_legendre(n, a, b)) sum += g.w * f(g.x);
    return sum;
}

/// Trapezoid rule over tabulated values; grid must be ascending.
inline double trapezoid(const std::vector<double>& grid, const std::vector<double>& values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw input_error("trapezoid: grid and values must share a size of at least 2");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        sum += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
    return sum;
}

} // namespace funiform::quad
