#pragma once

#include <boost/math/special_functions/fpclassify.hpp>

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "funiform/error.hpp"

namespace funiform {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Monotone knot data yields a monotone interpolant, and the derivative is
/// available analytically piece by piece.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
        : lo_(xs.front()), hi_(xs.back()) {
        if (xs.size() != ys.size() || xs.size() < 4)
            throw input_error("MonotoneCubic: need at least 4 knots");
        for (std::size_t i = 0; i + 1 < xs.size(); ++i)
            if (!(xs[i] < xs[i + 1]))
                throw input_error("MonotoneCubic: abscissae must be strictly increasing");
        spline_.emplace(std::move(xs), std::move(ys));
    }

    double operator()(double x) const { return (*spline_)(clamp(x)); }

    double derivative(double x) const { return spline_->prime(clamp(x)); }

    double min_x() const { return lo_; }
    double max_x() const { return hi_; }

private:
    double clamp(double x) const { return std::min(std::max(x, lo_), hi_); }

    double lo_, hi_;
    mutable std::optional<boost::math::interpolators::pchip<std::vector<double>>> spline_;
};

} // namespace funiform
