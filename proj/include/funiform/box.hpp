#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "funiform/error.hpp"

namespace funiform {

/// Closed interval [lo, hi] with finite endpoints, lo < hi.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const {
        return x >= lo - tol && x <= hi + tol;
    }
};

inline Interval make_interval(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw input_error("interval: need finite lo < hi, got [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return {lo, hi};
}

/// Axis-aligned parameter box; one Interval per coordinate.
struct ParamBox {
    std::vector<Interval> dims;

    std::size_t dim() const { return dims.size(); }

    bool contains(const std::vector<double>& theta, double tol = 0.0) const {
        if (theta.size() != dims.size()) return false;
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (!dims[i].contains(theta[i], tol)) return false;
        return true;
    }

    double volume() const {
        double v = 1.0;
        for (const Interval& d : dims) v *= d.width();
        return v;
    }
};

inline ParamBox make_box(const std::vector<double>& lo, const std::vector<double>& hi) {
    if (lo.size() != hi.size() || lo.empty())
        throw input_error("box: lo and hi must share a nonzero size");
    ParamBox box;
    box.dims.reserve(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) box.dims.push_back(make_interval(lo[i], hi[i]));
    return box;
}

inline ParamBox make_box(const Interval& iv) {
    ParamBox box;
    box.dims.push_back(iv);
    return box;
}

} // namespace funiform
