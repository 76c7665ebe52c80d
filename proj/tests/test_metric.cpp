#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "funiform/metric.hpp"

using namespace funiform;

namespace {

// Fixed-grid composite Simpson rule, an oracle independent of the adaptive
// quadrature inside the library.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
    const double h = (b - a) / static_cast<double>(panels);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < panels; ++i)
        s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double hellinger_simpson_oracle(double t1, double t2, std::size_t panels_per_piece) {
    auto integrand = [&](double x) {
        const double d = std::sqrt(triangular_pdf(x, t1)) - std::sqrt(triangular_pdf(x, t2));
        return d * d;
    };
    const double lo = std::min(t1, t2), hi = std::max(t1, t2);
    const double d2 = simpson(integrand, 0.0, lo, panels_per_piece) +
                      simpson(integrand, lo, hi, panels_per_piece) +
                      simpson(integrand, hi, 1.0, panels_per_piece);
    return std::sqrt(d2);
}

double kolmogorov_grid_oracle(double t1, double t2, std::size_t n_grid) {
    double sup = 0.0;
    for (std::size_t i = 0; i <= n_grid; ++i) {
        const double y = static_cast<double>(i) / static_cast<double>(n_grid);
        sup = std::max(sup, std::fabs(triangular_cdf(y, t1) - triangular_cdf(y, t2)));
    }
    return sup;
}

} // namespace

TEST_CASE("euclidean metric distances") {
    const MetricSpace ms = make_euclidean_metric(make_interval(0.0, 5.0));
    CHECK(ms.dist(0.0, 0.0) == 0.0);
    CHECK(ms.dist(0.0, 3.0) == 3.0);
    CHECK(euclidean_distance({0.0, 0.0}, {3.0, 4.0}) == Catch::Approx(5.0).margin(1e-14));
    CHECK_THROWS_AS(euclidean_distance({0.0}, {1.0, 2.0}), input_error);
}

TEST_CASE("triangular density values and domain") {
    CHECK(triangular_pdf(0.5, 0.5) == Catch::Approx(2.0));
    CHECK(triangular_pdf(0.25, 0.5) == Catch::Approx(1.0));
    CHECK(triangular_pdf(0.9, 0.5) == Catch::Approx(0.4));
    CHECK_THROWS_AS(triangular_pdf(0.5, 0.0), input_error);
    CHECK_THROWS_AS(triangular_pdf(0.5, 1.0), input_error);
    // density integrates to one
    const double mass = simpson([](double x) { return triangular_pdf(x, 0.3); }, 0.0, 1.0, 20000);
    CHECK(mass == Catch::Approx(1.0).margin(1e-9));
    // cdf is the integral of the pdf
    const double c = simpson([](double x) { return triangular_pdf(x, 0.3); }, 0.0, 0.7, 20000);
    CHECK(triangular_cdf(0.7, 0.3) == Catch::Approx(c).margin(1e-9));
}

TEST_CASE("hellinger distance between triangular densities") {
    const MetricSpace ms = make_hellinger_triangular_metric();
    CHECK(ms.dist(0.3, 0.3) == Catch::Approx(0.0).margin(1e-9));
    CHECK(ms.dist(0.2, 0.8) == Catch::Approx(ms.dist(0.8, 0.2)).margin(1e-12));

    const double impl = ms.dist(0.2, 0.8);
    // piecewise-analytic value: d^2 = 0.1 + 1.5 - 0.6 - 1.25 asin(0.6)
    CHECK(impl == Catch::Approx(0.442293583503530510).epsilon(1e-9));
    // fixed-grid Simpson oracle (1e6 panels overall, kink-split)
    const double oracle = hellinger_simpson_oracle(0.2, 0.8, 333334);
    CHECK(impl == Catch::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("kolmogorov distance between triangular densities") {
    const MetricSpace ms = make_kolmogorov_triangular_metric();
    CHECK(ms.dist(0.3, 0.3) == Catch::Approx(0.0).margin(1e-12));

    const double impl = ms.dist(0.2, 0.8);
    // the CDF difference is maximized at y = 1/2 with value 0.375 exactly
    CHECK(impl == Catch::Approx(0.375).margin(1e-9));
    CHECK(impl == Catch::Approx(kolmogorov_grid_oracle(0.2, 0.8, 1000000)).margin(1e-9));

    // triangle inequality on sampled triples
    Rng rng(5, {0});
    for (int k = 0; k < 200; ++k) {
        const double a = rng.uniform(0.001, 0.999);
        const double b = rng.uniform(0.001, 0.999);
        const double c = rng.uniform(0.001, 0.999);
        CHECK(ms.dist(a, c) <= ms.dist(a, b) + ms.dist(b, c) + 1e-10);
    }
}

TEST_CASE("metric axiom verification") {
    const AxiomReport euclid = verify_metric_axioms(make_euclidean_metric(make_interval(0.0, 1.0)), 1000, 11);
    CHECK(euclid.all_pass());

    const AxiomReport hell = verify_metric_axioms(make_hellinger_triangular_metric(), 1000, 12);
    CHECK(hell.all_pass());

    MetricSpace broken = make_euclidean_metric(make_interval(0.0, 1.0));
    broken.dist = [](double a, double b) {
        if (a == b) return -1.0; // negative self distance
        return std::fabs(a - b);
    };
    const AxiomReport rep = verify_metric_axioms(broken, 100, 13);
    CHECK_FALSE(rep.identity_pass);
    CHECK(rep.worst_identity >= 1.0);
}
