#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "funiform/box.hpp"
#include "funiform/error.hpp"
#include "funiform/fu_prior.hpp"
#include "funiform/linalg.hpp"
#include "funiform/models.hpp"
#include "funiform/optimize.hpp"
#include "funiform/rng.hpp"

namespace funiform {

enum class LikKind { normal, binomial };

struct LikelihoodSpec {
    LikKind kind = LikKind::normal;
};

/// One observation: (x, y) for the normal likelihood, (x, n_trials,
/// n_success) for the binomial one.
struct DataRow {
    double x = 0.0;
    double y = 0.0;
    int n_trials = 0;
    int n_success = 0;
};

struct Dataset {
    std::vector<DataRow> rows;
};

inline DataRow make_normal_row(double x, double y) {
    DataRow r;
    r.x = x;
    r.y = y;
    return r;
}

inline DataRow make_binomial_row(double x, int n_trials, int n_success) {
    if (n_trials <= 0) throw input_error("data row: n_trials must be positive");
    if (n_success < 0 || n_success > n_trials)
        throw input_error("data row: need 0 <= n_success <= n_trials");
    DataRow r;
    r.x = x;
    r.n_trials = n_trials;
    r.n_success = n_success;
    return r;
}

inline void validate_dataset(const ModelFunction& model, const Dataset& data) {
    for (const DataRow& r : data.rows)
        if (!model.design_region.contains(r.x))
            throw input_error("dataset: x = " + std::to_string(r.x) +
                              " outside the model design region");
}

enum class PriorKind { uniform, functional_uniform, jeffreys };

inline PriorKind parse_prior_kind(const std::string& s) {
    if (s == "uniform") return PriorKind::uniform;
    if (s == "functional-uniform") return PriorKind::functional_uniform;
    if (s == "jeffreys") return PriorKind::jeffreys;
    throw input_error("unknown prior kind '" + s +
                      "' (expected uniform | functional-uniform | jeffreys)");
}

inline std::string prior_kind_name(PriorKind k) {
    switch (k) {
        case PriorKind::uniform: return "uniform";
        case PriorKind::functional_uniform: return "functional-uniform";
        default: return "jeffreys";
    }
}

/// Prior specification for the sampled parameters.  Linear parameters get
/// improper flat priors; the nonlinear slice gets a compact box and, for the
/// functional uniform kind, an unnormalized log density.  The Jeffreys kind
/// derives its density from the data design inside log_posterior.  log_scale
/// is a constant added to the log prior; it cancels in MH acceptance ratios
/// and self-normalized importance weights, so posterior summaries do not
/// depend on it.
struct PriorSpec {
    PriorKind kind = PriorKind::uniform;
    ParamBox nl_box;
    std::function<double(const std::vector<double>&)> nl_log_unnorm;
    double log_scale = 0.0;
    double sigma_min = 1e-8; // positivity floor for the normal-model scale
};

/// Builds a PriorSpec for a model whose nonlinear parameter is scalar.  The
/// functional uniform density is tabulated once (Lebesgue weighting on the
/// design region) so posterior evaluations stay cheap.
inline PriorSpec make_prior_spec(const ModelFunction& model, PriorKind kind,
                                 const Interval& nl_bounds) {
    PriorSpec spec;
    spec.kind = kind;
    std::vector<double> lo, hi;
    for (std::size_t i = 0; i < model.nonlinear_slice.size(); ++i) {
        lo.push_back(nl_bounds.lo);
        hi.push_back(nl_bounds.hi);
    }
    spec.nl_box = make_box(lo, hi);
    if (kind == PriorKind::functional_uniform) {
        if (model.nonlinear_slice.size() != 1)
            throw input_error("make_prior_spec: functional uniform needs a scalar nonlinear parameter");
        if (nl_bounds.lo < model.param_box.dims[0].lo - 1e-12 ||
            nl_bounds.hi > model.param_box.dims[0].hi + 1e-12)
            throw input_error("make_prior_spec: bounds exceed the model parameter box");
        TabulatedLogDensity tab = tabulate_fu_logdensity(model, nl_bounds);
        spec.nl_log_unnorm = [tab](const std::vector<double>& t) { return tab(t[0]); };
    }
    return spec;
}

namespace detail {

inline std::vector<double> nonlinear_part(const ModelFunction& model,
                                          const std::vector<double>& theta_full) {
    std::vector<double> t;
    t.reserve(model.nonlinear_slice.size());
    for (std::size_t i : model.nonlinear_slice) t.push_back(theta_full[i]);
    return t;
}

/// log root-determinant of the Fisher information at the data design:
/// sum over rows of w_i J_full^T J_full with w_i = n_i / (mu_i (1 - mu_i))
/// for the binomial likelihood and 1 for the normal one.
inline double jeffreys_logprior(const ModelFunction& model, const LikelihoodSpec& lik,
                                const Dataset& data, const std::vector<double>& theta_full) {
    const std::size_t p = model.n_params;
    SmallMatrix info(p);
    for (const DataRow& r : data.rows) {
        double w = 1.0;
        if (lik.kind == LikKind::binomial) {
            const double mu = model.mu(r.x, theta_full);
            if (!(mu > 0.0 && mu < 1.0)) return -std::numeric_limits<double>::infinity();
            w = static_cast<double>(r.n_trials) / (mu * (1.0 - mu));
        }
        const std::vector<double> j = model.jac_full(r.x, theta_full);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) info(a, b) += w * j[a] * j[b];
    }
    SmallMatrix chol(p);
    if (!linalg::cholesky(info, chol)) return -std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (std::size_t i = 0; i < p; ++i) logdet += 2.0 * std::log(chol(i, i));
    return 0.5 * logdet;
}

} // namespace detail

/// Unnormalized log posterior: log likelihood + log nonlinear-parameter prior
/// (+ the sigma^{-2} scale prior for the normal case).  Returns -infinity
/// outside the constraints: nonlinear box, binomial simplex theta0, theta1 >= 0
/// with theta0 + theta1 <= 1, mean in [0, 1], sigma above its floor.
inline double log_posterior(const ModelFunction& model, const PriorSpec& prior,
                            const LikelihoodSpec& lik, const Dataset& data,
                            const std::vector<double>& theta_full, double sigma = 1.0) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (theta_full.size() != model.n_params)
        throw input_error("log_posterior: theta_full has wrong dimension");
    const std::vector<double> t_nl = detail::nonlinear_part(model, theta_full);
    if (!prior.nl_box.contains(t_nl, 0.0)) return neg_inf;
    if (!model.param_box.contains(t_nl, 0.0)) return neg_inf;
    if (lik.kind == LikKind::binomial && model.n_params == 3) {
        if (theta_full[0] < 0.0 || theta_full[1] < 0.0 || theta_full[0] + theta_full[1] > 1.0)
            return neg_inf;
    }
    double ll = 0.0;
    if (lik.kind == LikKind::normal) {
        if (!(sigma >= prior.sigma_min)) return neg_inf;
        const double inv2s2 = 0.5 / (sigma * sigma);
        for (const DataRow& r : data.rows) {
            const double res = r.y - model.mu(r.x, theta_full);
            ll -= res * res * inv2s2;
        }
        const double m = static_cast<double>(data.rows.size());
        ll -= m * std::log(sigma) + 0.5 * m * std::log(2.0 * 3.14159265358979323846);
        ll -= 2.0 * std::log(sigma); // scale prior proportional to sigma^{-2}
    } else {
        for (const DataRow& r : data.rows) {
            const double mu = model.mu(r.x, theta_full);
            if (mu < 0.0 || mu > 1.0) return neg_inf;
            const int s = r.n_success, f = r.n_trials - r.n_success;
            if (s > 0) {
                if (mu <= 0.0) return neg_inf;
                ll += s * std::log(mu);
            }
            if (f > 0) {
                if (mu >= 1.0) return neg_inf;
                ll += f * std::log(1.0 - mu);
            }
        }
    }
    double lp = 0.0;
    switch (prior.kind) {
        case PriorKind::uniform: break;
        case PriorKind::functional_uniform: lp = prior.nl_log_unnorm(t_nl); break;
        case PriorKind::jeffreys: lp = detail::jeffreys_logprior(model, lik, data, theta_full); break;
    }
    if (!std::isfinite(lp)) return neg_inf;
    return ll + lp + prior.log_scale;
}

/// Draws from a posterior.  For MCMC the weights are all zero (equal); after
/// importance resampling the retained draws are equally weighted too, with
/// the pre-resampling effective sample size reported.  The normal-likelihood
/// state appends sigma as the last column.
struct PosteriorSample {
    std::vector<std::vector<double>> draws;
    std::vector<double> log_weights;
    double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
    double ess = 0.0;
    std::size_t n_burnin = 0;
    std::size_t thin = 1;
    bool has_sigma = false;
    std::size_t n_params = 0;
    bool used_fallback = false;
    std::string warning;
};

/// Effective sample size by Geyer's initial positive sequence estimator.
inline double ess_ips(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    auto gamma = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) acc += (x[i] - mean) * (x[i + k] - mean);
        return acc / static_cast<double>(n);
    };
    const double g0 = gamma(0);
    if (!(g0 > 0.0)) return static_cast<double>(n);
    double var = -g0;
    for (std::size_t j = 0; 2 * j + 1 < n; ++j) {
        const double pair = gamma(2 * j) + gamma(2 * j + 1);
        if (pair <= 0.0) break;
        var += 2.0 * pair;
    }
    if (!(var > 0.0)) return static_cast<double>(n);
    return std::max(1.0, static_cast<double>(n) * g0 / var);
}

namespace detail {

struct PosteriorTarget {
    const ModelFunction& model;
    const PriorSpec& prior;
    const LikelihoodSpec& lik;
    const Dataset& data;

    std::size_t dim() const {
        return model.n_params + (lik.kind == LikKind::normal ? 1 : 0);
    }
    bool has_sigma() const { return lik.kind == LikKind::normal; }

    double operator()(const std::vector<double>& state) const {
        if (has_sigma()) {
            std::vector<double> theta(state.begin(), state.end() - 1);
            return log_posterior(model, prior, lik, data, theta, state.back());
        }
        return log_posterior(model, prior, lik, data, state, 1.0);
    }
};

/// Draws candidate states until the log posterior is finite.  Linear
/// parameters start from data-range heuristics (or the binomial simplex),
/// nonlinear ones from the prior box, sigma from the response spread.
inline std::vector<double> find_interior_start(const PosteriorTarget& target, Rng& rng,
                                               std::size_t max_tries = 4000) {
    const ModelFunction& model = target.model;
    double y_lo = -1.0, y_hi = 1.0;
    if (!target.data.rows.empty() && target.lik.kind == LikKind::normal) {
        y_lo = y_hi = target.data.rows.front().y;
        for (const DataRow& r : target.data.rows) {
            y_lo = std::min(y_lo, r.y);
            y_hi = std::max(y_hi, r.y);
        }
    }
    const double spread = std::max(y_hi - y_lo, 1e-3);
    std::vector<bool> is_nl(model.n_params, false);
    for (std::size_t i : model.nonlinear_slice) is_nl[i] = true;
    std::vector<double> state(target.dim());
    for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
        std::size_t nl_at = 0;
        for (std::size_t i = 0; i < model.n_params; ++i) {
            if (is_nl[i]) {
                const Interval& iv = target.prior.nl_box.dims[nl_at++];
                state[i] = rng.uniform(iv.lo, iv.hi);
            } else if (target.lik.kind == LikKind::binomial) {
                state[i] = (i == 0) ? rng.uniform(0.02, 0.5)
                                    : rng.uniform(0.02, std::max(0.05, 1.0 - state[0] - 0.02));
            } else {
                state[i] = (i == 0) ? rng.uniform(y_lo - 0.5 * spread, y_hi + 0.5 * spread)
                                    : rng.uniform(-2.0 * spread, 2.0 * spread);
            }
        }
        if (target.has_sigma()) state.back() = spread * rng.uniform(0.2, 1.5);
        if (std::isfinite(target(state))) return state;
    }
    throw numerical_error("posterior sampling: no interior starting point found after " +
                          std::to_string(max_tries) + " tries");
}

} // namespace detail

/// Adaptive random-walk Metropolis.  Per-coordinate proposal scales are tuned
/// during burn-in toward acceptance 0.3 +- 0.1 and frozen afterwards; every
/// thin-th post-burn-in state is kept.  Deterministic under (seed, streams).
/// When trace is given, each step appends (current lp, proposal lp).
inline PosteriorSample sample_posterior_mh(const ModelFunction& model, const PriorSpec& prior,
                                           const LikelihoodSpec& lik, const Dataset& data,
                                           std::size_t n_draws, std::size_t n_burnin,
                                           std::size_t thin, std::uint64_t seed,
                                           std::vector<std::uint64_t> streams = {},
                                           std::vector<std::pair<double, double>>* trace = nullptr) {
    if (n_draws == 0 || thin == 0) throw input_error("sample_posterior_mh: need n_draws and thin >= 1");
    validate_dataset(model, data);
    const detail::PosteriorTarget target{model, prior, lik, data};
    streams.push_back(0x11u);
    Rng rng(seed, streams);
    std::vector<double> state = detail::find_interior_start(target, rng);
    double lp = target(state);
    const std::size_t dim = target.dim();
    std::vector<double> scale(dim);
    for (std::size_t i = 0; i < dim; ++i) scale[i] = 0.1 * (1.0 + std::fabs(state[i]));

    PosteriorSample out;
    out.n_burnin = n_burnin;
    out.thin = thin;
    out.has_sigma = target.has_sigma();
    out.n_params = model.n_params;
    out.draws.reserve(n_draws);

    const std::size_t total = n_burnin + n_draws * thin;
    std::size_t window_acc = 0, window_n = 0, post_acc = 0, post_n = 0;
    std::vector<double> proposal(dim);
    for (std::size_t it = 0; it < total; ++it) {
        for (std::size_t i = 0; i < dim; ++i) proposal[i] = state[i] + scale[i] * rng.normal();
        const double lp_prop = target(proposal);
        if (trace) trace->emplace_back(lp, lp_prop);
        const double log_u = std::log(std::max(rng.uniform01(), 1e-300));
        const bool accept = lp_prop > -std::numeric_limits<double>::infinity() &&
                            log_u < lp_prop - lp;
        if (accept) {
            state = proposal;
            lp = lp_prop;
        }
        if (it < n_burnin) {
            window_acc += accept ? 1 : 0;
            if (++window_n == 50) {
                const double rate = static_cast<double>(window_acc) / 50.0;
                if (rate > 0.4)
                    for (double& s : scale) s *= 1.5;
                else if (rate < 0.2)
                    for (double& s : scale) s *= 0.6;
                window_acc = window_n = 0;
            }
        } else {
            post_acc += accept ? 1 : 0;
            ++post_n;
            if ((it - n_burnin) % thin == thin - 1) out.draws.push_back(state);
        }
    }
    out.log_weights.assign(out.draws.size(), 0.0);
    out.acceptance_rate = post_n > 0 ? static_cast<double>(post_acc) / static_cast<double>(post_n)
                                     : std::numeric_limits<double>::quiet_NaN();
    const std::size_t watch = model.nonlinear_slice.empty() ? 0 : model.nonlinear_slice[0];
    std::vector<double> watch_trace(out.draws.size());
    for (std::size_t i = 0; i < out.draws.size(); ++i) watch_trace[i] = out.draws[i][watch];
    out.ess = ess_ips(watch_trace);
    return out;
}

/// Posterior mode by multistart Nelder-Mead on the negative log posterior.
/// Returns the full state (sigma appended for the normal likelihood).
inline std::vector<double> posterior_mode(const ModelFunction& model, const PriorSpec& prior,
                                          const LikelihoodSpec& lik, const Dataset& data,
                                          std::uint64_t seed,
                                          std::vector<std::uint64_t> streams = {},
                                          std::size_t n_starts = 20) {
    validate_dataset(model, data);
    const detail::PosteriorTarget target{model, prior, lik, data};
    streams.push_back(0x12u);
    Rng rng(seed, streams);
    auto neg = [&](const std::vector<double>& s) {
        const double v = target(s);
        return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    };
    std::vector<double> best;
    double best_val = std::numeric_limits<double>::infinity();
    std::string failures;
    for (std::size_t s = 0; s < n_starts; ++s) {
        try {
            const std::vector<double> start = detail::find_interior_start(target, rng);
            const OptimResult r = nelder_mead(neg, start, 0.1, 1e-12, 20000);
            if (r.value < best_val) {
                best_val = r.value;
                best = r.x;
            }
        } catch (const numerical_error& e) {
            failures = e.what();
        }
    }
    if (!std::isfinite(best_val))
        throw numerical_error(std::string("posterior_mode: every start failed") +
                              (failures.empty() ? "" : ": " + failures));
    return best;
}

/// Laplace importance-sampling-resampling: multivariate-t (df = 4) proposal
/// at the posterior mode with covariance from the negative inverse Hessian;
/// self-normalized weights, multinomial resampling.  A non-negative-definite
/// Hessian falls back to random-walk Metropolis with a warning.
inline PosteriorSample sample_posterior_isr(const ModelFunction& model, const PriorSpec& prior,
                                            const LikelihoodSpec& lik, const Dataset& data,
                                            std::size_t n_proposal, std::size_t n_resample,
                                            std::uint64_t seed,
                                            std::vector<std::uint64_t> streams = {}) {
    if (n_proposal == 0 || n_resample == 0)
        throw input_error("sample_posterior_isr: need positive sample sizes");
    validate_dataset(model, data);
    const detail::PosteriorTarget target{model, prior, lik, data};
    const std::size_t p = target.dim();

    std::vector<std::uint64_t> mode_streams = streams;
    mode_streams.push_back(0x21u);
    const std::vector<double> mode = posterior_mode(model, prior, lik, data, seed, mode_streams);

    auto fallback = [&](const std::string& why) {
        std::vector<std::uint64_t> mh_streams = streams;
        mh_streams.push_back(0x22u);
        PosteriorSample mh = sample_posterior_mh(model, prior, lik, data, n_resample, 1000, 2,
                                                 seed, mh_streams);
        mh.used_fallback = true;
        mh.warning = why;
        return mh;
    };

    // central-difference Hessian of the log posterior at the mode
    SmallMatrix neg_hess(p);
    {
        std::vector<double> h(p);
        for (std::size_t i = 0; i < p; ++i) h[i] = 1e-5 * (1.0 + std::fabs(mode[i]));
        const double f0 = target(mode);
        if (!std::isfinite(f0)) return fallback("log posterior not finite at the located mode");
        std::vector<double> t = mode;
        bool bad = false;
        for (std::size_t i = 0; i < p && !bad; ++i) {
            t[i] = mode[i] + h[i];
            const double fp = target(t);
            t[i] = mode[i] - h[i];
            const double fm = target(t);
            t[i] = mode[i];
            if (!std::isfinite(fp) || !std::isfinite(fm)) bad = true;
            neg_hess(i, i) = -(fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        }
        for (std::size_t i = 0; i < p && !bad; ++i)
            for (std::size_t j = i + 1; j < p && !bad; ++j) {
                auto at = [&](double si, double sj) {
                    t[i] = mode[i] + si * h[i];
                    t[j] = mode[j] + sj * h[j];
                    const double v = target(t);
                    t[i] = mode[i];
                    t[j] = mode[j];
                    return v;
                };
                const double a = at(1, 1), b = at(1, -1), c = at(-1, 1), d = at(-1, -1);
                if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
                    bad = true;
                    break;
                }
                const double mixed = -(a - b - c + d) / (4.0 * h[i] * h[j]);
                neg_hess(i, j) = mixed;
                neg_hess(j, i) = mixed;
            }
        if (bad) return fallback("mode too close to a constraint for Hessian differencing");
    }
    SmallMatrix hess_chol(p);
    if (!linalg::cholesky(neg_hess, hess_chol))
        return fallback("Hessian at the mode is not negative definite");
    SmallMatrix cov(p);
    if (!linalg::inverse_spd(neg_hess, cov))
        return fallback("Hessian at the mode could not be inverted");
    SmallMatrix cov_chol(p);
    if (!linalg::cholesky(cov, cov_chol))
        return fallback("Laplace covariance is not positive definite");
    double half_logdet_cov = 0.0;
    for (std::size_t i = 0; i < p; ++i) half_logdet_cov += std::log(cov_chol(i, i));

    std::vector<std::uint64_t> prop_streams = streams;
    prop_streams.push_back(0x23u);
    Rng rng(seed, prop_streams);

    const double df = 4.0;
    const double lognorm = std::lgamma(0.5 * (df + p)) - std::lgamma(0.5 * df) -
                           0.5 * p * std::log(df * 3.14159265358979323846) - half_logdet_cov;
    std::vector<std::vector<double>> proposals(n_proposal, std::vector<double>(p));
    std::vector<double> logw(n_proposal);
    std::vector<double> z(p);
    for (std::size_t k = 0; k < n_proposal; ++k) {
        for (std::size_t i = 0; i < p; ++i) z[i] = rng.normal();
        const double u = rng.chisq4();
        const double scale_t = std::sqrt(df / std::max(u, 1e-300));
        double maha = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += cov_chol(i, j) * z[j];
            proposals[k][i] = mode[i] + scale_t * acc;
            maha += z[i] * z[i];
        }
        const double m2 = maha * df / std::max(u, 1e-300);
        const double logq = lognorm - 0.5 * (df + p) * std::log1p(m2 / df);
        const double lp = target(proposals[k]);
        logw[k] = std::isfinite(lp) ? lp - logq : -std::numeric_limits<double>::infinity();
    }
    double shift = -std::numeric_limits<double>::infinity();
    for (double w : logw) shift = std::max(shift, w);
    if (!std::isfinite(shift))
        throw numerical_error("sample_posterior_isr: all importance weights vanished");
    double sum_w = 0.0, sum_w2 = 0.0;
    std::vector<double> cum(n_proposal);
    for (std::size_t k = 0; k < n_proposal; ++k) {
        const double w = std::exp(logw[k] - shift);
        sum_w += w;
        sum_w2 += w * w;
        cum[k] = sum_w;
    }
    PosteriorSample out;
    out.ess = sum_w * sum_w / sum_w2;
    out.has_sigma = target.has_sigma();
    out.n_params = model.n_params;
    out.draws.reserve(n_resample);
    for (std::size_t k = 0; k < n_resample; ++k) {
        const double u = rng.uniform01() * sum_w;
        const std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        out.draws.push_back(proposals[std::min(idx, n_proposal - 1)]);
    }
    out.log_weights.assign(out.draws.size(), 0.0);
    return out;
}

namespace detail {

/// Smallest value whose cumulative weight reaches q of the total.
inline double weighted_quantile(std::vector<std::pair<double, double>>& value_weight, double q) {
    std::sort(value_weight.begin(), value_weight.end());
    double total = 0.0;
    for (const auto& vw : value_weight) total += vw.second;
    const double target = q * total;
    double acc = 0.0;
    for (const auto& vw : value_weight) {
        acc += vw.second;
        if (acc >= target) return vw.first;
    }
    return value_weight.back().first;
}

} // namespace detail

struct BandPoint {
    double x = 0.0;
    double lower = 0.0;
    double median = 0.0;
    double upper = 0.0;
};

/// Pointwise posterior band of the mean curve: weighted quantiles of
/// mu(x, draw) at each dose.  Level L gives the ((1-L)/2, (1+L)/2) band, so
/// level 0 collapses to the median.
inline std::vector<BandPoint> predictive_band(const PosteriorSample& samples,
                                              const ModelFunction& model,
                                              const std::vector<double>& dose_grid, double level) {
    if (samples.draws.empty()) throw input_error("predictive_band: empty posterior sample");
    if (!(level >= 0.0 && level < 1.0))
        throw input_error("predictive_band: level must lie in [0, 1)");
    const std::size_t n = samples.draws.size();
    std::vector<double> weights(n, 1.0);
    if (samples.log_weights.size() == n) {
        double shift = -std::numeric_limits<double>::infinity();
        for (double lw : samples.log_weights) shift = std::max(shift, lw);
        if (std::isfinite(shift) && shift != 0.0)
            for (std::size_t i = 0; i < n; ++i) weights[i] = std::exp(samples.log_weights[i] - shift);
        else if (shift == 0.0)
            for (std::size_t i = 0; i < n; ++i)
                weights[i] = std::exp(samples.log_weights[i]);
    }
    const double q_lo = 0.5 * (1.0 - level), q_hi = 0.5 * (1.0 + level);
    std::vector<BandPoint> band;
    band.reserve(dose_grid.size());
    std::vector<std::pair<double, double>> vw(n);
    std::vector<double> theta(model.n_params);
    for (double x : dose_grid) {
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(samples.draws[i].begin(), model.n_params, theta.begin());
            vw[i] = {model.mu(x, theta), weights[i]};
        }
        BandPoint bp;
        bp.x = x;
        bp.median = detail::weighted_quantile(vw, 0.5);
        bp.lower = level == 0.0 ? bp.median : detail::weighted_quantile(vw, q_lo);
        bp.upper = level == 0.0 ? bp.median : detail::weighted_quantile(vw, q_hi);
        band.push_back(bp);
    }
    return band;
}

} // namespace funiform
