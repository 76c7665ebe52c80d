#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "funiform/error.hpp"
#include "funiform/inference.hpp"
#include "funiform/models.hpp"
#include "funiform/rng.hpp"
#include "funiform/threads.hpp"

namespace funiform {

/// One dose-finding simulation scenario: a true dose-response curve sampled
/// at the five study doses with 20 binomial observations each, fit with the
/// power model under a chosen nonlinear-parameter prior.
struct ScenarioSpec {
    std::string id;
    std::function<double(double)> truth;
};

inline ScenarioSpec make_scenario(const std::string& id) {
    ScenarioSpec s;
    s.id = id;
    if (id == "power1")
        s.truth = [](double x) { return 0.2 + 0.6 * std::pow(x, 0.4); };
    else if (id == "linear")
        s.truth = [](double x) { return 0.2 + 0.6 * x; };
    else if (id == "power2")
        s.truth = [](double x) { return 0.2 + 0.6 * std::pow(x, 4.0); };
    else if (id == "emax")
        s.truth = [](double x) { return 0.2 + 0.6 * x / (x + 0.05); };
    else
        throw input_error("unknown scenario '" + id +
                          "' (expected power1 | linear | power2 | emax)");
    return s;
}

inline const std::vector<double>& scenario_doses() {
    static const std::vector<double> doses{0.0, 0.05, 0.2, 0.6, 1.0};
    return doses;
}

inline std::vector<double> curve_grid() {
    std::vector<double> grid(9);
    for (int i = 0; i < 9; ++i) grid[i] = static_cast<double>(i) / 8.0;
    return grid;
}

/// Aggregated simulation metrics: curve estimation error of the pointwise
/// posterior median (mae1) and of the mode plug-in curve (mae2), average
/// coverage probability and average length of the pointwise 0.9 intervals.
struct ScenarioResult {
    std::string scenario;
    std::string prior;
    double mae1 = 0.0;
    double mae2 = 0.0;
    double cp = 0.0;
    double ile = 0.0;
    std::vector<double> per_dose_cp;
    std::vector<double> per_dose_ile;
    std::size_t n_reps = 0;
    std::size_t n_failed = 0;
};

struct ScenarioOptions {
    std::size_t n_draws = 10000;
    std::size_t n_burnin = 1000;
    std::size_t thin = 2;
    std::size_t patients_per_dose = 20;
    double band_level = 0.9;
    Interval nl_bounds = make_interval(0.05, 20.0);
    std::size_t n_threads = 0;
};

/// Runs n_reps independent replicates of a scenario: simulate binomial data
/// from the truth, sample the posterior, record curve metrics.  Replicate r
/// derives every stream from (rng_seed, r); failed replicates are excluded
/// and counted.
inline ScenarioResult evaluate_scenario(const std::string& scenario_id, PriorKind prior_kind,
                                        std::size_t n_reps, std::uint64_t rng_seed,
                                        const ScenarioOptions& opts = {}) {
    const ScenarioSpec scenario = make_scenario(scenario_id);
    const ModelFunction model = make_model("power");
    const LikelihoodSpec lik{LikKind::binomial};
    const PriorSpec prior = make_prior_spec(model, prior_kind, opts.nl_bounds);
    const std::vector<double> grid = curve_grid();
    std::vector<double> truth_on_grid(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) truth_on_grid[i] = scenario.truth(grid[i]);

    struct RepOutcome {
        bool ok = false;
        double mae1 = 0.0, mae2 = 0.0;
        std::vector<double> covered, length;
    };
    std::vector<RepOutcome> outcomes(n_reps);

    parallel_for(n_reps, opts.n_threads, [&](std::size_t rep) {
        RepOutcome& oc = outcomes[rep];
        try {
            Rng data_rng(rng_seed, {rep, 1});
            Dataset data;
            for (double dose : scenario_doses()) {
                const int s = data_rng.binomial(static_cast<int>(opts.patients_per_dose),
                                                scenario.truth(dose));
                data.rows.push_back(
                    make_binomial_row(dose, static_cast<int>(opts.patients_per_dose), s));
            }
            const PosteriorSample post = sample_posterior_mh(
                model, prior, lik, data, opts.n_draws, opts.n_burnin, opts.thin, rng_seed, {rep, 2});
            const std::vector<BandPoint> band =
                predictive_band(post, model, grid, opts.band_level);
            const std::vector<double> mode =
                posterior_mode(model, prior, lik, data, rng_seed, {rep, 3});
            std::vector<double> mode_theta(mode.begin(), mode.begin() + model.n_params);

            oc.covered.resize(grid.size());
            oc.length.resize(grid.size());
            double mae1 = 0.0, mae2 = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double t = truth_on_grid[i];
                mae1 += std::fabs(t - band[i].median);
                mae2 += std::fabs(t - model.mu(grid[i], mode_theta));
                oc.covered[i] = (t >= band[i].lower && t <= band[i].upper) ? 1.0 : 0.0;
                oc.length[i] = band[i].upper - band[i].lower;
            }
            oc.mae1 = mae1 / static_cast<double>(grid.size());
            oc.mae2 = mae2 / static_cast<double>(grid.size());
            oc.ok = true;
        } catch (const std::exception&) {
            oc.ok = false;
        }
    });

    ScenarioResult res;
    res.scenario = scenario_id;
    res.prior = prior_kind_name(prior_kind);
    res.per_dose_cp.assign(grid.size(), 0.0);
    res.per_dose_ile.assign(grid.size(), 0.0);
    for (const RepOutcome& oc : outcomes) {
        if (!oc.ok) {
            ++res.n_failed;
            continue;
        }
        ++res.n_reps;
        res.mae1 += oc.mae1;
        res.mae2 += oc.mae2;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            res.per_dose_cp[i] += oc.covered[i];
            res.per_dose_ile[i] += oc.length[i];
        }
    }
    if (res.n_reps == 0) throw numerical_error("evaluate_scenario: every replicate failed");
    const double inv = 1.0 / static_cast<double>(res.n_reps);
    res.mae1 *= inv;
    res.mae2 *= inv;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        res.per_dose_cp[i] *= inv;
        res.per_dose_ile[i] *= inv;
        res.cp += res.per_dose_cp[i];
        res.ile += res.per_dose_ile[i];
    }
    res.cp /= static_cast<double>(grid.size());
    res.ile /= static_cast<double>(grid.size());
    return res;
}

} // namespace funiform
