#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "funiform/design.hpp"
#include "funiform/fu_prior.hpp"
#include "funiform/inference.hpp"
#include "funiform/io.hpp"
#include "funiform/lattice.hpp"
#include "funiform/metric.hpp"
#include "funiform/models.hpp"
#include "funiform/prior.hpp"
#include "funiform/scenario.hpp"

namespace funiform {
namespace cli {

namespace detail {

inline Interval interval_from(const std::vector<double>& v, const std::string& flag) {
    if (v.size() != 2) throw input_error("flag " + flag + " needs two comma-separated numbers");
    return make_interval(v[0], v[1]);
}

/// Default normalization interval per closed-form model.
inline Interval default_eval_interval(const std::string& model_id) {
    if (model_id == "exponential") return make_interval(0.0, 5.0);
    if (model_id == "emax") return make_interval(0.004, 6.0);
    if (model_id == "power") return make_interval(0.05, 20.0);
    throw input_error("no default evaluation interval for model '" + model_id + "'");
}

/// Builds a registry model, optionally overriding design region and
/// parameter box from a JSON document {model_id, x_range:[lo,hi],
/// bounds:[lo,hi]}.
inline ModelFunction model_from_flags(const std::string& model_id, const std::string& json_path,
                                      RunManifest& manifest) {
    if (json_path.empty()) return make_model(model_id);
    std::ifstream in(json_path);
    if (!in) throw input_error("cannot open model JSON '" + json_path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw input_error("model JSON '" + json_path + "' is not valid JSON: " + e.what());
    }
    manifest.inputs.emplace_back(json_path, file_checksum(json_path));
    const std::string id = j.value("model_id", model_id);
    ModelFunction m = make_model(id);
    if (j.contains("x_range")) {
        const auto& r = j["x_range"];
        m.design_region = make_interval(r.at(0).get<double>(), r.at(1).get<double>());
    }
    if (j.contains("bounds")) {
        const auto& b = j["bounds"];
        m.param_box = make_box(make_interval(b.at(0).get<double>(), b.at(1).get<double>()));
    }
    return m;
}

inline WeightingMeasure weighting_from_flag(const std::string& flag, const ModelFunction& model,
                                            RunManifest& manifest) {
    if (flag == "lebesgue") return make_lebesgue();
    const std::string prefix = "design:";
    if (flag.rfind(prefix, 0) != 0)
        throw input_error("--weighting must be 'lebesgue' or 'design:FILE'");
    const std::string path = flag.substr(prefix.size());
    std::ifstream in(path);
    if (!in) throw input_error("cannot open design file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw input_error("design file '" + path + "' is not valid JSON: " + e.what());
    }
    manifest.inputs.emplace_back(path, file_checksum(path));
    std::vector<double> pts = j.at("points").get<std::vector<double>>();
    std::vector<double> wts = j.at("weights").get<std::vector<double>>();
    for (double x : pts)
        if (!model.design_region.contains(x))
            throw input_error("design point " + std::to_string(x) + " outside the design region");
    return make_discrete(pts, wts);
}

inline void add_output(RunManifest& manifest, const std::string& path) {
    manifest.outputs.emplace_back(path, file_checksum(path));
}

inline void finish_manifest(RunManifest& manifest, const Stopwatch& watch,
                            const std::string& manifest_path) {
    manifest.duration_seconds = watch.seconds();
    write_manifest(manifest, manifest_path);
}

inline std::string manifest_path_for(const std::string& out_path) {
    return out_path + ".manifest.json";
}

inline void write_density_csv(const std::string& path, const DensityEstimate& est) {
    CsvWriter csv(path, {"grid", "density", "cdf"});
    for (std::size_t i = 0; i < est.grid.size(); ++i)
        csv.row({est.grid[i], est.density[i], est.cdf[i]});
}

inline void write_design_json(const std::string& path, const Design& d, double criterion,
                              const std::string& prior, const std::string& model_id,
                              const Interval& theta_range, const Interval& x_range,
                              std::uint64_t seed) {
    nlohmann::json j;
    j["model"] = model_id;
    j["prior"] = prior;
    j["seed"] = seed;
    j["theta_range"] = {theta_range.lo, theta_range.hi};
    j["x_range"] = {x_range.lo, x_range.hi};
    j["points"] = d.points;
    j["weights"] = d.weights;
    j["criterion"] = criterion;
    std::ofstream out(path);
    if (!out) throw input_error("cannot open output file '" + path + "'");
    out << j.dump(2) << "\n";
}

inline PriorDensity design_prior(const std::string& prior_name, const ModelFunction& model,
                                 const Interval& theta_range) {
    if (prior_name == "uniform") return build_flat_prior(theta_range);
    if (prior_name == "functional-uniform") return build_fu_prior(model, theta_range);
    throw input_error("design prior must be 'uniform' or 'functional-uniform'");
}

/// Shared by `prior eval` and `repro fig3`.  The normalized column is
/// rescaled so its trapezoid integral over the emitted grid is exactly 1,
/// mirroring how lattice densities are renormalized; the table is then
/// self-consistent as a discrete density at any grid size.
inline void run_prior_eval(const ModelFunction& model, const WeightingMeasure& weighting,
                           const Interval& interval, std::size_t grid_n,
                           const std::string& out_path) {
    if (grid_n < 2) throw input_error("--grid must be at least 2");
    ModelFunction m = model;
    m.param_box = make_box(interval);
    std::vector<double> thetas(grid_n), unnorm(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i) {
        thetas[i] = interval.lo + interval.width() * static_cast<double>(i) /
                                      static_cast<double>(grid_n - 1);
        unnorm[i] = std::exp(functional_uniform_logdensity(m, {thetas[i]}, weighting));
        if (!std::isfinite(unnorm[i]))
            throw numerical_error("prior eval: density not finite at theta = " +
                                  std::to_string(thetas[i]));
    }
    double z = 0.0;
    for (std::size_t i = 0; i + 1 < grid_n; ++i)
        z += 0.5 * (unnorm[i] + unnorm[i + 1]) * (thetas[i + 1] - thetas[i]);
    if (!(z > 0.0)) throw numerical_error("prior eval: grid mass is not positive");
    CsvWriter csv(out_path, {"theta", "unnormalized", "normalized"});
    for (std::size_t i = 0; i < grid_n; ++i) csv.row({thetas[i], unnorm[i], unnorm[i] / z});
}

/// Shared by `lattice` and `repro fig2`.
inline void run_lattice(const std::string& metric_name, double eps, const Interval& interval,
                        const std::string& out_path, const std::string& density_path) {
    MetricSpace ms = [&]() {
        if (metric_name == "euclid") return make_euclidean_metric(interval);
        if (metric_name == "hellinger-tri") return make_hellinger_triangular_metric();
        if (metric_name == "kolmogorov-tri") return make_kolmogorov_triangular_metric();
        throw input_error("--metric must be euclid | hellinger-tri | kolmogorov-tri");
    }();
    const EpsilonLattice lat = build_epsilon_lattice(ms, eps);
    if (!out_path.empty()) {
        CsvWriter csv(out_path, {"theta"});
        for (double p : lat.points) csv.row({p});
    }
    if (!density_path.empty()) {
        const DensityEstimate est = lattice_density(lat);
        write_density_csv(density_path, est);
    }
}

struct SimulateSettings {
    std::vector<std::string> scenarios;
    std::vector<PriorKind> priors;
    std::size_t reps = 100;
    std::uint64_t seed = 1729;
    ScenarioOptions opts;
};

inline void run_simulate(const SimulateSettings& s, const std::string& out_path) {
    CsvWriter csv(out_path, {"prior", "scenario", "mae1", "mae2", "cp", "ile"});
    for (PriorKind prior : s.priors)
        for (const std::string& scenario : s.scenarios) {
            const ScenarioResult r = evaluate_scenario(scenario, prior, s.reps, s.seed, s.opts);
            csv.row_mixed({r.prior, r.scenario, format_double(r.mae1), format_double(r.mae2),
                           format_double(r.cp), format_double(r.ile)});
        }
}

} // namespace detail

/// Dispatches a full command line.  Exit code 0 on success, 1 on input
/// errors (including flag errors), 2 on numerical failures.
inline int run(int argc, const char* const* argv) {
    std::string command_line;
    for (int i = 0; i < argc; ++i) command_line += std::string(i ? " " : "") + argv[i];

    CLI::App app{"functional uniform priors for nonlinear models"};
    app.require_subcommand(1);

    // ---------------------------------------------------------------- lattice
    auto* lattice_cmd = app.add_subcommand("lattice", "build an epsilon lattice and its density");
    std::string lat_metric = "euclid";
    double lat_eps = 0.01;
    std::vector<double> lat_interval{0.0, 1.0};
    std::string lat_out = "points.csv", lat_density;
    lattice_cmd->add_option("--metric", lat_metric, "euclid | hellinger-tri | kolmogorov-tri")
        ->required();
    lattice_cmd->add_option("--eps", lat_eps, "separation in metric units")->required();
    lattice_cmd->add_option("--interval", lat_interval, "parameter interval a,b (euclid only)")
        ->delimiter(',')
        ->expected(2);
    lattice_cmd->add_option("--out", lat_out, "points CSV path");
    lattice_cmd->add_option("--density", lat_density, "density CSV path (optional)");
    lattice_cmd->callback([&]() {
        Stopwatch watch;
        RunManifest manifest;
        manifest.command_line = command_line;
        if (!(lat_eps > 0.0)) throw input_error("--eps must be positive");
        detail::run_lattice(lat_metric, lat_eps,
                            detail::interval_from(lat_interval, "--interval"), lat_out,
                            lat_density);
        detail::add_output(manifest, lat_out);
        if (!lat_density.empty()) detail::add_output(manifest, lat_density);
        detail::finish_manifest(manifest, watch, detail::manifest_path_for(lat_out));
    });

    // ------------------------------------------------------------------ prior
    auto* prior_cmd = app.add_subcommand("prior", "functional uniform prior evaluation/sampling");
    prior_cmd->require_subcommand(1);

    auto* prior_eval = prior_cmd->add_subcommand("eval", "tabulate the prior density on a grid");
    std::string pe_model = "exponential", pe_weighting = "lebesgue", pe_model_json,
                pe_out = "prior.csv";
    std::size_t pe_grid = 200;
    std::vector<double> pe_interval;
    prior_eval->add_option("--model", pe_model, "exponential | emax | power")->required();
    prior_eval->add_option("--weighting", pe_weighting, "lebesgue | design:FILE");
    prior_eval->add_option("--grid", pe_grid, "number of grid points (default 200)");
    prior_eval->add_option("--interval", pe_interval, "normalization interval a,b")
        ->delimiter(',')
        ->expected(2);
    prior_eval->add_option("--model-json", pe_model_json, "JSON model override");
    prior_eval->add_option("--out", pe_out, "output CSV path");
    prior_eval->callback([&]() {
        Stopwatch watch;
        RunManifest manifest;
        manifest.command_line = command_line;
        const ModelFunction model = detail::model_from_flags(pe_model, pe_model_json, manifest);
        const WeightingMeasure w = detail::weighting_from_flag(pe_weighting, model, manifest);
        const Interval iv = pe_interval.empty() ? detail::default_eval_interval(model.model_id)
                                                : detail::interval_from(pe_interval, "--interval");
        detail::run_prior_eval(model, w, iv, pe_grid, pe_out);
        detail::add_output(manifest, pe_out);
        detail::finish_manifest(manifest, watch, detail::manifest_path_for(pe_out));
    });

    auto* prior_sample = prior_cmd->add_subcommand("sample", "draw from the normalized prior");
    std::string ps_model = "exponential", ps_model_json, ps_out = "samples.csv";
    std::size_t ps_n = 1000;
    std::uint64_t ps_seed = 1729;
    std::vector<double> ps_interval;
    prior_sample->add_option("--model", ps_model, "exponential | emax | power")->required();
    prior_sample->add_option("--n", ps_n, "number of draws")->required();
    prior_sample->add_option("--seed", ps_seed, "RNG seed");
    prior_sample->add_option("--interval", ps_interval, "normalization interval a,b")
        ->delimiter(',')
        ->expected(2);
    prior_sample->add_option("--model-json", ps_model_json, "JSON model override");
    prior_sample->add_option("--out", ps_out, "output CSV path");
    prior_sample->callback([&]() {
        Stopwatch watch;
        RunManifest manifest;
        manifest.command_line = command_line;
        manifest.seed = ps_seed;
        const ModelFunction model = detail::model_from_flags(ps_model, ps_model_json, manifest);
        const Interval iv = ps_interval.empty() ? detail::default_eval_interval(model.model_id)
                                                : detail::interval_from(ps_interval, "--interval");
        // tabulate the log density by hand so the stored metadata can carry a
        // checksum of the exact grid the prior was built from
        const std::size_t n_tab = 4097;
        ModelFunction m = model;
        m.param_box = make_box(iv);
        std::vector<double> xs(n_tab), ys(n_tab);
        for (std::size_t i = 0; i < n_tab; ++i) {
            xs[i] = iv.lo + iv.width() * static_cast<double>(i) / static_cast<double>(n_tab - 1);
            ys[i] = functional_uniform_logdensity(m, {xs[i]}, make_lebesgue());
            if (!std::isfinite(ys[i]))
                throw numerical_error("prior sample: log density not finite at theta = " +
                                      std::to_string(xs[i]));
        }
        std::uint64_t hash = 0xcbf29ce484222325ULL;
        for (double v : ys)
            for (std::size_t b = 0; b < sizeof(double); ++b) {
                hash ^= reinterpret_cast<const unsigned char*>(&v)[b];
                hash *= 0x100000001b3ULL;
            }
        char hex[32];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
        MonotoneCubic spline(std::move(xs), std::move(ys));
        const PriorDensity prior =
            normalize([&spline](const std::vector<double>& t) { return spline(t[0]); },
                      make_box(iv));
        const auto draws = sample(prior, ps_n, ps_seed);
        {
            CsvWriter csv(ps_out, {"theta"});
            for (const auto& d : draws) csv.row({d[0]});
        }
        nlohmann::json meta;
        meta["model"] = model.model_id;
        meta["box"] = {iv.lo, iv.hi};
        meta["log_norm_const"] = prior.log_norm_const;
        meta["norm_error"] = prior.norm_error;
        meta["grid_checksum"] = std::string(hex);
        const std::string meta_path = ps_out + ".meta.json";
        {
            std::ofstream mo(meta_path);
            if (!mo) throw input_error("cannot open metadata path '" + meta_path + "'");
            mo << meta.dump(2) << "\n";
        }
        detail::add_output(manifest, ps_out);
        detail::add_output(manifest, meta_path);
        detail::finish_manifest(manifest, watch, detail::manifest_path_for(ps_out));
    });

    // -------------------------------------------------------------------- fit
    auto* fit_cmd = app.add_subcommand("fit", "posterior sampling for a dataset");
    std::string fit_data, fit_model = "emax", fit_lik = "normal",
                fit_prior = "functional-uniform", fit_sampler = "mh", fit_out = "posterior.csv";
    std::vector<double> fit_bounds;
    std::size_t fit_draws = 10000, fit_burnin = 1000, fit_thin = 2;
    std::uint64_t fit_seed = 1729;
    fit_cmd->add_option("--data", fit_data, "CSV with header x,y or x,n,s")->required();
    fit_cmd->add_option("--model", fit_model, "emax | power | exponential | linear");
    fit_cmd->add_option("--likelihood", fit_lik, "normal | binomial");
    fit_cmd->add_option("--prior", fit_prior, "uniform | functional-uniform | jeffreys");
    fit_cmd->add_option("--bounds", fit_bounds, "nonlinear parameter bounds a,b")
        ->delimiter(',')
        ->expected(2);
    fit_cmd->add_option("--draws", fit_draws, "posterior draws to keep");
    fit_cmd->add_option("--burnin", fit_burnin, "burn-in iterations");
    fit_cmd->add_option("--thin", fit_thin, "thinning interval");
    fit_cmd->add_option("--seed", fit_seed, "RNG seed");
    fit_cmd->add_option("--sampler", fit_sampler, "mh | isr");
    fit_cmd->add_option("--out", fit_out, "draws CSV path");
    fit_cmd->callback([&]() {
        Stopwatch watch;
        RunManifest manifest;
        manifest.command_line = command_line;
        manifest.seed = fit_seed;
        LikKind detected;
        const Dataset data = read_dataset_csv(fit_data, &detected);
        manifest.inputs.emplace_back(fit_data, file_checksum(fit_data));
        LikelihoodSpec lik;
        if (fit_lik == "normal")
            lik.kind = LikKind::normal;
        else if (fit_lik == "binomial")
            lik.kind = LikKind::binomial;
        else
            throw input_error("--likelihood must be normal or binomial");
        if (lik.kind != detected)
            throw input_error("data file header does not match --likelihood " + fit_lik);
        const ModelFunction model = make_model(fit_model);
        const Interval bounds = fit_bounds.empty()
                                    ? detail::default_eval_interval(model.model_id)
                                    : detail::interval_from(fit_bounds, "--bounds");
        const PriorSpec prior = make_prior_spec(model, parse_prior_kind(fit_prior), bounds);
        PosteriorSample post;
        if (fit_sampler == "mh")
            post = sample_posterior_mh(model, prior, lik, data, fit_draws, fit_burnin, fit_thin,
                                       fit_seed);
        else if (fit_sampler == "isr")
            post = sample_posterior_isr(model, prior, lik, data, fit_draws, fit_draws, fit_seed);
        else
            throw input_error("--sampler must be mh or isr");
        std::vector<std::string> header;
        for (std::size_t i = 0; i < post.n_params; ++i) header.push_back("theta" + std::to_string(i));
        if (post.has_sigma) header.push_back("sigma");
        {
            CsvWriter csv(fit_out, header);
            for (const auto& d : post.draws) csv.row(d);
        }
        nlohmann::json diag;
        diag["acceptance_rate"] = post.acceptance_rate;
        diag["ess"] = post.ess;
        diag["n_burnin"] = post.n_burnin;
        diag["thin"] = post.thin;
        diag["used_fallback"] = post.used_fallback;
        diag["warning"] = post.warning;
        const std::string diag_path = fit_out + ".diag.json";
        {
            std::ofstream dout(diag_path);
            if (!dout) throw input_error("cannot open diagnostics path '" + diag_path + "'");
            dout << diag.dump(2) << "\n";
        }
        detail::add_output(manifest, fit_out);
        detail::add_output(manifest, diag_path);
        detail::finish_manifest(manifest, watch, detail::manifest_path_for(fit_out));
    });

    // --------------------------------------------------------------- simulate
    auto* sim_cmd = app.add_subcommand("simulate", "dose-finding scenario simulation");
    std::string sim_scenario = "all", sim_prior = "all", sim_out = "table1.csv";
    std::size_t sim_reps = 100, sim_draws = 10000, sim_burnin = 1000, sim_thin = 2,
                sim_threads = 0;
    std::uint64_t sim_seed = 1729;
    sim_cmd->add_option("--scenario", sim_scenario, "power1 | linear | power2 | emax | all");
    sim_cmd->add_option("--prior", sim_prior, "uniform | functional-uniform | jeffreys | all");
    sim_cmd->add_option("--reps", sim_reps, "replicates per cell");
    sim_cmd->add_option("--seed", sim_seed, "RNG seed");
    sim_cmd->add_option("--draws", sim_draws, "posterior draws per replicate");
    sim_cmd->add_option("--burnin", sim_burnin, "burn-in iterations");
    sim_cmd->add_option("--thin", sim_thin, "thinning interval");
    sim_cmd->add_option("--threads", sim_threads, "worker threads (0 = all)");
    sim_cmd->add_option("--out", sim_out, "output table CSV");
    sim_cmd->callback([&]() {
        Stopwatch watch;
        RunManifest manifest;
        manifest.command_line = command_line;
        manifest.seed = sim_seed;
        detail::SimulateSettings s;
        s.scenarios = sim_scenario == "all"
                          ? std::vector<std::string>{"linear", "power1", "power2", "emax"}
                          : std::vector<std::string>{sim_scenario};
        s.priors = sim_prior == "all"
                       ? std::vector<PriorKind>{PriorKind::uniform, PriorKind::jeffreys,
                                                PriorKind::functional_uniform}
                       : std::vector<PriorKind>{parse_prior_kind(sim_prior)};
        s.reps = sim_reps;
        s.seed = sim_seed;
        s.opts.n_draws = sim_draws;
        s.opts.n_burnin = sim_burnin;
        s.opts.thin = sim_thin;
        s.opts.n_threads = sim_threads;
        detail::run_simulate(s, sim_out);
        detail::add_output(manifest, sim_out);
        detail::finish_manifest(manifest, watch, detail::manifest_path_for(sim_out));
    });

    // ----------------------------------------------------------------- design
    auto* design_cmd = app.add_subcommand("design", "Bayesian optimal design");
    design_cmd->require_subcommand(1);

    auto* design_opt = design_cmd->add_subcommand("optimize", "search for the optimal design");
    std::string do_model = "exponential", do_prior = "functional-uniform",
                do_out = "design.json";
    std::vector<double> do_theta_range{0.0, 5.0}, do_x_range{0.0, 10.0};
    std::size_t do_max_points = 5, do_starts = 50, do_threads = 0;
    std::uint64_t do_seed = 1729;
    design_opt->add_option("--model", do_model, "registry model (exponential)");
    design_opt->add_option("--prior", do_prior, "uniform | functional-uniform");
    design_opt->add_option("--theta-range", do_theta_range, "prior support a,b")
        ->delimiter(',')
        ->expected(2);
    design_opt->add_option("--x-range", do_x_range, "design region a,b")
        ->delimiter(',')
        ->expected(2);
    design_opt->add_option("--max-points", do_max_points, "support point budget");
    design_opt->add_option("--starts", do_starts, "optimizer multistarts");
    design_opt->add_option("--seed", do_seed, "RNG seed");
    design_opt->add_option("--threads", do_threads, "worker threads (0 = all)");
    design_opt->add_option("--out", do_out, "design JSON path");
    design_opt->callback([&]() {
        Stopwatch watch;
        RunManifest manifest;
        manifest.command_line = command_line;
        manifest.seed = do_seed;
        const ModelFunction model = make_model(do_model);
        const Interval theta_range = detail::interval_from(do_theta_range, "--theta-range");
        const Interval x_range = detail::interval_from(do_x_range, "--x-range");
        const PriorDensity prior = detail::design_prior(do_prior, model, theta_range);
        const OptimizedDesign best =
            optimize_design(model, prior, x_range, do_max_points, do_seed, do_starts, do_threads);
        detail::write_design_json(do_out, best.design, best.criterion, do_prior, do_model,
                                  theta_range, x_range, do_seed);
        detail::add_output(manifest, do_out);
        detail::finish_manifest(manifest, watch, detail::manifest_path_for(do_out));
    });

    auto* design_eff = design_cmd->add_subcommand("efficiency", "efficiency curve of a design");
    std::string de_design, de_out = "eff.csv";
    std::vector<double> de_grid{0.02, 5.0, 200.0};
    design_eff->add_option("--design", de_design, "design JSON from `design optimize`")
        ->required();
    design_eff->add_option("--theta-grid", de_grid, "lo,hi,count")->delimiter(',')->expected(3);
    design_eff->add_option("--out", de_out, "efficiency CSV path");
    design_eff->callback([&]() {
        Stopwatch watch;
        RunManifest manifest;
        manifest.command_line = command_line;
        std::ifstream in(de_design);
        if (!in) throw input_error("cannot open design file '" + de_design + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw input_error("design file '" + de_design + "' is not valid JSON: " + e.what());
        }
        manifest.inputs.emplace_back(de_design, file_checksum(de_design));
        const ModelFunction model = make_model(j.value("model", "exponential"));
        const Interval theta_range =
            make_interval(j.at("theta_range").at(0).get<double>(),
                          j.at("theta_range").at(1).get<double>());
        const Interval x_range = make_interval(j.at("x_range").at(0).get<double>(),
                                               j.at("x_range").at(1).get<double>());
        Design d;
        d.points = j.at("points").get<std::vector<double>>();
        d.weights = j.at("weights").get<std::vector<double>>();
        validate_design(d, x_range);
        const PriorDensity prior =
            detail::design_prior(j.value("prior", "functional-uniform"), model, theta_range);
        const CdfQuantile cq(prior);
        const double lo = de_grid[0], hi = de_grid[1];
        const std::size_t n = static_cast<std::size_t>(de_grid[2]);
        if (!(lo < hi) || n < 2) throw input_error("--theta-grid must be lo,hi,count with lo < hi");
        CsvWriter csv(de_out, {"theta", "prior_cdf", "efficiency"});
        for (std::size_t i = 0; i < n; ++i) {
            const double t =
                lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
            csv.row({t, cq.cdf(t), efficiency(d, t, model, x_range)});
        }
        detail::add_output(manifest, de_out);
        detail::finish_manifest(manifest, watch, detail::manifest_path_for(de_out));
    });

    // ------------------------------------------------------------------ repro
    auto* repro_cmd = app.add_subcommand("repro", "regenerate a named study artifact");
    std::string rp_target, rp_scale = "desk", rp_dir = ".";
    std::uint64_t rp_seed = 1729;
    std::size_t rp_threads = 0;
    repro_cmd->add_option("--target", rp_target, "fig2 | fig3 | table1 | designs | fig5")
        ->required();
    repro_cmd->add_option("--scale", rp_scale, "desk | full");
    repro_cmd->add_option("--seed", rp_seed, "RNG seed");
    repro_cmd->add_option("--threads", rp_threads, "worker threads (0 = all)");
    repro_cmd->add_option("--out-dir", rp_dir, "output directory");
    repro_cmd->callback([&]() {
        Stopwatch watch;
        RunManifest manifest;
        manifest.command_line = command_line;
        manifest.seed = rp_seed;
        if (rp_scale != "desk" && rp_scale != "full")
            throw input_error("--scale must be desk or full");
        const bool full = rp_scale == "full";
        const std::string dir = rp_dir.empty() ? "." : rp_dir;
        std::error_code dir_ec;
        std::filesystem::create_directories(dir, dir_ec);
        if (dir_ec) throw input_error("cannot create output directory '" + dir + "'");
        auto path_in_dir = [&](const std::string& name) { return dir + "/" + name; };
        if (rp_target == "fig2") {
            const double eps = full ? 0.005 : 0.01;
            detail::run_lattice("hellinger-tri", eps, make_interval(0.0, 1.0), "",
                                path_in_dir("fig2_hellinger_density.csv"));
            detail::run_lattice("kolmogorov-tri", eps, make_interval(0.0, 1.0), "",
                                path_in_dir("fig2_kolmogorov_density.csv"));
            detail::add_output(manifest, path_in_dir("fig2_hellinger_density.csv"));
            detail::add_output(manifest, path_in_dir("fig2_kolmogorov_density.csv"));
        } else if (rp_target == "fig3") {
            for (const std::string& id : {"exponential", "emax", "power"}) {
                const std::string out = path_in_dir("fig3_" + id + "_prior.csv");
                detail::run_prior_eval(make_model(id), make_lebesgue(),
                                       detail::default_eval_interval(id), 512, out);
                detail::add_output(manifest, out);
            }
        } else if (rp_target == "table1") {
            detail::SimulateSettings s;
            s.scenarios = {"linear", "power1", "power2", "emax"};
            s.priors = {PriorKind::uniform, PriorKind::jeffreys, PriorKind::functional_uniform};
            s.reps = full ? 1000 : 100;
            s.seed = rp_seed;
            s.opts.n_threads = rp_threads;
            detail::run_simulate(s, path_in_dir("table1.csv"));
            detail::add_output(manifest, path_in_dir("table1.csv"));
        } else if (rp_target == "designs" || rp_target == "fig5") {
            const ModelFunction model = make_model("exponential");
            const Interval theta_range = make_interval(0.0, 5.0);
            const Interval x_range = make_interval(0.0, 10.0);
            const PriorDensity flat = detail::design_prior("uniform", model, theta_range);
            const PriorDensity fu = detail::design_prior("functional-uniform", model, theta_range);
            const OptimizedDesign d_flat =
                optimize_design(model, flat, x_range, 5, rp_seed, 50, rp_threads);
            const OptimizedDesign d_fu =
                optimize_design(model, fu, x_range, 5, rp_seed, 50, rp_threads);
            if (rp_target == "designs") {
                detail::write_design_json(path_in_dir("design_uniform.json"), d_flat.design,
                                          d_flat.criterion, "uniform", "exponential", theta_range,
                                          x_range, rp_seed);
                detail::write_design_json(path_in_dir("design_functional_uniform.json"),
                                          d_fu.design, d_fu.criterion, "functional-uniform",
                                          "exponential", theta_range, x_range, rp_seed);
                detail::add_output(manifest, path_in_dir("design_uniform.json"));
                detail::add_output(manifest, path_in_dir("design_functional_uniform.json"));
            } else {
                const CdfQuantile cq(fu);
                CsvWriter csv(path_in_dir("fig5_efficiency.csv"),
                              {"theta", "fu_prior_cdf", "eff_uniform_design", "eff_fu_design"});
                const std::size_t n = 200;
                for (std::size_t i = 0; i < n; ++i) {
                    const double t = 0.02 + (5.0 - 0.02) * static_cast<double>(i) /
                                                static_cast<double>(n - 1);
                    csv.row({t, cq.cdf(t), efficiency(d_flat.design, t, model, x_range),
                             efficiency(d_fu.design, t, model, x_range)});
                }
                detail::add_output(manifest, path_in_dir("fig5_efficiency.csv"));
            }
        } else {
            throw input_error("unknown repro target '" + rp_target + "'");
        }
        detail::finish_manifest(manifest, watch, path_in_dir("repro_" + rp_target + ".manifest.json"));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace cli
} // namespace funiform
