// Copyright 2026 the mspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mspace/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mspace/error.hpp"
#include "mspace/experiments.hpp"
#include "mspace/io.hpp"
#include "mspace/kalman.hpp"
#include "mspace/metrics.hpp"
#include "mspace/synth.hpp"

namespace fs = std::filesystem;

namespace mspace {

namespace {

const char* const variant_names[] = {"s-mu", "s-n", "t-mu", "t-n", "st-mu", "st-n"};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) {
        throw ComputeError("cannot write " + path.string());
    }
}

// Training ratio when the flag is absent: 0.9 for single-step runs, 0.8 otherwise.
double default_ratio(const CLI::Option* flag, double value, std::size_t steps) {
    if (flag->count() > 0) {
        return value;
    }
    return steps == 1 ? 0.9 : 0.8;
}

void emit_rows(const ResultTable& table, const fs::path& path, bool append) {
    if (append) {
        append_results(table, path);
    } else {
        write_results(table, path);
    }
}

void add_rows(ResultTable& table, const std::string& dataset, const std::string& method,
              const std::string& variant, const ErrorReport& report, double wall_time, std::uint64_t seed,
              const std::string& hash) {
    for (std::size_t q = 1; q <= report.rmse_per_q.size(); ++q) {
        table.rows.push_back(
            ResultRow{dataset, method, variant, q, report.rmse_per_q[q - 1], report.mae_per_q[q - 1], wall_time, seed,
                      hash});
    }
}

std::string bound_csv(const BoundReport& b) {
    std::string out = "q,rmse,mse,upper_bound,lower_bound,upper_ok,lower_ok,alpha,beta,beta_prime\n";
    for (std::size_t i = 0; i < b.upper.size(); ++i) {
        out += std::to_string(i + 1) + "," + format_exact(b.empirical_rmse[i]) + "," +
               format_exact(b.empirical_mse[i]) + "," + format_exact(b.upper[i]) + "," + format_exact(b.lower[i]) +
               "," + (b.upper_ok[i] ? "1" : "0") + "," + (b.lower_ok[i] ? "1" : "0") + "," + format_exact(b.alpha) +
               "," + format_exact(b.beta) + "," + format_exact(b.beta_prime) + "\n";
    }
    return out;
}

std::vector<std::size_t> parse_list(std::string_view text, std::string_view flag) {
    std::vector<std::size_t> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size() || v == 0) {
            throw ConfigError(std::string(flag) + ": invalid value '" + std::string(item) + "'");
        }
        values.push_back(v);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return values;
}

struct ForecastOptions {
    std::string dataset;
    std::string variant = "s-mu";
    double train_ratio = 0.9;
    std::size_t steps = 1;
    std::size_t queue_size = 20;
    std::int64_t period = 2016;
    double gamma = 1.0;
    int hops = 1;
    std::uint64_t seed = 0;
    std::size_t repeats = 1;
    std::string out;
    std::string check_bounds;
    double lower_slack = 1.0;
    std::string state_stats;
    bool append = false;
    bool verbose = false;
    CLI::Option* ratio_flag = nullptr;
};

int cmd_forecast(const ForecastOptions& o, std::ostream& out, std::ostream& err) {
    const auto manifest = read_manifest(o.dataset);
    const auto dataset = load_dataset(o.dataset);
    const auto truth = compute_shocks(dataset);

    RunConfig config;
    config.variant = Variant::parse(o.variant);
    config.train_ratio = default_ratio(o.ratio_flag, o.train_ratio, o.steps);
    config.horizon = o.steps;
    config.queue_capacity = o.queue_size;
    config.period = o.period;
    config.gamma = o.gamma;
    config.hops = o.hops;
    config.validate(truth.size());
    if (o.repeats == 0) {
        throw ConfigError("--repeats must be at least 1");
    }

    ResultTable table;
    std::vector<RunHistory> runs;
    for (std::size_t r = 0; r < o.repeats; ++r) {
        config.seed = o.seed + r;
        const auto start = std::chrono::steady_clock::now();
        auto result = online_run(dataset, config);
        const double wall = seconds_since(start);
        const auto report = error_report(result.records, truth);
        add_rows(table, manifest.name, "mspace", config.variant.name(), report, wall, config.seed,
                 config_hash(manifest.name + "|mspace|" + config.canonical()));
        if (o.verbose) {
            err << "repeat " << r << ": " << result.records.size() << " origins, "
                << result.model.total_states() << " states, " << wall << " s\n";
        }
        if (r == 0 && !o.state_stats.empty()) {
            write_state_stats(result.model, o.state_stats);
        }
        runs.push_back(std::move(result.records));
    }
    emit_rows(table, o.out, o.append);

    if (!o.check_bounds.empty()) {
        const auto bounds = bound_report(runs, truth, o.steps, config.variant.sampler, o.lower_slack);
        write_file(o.check_bounds, bound_csv(bounds));
        if (!bounds.upper_satisfied()) {
            err << "warning: empirical RMSE exceeds the upper envelope\n";
        }
        if (!bounds.lower_satisfied()) {
            err << "warning: empirical MSE falls below the lower envelope\n";
        }
    }
    out << "wrote " << table.rows.size() << " rows to " << o.out << "\n";
    return exit_ok;
}

struct SynthOptions {
    std::string preset;
    std::size_t instances = 1;
    std::uint64_t seed = 0;
    std::string out;
    SynthParams params;
    std::size_t nodes = 20;
    double edge_prob = 0.2;
    std::vector<std::pair<CLI::Option*, std::function<void(SynthParams&)>>> overrides;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
    if (o.instances == 0) {
        throw ConfigError("--instances must be at least 1");
    }
    const std::string name = o.preset.empty() ? "custom" : o.preset;
    for (std::size_t i = 0; i < o.instances; ++i) {
        const auto seed = instance_seed(o.seed, i);
        SynthParams params = o.preset.empty() ? o.params : preset_params(parse_preset(o.preset), seed);
        params.seed = seed;
        for (const auto& [flag, apply] : o.overrides) {
            if (flag->count() > 0) {
                apply(params);
            }
        }
        params.validate();
        const auto dataset = gen_synthetic(params);
        const std::string dir_name = name + "_" + std::to_string(i);
        nlohmann::json provenance = {{"generator", to_json(params)},
                                     {"preset", name},
                                     {"instance", i},
                                     {"base_seed", o.seed}};
        const auto path = save_dataset(dataset, fs::path(o.out) / dir_name, dir_name, provenance);
        out << path.string() << "\n";
    }
    return exit_ok;
}

struct BaselineOptions {
    std::string target;
    std::string dataset;
    double train_ratio = 0.9;
    std::size_t steps = 1;
    std::uint64_t seed = 0;
    std::size_t em_iterations = 20;
    std::string out;
    bool append = false;
    bool verbose = false;
    CLI::Option* ratio_flag = nullptr;
};

int cmd_baseline(const BaselineOptions& o, std::ostream& out, std::ostream& err) {
    const auto manifest = read_manifest(o.dataset);
    const auto dataset = load_dataset(o.dataset);
    const auto truth = compute_shocks(dataset);
    const auto target = parse_kalman_target(o.target);

    RunConfig config;
    config.train_ratio = default_ratio(o.ratio_flag, o.train_ratio, o.steps);
    config.horizon = o.steps;
    config.seed = o.seed;
    config.validate(truth.size());

    const auto start = std::chrono::steady_clock::now();
    const auto run = kalman_run(dataset, target, config, o.em_iterations);
    const double wall = seconds_since(start);
    if (o.verbose) {
        std::size_t floored = 0;
        for (const auto& p : run.params) floored += p.noise_floored ? 1 : 0;
        err << run.records.size() << " origins, " << floored << " nodes with floored noise, " << wall << " s\n";
    }
    ResultTable table;
    const std::string name = kalman_name(target);
    add_rows(table, manifest.name, "kalman", name, error_report(run.records, truth), wall, o.seed,
             config_hash(manifest.name + "|" + name + "|em=" + std::to_string(o.em_iterations) + "|" +
                         config.canonical()));
    emit_rows(table, o.out, o.append);
    out << "wrote " << table.rows.size() << " rows to " << o.out << "\n";
    return exit_ok;
}

struct BenchOptions {
    std::string experiment;
    bool scaling = false;
    std::vector<std::string> grid = {"n=20,40,80", "T=2000,4000"};
    std::size_t instances = 5;
    std::uint64_t seed = 0;
    std::size_t steps = 12;
    double train_ratio = 0.8;
    std::size_t queue_size = 20;
    std::size_t em_iterations = 20;
    std::size_t repeats = 5;
    std::string variant = "s-mu";
    std::string out;
    bool verbose = false;
};

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
    if (o.scaling == !o.experiment.empty()) {
        throw ConfigError("bench needs exactly one of --scaling or --experiment");
    }
    if (!o.experiment.empty()) {
        ExperimentSettings s;
        s.instances = o.instances;
        s.seed = o.seed;
        s.horizon = o.steps;
        s.train_ratio = o.train_ratio;
        s.queue_capacity = o.queue_size;
        s.em_iterations = o.em_iterations;
        const auto start = std::chrono::steady_clock::now();
        const auto table = run_experiment(parse_experiment(o.experiment), s);
        if (o.verbose) {
            err << o.experiment << ": " << seconds_since(start) << " s\n";
        }
        const auto text = format_experiment(table);
        write_file(o.out, text);
        out << text;
        return exit_ok;
    }

    std::vector<std::size_t> nodes;
    std::vector<std::size_t> steps;
    for (const auto& item : o.grid) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--grid: expected key=list, got '" + item + "'");
        }
        const auto key = item.substr(0, eq);
        if (key == "n") {
            nodes = parse_list(std::string_view(item).substr(eq + 1), "--grid n");
        } else if (key == "T") {
            steps = parse_list(std::string_view(item).substr(eq + 1), "--grid T");
        } else {
            throw ConfigError("--grid: unknown axis '" + key + "' (expected n or T)");
        }
    }
    if (nodes.empty() || steps.empty()) {
        throw ConfigError("--grid needs both n=... and T=...");
    }
    RunConfig config;
    config.variant = Variant::parse(o.variant);
    config.train_ratio = o.train_ratio;
    config.horizon = o.steps;
    config.queue_capacity = o.queue_size;
    config.seed = o.seed;
    const auto probe = complexity_probe(nodes, steps, config, o.seed, o.repeats);

    std::string cells = "nodes,steps,seconds,stored_values,states\n";
    for (const auto& c : probe.cells) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%zu,%zu\n", c.nodes, c.steps, c.seconds, c.stored_values,
                      c.states);
        cells += buf;
    }
    write_file(o.out, cells);
    out << "axis,fixed,from,to,time_ratio,size_ratio\n";
    for (const auto& r : probe.ratios) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%c,%zu,%zu,%zu,%.4f,%.4f\n", r.axis, r.fixed, r.from, r.to, r.time_ratio,
                      r.size_ratio);
        out << buf;
    }
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online forecasting of node features on temporal graphs.", "mspace"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    ForecastOptions fo;
    auto* fc = app.add_subcommand("forecast", "Run the online forecaster and write per-horizon errors");
    fc->add_option("--dataset", fo.dataset, "Dataset manifest (JSON)")->required();
    fc->add_option("--variant", fo.variant, "State and sampling function")
        ->check(CLI::IsMember(std::vector<std::string>(std::begin(variant_names), std::end(variant_names))));
    fo.ratio_flag = fc->add_option("--train-ratio", fo.train_ratio, "Fraction of shocks used offline")
                        ->default_str("0.9 if --steps is 1, else 0.8");
    fc->add_option("--steps", fo.steps, "Forecast horizon q")->check(CLI::PositiveNumber);
    fc->add_option("--queue-size", fo.queue_size, "Queue capacity M per state")->check(CLI::PositiveNumber);
    fc->add_option("--period", fo.period, "Phase period for the t and st variants")->check(CLI::PositiveNumber);
    fc->add_option("--gamma", fo.gamma, "Phase weight in the state distance");
    fc->add_option("--hops", fo.hops, "Neighbourhood radius")->check(CLI::PositiveNumber);
    fc->add_option("--seed", fo.seed, "Seed; repeat r uses seed + r");
    fc->add_option("--repeats", fo.repeats, "Monte-Carlo repeats")->check(CLI::PositiveNumber);
    fc->add_option("--out", fo.out, "Results CSV")->required();
    fc->add_flag("--append", fo.append, "Append to --out instead of replacing it");
    fc->add_option("--check-bounds", fo.check_bounds, "Write the error envelope report to this CSV");
    fc->add_option("--lower-slack", fo.lower_slack, "Factor applied to the lower envelope before comparison");
    fc->add_option("--state-stats", fo.state_stats, "Write per-state sample counts and traces to this CSV");
    fc->add_flag("--verbose", fo.verbose, "Progress on stderr");

    SynthOptions so;
    auto* sc = app.add_subcommand("synth", "Generate synthetic datasets");
    sc->add_option("--preset", so.preset, "syn01, syn02, syn03 or syn04; explicit flags override it")
        ->check(CLI::IsMember({"syn01", "syn02", "syn03", "syn04"}));
    sc->add_option("--instances", so.instances, "Number of datasets")->check(CLI::PositiveNumber);
    sc->add_option("--seed", so.seed, "Base seed");
    sc->add_option("--out", so.out, "Output directory")->required();
    auto over = [&](CLI::Option* flag, std::function<void(SynthParams&)> apply) {
        so.overrides.emplace_back(flag, std::move(apply));
    };
    auto& p = so.params;
    over(sc->add_option("--nodes", so.nodes, "Erdos-Renyi node count"),
         [&](SynthParams& s) { std::get<ErdosRenyi>(s.graph).n = so.nodes; });
    over(sc->add_option("--edge-prob", so.edge_prob, "Erdos-Renyi edge probability"),
         [&](SynthParams& s) { std::get<ErdosRenyi>(s.graph).p = so.edge_prob; });
    over(sc->add_option("--dim", p.dim, "Feature dimension"), [&](SynthParams& s) { s.dim = p.dim; });
    over(sc->add_option("--length", p.steps, "Number of steps T"), [&](SynthParams& s) { s.steps = p.steps; });
    over(sc->add_option("--mean-min", p.mean_min, "Lower end of state means"),
         [&](SynthParams& s) { s.mean_min = p.mean_min; });
    over(sc->add_option("--mean-max", p.mean_max, "Upper end of state means"),
         [&](SynthParams& s) { s.mean_max = p.mean_max; });
    over(sc->add_option("--cov-min", p.cov_min, "Lower end of covariance entries"),
         [&](SynthParams& s) { s.cov_min = p.cov_min; });
    over(sc->add_option("--cov-max", p.cov_max, "Upper end of covariance entries"),
         [&](SynthParams& s) { s.cov_max = p.cov_max; });
    over(sc->add_option("--initial-mean", p.initial_mean, "Mean of the first snapshot"),
         [&](SynthParams& s) { s.initial_mean = p.initial_mean; });
    over(sc->add_option("--initial-variance", p.initial_variance, "Variance of the first snapshot"),
         [&](SynthParams& s) { s.initial_variance = p.initial_variance; });
    over(sc->add_option("--seasonal-period", p.period, "Period of the seasonal signal (0 disables it)"),
         [&](SynthParams& s) { s.period = p.period; });
    over(sc->add_option("--seasonal-mean", p.seasonal_mean, "Mean of the seasonal shocks"),
         [&](SynthParams& s) { s.seasonal_mean = p.seasonal_mean; });
    over(sc->add_option("--seasonal-variance", p.seasonal_variance, "Variance of the seasonal shocks"),
         [&](SynthParams& s) { s.seasonal_variance = p.seasonal_variance; });

    BaselineOptions bo;
    auto* bc = app.add_subcommand("baseline", "Run a Kalman filter baseline");
    bc->add_option("target", bo.target, "kalman-x or kalman-eps")
        ->required()
        ->check(CLI::IsMember({"kalman-x", "kalman-eps"}));
    bc->add_option("--dataset", bo.dataset, "Dataset manifest (JSON)")->required();
    bo.ratio_flag = bc->add_option("--train-ratio", bo.train_ratio, "Fraction of shocks used for fitting")
                        ->default_str("0.9 if --steps is 1, else 0.8");
    bc->add_option("--steps", bo.steps, "Forecast horizon q")->check(CLI::PositiveNumber);
    bc->add_option("--seed", bo.seed, "Seed recorded with the results");
    bc->add_option("--em-iterations", bo.em_iterations, "EM iterations per node");
    bc->add_option("--out", bo.out, "Results CSV")->required();
    bc->add_flag("--append", bo.append, "Append to --out instead of replacing it");
    bc->add_flag("--verbose", bo.verbose, "Progress on stderr");

    BenchOptions ho;
    auto* hc = app.add_subcommand("bench", "Synthetic comparisons and the scaling probe");
    auto* exp_flag = hc->add_option("--experiment", ho.experiment, "periodicity or samples")
                         ->check(CLI::IsMember({"periodicity", "samples"}));
    auto* sca_flag = hc->add_flag("--scaling", ho.scaling, "Time online runs over --grid");
    exp_flag->excludes(sca_flag);
    hc->add_option("--grid", ho.grid, "Scaling grid, e.g. n=20,40,80 T=2000,4000")
        ->expected(1, 2)
        ->default_str("n=20,40,80 T=2000,4000");
    hc->add_option("--instances", ho.instances, "Datasets per preset")->check(CLI::PositiveNumber);
    hc->add_option("--seed", ho.seed, "Base seed");
    hc->add_option("--steps", ho.steps, "Forecast horizon q")->check(CLI::PositiveNumber);
    hc->add_option("--train-ratio", ho.train_ratio, "Fraction of shocks used offline");
    hc->add_option("--queue-size", ho.queue_size, "Queue capacity M per state")->check(CLI::PositiveNumber);
    hc->add_option("--em-iterations", ho.em_iterations, "EM iterations for the Kalman rows");
    hc->add_option("--repeats", ho.repeats, "Timing repeats per scaling cell; the fastest is kept")
        ->check(CLI::PositiveNumber);
    hc->add_option("--variant", ho.variant, "Variant timed by --scaling")
        ->check(CLI::IsMember(std::vector<std::string>(std::begin(variant_names), std::end(variant_names))));
    hc->add_option("--out", ho.out, "Output CSV")->required();
    hc->add_flag("--verbose", ho.verbose, "Progress on stderr");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (fc->parsed()) return cmd_forecast(fo, out, err);
        if (sc->parsed()) return cmd_synth(so, out);
        if (bc->parsed()) return cmd_baseline(bo, out, err);
        if (hc->parsed()) return cmd_bench(ho, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_config;
}

}  // namespace mspace
