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

#include "mspace/experiments.hpp"

#include <cmath>
#include <cstdio>

#include "mspace/error.hpp"
#include "mspace/kalman.hpp"
#include "mspace/metrics.hpp"

namespace mspace {

bool is_kalman_method(std::string_view method) { return method == "kalman-x" || method == "kalman-eps"; }

RunHistory run_method(const TemporalGraphDataset& dataset, std::string_view method, const RunConfig& config,
                      std::size_t em_iterations) {
    if (is_kalman_method(method)) {
        return kalman_run(dataset, parse_kalman_target(method), config, em_iterations).records;
    }
    RunConfig c = config;
    c.variant = Variant::parse(method);
    return online_run(dataset, c).records;
}

Experiment parse_experiment(std::string_view name) {
    if (name == "periodicity") return Experiment::periodicity;
    if (name == "samples") return Experiment::samples;
    throw ConfigError("unknown experiment '" + std::string(name) + "' (expected periodicity or samples)");
}

std::string experiment_name(Experiment experiment) {
    return experiment == Experiment::periodicity ? "periodicity" : "samples";
}

double sample_mean(const std::vector<double>& values) {
    if (values.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
    if (values.size() < 2) {
        return 0.0;
    }
    const double mean = sample_mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

ExperimentTable run_comparison(SynthPreset a, SynthPreset b, const ExperimentSettings& settings) {
    if (settings.instances == 0) {
        throw ConfigError("experiment needs at least one instance");
    }
    ExperimentTable table;
    table.preset_a = a;
    table.preset_b = b;
    for (const auto& m : settings.methods) {
        if (!is_kalman_method(m)) {
            (void)Variant::parse(m);
        }
        table.rows.push_back(ExperimentRow{m, {}, {}, 0, 0, 0, 0, 0});
    }
    for (SynthPreset preset : {a, b}) {
        for (std::size_t i = 0; i < settings.instances; ++i) {
            const auto dataset = gen_synthetic(preset_params(preset, instance_seed(settings.seed, i)));
            const auto truth = compute_shocks(dataset);
            for (auto& row : table.rows) {
                RunConfig config;
                config.train_ratio = settings.train_ratio;
                config.horizon = settings.horizon;
                config.queue_capacity = settings.queue_capacity;
                config.seed = settings.seed + i;
                const auto records = run_method(dataset, row.method, config, settings.em_iterations);
                (preset == a ? row.a : row.b).push_back(error_report(records, truth).rmse());
            }
        }
    }
    for (auto& row : table.rows) {
        row.mean_a = sample_mean(row.a);
        row.std_a = sample_std(row.a);
        row.mean_b = sample_mean(row.b);
        row.std_b = sample_std(row.b);
        row.pct_increase = 100.0 * (row.mean_b - row.mean_a) / row.mean_a;
    }
    return table;
}

ExperimentTable run_experiment(Experiment experiment, const ExperimentSettings& settings) {
    return experiment == Experiment::periodicity ? run_comparison(SynthPreset::syn01, SynthPreset::syn02, settings)
                                                 : run_comparison(SynthPreset::syn03, SynthPreset::syn04, settings);
}

std::string format_experiment(const ExperimentTable& table) {
    const auto a = preset_name(table.preset_a);
    const auto b = preset_name(table.preset_b);
    std::string out = "method," + a + "_mean," + a + "_std," + b + "_mean," + b + "_std,pct_increase\n";
    char buf[256];
    for (const auto& row : table.rows) {
        std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%.4f,%.4f,%.4f\n", row.method.c_str(), row.mean_a, row.std_a,
                      row.mean_b, row.std_b, row.pct_increase);
        out += buf;
    }
    return out;
}

}  // namespace mspace
