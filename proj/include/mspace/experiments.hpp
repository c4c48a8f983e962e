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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mspace/engine.hpp"
#include "mspace/graph.hpp"
#include "mspace/synth.hpp"

namespace mspace {

// "s-mu" etc. run the online engine; "kalman-x" and "kalman-eps" run the baseline.
bool is_kalman_method(std::string_view method);
RunHistory run_method(const TemporalGraphDataset& dataset, std::string_view method, const RunConfig& config,
                      std::size_t em_iterations = 20);

enum class Experiment : std::uint8_t { periodicity, samples };

Experiment parse_experiment(std::string_view name);
std::string experiment_name(Experiment experiment);

struct ExperimentSettings {
    std::size_t instances = 5;
    std::uint64_t seed = 0;
    double train_ratio = 0.8;
    std::size_t horizon = 12;
    std::size_t queue_capacity = 20;
    std::size_t em_iterations = 20;
    std::vector<std::string> methods = {"s-mu", "s-n", "kalman-x", "kalman-eps"};
};

/// RMSE(horizon) of one method on the "a" and "b" preset of an experiment, one entry per instance.
struct ExperimentRow {
    std::string method;
    std::vector<double> a;
    std::vector<double> b;
    double mean_a = 0.0;
    double std_a = 0.0;
    double mean_b = 0.0;
    double std_b = 0.0;
    double pct_increase = 0.0;  // 100 (b - a) / a
};

struct ExperimentTable {
    SynthPreset preset_a = SynthPreset::syn01;
    SynthPreset preset_b = SynthPreset::syn02;
    std::vector<ExperimentRow> rows;
};

// periodicity compares syn01 with syn02, samples compares syn03 with syn04.
// Instance i of both presets shares the seed instance_seed(seed, i).
ExperimentTable run_experiment(Experiment experiment, const ExperimentSettings& settings);
ExperimentTable run_comparison(SynthPreset a, SynthPreset b, const ExperimentSettings& settings);

// Sample mean and standard deviation (n - 1 denominator; 0 for a single value).
double sample_mean(const std::vector<double>& values);
double sample_std(const std::vector<double>& values);

std::string format_experiment(const ExperimentTable& table);

}  // namespace mspace
