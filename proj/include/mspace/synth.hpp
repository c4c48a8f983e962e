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
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mspace/graph.hpp"
#include "mspace/state.hpp"

namespace mspace {

struct ErdosRenyi {
    std::size_t n = 20;
    double p = 0.2;
};

/// Inputs of the synthetic generator. Variances are given as variances, not deviations.
struct SynthParams {
    std::variant<ErdosRenyi, Adjacency> graph = ErdosRenyi{};
    std::size_t dim = 1;
    std::size_t steps = 1000;  // T; the output holds T + 1 snapshots
    double mean_min = -200.0;
    double mean_max = 200.0;
    double cov_min = 40.0;
    double cov_max = 50.0;
    double initial_mean = 2e4;
    double initial_variance = 5000.0 * 5000.0;
    std::size_t period = 0;  // 0 disables the seasonal component
    double seasonal_mean = 0.0;
    double seasonal_variance = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

nlohmann::json to_json(const SynthParams& params);

/// G(n, p): each unordered pair joins independently with probability p; zero diagonal.
Adjacency gen_er_graph(std::size_t n, double p, std::mt19937_64& rng);

/// Per-state shock law drawn on the first visit of a global sign state.
struct SynthStateLaw {
    SignState state;
    Eigen::VectorXd mean;
    Eigen::MatrixXd masked_covariance;  // before PSD repair
    Eigen::MatrixXd covariance;         // after PSD repair
    Eigen::MatrixXd transform;          // covariance = transform * transform^T
};

struct SynthOutput {
    TemporalGraphDataset dataset;
    std::vector<Eigen::MatrixXd> pre_seasonal;  // features before the periodic signal
    std::vector<SynthStateLaw> laws;
    std::vector<std::size_t> law_of_step;  // law used to draw eps_t, index t-1
};

// symmetrize(U(cov_min, cov_max)) masked by (A + I) kron 1_{d x d}.
Eigen::MatrixXd masked_covariance(const Adjacency& adjacency, std::size_t dim, double cov_min, double cov_max,
                                  std::mt19937_64& rng);

// Clips eigenvalues below 1e-9 up to 1e-9.
Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& matrix, Eigen::MatrixXd* transform = nullptr);

SynthOutput gen_synthetic_traced(const SynthParams& params);
TemporalGraphDataset gen_synthetic(const SynthParams& params);

enum class SynthPreset : std::uint8_t { syn01, syn02, syn03, syn04 };

SynthPreset parse_preset(std::string_view name);
std::string preset_name(SynthPreset preset);
SynthParams preset_params(SynthPreset preset, std::uint64_t seed);

// Seed of instance `index` within a preset expansion.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t index);

std::vector<TemporalGraphDataset> gen_preset(SynthPreset preset, std::size_t instances, std::uint64_t seed);

}  // namespace mspace
