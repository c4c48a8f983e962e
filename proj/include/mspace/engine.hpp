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
#include <vector>

#include <Eigen/Dense>

#include "mspace/graph.hpp"
#include "mspace/state.hpp"

namespace mspace {

enum class StateFunction : std::uint8_t { sign, time, combined };
enum class Sampler : std::uint8_t { gaussian, mean };

struct Variant {
    StateFunction state = StateFunction::sign;
    Sampler sampler = Sampler::mean;

    // "s-mu", "s-n", "t-mu", "t-n", "st-mu", "st-n"
    static Variant parse(std::string_view name);
    std::string name() const;
    bool deterministic() const { return sampler == Sampler::mean; }

    bool operator==(const Variant&) const = default;
};

/// Settings of one run. Time is counted in shocks: a dataset with T+1 snapshots has T shocks.
struct RunConfig {
    Variant variant;
    double train_ratio = 0.9;
    std::size_t horizon = 1;
    std::size_t queue_capacity = 20;
    std::int64_t period = 2016;
    double gamma = 1.0;
    int hops = 1;
    std::uint64_t seed = 0;

    // floor(train_ratio * num_shocks)
    std::size_t train_length(std::size_t num_shocks) const;
    // Throws ConfigError when the online loop would be empty or a field is out of range.
    void validate(std::size_t num_shocks) const;
    // Stable textual form of every field, used for hashing.
    std::string canonical() const;
};

/// Forecast issued at origin t for horizons t+1..t+q.
/// Row k-1 of each matrix belongs to step k; node v occupies columns [v*d, (v+1)*d).
struct ForecastRecord {
    std::size_t origin = 0;
    std::size_t num_nodes = 0;
    std::size_t dim = 0;
    Eigen::MatrixXd shocks;
    Eigen::MatrixXd features;
    // Node-v block of the matched state's mean, and the trace of its covariance block.
    Eigen::MatrixXd matched_mean;
    Eigen::MatrixXd matched_trace;
    // Matched state id per (step, node); -1 where the store was empty.
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> matched_state;
    bool fallback = false;

    ForecastRecord() = default;
    ForecastRecord(std::size_t origin, std::size_t horizon, std::size_t num_nodes, std::size_t dim);

    std::size_t horizon() const { return static_cast<std::size_t>(shocks.rows()); }
    auto shock(std::size_t k, std::size_t v) const {
        return shocks.row(static_cast<Eigen::Index>(k)).segment(static_cast<Eigen::Index>(v * dim),
                                                                static_cast<Eigen::Index>(dim));
    }
    auto feature(std::size_t k, std::size_t v) const {
        return features.row(static_cast<Eigen::Index>(k)).segment(static_cast<Eigen::Index>(v * dim),
                                                                  static_cast<Eigen::Index>(dim));
    }

    // Rebuilds features as x_t + cumulative predicted shocks.
    void reconstruct(const Eigen::MatrixXd& features_at_origin);
};

using RunHistory = std::vector<ForecastRecord>;

/// Per-node state stores plus the neighbourhoods that shape them.
class MspaceModel {
 public:
    MspaceModel(RunConfig config, NeighborhoodIndex neighborhoods, std::size_t dim);

    const RunConfig& config() const { return config_; }
    const NeighborhoodIndex& neighborhoods() const { return neighborhoods_; }
    std::size_t num_nodes() const { return stores_.size(); }
    std::size_t dim() const { return dim_; }

    NodeStateStore& store(NodeId v) { return stores_[v]; }
    const NodeStateStore& store(NodeId v) const { return stores_[v]; }

    // State of node v conditioned on the neighbourhood shock observed at time t.
    State state_for(NodeId v, std::size_t t, std::span<const double> neighborhood_shock) const;

    // Learns eps_t -> eps_{t+1} for one node or for all nodes.
    void observe_node(NodeId v, std::size_t t, const Eigen::MatrixXd& shock_t, const Eigen::MatrixXd& shock_next);
    void observe(std::size_t t, const Eigen::MatrixXd& shock_t, const Eigen::MatrixXd& shock_next);

    // Fills node v's columns of `record` from the shock observed at the record's origin.
    // Returns true when the node had no observed states and fell back to a zero shock.
    bool forecast_node(NodeId v, const Eigen::MatrixXd& shock_at_origin, ForecastRecord& record) const;

    std::size_t total_states() const;
    std::size_t stored_values() const;

 private:
    RunConfig config_;
    NeighborhoodIndex neighborhoods_;
    std::size_t dim_;
    std::vector<NodeStateStore> stores_;
};

// Generator for node v's draws at a given origin; independent of scheduling.
std::mt19937_64 node_stream(std::uint64_t seed, NodeId v, std::size_t origin);

MspaceModel make_model(const TemporalGraphDataset& dataset, const RunConfig& config);

/// Offline phase: learns the pairs eps_t -> eps_{t+1} for t in [1, floor(rT) - 1],
/// i.e. every transition that lies inside the training prefix.
MspaceModel offline_train(const TemporalGraphDataset& dataset, const RunConfig& config);

// Same, with an explicit training prefix length (in shocks).
MspaceModel offline_train_prefix(const TemporalGraphDataset& dataset, const RunConfig& config,
                                 std::size_t train_shocks);

/// q-step iterative forecast from origin t given eps_t and x_t for every node.
ForecastRecord forecast_q(const MspaceModel& model, const Eigen::MatrixXd& shock_at_origin,
                          const Eigen::MatrixXd& features_at_origin, std::size_t origin, std::size_t horizon);

struct RunResult {
    RunHistory records;
    MspaceModel model;
};

/// Prequential online phase over origins t = max(1, floor(rT)) .. T - q.
RunResult online_run(const TemporalGraphDataset& dataset, const RunConfig& config);

// First and last forecast origins for a series of `num_shocks` shocks.
std::size_t first_origin(const RunConfig& config, std::size_t num_shocks);
std::size_t last_origin(const RunConfig& config, std::size_t num_shocks);

}  // namespace mspace
