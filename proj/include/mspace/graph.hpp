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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mspace {

using NodeId = std::size_t;

/// Symmetric binary adjacency over a fixed node set, stored dense.
class Adjacency {
 public:
    Adjacency() = default;
    explicit Adjacency(std::size_t n) : n_(n), bits_(n * n, 0) {}

    std::size_t size() const { return n_; }
    bool edge(NodeId u, NodeId v) const { return bits_[u * n_ + v] != 0; }
    std::uint8_t raw(NodeId u, NodeId v) const { return bits_[u * n_ + v]; }

    // Sets both (u, v) and (v, u).
    void connect(NodeId u, NodeId v);
    void set_raw(NodeId u, NodeId v, std::uint8_t value) { bits_[u * n_ + v] = value; }

    std::size_t edge_count() const;  // unordered pairs u < v
    std::vector<NodeId> neighbors(NodeId v) const;

    // Throws DataError naming the first non-binary or asymmetric entry.
    void validate() const;

    bool operator==(const Adjacency&) const = default;

 private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Static graph with T feature snapshots, each n x d.
struct TemporalGraphDataset {
    Adjacency adjacency;
    std::vector<Eigen::MatrixXd> features;
    std::optional<double> timestep_seconds;

    std::size_t num_nodes() const { return adjacency.size(); }
    std::size_t dim() const { return features.empty() ? 0 : static_cast<std::size_t>(features.front().cols()); }
    std::size_t num_snapshots() const { return features.size(); }

    // Checks shapes, finiteness, T >= 2 and the adjacency invariants.
    void validate() const;

    bool operator==(const TemporalGraphDataset& other) const;
};

/// Per-node ascending neighbourhoods, each containing the node itself.
class NeighborhoodIndex {
 public:
    NeighborhoodIndex() = default;
    NeighborhoodIndex(std::vector<std::vector<NodeId>> members, int hops)
        : members_(std::move(members)), hops_(hops) {}

    std::size_t size() const { return members_.size(); }
    int hops() const { return hops_; }
    std::span<const NodeId> members(NodeId v) const { return members_[v]; }
    // Position of v inside its own neighbourhood.
    std::size_t self_position(NodeId v) const;
    std::size_t max_size() const;

 private:
    std::vector<std::vector<NodeId>> members_;
    int hops_ = 0;
};

/// Shocks eps_1..eps_{T-1}; shocks()[k] holds x_{k+1} - x_k.
class ShockSeries {
 public:
    ShockSeries() = default;
    explicit ShockSeries(std::vector<Eigen::MatrixXd> shocks) : shocks_(std::move(shocks)) {}

    std::size_t size() const { return shocks_.size(); }
    std::size_t num_nodes() const { return shocks_.empty() ? 0 : static_cast<std::size_t>(shocks_.front().rows()); }
    std::size_t dim() const { return shocks_.empty() ? 0 : static_cast<std::size_t>(shocks_.front().cols()); }

    // eps_t for t in [1, size()].
    const Eigen::MatrixXd& at_time(std::size_t t) const { return shocks_.at(t - 1); }
    const std::vector<Eigen::MatrixXd>& shocks() const { return shocks_; }

 private:
    std::vector<Eigen::MatrixXd> shocks_;
};

NeighborhoodIndex build_neighborhood_index(const Adjacency& adjacency, int hops);
inline NeighborhoodIndex build_neighborhood_index(const TemporalGraphDataset& dataset, int hops) {
    return build_neighborhood_index(dataset.adjacency, hops);
}

// Singleton neighbourhoods <v> for every node.
NeighborhoodIndex self_only_index(std::size_t n);

ShockSeries compute_shocks(const TemporalGraphDataset& dataset);

/// Writes the node-major stacked shock of the nodes in `nodes` into `out`.
void gather_shock(const Eigen::MatrixXd& shock, std::span<const NodeId> nodes, std::span<double> out);
Eigen::VectorXd gather_shock(const Eigen::MatrixXd& shock, std::span<const NodeId> nodes);
Eigen::VectorXd gather_shock(const ShockSeries& shocks, std::size_t t, std::span<const NodeId> nodes);

}  // namespace mspace
