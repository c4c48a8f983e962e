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

#include "mspace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mspace/error.hpp"

namespace mspace {

void Adjacency::connect(NodeId u, NodeId v) {
    bits_[u * n_ + v] = 1;
    bits_[v * n_ + u] = 1;
}

std::size_t Adjacency::edge_count() const {
    std::size_t count = 0;
    for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v = u + 1; v < n_; ++v) {
            count += edge(u, v) ? 1 : 0;
        }
    }
    return count;
}

std::vector<NodeId> Adjacency::neighbors(NodeId v) const {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n_; ++u) {
        if (u != v && edge(v, u)) {
            out.push_back(u);
        }
    }
    return out;
}

void Adjacency::validate() const {
    for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v = 0; v < n_; ++v) {
            const auto a = raw(u, v);
            if (a > 1) {
                throw DataError("adjacency entry (" + std::to_string(u) + ", " + std::to_string(v) +
                                ") is not binary: " + std::to_string(a));
            }
            if (a != raw(v, u)) {
                throw DataError("adjacency is not symmetric at (" + std::to_string(u) + ", " +
                                std::to_string(v) + ")");
            }
        }
    }
}

void TemporalGraphDataset::validate() const {
    adjacency.validate();
    const auto n = static_cast<Eigen::Index>(num_nodes());
    if (n == 0) {
        throw DataError("dataset has no nodes");
    }
    if (features.size() < 2) {
        throw DataError("dataset needs at least 2 snapshots, got " + std::to_string(features.size()));
    }
    const auto d = features.front().cols();
    if (d == 0) {
        throw DataError("feature dimension is zero");
    }
    for (std::size_t t = 0; t < features.size(); ++t) {
        const auto& x = features[t];
        if (x.rows() != n || x.cols() != d) {
            throw DataError("snapshot " + std::to_string(t) + " has shape " + std::to_string(x.rows()) + "x" +
                            std::to_string(x.cols()) + ", expected " + std::to_string(n) + "x" +
                            std::to_string(d));
        }
        if (!x.allFinite()) {
            throw DataError("snapshot " + std::to_string(t) + " contains non-finite values");
        }
    }
}

bool TemporalGraphDataset::operator==(const TemporalGraphDataset& other) const {
    if (!(adjacency == other.adjacency) || features.size() != other.features.size()) {
        return false;
    }
    for (std::size_t t = 0; t < features.size(); ++t) {
        if (features[t].rows() != other.features[t].rows() || features[t].cols() != other.features[t].cols() ||
            features[t] != other.features[t]) {
            return false;
        }
    }
    return timestep_seconds == other.timestep_seconds;
}

std::size_t NeighborhoodIndex::self_position(NodeId v) const {
    const auto& m = members_[v];
    return static_cast<std::size_t>(std::lower_bound(m.begin(), m.end(), v) - m.begin());
}

std::size_t NeighborhoodIndex::max_size() const {
    std::size_t b = 0;
    for (const auto& m : members_) {
        b = std::max(b, m.size());
    }
    return b;
}

NeighborhoodIndex build_neighborhood_index(const Adjacency& adjacency, int hops) {
    if (hops < 1) {
        throw ConfigError("hops must be >= 1, got " + std::to_string(hops));
    }
    adjacency.validate();
    const std::size_t n = adjacency.size();
    std::vector<std::vector<NodeId>> lists(n);
    std::vector<std::vector<NodeId>> adj(n);
    for (NodeId v = 0; v < n; ++v) {
        adj[v] = adjacency.neighbors(v);
    }
    // Breadth-first expansion, truncated at `hops`.
    std::vector<int> depth(n, -1);
    std::vector<NodeId> frontier;
    std::vector<NodeId> next;
    std::vector<NodeId> touched;
    for (NodeId v = 0; v < n; ++v) {
        depth[v] = 0;
        touched = {v};
        frontier = {v};
        for (int h = 1; h <= hops && !frontier.empty(); ++h) {
            next.clear();
            for (NodeId u : frontier) {
                for (NodeId w : adj[u]) {
                    if (depth[w] < 0) {
                        depth[w] = h;
                        next.push_back(w);
                        touched.push_back(w);
                    }
                }
            }
            frontier.swap(next);
        }
        std::sort(touched.begin(), touched.end());
        for (NodeId u : touched) {
            depth[u] = -1;
        }
        lists[v] = touched;
    }
    return NeighborhoodIndex(std::move(lists), hops);
}

NeighborhoodIndex self_only_index(std::size_t n) {
    std::vector<std::vector<NodeId>> lists(n);
    for (NodeId v = 0; v < n; ++v) {
        lists[v] = {v};
    }
    return NeighborhoodIndex(std::move(lists), 0);
}

ShockSeries compute_shocks(const TemporalGraphDataset& dataset) {
    if (dataset.features.size() < 2) {
        throw DataError("need at least 2 snapshots to compute shocks, got " +
                        std::to_string(dataset.features.size()));
    }
    std::vector<Eigen::MatrixXd> shocks;
    shocks.reserve(dataset.features.size() - 1);
    for (std::size_t t = 1; t < dataset.features.size(); ++t) {
        shocks.emplace_back(dataset.features[t] - dataset.features[t - 1]);
    }
    return ShockSeries(std::move(shocks));
}

void gather_shock(const Eigen::MatrixXd& shock, std::span<const NodeId> nodes, std::span<double> out) {
    const auto n = static_cast<std::size_t>(shock.rows());
    const auto d = static_cast<std::size_t>(shock.cols());
    if (out.size() != nodes.size() * d) {
        throw ComputeError("gather_shock: output length mismatch");
    }
    std::size_t k = 0;
    for (NodeId u : nodes) {
        if (u >= n) {
            throw std::out_of_range("node id " + std::to_string(u) + " outside [0, " + std::to_string(n) + ")");
        }
        for (std::size_t j = 0; j < d; ++j) {
            out[k++] = shock(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(j));
        }
    }
}

Eigen::VectorXd gather_shock(const Eigen::MatrixXd& shock, std::span<const NodeId> nodes) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(nodes.size()) * shock.cols());
    gather_shock(shock, nodes, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

Eigen::VectorXd gather_shock(const ShockSeries& shocks, std::size_t t, std::span<const NodeId> nodes) {
    if (t < 1 || t > shocks.size()) {
        throw DataError("shock time " + std::to_string(t) + " outside [1, " + std::to_string(shocks.size()) + "]");
    }
    return gather_shock(shocks.at_time(t), nodes);
}

}  // namespace mspace
