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

#include <Eigen/Dense>

#include "mspace/graph.hpp"

namespace mspace::testing {

// Random dataset with G(n, p) edges and uniform features.
inline TemporalGraphDataset random_dataset(std::size_t n, std::size_t d, std::size_t snapshots, double p,
                                           std::uint64_t seed, double scale = 10.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> value(-scale, scale);
    TemporalGraphDataset ds;
    ds.adjacency = Adjacency(n);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (unit(rng) < p) ds.adjacency.connect(u, v);
        }
    }
    for (std::size_t t = 0; t < snapshots; ++t) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = value(rng);
        ds.features.push_back(x);
    }
    return ds;
}

// Path graph 0 - 1 - ... - (n-1).
inline Adjacency path_graph(std::size_t n) {
    Adjacency a(n);
    for (NodeId v = 0; v + 1 < n; ++v) a.connect(v, v + 1);
    return a;
}

// Scalar series for a single node with the given snapshot values.
inline TemporalGraphDataset scalar_series(std::initializer_list<double> values) {
    TemporalGraphDataset ds;
    ds.adjacency = Adjacency(1);
    for (double v : values) ds.features.push_back(Eigen::MatrixXd::Constant(1, 1, v));
    return ds;
}

}  // namespace mspace::testing
