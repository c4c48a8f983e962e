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
#include <span>
#include <vector>

#include "mspace/engine.hpp"
#include "mspace/graph.hpp"

namespace mspace {

/// Errors on cumulative (reconstructed) predictions, averaged over forecast origins.
/// Entry q-1 of each vector is the metric for the first q steps of every record.
struct ErrorReport {
    std::vector<double> rmse_per_q;
    std::vector<double> mae_per_q;
    std::vector<double> mse_per_q;
    std::size_t records = 0;

    double rmse() const { return rmse_per_q.empty() ? 0.0 : rmse_per_q.back(); }
    double mae() const { return mae_per_q.empty() ? 0.0 : mae_per_q.back(); }
};

ErrorReport error_report(const RunHistory& records, const ShockSeries& truth);

// RMSE(q) and MAE(q) for a single horizon.
double rmse_q(const RunHistory& records, const ShockSeries& truth, std::size_t q);
double mae_q(const RunHistory& records, const ShockSeries& truth, std::size_t q);

/// Upper and lower error envelopes derived from the states a run actually matched.
struct BoundReport {
    double alpha = 0.0;
    double beta = 0.0;
    double beta_prime = 0.0;
    bool lower_trivial = false;  // deterministic sampler: the lower envelope is not asserted
    std::vector<double> upper;          // sqrt(alpha q^2 + (3 alpha + beta) q + beta)
    std::vector<double> lower;          // beta' (q + 1), an MSE envelope
    std::vector<double> empirical_rmse; // mean over runs
    std::vector<double> empirical_mse;  // mean over runs
    std::vector<bool> upper_ok;
    std::vector<bool> lower_ok;

    bool upper_satisfied() const;
    bool lower_satisfied() const;
};

double upper_envelope(double alpha, double beta, std::size_t q);

/// Upper envelope over one deterministic run or a Monte-Carlo batch of stochastic runs.
/// Stochastic batches are compared through their mean RMSE with a 3-sigma allowance.
BoundReport upper_envelope_report(std::span<const RunHistory> runs, const ShockSeries& truth,
                                  std::size_t max_q, Sampler sampler);

/// Adds beta' and the MSE lower envelope to `report`; `slack` scales the envelope before comparison.
void lower_bound(std::span<const RunHistory> runs, const ShockSeries& truth, std::size_t max_q, Sampler sampler,
                 double slack, BoundReport& report);

BoundReport bound_report(std::span<const RunHistory> runs, const ShockSeries& truth, std::size_t max_q,
                         Sampler sampler, double lower_slack);

struct ProbeCell {
    std::size_t nodes = 0;
    std::size_t steps = 0;
    double seconds = 0.0;
    std::size_t stored_values = 0;
    std::size_t states = 0;
};

struct ProbeRatio {
    char axis = 'n';  // 'n' or 'T'
    std::size_t fixed = 0;
    std::size_t from = 0;
    std::size_t to = 0;
    double time_ratio = 0.0;
    double size_ratio = 0.0;
};

struct ProbeReport {
    std::vector<ProbeCell> cells;
    std::vector<ProbeRatio> ratios;
};

/// Times online runs over a grid of node counts and lengths on ring-graph synthetic data,
/// whose 3-node neighbourhoods saturate after a handful of steps. Keeps the fastest of `repeats`.
ProbeReport complexity_probe(std::span<const std::size_t> nodes, std::span<const std::size_t> steps,
                             const RunConfig& config, std::uint64_t seed, std::size_t repeats);

}  // namespace mspace
