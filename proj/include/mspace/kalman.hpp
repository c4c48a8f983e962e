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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mspace/engine.hpp"
#include "mspace/graph.hpp"

namespace mspace {

// Kalman-x observes node features; Kalman-eps observes shocks.
enum class KalmanTarget : std::uint8_t { features, shocks };

KalmanTarget parse_kalman_target(std::string_view name);  // "kalman-x" / "kalman-eps"
std::string kalman_name(KalmanTarget target);

/// Time-invariant linear-Gaussian model
///   h_t = A h_{t-1} + h_offset + w,  w ~ N(0, process_noise)
///   y_t = B h_t     + y_offset + v,  v ~ N(0, observation_noise)
/// with h_1 ~ N(initial_state, initial_covariance).
struct KalmanParams {
    Eigen::MatrixXd transition;
    Eigen::MatrixXd emission;
    Eigen::MatrixXd process_noise;
    Eigen::MatrixXd observation_noise;
    Eigen::VectorXd state_offset;
    Eigen::VectorXd observation_offset;
    Eigen::VectorXd initial_state;
    Eigen::MatrixXd initial_covariance;
    bool noise_floored = false;
    std::vector<double> log_likelihood;  // one entry per EM iteration, before its M-step

    std::size_t dim() const { return static_cast<std::size_t>(transition.rows()); }
};

inline constexpr double kalman_noise_floor = 1e-9;

/// Filtering recursion with fixed parameters.
class KalmanFilter {
 public:
    explicit KalmanFilter(const KalmanParams& params);

    // Incorporates observation y_t; returns its log predictive density.
    double update(const Eigen::VectorXd& observation);

    // Mean observations for the next `steps` times, without further updates.
    Eigen::MatrixXd forecast(std::size_t steps) const;

    const Eigen::VectorXd& state() const { return filtered_mean_; }
    const Eigen::MatrixXd& covariance() const { return filtered_cov_; }
    bool started() const { return started_; }

 private:
    const KalmanParams* params_;
    Eigen::VectorXd predicted_mean_;
    Eigen::MatrixXd predicted_cov_;
    Eigen::VectorXd filtered_mean_;
    Eigen::MatrixXd filtered_cov_;
    bool started_ = false;
};

// Rows of `series` are consecutive observations.
double kalman_log_likelihood(const KalmanParams& params, const Eigen::MatrixXd& series);

/// EM fit starting from A = B = I, zero offsets and noise equal to the sample variance.
KalmanParams kalman_fit(const Eigen::MatrixXd& series, std::size_t em_iterations = 20);

/// Filters `history` and returns `steps` predicted observations (rows).
Eigen::MatrixXd kalman_forecast(const KalmanParams& params, const Eigen::MatrixXd& history, std::size_t steps);

struct KalmanRun {
    RunHistory records;
    std::vector<KalmanParams> params;  // per node
};

/// Baseline over the same origins as online_run: fit on the training prefix, then filter
/// forward and issue a q-step forecast at every origin.
KalmanRun kalman_run(const TemporalGraphDataset& dataset, KalmanTarget target, const RunConfig& config,
                     std::size_t em_iterations = 20);

}  // namespace mspace
