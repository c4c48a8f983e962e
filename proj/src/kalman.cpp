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

#include "mspace/kalman.hpp"

#include <cmath>
#include <numbers>

#include "mspace/error.hpp"
#include "mspace/parallel.hpp"

namespace mspace {

KalmanTarget parse_kalman_target(std::string_view name) {
    if (name == "kalman-x") return KalmanTarget::features;
    if (name == "kalman-eps") return KalmanTarget::shocks;
    throw ConfigError("unknown baseline '" + std::string(name) + "' (expected kalman-x or kalman-eps)");
}

std::string kalman_name(KalmanTarget target) {
    return target == KalmanTarget::features ? "kalman-x" : "kalman-eps";
}

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Raises eigenvalues below the floor; returns true if anything changed.
bool floor_spectrum(Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(m));
    const Eigen::VectorXd& values = eig.eigenvalues();
    if (eig.info() == Eigen::Success && values.minCoeff() >= kalman_noise_floor) {
        m = symmetrize(m);
        return false;
    }
    const Eigen::VectorXd clipped = values.cwiseMax(kalman_noise_floor);
    m = symmetrize(eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose());
    return true;
}

// Solves X * lhs = rhs for X with a rank-revealing factorization.
Eigen::MatrixXd right_solve(const Eigen::MatrixXd& rhs, const Eigen::MatrixXd& lhs) {
    return lhs.transpose().completeOrthogonalDecomposition().solve(rhs.transpose()).transpose();
}

struct Pass {
    std::vector<Eigen::VectorXd> predicted_mean;
    std::vector<Eigen::MatrixXd> predicted_cov;
    std::vector<Eigen::VectorXd> filtered_mean;
    std::vector<Eigen::MatrixXd> filtered_cov;
    double log_likelihood = 0.0;
};

Pass filter_pass(const KalmanParams& params, const Eigen::MatrixXd& series) {
    Pass pass;
    KalmanFilter filter(params);
    const auto length = static_cast<std::size_t>(series.rows());
    Eigen::VectorXd m = params.initial_state;
    Eigen::MatrixXd p = params.initial_covariance;
    for (std::size_t t = 0; t < length; ++t) {
        pass.predicted_mean.push_back(m);
        pass.predicted_cov.push_back(p);
        pass.log_likelihood += filter.update(series.row(static_cast<Eigen::Index>(t)).transpose());
        pass.filtered_mean.push_back(filter.state());
        pass.filtered_cov.push_back(filter.covariance());
        m = params.transition * filter.state() + params.state_offset;
        p = symmetrize(params.transition * filter.covariance() * params.transition.transpose() +
                       params.process_noise);
    }
    return pass;
}

}  // namespace

KalmanFilter::KalmanFilter(const KalmanParams& params)
    : params_(&params), predicted_mean_(params.initial_state), predicted_cov_(params.initial_covariance) {}

double KalmanFilter::update(const Eigen::VectorXd& y) {
    const auto& p = *params_;
    const Eigen::MatrixXd& B = p.emission;
    const Eigen::VectorXd innovation = y - (B * predicted_mean_ + p.observation_offset);
    const Eigen::MatrixXd s = symmetrize(B * predicted_cov_ * B.transpose() + p.observation_noise);
    const Eigen::LDLT<Eigen::MatrixXd> s_ldlt(s);
    if (s_ldlt.info() != Eigen::Success) {
        throw ComputeError("innovation covariance is singular");
    }
    // K = P B^T S^-1
    const Eigen::MatrixXd gain = s_ldlt.solve(B * predicted_cov_).transpose();
    filtered_mean_ = predicted_mean_ + gain * innovation;
    const Eigen::MatrixXd i_kb = Eigen::MatrixXd::Identity(predicted_cov_.rows(), predicted_cov_.cols()) - gain * B;
    // Joseph form keeps the covariance symmetric PSD.
    filtered_cov_ = symmetrize(i_kb * predicted_cov_ * i_kb.transpose() +
                               gain * p.observation_noise * gain.transpose());
    started_ = true;

    const double log_det = s_ldlt.vectorD().array().log().sum();
    const double quad = innovation.dot(s_ldlt.solve(innovation));
    const auto k = static_cast<double>(y.size());

    predicted_mean_ = p.transition * filtered_mean_ + p.state_offset;
    predicted_cov_ = symmetrize(p.transition * filtered_cov_ * p.transition.transpose() + p.process_noise);
    return -0.5 * (k * std::log(2.0 * std::numbers::pi) + log_det + quad);
}

Eigen::MatrixXd KalmanFilter::forecast(std::size_t steps) const {
    const auto& p = *params_;
    Eigen::MatrixXd out(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(p.dim()));
    // predicted_mean_ already holds E[h_{t+1} | y_1..y_t].
    Eigen::VectorXd h = predicted_mean_;
    for (std::size_t k = 0; k < steps; ++k) {
        out.row(static_cast<Eigen::Index>(k)) = (p.emission * h + p.observation_offset).transpose();
        h = p.transition * h + p.state_offset;
    }
    return out;
}

double kalman_log_likelihood(const KalmanParams& params, const Eigen::MatrixXd& series) {
    return filter_pass(params, series).log_likelihood;
}

KalmanParams kalman_fit(const Eigen::MatrixXd& series, std::size_t em_iterations) {
    const auto length = series.rows();
    const auto d = series.cols();
    if (length < 3) {
        throw DataError("Kalman fit needs at least 3 observations, got " + std::to_string(length));
    }
    if (!series.allFinite()) {
        throw DataError("Kalman fit received non-finite observations");
    }
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
    const Eigen::RowVectorXd mean = series.colwise().mean();
    const Eigen::RowVectorXd variance =
        (series.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(length - 1);

    KalmanParams p;
    p.transition = eye;
    p.emission = eye;
    p.state_offset = Eigen::VectorXd::Zero(d);
    p.observation_offset = Eigen::VectorXd::Zero(d);
    p.process_noise = variance.transpose().asDiagonal();
    p.observation_noise = p.process_noise;
    p.initial_state = series.row(0).transpose();
    p.initial_covariance = p.process_noise;
    p.noise_floored = floor_spectrum(p.process_noise);
    p.noise_floored = floor_spectrum(p.observation_noise) || p.noise_floored;
    p.noise_floored = floor_spectrum(p.initial_covariance) || p.noise_floored;
    if (p.noise_floored) {
        // A degenerate series has nothing for EM to learn; keep the random-walk start.
        p.log_likelihood.push_back(kalman_log_likelihood(p, series));
        return p;
    }

    const auto n = static_cast<std::size_t>(length);
    std::vector<Eigen::VectorXd> ms(n);
    std::vector<Eigen::MatrixXd> ps(n);
    std::vector<Eigen::MatrixXd> lag(n);  // Cov(h_t, h_{t-1} | all), t >= 1
    for (std::size_t iter = 0; iter < em_iterations; ++iter) {
        const Pass pass = filter_pass(p, series);
        p.log_likelihood.push_back(pass.log_likelihood);

        // Rauch-Tung-Striebel smoother.
        ms[n - 1] = pass.filtered_mean[n - 1];
        ps[n - 1] = pass.filtered_cov[n - 1];
        for (std::size_t t = n - 1; t-- > 0;) {
            const Eigen::MatrixXd& pred = pass.predicted_cov[t + 1];
            const Eigen::MatrixXd j =
                right_solve(pass.filtered_cov[t] * p.transition.transpose(), pred);
            ms[t] = pass.filtered_mean[t] + j * (ms[t + 1] - pass.predicted_mean[t + 1]);
            ps[t] = symmetrize(pass.filtered_cov[t] + j * (ps[t + 1] - pred) * j.transpose());
            lag[t + 1] = ps[t + 1] * j.transpose();
        }

        const auto zz = [&](std::size_t t) {
            Eigen::MatrixXd m(d + 1, d + 1);
            m.topLeftCorner(d, d) = ps[t] + ms[t] * ms[t].transpose();
            m.topRightCorner(d, 1) = ms[t];
            m.bottomLeftCorner(1, d) = ms[t].transpose();
            m(d, d) = 1.0;
            return m;
        };

        Eigen::MatrixXd syz = Eigen::MatrixXd::Zero(d, d + 1);
        Eigen::MatrixXd szz = Eigen::MatrixXd::Zero(d + 1, d + 1);
        Eigen::MatrixXd syy = Eigen::MatrixXd::Zero(d, d);
        Eigen::MatrixXd s10 = Eigen::MatrixXd::Zero(d, d + 1);
        Eigen::MatrixXd s00 = Eigen::MatrixXd::Zero(d + 1, d + 1);
        Eigen::MatrixXd s11 = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t t = 0; t < n; ++t) {
            const Eigen::VectorXd y = series.row(static_cast<Eigen::Index>(t)).transpose();
            const Eigen::MatrixXd z = zz(t);
            syz.leftCols(d) += y * ms[t].transpose();
            syz.col(d) += y;
            szz += z;
            syy += y * y.transpose();
            if (t >= 1) {
                s10.leftCols(d) += lag[t] + ms[t] * ms[t - 1].transpose();
                s10.col(d) += ms[t];
                s00 += zz(t - 1);
                s11 += z.topLeftCorner(d, d);
            }
        }
        const Eigen::MatrixXd w = right_solve(syz, szz);
        p.emission = w.leftCols(d);
        p.observation_offset = w.col(d);
        p.observation_noise = symmetrize((syy - w * syz.transpose()) / static_cast<double>(n));

        const Eigen::MatrixXd v = right_solve(s10, s00);
        p.transition = v.leftCols(d);
        p.state_offset = v.col(d);
        p.process_noise = symmetrize((s11 - v * s10.transpose()) / static_cast<double>(n - 1));

        p.initial_state = ms[0];
        p.initial_covariance = ps[0];
        p.noise_floored = floor_spectrum(p.observation_noise) || p.noise_floored;
        p.noise_floored = floor_spectrum(p.process_noise) || p.noise_floored;
        floor_spectrum(p.initial_covariance);
    }
    p.log_likelihood.push_back(kalman_log_likelihood(p, series));
    return p;
}

Eigen::MatrixXd kalman_forecast(const KalmanParams& params, const Eigen::MatrixXd& history, std::size_t steps) {
    if (history.rows() == 0) {
        throw DataError("Kalman forecast needs a non-empty history");
    }
    KalmanFilter filter(params);
    for (Eigen::Index t = 0; t < history.rows(); ++t) {
        filter.update(history.row(t).transpose());
    }
    return filter.forecast(steps);
}

KalmanRun kalman_run(const TemporalGraphDataset& dataset, KalmanTarget target, const RunConfig& config,
                     std::size_t em_iterations) {
    dataset.validate();
    const std::size_t num_shocks = dataset.num_snapshots() - 1;
    config.validate(num_shocks);
    const std::size_t n = dataset.num_nodes();
    const std::size_t d = dataset.dim();
    const auto di = static_cast<Eigen::Index>(d);
    const std::size_t train = config.train_length(num_shocks);
    const std::size_t first = first_origin(config, num_shocks);
    const std::size_t last = last_origin(config, num_shocks);
    const ShockSeries shocks = compute_shocks(dataset);

    KalmanRun run;
    run.params.resize(n);
    for (std::size_t t = first; t <= last; ++t) {
        run.records.emplace_back(t, config.horizon, n, d);
    }

    parallel_for(n, [&](std::size_t v) {
        const auto vi = static_cast<Eigen::Index>(v);
        // Row i holds the observation at time i (features) or time i + 1 (shocks).
        Eigen::MatrixXd series;
        if (target == KalmanTarget::features) {
            series.resize(static_cast<Eigen::Index>(num_shocks + 1), di);
            for (std::size_t t = 0; t <= num_shocks; ++t) {
                series.row(static_cast<Eigen::Index>(t)) = dataset.features[t].row(vi);
            }
        } else {
            series.resize(static_cast<Eigen::Index>(num_shocks), di);
            for (std::size_t t = 1; t <= num_shocks; ++t) {
                series.row(static_cast<Eigen::Index>(t - 1)) = shocks.at_time(t).row(vi);
            }
        }
        const auto row_of = [&](std::size_t t) {
            return static_cast<Eigen::Index>(target == KalmanTarget::features ? t : t - 1);
        };
        const Eigen::Index train_rows = row_of(train) + 1;
        if (train_rows < 3) {
            throw ConfigError("Kalman baseline needs a training prefix of at least 3 observations");
        }
        run.params[v] = kalman_fit(series.topRows(train_rows), em_iterations);

        KalmanFilter filter(run.params[v]);
        for (Eigen::Index row = 0; row <= row_of(last); ++row) {
            filter.update(series.row(row).transpose());
            const std::size_t t = target == KalmanTarget::features ? static_cast<std::size_t>(row)
                                                                  : static_cast<std::size_t>(row) + 1;
            if (t < first) {
                continue;
            }
            auto& record = run.records[t - first];
            const Eigen::MatrixXd predicted = filter.forecast(config.horizon);
            Eigen::RowVectorXd previous = dataset.features[t].row(vi);
            for (std::size_t k = 0; k < config.horizon; ++k) {
                const auto ki = static_cast<Eigen::Index>(k);
                Eigen::RowVectorXd step;
                if (target == KalmanTarget::features) {
                    step = predicted.row(ki) - previous;
                    previous = predicted.row(ki);
                } else {
                    step = predicted.row(ki);
                }
                record.shocks.block(ki, vi * di, 1, di) = step;
            }
        }
    });
    for (auto& record : run.records) {
        record.reconstruct(dataset.features[record.origin]);
    }
    return run;
}

}  // namespace mspace
