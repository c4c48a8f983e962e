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

#include "mspace/engine.hpp"

#include <cmath>
#include <sstream>

#include "mspace/error.hpp"
#include "mspace/parallel.hpp"

namespace mspace {

Variant Variant::parse(std::string_view name) {
    Variant v;
    const auto dash = name.find('-');
    if (dash == std::string_view::npos) {
        throw ConfigError("unknown variant '" + std::string(name) + "'");
    }
    const auto state = name.substr(0, dash);
    const auto sampler = name.substr(dash + 1);
    if (state == "s") {
        v.state = StateFunction::sign;
    } else if (state == "t") {
        v.state = StateFunction::time;
    } else if (state == "st") {
        v.state = StateFunction::combined;
    } else {
        throw ConfigError("unknown variant '" + std::string(name) + "'");
    }
    if (sampler == "mu") {
        v.sampler = Sampler::mean;
    } else if (sampler == "n") {
        v.sampler = Sampler::gaussian;
    } else {
        throw ConfigError("unknown variant '" + std::string(name) + "'");
    }
    return v;
}

std::string Variant::name() const {
    std::string out = state == StateFunction::sign ? "s" : state == StateFunction::time ? "t" : "st";
    return out + (sampler == Sampler::mean ? "-mu" : "-n");
}

std::size_t RunConfig::train_length(std::size_t num_shocks) const {
    return static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(num_shocks)));
}

void RunConfig::validate(std::size_t num_shocks) const {
    if (!(train_ratio >= 0.0 && train_ratio < 1.0)) {
        throw ConfigError("train ratio must lie in [0, 1), got " + std::to_string(train_ratio));
    }
    if (horizon < 1) {
        throw ConfigError("forecast horizon must be >= 1");
    }
    if (queue_capacity < 1) {
        throw ConfigError("queue size must be >= 1");
    }
    if (variant.state != StateFunction::sign && period < 1) {
        throw ConfigError("period must be >= 1 for time-based variants");
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("gamma must be a finite non-negative number");
    }
    if (hops < 1) {
        throw ConfigError("hops must be >= 1");
    }
    if (num_shocks < 1) {
        throw ConfigError("dataset has no shocks");
    }
    if (train_length(num_shocks) + horizon > num_shocks || horizon + 1 > num_shocks) {
        throw ConfigError("floor(r*T) + q must not exceed T (T = " + std::to_string(num_shocks) +
                          " shocks, q = " + std::to_string(horizon) + ")");
    }
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "variant=" << variant.name() << ";r=" << train_ratio << ";q=" << horizon << ";M=" << queue_capacity
       << ";period=" << period << ";gamma=" << gamma << ";hops=" << hops << ";seed=" << seed;
    return os.str();
}

ForecastRecord::ForecastRecord(std::size_t origin_, std::size_t horizon, std::size_t nodes, std::size_t dim_)
    : origin(origin_), num_nodes(nodes), dim(dim_) {
    const auto q = static_cast<Eigen::Index>(horizon);
    const auto nd = static_cast<Eigen::Index>(nodes * dim_);
    shocks = Eigen::MatrixXd::Zero(q, nd);
    features = Eigen::MatrixXd::Zero(q, nd);
    matched_mean = Eigen::MatrixXd::Zero(q, nd);
    matched_trace = Eigen::MatrixXd::Zero(q, static_cast<Eigen::Index>(nodes));
    matched_state = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Constant(
        q, static_cast<Eigen::Index>(nodes), -1);
}

void ForecastRecord::reconstruct(const Eigen::MatrixXd& features_at_origin) {
    // Row-major flattening of an n x d matrix matches the node-major column layout.
    Eigen::RowVectorXd running(static_cast<Eigen::Index>(num_nodes * dim));
    for (std::size_t v = 0; v < num_nodes; ++v) {
        for (std::size_t j = 0; j < dim; ++j) {
            running[static_cast<Eigen::Index>(v * dim + j)] =
                features_at_origin(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j));
        }
    }
    for (Eigen::Index k = 0; k < shocks.rows(); ++k) {
        running += shocks.row(k);
        features.row(k) = running;
    }
}

MspaceModel::MspaceModel(RunConfig config, NeighborhoodIndex neighborhoods, std::size_t dim)
    : config_(std::move(config)), neighborhoods_(std::move(neighborhoods)), dim_(dim) {
    stores_.reserve(neighborhoods_.size());
    for (NodeId v = 0; v < neighborhoods_.size(); ++v) {
        stores_.emplace_back(neighborhoods_.members(v).size() * dim_, config_.queue_capacity);
    }
}

State MspaceModel::state_for(NodeId /*v*/, std::size_t t, std::span<const double> neighborhood_shock) const {
    const auto time = static_cast<std::int64_t>(t);
    switch (config_.variant.state) {
        case StateFunction::sign:
            return State::of(psi_s(neighborhood_shock));
        case StateFunction::time:
            // Keyed by the phase of the succeeding shock, so step k reads phase (t + k).
            return State::of(psi_t(time + 1, config_.period));
        case StateFunction::combined:
            return psi_st(neighborhood_shock, time, config_.period);
    }
    return {};
}

void MspaceModel::observe_node(NodeId v, std::size_t t, const Eigen::MatrixXd& shock_t,
                               const Eigen::MatrixXd& shock_next) {
    const auto members = neighborhoods_.members(v);
    const Eigen::VectorXd current = gather_shock(shock_t, members);
    const Eigen::VectorXd next = gather_shock(shock_next, members);
    const State s = state_for(v, t, std::span<const double>(current.data(), static_cast<std::size_t>(current.size())));
    stores_[v].observe(s, std::span<const double>(next.data(), static_cast<std::size_t>(next.size())));
}

void MspaceModel::observe(std::size_t t, const Eigen::MatrixXd& shock_t, const Eigen::MatrixXd& shock_next) {
    for (NodeId v = 0; v < stores_.size(); ++v) {
        observe_node(v, t, shock_t, shock_next);
    }
}

bool MspaceModel::forecast_node(NodeId v, const Eigen::MatrixXd& shock_at_origin, ForecastRecord& record) const {
    const auto& store = stores_[v];
    const auto members = neighborhoods_.members(v);
    const auto d = static_cast<Eigen::Index>(dim_);
    const auto self = static_cast<Eigen::Index>(neighborhoods_.self_position(v)) * d;
    const auto col = static_cast<Eigen::Index>(v) * d;
    const auto vi = static_cast<Eigen::Index>(v);
    const bool sampled = config_.variant.sampler == Sampler::gaussian;

    std::mt19937_64 rng = node_stream(config_.seed, v, record.origin);
    Eigen::VectorXd previous = gather_shock(shock_at_origin, members);
    bool fallback = false;
    for (Eigen::Index k = 0; k < record.shocks.rows(); ++k) {
        Eigen::VectorXd predicted;
        if (store.empty()) {
            // Nothing observed yet: predict no change.
            predicted = Eigen::VectorXd::Zero(previous.size());
            fallback = true;
        } else {
            const State query = state_for(
                v, record.origin + static_cast<std::size_t>(k),
                std::span<const double>(previous.data(), static_cast<std::size_t>(previous.size())));
            const auto id = store.nearest(query, config_.gamma);
            const auto& mu = store.mean(id);
            predicted = sampled ? store.sample(id, rng) : mu;
            record.matched_state(k, vi) = static_cast<std::int64_t>(id);
            record.matched_mean.block(k, col, 1, d) = mu.segment(self, d).transpose();
            record.matched_trace(k, vi) =
                store.block_trace(id, static_cast<std::size_t>(self), static_cast<std::size_t>(d));
        }
        record.shocks.block(k, col, 1, d) = predicted.segment(self, d).transpose();
        previous = std::move(predicted);
    }
    return fallback;
}

std::size_t MspaceModel::total_states() const {
    std::size_t total = 0;
    for (const auto& s : stores_) {
        total += s.num_states();
    }
    return total;
}

std::size_t MspaceModel::stored_values() const {
    std::size_t total = 0;
    for (const auto& s : stores_) {
        total += s.stored_values();
    }
    return total;
}

std::mt19937_64 node_stream(std::uint64_t seed, NodeId v, std::size_t origin) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(static_cast<std::uint64_t>(v) >> 32),
                      static_cast<std::uint32_t>(origin),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(origin) >> 32)};
    return std::mt19937_64(seq);
}

MspaceModel make_model(const TemporalGraphDataset& dataset, const RunConfig& config) {
    dataset.validate();
    NeighborhoodIndex index = config.variant.state == StateFunction::time
                                  ? self_only_index(dataset.num_nodes())
                                  : build_neighborhood_index(dataset.adjacency, config.hops);
    return MspaceModel(config, std::move(index), dataset.dim());
}

MspaceModel offline_train_prefix(const TemporalGraphDataset& dataset, const RunConfig& config,
                                 std::size_t train_shocks) {
    MspaceModel model = make_model(dataset, config);
    const ShockSeries shocks = compute_shocks(dataset);
    if (train_shocks > shocks.size()) {
        throw ConfigError("training prefix longer than the series");
    }
    parallel_for(model.num_nodes(), [&](std::size_t v) {
        for (std::size_t t = 1; t < train_shocks; ++t) {
            model.observe_node(v, t, shocks.at_time(t), shocks.at_time(t + 1));
        }
    });
    return model;
}

MspaceModel offline_train(const TemporalGraphDataset& dataset, const RunConfig& config) {
    const auto num_shocks = dataset.num_snapshots() >= 2 ? dataset.num_snapshots() - 1 : 0;
    if (num_shocks < 1) {
        throw DataError("need at least 2 snapshots");
    }
    if (!(config.train_ratio >= 0.0 && config.train_ratio < 1.0)) {
        throw ConfigError("train ratio must lie in [0, 1)");
    }
    return offline_train_prefix(dataset, config, config.train_length(num_shocks));
}

ForecastRecord forecast_q(const MspaceModel& model, const Eigen::MatrixXd& shock_at_origin,
                          const Eigen::MatrixXd& features_at_origin, std::size_t origin, std::size_t horizon) {
    if (horizon < 1) {
        throw ConfigError("forecast horizon must be >= 1");
    }
    if (static_cast<std::size_t>(shock_at_origin.rows()) != model.num_nodes() ||
        static_cast<std::size_t>(shock_at_origin.cols()) != model.dim()) {
        throw DataError("origin shock has the wrong shape");
    }
    ForecastRecord record(origin, horizon, model.num_nodes(), model.dim());
    for (NodeId v = 0; v < model.num_nodes(); ++v) {
        record.fallback = model.forecast_node(v, shock_at_origin, record) || record.fallback;
    }
    record.reconstruct(features_at_origin);
    return record;
}

std::size_t first_origin(const RunConfig& config, std::size_t num_shocks) {
    return std::max<std::size_t>(1, config.train_length(num_shocks));
}

std::size_t last_origin(const RunConfig& config, std::size_t num_shocks) { return num_shocks - config.horizon; }

RunResult online_run(const TemporalGraphDataset& dataset, const RunConfig& config) {
    const auto num_shocks = dataset.num_snapshots() >= 2 ? dataset.num_snapshots() - 1 : 0;
    config.validate(num_shocks);
    MspaceModel model = make_model(dataset, config);
    const ShockSeries shocks = compute_shocks(dataset);
    const std::size_t first = first_origin(config, num_shocks);
    const std::size_t last = last_origin(config, num_shocks);
    const std::size_t train = config.train_length(num_shocks);

    RunHistory records;
    records.reserve(last - first + 1);
    for (std::size_t t = first; t <= last; ++t) {
        records.emplace_back(t, config.horizon, model.num_nodes(), model.dim());
    }
    std::vector<char> node_fallback(model.num_nodes() * records.size(), 0);

    // Nodes never read each other's stores, so each node replays its whole timeline independently.
    parallel_for(model.num_nodes(), [&](std::size_t v) {
        for (std::size_t t = 1; t < train; ++t) {
            model.observe_node(v, t, shocks.at_time(t), shocks.at_time(t + 1));
        }
        for (std::size_t t = first; t <= last; ++t) {
            if (model.forecast_node(v, shocks.at_time(t), records[t - first])) {
                node_fallback[v * records.size() + (t - first)] = 1;
            }
            model.observe_node(v, t, shocks.at_time(t), shocks.at_time(t + 1));
        }
    });
    for (std::size_t i = 0; i < records.size(); ++i) {
        bool any = false;
        for (std::size_t v = 0; v < model.num_nodes(); ++v) {
            any = any || node_fallback[v * records.size() + i] != 0;
        }
        records[i].fallback = any;
        records[i].reconstruct(dataset.features[records[i].origin]);
    }
    return RunResult{std::move(records), std::move(model)};
}

}  // namespace mspace
