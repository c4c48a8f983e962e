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

#include "mspace/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mspace/error.hpp"

namespace mspace {

SignState SignState::from_shock(std::span<const double> shock) {
    SignState s;
    s.size_ = shock.size();
    s.words_.assign((shock.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < shock.size(); ++i) {
        // sign(0) = +1
        if (shock[i] < 0.0) {
            s.words_[i / 64] |= std::uint64_t{1} << (i % 64);
        }
    }
    return s;
}

SignState SignState::from_signs(std::span<const int> signs) {
    SignState s;
    s.size_ = signs.size();
    s.words_.assign((signs.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] != 1 && signs[i] != -1) {
            throw std::invalid_argument("sign entries must be -1 or +1");
        }
        if (signs[i] < 0) {
            s.words_[i / 64] |= std::uint64_t{1} << (i % 64);
        }
    }
    return s;
}

std::size_t SignState::hamming(const SignState& other) const {
    if (size_ != other.size_) {
        throw std::invalid_argument("sign states differ in width");
    }
    std::size_t h = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        h += static_cast<std::size_t>(std::popcount(words_[w] ^ other.words_[w]));
    }
    return h;
}

std::size_t SignState::hash() const {
    // FNV-1a over the packed words.
    std::uint64_t h = 1469598103934665603ULL ^ size_;
    for (auto w : words_) {
        h ^= w;
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

int SignState::compare(const SignState& other) const {
    if (size_ != other.size_) {
        return size_ < other.size_ ? -1 : 1;
    }
    for (std::size_t w = 0; w < words_.size(); ++w) {
        const auto diff = words_[w] ^ other.words_[w];
        if (diff != 0) {
            const auto bit = std::uint64_t{1} << std::countr_zero(diff);
            // The side holding -1 at the first differing entry sorts first.
            return (words_[w] & bit) ? -1 : 1;
        }
    }
    return 0;
}

std::string State::encode() const {
    std::string out;
    if (kind != StateKind::phase) {
        out.reserve(sign.size() + 8);
        for (std::size_t i = 0; i < sign.size(); ++i) {
            out.push_back(sign[i] < 0 ? '-' : '+');
        }
    }
    if (kind != StateKind::sign) {
        out += ':' + std::to_string(phase.phase);
    }
    return out;
}

std::size_t StateHash::operator()(const State& s) const {
    std::size_t h = s.kind == StateKind::phase ? 0x9e3779b97f4a7c15ULL : s.sign.hash();
    if (s.kind != StateKind::sign) {
        h ^= static_cast<std::size_t>(s.phase.phase) * 0xbf58476d1ce4e5b9ULL + (h << 6) + (h >> 2);
    }
    return h ^ static_cast<std::size_t>(s.kind);
}

SignState psi_s(std::span<const double> shock) { return SignState::from_shock(shock); }

SignState psi_s(const Eigen::VectorXd& shock) {
    return SignState::from_shock(std::span<const double>(shock.data(), static_cast<std::size_t>(shock.size())));
}

PhaseState psi_t(std::int64_t t, std::int64_t period) {
    if (period < 1) {
        throw ConfigError("period must be >= 1, got " + std::to_string(period));
    }
    if (t < 0) {
        throw ConfigError("time index must be >= 0, got " + std::to_string(t));
    }
    return PhaseState{t % period, period};
}

State psi_st(std::span<const double> shock, std::int64_t t, std::int64_t period) {
    return State::of(psi_s(shock), psi_t(t, period));
}

std::int64_t phase_gap(const PhaseState& a, const PhaseState& b) {
    if (a.period != b.period) {
        throw std::invalid_argument("phase states differ in period");
    }
    const auto delta = a.phase > b.phase ? a.phase - b.phase : b.phase - a.phase;
    return std::min(delta, a.period - delta);
}

double squared_state_distance(const State& a, const State& b, double gamma) {
    if (a.kind != b.kind) {
        throw std::invalid_argument("cannot compare states of different kinds");
    }
    switch (a.kind) {
        case StateKind::sign:
            // |s - s'|^2 = 4 * hamming for +-1 entries.
            return 4.0 * static_cast<double>(a.sign.hamming(b.sign));
        case StateKind::phase: {
            const auto g = static_cast<double>(phase_gap(a.phase, b.phase));
            return g * g;
        }
        case StateKind::combined: {
            const auto g = static_cast<double>(phase_gap(a.phase, b.phase));
            return 4.0 * static_cast<double>(a.sign.hamming(b.sign)) + gamma * gamma * g * g;
        }
    }
    return 0.0;
}

double state_distance(const State& a, const State& b, double gamma) {
    return std::sqrt(squared_state_distance(a, b, gamma));
}

bool canonical_less(const State& a, const State& b) {
    if (a.kind != b.kind) {
        return a.kind < b.kind;
    }
    if (a.kind != StateKind::phase) {
        const int c = a.sign.compare(b.sign);
        if (c != 0) {
            return c < 0;
        }
    }
    if (a.kind != StateKind::sign) {
        return a.phase.phase < b.phase.phase;
    }
    return false;
}

BoundedQueue::BoundedQueue(std::size_t width, std::size_t capacity)
    : width_(width), capacity_(capacity), buffer_(width * capacity) {
    if (capacity == 0) {
        throw ConfigError("queue capacity must be >= 1");
    }
}

void BoundedQueue::push(std::span<const double> value) {
    if (value.size() != width_) {
        throw std::invalid_argument("queue entry has length " + std::to_string(value.size()) + ", expected " +
                                    std::to_string(width_));
    }
    std::size_t slot;
    if (size_ < capacity_) {
        slot = (head_ + size_) % capacity_;
        ++size_;
    } else {
        slot = head_;
        head_ = (head_ + 1) % capacity_;
    }
    std::copy(value.begin(), value.end(), buffer_.begin() + static_cast<std::ptrdiff_t>(slot * width_));
}

std::span<const double> BoundedQueue::operator[](std::size_t i) const {
    const auto slot = (head_ + i) % capacity_;
    return {buffer_.data() + slot * width_, width_};
}

Eigen::VectorXd queue_mean(const BoundedQueue& queue) {
    if (queue.empty()) {
        throw ComputeError("cannot estimate parameters from an empty queue");
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(queue.width()));
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const auto e = queue[i];
        for (std::size_t j = 0; j < e.size(); ++j) {
            mean[static_cast<Eigen::Index>(j)] += e[j];
        }
    }
    return mean / static_cast<double>(queue.size());
}

Eigen::MatrixXd queue_covariance(const BoundedQueue& queue, const Eigen::VectorXd& mean) {
    const auto w = static_cast<Eigen::Index>(queue.width());
    const auto count = static_cast<Eigen::Index>(queue.size());
    if (count < 2) {
        return Eigen::MatrixXd::Zero(w, w);
    }
    Eigen::MatrixXd centered(w, count);
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto e = queue[static_cast<std::size_t>(i)];
        centered.col(i) = Eigen::Map<const Eigen::VectorXd>(e.data(), w) - mean;
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(w, w);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered);
    cov.triangularView<Eigen::StrictlyUpper>() = cov.transpose();
    return cov / static_cast<double>(count - 1);
}

double queue_block_trace(const BoundedQueue& queue, const Eigen::VectorXd& mean, std::size_t offset,
                         std::size_t len) {
    if (queue.size() < 2) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const auto e = queue[i];
        for (std::size_t j = offset; j < offset + len; ++j) {
            const double c = e[j] - mean[static_cast<Eigen::Index>(j)];
            sum += c * c;
        }
    }
    return sum / static_cast<double>(queue.size() - 1);
}

GaussianParams estimate_params(const BoundedQueue& queue) {
    GaussianParams p;
    p.mean = queue_mean(queue);
    p.covariance = queue_covariance(queue, p.mean);
    p.sample_count = queue.size();
    return p;
}

GaussianSampler::GaussianSampler(const GaussianParams& params) : mean_(params.mean) {
    const auto& cov = params.covariance;
    if (!params.mean.allFinite() || !cov.allFinite()) {
        throw ComputeError("Gaussian parameters contain non-finite values");
    }
    if (cov.rows() != mean_.size() || cov.cols() != mean_.size()) {
        throw ComputeError("covariance shape does not match mean");
    }
    if ((cov.array() == 0.0).all()) {
        degenerate_ = true;
        return;
    }
    const auto dim = static_cast<double>(cov.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        double lambda = 1e-9 * (cov.trace() / dim + 1.0);
        const auto eye = Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
        for (int attempt = 0; attempt < 200; ++attempt, lambda *= 2.0) {
            llt.compute(cov + lambda * eye);
            if (llt.info() == Eigen::Success) {
                jitter_ = lambda;
                break;
            }
        }
        if (llt.info() != Eigen::Success) {
            throw ComputeError("covariance could not be factorized");
        }
    }
    lower_ = llt.matrixL();
}

Eigen::VectorXd GaussianSampler::draw(std::mt19937_64& rng) const {
    if (degenerate_) {
        return mean_;
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z[i] = normal(rng);
    }
    return mean_ + lower_.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_omega_n(const GaussianParams& params, std::mt19937_64& rng) {
    return GaussianSampler(params).draw(rng);
}

Eigen::VectorXd omega_mu(const GaussianParams& params) { return params.mean; }

std::size_t nearest_state(std::span<const State> states, const State& query, double gamma) {
    if (states.empty()) {
        throw ComputeError("no observed states to match against");
    }
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double dist = squared_state_distance(states[i], query, gamma);
        if (dist < best_d || (dist == best_d && canonical_less(states[i], states[best]))) {
            best = i;
            best_d = dist;
        }
    }
    return best;
}

NodeStateStore::NodeStateStore(std::size_t width, std::size_t capacity) : width_(width), capacity_(capacity) {
    if (capacity == 0) {
        throw ConfigError("queue capacity must be >= 1");
    }
}

std::size_t NodeStateStore::observe(const State& state, std::span<const double> shock) {
    if (shock.size() != width_) {
        throw std::invalid_argument("observed shock has length " + std::to_string(shock.size()) + ", expected " +
                                    std::to_string(width_));
    }
    auto [it, inserted] = index_.try_emplace(state, states_.size());
    if (inserted) {
        states_.push_back(state);
        slots_.emplace_back(BoundedQueue(width_, capacity_));
    }
    auto& slot = slots_[it->second];
    slot.queue.push(shock);
    slot.mean_fresh = false;
    slot.params_fresh = false;
    slot.sampler_fresh = false;
    return it->second;
}

std::optional<std::size_t> NodeStateStore::find(const State& state) const {
    const auto it = index_.find(state);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t NodeStateStore::nearest(const State& query, double gamma) const {
    // With gamma = 0 a combined state ties with every phase of its sign pattern.
    const bool unique_zero = query.kind != StateKind::combined || gamma != 0.0;
    if (unique_zero) {
        if (auto hit = find(query)) {
            return *hit;
        }
    }
    return nearest_state(states_, query, gamma);
}

const Eigen::VectorXd& NodeStateStore::mean(std::size_t id) const {
    const auto& slot = slots_[id];
    if (!slot.mean_fresh) {
        slot.mean = queue_mean(slot.queue);
        slot.mean_fresh = true;
    }
    return slot.mean;
}

const GaussianParams& NodeStateStore::params(std::size_t id) const {
    const auto& slot = slots_[id];
    if (!slot.params_fresh) {
        slot.params.mean = mean(id);
        slot.params.covariance = queue_covariance(slot.queue, slot.params.mean);
        slot.params.sample_count = slot.queue.size();
        slot.params_fresh = true;
    }
    return slot.params;
}

double NodeStateStore::block_trace(std::size_t id, std::size_t offset, std::size_t len) const {
    return queue_block_trace(slots_[id].queue, mean(id), offset, len);
}

Eigen::VectorXd NodeStateStore::sample(std::size_t id, std::mt19937_64& rng) const {
    const auto& slot = slots_[id];
    if (!slot.sampler_fresh) {
        slot.sampler.emplace(params(id));
        slot.sampler_fresh = true;
    }
    return slot.sampler->draw(rng);
}

std::size_t NodeStateStore::stored_values() const {
    std::size_t total = 0;
    for (const auto& slot : slots_) {
        total += slot.queue.size() * width_;
        if (slot.mean_fresh) {
            total += width_;
        }
        if (slot.params_fresh) {
            total += width_ * width_;
        }
    }
    return total;
}

}  // namespace mspace
