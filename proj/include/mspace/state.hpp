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
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace mspace {

/// Sign pattern over {-1, +1}, packed one bit per entry (bit set means -1).
class SignState {
 public:
    SignState() = default;

    static SignState from_shock(std::span<const double> shock);
    static SignState from_signs(std::span<const int> signs);

    std::size_t size() const { return size_; }
    int operator[](std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U ? -1 : 1; }

    std::size_t hamming(const SignState& other) const;
    std::size_t hash() const;

    // Lexicographic over entries with -1 ordered before +1.
    int compare(const SignState& other) const;

    bool operator==(const SignState&) const = default;

 private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

struct PhaseState {
    std::int64_t phase = 0;
    std::int64_t period = 1;

    bool operator==(const PhaseState&) const = default;
};

enum class StateKind : std::uint8_t { sign, phase, combined };

/// A discrete state: a sign pattern, a time phase, or both.
struct State {
    StateKind kind = StateKind::sign;
    SignState sign;
    PhaseState phase;

    static State of(SignState s) { return State{StateKind::sign, std::move(s), {}}; }
    static State of(PhaseState p) { return State{StateKind::phase, {}, p}; }
    static State of(SignState s, PhaseState p) { return State{StateKind::combined, std::move(s), p}; }

    bool operator==(const State&) const = default;

    // "+-+" for sign entries, ":k" for the phase.
    std::string encode() const;
};

struct StateHash {
    std::size_t operator()(const State& s) const;
};

SignState psi_s(std::span<const double> shock);
SignState psi_s(const Eigen::VectorXd& shock);
PhaseState psi_t(std::int64_t t, std::int64_t period);
State psi_st(std::span<const double> shock, std::int64_t t, std::int64_t period);

// Circular distance between two phases of the same period.
std::int64_t phase_gap(const PhaseState& a, const PhaseState& b);

/// Squared distance; throws std::invalid_argument on kind or width mismatch.
double squared_state_distance(const State& a, const State& b, double gamma);
double state_distance(const State& a, const State& b, double gamma);

// Canonical total order used for tie-breaking: sign part first, then phase.
bool canonical_less(const State& a, const State& b);

/// FIFO ring of fixed-width shock vectors holding at most `capacity` entries.
class BoundedQueue {
 public:
    BoundedQueue(std::size_t width, std::size_t capacity);

    void push(std::span<const double> value);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t width() const { return width_; }
    bool empty() const { return size_ == 0; }

    // Index 0 is the oldest entry.
    std::span<const double> operator[](std::size_t i) const;

 private:
    std::size_t width_;
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
    std::vector<double> buffer_;
};

struct GaussianParams {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    std::size_t sample_count = 0;
};

Eigen::VectorXd queue_mean(const BoundedQueue& queue);

// Unbiased covariance; zero for a single entry.
Eigen::MatrixXd queue_covariance(const BoundedQueue& queue, const Eigen::VectorXd& mean);

// Trace of the covariance block covering entries [offset, offset + len).
double queue_block_trace(const BoundedQueue& queue, const Eigen::VectorXd& mean, std::size_t offset,
                         std::size_t len);

GaussianParams estimate_params(const BoundedQueue& queue);

/// Draws from N(mean, covariance) through a Cholesky factor computed once.
/// Rank-deficient covariances receive the smallest doubling jitter that factorizes.
class GaussianSampler {
 public:
    explicit GaussianSampler(const GaussianParams& params);

    Eigen::VectorXd draw(std::mt19937_64& rng) const;
    double jitter() const { return jitter_; }
    bool degenerate() const { return degenerate_; }

 private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd lower_;
    double jitter_ = 0.0;
    bool degenerate_ = false;
};

Eigen::VectorXd sample_omega_n(const GaussianParams& params, std::mt19937_64& rng);
Eigen::VectorXd omega_mu(const GaussianParams& params);

/// Index of the state nearest to `query`; ties resolve to the canonically smallest.
std::size_t nearest_state(std::span<const State> states, const State& query, double gamma);

/// Observed states of one node with their queues and lazily refreshed parameters.
class NodeStateStore {
 public:
    NodeStateStore(std::size_t width, std::size_t capacity);

    // Records `shock` as a successor of `state`; returns the state's id.
    std::size_t observe(const State& state, std::span<const double> shock);

    std::size_t num_states() const { return states_.size(); }
    bool empty() const { return states_.empty(); }
    std::size_t width() const { return width_; }
    std::size_t capacity() const { return capacity_; }

    std::span<const State> states() const { return states_; }
    const State& state(std::size_t id) const { return states_[id]; }
    const BoundedQueue& queue(std::size_t id) const { return slots_[id].queue; }

    std::optional<std::size_t> find(const State& state) const;
    std::size_t nearest(const State& query, double gamma) const;

    const Eigen::VectorXd& mean(std::size_t id) const;
    const GaussianParams& params(std::size_t id) const;
    double block_trace(std::size_t id, std::size_t offset, std::size_t len) const;
    Eigen::VectorXd sample(std::size_t id, std::mt19937_64& rng) const;

    // Doubles held in queues plus cached parameters.
    std::size_t stored_values() const;

 private:
    struct Slot {
        explicit Slot(BoundedQueue q) : queue(std::move(q)) {}
        BoundedQueue queue;
        mutable bool mean_fresh = false;
        mutable bool params_fresh = false;
        mutable bool sampler_fresh = false;
        mutable Eigen::VectorXd mean;
        mutable GaussianParams params;
        mutable std::optional<GaussianSampler> sampler;
    };

    std::size_t width_;
    std::size_t capacity_;
    std::vector<State> states_;
    std::vector<Slot> slots_;
    std::unordered_map<State, std::size_t, StateHash> index_;
};

}  // namespace mspace
