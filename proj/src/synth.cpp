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

#include "mspace/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "mspace/error.hpp"

namespace mspace {

void SynthParams::validate() const {
    if (const auto* er = std::get_if<ErdosRenyi>(&graph)) {
        if (er->n < 1) {
            throw ConfigError("graph needs at least one node");
        }
        if (!(er->p >= 0.0 && er->p <= 1.0)) {
            throw ConfigError("edge probability must lie in [0, 1]");
        }
    } else {
        const auto& a = std::get<Adjacency>(graph);
        if (a.size() < 1) {
            throw ConfigError("graph needs at least one node");
        }
        try {
            a.validate();
        } catch (const DataError& e) {
            throw ConfigError(e.what());
        }
    }
    if (dim < 1) {
        throw ConfigError("feature dimension must be >= 1");
    }
    if (steps < 1) {
        throw ConfigError("T must be >= 1");
    }
    if (!(mean_min <= mean_max)) {
        throw ConfigError("mu_min must not exceed mu_max");
    }
    if (!(cov_min <= cov_max)) {
        throw ConfigError("sigma2_min must not exceed sigma2_max");
    }
    if (cov_min < 0.0 || initial_variance < 0.0 || seasonal_variance < 0.0) {
        throw ConfigError("variances must be non-negative");
    }
}

nlohmann::json to_json(const SynthParams& params) {
    nlohmann::json j;
    if (const auto* er = std::get_if<ErdosRenyi>(&params.graph)) {
        j["graph"] = {{"kind", "erdos_renyi"}, {"n", er->n}, {"p", er->p}};
    } else {
        j["graph"] = {{"kind", "explicit"}, {"n", std::get<Adjacency>(params.graph).size()}};
    }
    j["d"] = params.dim;
    j["T"] = params.steps;
    j["mu_min"] = params.mean_min;
    j["mu_max"] = params.mean_max;
    j["sigma2_min"] = params.cov_min;
    j["sigma2_max"] = params.cov_max;
    j["mu0"] = params.initial_mean;
    j["sigma0_sq"] = params.initial_variance;
    j["tau"] = params.period;
    j["mu_tau"] = params.seasonal_mean;
    j["sigma_tau_sq"] = params.seasonal_variance;
    j["seed"] = params.seed;
    j["conventions"] = {{"initial_shock_support", "{-1,+1}"},
                        {"covariance_mask", "(A+I) kron ones(d,d)"},
                        {"psd_repair", "eigenvalues clipped at 1e-9"}};
    return j;
}

Adjacency gen_er_graph(std::size_t n, double p, std::mt19937_64& rng) {
    Adjacency a(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (unit(rng) < p) {
                a.connect(u, v);
            }
        }
    }
    return a;
}

Eigen::MatrixXd masked_covariance(const Adjacency& adjacency, std::size_t dim, double cov_min, double cov_max,
                                  std::mt19937_64& rng) {
    const auto nd = static_cast<Eigen::Index>(adjacency.size() * dim);
    std::uniform_real_distribution<double> entry(cov_min, cov_max);
    Eigen::MatrixXd raw(nd, nd);
    for (Eigen::Index i = 0; i < nd; ++i) {
        for (Eigen::Index j = 0; j < nd; ++j) {
            raw(i, j) = entry(rng);
        }
    }
    Eigen::MatrixXd sym = 0.5 * (raw + raw.transpose());
    const auto d = static_cast<Eigen::Index>(dim);
    for (Eigen::Index i = 0; i < nd; ++i) {
        for (Eigen::Index j = 0; j < nd; ++j) {
            const auto u = static_cast<NodeId>(i / d);
            const auto w = static_cast<NodeId>(j / d);
            if (u != w && !adjacency.edge(u, w)) {
                sym(i, j) = 0.0;
            }
        }
    }
    return sym;
}

Eigen::MatrixXd repair_psd(const Eigen::MatrixXd& matrix, Eigen::MatrixXd* transform) {
    constexpr double floor = 1e-9;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix);
    if (eig.info() != Eigen::Success) {
        throw ComputeError("eigendecomposition failed during PSD repair");
    }
    const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(floor);
    const Eigen::MatrixXd& vectors = eig.eigenvectors();
    if (transform != nullptr) {
        *transform = vectors * values.cwiseSqrt().asDiagonal();
    }
    Eigen::MatrixXd out = vectors * values.asDiagonal() * vectors.transpose();
    return 0.5 * (out + out.transpose());
}

SynthOutput gen_synthetic_traced(const SynthParams& params) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    SynthOutput out;
    auto& adjacency = out.dataset.adjacency;
    if (const auto* er = std::get_if<ErdosRenyi>(&params.graph)) {
        adjacency = gen_er_graph(er->n, er->p, rng);
    } else {
        adjacency = std::get<Adjacency>(params.graph);
    }
    const std::size_t n = adjacency.size();
    const auto nd = static_cast<Eigen::Index>(n * params.dim);
    const auto to_matrix = [&](const Eigen::VectorXd& flat) {
        // Node-major flat vector -> n x d.
        Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(params.dim));
        for (Eigen::Index i = 0; i < nd; ++i) {
            m(i / m.cols(), i % m.cols()) = flat[i];
        }
        return m;
    };

    // Initial shock only seeds the first state; its entries are +-1.
    std::bernoulli_distribution coin(0.5);
    Eigen::VectorXd shock(nd);
    for (Eigen::Index i = 0; i < nd; ++i) {
        shock[i] = coin(rng) ? 1.0 : -1.0;
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(nd);
    const double sigma0 = std::sqrt(params.initial_variance);
    for (Eigen::Index i = 0; i < nd; ++i) {
        x[i] = params.initial_mean + sigma0 * normal(rng);
    }
    out.pre_seasonal.reserve(params.steps + 1);
    out.pre_seasonal.push_back(to_matrix(x));

    std::unordered_map<State, std::size_t, StateHash> seen;
    std::uniform_real_distribution<double> mean_entry(params.mean_min, params.mean_max);
    out.law_of_step.reserve(params.steps);
    Eigen::VectorXd z(nd);
    for (std::size_t t = 1; t <= params.steps; ++t) {
        State s = State::of(psi_s(shock));
        auto [it, inserted] = seen.try_emplace(s, out.laws.size());
        if (inserted) {
            SynthStateLaw law;
            law.state = s.sign;
            law.mean.resize(nd);
            for (Eigen::Index i = 0; i < nd; ++i) {
                law.mean[i] = params.mean_min == params.mean_max ? params.mean_min : mean_entry(rng);
            }
            law.masked_covariance = masked_covariance(adjacency, params.dim, params.cov_min, params.cov_max, rng);
            law.covariance = repair_psd(law.masked_covariance, &law.transform);
            out.laws.push_back(std::move(law));
        }
        const auto& law = out.laws[it->second];
        out.law_of_step.push_back(it->second);
        for (Eigen::Index i = 0; i < nd; ++i) {
            z[i] = normal(rng);
        }
        shock = law.mean + law.transform * z;
        x += shock;
        out.pre_seasonal.push_back(to_matrix(x));
    }

    out.dataset.features = out.pre_seasonal;
    if (params.period > 0) {
        const double sigma = std::sqrt(params.seasonal_variance);
        std::vector<Eigen::MatrixXd> season;
        season.reserve(params.period);
        for (std::size_t k = 0; k < params.period; ++k) {
            Eigen::VectorXd y(nd);
            for (Eigen::Index i = 0; i < nd; ++i) {
                y[i] = params.seasonal_mean + sigma * normal(rng);
            }
            season.push_back(to_matrix(y));
        }
        for (std::size_t t = 1; t <= params.steps; ++t) {
            out.dataset.features[t] += season[t % params.period];
        }
    }
    return out;
}

TemporalGraphDataset gen_synthetic(const SynthParams& params) { return gen_synthetic_traced(params).dataset; }

SynthPreset parse_preset(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "syn01") return SynthPreset::syn01;
    if (lower == "syn02") return SynthPreset::syn02;
    if (lower == "syn03") return SynthPreset::syn03;
    if (lower == "syn04") return SynthPreset::syn04;
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected syn01..syn04)");
}

std::string preset_name(SynthPreset preset) {
    switch (preset) {
        case SynthPreset::syn01: return "syn01";
        case SynthPreset::syn02: return "syn02";
        case SynthPreset::syn03: return "syn03";
        case SynthPreset::syn04: return "syn04";
    }
    return "unknown";
}

SynthParams preset_params(SynthPreset preset, std::uint64_t seed) {
    SynthParams p;
    p.seed = seed;
    p.dim = 1;
    switch (preset) {
        case SynthPreset::syn01:
        case SynthPreset::syn02:
            p.graph = ErdosRenyi{20, 0.2};
            p.steps = 1000;
            p.mean_min = -200.0;
            p.mean_max = 200.0;
            p.cov_min = 40.0;
            p.cov_max = 50.0;
            p.initial_mean = 2e4;
            p.initial_variance = 5000.0 * 5000.0;
            if (preset == SynthPreset::syn01) {
                p.period = 100;
                p.seasonal_mean = 100.0;
                p.seasonal_variance = 20.0 * 20.0;
            }
            break;
        case SynthPreset::syn03:
        case SynthPreset::syn04:
            p.graph = ErdosRenyi{40, 0.5};
            p.steps = preset == SynthPreset::syn03 ? 1000 : 10000;
            p.mean_min = -400.0;
            p.mean_max = 400.0;
            p.cov_min = 30.0;
            p.cov_max = 40.0;
            p.initial_mean = 1e4;
            p.initial_variance = 2000.0 * 2000.0;
            break;
    }
    return p;
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
    // splitmix64 over (seed, index)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<TemporalGraphDataset> gen_preset(SynthPreset preset, std::size_t instances, std::uint64_t seed) {
    std::vector<TemporalGraphDataset> out;
    out.reserve(instances);
    for (std::size_t i = 0; i < instances; ++i) {
        out.push_back(gen_synthetic(preset_params(preset, instance_seed(seed, i))));
    }
    return out;
}

}  // namespace mspace
