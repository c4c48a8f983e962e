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

#include "mspace/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "mspace/error.hpp"
#include "mspace/synth.hpp"

namespace mspace {

namespace {

void check_shapes(const ForecastRecord& r, const ShockSeries& truth, std::size_t q) {
    if (r.horizon() < q) {
        throw DataError("record at origin " + std::to_string(r.origin) + " has horizon " +
                        std::to_string(r.horizon()) + " < " + std::to_string(q));
    }
    if (r.origin + q > truth.size()) {
        throw DataError("no ground truth for origin " + std::to_string(r.origin) + " + " + std::to_string(q));
    }
    if (r.num_nodes != truth.num_nodes() || r.dim != truth.dim()) {
        throw DataError("record shape does not match ground truth");
    }
}

}  // namespace

ErrorReport error_report(const RunHistory& records, const ShockSeries& truth) {
    ErrorReport report;
    if (records.empty()) {
        return report;
    }
    std::size_t max_q = records.front().horizon();
    for (const auto& r : records) {
        max_q = std::min(max_q, r.horizon());
    }
    report.rmse_per_q.assign(max_q, 0.0);
    report.mae_per_q.assign(max_q, 0.0);
    report.mse_per_q.assign(max_q, 0.0);
    report.records = records.size();

    for (const auto& r : records) {
        check_shapes(r, truth, max_q);
        const auto n = r.num_nodes;
        const auto d = r.dim;
        const double nd = static_cast<double>(n * d);
        Eigen::RowVectorXd cumulative = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n * d));
        double squared = 0.0;
        double absolute = 0.0;
        for (std::size_t i = 0; i < max_q; ++i) {
            const auto& eps = truth.at_time(r.origin + i + 1);
            for (std::size_t v = 0; v < n; ++v) {
                for (std::size_t j = 0; j < d; ++j) {
                    const auto c = static_cast<Eigen::Index>(v * d + j);
                    cumulative[c] += eps(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j)) -
                                     r.shocks(static_cast<Eigen::Index>(i), c);
                }
            }
            squared += cumulative.squaredNorm();
            absolute += cumulative.cwiseAbs().sum();
            const double denom = nd * static_cast<double>(i + 1);
            report.mse_per_q[i] += squared / denom;
            report.rmse_per_q[i] += std::sqrt(squared / denom);
            report.mae_per_q[i] += absolute / denom;
        }
    }
    const double count = static_cast<double>(records.size());
    for (std::size_t i = 0; i < max_q; ++i) {
        report.rmse_per_q[i] /= count;
        report.mae_per_q[i] /= count;
        report.mse_per_q[i] /= count;
    }
    return report;
}

double rmse_q(const RunHistory& records, const ShockSeries& truth, std::size_t q) {
    const auto report = error_report(records, truth);
    if (q < 1 || q > report.rmse_per_q.size()) {
        throw DataError("horizon " + std::to_string(q) + " not available in records");
    }
    return report.rmse_per_q[q - 1];
}

double mae_q(const RunHistory& records, const ShockSeries& truth, std::size_t q) {
    const auto report = error_report(records, truth);
    if (q < 1 || q > report.mae_per_q.size()) {
        throw DataError("horizon " + std::to_string(q) + " not available in records");
    }
    return report.mae_per_q[q - 1];
}

bool BoundReport::upper_satisfied() const {
    return std::all_of(upper_ok.begin(), upper_ok.end(), [](bool b) { return b; });
}

bool BoundReport::lower_satisfied() const {
    return std::all_of(lower_ok.begin(), lower_ok.end(), [](bool b) { return b; });
}

double upper_envelope(double alpha, double beta, std::size_t q) {
    const auto x = static_cast<double>(q);
    return std::sqrt(alpha * x * x + (3.0 * alpha + beta) * x + beta);
}

namespace {

struct StepExtremes {
    std::vector<double> max_mean_error;  // alpha_{v,1}
    std::vector<double> max_trace;       // alpha_{v,2}
    std::vector<double> min_trace;       // alpha_{v,3}
    std::size_t nodes = 0;
    std::size_t dim = 0;
};

StepExtremes scan_steps(std::span<const RunHistory> runs, const ShockSeries& truth, std::size_t max_q) {
    StepExtremes ex;
    ex.nodes = truth.num_nodes();
    ex.dim = truth.dim();
    ex.max_mean_error.assign(ex.nodes, 0.0);
    ex.max_trace.assign(ex.nodes, 0.0);
    ex.min_trace.assign(ex.nodes, std::numeric_limits<double>::infinity());
    bool any = false;
    for (const auto& run : runs) {
        for (const auto& r : run) {
            check_shapes(r, truth, max_q);
            for (std::size_t k = 0; k < max_q; ++k) {
                const auto& eps = truth.at_time(r.origin + k + 1);
                const auto ki = static_cast<Eigen::Index>(k);
                for (std::size_t v = 0; v < ex.nodes; ++v) {
                    const auto vi = static_cast<Eigen::Index>(v);
                    double err = 0.0;
                    for (std::size_t j = 0; j < ex.dim; ++j) {
                        const double diff = r.matched_mean(ki, static_cast<Eigen::Index>(v * ex.dim + j)) -
                                            eps(vi, static_cast<Eigen::Index>(j));
                        err += diff * diff;
                    }
                    const double tr = r.matched_trace(ki, vi);
                    ex.max_mean_error[v] = std::max(ex.max_mean_error[v], err);
                    ex.max_trace[v] = std::max(ex.max_trace[v], tr);
                    ex.min_trace[v] = std::min(ex.min_trace[v], tr);
                    any = true;
                }
            }
        }
    }
    if (!any) {
        throw DataError("bound computation needs at least one forecast record");
    }
    return ex;
}

struct Empirical {
    std::vector<double> rmse;
    std::vector<double> mse;
    std::vector<double> rmse_stderr;
};

Empirical empirical_curves(std::span<const RunHistory> runs, const ShockSeries& truth, std::size_t max_q) {
    Empirical e;
    e.rmse.assign(max_q, 0.0);
    e.mse.assign(max_q, 0.0);
    e.rmse_stderr.assign(max_q, 0.0);
    std::vector<std::vector<double>> per_run;
    for (const auto& run : runs) {
        const auto rep = error_report(run, truth);
        if (rep.rmse_per_q.size() < max_q) {
            throw DataError("run history shorter than the requested horizon");
        }
        per_run.push_back(rep.rmse_per_q);
        for (std::size_t i = 0; i < max_q; ++i) {
            e.rmse[i] += rep.rmse_per_q[i];
            e.mse[i] += rep.mse_per_q[i];
        }
    }
    const double m = static_cast<double>(runs.size());
    for (std::size_t i = 0; i < max_q; ++i) {
        e.rmse[i] /= m;
        e.mse[i] /= m;
        if (runs.size() > 1) {
            double ss = 0.0;
            for (const auto& r : per_run) {
                ss += (r[i] - e.rmse[i]) * (r[i] - e.rmse[i]);
            }
            e.rmse_stderr[i] = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
        }
    }
    return e;
}

}  // namespace

BoundReport upper_envelope_report(std::span<const RunHistory> runs, const ShockSeries& truth,
                                  std::size_t max_q, Sampler sampler) {
    if (runs.empty()) {
        throw DataError("bound computation needs run history");
    }
    const auto ex = scan_steps(runs, truth, max_q);
    const double nd = static_cast<double>(ex.nodes * ex.dim);
    BoundReport report;
    double a1 = 0.0;
    double a2 = 0.0;
    for (std::size_t v = 0; v < ex.nodes; ++v) {
        a1 += ex.max_mean_error[v];
        a2 += ex.max_trace[v];
    }
    report.alpha = a1 / (6.0 * nd);
    report.beta = sampler == Sampler::gaussian ? a2 / (2.0 * nd) : 0.0;

    const auto emp = empirical_curves(runs, truth, max_q);
    report.empirical_rmse = emp.rmse;
    report.empirical_mse = emp.mse;
    for (std::size_t q = 1; q <= max_q; ++q) {
        const double bound = upper_envelope(report.alpha, report.beta, q);
        report.upper.push_back(bound);
        const double observed =
            sampler == Sampler::gaussian ? emp.rmse[q - 1] - 3.0 * emp.rmse_stderr[q - 1] : emp.rmse[q - 1];
        report.upper_ok.push_back(observed <= bound * (1.0 + 1e-12));
    }
    return report;
}

void lower_bound(std::span<const RunHistory> runs, const ShockSeries& truth, std::size_t max_q, Sampler sampler,
                 double slack, BoundReport& report) {
    if (runs.empty()) {
        throw DataError("bound computation needs run history");
    }
    const auto ex = scan_steps(runs, truth, max_q);
    const double nd = static_cast<double>(ex.nodes * ex.dim);
    double a3 = 0.0;
    for (std::size_t v = 0; v < ex.nodes; ++v) {
        a3 += ex.min_trace[v];
    }
    report.beta_prime = a3 / nd;
    report.lower_trivial = sampler == Sampler::mean;
    if (report.empirical_mse.size() < max_q) {
        report.empirical_mse = empirical_curves(runs, truth, max_q).mse;
    }
    report.lower.clear();
    report.lower_ok.clear();
    for (std::size_t q = 1; q <= max_q; ++q) {
        const double bound = report.beta_prime * (static_cast<double>(q) + 1.0);
        report.lower.push_back(bound);
        report.lower_ok.push_back(report.lower_trivial || report.empirical_mse[q - 1] >= slack * bound);
    }
}

BoundReport bound_report(std::span<const RunHistory> runs, const ShockSeries& truth, std::size_t max_q,
                         Sampler sampler, double lower_slack) {
    BoundReport report = upper_envelope_report(runs, truth, max_q, sampler);
    lower_bound(runs, truth, max_q, sampler, lower_slack, report);
    return report;
}

namespace {

Adjacency ring(std::size_t n) {
    Adjacency a(n);
    if (n >= 3) {
        for (NodeId v = 0; v < n; ++v) {
            a.connect(v, (v + 1) % n);
        }
    } else if (n == 2) {
        a.connect(0, 1);
    }
    return a;
}

}  // namespace

ProbeReport complexity_probe(std::span<const std::size_t> nodes, std::span<const std::size_t> steps,
                             const RunConfig& config, std::uint64_t seed, std::size_t repeats) {
    ProbeReport report;
    repeats = std::max<std::size_t>(1, repeats);
    for (const auto n : nodes) {
        for (const auto T : steps) {
            SynthParams params;
            params.graph = ring(n);
            params.steps = T;
            params.seed = instance_seed(seed, n * 1000003ULL + T);
            const auto dataset = gen_synthetic(params);
            ProbeCell cell;
            cell.nodes = n;
            cell.steps = T;
            cell.seconds = std::numeric_limits<double>::infinity();
            for (std::size_t rep = 0; rep < repeats; ++rep) {
                const auto start = std::chrono::steady_clock::now();
                const auto result = online_run(dataset, config);
                const auto stop = std::chrono::steady_clock::now();
                cell.seconds = std::min(cell.seconds, std::chrono::duration<double>(stop - start).count());
                cell.stored_values = result.model.stored_values();
                cell.states = result.model.total_states();
            }
            report.cells.push_back(cell);
        }
    }
    const auto find = [&](std::size_t n, std::size_t T) -> const ProbeCell& {
        for (const auto& c : report.cells) {
            if (c.nodes == n && c.steps == T) {
                return c;
            }
        }
        throw ComputeError("probe cell missing");
    };
    std::vector<std::size_t> ns(nodes.begin(), nodes.end());
    std::vector<std::size_t> ts(steps.begin(), steps.end());
    std::sort(ns.begin(), ns.end());
    std::sort(ts.begin(), ts.end());
    for (const auto T : ts) {
        for (std::size_t i = 1; i < ns.size(); ++i) {
            const auto& a = find(ns[i - 1], T);
            const auto& b = find(ns[i], T);
            report.ratios.push_back({'n', T, ns[i - 1], ns[i], b.seconds / a.seconds,
                                     static_cast<double>(b.stored_values) / static_cast<double>(a.stored_values)});
        }
    }
    for (const auto n : ns) {
        for (std::size_t i = 1; i < ts.size(); ++i) {
            const auto& a = find(n, ts[i - 1]);
            const auto& b = find(n, ts[i]);
            report.ratios.push_back({'T', n, ts[i - 1], ts[i], b.seconds / a.seconds,
                                     static_cast<double>(b.stored_values) / static_cast<double>(a.stored_values)});
        }
    }
    return report;
}

}  // namespace mspace
