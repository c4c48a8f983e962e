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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mspace/engine.hpp"
#include "mspace/graph.hpp"

namespace mspace {

/// On-disk description of a dataset; paths are relative to the manifest's directory.
struct DatasetManifest {
    std::string name;
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t T = 0;  // snapshots
    std::optional<double> timestep_seconds;
    std::filesystem::path edges;
    std::filesystem::path features;
    nlohmann::json provenance;
};

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);
nlohmann::json to_json(const DatasetManifest& manifest);

/// Loads edges (`src,dst[,weight]`) and features (`v{i}_f{j}` columns, one row per snapshot).
/// Errors name the file and the offending row/column.
TemporalGraphDataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes manifest.json, edges.csv and features.csv into `dir`; returns the manifest path.
std::filesystem::path save_dataset(const TemporalGraphDataset& dataset, const std::filesystem::path& dir,
                                   const std::string& name, const nlohmann::json& provenance = nullptr);

struct ResultRow {
    std::string dataset;
    std::string method;
    std::string variant;
    std::size_t q = 0;
    double rmse = 0.0;
    double mae = 0.0;
    double wall_time = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

inline constexpr std::string_view result_header = "dataset,method,variant,q,rmse,mae,wall_time,seed,config_hash";

// 16 hex digits of FNV-1a over the canonical configuration string.
std::string config_hash(std::string_view canonical);

std::string format_row(const ResultRow& row);

// Replaces `path` with a header and every row.
void write_results(const ResultTable& table, const std::filesystem::path& path);

/// Appends the rows in one write(2) on an O_APPEND descriptor, adding the header to a new file.
void append_results(const ResultTable& table, const std::filesystem::path& path);

// One line per (node, state): node,state,sample_count,trace
void write_state_stats(const MspaceModel& model, const std::filesystem::path& path);

// Formats a double with 17 significant digits.
std::string format_exact(double value);

}  // namespace mspace
