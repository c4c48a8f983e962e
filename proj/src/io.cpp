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

#include "mspace/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mspace/error.hpp"

namespace fs = std::filesystem;

namespace mspace {

namespace {

std::string location(const fs::path& file, std::size_t line, std::size_t column) {
    return file.filename().string() + ": line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
            cell.remove_suffix(1);
        }
        cells.push_back(cell);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

double parse_double(std::string_view cell, const fs::path& file, std::size_t line, std::size_t column) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError(location(file, line, column) + ": non-numeric cell '" + std::string(cell) + "'");
    }
    if (!std::isfinite(value)) {
        throw DataError(location(file, line, column) + ": non-finite value '" + std::string(cell) + "'");
    }
    return value;
}

std::size_t parse_node(std::string_view cell, const fs::path& file, std::size_t line, std::size_t column,
                       std::size_t n) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError(location(file, line, column) + ": invalid node id '" + std::string(cell) + "'");
    }
    if (value >= n) {
        throw DataError(location(file, line, column) + ": dangling node id " + std::to_string(value) +
                        " (n = " + std::to_string(n) + ")");
    }
    return value;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return in;
}

std::string feature_column(std::size_t v, std::size_t j) {
    return "v" + std::to_string(v) + "_f" + std::to_string(j);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ComputeError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw ComputeError("write failed for " + path.string());
    }
}

}  // namespace

std::string format_exact(double value) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

DatasetManifest read_manifest(const fs::path& manifest_path) {
    std::ifstream in = open_input(manifest_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest_path.filename().string() + ": invalid JSON: " + e.what());
    }
    DatasetManifest m;
    const auto base = manifest_path.parent_path();
    try {
        m.name = j.at("name").get<std::string>();
        m.n = j.at("n").get<std::size_t>();
        m.d = j.at("d").get<std::size_t>();
        m.T = j.at("T").get<std::size_t>();
        if (j.contains("timestep_seconds") && !j["timestep_seconds"].is_null()) {
            m.timestep_seconds = j["timestep_seconds"].get<double>();
        }
        m.edges = base / j.at("edges").get<std::string>();
        m.features = base / j.at("features").get<std::string>();
        if (j.contains("provenance")) {
            m.provenance = j["provenance"];
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest_path.filename().string() + ": " + e.what());
    }
    if (m.n == 0 || m.d == 0) {
        throw DataError(manifest_path.filename().string() + ": n and d must be positive");
    }
    if (m.timestep_seconds && !(*m.timestep_seconds > 0.0)) {
        throw DataError(manifest_path.filename().string() + ": timestep_seconds must be positive");
    }
    return m;
}

nlohmann::json to_json(const DatasetManifest& m) {
    nlohmann::json j;
    j["name"] = m.name;
    j["n"] = m.n;
    j["d"] = m.d;
    j["T"] = m.T;
    if (m.timestep_seconds) {
        j["timestep_seconds"] = *m.timestep_seconds;
    }
    j["edges"] = m.edges.generic_string();
    j["features"] = m.features.generic_string();
    if (!m.provenance.is_null()) {
        j["provenance"] = m.provenance;
    }
    return j;
}

TemporalGraphDataset load_dataset(const fs::path& manifest_path) {
    const DatasetManifest m = read_manifest(manifest_path);
    TemporalGraphDataset ds;
    ds.timestep_seconds = m.timestep_seconds;
    ds.adjacency = Adjacency(m.n);

    {
        std::ifstream in = open_input(m.edges);
        std::string line;
        std::size_t line_no = 0;
        if (!std::getline(in, line)) {
            throw DataError(m.edges.filename().string() + ": missing header");
        }
        ++line_no;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") {
                continue;
            }
            const auto cells = split(line);
            if (cells.size() < 2 || cells.size() > 3) {
                throw DataError(location(m.edges, line_no, 1) + ": expected src,dst[,weight]");
            }
            const auto u = parse_node(cells[0], m.edges, line_no, 1, m.n);
            const auto v = parse_node(cells[1], m.edges, line_no, 2, m.n);
            double weight = 1.0;
            if (cells.size() == 3) {
                weight = parse_double(cells[2], m.edges, line_no, 3);
            }
            // Weights are binarized; self-relations are implicit.
            if (weight != 0.0 && u != v) {
                ds.adjacency.connect(u, v);
            }
        }
    }

    {
        std::ifstream in = open_input(m.features);
        std::string line;
        if (!std::getline(in, line)) {
            throw DataError(m.features.filename().string() + ": missing header");
        }
        const auto header = split(line);
        const std::size_t columns = m.n * m.d;
        if (header.size() != columns) {
            throw DataError(location(m.features, 1, header.size()) + ": header has " +
                            std::to_string(header.size()) + " columns, expected " + std::to_string(columns));
        }
        for (std::size_t v = 0; v < m.n; ++v) {
            for (std::size_t j = 0; j < m.d; ++j) {
                const auto c = v * m.d + j;
                if (header[c] != feature_column(v, j)) {
                    throw DataError(location(m.features, 1, c + 1) + ": expected column '" + feature_column(v, j) +
                                    "', found '" + std::string(header[c]) + "'");
                }
            }
        }
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") {
                continue;
            }
            const auto cells = split(line);
            if (cells.size() != columns) {
                throw DataError(location(m.features, line_no, cells.size()) + ": row has " +
                                std::to_string(cells.size()) + " cells, expected " + std::to_string(columns));
            }
            Eigen::MatrixXd x(static_cast<Eigen::Index>(m.n), static_cast<Eigen::Index>(m.d));
            for (std::size_t c = 0; c < columns; ++c) {
                x(static_cast<Eigen::Index>(c / m.d), static_cast<Eigen::Index>(c % m.d)) =
                    parse_double(cells[c], m.features, line_no, c + 1);
            }
            ds.features.push_back(std::move(x));
        }
        if (ds.features.size() != m.T) {
            throw DataError(m.features.filename().string() + ": expected T = " + std::to_string(m.T) +
                            " rows, found " + std::to_string(ds.features.size()));
        }
    }
    ds.validate();
    return ds;
}

fs::path save_dataset(const TemporalGraphDataset& dataset, const fs::path& dir, const std::string& name,
                      const nlohmann::json& provenance) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ComputeError("cannot create " + dir.string() + ": " + ec.message());
    }
    const std::size_t n = dataset.num_nodes();
    const std::size_t d = dataset.dim();

    std::string edges = "src,dst\n";
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (dataset.adjacency.edge(u, v)) {
                edges += std::to_string(u) + "," + std::to_string(v) + "\n";
            }
        }
    }
    write_text(dir / "edges.csv", edges);

    std::string features;
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t j = 0; j < d; ++j) {
            features += (v + j == 0 ? "" : ",") + feature_column(v, j);
        }
    }
    features += "\n";
    for (const auto& x : dataset.features) {
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t j = 0; j < d; ++j) {
                if (v + j != 0) {
                    features += ",";
                }
                features += format_exact(x(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(j)));
            }
        }
        features += "\n";
    }
    write_text(dir / "features.csv", features);

    DatasetManifest m;
    m.name = name;
    m.n = n;
    m.d = d;
    m.T = dataset.num_snapshots();
    m.timestep_seconds = dataset.timestep_seconds;
    m.edges = "edges.csv";
    m.features = "features.csv";
    m.provenance = provenance;
    const fs::path manifest = dir / "manifest.json";
    write_text(manifest, to_json(m).dump(2) + "\n");
    return manifest;
}

std::string config_hash(std::string_view canonical) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_row(const ResultRow& row) {
    char num[96];
    std::string out = row.dataset + "," + row.method + "," + row.variant + "," + std::to_string(row.q) + ",";
    std::snprintf(num, sizeof num, "%.10g,%.10g,%.6f,", row.rmse, row.mae, row.wall_time);
    out += num;
    out += std::to_string(row.seed) + "," + row.config_hash;
    return out;
}

void write_results(const ResultTable& table, const fs::path& path) {
    std::string text(result_header);
    text += "\n";
    for (const auto& row : table.rows) {
        text += format_row(row) + "\n";
    }
    write_text(path, text);
}

void append_results(const ResultTable& table, const fs::path& path) {
    std::string body;
    for (const auto& row : table.rows) {
        body += format_row(row) + "\n";
    }
    // The process that creates the file owns the header.
    int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd >= 0) {
        body = std::string(result_header) + "\n" + body;
    } else if (errno == EEXIST) {
        fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
    }
    if (fd < 0) {
        throw ComputeError("cannot open " + path.string() + ": " + std::strerror(errno));
    }
    const char* data = body.data();
    std::size_t left = body.size();
    while (left > 0) {
        const auto written = ::write(fd, data, left);
        if (written < 0) {
            if (errno == EINTR) {
                continue;
            }
            const int err = errno;
            ::close(fd);
            throw ComputeError("append to " + path.string() + " failed: " + std::strerror(err));
        }
        data += written;
        left -= static_cast<std::size_t>(written);
    }
    if (::close(fd) != 0) {
        throw ComputeError("close of " + path.string() + " failed: " + std::strerror(errno));
    }
}

void write_state_stats(const MspaceModel& model, const fs::path& path) {
    std::string text = "node,state,sample_count,trace\n";
    for (NodeId v = 0; v < model.num_nodes(); ++v) {
        const auto& store = model.store(v);
        for (std::size_t id = 0; id < store.num_states(); ++id) {
            const auto& q = store.queue(id);
            const double trace = queue_block_trace(q, store.mean(id), 0, store.width());
            text += std::to_string(v) + "," + store.state(id).encode() + "," + std::to_string(q.size()) + "," +
                    format_exact(trace) + "\n";
        }
    }
    write_text(path, text);
}

}  // namespace mspace
