#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "network.hpp"
#include "perfect.hpp"

namespace hawkes {

inline std::string model_kind_name(ModelKind k) {
    return k == ModelKind::Saturation ? "saturation" : "cascade";
}

// CSV trajectory: `#`-prefixed metadata lines, then `time,neuron,decision`
inline void write_csv(const std::filesystem::path& path, const SpikeSample& s,
                      const std::string& config_hash) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "# seed=" << s.seed << "\n";
    out << "# model=" << model_kind_name(s.kind) << "\n";
    out << "# window=" << s.a << "," << s.b << "\n";
    out << "# config_hash=" << config_hash << "\n";
    out << "# clamp_events=" << s.clamp_events << "\n";
    out << "# tail_tolerance=" << s.tail_tolerance << "\n";
    out << "time,neuron,decision\n";
    out.precision(17);
    for (const auto& [site, d] : s.decisions)
        out << site.time << "," << site.key.neuron << "," << d << "\n";
}

// JSONL trajectory: one {"t":…, "i":…, "a":0|1} object per line
inline void write_jsonl(const std::filesystem::path& path,
                        const SpikeSample& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    for (const auto& [site, d] : s.decisions) {
        nlohmann::json j{{"t", site.time}, {"i", site.key.neuron}, {"a", d}};
        out << j.dump() << "\n";
    }
}

struct CsvRow {
    double time = 0.0;
    NeuronId neuron = 0;
    int decision = 0;
};

struct CsvTrajectory {
    std::map<std::string, std::string> metadata;
    std::vector<CsvRow> rows;
};

inline CsvTrajectory read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTrajectory t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                key.erase(0, key.find_first_not_of(' '));
                t.metadata[key] = line.substr(eq + 1);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "time,neuron,decision")
                throw std::runtime_error("bad CSV header in " + path.string());
            header_seen = true;
            continue;
        }
        CsvRow r;
        std::istringstream ss(line);
        char c1, c2;
        if (!(ss >> r.time >> c1 >> r.neuron >> c2 >> r.decision) ||
            c1 != ',' || c2 != ',')
            throw std::runtime_error("bad CSV row: " + line);
        t.rows.push_back(r);
    }
    return t;
}

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_hash;
    std::uint64_t seed = 0;
    nlohmann::json caps = nlohmann::json::object();
    nlohmann::json tolerances = nlohmann::json::object();
    std::string tool_version = "1.0.0";
    double wall_seconds = 0.0;
    nlohmann::json summary = nlohmann::json::object();

    nlohmann::json to_json() const {
        return {{"command", command},
                {"config_path", config_path},
                {"config_hash", config_hash},
                {"seed", seed},
                {"caps", caps},
                {"tolerances", tolerances},
                {"tool_version", tool_version},
                {"wall_seconds", wall_seconds},
                {"summary", summary}};
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.config_path = j.at("config_path").get<std::string>();
        m.config_hash = j.at("config_hash").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.caps = j.value("caps", nlohmann::json::object());
        m.tolerances = j.value("tolerances", nlohmann::json::object());
        m.tool_version = j.value("tool_version", "");
        m.wall_seconds = j.value("wall_seconds", 0.0);
        m.summary = j.value("summary", nlohmann::json::object());
        return m;
    }
};

inline void write_manifest(const std::filesystem::path& path,
                           const RunManifest& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << m.to_json().dump(2) << "\n";
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return RunManifest::from_json(j);
}

}  // namespace hawkes
