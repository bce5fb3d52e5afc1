#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "network.hpp"

namespace hawkes {

// Structured JSON network description:
// {
//   "model_kind": "saturation" | "cascade",
//   "neurons": [{"id", "lambda", "delta"?, "phi": {"kind","params","lipschitz"},
//                "leak"?: {"kind","params"}}],
//   "edges": [{"from", "to", "w", "k"?}],
//   "layers"?: {"<id>": <int>},
//   "pattern"?: {"kind": "two_parent_lattice" | "power_law_lattice", ...}
// }
// Patterns expand to a finite truncation of the Z^2 layered lattice; the
// infinite-network closed forms live in the condition checker instead.

inline RateFunction parse_rate_function(const nlohmann::json& j) {
    RateFunction f;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "clipped_affine")
        f.kind = RateFunction::Kind::ClippedAffine;
    else if (kind == "piecewise_linear")
        f.kind = RateFunction::Kind::PiecewiseLinear;
    else if (kind == "logistic_scaled")
        f.kind = RateFunction::Kind::LogisticScaled;
    else
        throw ConfigError({{"BadRateFunction", kind}});
    f.params = j.at("params").get<std::vector<double>>();
    f.lipschitz = j.contains("lipschitz") ? j.at("lipschitz").get<double>()
                                          : f.intrinsic_lipschitz();
    return f;
}

inline LeakFunction parse_leak_function(const nlohmann::json& j) {
    LeakFunction g;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential")
        g.kind = LeakFunction::Kind::Exponential;
    else if (kind == "power_law")
        g.kind = LeakFunction::Kind::PowerLaw;
    else
        throw ConfigError({{"BadLeakFunction", kind}});
    g.params = j.at("params").get<std::vector<double>>();
    return g;
}

inline void expand_pattern(const nlohmann::json& p, NetworkConfig& cfg) {
    std::string kind = p.at("kind").get<std::string>();
    int radius = p.at("radius").get<int>();
    int n_layers = p.at("layers").get<int>();
    double lambda = p.at("lambda").get<double>();
    double w = p.at("w").get<double>();
    RateFunction phi = parse_rate_function(p.at("phi"));
    LeakFunction leak = parse_leak_function(p.at("leak"));
    double beta = p.contains("beta") ? p.at("beta").get<double>() : 0.0;

    auto id_of = [&](int site, int layer) {
        return (layer + n_layers) * (4 * radius + 1) + (site + 2 * radius);
    };
    for (int layer = 0; layer < n_layers; ++layer) {
        for (int site = -2 * radius; site <= 2 * radius; ++site) {
            NeuronSpec n;
            n.id = id_of(site, layer);
            n.lambda = lambda;
            n.phi = phi;
            n.leak = leak;
            cfg.neurons.push_back(n);
            cfg.layers[n.id] = layer;
        }
    }
    for (int layer = 1; layer < n_layers; ++layer) {
        for (int site = -2 * radius; site <= 2 * radius; ++site) {
            if (kind == "two_parent_lattice") {
                for (int d : {-1, 1}) {
                    int ps = site + d;
                    if (ps < -2 * radius || ps > 2 * radius) continue;
                    cfg.edges.push_back(
                        {id_of(ps, layer - 1), id_of(site, layer), w, 1.0});
                }
            } else if (kind == "power_law_lattice") {
                for (int ps = site - radius; ps <= site + radius; ++ps) {
                    if (ps == site || ps < -2 * radius || ps > 2 * radius)
                        continue;
                    double ww = w / std::pow(std::abs(ps - site), beta);
                    cfg.edges.push_back(
                        {id_of(ps, layer - 1), id_of(site, layer), ww, 1.0});
                }
            } else {
                throw ConfigError({{"BadPattern", kind}});
            }
        }
    }
}

inline NetworkConfig parse_network_config(const nlohmann::json& j) {
    NetworkConfig cfg;
    std::string kind = j.at("model_kind").get<std::string>();
    if (kind == "saturation")
        cfg.model_kind = ModelKind::Saturation;
    else if (kind == "cascade")
        cfg.model_kind = ModelKind::Cascade;
    else
        throw ConfigError({{"BadModelKind", kind}});

    for (const auto& nj : j.value("neurons", nlohmann::json::array())) {
        NeuronSpec n;
        n.id = nj.at("id").get<NeuronId>();
        n.lambda = nj.at("lambda").get<double>();
        n.delta = nj.value("delta", 0.0);
        n.phi = parse_rate_function(nj.at("phi"));
        if (nj.contains("leak")) n.leak = parse_leak_function(nj.at("leak"));
        cfg.neurons.push_back(n);
    }
    for (const auto& ej : j.value("edges", nlohmann::json::array())) {
        EdgeSpec e;
        e.from = ej.at("from").get<NeuronId>();
        e.to = ej.at("to").get<NeuronId>();
        e.w = ej.at("w").get<double>();
        e.k = ej.value("k", 1.0);
        cfg.edges.push_back(e);
    }
    if (j.contains("layers"))
        for (auto it = j.at("layers").begin(); it != j.at("layers").end(); ++it)
            cfg.layers[std::stoi(it.key())] = it.value().get<int>();
    if (j.contains("pattern")) expand_pattern(j.at("pattern"), cfg);
    return cfg;
}

inline Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{"FileNotFound", path}});
    nlohmann::json j;
    in >> j;
    return Network::build(parse_network_config(j));
}

// FNV-1a over the canonical serialization; recorded in manifests so that
// compare can refuse mismatched inputs.
inline std::uint64_t config_hash(const nlohmann::json& j) {
    std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace hawkes
