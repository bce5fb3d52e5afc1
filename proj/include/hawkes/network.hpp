#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hawkes {

using NeuronId = int;

enum class ModelKind { Saturation, Cascade };

// phi = psi / Lambda, a non-decreasing [0,1]-valued function with a declared
// Lipschitz constant (the condition checkers need gamma explicitly, so rate
// functions are a closed parametric family rather than arbitrary callables).
struct RateFunction {
    enum class Kind { ClippedAffine, PiecewiseLinear, LogisticScaled };
    Kind kind = Kind::ClippedAffine;
    // ClippedAffine: params = {base, slope}; phi(x) = clamp(base + slope x, 0, 1)
    // PiecewiseLinear: params = {x0, y0, x1, y1, ...}, constant outside the knots
    // LogisticScaled: params = {scale, rate, center}; phi = scale / (1 + e^{-rate (x-center)})
    std::vector<double> params;
    double lipschitz = 0.0;

    double operator()(double x) const {
        switch (kind) {
            case Kind::ClippedAffine:
                return std::clamp(params[0] + params[1] * x, 0.0, 1.0);
            case Kind::PiecewiseLinear: {
                const std::size_t n = params.size() / 2;
                if (x <= params[0]) return params[1];
                if (x >= params[2 * (n - 1)]) return params[2 * n - 1];
                for (std::size_t m = 1; m < n; ++m) {
                    if (x <= params[2 * m]) {
                        double x0 = params[2 * m - 2], y0 = params[2 * m - 1];
                        double x1 = params[2 * m], y1 = params[2 * m + 1];
                        return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
                    }
                }
                return params[2 * n - 1];
            }
            case Kind::LogisticScaled:
                return std::clamp(
                    params[0] / (1.0 + std::exp(-params[1] * (x - params[2]))),
                    0.0, 1.0);
        }
        return 0.0;
    }

    // tightest Lipschitz constant implied by the parameters
    double intrinsic_lipschitz() const {
        switch (kind) {
            case Kind::ClippedAffine:
                return std::abs(params[1]);
            case Kind::PiecewiseLinear: {
                double g = 0.0;
                for (std::size_t m = 1; m < params.size() / 2; ++m) {
                    double dx = params[2 * m] - params[2 * m - 2];
                    double dy = params[2 * m + 1] - params[2 * m - 1];
                    if (dx > 0) g = std::max(g, std::abs(dy / dx));
                }
                return g;
            }
            case Kind::LogisticScaled:
                return params[0] * params[1] / 4.0;
        }
        return 0.0;
    }
};

// Non-increasing integrable kernel for the cascade model.
struct LeakFunction {
    enum class Kind { Exponential, PowerLaw };
    Kind kind = Kind::Exponential;
    // Exponential: params = {a}; g(s) = e^{-a s}
    // PowerLaw: params = {offset, exponent}; g(s) = (offset + s)^{-exponent}
    std::vector<double> params;

    double operator()(double s) const {
        switch (kind) {
            case Kind::Exponential:
                return std::exp(-params[0] * s);
            case Kind::PowerLaw:
                return std::pow(params[0] + s, -params[1]);
        }
        return 0.0;
    }

    // integral of g over [a, b], closed form
    double integral(double a, double b) const {
        switch (kind) {
            case Kind::Exponential: {
                double r = params[0];
                return (std::exp(-r * a) - std::exp(-r * b)) / r;
            }
            case Kind::PowerLaw: {
                double c = params[0], p = params[1];
                if (p == 1.0) return std::log((c + b) / (c + a));
                return (std::pow(c + a, 1.0 - p) - std::pow(c + b, 1.0 - p)) /
                       (p - 1.0);
            }
        }
        return 0.0;
    }

    // integral over [a, infinity); +inf when not integrable
    double tail_integral(double a) const {
        switch (kind) {
            case Kind::Exponential:
                return std::exp(-params[0] * a) / params[0];
            case Kind::PowerLaw: {
                double c = params[0], p = params[1];
                if (p <= 1.0) return std::numeric_limits<double>::infinity();
                return std::pow(c + a, 1.0 - p) / (p - 1.0);
            }
        }
        return 0.0;
    }

    bool integrable() const {
        return kind == Kind::Exponential || params[1] > 1.0;
    }
};

struct NeuronSpec {
    NeuronId id = 0;
    double lambda = 1.0;  // bound on the firing rate psi
    double delta = 0.0;   // spontaneous rate floor (Saturation only)
    RateFunction phi;
    std::optional<LeakFunction> leak;  // Cascade only

    double d() const { return delta / lambda; }
    double psi(double x) const { return lambda * phi(x); }
};

struct EdgeSpec {
    NeuronId from = 0;
    NeuronId to = 0;
    double w = 0.0;
    double k = 1.0;  // saturation threshold (Saturation only)
};

struct Violation {
    std::string code;
    std::string detail;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<Violation> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}
    std::vector<Violation> violations;

private:
    static std::string join(const std::vector<Violation>& v) {
        std::string s = "invalid network:";
        for (const auto& x : v) s += " [" + x.code + "] " + x.detail + ";";
        return s;
    }
};

struct NetworkConfig {
    ModelKind model_kind = ModelKind::Saturation;
    std::vector<NeuronSpec> neurons;
    std::vector<EdgeSpec> edges;
    std::map<NeuronId, int> layers;
};

class Network {
public:
    ModelKind model_kind = ModelKind::Saturation;
    std::vector<NeuronSpec> neurons;
    std::map<NeuronId, int> layers;

    const NeuronSpec& neuron(NeuronId id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw std::out_of_range("unknown neuron id " + std::to_string(id));
        return neurons[it->second];
    }
    bool has_neuron(NeuronId id) const { return index_.count(id) > 0; }

    // presynaptic edges into i (edges with nonzero weight)
    const std::vector<EdgeSpec>& in_edges(NeuronId i) const {
        static const std::vector<EdgeSpec> empty;
        auto it = in_.find(i);
        return it == in_.end() ? empty : it->second;
    }
    const std::vector<EdgeSpec>& out_edges(NeuronId j) const {
        static const std::vector<EdgeSpec> empty;
        auto it = out_.find(j);
        return it == out_.end() ? empty : it->second;
    }
    const EdgeSpec* edge(NeuronId from, NeuronId to) const {
        for (const auto& e : in_edges(to))
            if (e.from == from) return &e;
        return nullptr;
    }

    // sum_j |W_{j->i}| K_{j->i}
    double weight_k_sum(NeuronId i) const {
        double s = 0.0;
        for (const auto& e : in_edges(i)) s += std::abs(e.w) * e.k;
        return s;
    }
    double weight_sum(NeuronId i) const {
        double s = 0.0;
        for (const auto& e : in_edges(i)) s += std::abs(e.w);
        return s;
    }

    // range of membrane sums reachable in the capped configuration space
    double min_reachable_sum(NeuronId i) const {
        double s = 0.0;
        for (const auto& e : in_edges(i))
            if (e.w < 0) s += e.w * cap(e);
        return s;
    }
    double max_reachable_sum(NeuronId i) const {
        double s = 0.0;
        for (const auto& e : in_edges(i))
            if (e.w > 0) s += e.w * cap(e);
        return s;
    }

    static Network build(NetworkConfig cfg) {
        std::vector<Violation> errs = validate(cfg);
        if (!errs.empty()) throw ConfigError(std::move(errs));
        Network n;
        n.model_kind = cfg.model_kind;
        n.neurons = std::move(cfg.neurons);
        n.layers = std::move(cfg.layers);
        for (std::size_t k = 0; k < n.neurons.size(); ++k)
            n.index_[n.neurons[k].id] = k;
        for (const auto& e : cfg.edges) {
            if (e.w == 0.0) continue;
            n.in_[e.to].push_back(e);
            n.out_[e.from].push_back(e);
        }
        return n;
    }

    static std::vector<Violation> validate(const NetworkConfig& cfg) {
        std::vector<Violation> errs;
        std::set<NeuronId> ids;
        for (const auto& nn : cfg.neurons) {
            if (!ids.insert(nn.id).second)
                errs.push_back({"DuplicateNeuron", std::to_string(nn.id)});
            if (nn.lambda <= 0)
                errs.push_back({"RateBoundViolation",
                                "Lambda <= 0 for neuron " + std::to_string(nn.id)});
            if (cfg.model_kind == ModelKind::Cascade && nn.leak &&
                !nn.leak->integrable())
                errs.push_back({"NonIntegrableLeak", std::to_string(nn.id)});
        }
        std::map<NeuronId, double> wk_sum, min_sum;
        for (const auto& e : cfg.edges) {
            if (!ids.count(e.from))
                errs.push_back({"MissingNeuron", std::to_string(e.from)});
            if (!ids.count(e.to))
                errs.push_back({"MissingNeuron", std::to_string(e.to)});
            if (e.from == e.to && e.w != 0.0)
                errs.push_back({"SelfLoopWeight", std::to_string(e.from)});
            if (e.w == 0.0) continue;
            double cap = cfg.model_kind == ModelKind::Saturation ? e.k : 1.0;
            if (cfg.model_kind == ModelKind::Saturation && e.k <= 0)
                errs.push_back({"NonSummableWeights",
                                "nonpositive threshold on " +
                                    std::to_string(e.from) + "->" +
                                    std::to_string(e.to)});
            if (!std::isfinite(e.w * cap))
                errs.push_back({"NonSummableWeights",
                                std::to_string(e.from) + "->" +
                                    std::to_string(e.to)});
            wk_sum[e.to] += std::abs(e.w) * cap;
            if (e.w < 0) min_sum[e.to] += e.w * cap;
            if (cfg.model_kind == ModelKind::Cascade) {
                auto lf = cfg.layers.find(e.from);
                auto lt = cfg.layers.find(e.to);
                if (lf == cfg.layers.end() || lt == cfg.layers.end() ||
                    lf->second != lt->second - 1)
                    errs.push_back({"LayerViolation",
                                    std::to_string(e.from) + "->" +
                                        std::to_string(e.to)});
            }
        }
        for (const auto& [i, s] : wk_sum)
            if (!std::isfinite(s))
                errs.push_back({"NonSummableWeights", std::to_string(i)});
        if (cfg.model_kind == ModelKind::Saturation) {
            for (const auto& nn : cfg.neurons) {
                if (nn.delta < 0 || nn.delta > nn.lambda) {
                    errs.push_back({"RateBoundViolation",
                                    "delta outside (0, Lambda] for neuron " +
                                        std::to_string(nn.id)});
                    continue;
                }
                // psi >= delta over the reachable range; phi is monotone so the
                // minimum sits at the most inhibitory corner
                double smin = min_sum.count(nn.id) ? min_sum[nn.id] : 0.0;
                if (nn.delta > 0 &&
                    nn.lambda * nn.phi(smin) < nn.delta - 1e-12)
                    errs.push_back({"RateBoundViolation",
                                    "delta > inf psi for neuron " +
                                        std::to_string(nn.id)});
            }
        }
        return errs;
    }

private:
    static double cap(const EdgeSpec& e) { return e.k; }
    std::unordered_map<NeuronId, std::size_t> index_;
    std::map<NeuronId, std::vector<EdgeSpec>> in_;
    std::map<NeuronId, std::vector<EdgeSpec>> out_;
};

inline double phi_eval(const NeuronSpec& n, double x) { return n.phi(x); }

// uniform Lipschitz constant gamma for phi across the network
inline double network_gamma(const Network& net) {
    double g = 0.0;
    for (const auto& n : net.neurons) g = std::max(g, n.phi.lipschitz);
    return g;
}

// Growing neighborhoods V_i(k): V(0) empty, V(1) = {i}, then presynaptic
// neurons joined one at a time by decreasing influence weight, ties broken by
// ascending id.
class GrowingNeighborhoods {
public:
    GrowingNeighborhoods() = default;

    explicit GrowingNeighborhoods(const Network& net) {
        for (const auto& nn : net.neurons) {
            std::vector<EdgeSpec> in = net.in_edges(nn.id);
            auto influence = [&](const EdgeSpec& e) {
                return net.model_kind == ModelKind::Saturation
                           ? std::abs(e.w) * e.k
                           : std::abs(e.w);
            };
            std::stable_sort(in.begin(), in.end(),
                             [&](const EdgeSpec& a, const EdgeSpec& b) {
                                 double ia = influence(a), ib = influence(b);
                                 if (ia != ib) return ia > ib;
                                 return a.from < b.from;
                             });
            std::vector<NeuronId> order;
            order.push_back(nn.id);
            for (const auto& e : in)
                if (e.from != nn.id) order.push_back(e.from);
            order_[nn.id] = std::move(order);
        }
    }

    // V_i(k); indices past saturation return the full set
    std::vector<NeuronId> level(NeuronId i, std::size_t k) const {
        const auto& ord = order_.at(i);
        std::size_t n = std::min(k, ord.size());
        return {ord.begin(), ord.begin() + n};
    }

    // dV_i(k-1) = V_i(k) \ V_i(k-1)
    std::vector<NeuronId> shell(NeuronId i, std::size_t k) const {
        const auto& ord = order_.at(i);
        if (k == 0 || k > ord.size()) return {};
        return {ord[k - 1]};
    }

    bool contains(NeuronId i, std::size_t k, NeuronId j) const {
        const auto& ord = order_.at(i);
        std::size_t n = std::min(k, ord.size());
        for (std::size_t m = 0; m < n; ++m)
            if (ord[m] == j) return true;
        return false;
    }

    // level at which V_i(k) = V_{.->i} u {i}
    std::size_t saturation_level(NeuronId i) const {
        return order_.at(i).size();
    }

private:
    std::map<NeuronId, std::vector<NeuronId>> order_;
};

inline GrowingNeighborhoods neighborhoods(const Network& net) {
    return GrowingNeighborhoods(net);
}

}  // namespace hawkes
