#pragma once

#include <random>

#include "hawkes/network.hpp"

namespace hawkes::testing {

inline RateFunction clipped_affine(double base, double slope) {
    RateFunction f;
    f.kind = RateFunction::Kind::ClippedAffine;
    f.params = {base, slope};
    f.lipschitz = std::abs(slope);
    return f;
}

inline LeakFunction exp_leak(double a) {
    LeakFunction g;
    g.kind = LeakFunction::Kind::Exponential;
    g.params = {a};
    return g;
}

inline LeakFunction power_leak(double offset, double exponent) {
    LeakFunction g;
    g.kind = LeakFunction::Kind::PowerLaw;
    g.params = {offset, exponent};
    return g;
}

// two neurons 0 -> 1, Lambda = 1, delta = 0.2, phi = clip(0.2 + 0.1 x, 0, 1)
inline Network e1_network(double w, double k) {
    NetworkConfig cfg;
    cfg.model_kind = ModelKind::Saturation;
    for (NeuronId id : {0, 1}) {
        NeuronSpec n;
        n.id = id;
        n.lambda = 1.0;
        n.delta = 0.2;
        n.phi = clipped_affine(0.2, 0.1);
        cfg.neurons.push_back(n);
    }
    cfg.edges.push_back({0, 1, w, k});
    return Network::build(cfg);
}

inline Network no_input_network(double base, double delta = 0.2) {
    NetworkConfig cfg;
    cfg.model_kind = ModelKind::Saturation;
    NeuronSpec n;
    n.id = 0;
    n.lambda = 1.0;
    n.delta = delta;
    n.phi = clipped_affine(base, 0.0);
    cfg.neurons.push_back(n);
    return Network::build(cfg);
}

// two-layer cascade 0 -> 1 with exponential leak
inline Network cascade_pair(double w, double lambda = 1.0, double leak_a = 2.0,
                            double base = 0.3, double slope = 0.1) {
    NetworkConfig cfg;
    cfg.model_kind = ModelKind::Cascade;
    for (NeuronId id : {0, 1}) {
        NeuronSpec n;
        n.id = id;
        n.lambda = lambda;
        n.phi = clipped_affine(base, slope);
        n.leak = exp_leak(leak_a);
        cfg.neurons.push_back(n);
        cfg.layers[id] = id;
    }
    if (w != 0.0) cfg.edges.push_back({0, 1, w, 1.0});
    return Network::build(cfg);
}

// random saturation network with <= max_neurons neurons and K <= 2
inline Network random_sat_network(std::mt19937_64& rng,
                                  std::size_t max_neurons = 4) {
    std::uniform_int_distribution<int> nd(1, static_cast<int>(max_neurons));
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    int n = nd(rng);
    NetworkConfig cfg;
    cfg.model_kind = ModelKind::Saturation;
    for (int id = 0; id < n; ++id) {
        NeuronSpec s;
        s.id = id;
        s.lambda = 0.5 + ud(rng);
        s.delta = 0.01 + 0.02 * ud(rng);
        // base high enough that inhibition cannot push psi below delta
        s.phi = clipped_affine(0.4 + 0.2 * ud(rng), 0.02 + 0.03 * ud(rng));
        cfg.neurons.push_back(s);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || ud(rng) < 0.4) continue;
            double w = (ud(rng) < 0.3 ? -1.0 : 1.0) * (0.2 + 0.8 * ud(rng));
            double k = ud(rng) < 0.5 ? 1.0 : 2.0;
            cfg.edges.push_back({i, j, w, k});
        }
    return Network::build(cfg);
}

}  // namespace hawkes::testing
