#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "network.hpp"
#include "perfect.hpp"
#include "stats.hpp"

namespace hawkes {

// spikes of an independent forward simulation on [t0, t1), after burn-in
struct ForwardResult {
    double t0 = 0.0, t1 = 0.0;
    std::map<NeuronId, std::vector<double>> spikes;
};

// Exact continuous-time simulation of the saturation model. Between spikes
// every intensity is constant in the finite edge-counter state
// (zeta_{j->i} capped at K_{j->i}), so the embedded chain is a plain
// Gillespie loop: exponential holding time at the total rate, then a spike
// drawn proportionally to the per-neuron rates. A spike of i resets i's
// in-edge counters and increments its out-edges.
inline ForwardResult gillespie_forward(const Network& net, double duration,
                                       double burn_in, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::map<std::pair<NeuronId, NeuronId>, double> zeta;
    for (const auto& n : net.neurons)
        for (const auto& e : net.in_edges(n.id)) zeta[{e.from, e.to}] = 0.0;
    auto rate = [&](const NeuronSpec& n) {
        double s = 0.0;
        for (const auto& e : net.in_edges(n.id))
            s += e.w * std::min(zeta[{e.from, e.to}], e.k);
        return n.psi(s);
    };
    ForwardResult out;
    out.t0 = burn_in;
    out.t1 = burn_in + duration;
    for (const auto& n : net.neurons) out.spikes[n.id] = {};
    double t = 0.0;
    while (t < out.t1) {
        std::vector<double> rates;
        double total = 0.0;
        for (const auto& n : net.neurons) {
            rates.push_back(rate(n));
            total += rates.back();
        }
        if (total <= 0.0) break;
        t += -std::log1p(-unif(rng)) / total;
        if (t >= out.t1) break;
        double u = unif(rng) * total;
        std::size_t pick = 0;
        while (pick + 1 < rates.size() && u >= rates[pick]) {
            u -= rates[pick];
            ++pick;
        }
        NeuronId i = net.neurons[pick].id;
        for (const auto& e : net.in_edges(i)) zeta[{e.from, e.to}] = 0.0;
        for (const auto& e : net.out_edges(i)) {
            auto& z = zeta[{e.from, e.to}];
            z = std::min(z + 1.0, e.k);
        }
        if (t >= out.t0) out.spikes[i].push_back(t);
    }
    return out;
}

// Ogata thinning for the cascade model: candidates at the dominating rate
// Lambda_i, accepted with phi_i of the leaky input since the last own spike.
// Leak sums are truncated at the given horizon.
inline ForwardResult ogata_forward(const Network& net, double duration,
                                   double burn_in, std::uint64_t seed,
                                   double horizon = 50.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::map<NeuronId, std::vector<double>> history;
    std::map<NeuronId, double> last;
    for (const auto& n : net.neurons) {
        history[n.id] = {};
        last[n.id] = -std::numeric_limits<double>::infinity();
    }
    auto accept_prob = [&](const NeuronSpec& n, double t) {
        double s = 0.0;
        for (const auto& e : net.in_edges(n.id)) {
            const auto& g = *net.neuron(e.from).leak;
            const auto& hist = history[e.from];
            for (auto it = hist.rbegin(); it != hist.rend(); ++it) {
                if (*it < last[n.id] || t - *it > horizon) break;
                s += e.w * g(t - *it);
            }
        }
        return n.phi(s);
    };
    double total = 0.0;
    for (const auto& n : net.neurons) total += n.lambda;
    ForwardResult out;
    out.t0 = burn_in;
    out.t1 = burn_in + duration;
    for (const auto& n : net.neurons) out.spikes[n.id] = {};
    double t = 0.0;
    while (total > 0.0) {
        t += -std::log1p(-unif(rng)) / total;
        if (t >= out.t1) break;
        double u = unif(rng) * total;
        std::size_t pick = 0;
        while (pick + 1 < net.neurons.size() && u >= net.neurons[pick].lambda) {
            u -= net.neurons[pick].lambda;
            ++pick;
        }
        const NeuronSpec& n = net.neurons[pick];
        if (unif(rng) < accept_prob(n, t)) {
            history[n.id].push_back(t);
            last[n.id] = t;
            if (t >= out.t0) out.spikes[n.id].push_back(t);
        }
    }
    return out;
}

inline ForwardResult forward_sample(const Network& net, double duration,
                                    double burn_in, std::uint64_t seed,
                                    double horizon = 50.0) {
    return net.model_kind == ModelKind::Saturation
               ? gillespie_forward(net, duration, burn_in, seed)
               : ogata_forward(net, duration, burn_in, seed, horizon);
}

// Distributional comparison of perfect windows against a long forward run:
// stationary rates in standard-error units and a two-sample KS test on
// inter-spike intervals collected within equal-length segments.
struct CompareReport {
    struct PerNeuron {
        NeuronId id = 0;
        double rate_perfect = 0.0;
        double rate_forward = 0.0;
        double z = 0.0;       // |rate gap| in combined SE units
        double ks_stat = 0.0;
        double ks_p = 1.0;    // 1.0 when either ISI sample is empty
        std::size_t isi_perfect = 0;
        std::size_t isi_forward = 0;
    };
    std::vector<PerNeuron> neurons;
    double worst_z = 0.0;
    double min_ks_p = 1.0;
};

inline CompareReport compare(const Network& net,
                             const std::vector<SpikeSample>& perfect_runs,
                             const ForwardResult& fwd) {
    CompareReport rep;
    if (perfect_runs.empty()) return rep;
    double win = perfect_runs.front().b - perfect_runs.front().a;
    for (const auto& n : net.neurons) {
        CompareReport::PerNeuron pn;
        pn.id = n.id;
        std::vector<double> counts;
        std::vector<double> isi_p;
        for (const auto& run : perfect_runs) {
            auto times = run.accepted_times(n.id);
            counts.push_back(static_cast<double>(times.size()));
            for (std::size_t m = 1; m < times.size(); ++m)
                isi_p.push_back(times[m] - times[m - 1]);
        }
        MeanSe c = mean_se(counts);
        pn.rate_perfect = win > 0 ? c.mean / win : 0.0;
        double se_p = win > 0 ? c.se / win : 0.0;
        const auto& ftimes = fwd.spikes.at(n.id);
        double span = fwd.t1 - fwd.t0;
        pn.rate_forward = span > 0 ? ftimes.size() / span : 0.0;
        double se_f = span > 0 ? std::sqrt(std::max(
                                     1.0, static_cast<double>(ftimes.size()))) /
                                     span
                               : 0.0;
        double se = std::sqrt(se_p * se_p + se_f * se_f);
        pn.z = se > 0 ? std::abs(pn.rate_perfect - pn.rate_forward) / se : 0.0;
        // forward ISIs restricted to segments of the perfect window length
        std::vector<double> isi_f;
        if (win > 0) {
            std::size_t pos = 0;
            for (double s0 = fwd.t0; s0 + win <= fwd.t1; s0 += win) {
                double prev = -1.0;
                while (pos < ftimes.size() && ftimes[pos] < s0 + win) {
                    if (ftimes[pos] >= s0) {
                        if (prev >= 0) isi_f.push_back(ftimes[pos] - prev);
                        prev = ftimes[pos];
                    }
                    ++pos;
                }
            }
        }
        pn.isi_perfect = isi_p.size();
        pn.isi_forward = isi_f.size();
        if (!isi_p.empty() && !isi_f.empty()) {
            KsResult ks = ks_two_sample(isi_p, isi_f);
            pn.ks_stat = ks.statistic;
            pn.ks_p = ks.p_value;
        }
        rep.worst_z = std::max(rep.worst_z, pn.z);
        rep.min_ks_p = std::min(rep.min_ks_p, pn.ks_p);
        rep.neurons.push_back(pn);
    }
    return rep;
}

}  // namespace hawkes
