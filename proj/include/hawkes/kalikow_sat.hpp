#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "network.hpp"

namespace hawkes {

class EnumerationBudgetExceeded : public std::runtime_error {
public:
    explicit EnumerationBudgetExceeded(std::size_t level)
        : std::runtime_error("enumeration budget exceeded at level " +
                             std::to_string(level)),
          level(level) {}
    std::size_t level;
};

struct RPair {
    double r1 = 0.0;
    double r0 = 0.0;
};

// Deterministic Kalikow decomposition for one saturation-model neuron:
// extrema over the capped configuration space, cumulative masses alpha(k),
// weights mu(k) and the interval-matched conditional laws p^[k].
//
// With residual = true the decomposition is built for
// phi~ = (phi - d)/(1 - d), whose mixture gives the acceptance law of
// non-spontaneous jumps directly and keeps every per-level probability in
// [0,1] ("strict" forward mode).
class SatDecomposition {
public:
    SatDecomposition(const Network& net, const GrowingNeighborhoods& nbhd,
                     NeuronId i, bool residual = false,
                     std::size_t budget = 1000000)
        : neuron_(net.neuron(i)), residual_(residual) {
        auto order = nbhd.level(i, nbhd.saturation_level(i));
        for (const auto& e : net.in_edges(i)) {
            auto it = std::find(order.begin(), order.end(), e.from);
            Edge edge;
            edge.from = e.from;
            edge.w = e.w;
            edge.cap = e.k;
            edge.enter_level = static_cast<std::size_t>(
                std::distance(order.begin(), it) + 1);
            edges_.push_back(edge);
        }
        max_level_ = order.size();
        build_tables(budget);
    }

    std::size_t max_level() const { return max_level_; }
    double alpha(std::size_t k) const {
        return alpha_[std::min(k, max_level_)];
    }
    double mu(std::size_t k) const {
        return k > max_level_ ? 0.0 : mu_[k];
    }
    const NeuronSpec& neuron() const { return neuron_; }

    // capped values an edge count can take
    static std::vector<double> cap_values(double cap) {
        std::vector<double> v;
        for (double c = 0.0; c < cap; c += 1.0) v.push_back(c);
        v.push_back(cap);
        return v;
    }

    // extrema of the spike/no-spike probabilities over configurations that
    // agree with zeta on V_i(k); zeta aligned with the in-edge list
    RPair r_values(std::size_t k, const std::vector<double>& zeta) const {
        double s = 0.0, pos = 0.0, neg = 0.0;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (edges_[e].enter_level <= k) {
                if (zeta[e] > edges_[e].cap)
                    throw std::out_of_range("edge count above threshold");
                s += edges_[e].w * std::min(zeta[e], edges_[e].cap);
            } else if (edges_[e].w > 0) {
                pos += edges_[e].w * edges_[e].cap;
            } else {
                neg += edges_[e].w * edges_[e].cap;
            }
        }
        return {phi(s + neg), 1.0 - phi(s + pos)};
    }

    // the thinning probability itself, full configuration
    double p_full(const std::vector<double>& zeta) const {
        double s = 0.0;
        for (std::size_t e = 0; e < edges_.size(); ++e)
            s += edges_[e].w * std::min(zeta[e], edges_[e].cap);
        return phi(s);
    }

    // interval-matched conditional law p^[k](a = 1 | zeta); degenerate levels
    // (mu(k) = 0, never sampled) report 0.5 and set the flag
    double p_k(std::size_t k, const std::vector<double>& zeta,
               bool* degenerate = nullptr) const {
        if (degenerate) *degenerate = false;
        if (k == 0) {
            if (mu_[0] <= 0.0) {
                if (degenerate) *degenerate = true;
                return 0.5;
            }
            return r_values(0, zeta).r1 / mu_[0];
        }
        if (k > max_level_ || mu_[k] <= 0.0) {
            if (degenerate) *degenerate = true;
            return 0.5;
        }
        // environment masses: Delta^[m](a|x) = r^[m](a|x) - r^[m-1](a|x)
        std::vector<double> env_alpha{mu_[0]};  // offset by the level-0 mass
        std::vector<double> env_p1;
        RPair prev = r_values(0, zeta);
        for (std::size_t m = 1; m <= k; ++m) {
            RPair cur = r_values(m, zeta);
            double d1 = cur.r1 - prev.r1, d0 = cur.r0 - prev.r0;
            double mt = d1 + d0;
            env_alpha.push_back(env_alpha.back() + mt);
            env_p1.push_back(mt > 0 ? d1 / mt : 0.5);
            prev = cur;
        }
        double lo = alpha_[k - 1], hi = alpha_[k];
        double acc = 0.0;
        for (std::size_t m = 1; m < env_alpha.size(); ++m) {
            double olo = std::max(lo, env_alpha[m - 1]);
            double ohi = std::min(hi, env_alpha[m]);
            if (ohi > olo) acc += (ohi - olo) * env_p1[m - 1];
        }
        return acc / mu_[k];
    }

    // | p(a|x) - sum_{k<=k_max} mu(k) p^[k](a|x) | - (1 - alpha(k_max))
    double verify_decomposition(const std::vector<double>& zeta,
                                std::size_t k_max) const {
        k_max = std::min(k_max, max_level_);
        double mix = 0.0;
        for (std::size_t k = 0; k <= k_max; ++k)
            if (mu(k) > 0) mix += mu(k) * p_k(k, zeta);
        return std::abs(p_full(zeta) - mix) - (1.0 - alpha(k_max));
    }

    // smallest k with alpha(k) >= u (inverse CDF of the level weights)
    std::size_t sample_level(double u) const {
        for (std::size_t k = 0; k <= max_level_; ++k)
            if (alpha_[k] >= u) return k;
        return max_level_;
    }

    // enumerate every joint capped configuration (test support)
    std::vector<std::vector<double>> enumerate_configurations(
        std::size_t budget = 1000000) const {
        std::vector<std::vector<double>> out{{}};
        for (const auto& e : edges_) {
            std::vector<std::vector<double>> next;
            for (const auto& base : out)
                for (double v : cap_values(e.cap)) {
                    if (next.size() > budget)
                        throw EnumerationBudgetExceeded(max_level_);
                    auto z = base;
                    z.push_back(v);
                    next.push_back(std::move(z));
                }
            out = std::move(next);
        }
        return out;
    }

    std::size_t edge_count() const { return edges_.size(); }
    NeuronId edge_source(std::size_t e) const { return edges_[e].from; }
    double edge_cap(std::size_t e) const { return edges_[e].cap; }

private:
    struct Edge {
        NeuronId from;
        double w;
        double cap;
        std::size_t enter_level;
    };

    double phi(double x) const {
        double v = neuron_.phi(x);
        if (!residual_) return v;
        double d = neuron_.d();
        if (d >= 1.0) return 0.0;
        return std::clamp((v - d) / (1.0 - d), 0.0, 1.0);
    }

    void build_tables(std::size_t budget) {
        alpha_.assign(max_level_ + 1, 0.0);
        mu_.assign(max_level_ + 1, 0.0);
        for (std::size_t k = 0; k <= max_level_; ++k) {
            // achievable fixed sums on V_i(k), deduplicated
            std::vector<double> sums{0.0};
            for (const auto& e : edges_) {
                if (e.enter_level > k) continue;
                std::vector<double> next;
                for (double s : sums)
                    for (double v : cap_values(e.cap)) {
                        if (next.size() > budget)
                            throw EnumerationBudgetExceeded(k);
                        next.push_back(s + e.w * v);
                    }
                std::sort(next.begin(), next.end());
                next.erase(std::unique(next.begin(), next.end()), next.end());
                sums = std::move(next);
            }
            double pos = 0.0, neg = 0.0;
            for (const auto& e : edges_) {
                if (e.enter_level <= k) continue;
                (e.w > 0 ? pos : neg) += e.w * e.cap;
            }
            double inf = 1.0;
            for (double s : sums)
                inf = std::min(inf, 1.0 - (phi(s + pos) - phi(s + neg)));
            alpha_[k] = inf;
            mu_[k] = k == 0 ? inf : inf - alpha_[k - 1];
        }
    }

    NeuronSpec neuron_;
    bool residual_;
    std::vector<Edge> edges_;
    std::size_t max_level_ = 0;
    std::vector<double> alpha_;
    std::vector<double> mu_;
};

}  // namespace hawkes
