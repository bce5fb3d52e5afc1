#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kalikow_sat.hpp"  // EnumerationBudgetExceeded, RPair
#include "network.hpp"
#include "prm.hpp"

namespace hawkes {

class HorizonTooShort : public std::runtime_error {
public:
    explicit HorizonTooShort(double e_tail)
        : std::runtime_error("tail error bound " + std::to_string(e_tail) +
                             " above tolerance") {}
};

// gamma * sum_j |W_{j->i}| Lambda_j int_H^inf g_j: the declared exactness gap
// introduced by truncating the environment at back horizon H
inline double cascade_tail_error(const Network& net, NeuronId i, double h,
                                 double gamma) {
    double e = 0.0;
    for (const auto& edge : net.in_edges(i)) {
        const auto& g = *net.neuron(edge.from).leak;
        e += std::abs(edge.w) * net.neuron(edge.from).lambda *
             g.tail_integral(h);
    }
    return gamma * e;
}

// smallest horizon (in whole windows) keeping every neuron's tail error below
// eps_num
inline double choose_horizon(const Network& net, double eps_num = 1e-9) {
    double gamma = 0.0;
    for (const auto& n : net.neurons) gamma = std::max(gamma, n.phi.lipschitz);
    double h = 1.0;
    auto worst = [&](double hh) {
        double w = 0.0;
        for (const auto& n : net.neurons)
            w = std::max(w, cascade_tail_error(net, n.id, hh, gamma));
        return w;
    };
    while (worst(h) > eps_num && h < 1e6) h += 1.0;
    return h;
}

// Random-environment Kalikow decomposition at one grid site (i, t) of the
// cascade model. Space-time neighbourhoods V_t^i(k) = V_i(k) x [t-k, t);
// weights mu(k) are functions of the realized PRM within the back horizon.
class CascadeDecomposition {
public:
    struct RelJump {
        SiteKey key;
        double time = 0.0;
        NeuronId neuron = 0;
        double w = 0.0;                   // 0 for the site's own neuron
        const LeakFunction* leak = nullptr;
        std::size_t enter_level = 1;      // level at which the neuron joins V_i
        bool own = false;
    };

    CascadeDecomposition(const Network& net, const GrowingNeighborhoods& nbhd,
                         const PrmRealization& prm, NeuronId i, double t,
                         double horizon, std::size_t budget = 1 << 20)
        : net_(&net),
          neuron_(net.neuron(i)),
          site_time_(t),
          horizon_(horizon),
          budget_(budget) {
        gamma_ = neuron_.phi.lipschitz;
        e_tail_ = cascade_tail_error(net, i, horizon, network_gamma(net));
        auto order = nbhd.level(i, nbhd.saturation_level(i));
        for (auto s : prm.jumps_in(i, t - horizon, t)) {
            RelJump r;
            r.key = s.key;
            r.time = s.time;
            r.neuron = i;
            r.own = true;
            jumps_.push_back(r);
        }
        for (const auto& e : net.in_edges(i)) {
            auto it = std::find(order.begin(), order.end(), e.from);
            std::size_t lvl =
                static_cast<std::size_t>(std::distance(order.begin(), it) + 1);
            for (auto s : prm.jumps_in(e.from, t - horizon, t)) {
                RelJump r;
                r.key = s.key;
                r.time = s.time;
                r.neuron = e.from;
                r.w = e.w;
                r.leak = &*net.neuron(e.from).leak;
                r.enter_level = lvl;
                jumps_.push_back(r);
            }
        }
        std::sort(jumps_.begin(), jumps_.end(),
                  [](const RelJump& a, const RelJump& b) {
                      return a.time < b.time;
                  });
        // alpha saturates once V_t^i(k) swallows every jump in the horizon
        std::size_t sat = order.size();
        full_level_ = std::max<std::size_t>(
            sat, static_cast<std::size_t>(std::ceil(horizon)));
        alpha_.push_back(level_alpha(0));
    }

    double site_time() const { return site_time_; }
    double tail_error() const { return e_tail_; }
    double horizon() const { return horizon_; }
    const std::vector<RelJump>& jumps() const { return jumps_; }
    std::size_t full_level() const { return full_level_; }

    bool inside(const RelJump& j, std::size_t k) const {
        if (j.time < site_time_ - static_cast<double>(k)) return false;
        return j.own ? k >= 1 : j.enter_level <= k;
    }

    double alpha(std::size_t k) {
        ensure_level(std::min(k, full_level_));
        return alpha_[std::min(k, full_level_)];
    }
    double mu(std::size_t k) {
        if (k > full_level_) return 0.0;
        ensure_level(k);
        return k == 0 ? alpha_[0] : alpha_[k] - alpha_[k - 1];
    }

    std::size_t sample_level(double u) {
        for (std::size_t k = 0; k <= full_level_; ++k)
            if (alpha(k) >= u) return k;
        return full_level_;
    }

    // Extrema of the thinning probability over configurations agreeing with x
    // on V_t^i(k). x is aligned with jumps(); only entries inside the
    // neighbourhood are read. Free sites and the unknown last spike of i are
    // driven to their corner choices.
    RPair r_values(std::size_t k, const std::vector<signed char>& x) const {
        double t = site_time_;
        // last accepted own spike inside the window, if any
        double fixed_l = -std::numeric_limits<double>::infinity();
        bool l_fixed = false;
        for (const auto& j : jumps_)
            if (j.own && inside(j, k) && x[index_of(j)] > 0) {
                fixed_l = std::max(fixed_l, j.time);
                l_fixed = true;
            }
        std::vector<double> candidates;
        if (l_fixed) {
            candidates.push_back(fixed_l);
        } else {
            candidates.push_back(-std::numeric_limits<double>::infinity());
            for (const auto& j : jumps_)
                if (j.own && !inside(j, k)) candidates.push_back(j.time);
        }
        double smin = std::numeric_limits<double>::infinity();
        double smax = -std::numeric_limits<double>::infinity();
        for (double l : candidates) {
            double fixed = 0.0, pos = 0.0, neg = 0.0;
            for (const auto& j : jumps_) {
                if (j.own || j.time < l) continue;
                double contrib = j.w * (*j.leak)(t - j.time);
                if (inside(j, k)) {
                    if (x[index_of(j)] > 0) fixed += contrib;
                } else if (contrib > 0) {
                    pos += contrib;
                } else {
                    neg += contrib;
                }
            }
            smin = std::min(smin, fixed + neg);
            smax = std::max(smax, fixed + pos);
        }
        return {neuron_.phi(smin), 1.0 - neuron_.phi(smax)};
    }

    double p_full(const std::vector<signed char>& x) const {
        // thinning probability when every decision within the horizon is known
        return r_values(full_level_, x).r1;
    }

    // interval-matched conditional law, same offset convention as the
    // saturation decomposition
    double p_k(std::size_t k, const std::vector<signed char>& x,
               bool* degenerate = nullptr) {
        if (degenerate) *degenerate = false;
        double mu0 = mu(0);
        if (k == 0) {
            if (mu0 <= 0.0) {
                if (degenerate) *degenerate = true;
                return 0.5;
            }
            return r_values(0, x).r1 / mu0;
        }
        double muk = mu(k);
        if (muk <= 0.0) {
            if (degenerate) *degenerate = true;
            return 0.5;
        }
        std::vector<double> env_alpha{mu0};
        std::vector<double> env_p1;
        RPair prev = r_values(0, x);
        for (std::size_t m = 1; m <= k; ++m) {
            RPair cur = r_values(m, x);
            double d1 = cur.r1 - prev.r1, d0 = cur.r0 - prev.r0;
            double mt = d1 + d0;
            env_alpha.push_back(env_alpha.back() + mt);
            env_p1.push_back(mt > 0 ? d1 / mt : 0.5);
            prev = cur;
        }
        double lo = alpha(k - 1), hi = alpha(k);
        double acc = 0.0;
        for (std::size_t m = 1; m < env_alpha.size(); ++m) {
            double olo = std::max(lo, env_alpha[m - 1]);
            double ohi = std::min(hi, env_alpha[m]);
            if (ohi > olo) acc += (ohi - olo) * env_p1[m - 1];
        }
        return std::clamp(acc / muk, 0.0, 1.0);
    }

    double verify_decomposition(const std::vector<signed char>& x,
                                std::size_t k_max) {
        k_max = std::min(k_max, full_level_);
        double mix = 0.0;
        for (std::size_t k = 0; k <= k_max; ++k)
            if (mu(k) > 0) mix += mu(k) * p_k(k, x);
        return std::abs(p_full(x) - mix) - (1.0 - alpha(k_max));
    }

    // realized-N upper bound on mu(k) from the paper's proposition
    double realized_mu_bound(std::size_t k) const {
        double t = site_time_;
        double b = 0.0;
        for (const auto& j : jumps_) {
            if (j.own) continue;
            double lo = t - static_cast<double>(k);
            if (j.enter_level <= k - 1) {
                if (j.time >= lo && j.time < lo + 1.0)
                    b += std::abs(j.w) * (*j.leak)(t - j.time);
            } else if (j.enter_level == k) {
                if (j.time >= lo && j.time < t)
                    b += std::abs(j.w) * (*j.leak)(t - j.time);
            }
        }
        return gamma_ * b;
    }

    std::size_t index_of(const RelJump& j) const {
        return static_cast<std::size_t>(&j - jumps_.data());
    }

    std::vector<std::size_t> inside_indices(std::size_t k) const {
        std::vector<std::size_t> idx;
        for (std::size_t n = 0; n < jumps_.size(); ++n)
            if (inside(jumps_[n], k)) idx.push_back(n);
        return idx;
    }

private:
    void ensure_level(std::size_t k) {
        while (alpha_.size() <= k) alpha_.push_back(level_alpha(alpha_.size()));
    }

    // inf over decision patterns on V_t^i(k) of r1 + r0, by exact enumeration
    double level_alpha(std::size_t k) const {
        auto idx = inside_indices(k);
        if (idx.size() >= 63 || (1ULL << idx.size()) > budget_)
            throw EnumerationBudgetExceeded(k);
        std::vector<signed char> x(jumps_.size(), 0);
        double inf = std::numeric_limits<double>::infinity();
        for (std::uint64_t mask = 0; mask < (1ULL << idx.size()); ++mask) {
            for (std::size_t b = 0; b < idx.size(); ++b)
                x[idx[b]] = (mask >> b) & 1 ? 1 : 0;
            RPair r = r_values(k, x);
            inf = std::min(inf, r.r1 + r.r0);
        }
        return std::min(inf, 1.0);
    }

    const Network* net_;
    NeuronSpec neuron_;
    double site_time_;
    double horizon_;
    std::size_t budget_;
    double gamma_ = 0.0;
    double e_tail_ = 0.0;
    std::vector<RelJump> jumps_;
    std::size_t full_level_ = 1;
    std::vector<double> alpha_;
};

}  // namespace hawkes
