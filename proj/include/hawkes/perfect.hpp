#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "kalikow_cascade.hpp"
#include "kalikow_sat.hpp"
#include "network.hpp"
#include "prm.hpp"
#include "stats.hpp"

namespace hawkes {

class GenerationCapExceeded : public std::runtime_error {
public:
    GenerationCapExceeded()
        : std::runtime_error("clan of ancestors exceeded its cap") {}
};

class Deadlock : public std::runtime_error {
public:
    Deadlock() : std::runtime_error("forward sweep made no progress") {}
};

class InvalidProbability : public std::runtime_error {
public:
    explicit InvalidProbability(double p)
        : std::runtime_error("conditional law outside [0,1]: " +
                             std::to_string(p)) {}
};

struct PerfectOptions {
    bool strict_residual = false;   // strict mode decomposes (phi-d)/(1-d)
    std::size_t generation_cap = 10000;
    std::size_t site_cap = 1000000;
    std::int64_t backscan_cap = 100000;       // windows
    std::size_t enumeration_budget = 1 << 20; // configurations per level
    double eps_num = 1e-9;   // cascade horizon tolerance
    double horizon = 0.0;    // 0: derive from eps_num
    double window_length = 1.0;
};

struct ClanOfAncestors {
    Site root;
    std::size_t level = 0;  // sampled K^(i,t)
    std::vector<std::vector<Site>> generations;  // C_1 .. C_{NStop-1}
    std::size_t n_stop = 1;

    std::size_t total_sites() const {
        std::size_t n = 0;
        for (const auto& g : generations) n += g.size();
        return n;
    }
};

struct SpikeSample {
    double a = 0.0, b = 0.0;
    std::uint64_t seed = 0;
    ModelKind kind = ModelKind::Saturation;
    double tail_tolerance = 0.0;  // Cascade: declared exactness gap
    std::size_t clamp_events = 0;
    std::map<std::size_t, std::size_t> n_stop_histogram;
    std::vector<std::pair<Site, int>> decisions;  // sorted by time

    std::vector<double> accepted_times(NeuronId i) const {
        std::vector<double> out;
        for (const auto& [s, d] : decisions)
            if (d == 1 && s.key.neuron == i) out.push_back(s.time);
        return out;
    }
};

// Two-phase perfect sampler: backward clan-of-ancestors sketch, then a
// forward acceptance/rejection sweep over the sites whose decisions can
// influence the query window. One PRM realization and one decision cache are
// shared across all clans of a sample, so overlapping clans agree.
class PerfectSampler {
public:
    PerfectSampler(const Network& net, std::uint64_t seed,
                   PerfectOptions opt = {})
        : net_(&net),
          nbhd_(net),
          opt_(opt),
          prm_(net, seed, opt.window_length) {
        if (net.model_kind == ModelKind::Saturation) {
            for (const auto& n : net.neurons)
                sat_.emplace(n.id,
                             SatDecomposition(net, nbhd_, n.id,
                                              opt_.strict_residual,
                                              opt_.enumeration_budget));
        } else {
            horizon_ = opt_.horizon > 0 ? opt_.horizon
                                        : choose_horizon(net, opt_.eps_num);
        }
    }

    const PrmRealization& prm() const { return prm_; }
    const GrowingNeighborhoods& nbhd() const { return nbhd_; }
    double horizon() const { return horizon_; }
    std::size_t clamp_events() const { return clamp_events_; }

    std::size_t site_level(const Site& s) {
        auto it = level_.find(s.key);
        if (it != level_.end()) return it->second;
        double u = prm_.site_uniform(s.key, 0);
        std::size_t k;
        if (net_->model_kind == ModelKind::Saturation)
            k = sat_.at(s.key.neuron).sample_level(u);
        else
            k = cascade(s).sample_level(u);
        level_[s.key] = k;
        return k;
    }

    // first generation of the clan of ancestors of a site
    std::vector<Site> first_generation(const Site& s) {
        auto it = c1_.find(s.key);
        if (it != c1_.end()) return it->second;
        std::vector<Site> out;
        std::size_t k = site_level(s);
        if (k > 0) {
            if (net_->model_kind == ModelKind::Saturation) {
                double lhat = prm_.last_spontaneous_before(
                    s.key.neuron, s.time, opt_.backscan_cap);
                for (NeuronId j : nbhd_.level(s.key.neuron, k))
                    for (auto& m : prm_.jumps_in(
                             j, lhat, s.time,
                             PrmRealization::Filter::NonSpontaneous))
                        out.push_back(m);
            } else {
                CascadeDecomposition& cd = cascade(s);
                for (std::size_t n : cd.inside_indices(k)) {
                    const auto& j = cd.jumps()[n];
                    out.push_back({j.key, j.time, false});
                }
            }
            std::sort(out.begin(), out.end(),
                      [](const Site& a, const Site& b) {
                          return a.key < b.key;
                      });
        }
        c1_[s.key] = out;
        return out;
    }

    ClanOfAncestors clan(const Site& root) {
        ClanOfAncestors c;
        c.root = root;
        c.level = site_level(root);
        std::map<SiteKey, Site> seen;
        std::vector<Site> current = first_generation(root);
        std::size_t total = 0;
        while (!current.empty()) {
            if (c.generations.size() >= opt_.generation_cap)
                throw GenerationCapExceeded();
            for (const auto& s : current) seen.emplace(s.key, s);
            total += current.size();
            if (total > opt_.site_cap) throw GenerationCapExceeded();
            c.generations.push_back(current);
            std::map<SiteKey, Site> next;
            for (const auto& s : current)
                for (const auto& m : first_generation(s))
                    if (!seen.count(m.key)) next.emplace(m.key, m);
            current.clear();
            for (auto& [k, s] : next) current.push_back(s);
        }
        c.n_stop = c.generations.size() + 1;
        return c;
    }

    // forward sweep: decide every clan site from the past to the present,
    // then the root itself
    int resolve(const ClanOfAncestors& c) {
        std::vector<Site> todo;
        for (const auto& g : c.generations)
            for (const auto& s : g)
                if (!decision_.count(s.key)) todo.push_back(s);
        todo.push_back(c.root);
        while (true) {
            bool progress = false;
            std::vector<Site> rest;
            for (const auto& s : todo) {
                if (decision_.count(s.key)) {
                    progress = true;
                    continue;
                }
                bool ready = true;
                for (const auto& m : first_generation(s))
                    if (!decided(m)) {
                        ready = false;
                        break;
                    }
                if (ready) {
                    decide(s);
                    progress = true;
                } else {
                    rest.push_back(s);
                }
            }
            todo = std::move(rest);
            if (todo.empty()) break;
            if (!progress) throw Deadlock();
        }
        return decision_.at(c.root.key);
    }

    int decide_site(const Site& s) {
        if (auto it = decision_.find(s.key); it != decision_.end())
            return it->second;
        if (s.spontaneous) return decision_[s.key] = 1;
        return resolve(clan(s));
    }

    // exact stationary sample of all grid decisions on [a, b)
    SpikeSample sample(double a, double b) {
        SpikeSample out;
        out.a = a;
        out.b = b;
        out.seed = prm_.seed();
        out.kind = net_->model_kind;
        for (const auto& n : net_->neurons) {
            if (net_->model_kind == ModelKind::Cascade)
                out.tail_tolerance = std::max(
                    out.tail_tolerance,
                    cascade_tail_error(*net_, n.id, horizon_,
                                       network_gamma(*net_)));
            for (const auto& s : prm_.jumps_in(n.id, a, b)) {
                int d;
                if (s.spontaneous) {
                    d = 1;
                    decision_[s.key] = 1;
                } else {
                    ClanOfAncestors c = clan(s);
                    out.n_stop_histogram[c.n_stop]++;
                    d = resolve(c);
                }
                out.decisions.emplace_back(s, d);
            }
        }
        std::sort(out.decisions.begin(), out.decisions.end(),
                  [](const auto& x, const auto& y) {
                      return x.first.time < y.first.time;
                  });
        out.clamp_events = clamp_events_;
        return out;
    }

private:
    bool decided(const Site& s) const {
        return s.spontaneous || decision_.count(s.key) > 0;
    }

    CascadeDecomposition& cascade(const Site& s) {
        auto it = cascade_.find(s.key);
        if (it == cascade_.end())
            it = cascade_
                     .emplace(s.key, std::make_unique<CascadeDecomposition>(
                                         *net_, nbhd_, prm_, s.key.neuron,
                                         s.time, horizon_,
                                         opt_.enumeration_budget))
                     .first;
        return *it->second;
    }

    void decide(const Site& s) {
        double acc;
        std::size_t k = site_level(s);
        if (net_->model_kind == ModelKind::Saturation) {
            const SatDecomposition& dec = sat_.at(s.key.neuron);
            std::vector<double> zeta(dec.edge_count(), 0.0);
            double l = last_spike_before(s);
            for (std::size_t e = 0; e < dec.edge_count(); ++e)
                zeta[e] = std::min(accepted_count(dec.edge_source(e), l, s.time),
                                   dec.edge_cap(e));
            double p = dec.p_k(k, zeta);
            if (p < -1e-9 || p > 1.0 + 1e-9) throw InvalidProbability(p);
            if (opt_.strict_residual) {
                acc = std::clamp(p, 0.0, 1.0);
            } else {
                double d = net_->neuron(s.key.neuron).d();
                double raw = d < 1.0 ? (p - d) / (1.0 - d) : 0.0;
                acc = std::clamp(raw, 0.0, 1.0);
                if (raw < 0.0 || raw > 1.0) ++clamp_events_;
            }
        } else {
            CascadeDecomposition& cd = cascade(s);
            std::vector<signed char> x(cd.jumps().size(), 0);
            for (std::size_t n = 0; n < cd.jumps().size(); ++n) {
                const auto& j = cd.jumps()[n];
                if (auto it = decision_.find(j.key); it != decision_.end())
                    x[n] = it->second ? 1 : 0;
            }
            acc = cd.p_k(k, x);
            if (acc < -1e-9 || acc > 1.0 + 1e-9) throw InvalidProbability(acc);
            acc = std::clamp(acc, 0.0, 1.0);
        }
        decision_[s.key] = prm_.site_uniform(s.key, 1) < acc ? 1 : 0;
    }

    // L_t^i given the decisions so far: the last spontaneous spike, or a later
    // accepted non-spontaneous one
    double last_spike_before(const Site& s) {
        double l = prm_.last_spontaneous_before(s.key.neuron, s.time,
                                                opt_.backscan_cap);
        for (const auto& m :
             prm_.jumps_in(s.key.neuron, l, s.time,
                           PrmRealization::Filter::NonSpontaneous)) {
            auto it = decision_.find(m.key);
            if (it != decision_.end() && it->second == 1)
                l = std::max(l, m.time);
        }
        return l;
    }

    double accepted_count(NeuronId j, double a, double b) {
        double n = static_cast<double>(
            prm_.jumps_in(j, a, b, PrmRealization::Filter::Spontaneous)
                .size());
        for (const auto& m : prm_.jumps_in(
                 j, a, b, PrmRealization::Filter::NonSpontaneous)) {
            auto it = decision_.find(m.key);
            if (it != decision_.end() && it->second == 1) n += 1.0;
        }
        return n;
    }

    const Network* net_;
    GrowingNeighborhoods nbhd_;
    PerfectOptions opt_;
    PrmRealization prm_;
    double horizon_ = 0.0;
    std::size_t clamp_events_ = 0;
    std::map<NeuronId, SatDecomposition> sat_;
    std::unordered_map<SiteKey, std::unique_ptr<CascadeDecomposition>,
                       SiteKeyHash>
        cascade_;
    std::unordered_map<SiteKey, std::size_t, SiteKeyHash> level_;
    std::unordered_map<SiteKey, std::vector<Site>, SiteKeyHash> c1_;
    std::unordered_map<SiteKey, int, SiteKeyHash> decision_;
};

struct ClanStats {
    std::vector<double> mean_generation_size;  // E|C_n|, n = 1, 2, ...
    double m_hat = 0.0;     // mean |C_1| across replicas
    double m_hat_se = 0.0;
    double offspring_ratio = 0.0;  // sum |C_{n+1}| / sum |C_n|
    std::size_t finite_runs = 0;
    std::size_t replicas = 0;
};

// Monte Carlo clan statistics: one clan per replica, root at the first
// non-spontaneous jump (Saturation) or first jump (Cascade) of a cycling
// neuron after time 0.
inline ClanStats clan_stats(const Network& net, std::size_t n_replicas,
                            std::uint64_t seed, PerfectOptions opt = {}) {
    ClanStats st;
    st.replicas = n_replicas;
    std::vector<double> c1_sizes;
    std::vector<double> gen_sums;
    double offspring_num = 0.0, offspring_den = 0.0;
    for (std::size_t r = 0; r < n_replicas; ++r) {
        PerfectSampler sampler(net, mix64(seed ^ (0xc1a5ULL + r)), opt);
        const auto& nn = net.neurons[r % net.neurons.size()];
        auto filter = net.model_kind == ModelKind::Saturation
                          ? PrmRealization::Filter::NonSpontaneous
                          : PrmRealization::Filter::All;
        Site root{};
        bool found = false;
        for (double t0 = 0.0; t0 < 1000.0 && !found; t0 += 10.0) {
            auto js = sampler.prm().jumps_in(nn.id, t0, t0 + 10.0, filter);
            if (!js.empty()) {
                root = js.front();
                found = true;
            }
        }
        if (!found) continue;
        ClanOfAncestors c = sampler.clan(root);
        ++st.finite_runs;
        c1_sizes.push_back(c.generations.empty()
                               ? 0.0
                               : static_cast<double>(c.generations[0].size()));
        for (std::size_t n = 0; n < c.generations.size(); ++n) {
            if (gen_sums.size() <= n) gen_sums.push_back(0.0);
            gen_sums[n] += static_cast<double>(c.generations[n].size());
            if (n + 1 < c.generations.size()) {
                offspring_num += static_cast<double>(c.generations[n + 1].size());
            }
            offspring_den += static_cast<double>(c.generations[n].size());
        }
    }
    MeanSe m = mean_se(c1_sizes);
    st.m_hat = m.mean;
    st.m_hat_se = m.se;
    st.offspring_ratio = offspring_den > 0 ? offspring_num / offspring_den : 0.0;
    for (double g : gen_sums)
        st.mean_generation_size.push_back(
            g / static_cast<double>(std::max<std::size_t>(1, st.finite_runs)));
    return st;
}

}  // namespace hawkes
