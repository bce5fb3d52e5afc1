#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "network.hpp"
#include "rng.hpp"

namespace hawkes {

// one jump of the dominating measure N^i
struct Jump {
    double time = 0.0;
    double mark = 0.0;      // uniform on [0,1)
    bool spontaneous = false;  // mark < delta_i / Lambda_i (Saturation split)
};

struct Cell {
    std::vector<Jump> jumps;  // sorted by time, all inside the cell window
};

// identifies a jump of the dominating measure: (neuron, window, index in cell)
struct SiteKey {
    NeuronId neuron = 0;
    std::int64_t window = 0;
    std::uint32_t index = 0;

    bool operator==(const SiteKey&) const = default;
    bool operator<(const SiteKey& o) const {
        if (neuron != o.neuron) return neuron < o.neuron;
        if (window != o.window) return window < o.window;
        return index < o.index;
    }
};

struct SiteKeyHash {
    std::size_t operator()(const SiteKey& k) const {
        std::uint64_t h = mix64(static_cast<std::uint64_t>(k.neuron));
        h = mix64(h ^ static_cast<std::uint64_t>(k.window));
        h = mix64(h ^ k.index);
        return static_cast<std::size_t>(h);
    }
};

struct Site {
    SiteKey key;
    double time = 0.0;
    bool spontaneous = false;
};

class BackScanExhausted : public std::runtime_error {
public:
    BackScanExhausted(NeuronId i, std::int64_t windows)
        : std::runtime_error("no spontaneous jump of neuron " +
                             std::to_string(i) + " found in " +
                             std::to_string(windows) + " windows") {}
};

// Lazily extendable realization of the dominating PRM. Cell contents are a
// pure function of (master_seed, neuron, window), so backward extension never
// perturbs already generated randomness and concurrent racers compute
// identical cells.
class PrmRealization {
public:
    PrmRealization(const Network& net, std::uint64_t master_seed,
                   double window_length = 1.0)
        : net_(&net), seed_(master_seed), window_length_(window_length) {}

    std::uint64_t seed() const { return seed_; }
    double window_length() const { return window_length_; }

    std::int64_t window_of(double t) const {
        return static_cast<std::int64_t>(std::floor(t / window_length_));
    }

    const Cell& cell(NeuronId i, std::int64_t window) const {
        CellKey key{i, window};
        {
            std::shared_lock lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return *it->second;
        }
        auto fresh = std::make_unique<Cell>(generate(i, window));
        std::unique_lock lock(mutex_);
        auto [it, inserted] = cache_.try_emplace(key, std::move(fresh));
        return *it->second;
    }

    double time_of(const SiteKey& k) const {
        return cell(k.neuron, k.window).jumps[k.index].time;
    }

    enum class Filter { All, Spontaneous, NonSpontaneous };

    std::vector<Site> jumps_in(NeuronId i, double a, double b,
                               Filter f = Filter::All) const {
        if (a > b) throw std::invalid_argument("jumps_in: a > b");
        std::vector<Site> out;
        if (a == b) return out;
        for (std::int64_t w = window_of(a); w <= window_of(b); ++w) {
            if (w * window_length_ >= b) break;
            const Cell& c = cell(i, w);
            for (std::uint32_t idx = 0; idx < c.jumps.size(); ++idx) {
                const Jump& j = c.jumps[idx];
                if (j.time < a || j.time >= b) continue;
                if (f == Filter::Spontaneous && !j.spontaneous) continue;
                if (f == Filter::NonSpontaneous && j.spontaneous) continue;
                out.push_back({{i, w, idx}, j.time, j.spontaneous});
            }
        }
        return out;
    }

    // greatest spontaneous jump time strictly before t (the hat-L of the
    // backward sketch); scans cells backward up to the configured cap
    double last_spontaneous_before(NeuronId i, double t,
                                   std::int64_t max_windows = 100000) const {
        if (net_->neuron(i).delta <= 0)
            throw std::invalid_argument(
                "last_spontaneous_before: delta = 0 for neuron " +
                std::to_string(i));
        std::int64_t w0 = window_of(t);
        for (std::int64_t w = w0; w > w0 - max_windows; --w) {
            const Cell& c = cell(i, w);
            for (auto it = c.jumps.rbegin(); it != c.jumps.rend(); ++it)
                if (it->spontaneous && it->time < t) return it->time;
        }
        throw BackScanExhausted(i, max_windows);
    }

    // decision-stream uniform for a grid site; independent of the cell stream
    double site_uniform(const SiteKey& k, std::uint64_t which) const {
        StreamRng rng(seed_ ^ 0x5157c3u, static_cast<std::uint64_t>(k.neuron),
                      static_cast<std::uint64_t>(k.window),
                      (static_cast<std::uint64_t>(k.index) << 8) | which);
        return rng.uniform();
    }

    const Network& network() const { return *net_; }

private:
    struct CellKey {
        NeuronId neuron;
        std::int64_t window;
        bool operator==(const CellKey&) const = default;
    };
    struct CellKeyHash {
        std::size_t operator()(const CellKey& k) const {
            return static_cast<std::size_t>(
                mix64(mix64(static_cast<std::uint64_t>(k.neuron)) ^
                      static_cast<std::uint64_t>(k.window)));
        }
    };

    Cell generate(NeuronId i, std::int64_t window) const {
        const NeuronSpec& n = net_->neuron(i);
        StreamRng rng(seed_, static_cast<std::uint64_t>(i),
                      static_cast<std::uint64_t>(window), 0x9e11u);
        std::uint64_t count = rng.poisson(n.lambda * window_length_);
        Cell c;
        c.jumps.resize(count);
        double base = window * window_length_;
        for (auto& j : c.jumps) j.time = base + rng.uniform() * window_length_;
        std::sort(c.jumps.begin(), c.jumps.end(),
                  [](const Jump& a, const Jump& b) { return a.time < b.time; });
        double d = n.lambda > 0 ? n.delta / n.lambda : 0.0;
        for (auto& j : c.jumps) {
            j.mark = rng.uniform();
            j.spontaneous = j.mark < d;
        }
        return c;
    }

    const Network* net_;
    std::uint64_t seed_;
    double window_length_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<CellKey, std::unique_ptr<Cell>, CellKeyHash>
        cache_;
};

}  // namespace hawkes
