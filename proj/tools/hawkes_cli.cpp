// Command-line front end: condition checking, perfect / forward simulation,
// trajectory comparison and clan statistics. Outputs are CSV/JSONL spike
// trains plus a JSON manifest per run; exit codes: 0 ok/satisfied, 1 usage or
// config error, 2 violated/fail, 3 inconclusive.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hawkes/conditions.hpp"
#include "hawkes/config.hpp"
#include "hawkes/io.hpp"
#include "hawkes/oracle.hpp"
#include "hawkes/perfect.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hawkes;

namespace {

struct LoadedConfig {
    Network net;
    json raw;
    std::string hash;
    std::string path;
};

LoadedConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{"FileNotFound", path}});
    json j;
    in >> j;
    LoadedConfig lc{Network::build(parse_network_config(j)), j,
                    std::to_string(config_hash(j)), path};
    return lc;
}

json report_json(const ConditionReport& rep) {
    json per = json::array();
    for (const auto& n : rep.per_neuron)
        per.push_back({{"neuron", n.id},
                       {"lhs_lower", n.lhs_lower},
                       {"lhs_upper", n.lhs_upper},
                       {"k_truncation", n.k_truncation}});
    return {{"threshold", rep.threshold},
            {"verdict", to_string(rep.verdict)},
            {"worst_neuron", rep.worst},
            {"per_neuron", per}};
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return 0;
        case Verdict::Violated: return 2;
        case Verdict::Inconclusive: return 3;
    }
    return 3;
}

int cmd_check(const std::string& config_path, std::size_t kmax,
              double gamma_override, const std::string& out_path) {
    LoadedConfig lc = load(config_path);
    GrowingNeighborhoods nbhd(lc.net);
    ConditionReport rep =
        lc.net.model_kind == ModelKind::Saturation
            ? check_theorem1(lc.net, nbhd, kmax, gamma_override)
            : check_theorem3(lc.net, nbhd, kmax, gamma_override);
    json out = report_json(rep);
    out["config_hash"] = lc.hash;
    if (lc.net.model_kind == ModelKind::Saturation) {
        LiggettBounds lb = liggett_bounds(lc.net, gamma_override);
        out["liggett"] = {{"m", lb.m}, {"epsilon", lb.epsilon}};
    }
    std::cout << "verdict: " << to_string(rep.verdict)
              << "  threshold: " << rep.threshold << "\n";
    for (const auto& n : rep.per_neuron)
        std::cout << "  neuron " << n.id << "  lhs in [" << n.lhs_lower << ", "
                  << n.lhs_upper << "]  k_max " << n.k_truncation << "\n";
    if (!out_path.empty()) {
        std::ofstream of(out_path);
        of << out.dump(2) << "\n";
    }
    return verdict_exit(rep.verdict);
}

SpikeSample forward_as_sample(const ForwardResult& f, std::uint64_t seed,
                              ModelKind kind) {
    SpikeSample s;
    s.a = f.t0;
    s.b = f.t1;
    s.seed = seed;
    s.kind = kind;
    for (const auto& [i, times] : f.spikes)
        for (std::size_t m = 0; m < times.size(); ++m)
            s.decisions.push_back(
                {Site{{i, 0, static_cast<std::uint32_t>(m)}, times[m], false},
                 1});
    std::sort(s.decisions.begin(), s.decisions.end(),
              [](const auto& x, const auto& y) {
                  return x.first.time < y.first.time;
              });
    return s;
}

int cmd_simulate(const std::string& config_path, const std::string& mode,
                 double wa, double wb, std::uint64_t seed,
                 std::size_t replicas, std::size_t workers,
                 const std::string& out_dir, bool force, bool strict) {
    LoadedConfig lc = load(config_path);
    if (wb < wa) {
        std::cerr << "error: window end before start\n";
        return 1;
    }
    if (mode == "perfect" && !force) {
        GrowingNeighborhoods nbhd(lc.net);
        ConditionReport rep =
            lc.net.model_kind == ModelKind::Saturation
                ? check_theorem1(lc.net, nbhd, 64)
                : check_theorem3(lc.net, nbhd, 64);
        if (rep.verdict != Verdict::Satisfied) {
            std::cerr << "error: summability condition " +
                             to_string(rep.verdict) +
                             "; pass --force to simulate anyway\n";
            return 2;
        }
    }
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    auto cleanup = [&]() {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    };
    auto start = std::chrono::steady_clock::now();
    std::vector<SpikeSample> samples(replicas);
    std::vector<std::string> errors(replicas);
    std::atomic<std::size_t> next{0};
    auto run_replica = [&](std::size_t r) {
        std::uint64_t rs = mix64(seed + 0x9e3779b97f4a7c15ULL * (r + 1));
        try {
            if (mode == "perfect") {
                PerfectOptions opt;
                opt.strict_residual = strict;
                PerfectSampler sampler(lc.net, rs, opt);
                samples[r] = sampler.sample(wa, wb);
            } else {
                ForwardResult f =
                    forward_sample(lc.net, wb - wa, 50.0 + wa, rs);
                samples[r] = forward_as_sample(f, rs, lc.net.model_kind);
            }
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    };
    workers = std::max<std::size_t>(1, workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, replicas); ++w)
        pool.emplace_back([&] {
            for (std::size_t r = next.fetch_add(1); r < replicas;
                 r = next.fetch_add(1))
                run_replica(r);
        });
    for (auto& t : pool) t.join();
    for (std::size_t r = 0; r < replicas; ++r)
        if (!errors[r].empty()) {
            std::cerr << "error in replica " << r << ": " << errors[r] << "\n";
            cleanup();
            return 1;
        }
    // write sequentially so output is independent of scheduling
    std::size_t clamp_total = 0;
    std::map<std::size_t, std::size_t> nstop;
    std::vector<double> rates;
    try {
        for (std::size_t r = 0; r < replicas; ++r) {
            fs::path csv = fs::path(out_dir) /
                           ("replica_" + std::to_string(r) + ".csv");
            fs::path jsonl = fs::path(out_dir) /
                             ("replica_" + std::to_string(r) + ".jsonl");
            written.push_back(csv);
            write_csv(csv, samples[r], lc.hash);
            written.push_back(jsonl);
            write_jsonl(jsonl, samples[r]);
            clamp_total += samples[r].clamp_events;
            for (const auto& [n, c] : samples[r].n_stop_histogram)
                nstop[n] += c;
            double accepted = 0;
            for (const auto& [s, d] : samples[r].decisions) accepted += d;
            double len = samples[r].b - samples[r].a;
            rates.push_back(len > 0 ? accepted / len : 0.0);
        }
        RunManifest m;
        m.command = "simulate --mode " + mode;
        m.config_path = config_path;
        m.config_hash = lc.hash;
        m.seed = seed;
        m.caps = {{"generation_cap", PerfectOptions{}.generation_cap},
                  {"site_cap", PerfectOptions{}.site_cap},
                  {"backscan_cap", PerfectOptions{}.backscan_cap}};
        m.tolerances = {{"eps_num", PerfectOptions{}.eps_num}};
        json hist = json::object();
        for (const auto& [n, c] : nstop) hist[std::to_string(n)] = c;
        MeanSe agg = mean_se(rates);
        m.summary = {{"mode", mode},
                     {"replicas", replicas},
                     {"window", {wa, wb}},
                     {"clamp_events", clamp_total},
                     {"n_stop_histogram", hist},
                     {"mean_total_rate", agg.mean},
                     {"total_rate_se", agg.se}};
        m.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        fs::path mp = fs::path(out_dir) / "manifest.json";
        written.push_back(mp);
        write_manifest(mp, m);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        cleanup();
        return 1;
    }
    std::cout << "wrote " << replicas << " replica(s) to " << out_dir << "\n";
    return 0;
}

SpikeSample sample_from_csv(const fs::path& p) {
    CsvTrajectory t = read_csv(p);
    SpikeSample s;
    if (auto it = t.metadata.find("window"); it != t.metadata.end())
        std::sscanf(it->second.c_str(), "%lf,%lf", &s.a, &s.b);
    std::uint32_t idx = 0;
    for (const auto& r : t.rows)
        s.decisions.push_back(
            {Site{{r.neuron, 0, idx++}, r.time, false}, r.decision});
    return s;
}

int cmd_compare(const std::string& config_path,
                const std::string& perfect_dir,
                const std::string& forward_file, double level) {
    LoadedConfig lc = load(config_path);
    std::vector<SpikeSample> runs;
    std::string expect_hash;
    std::vector<fs::path> csvs;
    for (const auto& e : fs::directory_iterator(perfect_dir))
        if (e.path().extension() == ".csv") csvs.push_back(e.path());
    std::sort(csvs.begin(), csvs.end());
    for (const auto& p : csvs) {
        CsvTrajectory t = read_csv(p);
        auto h = t.metadata.find("config_hash");
        if (h != t.metadata.end() && h->second != lc.hash) {
            std::cerr << "error: NetworkHashMismatch in " << p << "\n";
            return 1;
        }
        runs.push_back(sample_from_csv(p));
    }
    if (runs.empty()) {
        std::cerr << "error: InsufficientSamples in " << perfect_dir << "\n";
        return 1;
    }
    CsvTrajectory ft = read_csv(forward_file);
    if (auto h = ft.metadata.find("config_hash");
        h != ft.metadata.end() && h->second != lc.hash) {
        std::cerr << "error: NetworkHashMismatch in " << forward_file << "\n";
        return 1;
    }
    ForwardResult fwd;
    fwd.t0 = std::numeric_limits<double>::infinity();
    fwd.t1 = -fwd.t0;
    for (const auto& n : lc.net.neurons) fwd.spikes[n.id] = {};
    if (auto it = ft.metadata.find("window"); it != ft.metadata.end())
        std::sscanf(it->second.c_str(), "%lf,%lf", &fwd.t0, &fwd.t1);
    for (const auto& r : ft.rows) {
        if (!std::isfinite(fwd.t0)) {
            fwd.t0 = std::min(fwd.t0, r.time);
            fwd.t1 = std::max(fwd.t1, r.time);
        }
        if (r.decision == 1) fwd.spikes[r.neuron].push_back(r.time);
    }
    CompareReport rep = compare(lc.net, runs, fwd);
    bool pass = true;
    for (const auto& n : rep.neurons) {
        bool ok = n.z <= 3.0 && n.ks_p >= level;
        pass = pass && ok;
        std::cout << "neuron " << n.id << "  rate_perfect " << n.rate_perfect
                  << "  rate_forward " << n.rate_forward << "  z " << n.z
                  << "  ks_p " << n.ks_p << (ok ? "  ok" : "  FAIL") << "\n";
    }
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 2;
}

int cmd_clan_stats(const std::string& config_path, std::size_t replicas,
                   std::uint64_t seed, const std::string& out_path) {
    LoadedConfig lc = load(config_path);
    ClanStats st = clan_stats(lc.net, replicas, seed);
    std::cout << "clans: " << st.finite_runs << "/" << st.replicas
              << " finite\n";
    std::cout << "mean offspring (|C_1|): " << st.m_hat << " +- "
              << st.m_hat_se << "\n";
    std::cout << "offspring ratio: " << st.offspring_ratio << "\n";
    for (std::size_t n = 0; n < st.mean_generation_size.size(); ++n)
        std::cout << "  E|C_" << n + 1 << "| ~ " << st.mean_generation_size[n]
                  << "\n";
    if (!out_path.empty()) {
        json out = {{"replicas", st.replicas},
                    {"finite_runs", st.finite_runs},
                    {"m_hat", st.m_hat},
                    {"m_hat_se", st.m_hat_se},
                    {"offspring_ratio", st.offspring_ratio},
                    {"mean_generation_size", st.mean_generation_size},
                    {"config_hash", lc.hash}};
        std::ofstream of(out_path);
        of << out.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perfect and forward simulation of nonlinear Hawkes "
                 "processes with variable-length memory"};
    app.require_subcommand(1);

    std::string config_path, out_path, out_dir, mode = "perfect";
    std::string perfect_dir, forward_file;
    std::size_t kmax = 64, replicas = 1, workers = 1;
    double gamma_override = -1.0, level = 0.01;
    std::vector<double> window{0.0, 1.0};
    std::uint64_t seed = 1;
    bool force = false, strict = false;

    auto* check = app.add_subcommand("check", "evaluate summability conditions");
    check->add_option("config", config_path)->required();
    check->add_option("--kmax", kmax);
    check->add_option("--gamma-override", gamma_override);
    check->add_option("--out", out_path);

    auto* sim = app.add_subcommand("simulate", "draw spike-train samples");
    sim->add_option("config", config_path)->required();
    sim->add_option("--mode", mode)
        ->check(CLI::IsMember({"perfect", "forward"}));
    sim->add_option("--window", window)->expected(2);
    sim->add_option("--seed", seed);
    sim->add_option("--replicas", replicas);
    sim->add_option("--workers", workers);
    sim->add_option("--out", out_dir)->required();
    sim->add_flag("--force", force);
    sim->add_flag("--strict", strict);

    auto* cmp = app.add_subcommand("compare",
                                   "compare perfect samples to a forward run");
    cmp->add_option("config", config_path)->required();
    cmp->add_option("perfect_dir", perfect_dir)->required();
    cmp->add_option("forward_file", forward_file)->required();
    cmp->add_option("--level", level);

    auto* cs = app.add_subcommand("clan-stats", "clan-of-ancestors statistics");
    cs->add_option("config", config_path)->required();
    cs->add_option("--replicas", replicas);
    cs->add_option("--seed", seed);
    cs->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed())
            return cmd_check(config_path, kmax, gamma_override, out_path);
        if (sim->parsed())
            return cmd_simulate(config_path, mode, window[0], window[1], seed,
                                replicas, workers, out_dir, force, strict);
        if (cmp->parsed())
            return cmd_compare(config_path, perfect_dir, forward_file, level);
        if (cs->parsed())
            return cmd_clan_stats(config_path, replicas, seed, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
