#include <catch2/catch_amalgamated.hpp>

#include "hawkes/conditions.hpp"

#include "helpers.hpp"

using namespace hawkes;
using namespace hawkes::testing;

TEST_CASE("theorem 1 on the weak two-neuron network: LHS 0.8, satisfied") {
    Network net = e1_network(0.1, 1.0);
    GrowingNeighborhoods nbhd(net);
    ConditionReport rep = check_theorem1(net, nbhd, 16);
    CHECK(rep.threshold == Catch::Approx(10.0));
    bool found = false;
    for (const auto& n : rep.per_neuron)
        if (n.id == 1) {
            found = true;
            CHECK(n.lhs_lower == Catch::Approx(0.8));
            CHECK(n.lhs_upper == Catch::Approx(0.8));
        }
    CHECK(found);
    CHECK(rep.verdict == Verdict::Satisfied);
}

TEST_CASE("theorem 1 on the strong two-neuron network: LHS 16, violated") {
    Network net = e1_network(1.0, 2.0);
    GrowingNeighborhoods nbhd(net);
    ConditionReport rep = check_theorem1(net, nbhd, 16);
    bool found = false;
    for (const auto& n : rep.per_neuron)
        if (n.id == 1) {
            found = true;
            CHECK(n.lhs_lower == Catch::Approx(16.0));
        }
    CHECK(found);
    CHECK(rep.verdict == Verdict::Violated);
}

TEST_CASE("theorem 1 with no edges: LHS 0, satisfied") {
    Network net = no_input_network(0.5);
    GrowingNeighborhoods nbhd(net);
    ConditionReport rep = check_theorem1(net, nbhd, 4);
    CHECK(rep.per_neuron[0].lhs_upper == 0.0);
    CHECK(rep.verdict == Verdict::Satisfied);
}

TEST_CASE("theorem 1 rejects zero delta") {
    NetworkConfig cfg;
    NeuronSpec n;
    n.id = 0;
    n.lambda = 1.0;
    n.delta = 0.0;
    n.phi = clipped_affine(0.5, 0.1);
    cfg.neurons.push_back(n);
    Network net = Network::build(cfg);
    GrowingNeighborhoods nbhd(net);
    CHECK_THROWS_AS(check_theorem1(net, nbhd, 4), std::invalid_argument);
}

TEST_CASE("theorem 1 LHS monotone in k_max, tail non-increasing") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        Network net = random_sat_network(rng);
        GrowingNeighborhoods nbhd(net);
        double prev_lower = -1.0, prev_tail = 1e300;
        for (std::size_t kmax = 1; kmax <= 6; ++kmax) {
            ConditionReport r = check_theorem1(net, nbhd, kmax);
            double lower = 0.0, tail = 0.0;
            for (const auto& n : r.per_neuron) {
                lower = std::max(lower, n.lhs_lower);
                tail = std::max(tail, n.lhs_upper - n.lhs_lower);
            }
            CHECK(lower >= prev_lower - 1e-12);
            CHECK(tail <= prev_tail + 1e-12);
            prev_lower = lower;
            prev_tail = tail;
        }
    }
}

TEST_CASE("theorem 3 weak single edge satisfied") {
    Network net = cascade_pair(0.01, 1.0, 1.0);
    GrowingNeighborhoods nbhd(net);
    ConditionReport rep = check_theorem3(net, nbhd, 40, 1.0);
    CHECK(rep.threshold == Catch::Approx(1.0));
    for (const auto& n : rep.per_neuron) CHECK(n.lhs_upper < 1.0);
    CHECK(rep.verdict == Verdict::Satisfied);
}

TEST_CASE("theorem 3 with no edges: LHS 0") {
    Network net = cascade_pair(0.0);
    GrowingNeighborhoods nbhd(net);
    ConditionReport rep = check_theorem3(net, nbhd, 10);
    for (const auto& n : rep.per_neuron) CHECK(n.lhs_upper == 0.0);
    CHECK(rep.verdict == Verdict::Satisfied);
}

TEST_CASE("theorem 3 slow power-law leak with growing front factor fails") {
    // g(s) = (1+s)^{-1.5}: int_{k-1}^k g ~ k^{-1.5} against the k Lambda
    // factor makes the series diverge; the tail bound is infinite
    NetworkConfig cfg;
    cfg.model_kind = ModelKind::Cascade;
    for (NeuronId id : {0, 1}) {
        NeuronSpec n;
        n.id = id;
        n.lambda = 1.0;
        n.phi = clipped_affine(0.3, 1.0);
        n.leak = power_leak(1.0, 1.5);
        cfg.neurons.push_back(n);
        cfg.layers[id] = id;
    }
    cfg.edges.push_back({0, 1, 0.5, 1.0});
    Network slow = Network::build(cfg);
    GrowingNeighborhoods nbhd(slow);
    ConditionReport rep = check_theorem3(slow, nbhd, 30);
    CHECK(rep.verdict != Verdict::Satisfied);
}

TEST_CASE("example 1 closed form and critical weight") {
    ExampleParams p;
    p.lambda = 1.0;
    p.a = 1.0;
    p.gamma = 1.0;
    double wstar = example1_critical_w(p);
    CHECK(wstar > 0.0);
    p.w = wstar * 0.9;
    CHECK(example1_closed_form(p).verdict == Verdict::Satisfied);
    p.w = wstar * 1.1;
    CHECK(example1_closed_form(p).verdict == Verdict::Violated);
    p.w = -1.0;
    CHECK_THROWS_AS(example1_closed_form(p), std::invalid_argument);
}

TEST_CASE("example 2 series diverges iff beta <= 3") {
    ExampleParams p;
    p.lambda = 1.0;
    p.a = 1.0;
    p.w = 0.001;
    p.gamma = 1.0;
    p.beta = 3.0;
    ExampleResult r3 = example2_closed_form(p);
    CHECK(r3.divergent);
    CHECK(r3.verdict == Verdict::Violated);
    p.beta = 3.5;
    ExampleResult r35 = example2_closed_form(p);
    CHECK_FALSE(r35.divergent);
    CHECK(std::isfinite(r35.lhs));
    p.beta = 2.0;
    CHECK(example2_closed_form(p).divergent);
}

TEST_CASE("liggett bounds: M = 2.02 on the weak network, epsilon = 0") {
    Network net = e1_network(0.1, 1.0);
    LiggettBounds b = liggett_bounds(net);
    CHECK(b.m == Catch::Approx(2.02));
    CHECK(b.epsilon == 0.0);
}

TEST_CASE("liggett bounds: edgeless network has M = 0") {
    Network net = no_input_network(0.5);
    LiggettBounds b = liggett_bounds(net);
    CHECK(b.m == 0.0);
    CHECK(b.epsilon == 0.0);
}

TEST_CASE("liggett M invariant under neuron relabeling") {
    NetworkConfig cfg;
    cfg.model_kind = ModelKind::Saturation;
    for (NeuronId id : {10, 3}) {
        NeuronSpec n;
        n.id = id;
        n.lambda = 1.0;
        n.delta = 0.2;
        n.phi = clipped_affine(0.2, 0.1);
        cfg.neurons.push_back(n);
    }
    cfg.edges.push_back({10, 3, 0.1, 1.0});
    Network relabeled = Network::build(cfg);
    CHECK(liggett_bounds(relabeled).m ==
          Catch::Approx(liggett_bounds(e1_network(0.1, 1.0)).m));
}

TEST_CASE("epsilon is 0 on random saturation networks with edges") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        Network net = random_sat_network(rng);
        LiggettBounds b = liggett_bounds(net);
        CHECK(b.epsilon == 0.0);
    }
}
