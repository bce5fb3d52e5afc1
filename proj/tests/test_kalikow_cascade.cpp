#include <catch2/catch_amalgamated.hpp>

#include "hawkes/kalikow_cascade.hpp"

#include "helpers.hpp"

using namespace hawkes;
using namespace hawkes::testing;

namespace {

// scan seeds for a site of neuron 1 whose back horizon holds exactly
// n_presyn jumps of neuron 0 and no jumps of neuron 1
struct FoundSite {
    std::uint64_t seed = 0;
    double t = 0.0;
    std::vector<double> presyn;
    bool ok = false;
};

FoundSite find_site(const Network& net, double horizon, std::size_t n_presyn,
                    std::uint64_t max_seed = 4000) {
    for (std::uint64_t seed = 1; seed < max_seed; ++seed) {
        PrmRealization prm(net, seed);
        for (double t : {20.0, 35.0, 50.0}) {
            auto own = prm.jumps_in(1, t - horizon, t);
            auto pre = prm.jumps_in(0, t - horizon, t);
            if (own.empty() && pre.size() == n_presyn) {
                FoundSite f;
                f.seed = seed;
                f.t = t;
                for (const auto& s : pre) f.presyn.push_back(s.time);
                f.ok = true;
                return f;
            }
        }
    }
    return {};
}

}  // namespace

TEST_CASE("tail error and horizon selection") {
    Network net = cascade_pair(0.2, 0.5, 2.0);
    double gamma = network_gamma(net);
    double e5 = cascade_tail_error(net, 1, 5.0, gamma);
    double e8 = cascade_tail_error(net, 1, 8.0, gamma);
    CHECK(e5 > e8);
    CHECK(e5 == Catch::Approx(gamma * 0.2 * 0.5 * std::exp(-10.0) / 2.0));
    double h = choose_horizon(net, 1e-9);
    CHECK(cascade_tail_error(net, 1, h, gamma) <= 1e-9);
    CHECK(cascade_tail_error(net, 1, h - 1.0, gamma) > 1e-9);
}

TEST_CASE("empty environment: mu(0) = 1 and p0 = phi(0)") {
    Network net = cascade_pair(0.2, 0.5, 2.0, 0.3, 0.1);
    GrowingNeighborhoods nbhd(net);
    FoundSite f = find_site(net, 6.0, 0);
    REQUIRE(f.ok);
    PrmRealization prm(net, f.seed);
    CascadeDecomposition cd(net, nbhd, prm, 1, f.t, 6.0);
    CHECK(cd.jumps().empty());
    CHECK(cd.mu(0) == Catch::Approx(1.0));
    std::vector<signed char> x;
    RPair r = cd.r_values(0, x);
    CHECK(r.r1 == Catch::Approx(0.3));  // phi(0)
    CHECK(r.r1 + r.r0 == Catch::Approx(1.0));
    CHECK(cd.p_k(0, x) == Catch::Approx(0.3));
}

TEST_CASE("single presynaptic jump: r-values, alpha gap and identity") {
    Network net = cascade_pair(0.5, 0.5, 1.0, 0.3, 0.1);
    GrowingNeighborhoods nbhd(net);
    FoundSite f = find_site(net, 6.0, 1);
    REQUIRE(f.ok);
    PrmRealization prm(net, f.seed);
    CascadeDecomposition cd(net, nbhd, prm, 1, f.t, 6.0);
    REQUIRE(cd.jumps().size() == 1);
    double s = f.presyn[0];
    double gsum = 0.5 * std::exp(-(f.t - s));
    const auto& phi = net.neuron(1).phi;

    // k = 0: the jump is a free site
    std::vector<signed char> x{0};
    RPair r0 = cd.r_values(0, x);
    CHECK(r0.r1 == Catch::Approx(phi(0.0)));
    CHECK(r0.r0 == Catch::Approx(1.0 - phi(gsum)));
    CHECK(cd.mu(0) == Catch::Approx(1.0 - (phi(gsum) - phi(0.0))));

    // perturbing x at a site outside the level-0 neighbourhood changes nothing
    std::vector<signed char> x1{1};
    RPair r0b = cd.r_values(0, x1);
    CHECK(r0.r1 == r0b.r1);
    CHECK(r0.r0 == r0b.r0);

    // the missing mass is recovered at the level where the jump enters
    double total = 0.0;
    for (std::size_t k = 0; k <= cd.full_level(); ++k) total += cd.mu(k);
    CHECK(total == Catch::Approx(1.0));

    // convex decomposition identity for both decision patterns
    for (signed char v : {0, 1}) {
        std::vector<signed char> xx{v};
        CHECK(cd.verify_decomposition(xx, cd.full_level()) <= 1e-12);
        double want = v ? phi(gsum) : phi(0.0);
        CHECK(cd.p_full(xx) == Catch::Approx(want));
    }
}

TEST_CASE("own jump fixes the memory cutoff") {
    Network net = cascade_pair(0.5, 0.5, 1.0, 0.3, 0.1);
    GrowingNeighborhoods nbhd(net);
    // find a site with one presyn jump and one own jump, own more recent
    for (std::uint64_t seed = 1; seed < 8000; ++seed) {
        PrmRealization prm(net, seed);
        for (double t : {20.0, 35.0, 50.0}) {
            auto own = prm.jumps_in(1, t - 6.0, t);
            auto pre = prm.jumps_in(0, t - 6.0, t);
            if (own.size() != 1 || pre.size() != 1) continue;
            if (own[0].time <= pre[0].time) continue;
            CascadeDecomposition cd(net, nbhd, prm, 1, t, 6.0);
            REQUIRE(cd.jumps().size() == 2);
            // accepted own spike after the presyn jump erases its influence
            std::vector<signed char> x(2, 0);
            for (std::size_t m = 0; m < cd.jumps().size(); ++m)
                x[m] = 1;
            double p_all = cd.p_full(x);
            CHECK(p_all == Catch::Approx(net.neuron(1).phi(0.0)));
            // rejected own spike keeps the presyn influence
            std::vector<signed char> y(2, 0);
            for (std::size_t m = 0; m < cd.jumps().size(); ++m)
                y[m] = cd.jumps()[m].own ? 0 : 1;
            double g = 0.5 * std::exp(-(t - pre[0].time));
            CHECK(cd.p_full(y) == Catch::Approx(net.neuron(1).phi(g)));
            CHECK(cd.verify_decomposition(x, cd.full_level()) <= 1e-12);
            CHECK(cd.verify_decomposition(y, cd.full_level()) <= 1e-12);
            return;
        }
    }
    FAIL("no suitable environment found");
}

TEST_CASE("decomposition identity on random environments") {
    Network net = cascade_pair(0.3, 0.4, 1.5, 0.3, 0.1);
    GrowingNeighborhoods nbhd(net);
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        PrmRealization prm(net, seed);
        for (double t : {10.0, 25.0}) {
            CascadeDecomposition cd(net, nbhd, prm, 1, t, 6.0);
            std::size_t n = cd.jumps().size();
            if (n > 7) continue;
            for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
                std::vector<signed char> x(n, 0);
                for (std::size_t b = 0; b < n; ++b)
                    x[b] = (mask >> b) & 1 ? 1 : 0;
                CHECK(cd.verify_decomposition(x, cd.full_level()) <= 1e-12);
                ++checked;
            }
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("realized mu bound holds on sampled environments") {
    Network net = cascade_pair(0.3, 0.4, 1.5, 0.3, 0.1);
    GrowingNeighborhoods nbhd(net);
    std::size_t environments = 0;
    for (std::uint64_t seed = 1; seed <= 600 && environments < 1000; ++seed) {
        PrmRealization prm(net, seed);
        for (double t : {10.0, 25.0}) {
            CascadeDecomposition cd(net, nbhd, prm, 1, t, 6.0);
            if (cd.jumps().size() > 10) continue;
            ++environments;
            for (std::size_t k = 1; k <= cd.full_level(); ++k)
                CHECK(cd.mu(k) <= cd.realized_mu_bound(k) + 1e-12);
        }
    }
    CHECK(environments >= 1000);
}

TEST_CASE("alpha is monotone and reaches 1 at the full level") {
    Network net = cascade_pair(0.3, 0.4, 1.5, 0.3, 0.1);
    GrowingNeighborhoods nbhd(net);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        PrmRealization prm(net, seed);
        CascadeDecomposition cd(net, nbhd, prm, 1, 15.0, 6.0);
        if (cd.jumps().size() > 10) continue;
        double prev = 0.0;
        for (std::size_t k = 0; k <= cd.full_level(); ++k) {
            double a = cd.alpha(k);
            CHECK(a >= prev - 1e-15);
            CHECK(cd.mu(k) >= -1e-15);
            prev = a;
        }
        CHECK(cd.alpha(cd.full_level()) == Catch::Approx(1.0));
    }
}

TEST_CASE("sample_level inverse CDF on a realized environment") {
    Network net = cascade_pair(0.5, 0.5, 1.0, 0.3, 0.1);
    GrowingNeighborhoods nbhd(net);
    FoundSite f = find_site(net, 6.0, 1);
    REQUIRE(f.ok);
    PrmRealization prm(net, f.seed);
    CascadeDecomposition cd(net, nbhd, prm, 1, f.t, 6.0);
    double a0 = cd.alpha(0);
    CHECK(cd.sample_level(a0 * 0.5) == 0);
    std::size_t k = cd.sample_level(a0 + 0.5 * (1.0 - a0));
    CHECK(k >= 1);
    CHECK(cd.alpha(k) >= a0 + 0.5 * (1.0 - a0));
    CHECK(cd.alpha(k - 1) < a0 + 0.5 * (1.0 - a0));
}

TEST_CASE("enumeration budget aborts loudly on dense environments") {
    Network net = cascade_pair(0.3, 3.0, 1.0, 0.3, 0.1);
    GrowingNeighborhoods nbhd(net);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        PrmRealization prm(net, seed);
        CascadeDecomposition cd(net, nbhd, prm, 1, 20.0, 8.0, /*budget=*/4);
        if (cd.jumps().size() < 4) continue;
        CHECK_THROWS_AS(cd.alpha(cd.full_level()),
                        EnumerationBudgetExceeded);
        return;
    }
    FAIL("no dense environment found");
}
