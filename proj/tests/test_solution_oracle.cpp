#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "balpart/io.hpp"
#include "balpart/oracle.hpp"
#include "balpart/rng.hpp"
#include "balpart/solution.hpp"

using namespace balpart;

namespace {

Instance unit_instance(int n, int k, double wl = 0.0, double wu = 1e9) {
    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.weights.assign(n, 1.0);
    inst.dist.assign(static_cast<std::size_t>(n) * n, 1.0);
    for (int i = 0; i < n; ++i) inst.dist[static_cast<std::size_t>(i) * n + i] = 0.0;
    inst.wl = wl;
    inst.wu = wu;
    return inst;
}

long long count_formula(int n, int k) {
    SizeBounds sb = size_bounds(n, k);
    auto fact = [](int m) {
        long long f = 1;
        for (int i = 2; i <= m; ++i) f *= i;
        return f;
    };
    long long denom = 1;
    for (int c = 0; c < sb.big_classes; ++c) denom *= fact(sb.ceil_size);
    for (int c = 0; c < k - sb.big_classes; ++c) denom *= fact(sb.floor_size);
    denom *= fact(sb.big_classes) * fact(k - sb.big_classes);
    return fact(n) / denom;
}

// random balanced assignment via a seeded shuffle of the round-robin start
std::vector<int> random_balanced_assign(int n, int k, SplitMix64& rng) {
    std::vector<int> assign(n);
    for (int v = 0; v < n; ++v) assign[v] = v % k;
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.uniform_int(0, i));
        std::swap(assign[i], assign[j]);
    }
    return assign;
}

}  // namespace

TEST_CASE("initial partition layout") {
    Instance i52 = unit_instance(5, 2);
    Partition p = initial_partition(i52);
    CHECK(p.nodes_of(0) == std::vector<int>{0, 2, 4});
    CHECK(p.nodes_of(1) == std::vector<int>{1, 3});

    Instance i63 = unit_instance(6, 3);
    Partition q = initial_partition(i63);
    for (int c = 0; c < 3; ++c) CHECK(q.size_of(c) == 2);
    CHECK(q.large_classes().empty());

    Instance i73 = unit_instance(7, 3);
    Partition r = initial_partition(i73);
    CHECK(r.size_of(0) == 3);
    CHECK(r.size_of(1) == 2);
    CHECK(r.size_of(2) == 2);
    CHECK(r.large_classes() == std::vector<int>{0});
    CHECK(r.small_classes() == std::vector<int>{1, 2});
}

TEST_CASE("partition rejects unbalanced assignments") {
    Instance inst = unit_instance(6, 2);
    CHECK_THROWS(Partition::from_assign(inst, {0, 0, 0, 0, 0, 1}));
    CHECK_THROWS(Partition::from_assign(inst, {0, 0, 0, 1, 1, 5}));
}

TEST_CASE("evaluate: unit distances give one edge per two-node class") {
    Instance inst = unit_instance(4, 2);
    Partition p = Partition::from_assign(inst, {0, 0, 1, 1});
    Evaluation ev = evaluate(inst, p);
    CHECK(ev.d == doctest::Approx(2.0));
    CHECK(ev.f == doctest::Approx(2.0));
    CHECK(ev.feasible());
}

TEST_CASE("evaluate: weight window penalty uses 10000") {
    Instance inst = unit_instance(4, 2);
    inst.weights = {1.0, 1.0, 1.0, 3.0};
    inst.wl = 1.5;
    inst.wu = 3.5;
    // class {0,1} weighs 2 (ok), class {2,3} weighs 4 (above)
    Partition p = Partition::from_assign(inst, {0, 0, 1, 1});
    Evaluation ev = evaluate(inst, p);
    CHECK(ev.infeasible_classes == std::vector<int>{1});
    CHECK(ev.f == doctest::Approx(ev.d + 10000.0));
}

TEST_CASE("evaluate: d_ij = i + j hand example") {
    Instance inst = unit_instance(6, 2);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (i != j) inst.dist[static_cast<std::size_t>(i) * 6 + j] = i + j;
    Partition p = Partition::from_assign(inst, {0, 0, 0, 1, 1, 1});
    CHECK(evaluate(inst, p).d == doctest::Approx(30.0));  // (1+2+3) + (7+8+9)
}

TEST_CASE("evaluate: forbidden pairs count as penalty hits, not distance") {
    Instance inst = unit_instance(4, 2);
    inst.forbidden = {{0, 1}};
    Partition p = Partition::from_assign(inst, {0, 0, 1, 1});
    Evaluation ev = evaluate(inst, p);
    CHECK(ev.forbidden_hits == 1);
    CHECK(ev.d == doctest::Approx(1.0));  // only the {2,3} edge
    CHECK(ev.f == doctest::Approx(1.0 + 10000.0));
    CHECK_FALSE(ev.feasible());
}

TEST_CASE("incidence vector has exactly intra_edges ones") {
    Instance a = unit_instance(4, 2);
    Partition pa = Partition::from_assign(a, {0, 1, 0, 1});
    std::vector<double> xa = to_incidence(pa);
    CHECK(std::count(xa.begin(), xa.end(), 1.0) == 2);

    Instance b = unit_instance(23, 7);
    Partition pb = initial_partition(b);
    std::vector<double> xb = to_incidence(pb);
    CHECK(std::count(xb.begin(), xb.end(), 1.0) == 27);
}

TEST_CASE("evaluate agrees with the incidence-vector objective") {
    SplitMix64 rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        int n = 6 + static_cast<int>(rng.uniform_int(0, 6));
        int k = 2 + static_cast<int>(rng.uniform_int(0, 1));
        if (n < 2 * k) continue;
        Instance inst = generate_random(n, k, rng.next());
        Partition p = Partition::from_assign(inst, random_balanced_assign(n, k, rng));
        std::vector<double> x = to_incidence(p);
        double obj = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) obj += inst.d(i, j) * x[edge_index(i, j, n)];
        Evaluation ev = evaluate(inst, p);
        CHECK(ev.d == doctest::Approx(obj).epsilon(1e-9));
    }
}

TEST_CASE("random balanced partitions always have beta intra edges") {
    SplitMix64 rng(123);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 6 + static_cast<int>(rng.uniform_int(0, 34));
        int k = 2 + static_cast<int>(rng.uniform_int(0, n / 2 - 2));
        Instance inst = unit_instance(n, k);
        Partition p = Partition::from_assign(inst, random_balanced_assign(n, k, rng));
        std::vector<double> x = to_incidence(p);
        long long ones = std::count(x.begin(), x.end(), 1.0);
        CHECK(ones == size_bounds(n, k).intra_edges);
    }
}

TEST_CASE("partition moves keep caches exact") {
    SplitMix64 rng(5);
    Instance inst = generate_random(9, 3, 17);
    Partition p = initial_partition(inst);
    for (int step = 0; step < 200; ++step) {
        if (rng.next_double() < 0.3) {
            std::vector<int> large = p.large_classes(), small = p.small_classes();
            if (!large.empty() && !small.empty()) {
                int c = large[rng.uniform_int(0, static_cast<int>(large.size()) - 1)];
                int v = p.nodes_of(c)[rng.uniform_int(0, p.size_of(c) - 1)];
                int to = small[rng.uniform_int(0, static_cast<int>(small.size()) - 1)];
                p.move_node(inst, v, to);
            }
        } else {
            int v = static_cast<int>(rng.uniform_int(0, inst.n - 1));
            int u = static_cast<int>(rng.uniform_int(0, inst.n - 1));
            if (u != v && p.class_of(v) != p.class_of(u)) p.swap_nodes(inst, v, u);
        }
        Partition rebuilt = Partition::from_assign(inst, p.assign());
        for (int c = 0; c < inst.k; ++c) {
            CHECK(p.weight_of(c) == doctest::Approx(rebuilt.weight_of(c)).epsilon(1e-12));
            CHECK(p.size_of(c) == rebuilt.size_of(c));
        }
    }
}

TEST_CASE("oracle counts match the multinomial formula") {
    CHECK(enumerate_partitions(unit_instance(4, 2)).enumerated_count == 3);
    CHECK(enumerate_partitions(unit_instance(6, 2)).enumerated_count == 10);
    CHECK(enumerate_partitions(unit_instance(5, 2)).enumerated_count == 10);
    for (int n = 4; n <= 12; ++n)
        for (int k = 2; 2 * k <= n; ++k) {
            Instance inst = unit_instance(n, k);
            CHECK(enumerate_partitions(inst).enumerated_count == count_formula(n, k));
        }
}

TEST_CASE("oracle optimum on a crafted instance") {
    Instance inst = unit_instance(4, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) inst.dist[static_cast<std::size_t>(i) * 4 + j] = 10.0;
    inst.dist[0 * 4 + 1] = inst.dist[1 * 4 + 0] = 1.0;
    inst.dist[2 * 4 + 3] = inst.dist[3 * 4 + 2] = 1.0;
    auto opt = oracle_optimum(inst);
    REQUIRE(opt.has_value());
    CHECK(opt->first == doctest::Approx(2.0));
    CHECK(opt->second.class_of(0) == opt->second.class_of(1));
    CHECK(opt->second.class_of(2) == opt->second.class_of(3));
}

TEST_CASE("oracle reports infeasibility") {
    Instance inst = unit_instance(4, 2);
    inst.weights = {5.0, 5.0, 5.0, 0.2};
    inst.wl = 6.0;
    inst.wu = 9.0;
    CHECK_FALSE(enumerate_partitions(inst).feasible());
    CHECK_FALSE(oracle_optimum(inst).has_value());
}

TEST_CASE("optimal partition set is invariant under distance scaling") {
    Instance inst = generate_random(8, 2, 31);
    EnumerationResult base = enumerate_partitions(inst);
    Instance scaled = inst;
    for (double& d : scaled.dist) d *= 3.5;
    EnumerationResult twice = enumerate_partitions(scaled);
    CHECK(base.optimal_assigns == twice.optimal_assigns);
    CHECK(twice.optimum == doctest::Approx(3.5 * base.optimum).epsilon(1e-12));
}

TEST_CASE("oracle respects forbidden pairs and the weight window") {
    Instance inst = generate_random(8, 2, 7);
    inst.forbidden = {{0, 1}};
    long long feas_with = enumerate_partitions(inst).feasible_count;
    Instance free_inst = inst;
    free_inst.forbidden.clear();
    long long feas_without = enumerate_partitions(free_inst).feasible_count;
    CHECK(feas_with < feas_without);
    enumerate_partitions(inst, [&](const Partition& p, const Evaluation& ev) {
        CHECK(ev.feasible());
        CHECK(p.class_of(0) != p.class_of(1));
    });
}

TEST_CASE("oracle cap") {
    Instance inst = unit_instance(14, 2);
    CHECK_THROWS(enumerate_partitions(inst));
    CHECK_NOTHROW(enumerate_partitions(inst, nullptr, 14));
}

TEST_CASE("dummy transform preserves the optimum") {
    SplitMix64 rng(2024);
    for (int rep = 0; rep < 10; ++rep) {
        int n = 7 + static_cast<int>(rng.uniform_int(0, 3));  // 7..10
        int k = 3;
        if (n % k == 0) ++n;
        Instance inst = generate_random(n, k, rng.next());
        Instance ext = add_dummies(inst);
        auto base = oracle_optimum(inst);
        auto lifted = oracle_optimum(ext, 14);
        CHECK(base.has_value() == lifted.has_value());
        if (base && lifted) CHECK(base->first == doctest::Approx(lifted->first).epsilon(1e-9));
    }
}

TEST_CASE("partition file round trip") {
    Instance inst = generate_random(9, 3, 11);
    Partition p = initial_partition(inst);
    Evaluation ev = evaluate(inst, p);
    std::string path = "partition_roundtrip_test.json";
    save_partition(inst, p, ev, path);
    Partition back = load_partition(inst, path);
    CHECK(back.assign() == p.assign());
    std::remove(path.c_str());
}
