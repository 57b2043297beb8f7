#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "bsfscale/cost_model.hpp"
#include "doctest.h"

using namespace bsf;

namespace {

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(std::log10(lo), std::log10(hi));
    return std::pow(10.0, dist(rng));
}

BsfMCosts random_m_costs(std::mt19937_64& rng, int workers) {
    BsfMCosts c;
    c.workers = workers;
    c.latency = log_uniform(rng, 1e-7, 1e-3);
    c.send_time = log_uniform(rng, 1e-7, 1e-1);
    c.work_time = log_uniform(rng, 1e-6, 1e+1);
    c.receive_time = log_uniform(rng, 1e-7, 1e-1);
    c.process_time = log_uniform(rng, 1e-7, 1e-1);
    return c;
}

BsfMRCosts random_mr_costs(std::mt19937_64& rng, int workers) {
    BsfMRCosts c;
    c.workers = workers;
    c.latency = log_uniform(rng, 1e-7, 1e-3);
    c.send_time = log_uniform(rng, 1e-7, 1e-1);
    c.work_time = log_uniform(rng, 1e-6, 1e+1);
    c.result_time = log_uniform(rng, 1e-7, 1e-1);
    c.process_time = log_uniform(rng, 1e-7, 1e-1);
    c.combine_time = log_uniform(rng, 1e-9, 1e-3);
    c.reduce_length = std::uniform_int_distribution<std::int64_t>(1, 4096)(rng);
    return c;
}

template <class Costs>
int integer_argmax(Costs c, int k_max) {
    int best_k = 1;
    double best = -1.0;
    for (int k = 1; k <= k_max; ++k) {
        c.workers = k;
        const double a = speedup(c);
        if (a > best) {
            best = a;
            best_k = k;
        }
    }
    return best_k;
}

}  // namespace

TEST_SUITE("cost_model") {

TEST_CASE("tornado preset carries the published constants") {
    const MachineConstants mc = tornado_preset();
    CHECK(mc.latency == 1.5e-5);
    CHECK(mc.op_time == 2.9e-8);
    CHECK(mc.transfer_time == 1.9e-7);
    CHECK_NOTHROW(mc.validate());
}

TEST_CASE("machine constants validation rejects nonpositive and non-finite values") {
    MachineConstants mc = tornado_preset();
    mc.latency = 0.0;
    CHECK_THROWS_AS(mc.validate(), std::domain_error);
    mc = tornado_preset();
    mc.op_time = -1e-9;
    CHECK_THROWS_AS(mc.validate(), std::domain_error);
    mc = tornado_preset();
    mc.transfer_time = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(mc.validate(), std::domain_error);
    mc = tornado_preset();
    mc.latency = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(mc.validate(), std::domain_error);
}

TEST_CASE("jacobi-m cost instantiation") {
    const MachineConstants mc = tornado_preset();
    const BsfMCosts c = jacobi_m_costs(1500, 20, mc);
    CHECK(c.workers == 20);
    CHECK(c.latency == mc.latency);
    CHECK(rel_diff(c.send_time, 2.85e-4) < 1e-12);
    CHECK(rel_diff(c.work_time, 0.1305) < 1e-12);
    CHECK(rel_diff(c.receive_time, 2.85e-4) < 1e-12);
    CHECK(rel_diff(c.process_time, 8.7058e-5) < 1e-12);

    const BsfMCosts unit = jacobi_m_costs(1, 1, mc);
    CHECK(unit.work_time == 2.0 * mc.op_time);

    CHECK_THROWS_AS(jacobi_m_costs(0, 1, mc), std::invalid_argument);
    CHECK_THROWS_AS(jacobi_m_costs(10, 0, mc), std::invalid_argument);
}

TEST_CASE("jacobi-m operation counts") {
    const CostCounts counts = jacobi_m_counts(1500, 4);
    CHECK(counts.send_reals == 1500);
    CHECK(counts.map_ops == 2 * 1500 * std::int64_t{1500});
    CHECK(counts.result_reals == 375);
    CHECK(counts.master_ops == 3002);
    CHECK(counts.combine_ops == 0);
}

TEST_CASE("jacobi-mr cost instantiation") {
    const MachineConstants mc = tornado_preset();
    const BsfMRCosts c = jacobi_mr_costs(1500, 20, mc);
    CHECK(c.workers == 20);
    CHECK(rel_diff(c.send_time, 2.85e-4) < 1e-12);
    CHECK(rel_diff(c.result_time, 2.85e-4) < 1e-12);
    CHECK(rel_diff(c.work_time, 2.9e-8 * (1500.0 * 1500.0 + 1500.0 * 1480.0)) < 1e-15);
    CHECK(rel_diff(c.work_time, 0.12963) < 1e-12);
    CHECK(rel_diff(c.combine_time, 2.9e-8 * 1500.0) < 1e-15);
    CHECK(rel_diff(c.process_time, 3.0 * 2.9e-8 * 1500.0) < 1e-15);
    CHECK(c.reduce_length == 1500);

    // Workers equal to the dimension: no worker-side combine work remains.
    const BsfMRCosts full = jacobi_mr_costs(64, 64, mc);
    CHECK(rel_diff(full.work_time, mc.op_time * 64.0 * 64.0) < 1e-15);

    CHECK_THROWS_AS(jacobi_mr_costs(10, 11, mc), std::invalid_argument);
}

TEST_CASE("jacobi-mr operation counts") {
    const CostCounts counts = jacobi_mr_counts(1500);
    CHECK(counts.send_reals == 1500);
    CHECK(counts.map_ops == 1500 * std::int64_t{1500});
    CHECK(counts.result_reals == 1500);
    CHECK(counts.master_ops == 4500);
    CHECK(counts.combine_ops == 1500);
}

TEST_CASE("speedup is exactly one on a single worker") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 1200; ++trial) {
        const BsfMCosts m = random_m_costs(rng, 1);
        CHECK(speedup(m) == 1.0);
        const BsfMRCosts mr = random_mr_costs(rng, 1);
        CHECK(speedup(mr) == 1.0);
    }
}

TEST_CASE("efficiency equals speedup over workers") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> worker_dist(1, 512);
    for (int trial = 0; trial < 1200; ++trial) {
        const BsfMCosts m = random_m_costs(rng, worker_dist(rng));
        CHECK(rel_diff(efficiency(m), speedup(m) / m.workers) < 1e-12);
        const BsfMRCosts mr = random_mr_costs(rng, worker_dist(rng));
        CHECK(rel_diff(efficiency(mr), speedup(mr) / mr.workers) < 1e-12);
    }
}

TEST_CASE("integer argmax lies within one of the closed-form bound") {
    std::mt19937_64 rng(4242);
    int accepted = 0;
    while (accepted < 120) {
        BsfMCosts m = random_m_costs(rng, 1);
        const double bound_m = scalability_bound(m);
        if (bound_m >= 2.0 && bound_m <= 300.0) {
            ++accepted;
            const int k_max = static_cast<int>(std::ceil(4.0 * bound_m));
            CHECK(std::abs(integer_argmax(m, k_max) - bound_m) <= 1.0);
        }
        BsfMRCosts mr = random_mr_costs(rng, 1);
        const double bound_mr = scalability_bound(mr);
        if (bound_mr >= 2.0 && bound_mr <= 300.0) {
            const int k_max = static_cast<int>(std::ceil(4.0 * bound_mr));
            CHECK(std::abs(integer_argmax(mr, k_max) - bound_mr) <= 1.0);
        }
    }
}

TEST_CASE("speedup is unimodal in the worker count") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        BsfMCosts m = random_m_costs(rng, 1);
        const int argmax = integer_argmax(m, 200);
        double prev = std::numeric_limits<double>::infinity();
        for (int k = argmax; k <= 200; ++k) {
            m.workers = k;
            const double a = speedup(m);
            CHECK(a <= prev * (1.0 + 1e-12));
            prev = a;
        }
    }
}

TEST_CASE("scalability bound closed forms") {
    BsfMCosts m;
    m.workers = 1;
    m.latency = 1e-5;
    m.send_time = 3e-4;
    m.work_time = 2.0 * 1e-5 + 3e-4;  // equals 2L + t_s
    m.receive_time = 1e-4;
    m.process_time = 1e-4;
    CHECK(scalability_bound(m) == 1.0);

    m.work_time *= 4.0;
    CHECK(rel_diff(scalability_bound(m), 2.0) < 1e-12);

    m.work_time = 0.0;
    CHECK_THROWS_AS(scalability_bound(m), std::domain_error);

    BsfMRCosts mr;
    mr.workers = 1;
    mr.latency = 1e-5;
    mr.send_time = 2e-4;
    mr.result_time = 1e-4;
    mr.combine_time = 1e-6;
    mr.reduce_length = 10;
    mr.work_time = (2e-5 + 2e-4 + 1e-4 + 1e-6) - 10.0 * 1e-6;  // t_w + l t_a = 2L+t_s+t_r+t_a
    mr.process_time = 5e-5;
    CHECK(rel_diff(scalability_bound(mr), 1.0) < 1e-12);

    // Doubling t_w grows the bound, but by less than a factor of two.
    BsfMRCosts grown = mr;
    grown.work_time *= 2.0;
    const double before = scalability_bound(mr);
    const double after = scalability_bound(grown);
    CHECK(after > before);
    CHECK(after < 2.0 * before);
}

TEST_CASE("paper-constant bounds match the frozen expectations") {
    const MachineConstants mc = tornado_preset();
    CHECK(rel_diff(scalability_bound(jacobi_m_costs(1500, 1, mc)), 20.354009783964297) < 1e-12);
    CHECK(rel_diff(scalability_bound(jacobi_m_costs(10000, 1, mc)), 54.81953435729146) < 1e-12);
    CHECK(rel_diff(jacobi_mr_scalability_bound(1500, mc), 17.40744315714153) < 1e-9);
    CHECK(rel_diff(jacobi_mr_scalability_bound(5000, mc), 32.340884429254444) < 1e-9);
    CHECK(rel_diff(jacobi_mr_scalability_bound(10000, mc), 45.917517650191975) < 1e-9);
    CHECK(rel_diff(jacobi_mr_scalability_bound(16000, mc), 58.17031864118443) < 1e-9);
}

TEST_CASE("paper-constant speedups match the frozen expectations") {
    const MachineConstants mc = tornado_preset();
    CHECK(rel_diff(speedup(jacobi_m_costs(1500, 20, mc)), 9.940629040199717) < 1e-12);
    CHECK(rel_diff(efficiency(jacobi_m_costs(1500, 20, mc)), 0.49703145200998583) < 1e-12);
    CHECK(rel_diff(speedup(jacobi_mr_costs(1500, 20, mc)), 8.616823047442843) < 1e-12);
}

TEST_CASE("bound grows like the square root of the dimension") {
    const MachineConstants mc = tornado_preset();
    const std::vector<std::size_t> dims{1500, 5000, 10000, 16000};
    for (const bool mr : {false, true}) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const std::size_t n : dims) {
            const double bound = mr ? jacobi_mr_scalability_bound(n, mc)
                                    : scalability_bound(jacobi_m_costs(n, 1, mc));
            const double ratio = bound / std::sqrt(static_cast<double>(n));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK((hi - lo) / lo < 0.25);
    }
}

TEST_CASE("predict_curve rows and bound") {
    const MachineConstants mc = tornado_preset();
    const PredictionCurve single = predict_curve(Variant::BsfM, 1500, 1, mc);
    REQUIRE(single.points.size() == 1);
    CHECK(single.points[0].workers == 1);
    CHECK(single.points[0].speedup == 1.0);
    CHECK(single.points[0].efficiency == 1.0);

    const PredictionCurve curve = predict_curve(Variant::BsfM, 1500, 64, mc);
    REQUIRE(curve.points.size() == 64);
    CHECK(curve.n == 1500);
    CHECK(curve.variant == Variant::BsfM);
    for (int k = 1; k <= 64; ++k) {
        CHECK(curve.points[static_cast<std::size_t>(k - 1)].workers == k);
        const double direct = speedup(jacobi_m_costs(1500, k, mc));
        CHECK(curve.points[static_cast<std::size_t>(k - 1)].speedup == direct);
    }
    const int best = optimal_workers(curve);
    CHECK((best == 20 || best == 21));

    const PredictionCurve mr_curve = predict_curve(Variant::BsfMR, 16000, 128, mc);
    const int mr_best = optimal_workers(mr_curve);
    for (std::size_t i = 1; i < mr_curve.points.size(); ++i) {
        if (mr_curve.points[i].workers <= mr_best) {
            CHECK(mr_curve.points[i].speedup >= mr_curve.points[i - 1].speedup);
        } else {
            CHECK(mr_curve.points[i].speedup <= mr_curve.points[i - 1].speedup);
        }
    }

    CHECK_THROWS_AS(predict_curve(Variant::BsfM, 1500, 0, mc), std::invalid_argument);
}

TEST_CASE("optimal_workers breaks ties toward fewer workers") {
    PredictionCurve curve;
    curve.points.push_back({1, 1.0, 1.0});
    CHECK(optimal_workers(curve) == 1);

    curve.points.push_back({2, 3.5, 1.75});
    curve.points.push_back({3, 3.5, 3.5 / 3.0});
    curve.points.push_back({4, 2.0, 0.5});
    CHECK(optimal_workers(curve) == 2);

    PredictionCurve empty;
    CHECK_THROWS_AS(optimal_workers(empty), std::invalid_argument);
}

TEST_CASE("variant names") {
    CHECK(std::string(variant_name(Variant::BsfM)) == "bsf-m");
    CHECK(std::string(variant_name(Variant::BsfMR)) == "bsf-mr");
}

}  // TEST_SUITE
