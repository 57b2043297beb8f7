#include "bsfscale/cost_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bsf {

namespace {

void require_positive_finite(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::domain_error(std::string(name) + " must be positive and finite");
    }
}

void require_time(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::domain_error(std::string(name) + " must be nonnegative and finite");
    }
}

}  // namespace

void MachineConstants::validate() const {
    require_positive_finite(latency, "latency");
    require_positive_finite(op_time, "op_time");
    require_positive_finite(transfer_time, "transfer_time");
}

MachineConstants tornado_preset() {
    return MachineConstants{1.5e-5, 2.9e-8, 1.9e-7};
}

void BsfMCosts::validate() const {
    if (workers < 1) throw std::domain_error("workers must be >= 1");
    require_positive_finite(latency, "latency");
    require_time(send_time, "send_time");
    require_time(work_time, "work_time");
    require_time(receive_time, "receive_time");
    require_time(process_time, "process_time");
}

void BsfMRCosts::validate() const {
    if (workers < 1) throw std::domain_error("workers must be >= 1");
    if (reduce_length < 1) throw std::domain_error("reduce_length must be >= 1");
    require_positive_finite(latency, "latency");
    require_time(send_time, "send_time");
    require_time(work_time, "work_time");
    require_time(process_time, "process_time");
    require_time(result_time, "result_time");
    require_time(combine_time, "combine_time");
}

// The K = 1 value must be exactly 1.0, so numerator and denominator are
// grouped identically: at K = 1 both reduce to (round_trip + master) + work
// with the same association.
double speedup(const BsfMCosts& c) {
    c.validate();
    const double k = static_cast<double>(c.workers);
    const double round_trip = 2.0 * c.latency + c.send_time;
    const double master = c.receive_time + c.process_time;
    const double sequential = (round_trip + master) + c.work_time;
    const double parallel = (k * k * round_trip + k * master) + c.work_time;
    return k * sequential / parallel;
}

double speedup(const BsfMRCosts& c) {
    c.validate();
    const double k = static_cast<double>(c.workers);
    const double exchange = 2.0 * c.latency + c.send_time + c.result_time;
    const double reduced_work =
        c.work_time + static_cast<double>(c.reduce_length) * c.combine_time;
    const double sequential = (exchange + reduced_work) + c.process_time;
    // K*(exchange + t_a) + reduced_work/K - t_a regrouped as
    // K*exchange + (K-1)*t_a + reduced_work/K, exact at K = 1.
    const double parallel =
        ((k * exchange + (k - 1.0) * c.combine_time) + reduced_work / k) + c.process_time;
    return sequential / parallel;
}

double efficiency(const BsfMCosts& c) {
    return speedup(c) / static_cast<double>(c.workers);
}

double efficiency(const BsfMRCosts& c) {
    return speedup(c) / static_cast<double>(c.workers);
}

double scalability_bound(const BsfMCosts& c) {
    c.validate();
    if (!(c.work_time > 0.0)) {
        throw std::domain_error("scalability bound requires work_time > 0");
    }
    const double round_trip = 2.0 * c.latency + c.send_time;
    if (!(round_trip > 0.0)) {
        throw std::domain_error("scalability bound requires 2L + send_time > 0");
    }
    return std::sqrt(c.work_time / round_trip);
}

double scalability_bound(const BsfMRCosts& c) {
    c.validate();
    const double reduced_work =
        c.work_time + static_cast<double>(c.reduce_length) * c.combine_time;
    if (!(reduced_work > 0.0)) {
        throw std::domain_error("scalability bound requires work_time + l*combine_time > 0");
    }
    const double exchange = 2.0 * c.latency + c.send_time + c.result_time + c.combine_time;
    if (!(exchange > 0.0)) {
        throw std::domain_error("scalability bound requires a positive exchange time");
    }
    return std::sqrt(reduced_work / exchange);
}

BsfMCosts jacobi_m_costs(std::size_t n, int workers, const MachineConstants& mc) {
    mc.validate();
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    const double dn = static_cast<double>(n);
    BsfMCosts c;
    c.workers = workers;
    c.latency = mc.latency;
    c.send_time = mc.transfer_time * dn;
    c.work_time = 2.0 * mc.op_time * dn * dn;
    c.receive_time = mc.transfer_time * dn;
    c.process_time = 2.0 * mc.op_time * (dn + 1.0);
    return c;
}

BsfMRCosts jacobi_mr_costs(std::size_t n, int workers, const MachineConstants& mc) {
    mc.validate();
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (static_cast<std::size_t>(workers) > n) {
        throw std::invalid_argument("workers must not exceed the dimension");
    }
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(workers);
    BsfMRCosts c;
    c.workers = workers;
    c.latency = mc.latency;
    c.send_time = mc.transfer_time * dn;
    c.work_time = mc.op_time * (dn * dn + dn * (dn - dk));
    c.result_time = mc.transfer_time * dn;
    c.combine_time = mc.op_time * dn;
    c.process_time = 3.0 * mc.op_time * dn;
    c.reduce_length = static_cast<std::int64_t>(n);
    return c;
}

CostCounts jacobi_m_counts(std::size_t n, int workers) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    const auto sn = static_cast<std::int64_t>(n);
    CostCounts counts;
    counts.send_reals = sn;
    counts.map_ops = 2 * sn * sn;
    counts.result_reals = sn / workers;
    counts.master_ops = 2 * sn + 2;
    counts.combine_ops = 0;
    return counts;
}

CostCounts jacobi_mr_counts(std::size_t n) {
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    const auto sn = static_cast<std::int64_t>(n);
    CostCounts counts;
    counts.send_reals = sn;
    counts.map_ops = sn * sn;
    counts.result_reals = sn;
    counts.master_ops = 3 * sn;
    counts.combine_ops = sn;
    return counts;
}

double jacobi_mr_scalability_bound(std::size_t n, const MachineConstants& mc) {
    mc.validate();
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    const double dn = static_cast<double>(n);
    const double exchange =
        2.0 * mc.latency + 2.0 * mc.transfer_time * dn + mc.op_time * dn;
    double k = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double work = mc.op_time * (dn * dn + dn * (dn - k));
        const double reduced_work = work + dn * (mc.op_time * dn);
        const double next = std::sqrt(reduced_work / exchange);
        if (std::abs(next - k) < 1e-9) return next;
        k = next;
    }
    return k;
}

PredictionCurve predict_curve(Variant variant, std::size_t n, int max_workers,
                              const MachineConstants& mc) {
    if (max_workers < 1) throw std::invalid_argument("max_workers must be >= 1");
    PredictionCurve curve;
    curve.variant = variant;
    curve.n = n;
    curve.points.reserve(static_cast<std::size_t>(max_workers));
    for (int k = 1; k <= max_workers; ++k) {
        CurvePoint p;
        p.workers = k;
        if (variant == Variant::BsfM) {
            const BsfMCosts c = jacobi_m_costs(n, k, mc);
            p.speedup = speedup(c);
            p.efficiency = efficiency(c);
        } else {
            const BsfMRCosts c = jacobi_mr_costs(n, k, mc);
            p.speedup = speedup(c);
            p.efficiency = efficiency(c);
        }
        curve.points.push_back(p);
    }
    curve.scalability_bound = variant == Variant::BsfM
                                  ? scalability_bound(jacobi_m_costs(n, 1, mc))
                                  : jacobi_mr_scalability_bound(n, mc);
    return curve;
}

int optimal_workers(const PredictionCurve& curve) {
    if (curve.points.empty()) throw std::invalid_argument("prediction curve is empty");
    const CurvePoint* best = &curve.points.front();
    for (const CurvePoint& p : curve.points) {
        if (p.speedup > best->speedup) best = &p;
    }
    return best->workers;
}

const char* variant_name(Variant v) {
    return v == Variant::BsfM ? "bsf-m" : "bsf-mr";
}

}  // namespace bsf
