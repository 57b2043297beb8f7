#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bsf {

/// Calibrated hardware timings. All values are seconds.
struct MachineConstants {
    double latency = 0.0;        // one-byte message latency (L)
    double op_time = 0.0;        // one arithmetic/comparison operation (tau_op)
    double transfer_time = 0.0;  // one transferred double, latency excluded (tau_tr)

    /// Throws std::domain_error unless all three are strictly positive and finite.
    void validate() const;
};

/// Cluster timings published for the "Tornado SUSU" system; selectable on the
/// CLI as preset "paper-tornado".
MachineConstants tornado_preset();

/// Per-iteration cost parameters of a Map-only farm algorithm.
struct BsfMCosts {
    int workers = 1;             // K
    double latency = 0.0;        // L
    double send_time = 0.0;      // t_s: master sending one order to one worker
    double work_time = 0.0;      // t_w: one-worker total order time
    double receive_time = 0.0;   // t_R: master receiving results from all workers
    double process_time = 0.0;   // t_p: master evaluating results + stop check

    void validate() const;
};

/// Per-iteration cost parameters of a Map+Reduce farm algorithm.
struct BsfMRCosts {
    int workers = 1;             // K
    double latency = 0.0;        // L
    double send_time = 0.0;      // t_s
    double work_time = 0.0;      // t_w
    double process_time = 0.0;   // t_p
    double result_time = 0.0;    // t_r: one worker's result sent to the master
    double combine_time = 0.0;   // t_a: one application of the Reduce operation
    std::int64_t reduce_length = 1;  // l

    void validate() const;
};

/// Raw operation counts behind the Jacobi cost instantiations.
struct CostCounts {
    std::int64_t send_reals = 0;    // reals master -> one worker
    std::int64_t map_ops = 0;       // arithmetic ops in the Map step
    std::int64_t result_reals = 0;  // reals one worker -> master
    std::int64_t master_ops = 0;    // master-side ops per iteration
    std::int64_t combine_ops = 0;   // ops per Reduce combination (Map/Reduce only)
};

enum class Variant { BsfM, BsfMR };

struct CurvePoint {
    int workers = 0;
    double speedup = 0.0;
    double efficiency = 0.0;
};

/// Predicted speedup/efficiency over a range of worker counts, plus the
/// real-valued worker count that maximizes the closed-form speedup.
struct PredictionCurve {
    Variant variant = Variant::BsfM;
    std::size_t n = 0;
    std::vector<CurvePoint> points;  // sorted by strictly increasing workers
    double scalability_bound = 0.0;
};

// Speedup a(K); exactly 1.0 at K = 1 for any valid costs.
double speedup(const BsfMCosts& c);
double speedup(const BsfMRCosts& c);

// Parallel efficiency e(K) = a(K) / K.
double efficiency(const BsfMCosts& c);
double efficiency(const BsfMRCosts& c);

// Worker count maximizing the speedup; the integer argmax lies within +-1.
// Requires work_time > 0 (resp. work_time + reduce_length*combine_time > 0).
double scalability_bound(const BsfMCosts& c);
double scalability_bound(const BsfMRCosts& c);

// Cost parameters of one Jacobi iteration of dimension n on K workers.
BsfMCosts jacobi_m_costs(std::size_t n, int workers, const MachineConstants& mc);
BsfMRCosts jacobi_mr_costs(std::size_t n, int workers, const MachineConstants& mc);  // requires workers <= n

CostCounts jacobi_m_counts(std::size_t n, int workers);
CostCounts jacobi_mr_counts(std::size_t n);

/// Map/Reduce bound for the Jacobi instantiation, where the work time itself
/// depends on K: solved by fixed-point iteration K <- bound(K) from K = 1,
/// stopping at |step| < 1e-9 or 100 iterations.
double jacobi_mr_scalability_bound(std::size_t n, const MachineConstants& mc);

/// Rows for K = 1..max_workers using the Jacobi cost instantiation of the
/// given variant.
PredictionCurve predict_curve(Variant variant, std::size_t n, int max_workers,
                              const MachineConstants& mc);

/// Worker count of the row with maximal speedup; ties break toward smaller K.
int optimal_workers(const PredictionCurve& curve);

const char* variant_name(Variant v);

}  // namespace bsf
