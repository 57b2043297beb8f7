#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bsfscale/cost_model.hpp"
#include "bsfscale/runtime.hpp"

namespace bsf {

/// Measured machine constants plus how they were obtained. Timestamp is
/// ISO-8601 UTC at second resolution.
struct CalibrationResult {
    MachineConstants constants;
    std::string timestamp;
    std::int64_t latency_round_trips = 0;
    std::int64_t op_multiply_adds = 0;
    std::int64_t transfer_doubles = 0;
    bool transfer_clamped = false;  // latency subtraction guard fired
};

/// Median of one-byte round-trips over a loopback socket pair (echo process),
/// divided by two. Run on an idle machine.
double measure_latency(std::size_t round_trips = 1000);

/// Times a serial chain of dependent multiply-adds and normalizes per
/// arithmetic operation (each multiply-add counts as two).
double measure_tau_op(std::size_t multiply_adds = 100000000);

struct TransferEstimate {
    double per_double = 0.0;    // seconds per transferred double
    double round_trip = 0.0;    // median message round-trip, seconds
    bool clamped = false;       // latency subtraction would have gone <= 0
};

/// Pure arithmetic behind measure_tau_tr: one-way time minus latency, per
/// double; clamps to the unsubtracted rate when the difference is not
/// positive.
TransferEstimate transfer_per_double(double round_trip_seconds, double latency_seconds,
                                     std::size_t doubles);

/// Round-trips of large double messages over loopback, latency subtracted.
TransferEstimate measure_tau_tr(std::size_t doubles, double latency_seconds,
                                std::size_t round_trips = 9);

/// Full measurement pass; the no-argument form uses the default counts.
CalibrationResult calibrate(std::size_t latency_round_trips, std::size_t multiply_adds,
                            std::size_t transfer_doubles);
CalibrationResult calibrate();

/// One measured cell of a worker-count sweep.
struct ObservationRecord {
    Variant variant = Variant::BsfM;
    std::size_t n = 0;
    int workers = 0;
    double mean_iter_seconds = 0.0;  // per-iteration mean, warm-up excluded
    double speedup = 0.0;            // K=1 mean of the same sweep / this mean
    double efficiency = 0.0;         // speedup / K
};

/// Runs the benchmark system of dimension n for exactly `iterations`
/// iterations per worker count, median of `repetitions` runs per cell.
/// Speedups are relative to the sweep's own K=1 cell, which is measured even
/// when 1 is absent from worker_counts (it then appears in no record).
std::vector<ObservationRecord> sweep(Variant variant, std::size_t n,
                                     const std::vector<int>& worker_counts,
                                     std::size_t iterations, Backend backend,
                                     std::size_t repetitions = 3);

struct ComparisonRow {
    int workers = 0;
    double predicted_speedup = 0.0;
    double observed_speedup = 0.0;
    double deviation = 0.0;  // |predicted - observed| / observed
    double predicted_efficiency = 0.0;
    double observed_efficiency = 0.0;
};

struct ComparisonReport {
    Variant variant = Variant::BsfM;
    std::size_t n = 0;
    std::vector<ComparisonRow> rows;  // sorted by workers, keys unique
    double max_deviation = 0.0;
    int predicted_optimal = 0;  // argmax over the full prediction curve
    int observed_optimal = 0;   // argmax over the observations
};

/// Joins predictions and observations on the worker count. Every observation
/// must carry the curve's variant and dimension and match a predicted row.
ComparisonReport compare(const PredictionCurve& pred,
                         const std::vector<ObservationRecord>& obs);

}  // namespace bsf
