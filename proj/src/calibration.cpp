#include "bsfscale/calibration.hpp"

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <map>
#include <stdexcept>

#include "bsfscale/jacobi.hpp"
#include "bsfscale/net.hpp"

namespace bsf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double>(to - from).count();
}

double median(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

/// Loopback echo process: accepts one connection and mirrors every byte back
/// until the peer closes. The parent side is the returned socket.
class EchoPeer {
public:
    EchoPeer() {
        net::Listener listener = net::Listener::open("127.0.0.1", 0);
        pid_ = ::fork();
        if (pid_ < 0) throw net::TransportError("fork failed");
        if (pid_ == 0) {
            try {
                net::Socket conn = listener.accept(net::deadline_after(30.0));
                std::vector<std::uint8_t> buffer(1 << 16);
                for (;;) {
                    const ssize_t got = ::recv(conn.fd(), buffer.data(), buffer.size(), 0);
                    if (got <= 0) std::_Exit(0);
                    conn.send_all(buffer.data(), static_cast<std::size_t>(got));
                }
            } catch (...) {
                std::_Exit(1);
            }
        }
        socket_ = net::connect("127.0.0.1", listener.port(), net::deadline_after(30.0));
    }

    EchoPeer(const EchoPeer&) = delete;
    EchoPeer& operator=(const EchoPeer&) = delete;

    ~EchoPeer() {
        socket_.close();  // EOF lets the child exit on its own
        if (pid_ > 0) {
            int status = 0;
            ::waitpid(pid_, &status, 0);
        }
    }

    net::Socket& socket() { return socket_; }

private:
    pid_t pid_ = -1;
    net::Socket socket_;
};

double median_round_trip(std::size_t payload_bytes, std::size_t round_trips) {
    if (round_trips < 1) throw std::invalid_argument("need at least one round-trip");
    EchoPeer peer;
    std::vector<std::uint8_t> payload(payload_bytes, 0x5a);
    std::vector<std::uint8_t> back(payload_bytes);
    // One untimed round-trip warms the path up.
    peer.socket().send_all(payload.data(), payload.size());
    peer.socket().recv_all(back.data(), back.size(), net::deadline_after(30.0));

    std::vector<double> samples;
    samples.reserve(round_trips);
    for (std::size_t i = 0; i < round_trips; ++i) {
        const auto t0 = Clock::now();
        peer.socket().send_all(payload.data(), payload.size());
        peer.socket().recv_all(back.data(), back.size(), net::deadline_after(30.0));
        samples.push_back(seconds_between(t0, Clock::now()));
    }
    return median(std::move(samples));
}

SolveVariant plugin_variant(Variant variant) {
    return variant == Variant::BsfM ? SolveVariant::JacobiM : SolveVariant::JacobiMR;
}

}  // namespace

double measure_latency(std::size_t round_trips) {
    return median_round_trip(1, round_trips) / 2.0;
}

double measure_tau_op(std::size_t multiply_adds) {
    if (multiply_adds < 1) throw std::invalid_argument("need at least one operation");
    // Dependent chain: each step needs the previous result, so the loop cannot
    // be vectorized or reassociated. The multiplier keeps the value finite.
    double acc = 1.0;
    const double scale = 1.0 + 1e-10;
    const double shift = 1e-12;
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < multiply_adds; ++i) {
        acc = acc * scale + shift;
    }
    const auto t1 = Clock::now();
    static volatile double sink;
    sink = acc;
    (void)sink;
    return seconds_between(t0, t1) / (2.0 * static_cast<double>(multiply_adds));
}

TransferEstimate transfer_per_double(double round_trip_seconds, double latency_seconds,
                                     std::size_t doubles) {
    if (doubles < 1) throw std::invalid_argument("need at least one double");
    TransferEstimate estimate;
    estimate.round_trip = round_trip_seconds;
    const double one_way = round_trip_seconds / 2.0;
    const double net_time = one_way - latency_seconds;
    if (net_time > 0.0) {
        estimate.per_double = net_time / static_cast<double>(doubles);
    } else {
        estimate.per_double = one_way / static_cast<double>(doubles);
        estimate.clamped = true;
    }
    return estimate;
}

TransferEstimate measure_tau_tr(std::size_t doubles, double latency_seconds,
                                std::size_t round_trips) {
    const double rtt = median_round_trip(doubles * sizeof(double), round_trips);
    return transfer_per_double(rtt, latency_seconds, doubles);
}

CalibrationResult calibrate(std::size_t latency_round_trips, std::size_t multiply_adds,
                            std::size_t transfer_doubles) {
    CalibrationResult result;
    result.latency_round_trips = static_cast<std::int64_t>(latency_round_trips);
    result.op_multiply_adds = static_cast<std::int64_t>(multiply_adds);
    result.transfer_doubles = static_cast<std::int64_t>(transfer_doubles);

    result.constants.latency = measure_latency(latency_round_trips);
    result.constants.op_time = measure_tau_op(multiply_adds);
    const TransferEstimate transfer =
        measure_tau_tr(transfer_doubles, result.constants.latency);
    result.constants.transfer_time = transfer.per_double;
    result.transfer_clamped = transfer.clamped;

    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
    result.timestamp = stamp;

    result.constants.validate();
    return result;
}

CalibrationResult calibrate() { return calibrate(1000, 100000000, 1000000); }

std::vector<ObservationRecord> sweep(Variant variant, std::size_t n,
                                     const std::vector<int>& worker_counts,
                                     std::size_t iterations, Backend backend,
                                     std::size_t repetitions) {
    if (n < 1) throw std::invalid_argument("dimension must be at least 1");
    if (worker_counts.empty()) throw std::invalid_argument("no worker counts");
    if (iterations < 2) {
        throw std::invalid_argument("need at least two iterations (one is warm-up)");
    }
    if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
    for (int k : worker_counts) {
        if (k < 1) throw std::invalid_argument("worker counts must be at least 1");
    }

    const std::vector<double> input = pack_problem(make_benchmark_system(n));
    std::map<int, double> cell_means;
    auto measure_cell = [&](int k) {
        const auto found = cell_means.find(k);
        if (found != cell_means.end()) return found->second;
        std::vector<double> means;
        means.reserve(repetitions);
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            // eps = 0 never stops and divergence detection stays off: the
            // benchmark matrix is not dominant and only the timings matter.
            JacobiFarmPlugin plugin(plugin_variant(variant), 0.0, false);
            FarmConfig cfg;
            cfg.workers = static_cast<std::size_t>(k);
            cfg.backend = backend;
            const FarmResult run = run_farm(plugin, cfg, input, iterations);
            means.push_back(measure_iteration(run.traces).total_seconds());
        }
        const double cell = median(std::move(means));
        cell_means.emplace(k, cell);
        return cell;
    };

    const double baseline = measure_cell(1);
    std::vector<ObservationRecord> records;
    records.reserve(worker_counts.size());
    for (int k : worker_counts) {
        ObservationRecord record;
        record.variant = variant;
        record.n = n;
        record.workers = k;
        record.mean_iter_seconds = measure_cell(k);
        record.speedup = baseline / record.mean_iter_seconds;
        record.efficiency = record.speedup / static_cast<double>(k);
        records.push_back(record);
    }
    return records;
}

ComparisonReport compare(const PredictionCurve& pred,
                         const std::vector<ObservationRecord>& obs) {
    if (obs.empty()) throw std::invalid_argument("no observations to compare");

    ComparisonReport report;
    report.variant = pred.variant;
    report.n = pred.n;
    for (const ObservationRecord& record : obs) {
        if (record.variant != pred.variant || record.n != pred.n) {
            throw std::invalid_argument("observation does not match the prediction key");
        }
        const auto point = std::find_if(
            pred.points.begin(), pred.points.end(),
            [&](const CurvePoint& p) { return p.workers == record.workers; });
        if (point == pred.points.end()) {
            throw std::invalid_argument("no prediction for K = " +
                                        std::to_string(record.workers));
        }
        ComparisonRow row;
        row.workers = record.workers;
        row.predicted_speedup = point->speedup;
        row.observed_speedup = record.speedup;
        row.deviation = std::abs(point->speedup - record.speedup) / record.speedup;
        row.predicted_efficiency = point->efficiency;
        row.observed_efficiency = record.efficiency;
        report.rows.push_back(row);
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ComparisonRow& a, const ComparisonRow& b) {
                  return a.workers < b.workers;
              });
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (report.rows[i].workers == report.rows[i - 1].workers) {
            throw std::invalid_argument("duplicate observation for K = " +
                                        std::to_string(report.rows[i].workers));
        }
    }
    report.max_deviation = 0.0;
    for (const ComparisonRow& row : report.rows) {
        report.max_deviation = std::max(report.max_deviation, row.deviation);
    }
    report.predicted_optimal = optimal_workers(pred);
    const auto best = std::max_element(
        report.rows.begin(), report.rows.end(),
        [](const ComparisonRow& a, const ComparisonRow& b) {
            return a.observed_speedup < b.observed_speedup;
        });
    report.observed_optimal = best->workers;
    return report;
}

}  // namespace bsf
