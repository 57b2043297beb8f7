#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsfscale/list_ops.hpp"

namespace bsf {

/// Behavioral contract between the farm runtime and an algorithm.
///
/// One iteration: the master builds an order, the runtime delivers the same
/// order to all K workers, worker i processes the sublist range assigned by
/// partition(task_count(), K), and the master evaluates the K partial results
/// in worker-index order. process_order must be a pure function of the order,
/// the range, and the init data; the runtime may call it concurrently on a
/// shared instance.
class FarmPlugin {
public:
    virtual ~FarmPlugin() = default;

    virtual void init(const std::vector<double>& input) = 0;
    virtual std::size_t task_count() const = 0;
    virtual std::vector<double> make_order() const = 0;
    virtual std::vector<double> process_order(const std::vector<double>& order,
                                              Range range) const = 0;
    /// Consumes exactly K partials (worker-index order); true requests a stop.
    virtual bool evaluate(const std::vector<std::vector<double>>& partials) = 0;
};

enum class Backend {
    Sequential,    // workers run one by one in worker order, in-process
    InProcess,     // K concurrent threads sharing the read-only init data
    MultiProcess,  // worker processes over the socket protocol (see wire.hpp)
};

struct FarmConfig {
    std::size_t workers = 1;
    Backend backend = Backend::Sequential;

    // Multi-process settings.
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks an ephemeral port
    double receive_timeout = 30.0;
    bool spawn_workers = true;  // fork local workers; false waits for external ones
    std::function<void(std::uint16_t)> on_listening;  // reports the bound port
};

/// Wall-clock breakdown of one iteration into the four macro-steps.
struct IterationTrace {
    std::size_t iteration = 0;
    double send_seconds = 0.0;     // order handout to all workers
    double work_seconds = 0.0;     // handout done until the first partial lands
    double receive_seconds = 0.0;  // first partial until the barrier completes
    double process_seconds = 0.0;  // evaluate, including the stop check

    double total_seconds() const {
        return send_seconds + work_seconds + receive_seconds + process_seconds;
    }
};

struct TraceSummary {
    std::size_t samples = 0;
    double send_seconds = 0.0;
    double work_seconds = 0.0;
    double receive_seconds = 0.0;
    double process_seconds = 0.0;

    double total_seconds() const {
        return send_seconds + work_seconds + receive_seconds + process_seconds;
    }
};

struct FarmResult {
    std::size_t iterations = 0;
    bool stopped = false;  // the plugin requested the stop before the budget ran out
    std::vector<IterationTrace> traces;
};

class FarmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs the iterative master-worker loop until the plugin stops or
/// max_iterations complete. The plugin acts as the master; worker-side
/// processing uses the same instance in the in-process backends and fresh
/// processes speaking the wire protocol in the multi-process backend.
FarmResult run_farm(FarmPlugin& plugin, const FarmConfig& cfg,
                    const std::vector<double>& input, std::size_t max_iterations);

/// Worker-process entry point: connects to the master, handshakes with its
/// index, inits from the INIT frame, then serves ORDER frames until STOP.
void run_worker(const std::string& host, std::uint16_t port, std::uint32_t index,
                std::uint32_t total_workers, FarmPlugin& plugin,
                double timeout_seconds = 30.0);

/// Arithmetic mean per macro-step component, excluding the first iteration
/// (warm-up). A single trace is used as-is; an empty list is an error.
TraceSummary measure_iteration(const std::vector<IterationTrace>& traces);

std::string backend_name(Backend backend);

}  // namespace bsf
