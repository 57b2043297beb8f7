#include "bsfscale/runtime.hpp"

#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <thread>
#include <utility>

#include "bsfscale/net.hpp"
#include "bsfscale/wire.hpp"

namespace bsf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double>(to - from).count();
}

[[noreturn]] void worker_failed(std::size_t index, const std::string& what) {
    throw FarmError("worker " + std::to_string(index) + ": " + what);
}

void validate(const FarmConfig& cfg) {
    if (cfg.workers < 1) {
        throw FarmError("a farm needs at least one worker");
    }
}

/// Owns forked worker processes; kills and reaps whatever wait_all has not
/// collected, so a master-side failure never leaks children.
class ChildGuard {
public:
    ChildGuard() = default;
    ChildGuard(const ChildGuard&) = delete;
    ChildGuard& operator=(const ChildGuard&) = delete;

    ~ChildGuard() {
        for (pid_t pid : pids_) {
            if (pid <= 0) continue;
            ::kill(pid, SIGKILL);
            int status = 0;
            ::waitpid(pid, &status, 0);
        }
    }

    void add(pid_t pid) { pids_.push_back(pid); }

    void wait_all() {
        for (std::size_t i = 0; i < pids_.size(); ++i) {
            const pid_t pid = std::exchange(pids_[i], -1);
            if (pid <= 0) continue;
            int status = 0;
            if (::waitpid(pid, &status, 0) < 0) {
                worker_failed(i, "waitpid failed");
            }
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                worker_failed(i, "worker process exited abnormally");
            }
        }
    }

private:
    std::vector<pid_t> pids_;
};

/// Sequential and in-process backends share everything except how the K
/// process_order calls execute.
FarmResult run_local(FarmPlugin& plugin, const FarmConfig& cfg,
                     const std::vector<double>& input, std::size_t max_iterations,
                     bool concurrent) {
    plugin.init(input);
    const std::size_t k = cfg.workers;
    const SublistPartition split = partition(plugin.task_count(), k);

    FarmResult result;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        const auto t0 = Clock::now();
        const std::vector<double> order = plugin.make_order();
        std::vector<std::vector<double>> orders(k, order);  // per-worker handout
        const auto t1 = Clock::now();

        std::vector<std::vector<double>> partials(k);
        std::vector<Clock::time_point> completed(k);
        std::vector<std::exception_ptr> errors(k);
        auto work = [&](std::size_t i) {
            try {
                partials[i] = plugin.process_order(orders[i], split.ranges[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
            completed[i] = Clock::now();
        };
        if (concurrent) {
            std::vector<std::thread> threads;
            threads.reserve(k);
            for (std::size_t i = 0; i < k; ++i) {
                threads.emplace_back(work, i);
            }
            for (std::thread& t : threads) t.join();
        } else {
            for (std::size_t i = 0; i < k; ++i) work(i);
        }
        const auto t3 = Clock::now();
        for (std::size_t i = 0; i < k; ++i) {
            if (!errors[i]) continue;
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                worker_failed(i, e.what());
            }
        }
        const auto first = *std::min_element(completed.begin(), completed.end());

        const bool stop = plugin.evaluate(partials);
        const auto t4 = Clock::now();

        result.traces.push_back({iter, seconds_between(t0, t1), seconds_between(t1, first),
                                 seconds_between(first, t3), seconds_between(t3, t4)});
        ++result.iterations;
        if (stop) {
            result.stopped = true;
            break;
        }
    }
    return result;
}

FarmResult run_multi_process(FarmPlugin& plugin, const FarmConfig& cfg,
                             const std::vector<double>& input,
                             std::size_t max_iterations) {
    const std::size_t k = cfg.workers;
    net::Listener listener = net::Listener::open(cfg.host, cfg.port);
    if (cfg.on_listening) cfg.on_listening(listener.port());

    ChildGuard children;
    if (cfg.spawn_workers) {
        for (std::size_t i = 0; i < k; ++i) {
            const pid_t pid = ::fork();
            if (pid < 0) throw FarmError("fork failed");
            if (pid == 0) {
                // Worker process: serve orders until STOP, then leave without
                // running the parent's atexit machinery.
                try {
                    run_worker(cfg.host, listener.port(), static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(k), plugin, cfg.receive_timeout);
                    std::_Exit(0);
                } catch (...) {
                    std::_Exit(1);
                }
            }
            children.add(pid);
        }
    }

    plugin.init(input);

    std::vector<net::Socket> sockets(k);
    const auto handshake_deadline = net::deadline_after(cfg.receive_timeout);
    for (std::size_t accepted = 0; accepted < k; ++accepted) {
        net::Socket socket = listener.accept(handshake_deadline);
        std::uint8_t raw[4];
        socket.recv_all(raw, sizeof(raw), handshake_deadline);
        std::size_t offset = 0;
        const std::uint32_t index = wire::read_u32(std::span(raw, sizeof(raw)), offset);
        if (index >= k) {
            throw FarmError("handshake from out-of-range worker index " +
                            std::to_string(index));
        }
        if (sockets[index].valid()) {
            throw FarmError("duplicate handshake for worker index " + std::to_string(index));
        }
        sockets[index] = std::move(socket);
    }
    const std::vector<std::uint8_t> init = wire::init_payload(input);
    for (net::Socket& socket : sockets) {
        net::send_frame(socket, wire::Tag::Init, init);
    }

    FarmResult result;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        const auto t0 = Clock::now();
        const std::vector<double> order = plugin.make_order();
        const std::vector<std::uint8_t> payload = wire::order_payload(iter, order);
        for (net::Socket& socket : sockets) {
            net::send_frame(socket, wire::Tag::Order, payload);
        }
        const auto t1 = Clock::now();

        const auto deadline = net::deadline_after(cfg.receive_timeout);
        net::wait_any_readable(sockets, deadline);
        const auto t2 = Clock::now();

        std::vector<std::vector<double>> partials(k);
        for (std::size_t i = 0; i < k; ++i) {
            try {
                const wire::Frame frame = net::recv_frame(sockets[i], deadline);
                if (frame.tag != wire::Tag::Partial) {
                    throw net::TransportError("unexpected frame tag");
                }
                wire::PartialMessage partial = wire::parse_partial(frame.payload);
                if (partial.iteration != iter || partial.worker != i) {
                    throw net::TransportError("partial does not match the current order");
                }
                partials[i] = std::move(partial.values);
            } catch (const std::exception& e) {
                worker_failed(i, e.what());
            }
        }
        const auto t3 = Clock::now();

        const bool stop = plugin.evaluate(partials);
        const auto t4 = Clock::now();

        result.traces.push_back({iter, seconds_between(t0, t1), seconds_between(t1, t2),
                                 seconds_between(t2, t3), seconds_between(t3, t4)});
        ++result.iterations;
        if (stop) {
            result.stopped = true;
            break;
        }
    }

    for (net::Socket& socket : sockets) {
        net::send_frame(socket, wire::Tag::Stop, {});
    }
    if (cfg.spawn_workers) {
        children.wait_all();
    }
    return result;
}

}  // namespace

FarmResult run_farm(FarmPlugin& plugin, const FarmConfig& cfg,
                    const std::vector<double>& input, std::size_t max_iterations) {
    validate(cfg);
    switch (cfg.backend) {
        case Backend::Sequential:
            return run_local(plugin, cfg, input, max_iterations, false);
        case Backend::InProcess:
            return run_local(plugin, cfg, input, max_iterations, true);
        case Backend::MultiProcess:
            return run_multi_process(plugin, cfg, input, max_iterations);
    }
    throw FarmError("unknown backend");
}

void run_worker(const std::string& host, std::uint16_t port, std::uint32_t index,
                std::uint32_t total_workers, FarmPlugin& plugin, double timeout_seconds) {
    if (total_workers < 1 || index >= total_workers) {
        throw FarmError("worker index " + std::to_string(index) + " out of range");
    }
    net::Socket socket = net::connect(host, port, net::deadline_after(timeout_seconds));
    std::vector<std::uint8_t> handshake;
    wire::append_u32(handshake, index);
    socket.send_all(handshake.data(), handshake.size());

    const wire::Frame init = net::recv_frame(socket, net::deadline_after(timeout_seconds));
    if (init.tag != wire::Tag::Init) {
        throw FarmError("expected INIT after handshake");
    }
    plugin.init(wire::parse_init(init.payload));
    const SublistPartition split = partition(plugin.task_count(), total_workers);
    const Range range = split.ranges[index];

    for (;;) {
        const wire::Frame frame = net::recv_frame(socket, net::deadline_after(timeout_seconds));
        if (frame.tag == wire::Tag::Stop) return;
        if (frame.tag != wire::Tag::Order) {
            throw FarmError("unexpected frame tag while waiting for an order");
        }
        const wire::OrderMessage order = wire::parse_order(frame.payload);
        const std::vector<double> partial = plugin.process_order(order.values, range);
        net::send_frame(socket, wire::Tag::Partial,
                        wire::partial_payload(order.iteration, index, partial));
    }
}

TraceSummary measure_iteration(const std::vector<IterationTrace>& traces) {
    if (traces.empty()) {
        throw std::invalid_argument("measure_iteration: no traces");
    }
    const std::size_t first = traces.size() > 1 ? 1 : 0;  // drop the warm-up
    TraceSummary summary;
    for (std::size_t i = first; i < traces.size(); ++i) {
        summary.send_seconds += traces[i].send_seconds;
        summary.work_seconds += traces[i].work_seconds;
        summary.receive_seconds += traces[i].receive_seconds;
        summary.process_seconds += traces[i].process_seconds;
    }
    summary.samples = traces.size() - first;
    const auto n = static_cast<double>(summary.samples);
    summary.send_seconds /= n;
    summary.work_seconds /= n;
    summary.receive_seconds /= n;
    summary.process_seconds /= n;
    return summary;
}

std::string backend_name(Backend backend) {
    switch (backend) {
        case Backend::Sequential: return "sequential";
        case Backend::InProcess: return "in-process";
        case Backend::MultiProcess: return "multi-process";
    }
    return "unknown";
}

}  // namespace bsf
