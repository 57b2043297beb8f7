#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace bsf {

struct Range {
    std::size_t start = 0;
    std::size_t length = 0;

    friend bool operator==(const Range&, const Range&) = default;
};

/// Contiguous split of [0, total) into `parts` ranges. When parts divides
/// total every range has length total/parts; otherwise the first
/// (total mod parts) ranges carry one extra element.
struct SublistPartition {
    std::size_t total = 0;
    std::size_t parts = 0;
    std::vector<Range> ranges;
};

SublistPartition partition(std::size_t total, std::size_t parts);

/// Thrown when a mapped function or reduce operation fails; carries the index
/// of the offending element.
class ElementError : public std::runtime_error {
public:
    ElementError(std::size_t index, const std::string& what)
        : std::runtime_error("element " + std::to_string(index) + ": " + what),
          index_(index) {}

    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Runs a batch of tasks to completion. Once a task fails, tasks that have
/// not started yet are skipped and the failure is rethrown after the batch
/// settles (lowest task index wins when several fail).
class Executor {
public:
    virtual ~Executor() = default;
    virtual void run(std::vector<std::function<void()>> tasks) = 0;
};

/// Runs tasks one by one in index order, in the calling context.
class InlineExecutor final : public Executor {
public:
    void run(std::vector<std::function<void()>> tasks) override;
};

/// Runs every task on its own thread. Oversubscription is deliberate: worker
/// counts above the hardware parallelism must still execute.
class ThreadExecutor final : public Executor {
public:
    void run(std::vector<std::function<void()>> tasks) override;
};

template <class F, class T>
auto map_list(F&& f, const std::vector<T>& xs) {
    using R = std::decay_t<std::invoke_result_t<F&, const T&>>;
    std::vector<R> out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        try {
            out.push_back(std::invoke(f, xs[i]));
        } catch (const ElementError&) {
            throw;
        } catch (const std::exception& e) {
            throw ElementError(i, e.what());
        }
    }
    return out;
}

/// Left-to-right fold starting from the identity; the identity is the result
/// for an empty list. `op` must be associative with `identity` as its unit.
template <class Op, class T>
T reduce_list(Op&& op, T identity, const std::vector<T>& xs) {
    T acc = std::move(identity);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        try {
            acc = std::invoke(op, std::move(acc), xs[i]);
        } catch (const std::exception& e) {
            throw ElementError(i, e.what());
        }
    }
    return acc;
}

/// Parallel map over `parts` contiguous sublists. Element order and values
/// match map_list exactly; no floating-point reassociation occurs.
template <class F, class T>
auto par_map(F&& f, const std::vector<T>& xs, std::size_t parts, Executor& executor) {
    using R = std::decay_t<std::invoke_result_t<F&, const T&>>;
    const SublistPartition split = partition(xs.size(), parts);
    std::vector<R> out(xs.size());
    std::vector<std::function<void()>> tasks;
    tasks.reserve(split.ranges.size());
    for (const Range& range : split.ranges) {
        tasks.push_back([&f, &xs, &out, range] {
            for (std::size_t i = range.start; i < range.start + range.length; ++i) {
                try {
                    out[i] = std::invoke(f, xs[i]);
                } catch (const std::exception& e) {
                    throw ElementError(i, e.what());
                }
            }
        });
    }
    executor.run(std::move(tasks));
    return out;
}

/// Parallel map/reduce composition: each part left-folds its mapped sublist
/// from the identity, and the partial results are combined left-to-right in
/// part order. Deterministic for a fixed parts count.
template <class F, class Op, class B, class T>
B par_map_reduce(F&& f, Op&& op, B identity, const std::vector<T>& xs,
                 std::size_t parts, Executor& executor) {
    const SublistPartition split = partition(xs.size(), parts);
    std::vector<B> partials(split.ranges.size(), identity);
    std::vector<std::function<void()>> tasks;
    tasks.reserve(split.ranges.size());
    for (std::size_t part = 0; part < split.ranges.size(); ++part) {
        const Range range = split.ranges[part];
        tasks.push_back([&f, &op, &xs, &partials, part, range] {
            B acc = std::move(partials[part]);
            for (std::size_t i = range.start; i < range.start + range.length; ++i) {
                try {
                    acc = std::invoke(op, std::move(acc), std::invoke(f, xs[i]));
                } catch (const std::exception& e) {
                    throw ElementError(i, e.what());
                }
            }
            partials[part] = std::move(acc);
        });
    }
    executor.run(std::move(tasks));
    B result = std::move(identity);
    for (B& partial : partials) {
        result = std::invoke(op, std::move(result), std::move(partial));
    }
    return result;
}

}  // namespace bsf
