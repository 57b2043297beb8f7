#include "bsfscale/jacobi.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace bsf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double>(to - from).count();
}

void check_length(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected length " +
                                    std::to_string(want) + ", got " + std::to_string(got));
    }
}

bool all_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void ensure_finite(std::span<const double> x, std::size_t iteration) {
    if (!all_finite(x)) {
        throw DivergenceError("iterate " + std::to_string(iteration) +
                              " contains a non-finite coordinate");
    }
}

}  // namespace

IterationOperator build_operator(const LinearSystem& sys) {
    const std::size_t n = sys.n;
    check_length(sys.a.size(), n * n, "matrix");
    check_length(sys.b.size(), n, "right-hand side");
    IterationOperator op;
    op.n = n;
    op.c.resize(n * n);
    op.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double diag = sys.a[i * n + i];
        if (diag == 0.0) {
            throw std::domain_error("zero diagonal at row " + std::to_string(i + 1));
        }
        for (std::size_t j = 0; j < n; ++j) {
            op.c[i * n + j] = (i == j) ? 0.0 : -sys.a[i * n + j] / diag;
        }
        op.d[i] = sys.b[i] / diag;
    }
    return op;
}

double coordinate_update(const IterationOperator& op, std::span<const double> x,
                         std::size_t i) {
    check_length(x.size(), op.n, "iterate");
    if (i >= op.n) {
        throw std::out_of_range("row index " + std::to_string(i) + " out of range");
    }
    const double* row = op.c.data() + i * op.n;
    double acc = op.d[i];
    for (std::size_t j = 0; j < op.n; ++j) {
        acc += row[j] * x[j];
    }
    return acc;
}

std::vector<double> step_reference(const IterationOperator& op, std::span<const double> x) {
    check_length(x.size(), op.n, "iterate");
    std::vector<double> next(op.n);
    for (std::size_t i = 0; i < op.n; ++i) {
        const double* row = op.c.data() + i * op.n;
        double acc = op.d[i];
        for (std::size_t j = 0; j < op.n; ++j) {
            acc += row[j] * x[j];
        }
        next[i] = acc;
    }
    return next;
}

std::vector<double> scaled_column(const IterationOperator& op, std::span<const double> x,
                                  std::size_t j) {
    check_length(x.size(), op.n, "iterate");
    if (j >= op.n) {
        throw std::out_of_range("column index " + std::to_string(j) + " out of range");
    }
    std::vector<double> column(op.n);
    const double xj = x[j];
    for (std::size_t i = 0; i < op.n; ++i) {
        column[i] = xj * op.c[i * op.n + j];
    }
    return column;
}

std::vector<double> vector_add(std::span<const double> u, std::span<const double> v) {
    check_length(v.size(), u.size(), "vector_add operand");
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = u[i] + v[i];
    }
    return out;
}

bool stop_check(std::span<const double> x_new, std::span<const double> x_old, double eps) {
    check_length(x_old.size(), x_new.size(), "stop_check operand");
    double sum = 0.0;
    for (std::size_t i = 0; i < x_new.size(); ++i) {
        const double diff = x_new[i] - x_old[i];
        sum += diff * diff;
    }
    return sum < eps;
}

DominanceReport diag_dominance_check(const LinearSystem& sys) {
    DominanceReport report;
    report.rows.resize(sys.n);
    report.all_hold = true;
    for (std::size_t i = 0; i < sys.n; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < sys.n; ++j) {
            if (j != i) off += std::abs(sys.a[i * sys.n + j]);
        }
        const double diag = std::abs(sys.a[i * sys.n + i]);
        report.rows[i].holds = diag >= off;
        report.rows[i].strict = diag > off;
        report.all_hold = report.all_hold && report.rows[i].holds;
        report.any_strict = report.any_strict || report.rows[i].strict;
    }
    report.dominant = report.all_hold && report.any_strict;
    return report;
}

LinearSystem make_benchmark_system(std::size_t n) {
    if (n < 1) throw std::invalid_argument("dimension must be at least 1");
    LinearSystem sys;
    sys.n = n;
    sys.a.assign(n * n, 1.0);
    sys.b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        sys.a[i * n + i] = static_cast<double>(i + 1);
        sys.b[i] = static_cast<double>(n + i);
    }
    return sys;
}

GeneratedSystem make_random_dominant_system(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("dimension must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> off_diag(-1.0, 1.0);
    std::uniform_real_distribution<double> coordinate(1.0, 2.0);

    GeneratedSystem gen;
    LinearSystem& sys = gen.system;
    sys.n = n;
    sys.a.resize(n * n);
    sys.b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double magnitude = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double value = off_diag(rng);
            sys.a[i * n + j] = value;
            magnitude += std::abs(value);
        }
        sys.a[i * n + i] = magnitude + 1.0;
    }
    gen.solution.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        gen.solution[i] = coordinate(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += sys.a[i * n + j] * gen.solution[j];
        }
        sys.b[i] = acc;
    }
    return gen;
}

std::vector<double> pack_problem(const LinearSystem& sys) {
    check_length(sys.a.size(), sys.n * sys.n, "matrix");
    check_length(sys.b.size(), sys.n, "right-hand side");
    std::vector<double> packed;
    packed.reserve(1 + sys.a.size() + sys.b.size());
    packed.push_back(static_cast<double>(sys.n));
    packed.insert(packed.end(), sys.a.begin(), sys.a.end());
    packed.insert(packed.end(), sys.b.begin(), sys.b.end());
    return packed;
}

LinearSystem unpack_problem(const std::vector<double>& input) {
    if (input.empty()) throw std::invalid_argument("empty problem payload");
    const double head = input[0];
    if (!(head >= 1.0) || head != std::floor(head)) {
        throw std::invalid_argument("malformed problem payload header");
    }
    const auto n = static_cast<std::size_t>(head);
    check_length(input.size(), 1 + n * n + n, "problem payload");
    LinearSystem sys;
    sys.n = n;
    sys.a.assign(input.begin() + 1, input.begin() + 1 + static_cast<std::ptrdiff_t>(n * n));
    sys.b.assign(input.end() - static_cast<std::ptrdiff_t>(n), input.end());
    return sys;
}

double residual_norm(const LinearSystem& sys, std::span<const double> x) {
    check_length(x.size(), sys.n, "solution");
    double sum = 0.0;
    for (std::size_t i = 0; i < sys.n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < sys.n; ++j) {
            acc += sys.a[i * sys.n + j] * x[j];
        }
        const double diff = acc - sys.b[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

JacobiFarmPlugin::JacobiFarmPlugin(SolveVariant variant, double eps, bool detect_divergence,
                                   IterateHook on_iterate)
    : variant_(variant),
      eps_(eps),
      detect_divergence_(detect_divergence),
      on_iterate_(std::move(on_iterate)) {
    if (variant == SolveVariant::Sequential) {
        throw std::invalid_argument("the sequential variant does not run on the farm");
    }
}

void JacobiFarmPlugin::init(const std::vector<double>& input) {
    op_ = build_operator(unpack_problem(input));
    x_ = op_.d;
    iterations_ = 0;
    converged_ = false;
}

std::size_t JacobiFarmPlugin::task_count() const { return op_.n; }

std::vector<double> JacobiFarmPlugin::make_order() const { return x_; }

std::vector<double> JacobiFarmPlugin::process_order(const std::vector<double>& order,
                                                    Range range) const {
    if (variant_ == SolveVariant::JacobiM) {
        std::vector<double> updates;
        updates.reserve(range.length);
        for (std::size_t i = range.start; i < range.start + range.length; ++i) {
            updates.push_back(coordinate_update(op_, order, i));
        }
        return updates;
    }
    std::vector<double> acc(op_.n, 0.0);
    for (std::size_t j = range.start; j < range.start + range.length; ++j) {
        acc = vector_add(acc, scaled_column(op_, order, j));
    }
    return acc;
}

bool JacobiFarmPlugin::evaluate(const std::vector<std::vector<double>>& partials) {
    std::vector<double> next;
    if (variant_ == SolveVariant::JacobiM) {
        next.reserve(op_.n);
        for (const std::vector<double>& partial : partials) {
            next.insert(next.end(), partial.begin(), partial.end());
        }
    } else {
        std::vector<double> acc(op_.n, 0.0);
        for (const std::vector<double>& partial : partials) {
            acc = vector_add(acc, partial);
        }
        next = vector_add(acc, op_.d);
    }
    check_length(next.size(), op_.n, "assembled iterate");
    ++iterations_;
    if (detect_divergence_) ensure_finite(next, iterations_);
    converged_ = stop_check(next, x_, eps_);
    x_ = std::move(next);
    if (on_iterate_) on_iterate_(iterations_, x_);
    return converged_;
}

namespace {

void validate(const SolveConfig& cfg) {
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (cfg.workers < 1) throw std::invalid_argument("workers must be at least 1");
}

SolveResult solve_sequential(const LinearSystem& sys, const SolveConfig& cfg) {
    const IterationOperator op = build_operator(sys);
    SolveResult result;
    result.x = op.d;
    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        const auto t0 = Clock::now();
        std::vector<double> next = step_reference(op, result.x);
        const auto t1 = Clock::now();
        ++result.iterations;
        if (cfg.detect_divergence) ensure_finite(next, result.iterations);
        result.converged = stop_check(next, result.x, cfg.eps);
        result.x = std::move(next);
        if (cfg.on_iterate) cfg.on_iterate(result.iterations, result.x);
        const auto t2 = Clock::now();
        result.traces.push_back(
            {iter, 0.0, seconds_between(t0, t1), 0.0, seconds_between(t1, t2)});
        if (result.converged) break;
    }
    result.residual = residual_norm(sys, result.x);
    return result;
}

}  // namespace

SolveResult solve(const LinearSystem& sys, const SolveConfig& cfg, const FarmConfig& farm) {
    validate(cfg);
    if (cfg.variant == SolveVariant::Sequential) {
        return solve_sequential(sys, cfg);
    }
    JacobiFarmPlugin plugin(cfg.variant, cfg.eps, cfg.detect_divergence, cfg.on_iterate);
    FarmConfig farm_cfg = farm;
    farm_cfg.workers = cfg.workers;
    FarmResult run = run_farm(plugin, farm_cfg, pack_problem(sys), cfg.max_iters);

    SolveResult result;
    result.x = plugin.solution();
    result.iterations = run.iterations;
    result.converged = plugin.converged();
    result.traces = std::move(run.traces);
    result.residual = residual_norm(sys, result.x);
    return result;
}

const char* solve_variant_name(SolveVariant v) {
    switch (v) {
        case SolveVariant::Sequential: return "sequential";
        case SolveVariant::JacobiM: return "jacobi-m";
        case SolveVariant::JacobiMR: return "jacobi-mr";
    }
    return "unknown";
}

}  // namespace bsf
