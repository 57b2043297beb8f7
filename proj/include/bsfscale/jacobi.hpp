#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bsfscale/runtime.hpp"

namespace bsf {

/// Dense system Ax = b, row-major storage.
struct LinearSystem {
    std::size_t n = 0;
    std::vector<double> a;  // n*n entries, a[i*n + j]
    std::vector<double> b;  // n entries

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Jacobi form x <- Cx + d with c_ij = -a_ij/a_ii (j != i), c_ii = 0,
/// d_i = b_i/a_ii. Immutable after construction; shareable across workers.
struct IterationOperator {
    std::size_t n = 0;
    std::vector<double> c;  // n*n entries, c[i*n + j]
    std::vector<double> d;  // n entries
};

/// Thrown when an iterate picks up a NaN or infinity.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Throws std::domain_error naming the first zero-diagonal row (rows are
/// numbered from 1 in messages).
IterationOperator build_operator(const LinearSystem& sys);

/// One full Jacobi step C*x + d. Each coordinate accumulates from d_i and
/// adds the row terms left to right; this exact order is the determinism
/// anchor every equivalence test compares against.
std::vector<double> step_reference(const IterationOperator& op, std::span<const double> x);

/// Row `i` of the next approximation: d_i + sum_j c_ij*x_j, same summation
/// order as step_reference. Zero-based row index.
double coordinate_update(const IterationOperator& op, std::span<const double> x,
                         std::size_t i);

/// Column `j` of C scaled by x_j: (x_j*c_0j, ..., x_j*c_{n-1,j}). Zero-based.
std::vector<double> scaled_column(const IterationOperator& op, std::span<const double> x,
                                  std::size_t j);

/// Elementwise sum; the zero vector is the identity.
std::vector<double> vector_add(std::span<const double> u, std::span<const double> v);

/// True iff sum_i (x_new_i - x_old_i)^2 < eps (strict).
bool stop_check(std::span<const double> x_new, std::span<const double> x_old, double eps);

struct RowDominance {
    bool holds = false;   // |a_ii| >= sum of off-diagonal magnitudes
    bool strict = false;  // strict inequality
};

struct DominanceReport {
    std::vector<RowDominance> rows;
    bool all_hold = false;
    bool any_strict = false;
    bool dominant = false;  // all_hold && any_strict (sufficient for convergence)
};

DominanceReport diag_dominance_check(const LinearSystem& sys);

/// The scalable benchmark system: a_ij = 1 for i != j, a_ii = i, and
/// b_i = n + i - 1 with rows numbered from 1, so A*(1,...,1) = b exactly.
/// Not diagonally dominant for n >= 4; used for cost accounting, not
/// convergence.
LinearSystem make_benchmark_system(std::size_t n);

struct GeneratedSystem {
    LinearSystem system;
    std::vector<double> solution;  // the x* used to form b = A*x*
};

/// Seeded random strictly diagonally dominant system: off-diagonals uniform
/// in [-1,1], a_ii = sum_{j != i} |a_ij| + 1, b = A*x* for x* uniform in
/// [1,2]. Same seed, same system, bit-exact.
GeneratedSystem make_random_dominant_system(std::size_t n, std::uint64_t seed);

/// Flat farm-input encoding of a system: [n, rows of A..., b...].
std::vector<double> pack_problem(const LinearSystem& sys);
LinearSystem unpack_problem(const std::vector<double>& input);

double residual_norm(const LinearSystem& sys, std::span<const double> x);

enum class SolveVariant { Sequential, JacobiM, JacobiMR };

struct SolveConfig {
    SolveVariant variant = SolveVariant::Sequential;
    double eps = 1e-6;  // squared-norm tolerance, strict <
    std::size_t max_iters = 10000;
    std::size_t workers = 1;
    bool detect_divergence = true;
    /// Called after every iteration with (iteration count, current iterate).
    std::function<void(std::size_t, const std::vector<double>&)> on_iterate;
};

struct SolveResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    bool converged = false;
    double residual = 0.0;  // ||Ax - b||_2 of the final iterate
    std::vector<IterationTrace> traces;
};

/// Runs the selected variant from x^(0) = d until the stop check passes or
/// max_iters complete (converged = false then; not an error). `farm` supplies
/// the backend for the farm variants; its worker count is taken from cfg.
SolveResult solve(const LinearSystem& sys, const SolveConfig& cfg, const FarmConfig& farm);

/// The Jacobi farm algorithms behind solve, exposed for direct runtime use.
/// Map variant orders carry the current iterate; worker i returns the updated
/// coordinates of its row range (Map/Reduce: its partial column sum).
class JacobiFarmPlugin final : public FarmPlugin {
public:
    using IterateHook = std::function<void(std::size_t, const std::vector<double>&)>;

    explicit JacobiFarmPlugin(SolveVariant variant, double eps = 1e-6,
                              bool detect_divergence = true, IterateHook on_iterate = {});

    void init(const std::vector<double>& input) override;
    std::size_t task_count() const override;
    std::vector<double> make_order() const override;
    std::vector<double> process_order(const std::vector<double>& order,
                                      Range range) const override;
    bool evaluate(const std::vector<std::vector<double>>& partials) override;

    const std::vector<double>& solution() const { return x_; }
    std::size_t iterations() const { return iterations_; }
    bool converged() const { return converged_; }
    const IterationOperator& iteration_operator() const { return op_; }

private:
    SolveVariant variant_;
    double eps_;
    bool detect_divergence_;
    IterateHook on_iterate_;
    IterationOperator op_;
    std::vector<double> x_;
    std::size_t iterations_ = 0;
    bool converged_ = false;
};

const char* solve_variant_name(SolveVariant v);

}  // namespace bsf
