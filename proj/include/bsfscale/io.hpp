#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bsfscale/calibration.hpp"
#include "bsfscale/cost_model.hpp"
#include "bsfscale/jacobi.hpp"
#include "bsfscale/runtime.hpp"

namespace bsf::io {

/// Filesystem failures: open, write, rename.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file or value contents.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same bits.
std::string format_double(double value);

/// Strict parsers: the whole (trimmed) token must be consumed.
double parse_double(std::string_view text);
std::int64_t parse_integer(std::string_view text);
std::size_t parse_count(std::string_view text);
bool parse_bool(std::string_view text);

Variant parse_cost_variant(std::string_view name);
std::string_view cost_variant_token(Variant v);  // "m" | "mr"
SolveVariant parse_solve_variant(std::string_view name);
Backend parse_backend(std::string_view name);

/// Writes content to a temporary file next to `path`, then renames it over.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Matrix file: line 1 holds n, then n rows of n reals, then one line with b.
// Lines starting with '#' are comments.
void write_matrix_file(const std::string& path, const LinearSystem& sys,
                       const std::string& comment = "");
LinearSystem read_matrix_file(const std::string& path);

// Curve file: '#' metadata (variant, n, constants, bound), then a
// "K,speedup,efficiency" CSV.
struct CurveFileData {
    PredictionCurve curve;
    MachineConstants constants;
};
void write_curve_file(const std::string& path, const PredictionCurve& curve,
                      const MachineConstants& constants);
CurveFileData read_curve_file(const std::string& path);

// Calibration file: key = value lines. Only the three constants are
// required on read; measurement metadata is optional.
void write_calibration_file(const std::string& path, const CalibrationResult& result);
CalibrationResult read_calibration_file(const std::string& path);

struct ProblemSource {
    enum class Kind { File, Benchmark, RandomDominant };
    Kind kind = Kind::Benchmark;
    std::string path;        // File
    std::size_t n = 0;       // Benchmark, RandomDominant
    std::uint64_t seed = 0;  // RandomDominant
};

/// Problem source syntax: "file:PATH", "paper-system:N", "random-dd:N:SEED".
ProblemSource parse_problem_source(std::string_view text);
std::string problem_source_text(const ProblemSource& source);
LinearSystem load_problem(const ProblemSource& source);

/// Declarative solve run. Defaults: eps 1e-6, max_iters 10000, workers 1,
/// sequential variant and backend, no output path.
struct RunConfig {
    ProblemSource problem;
    SolveVariant variant = SolveVariant::Sequential;
    double eps = 1e-6;
    std::size_t max_iters = 10000;
    std::size_t workers = 1;
    Backend backend = Backend::Sequential;
    std::string output;
};

/// Key = value lines; '#' comments; unknown keys rejected; `problem` required.
RunConfig parse_run_config(const std::string& text);
RunConfig read_run_config(const std::string& path);
std::string run_config_text(const RunConfig& cfg);
void write_run_config(const std::string& path, const RunConfig& cfg);

struct SolveReport {
    SolveVariant variant = SolveVariant::Sequential;
    Backend backend = Backend::Sequential;
    std::size_t n = 0;
    std::size_t workers = 1;
    SolveResult result;
};

void write_solve_report(const std::string& path, const SolveReport& report);
SolveReport read_solve_report(const std::string& path);

void write_comparison_file(const std::string& path, const ComparisonReport& report);
ComparisonReport read_comparison_file(const std::string& path);

}  // namespace bsf::io
