#include "bsfscale/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

namespace bsf::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

bool is_comment(std::string_view line) {
    const std::string_view t = trim(line);
    return t.empty() || t.front() == '#';
}

std::vector<std::string_view> data_lines(std::string_view text) {
    std::vector<std::string_view> out;
    for (std::string_view line : lines_of(text)) {
        if (!is_comment(line)) out.push_back(trim(line));
    }
    return out;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t end = text.find(sep, start);
        if (end == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, end - start));
        start = end + 1;
    }
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
        if (i > start) parts.push_back(text.substr(start, i - start));
    }
    return parts;
}

std::pair<std::string_view, std::string_view> split_key_value(std::string_view line) {
    const std::size_t pos = line.find('=');
    if (pos == std::string_view::npos) {
        throw FormatError("expected 'key = value', got '" + std::string(line) + "'");
    }
    return {trim(line.substr(0, pos)), trim(line.substr(pos + 1))};
}

void atomic_write_stream(const std::string& path,
                         const std::function<void(std::ostream&)>& fill) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        fill(out);
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw IoError("cannot write " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

void write_vector(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out << ' ';
        out << format_double(values[i]);
    }
}

std::vector<double> parse_vector(std::string_view text) {
    std::vector<double> values;
    for (std::string_view token : split_whitespace(text)) {
        values.push_back(parse_double(token));
    }
    return values;
}

const std::string_view kCurveHeader = "K,speedup,efficiency";
const std::string_view kComparisonHeader =
    "K,predicted_speedup,observed_speedup,deviation,predicted_efficiency,observed_"
    "efficiency";

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) throw FormatError("cannot format a double");
    return std::string(buffer, ptr);
}

double parse_double(std::string_view text) {
    const std::string_view t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw FormatError("malformed real '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_integer(std::string_view text) {
    const std::string_view t = trim(text);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw FormatError("malformed integer '" + std::string(text) + "'");
    }
    return value;
}

std::size_t parse_count(std::string_view text) {
    const std::int64_t value = parse_integer(text);
    if (value < 0) throw FormatError("expected a nonnegative count, got '" +
                                     std::string(text) + "'");
    return static_cast<std::size_t>(value);
}

bool parse_bool(std::string_view text) {
    const std::string_view t = trim(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw FormatError("malformed flag '" + std::string(text) + "'");
}

Variant parse_cost_variant(std::string_view name) {
    const std::string_view t = trim(name);
    if (t == "m") return Variant::BsfM;
    if (t == "mr") return Variant::BsfMR;
    throw FormatError("unknown variant '" + std::string(name) + "' (expected m or mr)");
}

std::string_view cost_variant_token(Variant v) {
    return v == Variant::BsfM ? "m" : "mr";
}

SolveVariant parse_solve_variant(std::string_view name) {
    const std::string_view t = trim(name);
    if (t == "sequential") return SolveVariant::Sequential;
    if (t == "jacobi-m") return SolveVariant::JacobiM;
    if (t == "jacobi-mr") return SolveVariant::JacobiMR;
    throw FormatError("unknown solver variant '" + std::string(name) +
                      "' (expected sequential, jacobi-m, or jacobi-mr)");
}

Backend parse_backend(std::string_view name) {
    const std::string_view t = trim(name);
    if (t == "sequential") return Backend::Sequential;
    if (t == "in-process") return Backend::InProcess;
    if (t == "multi-process") return Backend::MultiProcess;
    throw FormatError("unknown backend '" + std::string(name) +
                      "' (expected sequential, in-process, or multi-process)");
}

void atomic_write(const std::string& path, const std::string& content) {
    atomic_write_stream(path, [&](std::ostream& out) { out << content; });
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path);
    return std::move(out).str();
}

void write_matrix_file(const std::string& path, const LinearSystem& sys,
                       const std::string& comment) {
    atomic_write_stream(path, [&](std::ostream& out) {
        if (!comment.empty()) out << "# " << comment << '\n';
        out << sys.n << '\n';
        for (std::size_t i = 0; i < sys.n; ++i) {
            write_vector(out, std::span(sys.a).subspan(i * sys.n, sys.n));
            out << '\n';
        }
        write_vector(out, sys.b);
        out << '\n';
    });
}

LinearSystem read_matrix_file(const std::string& path) {
    const std::string text = read_file(path);
    const std::vector<std::string_view> lines = data_lines(text);
    if (lines.empty()) throw FormatError(path + ": empty matrix file");
    const std::size_t n = parse_count(lines[0]);
    if (n < 1) throw FormatError(path + ": dimension must be at least 1");
    if (lines.size() != n + 2) {
        throw FormatError(path + ": expected " + std::to_string(n + 2) +
                          " non-comment lines, found " + std::to_string(lines.size()));
    }
    LinearSystem sys;
    sys.n = n;
    sys.a.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> row = parse_vector(lines[1 + i]);
        if (row.size() != n) {
            throw FormatError(path + ": row " + std::to_string(i + 1) + " has " +
                              std::to_string(row.size()) + " entries, expected " +
                              std::to_string(n));
        }
        sys.a.insert(sys.a.end(), row.begin(), row.end());
    }
    sys.b = parse_vector(lines[n + 1]);
    if (sys.b.size() != n) {
        throw FormatError(path + ": right-hand side has " + std::to_string(sys.b.size()) +
                          " entries, expected " + std::to_string(n));
    }
    return sys;
}

void write_curve_file(const std::string& path, const PredictionCurve& curve,
                      const MachineConstants& constants) {
    atomic_write_stream(path, [&](std::ostream& out) {
        out << "# variant: " << cost_variant_token(curve.variant) << '\n';
        out << "# n: " << curve.n << '\n';
        out << "# latency: " << format_double(constants.latency) << '\n';
        out << "# tau_op: " << format_double(constants.op_time) << '\n';
        out << "# tau_tr: " << format_double(constants.transfer_time) << '\n';
        out << "# bound: " << format_double(curve.scalability_bound) << '\n';
        out << kCurveHeader << '\n';
        for (const CurvePoint& point : curve.points) {
            out << point.workers << ',' << format_double(point.speedup) << ','
                << format_double(point.efficiency) << '\n';
        }
    });
}

CurveFileData read_curve_file(const std::string& path) {
    const std::string text = read_file(path);
    CurveFileData data;
    bool have_variant = false, have_n = false, have_latency = false, have_op = false,
         have_tr = false, have_bound = false, have_header = false;
    for (std::string_view raw : lines_of(text)) {
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string_view body = trim(line.substr(1));
            const std::size_t colon = body.find(':');
            if (colon == std::string_view::npos) continue;  // plain comment
            const std::string_view key = trim(body.substr(0, colon));
            const std::string_view value = trim(body.substr(colon + 1));
            if (key == "variant") {
                data.curve.variant = parse_cost_variant(value);
                have_variant = true;
            } else if (key == "n") {
                data.curve.n = parse_count(value);
                have_n = true;
            } else if (key == "latency") {
                data.constants.latency = parse_double(value);
                have_latency = true;
            } else if (key == "tau_op") {
                data.constants.op_time = parse_double(value);
                have_op = true;
            } else if (key == "tau_tr") {
                data.constants.transfer_time = parse_double(value);
                have_tr = true;
            } else if (key == "bound") {
                data.curve.scalability_bound = parse_double(value);
                have_bound = true;
            }
            continue;
        }
        if (!have_header) {
            if (line != kCurveHeader) {
                throw FormatError(path + ": expected header '" + std::string(kCurveHeader) +
                                  "', got '" + std::string(line) + "'");
            }
            have_header = true;
            continue;
        }
        const std::vector<std::string_view> fields = split(line, ',');
        if (fields.size() != 3) {
            throw FormatError(path + ": malformed curve row '" + std::string(line) + "'");
        }
        CurvePoint point;
        point.workers = static_cast<int>(parse_integer(fields[0]));
        point.speedup = parse_double(fields[1]);
        point.efficiency = parse_double(fields[2]);
        if (!data.curve.points.empty() && point.workers <= data.curve.points.back().workers) {
            throw FormatError(path + ": worker counts must increase strictly");
        }
        data.curve.points.push_back(point);
    }
    if (!have_variant || !have_n || !have_latency || !have_op || !have_tr || !have_bound) {
        throw FormatError(path + ": missing curve metadata");
    }
    if (!have_header) throw FormatError(path + ": missing curve header");
    return data;
}

void write_calibration_file(const std::string& path, const CalibrationResult& result) {
    atomic_write_stream(path, [&](std::ostream& out) {
        out << "# measured machine constants\n";
        out << "latency = " << format_double(result.constants.latency) << '\n';
        out << "tau_op = " << format_double(result.constants.op_time) << '\n';
        out << "tau_tr = " << format_double(result.constants.transfer_time) << '\n';
        out << "timestamp = " << result.timestamp << '\n';
        out << "latency_round_trips = " << result.latency_round_trips << '\n';
        out << "op_multiply_adds = " << result.op_multiply_adds << '\n';
        out << "transfer_doubles = " << result.transfer_doubles << '\n';
        out << "transfer_clamped = " << (result.transfer_clamped ? "true" : "false")
            << '\n';
    });
}

CalibrationResult read_calibration_file(const std::string& path) {
    const std::string text = read_file(path);
    CalibrationResult result;
    bool have_latency = false, have_op = false, have_tr = false;
    for (std::string_view line : data_lines(text)) {
        const auto [key, value] = split_key_value(line);
        if (key == "latency") {
            result.constants.latency = parse_double(value);
            have_latency = true;
        } else if (key == "tau_op") {
            result.constants.op_time = parse_double(value);
            have_op = true;
        } else if (key == "tau_tr") {
            result.constants.transfer_time = parse_double(value);
            have_tr = true;
        } else if (key == "timestamp") {
            result.timestamp = std::string(value);
        } else if (key == "latency_round_trips") {
            result.latency_round_trips = parse_integer(value);
        } else if (key == "op_multiply_adds") {
            result.op_multiply_adds = parse_integer(value);
        } else if (key == "transfer_doubles") {
            result.transfer_doubles = parse_integer(value);
        } else if (key == "transfer_clamped") {
            result.transfer_clamped = parse_bool(value);
        } else {
            throw FormatError(path + ": unknown key '" + std::string(key) + "'");
        }
    }
    if (!have_latency || !have_op || !have_tr) {
        throw FormatError(path + ": a calibration file needs latency, tau_op and tau_tr");
    }
    return result;
}

ProblemSource parse_problem_source(std::string_view text) {
    const std::string_view t = trim(text);
    const std::size_t colon = t.find(':');
    const std::string_view kind = colon == std::string_view::npos ? t : t.substr(0, colon);
    const std::string_view rest =
        colon == std::string_view::npos ? std::string_view() : t.substr(colon + 1);
    ProblemSource source;
    if (kind == "file") {
        if (rest.empty()) throw FormatError("problem source 'file:' needs a path");
        source.kind = ProblemSource::Kind::File;
        source.path = std::string(rest);
        return source;
    }
    if (kind == "paper-system") {
        source.kind = ProblemSource::Kind::Benchmark;
        source.n = parse_count(rest);
        if (source.n < 1) throw FormatError("paper-system needs a dimension of at least 1");
        return source;
    }
    if (kind == "random-dd") {
        const std::vector<std::string_view> parts = split(rest, ':');
        if (parts.size() != 2) {
            throw FormatError("random-dd source needs the form random-dd:N:SEED");
        }
        source.kind = ProblemSource::Kind::RandomDominant;
        source.n = parse_count(parts[0]);
        if (source.n < 1) throw FormatError("random-dd needs a dimension of at least 1");
        source.seed = static_cast<std::uint64_t>(parse_count(parts[1]));
        return source;
    }
    throw FormatError("unknown problem source '" + std::string(text) +
                      "' (expected file:PATH, paper-system:N, or random-dd:N:SEED)");
}

std::string problem_source_text(const ProblemSource& source) {
    switch (source.kind) {
        case ProblemSource::Kind::File:
            return "file:" + source.path;
        case ProblemSource::Kind::Benchmark:
            return "paper-system:" + std::to_string(source.n);
        case ProblemSource::Kind::RandomDominant:
            return "random-dd:" + std::to_string(source.n) + ":" +
                   std::to_string(source.seed);
    }
    throw FormatError("unknown problem source kind");
}

LinearSystem load_problem(const ProblemSource& source) {
    switch (source.kind) {
        case ProblemSource::Kind::File:
            return read_matrix_file(source.path);
        case ProblemSource::Kind::Benchmark:
            return make_benchmark_system(source.n);
        case ProblemSource::Kind::RandomDominant:
            return make_random_dominant_system(source.n, source.seed).system;
    }
    throw FormatError("unknown problem source kind");
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    bool have_problem = false;
    for (std::string_view line : data_lines(text)) {
        const auto [key, value] = split_key_value(line);
        if (key == "problem") {
            cfg.problem = parse_problem_source(value);
            have_problem = true;
        } else if (key == "variant") {
            cfg.variant = parse_solve_variant(value);
        } else if (key == "eps") {
            cfg.eps = parse_double(value);
            if (!(cfg.eps > 0.0)) throw FormatError("eps must be positive");
        } else if (key == "max_iters") {
            cfg.max_iters = parse_count(value);
            if (cfg.max_iters < 1) throw FormatError("max_iters must be at least 1");
        } else if (key == "workers") {
            cfg.workers = parse_count(value);
            if (cfg.workers < 1) throw FormatError("workers must be at least 1");
        } else if (key == "backend") {
            cfg.backend = parse_backend(value);
        } else if (key == "output") {
            cfg.output = std::string(value);
        } else {
            throw FormatError("unknown key '" + std::string(key) + "'");
        }
    }
    if (!have_problem) throw FormatError("a run config needs a 'problem' line");
    return cfg;
}

RunConfig read_run_config(const std::string& path) {
    try {
        return parse_run_config(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

std::string run_config_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "problem = " << problem_source_text(cfg.problem) << '\n';
    out << "variant = " << solve_variant_name(cfg.variant) << '\n';
    out << "eps = " << format_double(cfg.eps) << '\n';
    out << "max_iters = " << cfg.max_iters << '\n';
    out << "workers = " << cfg.workers << '\n';
    out << "backend = " << backend_name(cfg.backend) << '\n';
    if (!cfg.output.empty()) out << "output = " << cfg.output << '\n';
    return std::move(out).str();
}

void write_run_config(const std::string& path, const RunConfig& cfg) {
    atomic_write(path, run_config_text(cfg));
}

void write_solve_report(const std::string& path, const SolveReport& report) {
    atomic_write_stream(path, [&](std::ostream& out) {
        out << "# solve report\n";
        out << "variant = " << solve_variant_name(report.variant) << '\n';
        out << "backend = " << backend_name(report.backend) << '\n';
        out << "n = " << report.n << '\n';
        out << "workers = " << report.workers << '\n';
        out << "iterations = " << report.result.iterations << '\n';
        out << "converged = " << (report.result.converged ? "true" : "false") << '\n';
        out << "residual = " << format_double(report.result.residual) << '\n';
        out << "x = ";
        write_vector(out, report.result.x);
        out << '\n';
        for (const IterationTrace& trace : report.result.traces) {
            out << "trace = " << trace.iteration << ' ' << format_double(trace.send_seconds)
                << ' ' << format_double(trace.work_seconds) << ' '
                << format_double(trace.receive_seconds) << ' '
                << format_double(trace.process_seconds) << '\n';
        }
    });
}

SolveReport read_solve_report(const std::string& path) {
    const std::string text = read_file(path);
    SolveReport report;
    for (std::string_view line : data_lines(text)) {
        const auto [key, value] = split_key_value(line);
        if (key == "variant") {
            report.variant = parse_solve_variant(value);
        } else if (key == "backend") {
            report.backend = parse_backend(value);
        } else if (key == "n") {
            report.n = parse_count(value);
        } else if (key == "workers") {
            report.workers = parse_count(value);
        } else if (key == "iterations") {
            report.result.iterations = parse_count(value);
        } else if (key == "converged") {
            report.result.converged = parse_bool(value);
        } else if (key == "residual") {
            report.result.residual = parse_double(value);
        } else if (key == "x") {
            report.result.x = parse_vector(value);
        } else if (key == "trace") {
            const std::vector<std::string_view> fields = split_whitespace(value);
            if (fields.size() != 5) {
                throw FormatError(path + ": malformed trace line '" + std::string(line) +
                                  "'");
            }
            IterationTrace trace;
            trace.iteration = parse_count(fields[0]);
            trace.send_seconds = parse_double(fields[1]);
            trace.work_seconds = parse_double(fields[2]);
            trace.receive_seconds = parse_double(fields[3]);
            trace.process_seconds = parse_double(fields[4]);
            report.result.traces.push_back(trace);
        } else {
            throw FormatError(path + ": unknown key '" + std::string(key) + "'");
        }
    }
    if (report.result.x.size() != report.n) {
        throw FormatError(path + ": solution length does not match n");
    }
    return report;
}

void write_comparison_file(const std::string& path, const ComparisonReport& report) {
    atomic_write_stream(path, [&](std::ostream& out) {
        out << "# prediction vs observation\n";
        out << "variant = " << cost_variant_token(report.variant) << '\n';
        out << "n = " << report.n << '\n';
        out << "predicted_optimal = " << report.predicted_optimal << '\n';
        out << "observed_optimal = " << report.observed_optimal << '\n';
        out << "max_deviation = " << format_double(report.max_deviation) << '\n';
        out << kComparisonHeader << '\n';
        for (const ComparisonRow& row : report.rows) {
            out << row.workers << ',' << format_double(row.predicted_speedup) << ','
                << format_double(row.observed_speedup) << ','
                << format_double(row.deviation) << ','
                << format_double(row.predicted_efficiency) << ','
                << format_double(row.observed_efficiency) << '\n';
        }
    });
}

ComparisonReport read_comparison_file(const std::string& path) {
    const std::string text = read_file(path);
    ComparisonReport report;
    bool have_header = false;
    for (std::string_view line : data_lines(text)) {
        if (!have_header) {
            if (line == kComparisonHeader) {
                have_header = true;
                continue;
            }
            const auto [key, value] = split_key_value(line);
            if (key == "variant") {
                report.variant = parse_cost_variant(value);
            } else if (key == "n") {
                report.n = parse_count(value);
            } else if (key == "predicted_optimal") {
                report.predicted_optimal = static_cast<int>(parse_integer(value));
            } else if (key == "observed_optimal") {
                report.observed_optimal = static_cast<int>(parse_integer(value));
            } else if (key == "max_deviation") {
                report.max_deviation = parse_double(value);
            } else {
                throw FormatError(path + ": unknown key '" + std::string(key) + "'");
            }
            continue;
        }
        const std::vector<std::string_view> fields = split(line, ',');
        if (fields.size() != 6) {
            throw FormatError(path + ": malformed comparison row '" + std::string(line) +
                              "'");
        }
        ComparisonRow row;
        row.workers = static_cast<int>(parse_integer(fields[0]));
        row.predicted_speedup = parse_double(fields[1]);
        row.observed_speedup = parse_double(fields[2]);
        row.deviation = parse_double(fields[3]);
        row.predicted_efficiency = parse_double(fields[4]);
        row.observed_efficiency = parse_double(fields[5]);
        report.rows.push_back(row);
    }
    if (!have_header) throw FormatError(path + ": missing comparison header");
    return report;
}

}  // namespace bsf::io
