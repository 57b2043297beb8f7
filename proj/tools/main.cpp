#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsfscale/calibration.hpp"
#include "bsfscale/cost_model.hpp"
#include "bsfscale/io.hpp"
#include "bsfscale/jacobi.hpp"
#include "bsfscale/net.hpp"
#include "bsfscale/runtime.hpp"

namespace {

// Exit codes: 0 success, 2 usage error, 3 I/O or transport failure,
// 4 numerical divergence.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConstantsOptions {
    std::string preset;
    std::string calibration;
    double latency = 0.0;
    double tau_op = 0.0;
    double tau_tr = 0.0;
    CLI::Option* latency_opt = nullptr;
    CLI::Option* tau_op_opt = nullptr;
    CLI::Option* tau_tr_opt = nullptr;
};

void add_constants_options(CLI::App* cmd, ConstantsOptions& opts) {
    cmd->add_option("--preset", opts.preset, "named constants preset (paper-tornado)");
    cmd->add_option("--calibration", opts.calibration,
                    "calibration file holding latency, tau_op and tau_tr");
    opts.latency_opt =
        cmd->add_option("--latency", opts.latency, "one-byte message latency, seconds");
    opts.tau_op_opt =
        cmd->add_option("--tau-op", opts.tau_op, "time per arithmetic operation, seconds");
    opts.tau_tr_opt = cmd->add_option("--tau-tr", opts.tau_tr,
                                      "time per transferred double, seconds");
}

bsf::MachineConstants resolve_constants(const ConstantsOptions& opts) {
    const bool any_explicit = opts.latency_opt->count() > 0 ||
                              opts.tau_op_opt->count() > 0 || opts.tau_tr_opt->count() > 0;
    if (any_explicit) {
        if (opts.latency_opt->count() == 0 || opts.tau_op_opt->count() == 0 ||
            opts.tau_tr_opt->count() == 0) {
            throw UsageError(
                "explicit constants need all three of --latency, --tau-op and --tau-tr");
        }
        bsf::MachineConstants mc{opts.latency, opts.tau_op, opts.tau_tr};
        mc.validate();
        return mc;
    }
    if (!opts.calibration.empty()) {
        bsf::MachineConstants mc = bsf::io::read_calibration_file(opts.calibration).constants;
        mc.validate();
        return mc;
    }
    if (!opts.preset.empty()) {
        if (opts.preset == "paper-tornado") return bsf::tornado_preset();
        throw UsageError("unknown preset '" + opts.preset + "' (expected paper-tornado)");
    }
    if (const char* env = std::getenv("BSF_CALIBRATION"); env != nullptr && *env != '\0') {
        bsf::MachineConstants mc = bsf::io::read_calibration_file(env).constants;
        mc.validate();
        return mc;
    }
    throw UsageError(
        "no machine constants: latency, tau_op and tau_tr are required; pass "
        "--preset paper-tornado, --calibration FILE, all of --latency/--tau-op/--tau-tr, "
        "or set BSF_CALIBRATION");
}

void print_curve(const bsf::PredictionCurve& curve) {
    std::cout << "K,speedup,efficiency\n";
    for (const bsf::CurvePoint& point : curve.points) {
        std::cout << point.workers << ',' << bsf::io::format_double(point.speedup) << ','
                  << bsf::io::format_double(point.efficiency) << '\n';
    }
}

struct PredictArgs {
    std::string variant;
    std::size_t n = 0;
    int kmax = 0;
    std::string output;
    ConstantsOptions constants;
};

int do_predict(const PredictArgs& args) {
    const bsf::Variant variant = bsf::io::parse_cost_variant(args.variant);
    const bsf::MachineConstants mc = resolve_constants(args.constants);
    const bsf::PredictionCurve curve = bsf::predict_curve(variant, args.n, args.kmax, mc);
    if (args.output.empty()) {
        print_curve(curve);
    } else {
        bsf::io::write_curve_file(args.output, curve, mc);
        std::cout << "wrote " << args.output << '\n';
    }
    std::cout << "variant=" << bsf::variant_name(variant) << " n=" << args.n
              << " bound=" << bsf::io::format_double(curve.scalability_bound)
              << " optimal_workers=" << bsf::optimal_workers(curve) << '\n';
    return 0;
}

struct SolveArgs {
    std::string config;
    std::string matrix;
    std::size_t paper_n = 0;
    std::size_t random_n = 0;
    std::uint64_t seed = 1;
    std::string variant;
    double eps = 0.0;
    std::size_t max_iters = 0;
    std::size_t workers = 0;
    std::string backend;
    std::string output;
    std::uint16_t port = 0;
    bool external_workers = false;
    double timeout = 30.0;
    CLI::Option* matrix_opt = nullptr;
    CLI::Option* paper_opt = nullptr;
    CLI::Option* random_opt = nullptr;
    CLI::Option* variant_opt = nullptr;
    CLI::Option* eps_opt = nullptr;
    CLI::Option* max_iters_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* backend_opt = nullptr;
    CLI::Option* output_opt = nullptr;
};

int do_solve(const SolveArgs& args) {
    bsf::io::RunConfig cfg;
    bool have_problem = false;
    if (!args.config.empty()) {
        cfg = bsf::io::read_run_config(args.config);
        have_problem = true;
    }
    const int sources = (args.matrix_opt->count() > 0 ? 1 : 0) +
                        (args.paper_opt->count() > 0 ? 1 : 0) +
                        (args.random_opt->count() > 0 ? 1 : 0);
    if (sources > 1) {
        throw UsageError("pick one of --matrix, --paper-system, or --random-dd");
    }
    if (args.matrix_opt->count() > 0) {
        cfg.problem = {bsf::io::ProblemSource::Kind::File, args.matrix, 0, 0};
        have_problem = true;
    } else if (args.paper_opt->count() > 0) {
        cfg.problem = {bsf::io::ProblemSource::Kind::Benchmark, "", args.paper_n, 0};
        have_problem = true;
    } else if (args.random_opt->count() > 0) {
        cfg.problem = {bsf::io::ProblemSource::Kind::RandomDominant, "", args.random_n,
                       args.seed};
        have_problem = true;
    }
    if (!have_problem) {
        throw UsageError(
            "no problem given: pass --matrix, --paper-system, --random-dd, or a --config "
            "file with a problem line");
    }
    if (args.variant_opt->count() > 0) cfg.variant = bsf::io::parse_solve_variant(args.variant);
    if (args.eps_opt->count() > 0) cfg.eps = args.eps;
    if (args.max_iters_opt->count() > 0) cfg.max_iters = args.max_iters;
    if (args.workers_opt->count() > 0) cfg.workers = args.workers;
    if (args.backend_opt->count() > 0) cfg.backend = bsf::io::parse_backend(args.backend);
    if (args.output_opt->count() > 0) cfg.output = args.output;

    const bsf::LinearSystem sys = bsf::io::load_problem(cfg.problem);

    bsf::SolveConfig solve_cfg;
    solve_cfg.variant = cfg.variant;
    solve_cfg.eps = cfg.eps;
    solve_cfg.max_iters = cfg.max_iters;
    solve_cfg.workers = cfg.workers;

    bsf::FarmConfig farm;
    farm.backend = cfg.backend;
    farm.port = args.port;
    farm.receive_timeout = args.timeout;
    farm.spawn_workers = !args.external_workers;
    if (args.external_workers) {
        farm.on_listening = [](std::uint16_t port) {
            std::cout << "listening on port " << port << std::endl;
        };
    }

    const bsf::SolveResult result = bsf::solve(sys, solve_cfg, farm);
    const bsf::io::SolveReport report{cfg.variant, cfg.backend, sys.n, cfg.workers, result};
    if (!cfg.output.empty()) {
        bsf::io::write_solve_report(cfg.output, report);
        std::cout << "wrote " << cfg.output << '\n';
    }
    std::cout << "variant=" << bsf::solve_variant_name(cfg.variant)
              << " n=" << sys.n << " workers=" << cfg.workers
              << " iterations=" << result.iterations
              << " converged=" << (result.converged ? "true" : "false")
              << " residual=" << bsf::io::format_double(result.residual) << '\n';
    return 0;
}

struct CalibrateArgs {
    std::string output;
    std::size_t latency_round_trips = 1000;
    std::size_t op_multiply_adds = 100000000;
    std::size_t transfer_doubles = 1000000;
};

int do_calibrate(const CalibrateArgs& args) {
    const bsf::CalibrationResult result = bsf::calibrate(
        args.latency_round_trips, args.op_multiply_adds, args.transfer_doubles);
    bsf::io::write_calibration_file(args.output, result);
    std::cout << "wrote " << args.output << '\n';
    std::cout << "latency=" << bsf::io::format_double(result.constants.latency)
              << " tau_op=" << bsf::io::format_double(result.constants.op_time)
              << " tau_tr=" << bsf::io::format_double(result.constants.transfer_time);
    if (result.transfer_clamped) {
        std::cout << " (transfer estimate clamped: latency exceeded the one-way time)";
    }
    std::cout << '\n';
    return 0;
}

struct CompareArgs {
    std::string variant;
    std::size_t n = 0;
    std::vector<int> worker_counts;
    std::size_t iters = 50;
    std::size_t reps = 3;
    std::string backend = "in-process";
    std::string output;
    std::string curve_file;
    ConstantsOptions constants;
};

int do_compare(const CompareArgs& args) {
    const bsf::Variant variant = bsf::io::parse_cost_variant(args.variant);
    const bsf::Backend backend = bsf::io::parse_backend(args.backend);

    bsf::PredictionCurve curve;
    if (!args.curve_file.empty()) {
        const bsf::io::CurveFileData data = bsf::io::read_curve_file(args.curve_file);
        if (data.curve.variant != variant || data.curve.n != args.n) {
            throw UsageError(args.curve_file + " predicts variant " +
                             std::string(bsf::io::cost_variant_token(data.curve.variant)) +
                             ", n=" + std::to_string(data.curve.n) +
                             "; this comparison needs variant " +
                             std::string(bsf::io::cost_variant_token(variant)) +
                             ", n=" + std::to_string(args.n));
        }
        curve = data.curve;
    } else {
        const bsf::MachineConstants mc = resolve_constants(args.constants);
        const int kmax =
            *std::max_element(args.worker_counts.begin(), args.worker_counts.end());
        curve = bsf::predict_curve(variant, args.n, kmax, mc);
    }

    const std::vector<bsf::ObservationRecord> obs = bsf::sweep(
        variant, args.n, args.worker_counts, args.iters, backend, args.reps);
    const bsf::ComparisonReport report = bsf::compare(curve, obs);
    bsf::io::write_comparison_file(args.output, report);
    std::cout << "wrote " << args.output << '\n';
    std::cout << "variant=" << bsf::variant_name(variant) << " n=" << args.n
              << " max_deviation=" << bsf::io::format_double(report.max_deviation)
              << " predicted_optimal=" << report.predicted_optimal
              << " observed_optimal=" << report.observed_optimal << '\n';
    return 0;
}

struct GenArgs {
    std::string kind;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    std::string output;
};

int do_gen(const GenArgs& args) {
    if (args.kind == "paper-system") {
        const bsf::LinearSystem sys = bsf::make_benchmark_system(args.n);
        bsf::io::write_matrix_file(args.output, sys,
                                   "paper-system n=" + std::to_string(args.n));
    } else if (args.kind == "random-dd") {
        const bsf::GeneratedSystem gen = bsf::make_random_dominant_system(args.n, args.seed);
        std::string comment = "random-dd n=" + std::to_string(args.n) +
                              " seed=" + std::to_string(args.seed) + "\n# solution:";
        for (double v : gen.solution) {
            comment += ' ';
            comment += bsf::io::format_double(v);
        }
        bsf::io::write_matrix_file(args.output, gen.system, comment);
    } else {
        throw UsageError("unknown generator '" + args.kind +
                         "' (expected paper-system or random-dd)");
    }
    std::cout << "wrote " << args.output << '\n';
    return 0;
}

struct FarmWorkerArgs {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    std::uint32_t index = 0;
    std::uint32_t workers = 0;
    std::string variant;
    double timeout = 30.0;
};

int do_farm_worker(const FarmWorkerArgs& args) {
    const bsf::SolveVariant variant = bsf::io::parse_solve_variant(args.variant);
    if (variant == bsf::SolveVariant::Sequential) {
        throw UsageError("a farm worker runs jacobi-m or jacobi-mr");
    }
    bsf::JacobiFarmPlugin plugin(variant);
    bsf::run_worker(args.host, args.port, args.index, args.workers, plugin, args.timeout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scalability prediction and measurement for iterative master-worker "
                 "algorithms"};
    app.require_subcommand(1);

    PredictArgs predict_args;
    CLI::App* predict = app.add_subcommand(
        "predict", "compute the speedup/efficiency curve from the cost model");
    predict->add_option("--variant", predict_args.variant, "algorithm representation: m or mr")
        ->required();
    predict->add_option("--n", predict_args.n, "problem dimension")
        ->required()
        ->check(CLI::PositiveNumber);
    predict->add_option("--kmax", predict_args.kmax, "largest worker count in the curve")
        ->required()
        ->check(CLI::PositiveNumber);
    predict->add_option("--output", predict_args.output,
                        "curve file path (omitted: print the curve)");
    add_constants_options(predict, predict_args.constants);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "run a Jacobi solve");
    solve->add_option("--config", solve_args.config, "run configuration file");
    solve_args.matrix_opt = solve->add_option("--matrix", solve_args.matrix,
                                              "read the system from a matrix file");
    solve_args.paper_opt =
        solve->add_option("--paper-system", solve_args.paper_n,
                          "use the scalable benchmark system of this dimension")
            ->check(CLI::PositiveNumber);
    solve_args.random_opt =
        solve->add_option("--random-dd", solve_args.random_n,
                          "use a random diagonally dominant system of this dimension")
            ->check(CLI::PositiveNumber);
    solve->add_option("--seed", solve_args.seed, "seed for --random-dd (default 1)");
    solve_args.variant_opt = solve->add_option(
        "--variant", solve_args.variant, "sequential, jacobi-m, or jacobi-mr");
    solve_args.eps_opt =
        solve->add_option("--eps", solve_args.eps, "squared-norm stop tolerance");
    solve_args.max_iters_opt =
        solve->add_option("--max-iters", solve_args.max_iters, "iteration budget");
    solve_args.workers_opt =
        solve->add_option("--workers", solve_args.workers, "worker count K");
    solve_args.backend_opt = solve->add_option(
        "--backend", solve_args.backend, "sequential, in-process, or multi-process");
    solve_args.output_opt =
        solve->add_option("--output", solve_args.output, "solve report path");
    solve->add_option("--port", solve_args.port,
                      "multi-process listen port (0 picks an ephemeral port)");
    solve->add_flag("--external-workers", solve_args.external_workers,
                    "do not spawn workers; print the port and wait for farm-worker "
                    "processes");
    solve->add_option("--timeout", solve_args.timeout,
                      "multi-process receive timeout, seconds");

    CalibrateArgs calibrate_args;
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "measure machine constants on this host");
    calibrate->add_option("--output", calibrate_args.output, "calibration file path")
        ->required();
    calibrate->add_option("--latency-round-trips", calibrate_args.latency_round_trips,
                          "one-byte round-trips to sample");
    calibrate->add_option("--op-multiply-adds", calibrate_args.op_multiply_adds,
                          "dependent multiply-adds to time");
    calibrate->add_option("--transfer-doubles", calibrate_args.transfer_doubles,
                          "doubles per transfer message");

    CompareArgs compare_args;
    CLI::App* compare = app.add_subcommand(
        "compare", "run a sweep and compare observed speedup with the prediction");
    compare->add_option("--variant", compare_args.variant, "m or mr")->required();
    compare->add_option("--n", compare_args.n, "problem dimension")
        ->required()
        ->check(CLI::PositiveNumber);
    compare->add_option("--k", compare_args.worker_counts, "worker counts to measure")
        ->required()
        ->delimiter(',');
    compare->add_option("--iters", compare_args.iters,
                        "iterations per run (first one is warm-up)");
    compare->add_option("--reps", compare_args.reps, "runs per cell (median wins)");
    compare->add_option("--backend", compare_args.backend,
                        "sequential, in-process, or multi-process");
    compare->add_option("--output", compare_args.output, "comparison file path")
        ->required();
    compare->add_option("--curve", compare_args.curve_file,
                        "reuse a predicted curve file instead of the cost model");
    add_constants_options(compare, compare_args.constants);

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "write a generated system to a matrix file");
    gen->add_option("kind", gen_args.kind, "paper-system or random-dd")->required();
    gen->add_option("--n", gen_args.n, "dimension")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_args.seed, "seed for random-dd (default 1)");
    gen->add_option("--output", gen_args.output, "matrix file path")->required();

    FarmWorkerArgs worker_args;
    CLI::App* farm_worker = app.add_subcommand(
        "farm-worker", "connect to a farm master and process orders until stopped");
    farm_worker->add_option("--host", worker_args.host, "master address");
    farm_worker->add_option("--port", worker_args.port, "master port")->required();
    farm_worker->add_option("--index", worker_args.index, "this worker's index")->required();
    farm_worker->add_option("--workers", worker_args.workers, "total worker count")
        ->required()
        ->check(CLI::PositiveNumber);
    farm_worker->add_option("--variant", worker_args.variant, "jacobi-m or jacobi-mr")
        ->required();
    farm_worker->add_option("--timeout", worker_args.timeout, "receive timeout, seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*predict) return do_predict(predict_args);
        if (*solve) return do_solve(solve_args);
        if (*calibrate) return do_calibrate(calibrate_args);
        if (*compare) return do_compare(compare_args);
        if (*gen) return do_gen(gen_args);
        if (*farm_worker) return do_farm_worker(worker_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const bsf::io::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const bsf::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const bsf::io::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const bsf::net::TransportError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const bsf::FarmError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
