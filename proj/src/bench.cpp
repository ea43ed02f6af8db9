#include "boostconv/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boostconv/error.hpp"
#include "boostconv/matrix_market.hpp"
#include "boostconv/problems.hpp"

namespace boostconv::bench {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string real17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Options. Each struct echoes itself as flag -> value so that a summary can
// be replayed through the same parser.

struct LinearOptions {
    std::string name;
    std::string matrix;
    std::string rhs;
    std::string scheme = "richardson";
    std::string accel = "robust";
    int window = 3;
    double tau = 1e-10;
    int period = 1;
    double beta = 1.0;
    std::string first_step = "doubled";
    int max_iter = 50;
    double rel_tol = 1e-8;

    [[nodiscard]] ordered_json echo() const {
        return {{"name", name},         {"matrix", matrix},   {"rhs", rhs},
                {"scheme", scheme},     {"accel", accel},     {"window", window},
                {"tau", tau},           {"period", period},   {"beta", beta},
                {"first-step", first_step}, {"max-iter", max_iter}, {"rel-tol", rel_tol}};
    }
};

struct BurgersOptions {
    std::string name;
    int nx = 200;
    double dt = 1e-4;
    double tmax = 2.0;
    double nu = 0.01;
    std::string accel = "robust";
    int window = 5;
    double tau = 1e-10;
    int period = 1;
    std::string first_step = "doubled";
    double res_tol = 1e-8;
    int max_iter = 0;  // 0: tmax / dt steps unaccelerated, 100x that as a safety cap otherwise
    int snapshot_every = 0;

    [[nodiscard]] ordered_json echo() const {
        return {{"name", name},       {"nx", nx},         {"dt", dt},
                {"tmax", tmax},       {"nu", nu},         {"accel", accel},
                {"window", window},   {"tau", tau},       {"period", period},
                {"first-step", first_step}, {"res-tol", res_tol}, {"max-iter", max_iter},
                {"snapshot-every", snapshot_every}};
    }
    [[nodiscard]] int effective_max_iter() const {
        if (max_iter > 0) return max_iter;
        const double steps = std::round(tmax / dt) * (accel == "none" ? 1.0 : 100.0);
        return static_cast<int>(std::clamp(steps, 1.0, double(std::numeric_limits<int>::max())));
    }
};

struct SpectralOptions {
    std::string matrix;
    std::string scheme = "richardson";
    int max_it = 100000;
    double tol = 1e-10;
    std::uint64_t seed = kDefaultPowerSeed;
};

AcceleratorConfig make_accel(const std::string& kind, int window, double tau, int period,
                             double beta, const std::string& first_step) {
    AcceleratorConfig cfg;
    cfg.kind = parse_accelerator_kind(kind);
    cfg.window_n = window;
    cfg.tau = tau;
    cfg.period_p = period;
    cfg.beta = beta;
    if (first_step == "doubled") {
        cfg.double_first_step = true;
    } else if (first_step == "residual") {
        cfg.double_first_step = false;
    } else {
        throw Error("unknown first-step mode '" + first_step + "'");
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Output

struct Outcome {
    std::string experiment;
    std::string command;
    ordered_json config;
    RunResult result;
    double wall_time_s = 0.0;
    bool with_energy = false;
};

ordered_json summary_json(const Outcome& o) {
    const auto& h = o.result.history;
    const auto& last = h.records.back();
    ordered_json j;
    j["experiment"] = o.experiment;
    j["command"] = o.command;
    j["config"] = o.config;
    j["iterations"] = h.iterations();
    j["final_relres"] = last.relres2;
    j["final_res2"] = last.res2;
    j["final_resinf"] = last.resinf;
    if (last.energy) j["final_energy_l2"] = *last.energy;
    j["status"] = std::string(to_string(h.status));
    j["wall_time_s"] = o.wall_time_s;
    return j;
}

void write_outputs(const Outcome& o, const fs::path& out_dir, std::ostream& out) {
    fs::create_directories(out_dir);
    const fs::path csv = out_dir / (o.experiment + ".history.csv");
    const fs::path js = out_dir / (o.experiment + ".summary.json");
    {
        std::ofstream f(csv);
        if (!f) throw Error("cannot write '" + csv.string() + "'");
        write_history_csv(f, o.result.history, o.with_energy);
    }
    const auto summary = summary_json(o);
    {
        std::ofstream f(js);
        if (!f) throw Error("cannot write '" + js.string() + "'");
        f << summary.dump(2) << '\n';
    }
    out << o.experiment << ": status=" << summary["status"].get<std::string>()
        << " iterations=" << summary["iterations"].get<int>()
        << " final_relres=" << real17(summary["final_relres"].get<double>()) << '\n';
}

template <typename F>
Outcome timed(F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = body();
    o.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

// ---------------------------------------------------------------------------
// Experiments

Outcome linear_experiment(LinearOptions opt) {
    opt.matrix = fs::absolute(resolve_data_path(opt.matrix)).string();
    opt.rhs = fs::absolute(resolve_data_path(opt.rhs)).string();
    if (opt.name.empty()) opt.name = "linear-" + opt.scheme + "-" + opt.accel;

    RunConfig cfg;
    cfg.accel = make_accel(opt.accel, opt.window, opt.tau, opt.period, opt.beta, opt.first_step);
    cfg.max_iter = opt.max_iter;
    cfg.rel_tol = opt.rel_tol;
    cfg.abs_tol = std::numeric_limits<double>::min();
    cfg.validate();

    return timed([&] {
        LinearStationaryProblem problem(mm_read_matrix(fs::path(opt.matrix)),
                                        mm_read_vector(fs::path(opt.rhs)),
                                        parse_scheme(opt.scheme));
        Outcome o;
        o.experiment = opt.name;
        o.command = "linear";
        o.config = opt.echo();
        o.result = run(problem, DenseVector::Zero(problem.dimension()), cfg);
        return o;
    });
}

Outcome burgers_experiment(BurgersOptions opt, const fs::path& out_dir) {
    if (opt.name.empty()) opt.name = "burgers-" + opt.accel;
    if (!(opt.tmax > 0.0)) throw Error("tmax must be > 0");
    if (opt.snapshot_every < 0) throw Error("snapshot-every must be >= 0");

    RunConfig cfg;
    cfg.accel = make_accel(opt.accel, opt.window, opt.tau, opt.period, 1.0, opt.first_step);
    cfg.max_iter = opt.effective_max_iter();
    cfg.stop_norm = StopNorm::linf;
    cfg.rel_tol = std::numeric_limits<double>::min();
    cfg.abs_tol = opt.res_tol;
    cfg.validate();

    const Burgers1DProblem problem(opt.nx, opt.nu, opt.dt);
    std::ofstream snapshots;
    if (opt.snapshot_every > 0) {
        fs::create_directories(out_dir);
        const fs::path p = out_dir / (opt.name + ".fields.csv");
        snapshots.open(p);
        if (!snapshots) throw Error("cannot write '" + p.string() + "'");
        snapshots << "k";
        const DenseVector x = problem.grid();
        for (Eigen::Index i = 0; i < x.size(); ++i) snapshots << ",x=" << real17(x[i]);
        snapshots << '\n';
        cfg.on_iterate = [&snapshots, every = opt.snapshot_every](int k, const DenseVector& u) {
            if (k % every != 0) return;
            snapshots << k;
            for (Eigen::Index i = 0; i < u.size(); ++i) snapshots << ',' << real17(u[i]);
            snapshots << '\n';
        };
    }

    return timed([&] {
        Outcome o;
        o.experiment = opt.name;
        o.command = "burgers";
        o.config = opt.echo();
        o.with_energy = true;
        o.result = run(problem, problem.initial_condition(), cfg);
        return o;
    });
}

int spectral_command(const SpectralOptions& opt, std::ostream& out) {
    const auto a = mm_read_matrix(resolve_data_path(opt.matrix));
    const auto n = a.n_rows;
    LinearStationaryProblem problem(a, DenseVector::Zero(n), parse_scheme(opt.scheme));
    const auto res = power_iteration(
        [&](const DenseVector& v) { return problem.apply_iteration_matrix(v); }, n, opt.max_it,
        opt.tol, opt.seed);
    out << "rho(I-BA) = " << real17(res.estimate) << " scheme=" << opt.scheme
        << " converged=" << (res.converged ? "true" : "false")
        << " iterations=" << res.iterations << '\n';
    return kExitOk;
}

std::vector<std::string> replay_args(const ordered_json& summary, const std::string& out_dir) {
    std::vector<std::string> args{"boostconv_bench", summary.at("command").get<std::string>()};
    for (const auto& [key, value] : summary.at("config").items()) {
        if (value.is_string() && value.get<std::string>().empty()) continue;
        args.push_back("--" + key);
        args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    args.push_back("--out");
    args.push_back(out_dir);
    return args;
}

int worst_code(int a, int b) {
    if (a == kExitError || b == kExitError) return kExitError;
    if (a == kExitDiverged || b == kExitDiverged) return kExitDiverged;
    return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

void write_history_csv(std::ostream& os, const ConvergenceHistory& history, bool with_energy) {
    os << "k,active,accepted,window_m,res2,resinf,relres2,kappa_f";
    if (with_energy) os << ",energy_l2";
    os << '\n';
    for (const auto& rec : history.records) {
        os << rec.k << ',' << int{rec.active} << ',' << int{rec.accepted} << ',' << rec.window_m
           << ',' << real17(rec.res2) << ',' << real17(rec.resinf) << ',' << real17(rec.relres2)
           << ',';
        if (rec.kappa_f) os << real17(*rec.kappa_f);
        if (with_energy) {
            os << ',';
            if (rec.energy) os << real17(*rec.energy);
        }
        os << '\n';
    }
}

fs::path resolve_data_path(const fs::path& path) {
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && path.is_relative()) {
        const fs::path candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate;
    }
    throw Error("file not found: '" + path.string() + "' (also searched $" + kDataDirEnv + ")");
}

int exit_code_for(const ConvergenceHistory& history) {
    switch (history.status) {
        case RunStatus::error: return kExitError;
        case RunStatus::diverged: return kExitDiverged;
        case RunStatus::converged: return kExitOk;
        case RunStatus::max_iter:
            return history.final_relres() > 1.0 ? kExitDiverged : kExitOk;
    }
    return kExitError;
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Residual-recombination (BoostConv) benchmark driver", "boostconv_bench"};
    app.require_subcommand(1);

    LinearOptions lin;
    std::string lin_out = ".";
    auto* linear = app.add_subcommand("linear", "Stationary iteration on a MatrixMarket system");
    linear->add_option("--name", lin.name, "Experiment id used for output file names");
    linear->add_option("--matrix", lin.matrix, "MatrixMarket coordinate matrix")->required();
    linear->add_option("--rhs", lin.rhs, "MatrixMarket array right-hand side")->required();
    linear->add_option("--scheme", lin.scheme)->check(CLI::IsMember({"richardson", "jacobi"}));
    linear->add_option("--accel", lin.accel)
        ->check(CLI::IsMember({"none", "plain", "robust", "anderson"}));
    linear->add_option("--window", lin.window);
    linear->add_option("--tau", lin.tau);
    linear->add_option("--period", lin.period);
    linear->add_option("--beta", lin.beta, "Anderson mixing parameter");
    linear->add_option("--first-step", lin.first_step)
        ->check(CLI::IsMember({"doubled", "residual"}));
    linear->add_option("--max-iter", lin.max_iter);
    linear->add_option("--rel-tol", lin.rel_tol);
    linear->add_option("--out", lin_out, "Output directory");

    BurgersOptions bur;
    std::string bur_out = ".";
    bool compare = false;
    auto* burgers = app.add_subcommand("burgers", "Explicit-Euler march of 1D viscous Burgers");
    burgers->add_option("--name", bur.name);
    burgers->add_option("--nx", bur.nx);
    burgers->add_option("--dt", bur.dt);
    burgers->add_option("--tmax", bur.tmax);
    burgers->add_option("--nu", bur.nu);
    burgers->add_option("--accel", bur.accel)->check(CLI::IsMember({"none", "plain", "robust"}));
    burgers->add_option("--window", bur.window);
    burgers->add_option("--tau", bur.tau);
    burgers->add_option("--period", bur.period);
    burgers->add_option("--first-step", bur.first_step)
        ->check(CLI::IsMember({"doubled", "residual"}));
    burgers->add_option("--res-tol", bur.res_tol, "Stop when |R(u)|_inf <= res-tol");
    burgers->add_option("--max-iter", bur.max_iter,
                        "Iteration cap (default tmax/dt, or 100x that for accelerated runs)");
    burgers->add_option("--snapshot-every", bur.snapshot_every, "Write u every K iterations");
    burgers->add_flag("--compare", compare, "Run none, plain and robust concurrently");
    burgers->add_option("--out", bur_out, "Output directory");

    SpectralOptions spect;
    auto* spectral = app.add_subcommand("spectral", "Power-iteration estimate of rho(I - B A)");
    spectral->add_option("--matrix", spect.matrix)->required();
    spectral->add_option("--scheme", spect.scheme)->check(CLI::IsMember({"richardson", "jacobi"}));
    spectral->add_option("--max-it", spect.max_it);
    spectral->add_option("--tol", spect.tol);
    spectral->add_option("--seed", spect.seed);

    std::string replay_file;
    std::string replay_out = ".";
    auto* replay = app.add_subcommand("replay", "Re-run the configuration echoed in a summary");
    replay->add_option("summary", replay_file, "A <name>.summary.json file")->required();
    replay->add_option("--out", replay_out, "Output directory");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (linear->parsed()) {
            const auto o = linear_experiment(lin);
            write_outputs(o, lin_out, out);
            return exit_code_for(o.result.history);
        }
        if (burgers->parsed()) {
            if (!compare) {
                const auto o = burgers_experiment(bur, bur_out);
                write_outputs(o, bur_out, out);
                return exit_code_for(o.result.history);
            }
            std::vector<std::future<Outcome>> runs;
            for (const char* kind : {"none", "plain", "robust"}) {
                BurgersOptions variant = bur;
                variant.accel = kind;
                variant.name = (bur.name.empty() ? std::string("burgers") : bur.name) + "-" + kind;
                runs.push_back(std::async(std::launch::async, [variant, bur_out] {
                    return burgers_experiment(variant, bur_out);
                }));
            }
            int code = kExitOk;
            for (auto& f : runs) {
                const auto o = f.get();
                write_outputs(o, bur_out, out);
                code = worst_code(code, exit_code_for(o.result.history));
            }
            return code;
        }
        if (spectral->parsed()) return spectral_command(spect, out);
        if (replay->parsed()) {
            std::ifstream f(replay_file);
            if (!f) throw Error("cannot open '" + replay_file + "'");
            ordered_json summary;
            try {
                summary = ordered_json::parse(f);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(replay_file + ": " + e.what());
            }
            const auto again = replay_args(summary, replay_out);
            return run_cli(again, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv, argv + argc);
    return run_cli(args, out, err);
}

}  // namespace boostconv::bench
