// qma: quaternionic Monge-Ampere toolkit command line.
//
// Subcommands: verify, solve, sweep, abp, bench.
// Exit codes: 0 success, 1 invariant failure, 2 usage/config error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "qma/abp.hpp"
#include "qma/calabi.hpp"
#include "qma/errors.hpp"
#include "qma/fd_kernels.hpp"
#include "qma/fft_poisson.hpp"
#include "qma/io.hpp"
#include "qma/reduce.hpp"
#include "qma/scalar_field.hpp"
#include "qma/verify.hpp"

namespace {

namespace fs = std::filesystem;
using qma::io::json;

struct GlobalOpts {
    std::string config;
    std::string out_dir = "out";
    std::uint64_t seed = 2026;
    int threads = 0;
    bool quiet = false;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path ensure_out_dir(const GlobalOpts& g) {
    fs::path dir(g.out_dir);
    fs::create_directories(dir);
    return dir;
}

int cmd_verify(const GlobalOpts& g, const std::string& suite) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<qma::verify::SuiteReport> reports;
    reports = qma::verify::run_suites(suite, g.seed);

    bool all_pass = true;
    json summary;
    summary["tool_version"] = qma::io::kToolVersion;
    summary["seed"] = g.seed;
    summary["suite"] = suite;
    json items = json::array();
    for (const auto& rep : reports) {
        all_pass = all_pass && rep.pass;
        items.push_back(qma::verify::to_json(rep));
        if (!g.quiet) {
            for (const auto& c : rep.checks)
                std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << rep.suite << "/" << c.name
                          << " - " << c.detail << "\n";
        }
    }
    summary["reports"] = items;
    summary["pass"] = all_pass;

    const fs::path dir = ensure_out_dir(g);
    const fs::path report_path = dir / ("verify_" + suite + ".json");
    qma::io::write_text_file(report_path, summary.dump(2) + "\n");

    qma::io::Manifest manifest("verify", qma::io::fnv1a_hex(suite));
    manifest.set("seed", g.seed);
    manifest.add_output(report_path);
    manifest.add_timing("total", seconds_since(t0));
    manifest.write(dir / ("manifest_verify_" + suite + ".json"));

    if (!g.quiet)
        std::cout << (all_pass ? "verify: all checks passed" : "verify: FAILURES present")
                  << "\n";
    return all_pass ? 0 : 1;
}

int cmd_solve(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    const qma::io::ProblemSpec spec = qma::io::load_problem(g.config);
    const auto t_parse = seconds_since(t0);

    const qma::calabi::SolveReport rep = qma::calabi::solve(spec.problem, spec.solver);
    const auto t_solve = seconds_since(t0) - t_parse;

    const fs::path dir = ensure_out_dir(g);
    const fs::path report_path = dir / "solve_report.json";
    const fs::path field_path = dir / "phi.field";
    json j = qma::io::to_json(rep);
    j["problem"] = {{"n", spec.problem.n},
                    {"N", spec.problem.N},
                    {"family", spec.family},
                    {"scale", spec.scale}};
    qma::io::write_text_file(report_path, j.dump(2) + "\n");
    qma::save_field(rep.phi, field_path.string());

    qma::io::Manifest manifest("solve",
                               qma::io::fnv1a_hex(qma::io::read_text_file(g.config)));
    manifest.set("seed", g.seed);
    manifest.add_output(report_path);
    manifest.add_output(field_path);
    manifest.add_timing("parse", t_parse);
    manifest.add_timing("solve", t_solve);
    manifest.write(dir / "manifest_solve.json");

    if (!g.quiet)
        std::cout << "solve: " << qma::calabi::to_string(rep.status)
                  << ", |phi|_inf = " << rep.phi_sup << ", A = " << rep.A << "\n";
    return rep.converged() ? 0 : 3;
}

int cmd_sweep(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    const qma::io::SweepSpec spec = qma::io::load_sweep(g.config);
    if (spec.had_duplicates && !g.quiet)
        std::cerr << "warning: duplicate scales deduplicated\n";

    const qma::calabi::SweepResult res =
        qma::calabi::c0_sweep(spec.base.problem.F, spec.scales, spec.base.solver);

    const fs::path dir = ensure_out_dir(g);
    const fs::path json_path = dir / "sweep.json";
    const fs::path csv_path = dir / "sweep.csv";
    qma::io::write_text_file(json_path, qma::io::to_json(res).dump(2) + "\n");
    qma::io::write_text_file(csv_path, qma::io::sweep_csv(res));

    qma::io::Manifest manifest("sweep",
                               qma::io::fnv1a_hex(qma::io::read_text_file(g.config)));
    manifest.set("seed", g.seed);
    manifest.set("deduplicated", spec.had_duplicates);
    manifest.add_output(json_path);
    manifest.add_output(csv_path);
    manifest.add_timing("total", seconds_since(t0));
    manifest.write(dir / "manifest_sweep.json");

    if (!g.quiet)
        std::cout << "sweep: " << res.records.size() << " scales, envelope c1 = "
                  << res.sup_fit.c1 << ", c2 = " << res.sup_fit.c2 << "\n";
    return 0;
}

int cmd_abp(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();

    int N = 12;
    double side = 1.0;
    json instances = json::array();
    if (!g.config.empty()) {
        const json cfg =
            qma::io::parse_object(qma::io::read_text_file(g.config), g.config);
        qma::io::require_keys(cfg, {"N", "side", "instances"}, "abp config");
        N = cfg.value("N", 12);
        side = cfg.value("side", 1.0);
        if (cfg.contains("instances")) instances = cfg.at("instances");
    }
    if (instances.empty()) {
        instances.push_back({{"kind", "poisson_well"}, {"g0", 8.0}});
        instances.push_back({{"kind", "quadratic_well"}, {"r2", 1.5}, {"a", 0.15}});
    }

    std::string csv = qma::io::abp_csv_header();
    json results = json::array();
    int idx = 0;
    for (const auto& inst : instances) {
        qma::io::require_keys(inst, {"kind", "g0", "bumps", "seed", "r2", "a"},
                              "abp instance");
        const std::string kind = inst.value("kind", "poisson_well");
        qma::abp::AbpReport rep;
        std::string label = kind + "_" + std::to_string(idx++);
        if (kind == "poisson_well") {
            const double g0 = inst.value("g0", 8.0);
            const auto u = qma::abp::poisson_well(
                1, N, side, [g0](std::span<const double>) { return g0; });
            rep = qma::abp::verify_key_proposition(u, 0.0);
        } else if (kind == "quadratic_well") {
            const double r2 = inst.value("r2", 1.5);
            const double a = inst.value("a", 0.15);
            Eigen::VectorXd center = Eigen::VectorXd::Constant(4, 0.5 * side);
            const auto u = qma::abp::quadratic_well(1, N, side, center, r2);
            rep = qma::abp::verify_key_lemma(u, a, 0.0);
        } else {
            throw qma::ConfigError("unknown abp instance kind \"" + kind + "\"");
        }
        csv += qma::io::abp_csv_row(label, rep);
        json r = qma::io::to_json(rep);
        r["instance"] = label;
        results.push_back(r);
    }

    const fs::path dir = ensure_out_dir(g);
    const fs::path csv_path = dir / "abp.csv";
    const fs::path json_path = dir / "abp.json";
    qma::io::write_text_file(csv_path, csv);
    json summary;
    summary["N"] = N;
    summary["side"] = side;
    summary["results"] = results;
    qma::io::write_text_file(json_path, summary.dump(2) + "\n");

    qma::io::Manifest manifest(
        "abp", g.config.empty() ? "default"
                                : qma::io::fnv1a_hex(qma::io::read_text_file(g.config)));
    manifest.set("seed", g.seed);
    manifest.add_output(csv_path);
    manifest.add_output(json_path);
    manifest.add_timing("total", seconds_since(t0));
    manifest.write(dir / "manifest_abp.json");

    bool all_hold = true;
    for (const auto& r : results) {
        if (r.contains("abp_holds") && !r.at("abp_holds").get<bool>() &&
            r.at("contact_points").get<std::size_t>() > 0)
            all_hold = false;
    }
    if (!g.quiet) std::cout << "abp: " << results.size() << " instances\n";
    return all_hold ? 0 : 1;
}

int cmd_bench(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    qma::io::BenchSpec spec;
    if (!g.config.empty()) spec = qma::io::load_bench(g.config);

    qma::ScalarField phi =
        qma::calabi::random_smooth_field(spec.n, spec.N, spec.seed);

    struct Sample {
        std::string phase;
        int rep;
        double seconds;
    };
    std::vector<Sample> samples;

    for (int r = 0; r < spec.repetitions; ++r) {
        {
            const auto t = std::chrono::steady_clock::now();
            qma::fd::MooreState st;
            qma::fd::build_moore_state(phi, st);
            samples.push_back({"hessian_assembly", r, seconds_since(t)});

            const auto t2 = std::chrono::steady_clock::now();
            std::vector<double> det(st.size());
            qma::fd::moore_density(st, det);
            samples.push_back({"moore_evaluation", r, seconds_since(t2)});
        }
        {
            const auto t = std::chrono::steady_clock::now();
            qma::fd::QuarterLaplacianInverse inv(spec.n, spec.N);
            std::vector<double> rhs(phi.size()), out(phi.size());
            for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = phi[i];
            inv.apply_inverse(rhs, out);
            samples.push_back({"linear_solve", r, seconds_since(t)});
        }
    }

    std::ostringstream csv;
    csv.precision(12);
    csv << "phase,rep,seconds\n";
    for (const auto& s : samples) csv << s.phase << ',' << s.rep << ',' << s.seconds << '\n';

    json stats = json::object();
    for (const std::string phase : {"hessian_assembly", "moore_evaluation", "linear_solve"}) {
        double sum = 0, mn = 1e300, mx = 0;
        int count = 0;
        for (const auto& s : samples)
            if (s.phase == phase) {
                sum += s.seconds;
                mn = std::min(mn, s.seconds);
                mx = std::max(mx, s.seconds);
                ++count;
            }
        json ph;
        ph["mean"] = sum / count;
        ph["min"] = mn;
        ph["max"] = mx;
        ph["repetitions"] = count;
        ph["low_confidence"] = count < 2;
        stats[phase] = ph;
    }

    const fs::path dir = ensure_out_dir(g);
    const fs::path csv_path = dir / "bench.csv";
    const fs::path json_path = dir / "bench.json";
    qma::io::write_text_file(csv_path, csv.str());
    json summary;
    summary["n"] = spec.n;
    summary["N"] = spec.N;
    summary["repetitions"] = spec.repetitions;
    summary["low_confidence"] = spec.repetitions < 2;
    summary["phases"] = stats;
    qma::io::write_text_file(json_path, summary.dump(2) + "\n");

    qma::io::Manifest manifest(
        "bench", g.config.empty() ? "default"
                                  : qma::io::fnv1a_hex(qma::io::read_text_file(g.config)));
    manifest.set("seed", spec.seed);
    manifest.add_output(csv_path);
    manifest.add_output(json_path);
    manifest.add_timing("total", seconds_since(t0));
    manifest.write(dir / "manifest_bench.json");

    if (!g.quiet) std::cout << "bench: " << samples.size() << " samples written\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quaternionic Monge-Ampere toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config, "path to problem JSON");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--threads", g.threads, "OpenMP thread count");
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    std::string suite = "all";
    auto* verify_cmd = app.add_subcommand("verify", "run an invariant suite");
    verify_cmd->add_option("suite", suite, "moore|calculus|abp|solver|all");
    auto* solve_cmd = app.add_subcommand("solve", "solve a Calabi problem");
    auto* sweep_cmd = app.add_subcommand("sweep", "C0 sweep over scales");
    auto* abp_cmd = app.add_subcommand("abp", "ABP inequality instances");
    auto* bench_cmd = app.add_subcommand("bench", "phase timings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (g.threads > 0) qma::par::set_threads(g.threads);

    try {
        if (verify_cmd->parsed()) return cmd_verify(g, suite);
        if (solve_cmd->parsed()) {
            if (g.config.empty()) throw qma::ConfigError("solve needs --config");
            return cmd_solve(g);
        }
        if (sweep_cmd->parsed()) {
            if (g.config.empty()) throw qma::ConfigError("sweep needs --config");
            return cmd_sweep(g);
        }
        if (abp_cmd->parsed()) return cmd_abp(g);
        if (bench_cmd->parsed()) return cmd_bench(g);
    } catch (const qma::UnknownSuite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qma::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qma::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
