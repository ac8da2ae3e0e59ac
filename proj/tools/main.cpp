// Command-line front end: mean/distance/barycenter computation, ensemble
// generation, verification suites and CSV plot data.
//
// Exit codes: 0 success, 1 internal error or failed verification,
//             2 parse error, 3 domain/degenerate error, 4 non-converged.
// stderr always starts with a machine-parsable category token:
//   parse-error:, domain-error:, degenerate-error:, non-converged:,
//   internal-error:

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "opmean/barycenter.hpp"
#include "opmean/divergence.hpp"
#include "opmean/errors.hpp"
#include "opmean/hermitian.hpp"
#include "opmean/io.hpp"
#include "opmean/mean.hpp"
#include "opmean/measure.hpp"
#include "opmean/verify.hpp"

namespace fs = std::filesystem;

namespace {

using namespace opmean;

// Shortest round-trip decimal form (what the JSON writers emit), so printed
// values are byte-stable run to run.
std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    return nlohmann::json(v).dump();
}

fs::path with_extension(fs::path p, const char* ext) {
    p.replace_extension(ext);
    return p;
}

struct SolverFlags {
    double tol = 1e-10;
    int max_iter = 500;
    double damping = 1.0;
    std::string init = "arithmetic";
    std::string measure;  // measure spec for the hellinger kind
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--tol", flags.tol, "relative residual tolerance");
    cmd->add_option("--max-iter", flags.max_iter, "iteration cap");
    cmd->add_option("--damping", flags.damping, "initial step damping in (0,1]");
    cmd->add_option("--init", flags.init,
                    "initial point: arithmetic | harmonic | ah-geo | <matrix JSON path>");
    cmd->add_option("--measure", flags.measure,
                    "measure spec for kind 'hellinger' (dirac:l, endpoints:l, "
                    "jacobi:p[:nodes], uniform[:nodes], or a measure JSON path)");
}

SolverConfig to_config(const SolverFlags& flags) {
    SolverConfig config;
    config.tol = flags.tol;
    config.max_iter = flags.max_iter;
    config.damping = flags.damping;
    if (flags.init == "arithmetic") {
        config.init = InitStrategy::arithmetic;
    } else if (flags.init == "harmonic") {
        config.init = InitStrategy::harmonic;
    } else if (flags.init == "ah-geo" || flags.init == "ah-geometric") {
        config.init = InitStrategy::ah_geometric;
    } else {
        config.init = InitStrategy::explicit_matrix;
        config.init_matrix = read_spd_file(flags.init);
    }
    return config;
}

std::string solver_config_echo(const std::string& kind, const SolverFlags& flags) {
    std::ostringstream os;
    os << "kind=" << kind << "\n"
       << "tol=" << format_value(flags.tol) << "\n"
       << "max-iter=" << flags.max_iter << "\n"
       << "damping=" << format_value(flags.damping) << "\n"
       << "init=" << flags.init << "\n";
    if (!flags.measure.empty()) os << "measure=" << flags.measure << "\n";
    return os.str();
}

void emit_manifest(const std::string& command, std::vector<std::string> inputs,
                   std::string config_text, std::uint64_t seed, const fs::path& out,
                   const std::string& manifest_override) {
    RunManifest manifest;
    manifest.command = command;
    manifest.inputs = std::move(inputs);
    manifest.config_text = std::move(config_text);
    manifest.seed = seed;
    manifest.timestamp = current_timestamp();
    const fs::path target =
        manifest_override.empty() ? with_extension(out, ".manifest.json") : fs::path(manifest_override);
    write_text_file(target, canonical_dump(manifest_to_json(manifest)));
}

SolverResult run_solver(const std::string& kind, const WeightedEnsemble& ensemble,
                        const SolverFlags& flags) {
    const SolverConfig config = to_config(flags);
    if (kind == "karcher" || kind == "rtm") return karcher_mean(ensemble, config);
    if (kind == "bw") return bw_barycenter(ensemble, config);
    if (kind == "hellinger") {
        if (flags.measure.empty())
            throw ParseError("kind 'hellinger' requires --measure <spec>");
        return hellinger_barycenter(parse_measure_string(flags.measure), ensemble, config);
    }
    if (kind.rfind("sigma:", 0) == 0)
        return ka_barycenter(parse_mean_string(kind.substr(6)), ensemble, config);
    throw ParseError("unknown barycenter kind '" + kind +
                     "' (expected karcher | bw | hellinger | sigma:<mean>)");
}

int cmd_mean(const std::string& sigma_spec, const std::string& a_path, const std::string& b_path,
             const std::string& out_path, const std::string& manifest_override) {
    MeanDescriptor sigma = parse_mean_string(sigma_spec);
    SpdMatrix a = read_spd_file(a_path);
    SpdMatrix b = read_spd_file(b_path);
    if (a.dim() != b.dim())
        throw DomainError("operand dimensions differ: " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
    SpdMatrix m = mean(sigma, a, b);
    write_matrix_file(out_path, m.hermitian());
    emit_manifest("mean", {a_path, b_path}, "sigma=" + sigma_spec + "\n", 0, out_path,
                  manifest_override);
    return 0;
}

int cmd_distance(const std::string& kind, const std::string& a_path, const std::string& b_path,
                 const std::string& measure_spec) {
    SpdMatrix a = read_spd_file(a_path);
    SpdMatrix b = read_spd_file(b_path);
    if (a.dim() != b.dim())
        throw DomainError("operand dimensions differ: " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
    double value = 0.0;
    if (kind == "rtm") {
        value = d_rtm(a, b);
    } else if (kind == "bw") {
        value = d_bw(a, b);
    } else if (kind == "hellinger") {
        if (measure_spec.empty()) throw ParseError("kind 'hellinger' requires --measure <spec>");
        value = phi_mu(parse_measure_string(measure_spec), a, b);
    } else if (kind.rfind("sigma:", 0) == 0) {
        value = phi_sigma(SigmaPotential(parse_mean_string(kind.substr(6))), a, b);
    } else {
        throw ParseError("unknown distance kind '" + kind +
                         "' (expected rtm | bw | hellinger | sigma:<mean>)");
    }
    std::cout << format_value(value) << "\n";
    return 0;
}

int cmd_barycenter(const std::string& kind, const std::string& ensemble_path,
                   const std::string& out_path, std::string report_path, const SolverFlags& flags,
                   const std::string& manifest_override, bool quiet) {
    WeightedEnsemble ensemble = read_ensemble_file(ensemble_path);
    SolverResult result = run_solver(kind, ensemble, flags);
    if (report_path.empty()) report_path = with_extension(out_path, ".report.json").string();
    write_matrix_file(out_path, result.solution.hermitian());
    write_report_file(report_path, result.report);
    emit_manifest("barycenter", {ensemble_path}, solver_config_echo(kind, flags), 0, out_path,
                  manifest_override);
    if (!result.report.converged) {
        std::cerr << "non-converged: residual " << format_value(result.report.final_residual)
                  << " after " << result.report.iterations << " iterations (report written to "
                  << report_path << ")\n";
        return 4;
    }
    if (!quiet) {
        std::cout << "converged in " << result.report.iterations << " iterations, residual "
                  << format_value(result.report.final_residual) << "\n";
    }
    return 0;
}

int cmd_generate(int dim, int count, double condition, std::uint64_t seed,
                 const std::string& out_path, const std::string& manifest_override) {
    if (count < 1) throw DomainError("ensemble member count must be at least 1");
    DeterministicRng rng(seed);
    std::vector<SpdMatrix> matrices;
    matrices.reserve(count);
    for (int k = 0; k < count; ++k) matrices.push_back(random_spd(dim, condition, rng.next_u64()));
    WeightedEnsemble ensemble = WeightedEnsemble::equal_weights(std::move(matrices));
    write_ensemble_file(out_path, ensemble);
    std::ostringstream config;
    config << "dim=" << dim << "\ncount=" << count << "\ncond=" << format_value(condition) << "\n";
    emit_manifest("generate", {}, config.str(), seed, out_path, manifest_override);
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    std::vector<std::string> names;
    if (suite == "all") {
        names = verify_suite_names();
    } else {
        names.push_back(suite);
    }
    for (const std::string& name : names) {
        VerifyResult result = run_verify_suite(name, seed);
        std::cout << "suite " << result.suite << ": " << (result.pass ? "PASS" : "FAIL") << " ("
                  << result.checks << " checks)\n";
        if (!result.pass) {
            std::cerr << "internal-error: verification suite '" << result.suite
                      << "' failed; first counterexamples:\n"
                      << result.detail;
            return 1;
        }
    }
    return 0;
}

int cmd_plotdata(const std::string& kind, const std::string& ensemble_path, int steps,
                 const SolverFlags& flags, const std::string& out_path) {
    WeightedEnsemble ensemble = read_ensemble_file(ensemble_path);
    std::ostringstream csv;
    if (kind == "rtm-geodesic") {
        if (ensemble.size() < 2)
            throw DomainError("rtm-geodesic needs an ensemble with at least two members");
        if (steps < 2) throw DomainError("--steps must be at least 2");
        const SpdMatrix& a = ensemble.matrix(0);
        const SpdMatrix& b = ensemble.matrix(1);
        csv << "t,distance\n";
        for (int i = 0; i < steps; ++i) {
            const double t = double(i) / double(steps - 1);
            GeodesicPoint p = rtm_geodesic(a, b, t);
            csv << format_value(t) << "," << format_value(d_rtm(p.value, a)) << "\n";
        }
    } else {
        SolverResult result = run_solver(kind, ensemble, flags);
        csv << "iter,residual\n";
        for (std::size_t i = 0; i < result.report.residual_history.size(); ++i) {
            csv << i << "," << format_value(result.report.residual_history[i]) << "\n";
        }
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(out_path, csv.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kubo-Ando operator means and barycenters of positive definite matrices"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(opmean::kToolVersion));

    bool quiet = false;
    // Registered on the parent so it documents once; fallthrough() on the
    // subcommands lets it appear after the subcommand name as well.
    app.add_flag("--quiet", quiet, "suppress informational stdout");
    app.fallthrough();

    std::string sigma_spec;
    std::string a_path;
    std::string b_path;
    std::string out_path;
    std::string report_path;
    std::string kind;
    std::string ensemble_path;
    std::string manifest_override;
    std::string suite = "all";
    std::uint64_t seed = 20240901;
    int dim = 3;
    int count = 3;
    int steps = 21;
    double condition = 10.0;
    SolverFlags bary_flags;
    SolverFlags plot_flags;
    std::string distance_measure;

    CLI::App* mean_cmd = app.add_subcommand(
        "mean", "A sigma B for a Kubo-Ando mean given by name or measure");
    mean_cmd->add_option("sigma", sigma_spec,
                         "mean spec: arithmetic:l, geometric:p, harmonic:l, ah-geo:a, heinz:n, "
                         "logmean, parallel-sum, #, measure:<spec or path>")
        ->required();
    mean_cmd->add_option("a", a_path, "matrix JSON for the first operand")->required();
    mean_cmd->add_option("b", b_path, "matrix JSON for the second operand")->required();
    mean_cmd->add_option("out", out_path, "output matrix JSON path")->required();
    mean_cmd->add_option("--manifest", manifest_override, "override manifest output path");

    CLI::App* dist_cmd =
        app.add_subcommand("distance", "distance or divergence between two SPD matrices");
    dist_cmd->add_option("kind", kind, "rtm | bw | hellinger | sigma:<mean>")->required();
    dist_cmd->add_option("a", a_path, "matrix JSON for the first operand")->required();
    dist_cmd->add_option("b", b_path, "matrix JSON for the second operand")->required();
    dist_cmd->add_option("--measure", distance_measure, "measure spec for kind 'hellinger'");

    CLI::App* bary_cmd = app.add_subcommand("barycenter", "weighted barycenter of an ensemble");
    bary_cmd->add_option("kind", kind, "karcher | bw | hellinger | sigma:<mean>")->required();
    bary_cmd->add_option("ensemble", ensemble_path, "ensemble JSON path")->required();
    bary_cmd->add_option("out", out_path, "output matrix JSON path")->required();
    bary_cmd->add_option("report", report_path,
                         "solver report path (default: out path with .report.json)");
    add_solver_flags(bary_cmd, bary_flags);
    bary_cmd->add_option("--manifest", manifest_override, "override manifest output path");

    CLI::App* gen_cmd =
        app.add_subcommand("generate", "write a reproducible random SPD ensemble (equal weights)");
    gen_cmd->add_option("dim", dim, "matrix dimension")->required();
    gen_cmd->add_option("count", count, "number of ensemble members")->required();
    gen_cmd->add_option("out", out_path, "output ensemble JSON path")->required();
    gen_cmd->add_option("--cond", condition, "target condition number (default 10)");
    gen_cmd->add_option("--seed", seed, "random seed");
    gen_cmd->add_option("--manifest", manifest_override, "override manifest output path");

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run a named invariant suite (or 'all')");
    verify_cmd->add_option("suite", suite, "suite name or 'all'");
    verify_cmd->add_option("--seed", seed, "random seed");

    CLI::App* plot_cmd = app.add_subcommand(
        "plotdata", "CSV plot data: rtm-geodesic distances or solver residual history");
    plot_cmd->add_option("kind", kind, "rtm-geodesic | karcher | bw | hellinger | sigma:<mean>")
        ->required();
    plot_cmd->add_option("ensemble", ensemble_path, "ensemble JSON path")->required();
    plot_cmd->add_option("--steps", steps, "geodesic sample count (default 21)");
    plot_cmd->add_option("--out", out_path, "write CSV here instead of stdout");
    add_solver_flags(plot_cmd, plot_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "parse-error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (mean_cmd->parsed())
            return cmd_mean(sigma_spec, a_path, b_path, out_path, manifest_override);
        if (dist_cmd->parsed()) return cmd_distance(kind, a_path, b_path, distance_measure);
        if (bary_cmd->parsed())
            return cmd_barycenter(kind, ensemble_path, out_path, report_path, bary_flags,
                                  manifest_override, quiet);
        if (gen_cmd->parsed())
            return cmd_generate(dim, count, condition, seed, out_path, manifest_override);
        if (verify_cmd->parsed()) return cmd_verify(suite, seed);
        if (plot_cmd->parsed()) return cmd_plotdata(kind, ensemble_path, steps, plot_flags, out_path);
        std::cerr << "parse-error: no subcommand given\n";
        return 2;
    } catch (const opmean::ParseError& e) {
        std::cerr << "parse-error: " << e.what() << "\n";
        return 2;
    } catch (const opmean::DegenerateError& e) {
        std::cerr << "degenerate-error: " << e.what() << "\n";
        return 3;
    } catch (const opmean::DomainError& e) {
        std::cerr << "domain-error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal-error: " << e.what() << "\n";
        return 1;
    }
}
