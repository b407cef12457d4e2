// Command-line front end: transduction curves, single memory runs, parameter
// sweeps, ensemble benchmarking, and the validation suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "oamem/oamem.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw oamem::ScenarioError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_table(const oamem::OutputTable& table, const std::string& out_path) {
    if (out_path.empty())
        oamem::emit_csv(table, std::cout);
    else
        oamem::emit_csv(table, out_path);
}

// Summary goes to stdout unless the CSV itself is on stdout.
std::ostream& summary_stream(const std::string& out_path) {
    return out_path.empty() ? std::cerr : std::cout;
}

void apply_backend_override(oamem::ProtocolConfig& cfg, const std::string& backend) {
    if (backend.empty()) return;
    if (backend == "analytic")
        cfg.backend = oamem::Backend::analytic;
    else if (backend == "numeric")
        cfg.backend = oamem::Backend::numeric;
    else if (backend == "both")
        cfg.backend = oamem::Backend::both;
    else
        throw oamem::ScenarioError("unknown backend '" + backend + "'");
}

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string backend;
    std::uint64_t seed = 12345;
    int jobs = 0;
};

int cmd_transduce(const CommonOpts& opt, int points, double t_max_ns, double na0, double nb0,
                  double bath_nth) {
    using namespace oamem;
    ScenarioDocument doc = parse_scenario(slurp(opt.config_path));
    const WaveguideParams& wg = doc.config.wg;
    double g = doc.config.coupling.g1;
    double k = doc.config.selector.k;
    if (points < 2) throw ScenarioError("--points must be >= 2");

    double n_th = bath_nth >= 0.0 ? bath_nth
                                  : thermal_occupation(wg.Omega_ac, doc.config.env.T_en);
    if (nb0 < 0.0) nb0 = n_th;
    double swap_t = optimal_pulse_duration(g);
    double t_max = t_max_ns > 0.0 ? t_max_ns * 1e-9 : 3.0 * swap_t;

    OutputTable table;
    table.seed = opt.seed;
    table.config_hash = doc.hash;
    table.columns = {"t_ns",            "n_signal_exact",  "n_acoustic_exact",
                     "n_signal_approx", "n_acoustic_approx", "n_acoustic_transfer"};
    // The transferred population is read against a pump-off baseline; the raw
    // acoustic curve is dominated by the thermal background at warm baths.
    std::vector<double> ts(points), transfer(points);
    bool weak = false;
    for (int i = 0; i < points; ++i) {
        double t = t_max * double(i) / double(points - 1);
        ts[i] = t;
        TransductionPopulations ex = transduction_populations_exact(wg, g, na0, nb0, k, t, n_th);
        TransductionPopulations ap = transduction_populations_approx(wg, g, na0, nb0, n_th, t);
        TransductionPopulations base =
            transduction_populations_exact(wg, g, 0.0, nb0, k, t, n_th);
        weak = weak || ex.weak_coupling_warning;
        transfer[i] = ex.n_b - base.n_b;
        table.rows.push_back({t * 1e9, ex.n_a, ex.n_b, ap.n_a, ap.n_b, transfer[i]});
    }
    write_table(table, opt.out_path);

    std::ostream& os = summary_stream(opt.out_path);
    os << "n_th_bath = " << fmt(n_th) << "\n";
    os << "swap_time_ns = " << fmt(swap_t * 1e9) << "\n";
    os << "rabi_frequency_over_2pi_MHz = "
       << fmt(transduction_oscillation_frequency(wg, g, k) / (two_pi * 1e6)) << "\n";
    os << "efficiency_bound = " << fmt(conversion_efficiency_max(wg, g)) << "\n";
    if (na0 > 0.0) {
        Extremum peak = find_extremum(ts, transfer, ExtremumKind::maximum);
        os << "peak_transfer_t_ns = " << fmt(peak.x * 1e9)
           << (peak.boundary_warning ? " (window boundary)" : "") << "\n";
        os << "peak_transfer = " << fmt(peak.value) << "\n";
        os << "transfer_efficiency = " << fmt(peak.value / na0) << "\n";
    }
    if (weak) os << "warning: coupling is not strong compared to the decay rates\n";
    return 0;
}

int cmd_memory(const CommonOpts& opt) {
    using namespace oamem;
    ScenarioDocument doc = parse_scenario(slurp(opt.config_path));
    apply_backend_override(doc.config, opt.backend);
    ProtocolResult res = run_protocol(doc.config);
    bool ent = doc.config.scenario.kind == ScenarioKind::entangled;

    if (!opt.out_path.empty()) {
        OutputTable table;
        table.seed = opt.seed;
        table.config_hash = doc.hash;
        table.columns = {"stage", "t_ns", "metric", "fidelity"};
        const StageTimeline* tls[] = {&res.write, &res.store, &res.readout};
        for (int s = 0; s < 3; ++s)
            for (std::size_t i = 0; i < tls[s]->times.size(); ++i)
                table.rows.push_back({double(s), tls[s]->times[i] * 1e9, tls[s]->metric[i],
                                      tls[s]->fidelity[i]});
        emit_csv(table, opt.out_path);
    }

    std::ostream& os = std::cout;
    os << "tau1_ns = " << fmt(res.tau1 * 1e9)
       << (res.tau1_boundary_warning ? " (window boundary)" : "") << "\n";
    os << "tau_s_ns = " << fmt(res.tau_s * 1e9) << "\n";
    os << "tau2_ns = " << fmt(res.tau2 * 1e9)
       << (res.tau2_boundary_warning ? " (window boundary)" : "") << "\n";
    os << "numeric_fallback = " << (res.numeric_fallback ? "yes" : "no") << "\n";
    os << "fidelity = " << fmt(res.fidelity) << "\n";
    if (ent) {
        os << "log_negativity = " << fmt(res.log_negativity) << "\n";
    } else {
        os << "squeezing_factor = " << fmt(res.squeezing_factor_out) << "\n";
        os << "squeezing_dB = " << fmt(squeezing_factor_db(res.retrieved_state, 0)) << "\n";
    }
    if (res.backend_report.compared)
        os << "backend_max_difference = " << fmt(res.backend_report.max_cov_difference) << "\n";
    return 0;
}

int cmd_sweep(const CommonOpts& opt) {
    using namespace oamem;
    ScenarioDocument doc = parse_scenario(slurp(opt.config_path));
    apply_backend_override(doc.config, opt.backend);
    if (doc.sweep.axes.empty())
        throw ScenarioError("config has no [sweep] section; nothing to sweep");
    OutputTable table = run_sweep(doc.config, doc.sweep, opt.jobs);
    table.seed = opt.seed;
    table.config_hash = doc.hash;
    write_table(table, opt.out_path);
    return 0;
}

int cmd_benchmark(const CommonOpts& opt, double beta, std::uint64_t samples) {
    using namespace oamem;
    ScenarioDocument doc = parse_scenario(slurp(opt.config_path));
    double bench = classical_benchmark(beta);
    std::cout << "classical_benchmark = " << fmt(bench) << "\n";

    struct Row {
        const char* name;
        EnsembleConvention conv;
    };
    const Row rows[] = {{"complex_modulus", EnsembleConvention::complex_modulus},
                        {"real_gaussian", EnsembleConvention::real_gaussian}};
    bool any_in_window = false;
    for (const Row& row : rows) {
        EnsembleResult er =
            ensemble_average_fidelity(doc.config, beta, samples, opt.seed, row.conv);
        any_in_window = any_in_window || (er.F_mean >= 0.76 && er.F_mean <= 0.82);
        std::cout << "convention = " << row.name << ": F_mean = " << fmt(er.F_mean)
                  << ", F_stderr = " << fmt(er.F_stderr) << ", exceeds_benchmark = "
                  << (er.exceeds_benchmark ? "yes" : "no") << "\n";
    }
    if (!any_in_window) {
        std::cout << "note: mean fidelity lies outside the reference window [0.76, 0.82] under "
                     "both sampling conventions.\n"
                     "note: the window is reproduced when the acoustic bath occupancy is taken "
                     "as ~0.11 instead of the\n"
                     "note: Bose occupancy 2.27 that hbar*Omega_ac/(kB*T_en) gives at these "
                     "parameters; see README.\n";
    }
    return 0;
}

int cmd_validate(std::uint64_t seed, int draws, double tolerance) {
    using namespace oamem;
    ValidationReport oracle = oracle_equivalence_suite(seed, draws, tolerance);
    int failures = 0;
    for (const ValidationCheck& c : oracle.checks) {
        if (!c.pass) {
            ++failures;
            std::cout << "[FAIL] " << c.label << ": difference " << fmt(c.worst) << "\n";
        }
    }
    std::cout << "oracle equivalence: " << oracle.checks.size() << " checks, worst difference "
              << fmt(oracle.worst_difference) << ", worst physicality deficit "
              << fmt(oracle.worst_physicality_deficit) << " ["
              << (oracle.all_pass ? "PASS" : "FAIL") << "]\n";

    ValidationReport det = determinism_suite();
    for (const ValidationCheck& c : det.checks)
        std::cout << c.label << " [" << (c.pass ? "PASS" : "FAIL") << "]\n";

    bool ok = oracle.all_pass && det.all_pass;
    std::cout << (ok ? "validation passed" : "validation FAILED") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traveling-wave optoacoustic quantum memory simulator"};
    app.set_version_flag("--version", oamem::tool_version);
    app.require_subcommand(1);

    CommonOpts opt;
    int points = 601;
    double t_max_ns = 0.0, na0 = 1.0, nb0 = -1.0, bath_nth = -1.0;
    double beta = 1.0;
    std::uint64_t samples = 10000;
    int draws = 12;
    double tolerance = 1e-6;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opt.config_path, "scenario file");
        if (needs_config) c->required();
        sub->add_option("--out", opt.out_path, "CSV output path (default: stdout)");
        sub->add_option("--seed", opt.seed, "RNG seed recorded in output metadata");
    };

    CLI::App* transduce =
        app.add_subcommand("transduce", "photon-phonon population transfer curves");
    add_common(transduce, true);
    transduce->add_option("--points", points, "time samples")->check(CLI::Range(2, 1000000));
    transduce->add_option("--t-max-ns", t_max_ns, "time window (default: 3 swap periods)");
    transduce->add_option("--na0", na0, "initial signal population");
    transduce->add_option("--nb0", nb0, "initial acoustic population (default: bath)");
    transduce->add_option("--bath-nth", bath_nth,
                          "acoustic bath occupancy override (default: from T_en)");

    CLI::App* memory = app.add_subcommand("memory", "single write/store/readout protocol run");
    add_common(memory, true);
    memory->add_option("--backend", opt.backend, "analytic|numeric|both");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep from the [sweep] section");
    add_common(sweep, true);
    sweep->add_option("--backend", opt.backend, "analytic|numeric|both");
    sweep->add_option("--jobs", opt.jobs, "worker threads (default: hardware)");

    CLI::App* benchmark =
        app.add_subcommand("benchmark", "ensemble-averaged fidelity vs the classical benchmark");
    add_common(benchmark, true);
    benchmark->add_option("--beta", beta, "ensemble width parameter");
    benchmark->add_option("--samples", samples, "ensemble size");

    CLI::App* validate = app.add_subcommand("validate", "oracle-equivalence and physicality suite");
    validate->add_option("--seed", opt.seed, "RNG seed for the random configurations");
    validate->add_option("--draws", draws, "random configurations")->check(CLI::Range(1, 10000));
    validate->add_option("--tolerance", tolerance, "max closed-form vs integrator difference");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (transduce->parsed()) return cmd_transduce(opt, points, t_max_ns, na0, nb0, bath_nth);
        if (memory->parsed()) return cmd_memory(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (benchmark->parsed()) return cmd_benchmark(opt, beta, samples);
        if (validate->parsed()) return cmd_validate(opt.seed, draws, tolerance);
    } catch (const oamem::ScenarioError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
