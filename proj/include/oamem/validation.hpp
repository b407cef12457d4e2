#pragma once

// Oracle-equivalence and physicality suite: closed-form stage covariances
// against the moment integrator over random strong-coupling configurations,
// plus determinism self-checks. Shared by the CLI and the acceptance tests.

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oamem/protocol.hpp"
#include "oamem/sweep.hpp"

namespace oamem {

struct ValidationCheck {
    std::string label;
    double worst = 0.0;  // max abs covariance/mean difference, or eigenvalue deficit
    bool pass = false;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    double worst_difference = 0.0;
    double worst_physicality_deficit = 0.0;
    bool all_pass = true;
};

namespace validation_detail {

inline const char* kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::squeezed_vacuum: return "squeezed_vacuum";
        case ScenarioKind::squeezed_thermal: return "squeezed_thermal";
        case ScenarioKind::squeezed_coherent: return "squeezed_coherent";
        case ScenarioKind::entangled: return "entangled";
    }
    return "?";
}

inline const char* stage_name(Stage s) {
    switch (s) {
        case Stage::write: return "write";
        case Stage::store: return "store";
        case Stage::readout: return "readout";
    }
    return "?";
}

}  // namespace validation_detail

// Closed forms vs integrator: `draws` random configurations, each checked for
// all four scenarios across all three stages.
inline ValidationReport oracle_equivalence_suite(std::uint64_t seed, int draws,
                                                 double tolerance = 1e-6) {
    using namespace validation_detail;
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) {
        return a + (b - a) * (double(rng() >> 11) * 0x1.0p-53);
    };

    ValidationReport rep;
    const ScenarioKind kinds[] = {ScenarioKind::squeezed_vacuum, ScenarioKind::squeezed_thermal,
                                  ScenarioKind::squeezed_coherent, ScenarioKind::entangled};
    const Stage stages[] = {Stage::write, Stage::store, Stage::readout};

    for (int d = 0; d < draws; ++d) {
        ProtocolConfig cfg;
        cfg.wg.Gamma = two_pi * 1e6;
        cfg.wg.gamma = uni(0.05, 0.5) * cfg.wg.Gamma;
        cfg.wg.v_o = 2e8;
        cfg.wg.v_ac = 2500.0;
        cfg.wg.Omega_ac = two_pi * 7.6e9;
        cfg.env.T_en = uni(0.5, 4.0);
        cfg.coupling.g1 = uni(20.0, 200.0) * cfg.wg.Gamma;
        cfg.coupling.g2 = uni(20.0, 200.0) * cfg.wg.Gamma;
        cfg.selector.k = uni(-0.5, 0.5) * cfg.wg.Gamma / cfg.wg.v_o;
        cfg.selector.gamma_smf = uni(0.0, 0.3) * cfg.wg.Gamma;
        double r = uni(0.1, 1.2);
        double u = uni(0.3, 1.0);
        complex alpha(uni(-1.5, 1.5), uni(-1.5, 1.5));
        double eta = uni(0.2, 1.5);
        double tau1 = uni(0.7, 1.3) * optimal_pulse_duration(cfg.coupling.g1);
        double tau_s = uni(0.0, 30.0) * 1e-9;
        double tw = uni(0.2, 1.3) * optimal_pulse_duration(cfg.coupling.g1);
        double tr = uni(0.2, 1.3) * optimal_pulse_duration(cfg.coupling.g2);

        for (ScenarioKind kind : kinds) {
            cfg.scenario.kind = kind;
            cfg.scenario.r = r;
            cfg.scenario.u = u;
            cfg.scenario.alpha = alpha;
            cfg.scenario.eta = eta;
            cfg.scenario.theta = uni(0.0, two_pi);

            protocol_detail::StageEvaluator closed(cfg, false);
            protocol_detail::StageEvaluator numeric(cfg, true);
            for (Stage stage : stages) {
                double t = stage == Stage::write ? tw : stage == Stage::store ? tau_s : tr;
                GaussianState a = closed.eval(stage, {t}, tau1, tau_s).back();
                GaussianState b = numeric.eval(stage, {t}, tau1, tau_s).back();
                double dc = (a.cov - b.cov).cwiseAbs().maxCoeff();
                double dm = (a.mean - b.mean).cwiseAbs().maxCoeff();
                double diff = std::max(dc, dm);

                Eigen::VectorXd nus = symplectic_eigenvalues(a.cov);
                double deficit = std::max(0.0, 0.5 - nus.minCoeff());

                ValidationCheck chk;
                std::ostringstream label;
                label << "draw " << d << " " << kind_name(kind) << " " << stage_name(stage);
                chk.label = label.str();
                chk.worst = diff;
                chk.pass = diff <= tolerance && deficit <= 1e-7;
                rep.checks.push_back(chk);
                rep.worst_difference = std::max(rep.worst_difference, diff);
                rep.worst_physicality_deficit = std::max(rep.worst_physicality_deficit, deficit);
                rep.all_pass = rep.all_pass && chk.pass;
            }
        }
    }
    return rep;
}

// Determinism: identical config + seed must yield byte-identical CSV and a
// stable canonical hash.
inline ValidationReport determinism_suite() {
    ValidationReport rep;
    ProtocolConfig cfg;
    cfg.wg = {two_pi * 0.2e6, two_pi * 1e6, 2e8, 2500.0, two_pi * 7.6e9};
    cfg.env.T_en = 1.0;
    cfg.coupling = {100.0 * cfg.wg.Gamma, 100.0 * cfg.wg.Gamma};
    cfg.scenario.kind = ScenarioKind::squeezed_vacuum;
    cfg.scenario.r = 1.0;
    cfg.schedule.tau_s = 10e-9;
    cfg.samples_per_stage = 21;

    SweepSpec spec;
    spec.axes.push_back({"T_en_K", 0.5, 2.0, 3});

    auto render = [&]() {
        OutputTable t = run_sweep(cfg, spec, 2);
        t.seed = 42;
        t.config_hash = config_hash(cfg, spec);
        std::ostringstream os;
        emit_csv(t, os);
        return os.str();
    };
    std::string a = render();
    std::string b = render();

    ValidationCheck csv_check{"csv determinism", 0.0, a == b && !a.empty()};
    rep.checks.push_back(csv_check);

    std::string text = serialize_scenario(cfg, spec);
    ScenarioDocument doc = parse_scenario(text);
    ScenarioDocument doc2 = parse_scenario(serialize_scenario(doc));
    ValidationCheck hash_check{"config hash round-trip", 0.0, doc.hash == doc2.hash};
    rep.checks.push_back(hash_check);

    rep.all_pass = csv_check.pass && hash_check.pass;
    return rep;
}

}  // namespace oamem
