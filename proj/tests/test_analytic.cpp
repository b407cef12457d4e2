#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oamem/analytic.hpp"
#include "oamem/protocol.hpp"

using namespace oamem;

namespace {

const WaveguideParams wg_ref{two_pi * 0.2e6, two_pi * 1e6, 2e8, 2500.0, two_pi * 7.6e9};

MemoryParams memory_params(double T, double g1_over_G, double g2_over_G) {
    MemoryParams p;
    p.wg = wg_ref;
    p.env.T_en = T;
    p.coupling = {g1_over_G * wg_ref.Gamma, g2_over_G * wg_ref.Gamma};
    return p;
}

double uni(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

TEST_CASE("coefficient set in the lossless limit") {
    double g = two_pi * 20e6;
    CoefficientSet c = coefficient_set(0.0, 0.0, g, 0.0, 0.0);
    CHECK(std::abs(c.omega_plus - complex(0.0, -g)) <= 1e-9 * g);
    CHECK(std::abs(c.omega_minus - complex(0.0, g)) <= 1e-9 * g);
    CHECK(std::abs(c.mu1 - 0.5) <= 1e-12);
    CHECK(std::abs(c.mu2 - c.mu3 - 1.0) <= 1e-10);
    CHECK(std::abs(c.alpha1) <= 1e-9 * g);
    CHECK(std::abs(c.alpha4) <= 1e-9 * g);
    CHECK(std::abs(c.alpha2 - complex(0.0, -2.0 * g)) <= 1e-9 * g);
    CHECK(std::abs(c.alpha3 - complex(0.0, 2.0 * g)) <= 1e-9 * g);
    CHECK_THROWS_AS(coefficient_set(0.0, 0.0, 0.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("coefficient identities over random parameters") {
    std::mt19937_64 rng(31337u);
    for (int i = 0; i < 20; ++i) {
        double G = two_pi * uni(rng, 0.5e6, 3e6);
        double gamma = uni(rng, 0.05, 0.5) * G;
        double g = uni(rng, 10.0, 200.0) * G;
        double dO = uni(rng, -0.5, 0.5) * G;
        double dA = uni(rng, -0.5, 0.5) * G;
        CoefficientSet c = coefficient_set(gamma, G, g, dO, dA);
        CHECK(std::abs(c.mu2 - c.mu3 - 1.0) <= 1e-10);
        CHECK(c.alpha1.real() <= 1e-12 * G);
        CHECK(c.alpha4.real() <= 1e-12 * G);
        // alpha1 = omega+ + conj(omega+) is the real decay pair rate.
        CHECK(std::abs(c.alpha1 - (c.omega_plus + std::conj(c.omega_plus))) <= 1e-9 * G);
    }
    // For equal detunings the exponent sum is exactly -(gamma+Gamma)/2.
    CoefficientSet c = coefficient_set(0.3e6, 1.1e6, 80e6, 0.4e6, 0.4e6);
    CHECK(c.alpha1.real() == doctest::Approx(-0.5 * (0.3e6 + 1.1e6)).epsilon(1e-10));
    CHECK(std::abs(c.alpha1.imag()) <= 1e-6);
}

TEST_CASE("coefficient reference values, strong coupling with detuning") {
    CoefficientSet c = coefficient_set(two_pi * 0.2e6, two_pi * 1e6, 100.0 * two_pi * 1e6,
                                       0.2 * two_pi * 1e6, 0.0);
    CHECK(c.omega_plus.real() == doctest::Approx(-1.886212231100e6).epsilon(1e-9));
    CHECK(c.omega_plus.imag() == doctest::Approx(-6.276892697100e8).epsilon(1e-9));
    CHECK(c.mu1.real() == doctest::Approx(5.000007499987e-1).epsilon(1e-9));
    CHECK(c.mu1.imag() == doctest::Approx(1.000004500007e-6).epsilon(1e-6));
    CHECK(std::abs(std::abs(c.omega_plus.imag()) - 100.0 * two_pi * 1e6) <
          0.01 * 100.0 * two_pi * 1e6);
    CHECK(!c.near_degenerate);
}

TEST_CASE("exact transduction populations") {
    double g = 15.0 * wg_ref.Gamma;
    double k = 0.2 * wg_ref.Gamma / wg_ref.v_o;
    double n_th = thermal_occupation(wg_ref.Omega_ac, 4.0);

    TransductionPopulations t0 = transduction_populations_exact(wg_ref, g, 1.0, n_th, k, 0.0,
                                                                n_th);
    CHECK(t0.n_a == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t0.n_b == doctest::Approx(n_th).epsilon(1e-9));
    CHECK(!t0.weak_coupling_warning);

    // Rabi swap: near-lossless damping leaves sin^2(gt) transfer.
    WaveguideParams ll = wg_ref;
    ll.gamma = 1e-30;
    ll.Gamma = 1e-30;
    for (double x : {0.3, 0.9, 1.4}) {
        double t = x / g;
        TransductionPopulations p = transduction_populations_exact(ll, g, 1.0, 0.0, 0.0, t, 0.0);
        CHECK(p.n_b == doctest::Approx(std::sin(g * t) * std::sin(g * t)).epsilon(1e-9));
        CHECK(p.n_a + p.n_b == doctest::Approx(1.0).epsilon(1e-9));
    }

    TransductionPopulations weak = transduction_populations_exact(wg_ref, 0.5 * wg_ref.Gamma,
                                                                  1.0, 0.0, 0.0, 1e-7, 0.0);
    CHECK(weak.weak_coupling_warning);
    CHECK_THROWS_AS(transduction_populations_exact(wg_ref, g, -1.0, 0.0, 0.0, 0.0, 0.0),
                    std::domain_error);
    CHECK_THROWS_AS(transduction_populations_exact(wg_ref, g, 1.0, 0.0, 0.0, 0.0, -1.0),
                    std::domain_error);
}

TEST_CASE("transduction closed form matches the moment integrator") {
    double g = 15.0 * wg_ref.Gamma;
    double k = 0.2 * wg_ref.Gamma / wg_ref.v_o;
    double n_th = thermal_occupation(wg_ref.Omega_ac, 4.0);
    ModeSelector sel;
    sel.k = k;
    LinearSystem sys = build_stage_system(Stage::write, Scenario::squeezed, wg_ref,
                                          StageCoupling{g, g}, sel, n_th);
    Eigen::MatrixXd v0 = Eigen::MatrixXd::Identity(4, 4) * 0.5;
    v0(0, 0) = v0(1, 1) = 1.5;                    // signal at occupation 1
    v0(2, 2) = v0(3, 3) = n_th + 0.5;             // acoustic at the bath occupation
    GaussianState init = make_state(v0, Eigen::VectorXd::Zero(4));
    std::vector<double> ts;
    double swap = pi / (2.0 * g);
    for (int i = 0; i <= 12; ++i) ts.push_back(3.0 * swap * i / 12.0);
    Trajectory tr = integrate_moments(sys, init, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        TransductionPopulations p = transduction_populations_exact(wg_ref, g, 1.0, n_th, k,
                                                                   ts[i], n_th);
        CHECK(std::abs(p.n_a - population_from_state(tr.states[i], 0)) < 1e-7 * (1.0 + p.n_a));
        CHECK(std::abs(p.n_b - population_from_state(tr.states[i], 1)) < 1e-7 * (1.0 + p.n_b));
    }
}

TEST_CASE("approximate transduction populations") {
    double g = 15.0 * wg_ref.Gamma;
    double n_th = thermal_occupation(wg_ref.Omega_ac, 4.0);
    TransductionPopulations t0 = transduction_populations_approx(wg_ref, g, 1.0, n_th, n_th,
                                                                 0.0);
    CHECK(t0.n_a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t0.n_b == doctest::Approx(n_th).epsilon(1e-12));

    double late = 50.0 / (wg_ref.gamma + wg_ref.Gamma);
    TransductionPopulations tl = transduction_populations_approx(wg_ref, g, 1.0, 0.0, n_th,
                                                                 late);
    CHECK(tl.n_a == doctest::Approx(n_th).epsilon(1e-6));
    CHECK(tl.n_b == doctest::Approx(n_th).epsilon(1e-6));

    // The Rabi form drops loss-detuning cross terms; its error shrinks with g.
    double k = 0.2 * wg_ref.Gamma / wg_ref.v_o;
    auto swap_error = [&](double gs) {
        double t = pi / (2.0 * gs);
        TransductionPopulations ex = transduction_populations_exact(wg_ref, gs, 1.0, n_th, k, t,
                                                                    n_th);
        TransductionPopulations ap = transduction_populations_approx(wg_ref, gs, 1.0, n_th, n_th,
                                                                     t);
        CHECK(std::abs(ap.n_a - ex.n_a) / (1.0 + ex.n_a) < 0.05);
        return std::abs(ap.n_b - ex.n_b) / ex.n_b;
    };
    double err15 = swap_error(g);
    double err60 = swap_error(60.0 * wg_ref.Gamma);
    CHECK(err15 < 0.10);
    CHECK(err60 < 0.05);
    CHECK(err60 < err15);
}

TEST_CASE("oscillation frequency and conversion efficiency") {
    double g = 15.0 * wg_ref.Gamma;
    double osc = transduction_oscillation_frequency(wg_ref, g, 0.0);
    CHECK(osc == doctest::Approx(2.0 * g).epsilon(1e-2));

    CHECK(conversion_efficiency_max(wg_ref, g) == doctest::Approx(0.9372).epsilon(1e-3));
    CHECK(conversion_efficiency_max(wg_ref, g) ==
          doctest::Approx(1.0 - pi * (wg_ref.gamma + wg_ref.Gamma) / (4.0 * g)).epsilon(1e-14));

    WaveguideParams tiny = wg_ref;
    tiny.gamma = 1e-20;
    tiny.Gamma = 1e-20;
    CHECK(conversion_efficiency_max(tiny, g) == doctest::Approx(1.0).epsilon(1e-12));
    double g_edge = pi * (wg_ref.gamma + wg_ref.Gamma) / 4.0;
    CHECK(conversion_efficiency_max(wg_ref, g_edge) == 0.0);
    CHECK(conversion_efficiency_max(wg_ref, 0.5 * g_edge) == 0.0);
    CHECK_THROWS_AS(conversion_efficiency_max(wg_ref, 0.0), std::domain_error);
}

TEST_CASE("input moments reproduce the state constructors") {
    GaussianState sv = cm::squeezed_input_moments(vacuum_kind(0.8)).to_state({0.0});
    CHECK((sv.cov - make_squeezed_vacuum(0.8).cov).cwiseAbs().maxCoeff() <= 1e-12);

    GaussianState st = cm::squeezed_input_moments(thermal_kind(0.5, 0.7)).to_state({0.0});
    CHECK((st.cov - make_squeezed_thermal(0.5, 0.7).cov).cwiseAbs().maxCoeff() <= 1e-12);

    GaussianState sc =
        cm::squeezed_input_moments(coherent_kind(0.4, complex(0.6, -0.3))).to_state({0.0});
    GaussianState ref = make_squeezed_coherent(0.4, complex(0.6, -0.3));
    CHECK((sc.cov - ref.cov).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((sc.mean - ref.mean).cwiseAbs().maxCoeff() <= 1e-12);

    GaussianState pair = cm::entangled_input_moments(0.9).to_state({0.0, 0.0});
    CHECK((pair.cov - make_entangled_pair(0.9).cov).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("squeezed write stage: initial condition and optimal variance") {
    MemoryParams p = memory_params(1.0, 100.0, 100.0);
    GaussianState at0 = stage_state_squeezed(vacuum_kind(1.0), Stage::write, p, {0.0, 0.0, 0.0});
    CHECK((at0.cov - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);

    double tau1 = optimal_pulse_duration(p.coupling.g1);
    double best_t = 0.0, best_v = 1e300;
    for (int i = 0; i <= 400; ++i) {
        double t = (0.8 + 0.4 * i / 400.0) * tau1;
        GaussianState s = stage_state_squeezed(vacuum_kind(1.0), Stage::write, p,
                                               {0.0, 0.0, t});
        if (s.cov(0, 0) < best_v) { best_v = s.cov(0, 0); best_t = t; }
    }
    CHECK(std::abs(best_t - tau1) < 0.02 * tau1);
    ApproxSqueezingMetrics m = approx_squeezing_metrics(p.wg, p.env, 1.0, p.coupling.g1,
                                                        p.coupling.g2, tau1, 0.0, tau1);
    CHECK(std::abs(m.var_write_min - best_v) / best_v < 0.03);
}

TEST_CASE("squeezed stage covariance reference values") {
    MemoryParams p = memory_params(1.0, 100.0, 120.0);
    double tau1 = optimal_pulse_duration(p.coupling.g1);
    double tau2 = optimal_pulse_duration(p.coupling.g2);
    GaussianState w = stage_state_squeezed(vacuum_kind(1.0), Stage::write, p,
                                           {0.0, 0.0, tau1});
    CHECK(w.cov(0, 0) == doctest::Approx(0.089470553959).epsilon(1e-9));
    CHECK(w.cov(1, 1) == doctest::Approx(3.682323554833).epsilon(1e-9));
    CHECK(std::abs(w.cov(0, 1)) < 1e-12);

    StagePhases ph;
    ph.beta_re = 0.0;
    GaussianState r = stage_state_squeezed(vacuum_kind(1.0), Stage::readout, p,
                                           {tau1, 20e-9, tau2}, ph);
    CHECK(r.cov(0, 0) == doctest::Approx(0.421766931874).epsilon(1e-9));
    CHECK(r.cov(1, 1) == doctest::Approx(3.565565125255).epsilon(1e-9));

    GaussianState th = stage_state_squeezed(thermal_kind(0.7, 1.0), Stage::write, p,
                                            {0.0, 0.0, tau1});
    GaussianState sv = stage_state_squeezed(vacuum_kind(0.7), Stage::write, p,
                                            {0.0, 0.0, tau1});
    CHECK((th.cov - sv.cov).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("squeezed readout matches the moment integrator") {
    ProtocolConfig cfg;
    cfg.wg = wg_ref;
    cfg.env.T_en = 1.0;
    cfg.coupling = {100.0 * wg_ref.Gamma, 100.0 * wg_ref.Gamma};
    cfg.scenario.kind = ScenarioKind::squeezed_vacuum;
    cfg.scenario.r = 1.0;
    double tau1 = optimal_pulse_duration(cfg.coupling.g1);
    double tau2 = optimal_pulse_duration(cfg.coupling.g2);
    protocol_detail::StageEvaluator closed(cfg, false);
    protocol_detail::StageEvaluator numeric(cfg, true);
    std::vector<double> ts = {0.5 * tau2, tau2};
    std::vector<GaussianState> a = closed.eval(Stage::readout, ts, tau1, 5e-9);
    std::vector<GaussianState> b = numeric.eval(Stage::readout, ts, tau1, 5e-9);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK((a[i].cov - b[i].cov).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((a[i].mean - b[i].mean).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("entangled write stage: initial block structure and negativity peak") {
    MemoryParams p = memory_params(1.0, 100.0, 100.0);
    double eta = 2.0;
    GaussianState at0 = stage_state_entangled(Stage::write, p, eta, {0.0, 0.0, 0.0});
    double d = 0.5 + 2.0 * eta * eta;
    CHECK(at0.cov(0, 0) == doctest::Approx(d).epsilon(1e-12));
    CHECK(at0.cov(1, 1) == doctest::Approx(d).epsilon(1e-12));
    CHECK(at0.cov(2, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(at0.cov(3, 3) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(at0.cov.block<2, 2>(0, 2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(log_negativity(at0) == 0.0);

    double tau1 = optimal_pulse_duration(p.coupling.g1);
    double best_t = 0.0, best_en = -1.0;
    for (int i = 0; i <= 600; ++i) {
        double t = (0.5 + 1.0 * i / 600.0) * tau1;
        double en = log_negativity(stage_state_entangled(Stage::write, p, eta, {0.0, 0.0, t}));
        if (en > best_en) { best_en = en; best_t = t; }
    }
    CHECK(std::abs(best_t - tau1) < 0.02 * tau1);
    ApproxEntanglementMetrics m = approx_entanglement_metrics(p.wg, p.env, p.coupling.g1,
                                                              p.coupling.g2, tau1, tau1);
    CHECK(std::abs(best_en - m.e_n_write_max) / best_en < 0.05);
}

TEST_CASE("entangled stage reference values") {
    MemoryParams p = memory_params(1.0, 100.0, 120.0);
    double tau1 = optimal_pulse_duration(p.coupling.g1);
    double tau2 = optimal_pulse_duration(p.coupling.g2);
    GaussianState w = stage_state_entangled(Stage::write, p, 0.5, {0.0, 0.0, tau1});
    CHECK(log_negativity(w) == doctest::Approx(0.501812144667).epsilon(1e-9));

    StagePhases ph;
    ph.beta_re = pi;
    GaussianState r = stage_state_entangled(Stage::readout, p, 0.5, {tau1, 20e-9, tau2}, ph);
    CHECK(log_negativity(r) == doctest::Approx(0.112801775150).epsilon(1e-9));
    CHECK(fidelity_two_mode(make_entangled_pair(0.5), r) ==
          doctest::Approx(0.932245061445).epsilon(1e-9));
}

TEST_CASE("entangled readout matches the moment integrator") {
    ProtocolConfig cfg;
    cfg.wg = wg_ref;
    cfg.env.T_en = 1.0;
    cfg.coupling = {100.0 * wg_ref.Gamma, 120.0 * wg_ref.Gamma};
    cfg.scenario.kind = ScenarioKind::entangled;
    cfg.scenario.eta = 0.8;
    cfg.selector.gamma_smf = 0.1 * wg_ref.gamma;
    double tau1 = optimal_pulse_duration(cfg.coupling.g1);
    double tau2 = optimal_pulse_duration(cfg.coupling.g2);
    protocol_detail::StageEvaluator closed(cfg, false);
    protocol_detail::StageEvaluator numeric(cfg, true);
    std::vector<double> ts = {0.6 * tau2, tau2};
    std::vector<GaussianState> a = closed.eval(Stage::readout, ts, tau1, 5e-9);
    std::vector<GaussianState> b = numeric.eval(Stage::readout, ts, tau1, 5e-9);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK((a[i].cov - b[i].cov).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((a[i].mean - b[i].mean).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("approximate squeezing metrics") {
    MemoryParams cold = memory_params(1e-4, 100.0, 100.0);
    double tau1 = optimal_pulse_duration(cold.coupling.g1);
    ApproxSqueezingMetrics m0 = approx_squeezing_metrics(cold.wg, cold.env, 0.0,
                                                         cold.coupling.g1, cold.coupling.g2,
                                                         tau1, 0.0, tau1);
    CHECK(m0.var_write_min == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m0.var_read_min == doctest::Approx(0.5).epsilon(1e-14));

    MemoryParams p = memory_params(1.0, 100.0, 100.0);
    double n_th = memory_thermal_occupation(p);
    double A = heating_rate(p.wg.Gamma, n_th);
    ApproxSqueezingMetrics m = approx_squeezing_metrics(p.wg, p.env, 1.0, p.coupling.g1,
                                                        p.coupling.g2, tau1, 0.0, tau1);
    double expect = 0.5 * std::exp(-2.0) +
                    (pi / 4.0) * (A / p.coupling.g1 + A / p.coupling.g2 +
                                  0.5 * p.wg.Gamma * (1.0 - std::exp(-2.0)) / p.coupling.g2);
    CHECK(m.var_read_min == doctest::Approx(expect).epsilon(1e-14));

    // Exact closed-form minimum agrees within 5% in this regime.
    double tau2 = optimal_pulse_duration(p.coupling.g2);
    double exact = 1e300;
    for (int i = 0; i <= 400; ++i) {
        double t = (0.7 + 0.6 * i / 400.0) * tau2;
        GaussianState s = stage_state_squeezed(vacuum_kind(1.0), Stage::readout, p,
                                               {tau1, 0.0, t});
        exact = std::min(exact, s.cov(0, 0));
    }
    CHECK(std::abs(m.var_read_min - exact) / exact < 0.05);

    MemoryParams big = memory_params(1.0, 1e6, 1e6);
    double tb = optimal_pulse_duration(big.coupling.g1);
    ApproxSqueezingMetrics mb = approx_squeezing_metrics(big.wg, big.env, 1.0, big.coupling.g1,
                                                         big.coupling.g2, tb, 0.0, tb);
    CHECK(mb.var_read_min == doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-3));

    CHECK(approx_squeezing_metrics(p.wg, p.env, 1.0, p.coupling.g1, p.coupling.g2, tau1,
                                   100e-9, tau1)
              .storage_warning);
    CHECK(!approx_squeezing_metrics(p.wg, p.env, 1.0, p.coupling.g1, p.coupling.g2, tau1,
                                    5e-9, tau1)
               .storage_warning);
    CHECK_THROWS_AS(approx_squeezing_metrics(p.wg, p.env, 1.0, 0.0, p.coupling.g2, tau1, 0.0,
                                             tau1),
                    std::domain_error);
}

TEST_CASE("write-variance extrema sit on the Rabi grid") {
    for (double gG : {50.0, 100.0}) {
        MemoryParams p = memory_params(1.0, gG, gG);
        double tau1 = optimal_pulse_duration(p.coupling.g1);
        for (int m = 1; m <= 3; m += 2) {
            double center = m * tau1;
            double best_t = 0.0, best_v = 1e300;
            for (int i = 0; i <= 400; ++i) {
                double t = (m - 0.4 + 0.8 * i / 400.0) * tau1;
                ApproxSqueezingMetrics a = approx_squeezing_metrics(p.wg, p.env, 1.0,
                                                                    p.coupling.g1,
                                                                    p.coupling.g2, tau1, 0.0,
                                                                    t);
                if (a.var_write < best_v) { best_v = a.var_write; best_t = t; }
            }
            // Decay and heating tilt the minima slightly early; 4% covers g = 50 Gamma.
            CHECK(std::abs(best_t - center) < 0.04 * center);
        }
    }
}

TEST_CASE("approximate entanglement metrics") {
    MemoryParams p = memory_params(1.0, 100.0, 100.0);
    double tau1 = optimal_pulse_duration(p.coupling.g1);
    ApproxEntanglementMetrics at0 = approx_entanglement_metrics(p.wg, p.env, p.coupling.g1,
                                                                p.coupling.g2, tau1, 0.0);
    CHECK(at0.lambda_write == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(-std::log(2.0 * at0.lambda_write) == doctest::Approx(0.0).epsilon(1e-14));

    MemoryParams cold = memory_params(1e-4, 100.0, 100.0);
    ApproxEntanglementMetrics mc = approx_entanglement_metrics(cold.wg, cold.env,
                                                               cold.coupling.g1,
                                                               cold.coupling.g2, tau1, tau1);
    CHECK(std::abs(mc.e_n_write_max - std::log(2.0)) < 1e-6);

    double g1 = pi / (2.0 * 7.8e-9);
    double g2 = pi / (2.0 * 5.2e-9);
    MemoryParams q = memory_params(1.0, g1 / wg_ref.Gamma, g2 / wg_ref.Gamma);
    ApproxEntanglementMetrics mr = approx_entanglement_metrics(q.wg, q.env, g1, g2, 7.8e-9,
                                                               5.2e-9);
    CHECK(mr.e_n_read_max == doctest::Approx(0.524).epsilon(2e-2));
    CHECK(mr.e_n_read_max == doctest::Approx(0.5244387049).epsilon(1e-9));
}

TEST_CASE("eigenvalue approximations track the exact optimum at strong coupling") {
    MemoryParams p = memory_params(1.0, 50.0, 50.0);
    double tau1 = optimal_pulse_duration(p.coupling.g1);
    double tau2 = optimal_pulse_duration(p.coupling.g2);
    double eta = 40.0;
    double lw = 1e300, lr = 1e300, aw = 1e300, ar = 1e300;
    for (int i = 0; i <= 160; ++i) {
        double tw = (0.8 + 0.4 * i / 160.0) * tau1;
        lw = std::min(lw, pt_min_eigenvalue(
                              stage_state_entangled(Stage::write, p, eta, {0.0, 0.0, tw})));
        double tr = (0.8 + 0.4 * i / 160.0) * tau2;
        lr = std::min(lr, pt_min_eigenvalue(
                              stage_state_entangled(Stage::readout, p, eta, {tau1, 0.0, tr})));
        ApproxEntanglementMetrics mw = approx_entanglement_metrics(p.wg, p.env, p.coupling.g1,
                                                                   p.coupling.g2, tau1, tw);
        aw = std::min(aw, mw.lambda_write);
        ApproxEntanglementMetrics mr = approx_entanglement_metrics(p.wg, p.env, p.coupling.g1,
                                                                   p.coupling.g2, tau1, tr);
        ar = std::min(ar, mr.lambda_read);
    }
    CHECK(std::abs(aw - lw) / lw < 0.05);
    CHECK(std::abs(ar - lr) / lr < 0.05);
}

TEST_CASE("stage outputs stay physical across random strong-coupling draws") {
    std::mt19937_64 rng(777u);
    for (int i = 0; i < 25; ++i) {
        MemoryParams p = memory_params(uni(rng, 0.3, 4.0), uni(rng, 20.0, 200.0),
                                       uni(rng, 20.0, 200.0));
        p.selector.k = uni(rng, -0.3, 0.3) * p.wg.Gamma / p.wg.v_o;
        double tau1 = optimal_pulse_duration(p.coupling.g1);
        double tau2 = optimal_pulse_duration(p.coupling.g2);
        double t = uni(rng, 0.0, 1.3) * tau2;
        SqueezedKind kind = vacuum_kind(uni(rng, 0.0, 1.2));
        for (Stage st : {Stage::write, Stage::store, Stage::readout}) {
            GaussianState s = stage_state_squeezed(kind, st, p, {tau1, uni(rng, 0.0, 2e-8), t});
            CHECK(symplectic_eigenvalues(s.cov).minCoeff() >= 0.5 - 1e-7);
            GaussianState e = stage_state_entangled(st, p, uni(rng, 0.1, 1.5),
                                                    {tau1, uni(rng, 0.0, 2e-8), t});
            CHECK(symplectic_eigenvalues(e.cov).minCoeff() >= 0.5 - 1e-7);
        }
    }
}
