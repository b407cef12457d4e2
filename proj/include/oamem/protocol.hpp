#pragma once

// End-to-end memory protocol: write/store/readout orchestration, optimal
// pulse search, figures of merit, and the ensemble-averaged fidelity against
// the classical benchmark.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "oamem/analytic.hpp"
#include "oamem/dynamics.hpp"
#include "oamem/gaussian.hpp"
#include "oamem/params.hpp"

namespace oamem {

enum class Backend { analytic, numeric, both };

enum class ScenarioKind { squeezed_vacuum, squeezed_thermal, squeezed_coherent, entangled };

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::squeezed_vacuum;
    double r = 0.0;      // squeeze parameter
    double u = 1.0;      // purity, squeezed_thermal
    complex alpha{};     // displacement, squeezed_coherent
    double eta = 0.0;    // pair strength, entangled
    double theta = 0.0;  // squeeze orientation
};

struct Schedule {
    std::optional<double> tau1;  // write duration; nullopt = optimize
    double tau_s = 0.0;          // storage duration
    std::optional<double> tau2;  // readout duration; nullopt = optimize
};

struct ProtocolConfig {
    ScenarioSpec scenario;
    WaveguideParams wg;
    Environment env;
    StageCoupling coupling;
    ModeSelector selector;
    Schedule schedule;
    Backend backend = Backend::analytic;
    StagePhases phases;          // frame overrides for reported states
    int samples_per_stage = 121; // timeline / optimizer resolution
};

struct StageTimeline {
    std::vector<double> times;
    std::vector<double> metric;    // squeezed: quadrature variance; entangled: PT eigenvalue
    std::vector<double> fidelity;  // against the t=0 input state
};

struct BackendReport {
    bool compared = false;
    double max_cov_difference = 0.0;  // across the four stage-boundary states
};

struct ProtocolResult {
    double tau1 = 0.0, tau2 = 0.0, tau_s = 0.0;
    bool tau1_boundary_warning = false;
    bool tau2_boundary_warning = false;
    bool numeric_fallback = false;
    GaussianState input_state;
    GaussianState retrieved_state;  // one mode (squeezed) or idler+retrieval (entangled)
    double fidelity = 0.0;
    double log_negativity = 0.0;        // entangled scenario
    double squeezing_factor_out = 0.0;  // squeezed scenario
    StageTimeline write, store, readout;
    BackendReport backend_report;
};

enum class ExtremumKind { minimum, maximum };

struct Extremum {
    double x = 0.0;
    double value = 0.0;
    bool boundary_warning = false;
};

// Locate the extremum of a sampled curve with parabolic refinement through
// the winning sample and its neighbours.
inline Extremum find_extremum(const std::vector<double>& xs, const std::vector<double>& ys,
                              ExtremumKind kind) {
    if (xs.size() != ys.size()) throw std::invalid_argument("curve arrays differ in length");
    if (xs.size() < 3) throw std::invalid_argument("need at least three samples");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("abscissae must increase");
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        bool better = kind == ExtremumKind::minimum ? ys[i] < ys[best] : ys[i] > ys[best];
        if (better) best = i;
    }
    Extremum out;
    if (best == 0 || best + 1 == xs.size()) {
        out.x = xs[best];
        out.value = ys[best];
        out.boundary_warning = true;
        return out;
    }
    double x0 = xs[best - 1], x1 = xs[best], x2 = xs[best + 1];
    double y0 = ys[best - 1], y1 = ys[best], y2 = ys[best + 1];
    double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    out.x = x1;
    out.value = y1;
    if (den != 0.0) {
        double xr = x1 - 0.5 * num / den;
        if (xr > x0 && xr < x2) {
            // Lagrange parabola through the three winning samples.
            double l0 = (xr - x1) * (xr - x2) / ((x0 - x1) * (x0 - x2));
            double l1 = (xr - x0) * (xr - x2) / ((x1 - x0) * (x1 - x2));
            double l2 = (xr - x0) * (xr - x1) / ((x2 - x0) * (x2 - x1));
            out.x = xr;
            out.value = l0 * y0 + l1 * y1 + l2 * y2;
        }
    }
    return out;
}

// Best classical (measure-and-prepare) average fidelity over the squeezed
// alphabet with modulus weight exponent beta.
inline double classical_benchmark(double beta) {
    if (!(beta > 0.0)) throw std::domain_error("ensemble width parameter must be positive");
    return (1.0 + beta) / (2.0 + beta);
}

namespace protocol_detail {

// Lab-frame stage-system states along a stage-local time grid.
class StageEvaluator {
  public:
    StageEvaluator(const ProtocolConfig& cfg, bool numeric)
        : cfg_(cfg), numeric_(numeric),
          p_{cfg.wg, cfg.env, cfg.coupling, cfg.selector},
          entangled_(cfg.scenario.kind == ScenarioKind::entangled) {
        if (!(cfg.coupling.g1 > 0.0) || !(cfg.coupling.g2 > 0.0))
            throw std::domain_error("protocol requires positive stage couplings");
        kind_ = to_kind(cfg.scenario);
        n_th_ = memory_thermal_occupation(p_);
    }

    bool entangled() const { return entangled_; }
    const MemoryParams& params() const { return p_; }

    static SqueezedKind to_kind(const ScenarioSpec& sc) {
        SqueezedKind k;
        switch (sc.kind) {
            case ScenarioKind::squeezed_vacuum: k = vacuum_kind(sc.r, sc.theta); break;
            case ScenarioKind::squeezed_thermal: k = thermal_kind(sc.r, sc.u); break;
            case ScenarioKind::squeezed_coherent: k = coherent_kind(sc.r, sc.alpha); break;
            case ScenarioKind::entangled: break;
        }
        k.theta = sc.theta;
        return k;
    }

    GaussianState input_state() const {
        if (entangled_) return cm::entangled_input_moments(cfg_.scenario.eta).to_state({0.0, 0.0});
        return cm::squeezed_input_moments(kind_).to_state({0.0});
    }

    bool closed_form_degenerate() const {
        bool deg = false;
        StageTimes tm{0.0, 0.0, 0.0};
        if (entangled_)
            cm::entangled_stage_moments(cfg_.scenario.eta, Stage::readout, p_, tm, &deg);
        else
            cm::squeezed_stage_moments(kind_, Stage::readout, p_, tm, &deg);
        return deg;
    }

    std::vector<GaussianState> eval(Stage stage, const std::vector<double>& ts, double tau1,
                                    double tau_s) const {
        return numeric_ ? eval_numeric(stage, ts, tau1, tau_s)
                        : eval_analytic(stage, ts, tau1, tau_s);
    }

  private:
    std::vector<GaussianState> eval_analytic(Stage stage, const std::vector<double>& ts,
                                             double tau1, double tau_s) const {
        std::vector<GaussianState> out;
        out.reserve(ts.size());
        for (double t : ts) {
            StageTimes tm{tau1, tau_s, t};
            cm::MomentState ms =
                entangled_ ? cm::entangled_stage_moments(cfg_.scenario.eta, stage, p_, tm)
                           : cm::squeezed_stage_moments(kind_, stage, p_, tm);
            std::vector<double> zero(ms.mean.size(), 0.0);
            out.push_back(ms.to_state(zero));
        }
        return out;
    }

    std::vector<GaussianState> eval_numeric(Stage stage, const std::vector<double>& ts,
                                            double tau1, double tau_s) const {
        Scenario sc = entangled_ ? Scenario::entangled : Scenario::squeezed;
        LinearSystem sys = build_stage_system(stage, sc, cfg_.wg, cfg_.coupling, cfg_.selector,
                                              n_th_);
        GaussianState init = numeric_initial(stage, tau1, tau_s);
        if (ts.size() == 1 && ts[0] == 0.0) return {init};
        std::vector<double> grid = ts;
        bool prepend = grid.front() > 0.0;
        if (prepend) grid.insert(grid.begin(), 0.0);
        Trajectory tr = integrate_moments(sys, init, grid);
        std::vector<GaussianState> out(tr.states.begin() + (prepend ? 1 : 0), tr.states.end());
        return out;
    }

    GaussianState numeric_initial(Stage stage, double tau1, double tau_s) const {
        const int nw = entangled_ ? 3 : 2;
        if (stage == Stage::write) {
            GaussianState in = input_state();
            GaussianState s;
            s.n_modes = nw;
            s.cov = Eigen::MatrixXd::Identity(2 * nw, 2 * nw) * 0.5;
            s.mean = Eigen::VectorXd::Zero(2 * nw);
            int take = entangled_ ? 2 : 1;
            s.cov.topLeftCorner(2 * take, 2 * take) = in.cov;
            s.mean.head(2 * take) = in.mean;
            return s;
        }
        if (stage == Stage::store) {
            GaussianState w = eval_numeric(Stage::write, {tau1}, 0.0, 0.0).back();
            return entangled_ ? select_modes(w, {0, 2}) : select_modes(w, {1});
        }
        GaussianState st = eval_numeric(Stage::store, {tau_s}, tau1, 0.0).back();
        GaussianState s;
        s.n_modes = nw;
        s.cov = Eigen::MatrixXd::Identity(2 * nw, 2 * nw) * 0.5;
        s.mean = Eigen::VectorXd::Zero(2 * nw);
        if (entangled_) {
            // stored (idler, acoustic) -> slots 0 and 2; retrieval vacuum in slot 1
            s.cov.block<2, 2>(0, 0) = st.cov.block<2, 2>(0, 0);
            s.cov.block<2, 2>(4, 4) = st.cov.block<2, 2>(2, 2);
            s.cov.block<2, 2>(0, 4) = st.cov.block<2, 2>(0, 2);
            s.cov.block<2, 2>(4, 0) = st.cov.block<2, 2>(2, 0);
            s.mean.segment<2>(0) = st.mean.segment<2>(0);
            s.mean.segment<2>(4) = st.mean.segment<2>(2);
        } else {
            s.cov.block<2, 2>(2, 2) = st.cov;
            s.mean.segment<2>(2) = st.mean;
        }
        return s;
    }

    const ProtocolConfig& cfg_;
    bool numeric_;
    MemoryParams p_;
    bool entangled_;
    SqueezedKind kind_;
    double n_th_ = 0.0;
};

// Stage-system mode index of the partner mode (acoustic or retrieval).
inline int partner_index(Stage stage, bool entangled) {
    switch (stage) {
        case Stage::write: return entangled ? 2 : 1;
        case Stage::store: return entangled ? 1 : 0;
        case Stage::readout: return entangled ? 1 : 0;
    }
    throw std::invalid_argument("unknown stage");
}

// Frame angle applied to the partner mode when reporting and comparing.
inline double partner_frame(Stage stage, const ProtocolConfig& cfg, const SqueezedKind& kind) {
    bool ent = cfg.scenario.kind == ScenarioKind::entangled;
    if (stage == Stage::readout) return cfg.phases.beta_re.value_or(pi);
    double def = ent ? 1.5 * pi : default_beta_b(kind);
    return cfg.phases.beta_b.value_or(def);
}

// Reduced comparison state of one stage sample: the acoustic (or retrieval)
// mode alone, or idler plus partner, rotated into the comparison frame.
inline GaussianState comparison_state(const GaussianState& sys, Stage stage, bool entangled,
                                      double frame) {
    int pidx = partner_index(stage, entangled);
    GaussianState red;
    if (entangled) {
        int iidx = 0;
        red = select_modes(sys, {iidx, pidx});
        red = rotate_mode(red, 1, frame);
    } else {
        red = select_modes(sys, {pidx});
        red = rotate_mode(red, 0, frame);
    }
    return red;
}

inline double stage_metric(const GaussianState& cmp, bool entangled) {
    if (entangled) return pt_min_eigenvalue(cmp);
    return cmp.cov(0, 0);
}

inline double stage_fidelity(const GaussianState& cmp, const GaussianState& input,
                             bool entangled) {
    return entangled ? fidelity_two_mode(input, cmp) : fidelity_one_mode(input, cmp);
}

inline std::vector<double> linear_grid(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * double(i) / double(n - 1);
    return g;
}

}  // namespace protocol_detail

inline ProtocolResult run_protocol(const ProtocolConfig& cfg) {
    using namespace protocol_detail;
    if (cfg.samples_per_stage < 9) throw std::invalid_argument("samples_per_stage must be >= 9");
    if (cfg.schedule.tau_s < 0.0) throw std::domain_error("storage time must be non-negative");

    StageEvaluator analytic(cfg, false);
    bool fallback = analytic.closed_form_degenerate();
    bool numeric_primary = cfg.backend == Backend::numeric || fallback;
    StageEvaluator primary(cfg, numeric_primary);
    const bool ent = analytic.entangled();
    const SqueezedKind kind = StageEvaluator::to_kind(cfg.scenario);
    GaussianState input = primary.input_state();

    ProtocolResult res;
    res.numeric_fallback = fallback;
    res.input_state = input;
    res.tau_s = cfg.schedule.tau_s;

    auto metric_curve = [&](Stage stage, const std::vector<double>& ts, double tau1,
                            double tau_s) {
        std::vector<GaussianState> states = primary.eval(stage, ts, tau1, tau_s);
        std::vector<double> ys(states.size());
        double frame = partner_frame(stage, cfg, kind);
        for (std::size_t i = 0; i < states.size(); ++i)
            ys[i] = stage_metric(comparison_state(states[i], stage, ent, frame), ent);
        return ys;
    };

    // Pulse durations: optimize the stage metric around the pi/2 estimate.
    if (cfg.schedule.tau1) {
        res.tau1 = *cfg.schedule.tau1;
        if (res.tau1 < 0.0) throw std::domain_error("write duration must be non-negative");
    } else {
        double t0 = optimal_pulse_duration(cfg.coupling.g1);
        std::vector<double> ts = linear_grid(0.5 * t0, 1.5 * t0, cfg.samples_per_stage);
        Extremum ex = find_extremum(ts, metric_curve(Stage::write, ts, 0.0, 0.0),
                                    ExtremumKind::minimum);
        res.tau1 = ex.x;
        res.tau1_boundary_warning = ex.boundary_warning;
    }
    if (cfg.schedule.tau2) {
        res.tau2 = *cfg.schedule.tau2;
        if (res.tau2 < 0.0) throw std::domain_error("readout duration must be non-negative");
    } else {
        double t0 = optimal_pulse_duration(cfg.coupling.g2);
        std::vector<double> ts = linear_grid(0.5 * t0, 1.5 * t0, cfg.samples_per_stage);
        Extremum ex = find_extremum(ts, metric_curve(Stage::readout, ts, res.tau1, res.tau_s),
                                    ExtremumKind::minimum);
        res.tau2 = ex.x;
        res.tau2_boundary_warning = ex.boundary_warning;
    }

    // Timelines and boundary states.
    auto fill = [&](Stage stage, double span, double tau1, double tau_s, StageTimeline& tl)
        -> GaussianState {
        std::vector<double> ts = span > 0.0 ? linear_grid(0.0, span, cfg.samples_per_stage)
                                            : std::vector<double>{0.0};
        std::vector<GaussianState> states = primary.eval(stage, ts, tau1, tau_s);
        double frame = partner_frame(stage, cfg, kind);
        tl.times = ts;
        tl.metric.resize(states.size());
        tl.fidelity.resize(states.size());
        for (std::size_t i = 0; i < states.size(); ++i) {
            GaussianState cmp = comparison_state(states[i], stage, ent, frame);
            tl.metric[i] = stage_metric(cmp, ent);
            tl.fidelity[i] = stage_fidelity(cmp, input, ent);
        }
        return states.back();
    };

    fill(Stage::write, res.tau1, 0.0, 0.0, res.write);
    fill(Stage::store, res.tau_s, res.tau1, 0.0, res.store);
    GaussianState read_end = fill(Stage::readout, res.tau2, res.tau1, res.tau_s, res.readout);

    double read_frame = partner_frame(Stage::readout, cfg, kind);
    res.retrieved_state = comparison_state(read_end, Stage::readout, ent, read_frame);
    res.fidelity = stage_fidelity(res.retrieved_state, input, ent);
    if (ent)
        res.log_negativity = log_negativity(res.retrieved_state);
    else
        res.squeezing_factor_out = squeezing_factor(res.retrieved_state, 0);

    // Backend agreement across the stage-boundary system states.
    if (cfg.backend == Backend::both && !fallback) {
        StageEvaluator other(cfg, true);
        double worst = 0.0;
        auto cmp_stage = [&](Stage stage, double tloc, double tau1, double tau_s) {
            std::vector<double> ts{tloc};
            GaussianState a = primary.eval(stage, ts, tau1, tau_s).back();
            GaussianState b = other.eval(stage, ts, tau1, tau_s).back();
            double d = (a.cov - b.cov).cwiseAbs().maxCoeff();
            double dm = (a.mean - b.mean).cwiseAbs().maxCoeff();
            worst = std::max(worst, std::max(d, dm));
        };
        cmp_stage(Stage::write, res.tau1, 0.0, 0.0);
        if (res.tau_s > 0.0) cmp_stage(Stage::store, res.tau_s, res.tau1, 0.0);
        cmp_stage(Stage::readout, res.tau2, res.tau1, res.tau_s);
        res.backend_report.compared = true;
        res.backend_report.max_cov_difference = worst;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Ensemble-averaged retrieval fidelity over the squeezed-vacuum alphabet.

enum class EnsembleConvention { complex_modulus, real_gaussian };

struct EnsembleResult {
    double F_mean = 0.0;
    double F_stderr = 0.0;
    double benchmark = 0.0;
    bool exceeds_benchmark = false;
    std::uint64_t n_samples = 0;
};

namespace protocol_detail {

inline double canonical(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace protocol_detail

inline EnsembleResult ensemble_average_fidelity(const ProtocolConfig& cfg, double beta,
                                                std::uint64_t n_samples, std::uint64_t seed,
                                                EnsembleConvention convention =
                                                    EnsembleConvention::complex_modulus) {
    using namespace protocol_detail;
    if (cfg.scenario.kind != ScenarioKind::squeezed_vacuum)
        throw std::invalid_argument("ensemble average is defined over the squeezed-vacuum alphabet");
    if (n_samples < 100) throw std::invalid_argument("need at least 100 samples");
    if (!(beta > 0.0)) throw std::domain_error("ensemble width parameter must be positive");

    MemoryParams p{cfg.wg, cfg.env, cfg.coupling, cfg.selector};
    check_params(cfg.wg);
    if (!(cfg.coupling.g1 > 0.0) || !(cfg.coupling.g2 > 0.0))
        throw std::domain_error("protocol requires positive stage couplings");
    double tau1 = cfg.schedule.tau1.value_or(optimal_pulse_duration(cfg.coupling.g1));
    double tau2 = cfg.schedule.tau2.value_or(optimal_pulse_duration(cfg.coupling.g2));
    StageTimes tm{tau1, cfg.schedule.tau_s, tau2};
    double bre = cfg.phases.beta_re.value_or(pi);

    std::mt19937_64 rng(seed);
    double sum = 0.0, comp = 0.0, sum2 = 0.0, comp2 = 0.0;
    auto kahan = [](double& s, double& c, double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    };
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        double u1 = canonical(rng);
        double u2 = canonical(rng);
        double u3 = canonical(rng);
        double r;
        if (convention == EnsembleConvention::complex_modulus) {
            r = std::sqrt(-std::log1p(-u1) / beta);
        } else {
            double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(two_pi * u2);
            r = std::abs(z) / std::sqrt(2.0 * beta);
        }
        double theta = two_pi * u3;
        SqueezedKind kind = vacuum_kind(r, theta);
        GaussianState in = cm::squeezed_input_moments(kind).to_state({0.0});
        cm::MomentState rd = cm::squeezed_stage_moments(kind, Stage::readout, p, tm);
        GaussianState out = rd.selected({0}).to_state({bre});
        double f = fidelity_one_mode(in, out);
        kahan(sum, comp, f);
        kahan(sum2, comp2, f * f);
    }
    EnsembleResult res;
    res.n_samples = n_samples;
    res.F_mean = sum / double(n_samples);
    double var = (sum2 - sum * sum / double(n_samples)) / double(n_samples - 1);
    if (var < 0.0) var = 0.0;
    res.F_stderr = std::sqrt(var / double(n_samples));
    res.benchmark = classical_benchmark(beta);
    res.exceeds_benchmark = res.F_mean - res.F_stderr > res.benchmark;
    return res;
}

}  // namespace oamem
