#pragma once

// Closed-form solutions of the coupled photon-phonon moment equations:
// transfer coefficients, stage-by-stage covariance propagation as finite
// sums of exponentials, transduction populations, and the short-time
// approximation formulas for the figures of merit.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "oamem/dynamics.hpp"
#include "oamem/gaussian.hpp"
#include "oamem/params.hpp"

namespace oamem {

// integral_0^t e^{z s} ds with a series fallback near z = 0.
inline complex phi_integral(complex z, double t) {
    complex x = z * t;
    if (std::abs(x) < 1e-6)
        return t * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0);
    return (std::exp(x) - 1.0) / z;
}

struct CoefficientSet {
    complex omega_plus, omega_minus;
    complex tau_plus, tau_minus;
    complex mu1, mu2, mu3;
    complex alpha1, alpha2, alpha3, alpha4;
    complex q, s;
    bool near_degenerate = false;  // 16 g^2 ~ q^2: tau range collapses
};

inline CoefficientSet coefficient_set(double gamma, double Gamma, double g, double Delta_opt,
                                      double Delta_ac) {
    if (!(g > 0.0)) throw std::domain_error("coupling rate must be positive");
    CoefficientSet c;
    c.q = complex(Gamma - gamma, 2.0 * (Delta_opt - Delta_ac));
    c.s = std::sqrt(16.0 * g * g - c.q * c.q);
    c.near_degenerate = std::norm(c.s) < 1e-12 * (16.0 * g * g + std::norm(c.q));
    complex mid(-0.25 * (gamma + Gamma), 0.5 * (Delta_opt + Delta_ac));
    c.omega_plus = mid - complex(0.0, 0.25) * c.s;
    c.omega_minus = mid + complex(0.0, 0.25) * c.s;
    c.tau_plus = (complex(0.0, 1.0) * c.q + c.s) / (4.0 * g);
    c.tau_minus = (complex(0.0, 1.0) * c.q - c.s) / (4.0 * g);
    complex dt = c.tau_plus - c.tau_minus;
    c.mu1 = 1.0 / dt;
    c.mu2 = c.tau_plus / dt;
    c.mu3 = c.tau_minus / dt;
    c.alpha1 = c.omega_plus + std::conj(c.omega_plus);
    c.alpha2 = c.omega_plus + std::conj(c.omega_minus);
    c.alpha3 = c.omega_minus + std::conj(c.omega_plus);
    c.alpha4 = c.omega_minus + std::conj(c.omega_minus);
    return c;
}

// ---------------------------------------------------------------------------
// Exponential-sum propagator for the centered complex moments
// n[j,k] = <a_j^dag a_k>, m[j,k] = <a_j a_k>, mean[j] = <a_j>.
namespace cm {

struct BathMode {
    complex lambda;      // drift rate of the mode operator
    double rate = 0.0;   // bath coupling rate
    double n_bath = 0.0; // bath occupation
};

struct Term {
    complex w, a;  // contribution a * e^{w t}
};

class StageOperator {
  public:
    explicit StageOperator(std::vector<BathMode> modes) : modes_(std::move(modes)) {
        const int K = size();
        C_.assign(K * K, {});
        for (int k = 0; k < K; ++k) C_[k * K + k] = {{modes_[k].lambda, 1.0}};
    }

    StageOperator(std::vector<BathMode> modes, int i, int j, double g)
        : modes_(std::move(modes)) {
        const int K = size();
        C_.assign(K * K, {});
        const BathMode& mi = modes_[i];
        const BathMode& mj = modes_[j];
        CoefficientSet c = coefficient_set(-2.0 * mi.lambda.real(), -2.0 * mj.lambda.real(), g,
                                           mi.lambda.imag(), mj.lambda.imag());
        degenerate_ = c.near_degenerate;
        C_[i * K + i] = {{c.omega_plus, c.mu2}, {c.omega_minus, -c.mu3}};
        C_[i * K + j] = {{c.omega_plus, c.mu1}, {c.omega_minus, -c.mu1}};
        C_[j * K + i] = C_[i * K + j];
        C_[j * K + j] = {{c.omega_plus, -c.mu3}, {c.omega_minus, c.mu2}};
        for (int k = 0; k < K; ++k)
            if (k != i && k != j) C_[k * K + k] = {{modes_[k].lambda, 1.0}};
    }

    int size() const { return static_cast<int>(modes_.size()); }
    bool degenerate() const { return degenerate_; }

    Eigen::MatrixXcd transfer(double t) const {
        const int K = size();
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(K, K);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < K; ++c)
                for (const Term& tm : C_[r * K + c]) u(r, c) += tm.a * std::exp(tm.w * t);
        return u;
    }

    // N_jk(t) = sum_m rate_m n_bath_m int_0^t conj(U_jm) U_km ds
    Eigen::MatrixXcd noise(double t) const {
        const int K = size();
        Eigen::MatrixXcd N = Eigen::MatrixXcd::Zero(K, K);
        for (int m = 0; m < K; ++m) {
            double w = modes_[m].rate * modes_[m].n_bath;
            if (w == 0.0) continue;
            for (int j = 0; j < K; ++j)
                for (int k = 0; k < K; ++k) {
                    complex acc = 0.0;
                    for (const Term& tj : C_[j * K + m])
                        for (const Term& tk : C_[k * K + m])
                            acc += std::conj(tj.a) * tk.a *
                                   phi_integral(std::conj(tj.w) + tk.w, t);
                    N(j, k) += w * acc;
                }
        }
        return N;
    }

  private:
    std::vector<BathMode> modes_;
    std::vector<std::vector<Term>> C_;
    bool degenerate_ = false;
};

struct MomentState {
    Eigen::MatrixXcd n, m;
    Eigen::VectorXcd mean;

    static MomentState zero(int K) {
        MomentState s;
        s.n = Eigen::MatrixXcd::Zero(K, K);
        s.m = Eigen::MatrixXcd::Zero(K, K);
        s.mean = Eigen::VectorXcd::Zero(K);
        return s;
    }

    MomentState evolved(const StageOperator& op, double t) const {
        MomentState out;
        Eigen::MatrixXcd U = op.transfer(t);
        out.n = U.conjugate() * n * U.transpose() + op.noise(t);
        out.m = U * m * U.transpose();
        out.mean = U * mean;
        return out;
    }

    MomentState selected(const std::vector<int>& idx) const {
        const int K = static_cast<int>(idx.size());
        MomentState out = zero(K);
        for (int j = 0; j < K; ++j) {
            out.mean(j) = mean(idx[j]);
            for (int k = 0; k < K; ++k) {
                out.n(j, k) = n(idx[j], idx[k]);
                out.m(j, k) = m(idx[j], idx[k]);
            }
        }
        return out;
    }

    // Quadrature covariance and mean relative to the rotating frames beta.
    GaussianState to_state(const std::vector<double>& betas) const {
        const int K = static_cast<int>(mean.size());
        GaussianState s;
        s.n_modes = K;
        s.cov = Eigen::MatrixXd::Zero(2 * K, 2 * K);
        s.mean = Eigen::VectorXd::Zero(2 * K);
        for (int j = 0; j < K; ++j) {
            complex mm = mean(j) * std::exp(complex(0.0, -betas[j]));
            s.mean(2 * j) = std::sqrt(2.0) * mm.real();
            s.mean(2 * j + 1) = std::sqrt(2.0) * mm.imag();
            for (int k = 0; k < K; ++k) {
                complex nn = n(j, k) * std::exp(complex(0.0, betas[j] - betas[k]));
                complex mc = m(j, k) * std::exp(complex(0.0, -(betas[j] + betas[k])));
                double dk = (j == k) ? 0.5 : 0.0;
                s.cov(2 * j, 2 * k) = (mc + nn).real() + dk;
                s.cov(2 * j, 2 * k + 1) = mc.imag() + nn.imag();
                s.cov(2 * j + 1, 2 * k) = mc.imag() - nn.imag();
                s.cov(2 * j + 1, 2 * k + 1) = (nn - mc).real() + dk;
            }
        }
        s.cov = 0.5 * (s.cov + s.cov.transpose().eval());
        return s;
    }
};

}  // namespace cm

// ---------------------------------------------------------------------------
// Memory-protocol parameter bundle and the stage chains built from it.

struct MemoryParams {
    WaveguideParams wg;
    Environment env;
    StageCoupling coupling;
    ModeSelector selector;
};

inline double memory_thermal_occupation(const MemoryParams& p) {
    return thermal_occupation(p.wg.Omega_ac, p.env.T_en);
}

struct SqueezedKind {
    enum class Type { vacuum, thermal, coherent };
    Type type = Type::vacuum;
    double r = 0.0;
    double u = 1.0;       // purity parameter, thermal kind
    complex alpha{};      // displacement, coherent kind
    double theta = 0.0;   // squeeze orientation
};

inline SqueezedKind vacuum_kind(double r, double theta = 0.0) {
    return {SqueezedKind::Type::vacuum, r, 1.0, {}, theta};
}
inline SqueezedKind thermal_kind(double r, double u) {
    return {SqueezedKind::Type::thermal, r, u, {}, 0.0};
}
inline SqueezedKind coherent_kind(double r, complex alpha) {
    return {SqueezedKind::Type::coherent, r, 1.0, alpha, 0.0};
}

struct StageTimes {
    double tau1 = 0.0;   // write duration (store/readout stages)
    double tau_s = 0.0;  // storage duration (readout stage)
    double t = 0.0;      // time within the requested stage
};

struct StagePhases {
    std::optional<double> beta_b;   // acoustic quadrature frame
    std::optional<double> beta_re;  // retrieval quadrature frame
};

namespace cm {

// Centered input moments (n, m, mean) of the squeezed families.
inline MomentState squeezed_input_moments(const SqueezedKind& kind) {
    MomentState s = MomentState::zero(1);
    double ch = std::cosh(kind.r), sh = std::sinh(kind.r);
    complex rot = std::exp(complex(0.0, kind.theta));
    switch (kind.type) {
        case SqueezedKind::Type::vacuum:
            s.n(0, 0) = sh * sh;
            s.m(0, 0) = -rot * ch * sh;
            break;
        case SqueezedKind::Type::thermal: {
            double nb = squeezed_thermal_occupation(kind.u);
            s.n(0, 0) = nb * std::cosh(2.0 * kind.r) + sh * sh;
            s.m(0, 0) = -rot * (2.0 * nb + 1.0) * ch * sh;
            break;
        }
        case SqueezedKind::Type::coherent:
            s.n(0, 0) = sh * sh;
            s.m(0, 0) = -rot * ch * sh;
            s.mean(0) = kind.alpha * ch - std::conj(kind.alpha) * sh;
            break;
    }
    return s;
}

inline MomentState entangled_input_moments(double eta) {
    if (eta < 0.0) throw std::domain_error("pair strength must be non-negative");
    MomentState s = MomentState::zero(2);
    s.n(0, 0) = s.n(1, 1) = 2.0 * eta * eta;
    s.m(0, 1) = s.m(1, 0) = complex(-2.0 * eta * eta, -eta);
    return s;
}

struct StageChain {
    BathMode optical, acoustic, idler;
    double g1 = 0.0, g2 = 0.0;
    bool degenerate = false;
};

inline StageChain make_chain(const MemoryParams& p) {
    check_params(p.wg);
    check_environment(p.env);
    check_coupling(p.coupling);
    Detunings d = detunings_for_k(p.selector.k, p.wg);
    double n_th = memory_thermal_occupation(p);
    StageChain ch;
    ch.optical = {complex(-0.5 * p.wg.gamma, p.selector.Delta_sg.value_or(d.Delta_as)),
                  p.wg.gamma, 0.0};
    ch.acoustic = {complex(-0.5 * p.wg.Gamma, p.selector.Delta_ac.value_or(d.Delta_ac)),
                   p.wg.Gamma, n_th};
    ch.idler = {complex(-0.5 * p.selector.gamma_smf, p.selector.Delta_id.value_or(d.Delta_as)),
                p.selector.gamma_smf, 0.0};
    ch.g1 = p.coupling.g1;
    ch.g2 = p.coupling.g2;
    return ch;
}

inline BathMode retrieval_mode(const MemoryParams& p) {
    Detunings d = detunings_for_k(p.selector.k, p.wg);
    return {complex(-0.5 * p.wg.gamma, p.selector.Delta_re.value_or(d.Delta_as)), p.wg.gamma,
            0.0};
}

// Squeezed scenario: write system (signal, acoustic); store (acoustic);
// readout (retrieval, acoustic). Returns the full moment state of the
// requested stage system at stage-local time tm.t.
inline MomentState squeezed_stage_moments(const SqueezedKind& kind, Stage stage,
                                          const MemoryParams& p, const StageTimes& tm,
                                          bool* degenerate = nullptr) {
    StageChain ch = make_chain(p);
    MomentState in = squeezed_input_moments(kind);

    auto flag = [&](const StageOperator& op) {
        if (degenerate && op.degenerate()) *degenerate = true;
    };

    MomentState w = MomentState::zero(2);
    w.n(0, 0) = in.n(0, 0);
    w.m(0, 0) = in.m(0, 0);
    w.mean(0) = in.mean(0);
    StageOperator write_op({ch.optical, ch.acoustic}, 0, 1, ch.g1);
    flag(write_op);
    if (stage == Stage::write) return w.evolved(write_op, tm.t);

    MomentState b = w.evolved(write_op, tm.tau1).selected({1});
    StageOperator store_op({ch.acoustic});
    if (stage == Stage::store) return b.evolved(store_op, tm.t);

    MomentState s = b.evolved(store_op, tm.tau_s);
    MomentState rd = MomentState::zero(2);
    rd.n(1, 1) = s.n(0, 0);
    rd.m(1, 1) = s.m(0, 0);
    rd.mean(1) = s.mean(0);
    StageOperator read_op({retrieval_mode(p), ch.acoustic}, 0, 1, ch.g2);
    flag(read_op);
    if (stage == Stage::readout) return rd.evolved(read_op, tm.t);
    throw std::invalid_argument("unknown stage");
}

// Entangled scenario: write (idler, signal, acoustic); store (idler,
// acoustic); readout (idler, retrieval, acoustic).
inline MomentState entangled_stage_moments(double eta, Stage stage, const MemoryParams& p,
                                           const StageTimes& tm, bool* degenerate = nullptr) {
    StageChain ch = make_chain(p);
    MomentState in = entangled_input_moments(eta);

    auto flag = [&](const StageOperator& op) {
        if (degenerate && op.degenerate()) *degenerate = true;
    };

    MomentState w = MomentState::zero(3);
    w.n.topLeftCorner(2, 2) = in.n;
    w.m.topLeftCorner(2, 2) = in.m;
    StageOperator write_op({ch.idler, ch.optical, ch.acoustic}, 1, 2, ch.g1);
    flag(write_op);
    if (stage == Stage::write) return w.evolved(write_op, tm.t);

    MomentState s0 = w.evolved(write_op, tm.tau1).selected({0, 2});
    StageOperator store_op({ch.idler, ch.acoustic});
    if (stage == Stage::store) return s0.evolved(store_op, tm.t);

    MomentState s = s0.evolved(store_op, tm.tau_s);
    MomentState rd = MomentState::zero(3);
    rd.n(0, 0) = s.n(0, 0); rd.n(2, 2) = s.n(1, 1);
    rd.n(0, 2) = s.n(0, 1); rd.n(2, 0) = s.n(1, 0);
    rd.m(0, 0) = s.m(0, 0); rd.m(2, 2) = s.m(1, 1);
    rd.m(0, 2) = s.m(0, 1); rd.m(2, 0) = s.m(1, 0);
    rd.mean(0) = s.mean(0); rd.mean(2) = s.mean(1);
    StageOperator read_op({ch.idler, retrieval_mode(p), ch.acoustic}, 1, 2, ch.g2);
    flag(read_op);
    if (stage == Stage::readout) return rd.evolved(read_op, tm.t);
    throw std::invalid_argument("unknown stage");
}

}  // namespace cm

// Default frame of the acoustic (or retrieval) quadratures for each kind.
inline double default_beta_b(const SqueezedKind& kind) {
    return kind.type == SqueezedKind::Type::coherent ? 1.5 * pi : 0.5 * pi;
}

// Single-mode closed-form state of the relevant subsystem: acoustic mode for
// write/store, retrieval mode for readout.
inline GaussianState stage_state_squeezed(const SqueezedKind& kind, Stage stage,
                                          const MemoryParams& p, const StageTimes& tm,
                                          const StagePhases& phases = {}) {
    if (tm.t < 0.0 || tm.tau1 < 0.0 || tm.tau_s < 0.0)
        throw std::domain_error("stage times must be non-negative");
    cm::MomentState ms = cm::squeezed_stage_moments(kind, stage, p, tm);
    double bb = phases.beta_b.value_or(default_beta_b(kind));
    double br = phases.beta_re.value_or(0.0);
    switch (stage) {
        case Stage::write: return ms.selected({1}).to_state({bb});
        case Stage::store: return ms.to_state({bb});
        case Stage::readout: return ms.selected({0}).to_state({br});
    }
    throw std::invalid_argument("unknown stage");
}

// Two-mode closed-form state: idler plus the stage partner (acoustic for
// write/store, retrieval for readout).
inline GaussianState stage_state_entangled(Stage stage, const MemoryParams& p, double eta,
                                           const StageTimes& tm, const StagePhases& phases = {}) {
    if (tm.t < 0.0 || tm.tau1 < 0.0 || tm.tau_s < 0.0)
        throw std::domain_error("stage times must be non-negative");
    cm::MomentState ms = cm::entangled_stage_moments(eta, stage, p, tm);
    double bb = phases.beta_b.value_or(1.5 * pi);
    double br = phases.beta_re.value_or(0.0);
    switch (stage) {
        case Stage::write: return ms.selected({0, 2}).to_state({0.0, bb});
        case Stage::store: return ms.to_state({0.0, bb});
        case Stage::readout: return ms.selected({0, 1}).to_state({0.0, br});
    }
    throw std::invalid_argument("unknown stage");
}

// ---------------------------------------------------------------------------
// Transduction populations.

struct TransductionPopulations {
    double n_a = 0.0;
    double n_b = 0.0;
    bool weak_coupling_warning = false;
};

// Exact populations of the coupled pair under thermal acoustic noise,
// evaluated from the exponential-sum transfer functions.
inline TransductionPopulations transduction_populations_exact(const WaveguideParams& p, double g,
                                                              double n_a0, double n_b0, double k,
                                                              double t, double n_th) {
    check_params(p);
    if (n_a0 < 0.0 || n_b0 < 0.0) throw std::domain_error("initial populations must be >= 0");
    if (n_th < 0.0) throw std::domain_error("thermal occupation must be non-negative");
    if (!(g > 0.0)) throw std::domain_error("coupling rate must be positive");
    Detunings d = detunings_for_k(k, p);

    cm::BathMode opt{complex(-0.5 * p.gamma, d.Delta_as), p.gamma, 0.0};
    cm::BathMode ac{complex(-0.5 * p.Gamma, d.Delta_ac), p.Gamma, n_th};
    double geff = g;
    // The two-exponential form degenerates when 16 g^2 = q^2; nudge g.
    if (coefficient_set(p.gamma, p.Gamma, g, d.Delta_as, d.Delta_ac).near_degenerate)
        geff = g * (1.0 + 1e-9) + 1e-300;
    cm::StageOperator op({opt, ac}, 0, 1, geff);

    Eigen::MatrixXcd U = op.transfer(t);
    Eigen::MatrixXcd N = op.noise(t);
    TransductionPopulations out;
    out.n_a = std::norm(U(0, 0)) * n_a0 + std::norm(U(0, 1)) * n_b0 + N(0, 0).real();
    out.n_b = std::norm(U(1, 0)) * n_a0 + std::norm(U(1, 1)) * n_b0 + N(1, 1).real();
    if (out.n_a < 0.0 && out.n_a > -1e-9) out.n_a = 0.0;
    if (out.n_b < 0.0 && out.n_b > -1e-9) out.n_b = 0.0;
    out.weak_coupling_warning = !(g > p.gamma && g > p.Gamma);
    return out;
}

inline TransductionPopulations transduction_populations_exact(const WaveguideParams& p,
                                                              const Environment& env, double g,
                                                              double n_a0, double n_b0, double k,
                                                              double t) {
    check_environment(env);
    return transduction_populations_exact(p, g, n_a0, n_b0, k, t,
                                          thermal_occupation(p.Omega_ac, env.T_en));
}

// Strong-coupling Rabi approximation of the populations.
inline TransductionPopulations transduction_populations_approx(const WaveguideParams& p, double g,
                                                               double n_a0, double n_b0,
                                                               double n_th, double t) {
    check_params(p);
    if (n_a0 < 0.0 || n_b0 < 0.0) throw std::domain_error("initial populations must be >= 0");
    if (n_th < 0.0) throw std::domain_error("thermal occupation must be non-negative");
    double dec = std::exp(-0.5 * (p.gamma + p.Gamma) * t);
    double c = std::cos(2.0 * g * t);
    TransductionPopulations out;
    out.n_b = 0.5 * n_a0 * dec * (1.0 - c) + 0.5 * n_b0 * dec * (1.0 + c) + (1.0 - dec) * n_th;
    out.n_a = 0.5 * n_a0 * dec * (1.0 + c) + 0.5 * n_b0 * dec * (1.0 - c) + (1.0 - dec) * n_th;
    out.weak_coupling_warning = !(g > p.gamma && g > p.Gamma);
    return out;
}

// Rabi frequency of the population exchange, Re(s)/2.
inline double transduction_oscillation_frequency(const WaveguideParams& p, double g, double k) {
    Detunings d = detunings_for_k(k, p);
    CoefficientSet c = coefficient_set(p.gamma, p.Gamma, g, d.Delta_as, d.Delta_ac);
    return 0.5 * c.s.real();
}

// Peak photon-phonon conversion efficiency, 1 - pi(gamma+Gamma)/(4g).
inline double conversion_efficiency_max(const WaveguideParams& p, double g) {
    if (!(g > 0.0)) throw std::domain_error("coupling rate must be positive");
    double eta = 1.0 - pi * (p.gamma + p.Gamma) / (4.0 * g);
    if (eta < 0.0) eta = 0.0;
    if (eta > 1.0) eta = 1.0;
    return eta;
}

// ---------------------------------------------------------------------------
// Short-time approximation formulas for the memory figures of merit.

struct ApproxSqueezingMetrics {
    double var_write = 0.0;      // squeezed-quadrature variance at time t, write stage
    double var_write_min = 0.0;  // minimum over the write stage
    double var_read = 0.0;       // variance at time t, readout stage
    double var_read_min = 0.0;   // minimum over the readout stage
    bool storage_warning = false;
};

inline ApproxSqueezingMetrics approx_squeezing_metrics(const WaveguideParams& p,
                                                       const Environment& env, double r, double g1,
                                                       double g2, double tau1, double tau_s,
                                                       double t) {
    check_params(p);
    check_environment(env);
    if (!(g1 > 0.0) || !(g2 > 0.0)) throw std::domain_error("coupling rates must be positive");
    const double G = p.Gamma;
    const double n_th = thermal_occupation(p.Omega_ac, env.T_en);
    const double A = heating_rate(G, n_th);
    const double sq = 1.0 - std::exp(-2.0 * r);
    ApproxSqueezingMetrics out;
    double sw = std::sin(g1 * t);
    out.var_write = 0.5 - 0.5 * sq * std::exp(-0.5 * G * t) * sw * sw + 0.5 * A * t;
    out.var_write_min = 0.5 * std::exp(-2.0 * r) + (pi / 4.0) * (A / g1 + 0.5 * G * sq / g1);
    double sr = std::sin(g2 * t);
    out.var_read = 0.5 - 0.5 * sq * std::exp(-0.5 * G * t) * sr * sr +
                   A * (0.5 * t + (pi / (4.0 * g1)) * std::exp(-0.5 * G * t) * sr * sr);
    out.var_read_min =
        0.5 * std::exp(-2.0 * r) + (pi / 4.0) * (A / g1 + A / g2 + 0.5 * G * sq / g2);
    out.storage_warning = tau_s * G > 0.1;
    (void)tau1;
    return out;
}

struct ApproxEntanglementMetrics {
    double lambda_write = 0.0;   // smallest PT symplectic eigenvalue at time t, write stage
    double e_n_write_max = 0.0;  // peak log-negativity, write stage
    double lambda_read = 0.0;    // same for the readout stage
    double e_n_read_max = 0.0;
};

inline ApproxEntanglementMetrics approx_entanglement_metrics(const WaveguideParams& p,
                                                             const Environment& env, double g1,
                                                             double g2, double tau1, double t) {
    check_params(p);
    check_environment(env);
    if (!(g1 > 0.0) || !(g2 > 0.0)) throw std::domain_error("coupling rates must be positive");
    const double G = p.Gamma;
    const double n_th = thermal_occupation(p.Omega_ac, env.T_en);
    const double A = heating_rate(G, n_th);
    ApproxEntanglementMetrics out;
    double e = std::exp(-0.5 * G * t);
    double s1 = std::sin(g1 * t);
    out.lambda_write = 0.5 *
                       (1.0 + 2.0 * n_th * (1.0 - e) + (A / (4.0 * g1)) * e * std::sin(2.0 * g1 * t)) /
                       (1.0 + e * s1 * s1);
    out.e_n_write_max = -std::log(0.5 * (1.0 + pi * A / (2.0 * g1)));
    double s2 = std::sin(g2 * t);
    out.lambda_read =
        (1.0 + 2.0 * n_th * (1.0 - e) -
         0.5 * A * e * (std::sin(2.0 * g2 * t) / g2 - pi * s2 * s2 / g1)) /
        (2.0 * (1.0 + std::exp(-0.5 * G * (t + tau1)) * s2 * s2));
    out.e_n_read_max =
        -std::log(0.5 * (1.0 + pi * A / (2.0 * g2) +
                         (pi * A / (2.0 * g1)) * std::exp(-pi * G / (4.0 * g2))));
    return out;
}

}  // namespace oamem
