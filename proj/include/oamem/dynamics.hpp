#pragma once

// Numerical moment transport: first moments follow du/dt = A u, covariances
// follow the Lyapunov equation dV/dt = A V + V A^T + D. This is the
// brute-force backend the closed forms are checked against.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "oamem/gaussian.hpp"
#include "oamem/params.hpp"

namespace oamem {

enum class Stage { write, store, readout };
enum class Scenario { squeezed, entangled };

struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::MatrixXd D;
    int n_modes = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<GaussianState> states;
};

namespace dyn_detail {

// Drift block for d a/dt = lambda a with a = (X + iP)/sqrt(2).
inline void put_drift(Eigen::MatrixXd& A, int mode, complex lambda) {
    A(2 * mode, 2 * mode) = lambda.real();
    A(2 * mode + 1, 2 * mode + 1) = lambda.real();
    A(2 * mode, 2 * mode + 1) = -lambda.imag();
    A(2 * mode + 1, 2 * mode) = lambda.imag();
}

// Beamsplitter coupling d a_i/dt += -i g a_j and vice versa.
inline void put_coupling(Eigen::MatrixXd& A, int i, int j, double g) {
    A(2 * i, 2 * j + 1) += g;
    A(2 * i + 1, 2 * j) += -g;
    A(2 * j, 2 * i + 1) += g;
    A(2 * j + 1, 2 * i) += -g;
}

inline void put_diffusion(Eigen::MatrixXd& D, int mode, double value) {
    D(2 * mode, 2 * mode) = value;
    D(2 * mode + 1, 2 * mode + 1) = value;
}

}  // namespace dyn_detail

// Assemble the drift and diffusion matrices of one protocol stage. Mode
// ordering: squeezed write (signal, acoustic), store (acoustic), readout
// (retrieval, acoustic); the entangled variants carry the idler as mode 0
// in front of the same layout.
inline LinearSystem build_stage_system(Stage stage, Scenario scenario,
                                       const WaveguideParams& p, const StageCoupling& c,
                                       const ModeSelector& sel, double n_th) {
    check_params(p);
    check_coupling(c);
    if (n_th < 0.0) throw std::domain_error("thermal occupation must be non-negative");

    Detunings d = detunings_for_k(sel.k, p);
    const complex lam_id(-0.5 * sel.gamma_smf, sel.Delta_id.value_or(d.Delta_as));
    const complex lam_sg(-0.5 * p.gamma, sel.Delta_sg.value_or(d.Delta_as));
    const complex lam_re(-0.5 * p.gamma, sel.Delta_re.value_or(d.Delta_as));
    const complex lam_ac(-0.5 * p.Gamma, sel.Delta_ac.value_or(d.Delta_ac));

    using namespace dyn_detail;
    const bool ent = scenario == Scenario::entangled;
    LinearSystem sys;
    int n = 0;
    switch (stage) {
        case Stage::write: n = ent ? 3 : 2; break;
        case Stage::store: n = ent ? 2 : 1; break;
        case Stage::readout: n = ent ? 3 : 2; break;
        default: throw std::invalid_argument("unknown stage");
    }
    if (scenario != Scenario::squeezed && scenario != Scenario::entangled)
        throw std::invalid_argument("unknown scenario");
    sys.n_modes = n;
    sys.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    sys.D = Eigen::MatrixXd::Zero(2 * n, 2 * n);

    int base = 0;
    if (ent) {
        put_drift(sys.A, 0, lam_id);
        put_diffusion(sys.D, 0, 0.5 * sel.gamma_smf);
        base = 1;
    }
    switch (stage) {
        case Stage::write:
            put_drift(sys.A, base, lam_sg);
            put_drift(sys.A, base + 1, lam_ac);
            put_coupling(sys.A, base, base + 1, c.g1);
            put_diffusion(sys.D, base, 0.5 * p.gamma);
            put_diffusion(sys.D, base + 1, p.Gamma * (n_th + 0.5));
            break;
        case Stage::store:
            put_drift(sys.A, base, lam_ac);
            put_diffusion(sys.D, base, p.Gamma * (n_th + 0.5));
            break;
        case Stage::readout:
            put_drift(sys.A, base, lam_re);
            put_drift(sys.A, base + 1, lam_ac);
            put_coupling(sys.A, base, base + 1, c.g2);
            put_diffusion(sys.D, base, 0.5 * p.gamma);
            put_diffusion(sys.D, base + 1, p.Gamma * (n_th + 0.5));
            break;
    }
    return sys;
}

namespace dyn_detail {

inline void rk4_span(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D, Eigen::MatrixXd& V,
                     Eigen::VectorXd& u, double dt, std::int64_t nsteps) {
    const double h = dt / double(nsteps);
    auto fV = [&](const Eigen::MatrixXd& v) -> Eigen::MatrixXd {
        return A * v + v * A.transpose() + D;
    };
    for (std::int64_t s = 0; s < nsteps; ++s) {
        Eigen::MatrixXd k1 = fV(V);
        Eigen::MatrixXd k2 = fV(V + 0.5 * h * k1);
        Eigen::MatrixXd k3 = fV(V + 0.5 * h * k2);
        Eigen::MatrixXd k4 = fV(V + h * k3);
        V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        V = 0.5 * (V + V.transpose().eval());
        Eigen::VectorXd l1 = A * u;
        Eigen::VectorXd l2 = A * (u + 0.5 * h * l1);
        Eigen::VectorXd l3 = A * (u + 0.5 * h * l2);
        Eigen::VectorXd l4 = A * (u + h * l3);
        u += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    }
}

}  // namespace dyn_detail

// Fixed-step RK4 along t_grid. The first grid point carries the initial
// state. oversample multiplies the step count (used by convergence tests).
inline Trajectory integrate_moments(const LinearSystem& sys, const GaussianState& initial,
                                    const std::vector<double>& t_grid, int oversample = 1) {
    if (initial.n_modes != sys.n_modes)
        throw std::invalid_argument("initial state does not match system mode count");
    if (t_grid.size() < 1) throw std::invalid_argument("time grid is empty");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("time grid must be strictly increasing");
    if (oversample < 1) throw std::invalid_argument("oversample must be positive");

    // The fastest rate in A bounds the admissible step.
    const double rate = 4.0 * std::max(sys.A.cwiseAbs().maxCoeff(), 1e-300);
    const double total = t_grid.back() - t_grid.front();
    if (50.0 * rate * total * oversample > 1e8)
        throw std::runtime_error("step budget exceeded: refine the grid or shorten the span");

    Trajectory traj;
    traj.times = t_grid;
    traj.states.reserve(t_grid.size());
    GaussianState cur = initial;
    traj.states.push_back(cur);
    Eigen::MatrixXd V = initial.cov;
    Eigen::VectorXd u = initial.mean;
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        double dt = t_grid[i] - t_grid[i - 1];
        std::int64_t n = std::int64_t(std::ceil(dt * 50.0 * rate)) * oversample;
        if (n < 16) n = 16;
        dyn_detail::rk4_span(sys.A, sys.D, V, u, dt, n);
        GaussianState s;
        s.n_modes = sys.n_modes;
        s.cov = V;
        s.mean = u;
        traj.states.push_back(s);
    }
    return traj;
}

// Mean excitation number of one mode, including the coherent contribution.
inline double population_from_state(const GaussianState& s, int mode_index) {
    if (mode_index < 0 || mode_index >= s.n_modes)
        throw std::invalid_argument("mode index out of range");
    int q = 2 * mode_index;
    double var = s.cov(q, q) + s.cov(q + 1, q + 1);
    double coh = s.mean(q) * s.mean(q) + s.mean(q + 1) * s.mean(q + 1);
    return 0.5 * (var - 1.0) + 0.5 * coh;
}

}  // namespace oamem
