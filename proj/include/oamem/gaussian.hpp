#pragma once

// Gaussian states in quadrature representation and the figures of merit
// derived from their first and second moments.
//
// Conventions: X = (a + a^dag)/sqrt(2), P = -i(a - a^dag)/sqrt(2), vacuum
// variance 1/2, quadratures ordered (X1, P1, X2, P2, ...).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace oamem {

using complex = std::complex<double>;

struct GaussianState {
    int n_modes = 0;
    Eigen::MatrixXd cov;   // 2n x 2n symmetric covariance matrix
    Eigen::VectorXd mean;  // 2n quadrature mean vector
};

// Symplectic form J = direct sum of [[0,1],[-1,0]] blocks, plus the identity
// of matching size.
struct SymplecticForm {
    Eigen::MatrixXd J;
    Eigen::MatrixXd E;
};

inline SymplecticForm symplectic_form(int n_modes) {
    SymplecticForm f;
    f.J = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        f.J(2 * k, 2 * k + 1) = 1.0;
        f.J(2 * k + 1, 2 * k) = -1.0;
    }
    f.E = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    return f;
}

// Symplectic eigenvalues: moduli of the eigenvalues of iJV, one per mode.
inline Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& cov) {
    const int n = static_cast<int>(cov.rows()) / 2;
    Eigen::MatrixXd J = symplectic_form(n).J;
    Eigen::EigenSolver<Eigen::MatrixXd> es(J * cov);
    Eigen::VectorXd nus(n);
    // Eigenvalues come in pairs +-i*nu; collect the positive imaginary parts.
    std::vector<double> mags;
    for (int k = 0; k < 2 * n; ++k) mags.push_back(std::abs(es.eigenvalues()(k)));
    std::sort(mags.begin(), mags.end());
    for (int k = 0; k < n; ++k) nus(k) = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
    return nus;
}

inline bool is_physical(const GaussianState& s, double tol = 1e-9) {
    Eigen::VectorXd nu = symplectic_eigenvalues(s.cov);
    return nu.minCoeff() >= 0.5 - tol;
}

inline void check_state(const GaussianState& s) {
    if (s.n_modes < 1) throw std::invalid_argument("state needs at least one mode");
    if (s.cov.rows() != 2 * s.n_modes || s.cov.cols() != 2 * s.n_modes)
        throw std::invalid_argument("covariance dimension does not match mode count");
    if (s.mean.size() != 2 * s.n_modes)
        throw std::invalid_argument("mean dimension does not match mode count");
    double scale = std::max(1.0, s.cov.cwiseAbs().maxCoeff());
    if ((s.cov - s.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("covariance matrix is not symmetric");
    if (!is_physical(s))
        throw std::invalid_argument("covariance matrix violates the uncertainty bound");
}

inline GaussianState make_state(const Eigen::MatrixXd& cov, const Eigen::VectorXd& mean) {
    GaussianState s;
    s.n_modes = static_cast<int>(cov.rows()) / 2;
    s.cov = cov;
    s.mean = mean;
    check_state(s);
    return s;
}

inline GaussianState make_squeezed_vacuum(double r) {
    if (!std::isfinite(r)) throw std::domain_error("squeezing degree must be finite");
    Eigen::MatrixXd v(2, 2);
    v << 0.5 * std::exp(-2.0 * r), 0.0, 0.0, 0.5 * std::exp(2.0 * r);
    return make_state(v, Eigen::VectorXd::Zero(2));
}

// Mean thermal occupation of the squeezed thermal family at purity parameter u.
inline double squeezed_thermal_occupation(double u) {
    if (!(u > 0.0) || u > 1.0) throw std::domain_error("purity parameter must lie in (0, 1]");
    return 1.0 / (2.0 * u) - 0.5;
}

inline GaussianState make_squeezed_thermal(double r, double u) {
    if (!std::isfinite(r)) throw std::domain_error("squeezing degree must be finite");
    double nbar = squeezed_thermal_occupation(u);
    double w = nbar + 0.5;  // symplectic eigenvalue of the thermal core
    Eigen::MatrixXd v(2, 2);
    v << w * std::exp(-2.0 * r), 0.0, 0.0, w * std::exp(2.0 * r);
    return make_state(v, Eigen::VectorXd::Zero(2));
}

inline GaussianState make_squeezed_coherent(double r, complex alpha) {
    if (!std::isfinite(r) || !std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
        throw std::domain_error("squeezing degree and displacement must be finite");
    Eigen::MatrixXd v(2, 2);
    v << 0.5 * std::exp(-2.0 * r), 0.0, 0.0, 0.5 * std::exp(2.0 * r);
    // Displacement transforms along with the squeeze: alpha cosh r - conj(alpha) sinh r.
    complex a = alpha * std::cosh(r) - std::conj(alpha) * std::sinh(r);
    Eigen::VectorXd u(2);
    u << std::sqrt(2.0) * a.real(), std::sqrt(2.0) * a.imag();
    return make_state(v, u);
}

// Two-mode entangled resource with dimensionless strength eta: X-quadratures
// correlated, P-quadratures carrying the cross phase.
inline GaussianState make_entangled_pair(double eta) {
    if (eta < 0.0) throw std::domain_error("pair strength must be non-negative");
    double d = 0.5 + 2.0 * eta * eta;
    double cx = -2.0 * eta * eta;
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
    v(0, 0) = d; v(1, 1) = d; v(2, 2) = d; v(3, 3) = d;
    v(0, 2) = cx; v(2, 0) = cx;
    v(1, 3) = -cx; v(3, 1) = -cx;
    v(0, 3) = -eta; v(3, 0) = -eta;
    v(1, 2) = -eta; v(2, 1) = -eta;
    return make_state(v, Eigen::VectorXd::Zero(4));
}

// Uhlmann fidelity between single-mode Gaussian states.
inline double fidelity_one_mode(const GaussianState& s1, const GaussianState& s2) {
    if (s1.n_modes != 1 || s2.n_modes != 1)
        throw std::invalid_argument("fidelity_one_mode expects single-mode states");
    Eigen::Matrix2d vs = s1.cov + s2.cov;
    double delta = vs.determinant();
    double lambda = 4.0 * (s1.cov.determinant() - 0.25) * (s2.cov.determinant() - 0.25);
    if (lambda < 0.0) lambda = 0.0;  // roundoff guard for near-pure states
    Eigen::Vector2d du = s1.mean - s2.mean;
    double expo = std::exp(-0.5 * du.dot(vs.inverse() * du));
    return expo / (std::sqrt(delta + lambda) - std::sqrt(lambda));
}

// Uhlmann fidelity between two-mode Gaussian states with vanishing means.
inline double fidelity_two_mode(const GaussianState& s1, const GaussianState& s2) {
    if (s1.n_modes != 2 || s2.n_modes != 2)
        throw std::invalid_argument("fidelity_two_mode expects two-mode states");
    if (s1.mean.norm() >= 1e-9 || s2.mean.norm() >= 1e-9)
        throw std::invalid_argument("fidelity_two_mode requires zero-mean states");
    SymplecticForm f = symplectic_form(2);
    Eigen::Matrix4d vsum = s1.cov + s2.cov;
    double delta = vsum.determinant();
    Eigen::Matrix4d jv1 = f.J * s1.cov;
    Eigen::Matrix4d jv2 = f.J * s2.cov;
    double gam = 16.0 * (jv1 * jv2 - 0.25 * f.E).determinant();
    Eigen::Matrix4cd c1 = s1.cov.cast<complex>() + complex(0.0, 0.5) * f.J.cast<complex>();
    Eigen::Matrix4cd c2 = s2.cov.cast<complex>() + complex(0.0, 0.5) * f.J.cast<complex>();
    double lam = 16.0 * (c1.determinant() * c2.determinant()).real();
    if (gam < 0.0) gam = 0.0;
    if (lam < 0.0) lam = 0.0;
    double root = std::sqrt(gam) + std::sqrt(lam);
    double rad = root * root - delta;
    if (rad < 0.0) rad = 0.0;
    return 1.0 / (root - std::sqrt(rad));
}

// Smallest symplectic eigenvalue of the partially transposed two-mode state.
inline double pt_min_eigenvalue(const GaussianState& s) {
    if (s.n_modes != 2) throw std::invalid_argument("partial transpose needs a two-mode state");
    Eigen::Matrix2d a = s.cov.block<2, 2>(0, 0);
    Eigen::Matrix2d b = s.cov.block<2, 2>(2, 2);
    Eigen::Matrix2d c = s.cov.block<2, 2>(0, 2);
    double sigma = a.determinant() + b.determinant() - 2.0 * c.determinant();
    double detv = s.cov.determinant();
    double disc = sigma * sigma - 4.0 * detv;
    if (disc < -1e-9) throw std::runtime_error("partial transpose spectrum is not real");
    if (disc < 0.0) disc = 0.0;
    double nu2 = 0.5 * (sigma - std::sqrt(disc));
    if (nu2 < 0.0) nu2 = 0.0;
    return std::sqrt(nu2);
}

// Logarithmic negativity of a two-mode state from the partially transposed
// symplectic spectrum.
inline double log_negativity(const GaussianState& s) {
    double nu = pt_min_eigenvalue(s);
    double en = -std::log(2.0 * nu);
    return en > 0.0 ? en : 0.0;
}

// Keep a subset of modes, in the given order.
inline GaussianState select_modes(const GaussianState& s, const std::vector<int>& modes) {
    GaussianState out;
    out.n_modes = static_cast<int>(modes.size());
    out.cov.resize(2 * out.n_modes, 2 * out.n_modes);
    out.mean.resize(2 * out.n_modes);
    for (int j = 0; j < out.n_modes; ++j) {
        if (modes[j] < 0 || modes[j] >= s.n_modes)
            throw std::invalid_argument("mode index out of range");
        out.mean.segment<2>(2 * j) = s.mean.segment<2>(2 * modes[j]);
        for (int k = 0; k < out.n_modes; ++k)
            out.cov.block<2, 2>(2 * j, 2 * k) = s.cov.block<2, 2>(2 * modes[j], 2 * modes[k]);
    }
    return out;
}

// Rotate one mode into the frame at angle beta: a -> a e^{-i beta}.
inline GaussianState rotate_mode(const GaussianState& s, int mode, double beta) {
    if (mode < 0 || mode >= s.n_modes) throw std::invalid_argument("mode index out of range");
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(2 * s.n_modes, 2 * s.n_modes);
    double c = std::cos(beta), sn = std::sin(beta);
    R(2 * mode, 2 * mode) = c;
    R(2 * mode, 2 * mode + 1) = sn;
    R(2 * mode + 1, 2 * mode) = -sn;
    R(2 * mode + 1, 2 * mode + 1) = c;
    GaussianState out;
    out.n_modes = s.n_modes;
    out.cov = R * s.cov * R.transpose();
    out.mean = R * s.mean;
    return out;
}

// Variance of the selected quadrature relative to vacuum. Below one means
// squeezed.
inline double squeezing_factor(const GaussianState& s, int quad_index) {
    if (quad_index < 0 || quad_index >= 2 * s.n_modes)
        throw std::invalid_argument("quadrature index out of range");
    return s.cov(quad_index, quad_index) / 0.5;
}

inline double squeezing_factor_db(const GaussianState& s, int quad_index) {
    return 10.0 * std::log10(squeezing_factor(s, quad_index));
}

}  // namespace oamem
