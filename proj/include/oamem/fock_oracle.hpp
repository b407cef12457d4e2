#pragma once

// Brute-force fidelity reference: reconstructs the density matrix of a
// Gaussian state in a truncated number basis and evaluates the Uhlmann
// fidelity directly. Slow by design; used to validate the closed forms.
//
// Construction: Williamson decomposition V = S (diag nu_j I_2) S^T, polar
// split S = O1 * P into a passive rotation and an active squeeze, then
// rho = D(alpha) U_O U_P rho_thermal U_P^dag U_O^dag D^dag with every
// exponential evaluated through a Hermitian eigendecomposition.

#include <Eigen/Dense>
#include <vector>

#include "oamem/gaussian.hpp"

namespace oamem {
namespace fock_detail {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct WilliamsonResult {
    VectorXd nus;  // symplectic eigenvalues, one per mode
    MatrixXd S;    // symplectic matrix with V = S diag(nu) S^T
};

inline WilliamsonResult williamson(const MatrixXd& V) {
    const int n = static_cast<int>(V.rows()) / 2;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(V);
    VectorXd ev = es.eigenvalues();
    MatrixXd Q = es.eigenvectors();
    MatrixXd M = Q * ev.cwiseSqrt().asDiagonal() * Q.transpose();
    MatrixXd Mi = Q * ev.cwiseSqrt().cwiseInverse().asDiagonal() * Q.transpose();
    MatrixXd J = symplectic_form(n).J;
    MatrixXd A = Mi * J * Mi;
    A = 0.5 * (A - A.transpose().eval());
    Eigen::RealSchur<MatrixXd> schur(A);
    MatrixXd O = schur.matrixU();
    // A is antisymmetric and invertible, so the Schur form is block diagonal
    // with 2x2 rotation generators. Normalise each block to positive t.
    WilliamsonResult out;
    out.nus.resize(n);
    MatrixXd D = MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        double t = O.col(2 * j).dot(A * O.col(2 * j + 1));
        if (t < 0.0) {
            O.col(2 * j).swap(O.col(2 * j + 1));
            t = -t;
        }
        out.nus(j) = 1.0 / t;
        D(2 * j, 2 * j) = std::sqrt(t);
        D(2 * j + 1, 2 * j + 1) = std::sqrt(t);
    }
    out.S = M * O * D;
    return out;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// exp(i * H) for Hermitian H.
inline MatrixXcd exp_i_hermitian(const MatrixXcd& H) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    Eigen::VectorXcd ph(es.eigenvalues().size());
    for (int k = 0; k < ph.size(); ++k)
        ph(k) = std::exp(complex(0.0, es.eigenvalues()(k)));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// Mode annihilation operators on the truncated K-mode Fock space.
inline std::vector<MatrixXcd> mode_operators(int n_modes, int cutoff) {
    MatrixXcd a = MatrixXcd::Zero(cutoff, cutoff);
    for (int k = 1; k < cutoff; ++k) a(k - 1, k) = std::sqrt(double(k));
    MatrixXcd eye = MatrixXcd::Identity(cutoff, cutoff);
    std::vector<MatrixXcd> ops;
    if (n_modes == 1) {
        ops.push_back(a);
    } else {
        ops.push_back(kron(a, eye));
        ops.push_back(kron(eye, a));
    }
    return ops;
}

inline MatrixXcd density_matrix(const GaussianState& s, int cutoff) {
    const int K = s.n_modes;
    WilliamsonResult w = williamson(s.cov);

    // Polar split S = O1 * P with P = (S^T S)^(1/2).
    MatrixXd StS = w.S.transpose() * w.S;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(StS);
    VectorXd ev = es.eigenvalues();
    MatrixXd Q = es.eigenvectors();
    MatrixXd O1 = w.S * Q * ev.cwiseSqrt().cwiseInverse().asDiagonal() * Q.transpose();
    VectorXd lg = ev.array().log().matrix() * 0.5;
    MatrixXd KP = Q * lg.asDiagonal() * Q.transpose();
    MatrixXd J = symplectic_form(K).J;
    MatrixXd GP = -J * KP;
    GP = 0.5 * (GP + GP.transpose().eval());

    // The passive factor acts as a complex unitary on the mode operators.
    MatrixXcd u(K, K);
    for (int j = 0; j < K; ++j)
        for (int k = 0; k < K; ++k)
            u(j, k) = complex(O1(2 * j, 2 * k), O1(2 * j + 1, 2 * k));
    Eigen::ComplexEigenSolver<MatrixXcd> ces(u);
    Eigen::VectorXcd lam = ces.eigenvalues();
    Eigen::VectorXcd diag(K);
    for (int k = 0; k < K; ++k) diag(k) = -std::arg(lam(k));
    MatrixXcd h = ces.eigenvectors() * diag.asDiagonal() * ces.eigenvectors().inverse();
    h = 0.5 * (h + h.adjoint().eval());

    std::vector<MatrixXcd> a = mode_operators(K, cutoff);
    const int dim = static_cast<int>(a[0].rows());

    // Quadrature operators in the same ordering as the covariance matrix.
    std::vector<MatrixXcd> r(2 * K);
    const double isq2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < K; ++j) {
        r[2 * j] = (a[j] + a[j].adjoint()) * isq2;
        r[2 * j + 1] = complex(0.0, -1.0) * (a[j] - a[j].adjoint()) * isq2;
    }

    MatrixXcd HP = MatrixXcd::Zero(dim, dim);
    for (int p = 0; p < 2 * K; ++p)
        for (int q = 0; q < 2 * K; ++q)
            if (GP(p, q) != 0.0)
                HP += 0.25 * GP(p, q) * (r[p] * r[q] + r[q] * r[p]);
    MatrixXcd UP = exp_i_hermitian(-HP);

    MatrixXcd HO = MatrixXcd::Zero(dim, dim);
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q)
            HO += h(p, q) * a[p].adjoint() * a[q];
    HO = 0.5 * (HO + HO.adjoint().eval());
    MatrixXcd UO = exp_i_hermitian(-HO);

    // Thermal core from the symplectic spectrum.
    MatrixXcd rho = MatrixXcd::Zero(1, 1);
    rho(0, 0) = 1.0;
    for (int j = 0; j < K; ++j) {
        double nb = w.nus(j) - 0.5;
        if (nb < 0.0) nb = 0.0;
        MatrixXcd th = MatrixXcd::Zero(cutoff, cutoff);
        if (nb < 1e-14) {
            th(0, 0) = 1.0;
        } else {
            double x = nb / (1.0 + nb);
            double p = 1.0 / (1.0 + nb);
            for (int n = 0; n < cutoff; ++n) {
                th(n, n) = p;
                p *= x;
            }
        }
        rho = kron(rho, th);
    }

    MatrixXcd U = UO * UP;
    rho = U * rho * U.adjoint();

    if (s.mean.norm() > 0.0) {
        MatrixXcd B = MatrixXcd::Zero(dim, dim);
        for (int j = 0; j < K; ++j) {
            complex alpha(s.mean(2 * j) * isq2, s.mean(2 * j + 1) * isq2);
            B += complex(0.0, -1.0) * (alpha * a[j].adjoint() - std::conj(alpha) * a[j]);
        }
        MatrixXcd Dop = exp_i_hermitian(B);
        rho = Dop * rho * Dop.adjoint();
    }
    return rho;
}

inline MatrixXcd hermitian_sqrt(const MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    VectorXd ev = es.eigenvalues();
    for (int k = 0; k < ev.size(); ++k)
        if (ev(k) < 0.0) ev(k) = 0.0;
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal().toDenseMatrix().cast<complex>() *
           es.eigenvectors().adjoint();
}

}  // namespace fock_detail

// Uhlmann fidelity evaluated in a truncated number basis. Throws when the
// truncation loses more than 1e-6 of either trace.
inline double fock_fidelity_oracle(const GaussianState& s1, const GaussianState& s2, int cutoff) {
    if (s1.n_modes != s2.n_modes)
        throw std::invalid_argument("states must have the same number of modes");
    if (s1.n_modes < 1 || s1.n_modes > 2)
        throw std::invalid_argument("oracle supports one or two modes");
    if (cutoff < 2) throw std::invalid_argument("cutoff must be at least 2");

    using namespace fock_detail;
    MatrixXcd r1 = density_matrix(s1, cutoff);
    MatrixXcd r2 = density_matrix(s2, cutoff);
    double tr1 = r1.trace().real();
    double tr2 = r2.trace().real();
    if (tr1 < 1.0 - 1e-6 || tr2 < 1.0 - 1e-6)
        throw std::runtime_error("cutoff too small: truncated traces " + std::to_string(tr1) +
                                 ", " + std::to_string(tr2));

    MatrixXcd sq = hermitian_sqrt(r1);
    MatrixXcd m = sq * r2 * sq;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    double f = 0.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        double ev = es.eigenvalues()(k);
        if (ev > 0.0) f += std::sqrt(ev);
    }
    return f * f;
}

}  // namespace oamem
