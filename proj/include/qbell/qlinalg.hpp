#pragma once

#include "qbell/common.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qbell::qlinalg {

// Shift operator X |i> = |i+1 mod d>, clock operator Z |i> = w^i |i>.
// hw_operator(d, mu, nu) = X^mu Z^nu, with entries (X^mu Z^nu)[(i+mu) mod d][i] = w^{i nu}.
inline CMat hw_operator(int d, int mu, int nu) {
    require(d >= 1, "hw_operator: dimension must be positive");
    CMat m = CMat::Zero(d, d);
    for (int i = 0; i < d; ++i) m(mod(i + mu, d), i) = root_of_unity(d, static_cast<long long>(i) * nu);
    return m;
}

// Clock operator on a dA-dim space that uses the dB-th root of unity:
// modified_clock(dA, dB, nu) |i> = w_B^{i nu} |i>, i < dA.
inline CMat modified_clock(int dA, int dB, int nu) {
    require(dA >= 1 && dB >= 1, "modified_clock: dimensions must be positive");
    CMat m = CMat::Zero(dA, dA);
    for (int i = 0; i < dA; ++i) m(i, i) = root_of_unity(dB, static_cast<long long>(i) * nu);
    return m;
}

inline CMat kron(const CMat& a, const CMat& b) { return Eigen::kroneckerProduct(a, b); }

// Sum of singular values.  Direct SVD: a Gram-matrix shortcut squares the condition
// number and turns exact-zero singular values into sqrt(eps) ~ 1e-8 noise, which is
// too coarse for the separability margins asserted elsewhere.
inline double trace_norm(const CMat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues().sum();
}

// Fast lower bound on the trace norm via the Gram spectrum; accurate to ~1e-8
// absolute, used only for screening decisions with much larger margins.
inline double trace_norm_gram(const CMat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    const CMat g = (m.rows() <= m.cols()) ? CMat(m * m.adjoint()) : CMat(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        s += std::sqrt(std::max(0.0, es.eigenvalues()[i]));
    return s;
}

// Partial transpose on the first subsystem of a (dA*dB) x (dA*dB) matrix.
inline CMat partial_transpose(const CMat& m, const BipartiteDims& dims) {
    const int dA = dims.dA, dB = dims.dB, D = dims.total();
    require(m.rows() == D && m.cols() == D, "partial_transpose: matrix size does not match dimensions");
    CMat out(D, D);
    for (int i = 0; i < dA; ++i)
        for (int k = 0; k < dA; ++k)
            out.block(k * dB, i * dB, dB, dB) = m.block(i * dB, k * dB, dB, dB);
    return out;
}

// Smallest eigenvalue of a Hermitian matrix.  Inputs within 1e-10 of Hermitian are
// symmetrized first; anything farther is rejected.
inline double min_eigenvalue_hermitian(const CMat& m) {
    require(m.rows() == m.cols(), "min_eigenvalue_hermitian: matrix must be square");
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kTol) throw std::invalid_argument("min_eigenvalue_hermitian: matrix is not Hermitian");
    CMat h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double max_abs_imag_diag(const CMat& m) {
    double v = 0.0;
    for (int i = 0; i < m.rows(); ++i) v = std::max(v, std::abs(m(i, i).imag()));
    return v;
}

}  // namespace qbell::qlinalg
