#pragma once

#include "qbell/common.hpp"
#include "qbell/qlinalg.hpp"

#include <optional>
#include <vector>

namespace qbell::bds {

// Bell-basis probability distribution p_{alpha beta}, entries clamped at -clamp_tol.
struct ProbabilityMatrix {
    BipartiteDims dims;
    RMat p;
};

inline ProbabilityMatrix make_probability_matrix(const BipartiteDims& dims, RMat p,
                                                 double clamp_tol = 1e-12) {
    require(p.rows() == dims.dA && p.cols() == dims.dB,
            "probability matrix shape does not match dimensions");
    double sum = 0.0;
    for (int a = 0; a < dims.dA; ++a)
        for (int b = 0; b < dims.dB; ++b) {
            double& v = p(a, b);
            if (v < -clamp_tol) throw std::invalid_argument("negative probability entry");
            if (v < 0.0) v = 0.0;
            sum += v;
        }
    require(std::abs(sum - 1.0) <= kTol, "probabilities do not sum to 1");
    return {dims, std::move(p)};
}

inline ProbabilityMatrix uniform_probabilities(const BipartiteDims& dims) {
    return {dims, RMat::Constant(dims.dA, dims.dB, 1.0 / dims.total())};
}

inline ProbabilityMatrix point_mass(const BipartiteDims& dims, int alpha, int beta) {
    require(alpha >= 0 && alpha < dims.dA && beta >= 0 && beta < dims.dB,
            "point mass index out of range");
    RMat p = RMat::Zero(dims.dA, dims.dB);
    p(alpha, beta) = 1.0;
    return {dims, std::move(p)};
}

// Two-qubit isotropic family: probability q/3 on (0,0),(0,1),(1,0) and 1-q on (1,1).
inline ProbabilityMatrix werner_probabilities(double q) {
    require(q >= 0.0 && q <= 1.0, "werner parameter must lie in [0,1]");
    RMat p(2, 2);
    p << q / 3, q / 3, q / 3, 1.0 - q;
    return {BipartiteDims(2, 2), std::move(p)};
}

// Fourier coefficients lambda_{mu nu} of a probability matrix.  The constructor
// enforces the structural reality conditions (lambda_00 = 1 and conjugate symmetry);
// the magnitude bound |lambda| <= 1 is a checked property (see toeplitz_necessary_check,
// whose r=2 blocks encode exactly that bound), not a construction-time rejection,
// so that out-of-range inputs can be fed to the checker.
struct FourierMatrix {
    BipartiteDims dims;
    CMat lambda;
};

inline FourierMatrix make_fourier_matrix(const BipartiteDims& dims, CMat lambda) {
    require(lambda.rows() == dims.dA && lambda.cols() == dims.dB,
            "fourier matrix shape does not match dimensions");
    require(std::abs(lambda(0, 0) - cplx(1.0, 0.0)) <= kTol,
            "fourier matrix must have entry (0,0) equal to 1");
    for (int m = 0; m < dims.dA; ++m)
        for (int n = 0; n < dims.dB; ++n) {
            const cplx mirror = std::conj(lambda(mod(-m, dims.dA), mod(-n, dims.dB)));
            require(std::abs(lambda(m, n) - mirror) <= kTol,
                    "fourier matrix violates conjugate symmetry");
        }
    return {dims, std::move(lambda)};
}

inline CMat dft_phases(int rows, int cols, int root_dim, int sign) {
    CMat f(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            f(r, c) = root_of_unity(root_dim, static_cast<long long>(sign) * r * c);
    return f;
}

inline FourierMatrix fourier_from_probabilities(const ProbabilityMatrix& P) {
    const auto& d = P.dims;
    const CMat fa = dft_phases(d.dA, d.dA, d.dA, +1);
    const CMat fb = dft_phases(d.dB, d.dB, d.dB, +1);
    CMat lambda = fa * P.p.cast<cplx>() * fb.transpose();
    return make_fourier_matrix(d, std::move(lambda));
}

inline ProbabilityMatrix probabilities_from_fourier(const FourierMatrix& L) {
    const auto& d = L.dims;
    const CMat ga = dft_phases(d.dA, d.dA, d.dA, -1);
    const CMat gb = dft_phases(d.dB, d.dB, d.dB, -1);
    const CMat m = (ga * L.lambda * gb.transpose()) / static_cast<double>(d.total());
    RMat p(d.dA, d.dB);
    for (int a = 0; a < d.dA; ++a)
        for (int b = 0; b < d.dB; ++b) {
            if (std::abs(m(a, b).imag()) > kTol)
                throw std::runtime_error("inverse transform left an imaginary residue");
            if (m(a, b).real() < -kTol)
                throw std::runtime_error("not a valid probability distribution");
            p(a, b) = std::max(0.0, m(a, b).real());
        }
    return make_probability_matrix(d, std::move(p), kTol);
}

inline CVec bell_state(const BipartiteDims& dims, int alpha, int beta) {
    require(alpha >= 0 && alpha < dims.dA && beta >= 0 && beta < dims.dB,
            "bell state index out of range");
    CVec v = CVec::Zero(dims.total());
    const double amp = 1.0 / std::sqrt(static_cast<double>(dims.dA));
    for (int i = 0; i < dims.dA; ++i)
        v(i * dims.dB + mod(i + beta, dims.dB)) =
            amp * root_of_unity(dims.dA, static_cast<long long>(i) * alpha);
    return v;
}

inline CMat bds_from_probabilities(const ProbabilityMatrix& P) {
    const int D = P.dims.total();
    CMat rho = CMat::Zero(D, D);
    for (int a = 0; a < P.dims.dA; ++a)
        for (int b = 0; b < P.dims.dB; ++b) {
            if (P.p(a, b) == 0.0) continue;
            const CVec v = bell_state(P.dims, a, b);
            rho.noalias() += P.p(a, b) * (v * v.adjoint());
        }
    return rho;
}

namespace detail {

// Projector onto the contiguous index window of A that avoids wraparound when the
// A side is shifted by the signed offset m.
inline CMat range_projector(int dA, int m) {
    CMat pr = CMat::Zero(dA, dA);
    const int lo = (m >= 0) ? 0 : -m;
    const int hi = (m >= 0) ? dA - 1 - m : dA - 1;
    for (int i = lo; i <= hi; ++i) pr(i, i) = 1.0;
    return pr;
}

}  // namespace detail

// Operator-basis synthesis of the state from its Fourier coefficients.  The sum runs
// over the signed A-side index offset m, restricted by a range projector so that shifts
// never wrap the shorter side; for dA = dB the two windows of each residue class merge
// and the familiar sum over X^mu Ztilde^nu (x) X^mu Z^-nu is recovered.
inline CMat bds_from_fourier(const FourierMatrix& L) {
    const int dA = L.dims.dA, dB = L.dims.dB;
    const int D = L.dims.total();
    CMat rho = CMat::Zero(D, D);
    for (int m = -(dA - 1); m <= dA - 1; ++m) {
        const CMat shift_window =
            qlinalg::hw_operator(dA, mod(m, dA), 0) * detail::range_projector(dA, m);
        const CMat xb = qlinalg::hw_operator(dB, mod(m, dB), 0);
        for (int n = 0; n < dB; ++n) {
            const cplx coeff = L.lambda(mod(m, dA), n);
            if (std::abs(coeff) < 1e-15) continue;
            const CMat aop = shift_window * qlinalg::modified_clock(dA, dB, n);
            const CMat bop = xb * qlinalg::hw_operator(dB, 0, mod(-n, dB));
            rho.noalias() += coeff * qlinalg::kron(aop, bop);
        }
    }
    return rho / static_cast<double>(D);
}

// Weights expanding the dB-root clock on the A side over the native dA-root clocks:
// sum_kappa s_{kappa nu} Z_A^kappa = Ztilde^nu.  For dA = dB this is the Kronecker
// delta on kappa = nu mod d.
struct HWDecomposition {
    BipartiteDims dims;
    CMat s;
    FourierMatrix lambda;
};

inline HWDecomposition hw_full_decomposition(const ProbabilityMatrix& P) {
    const auto& d = P.dims;
    CMat s(d.dA, d.dB);
    for (int kappa = 0; kappa < d.dA; ++kappa)
        for (int nu = 0; nu < d.dB; ++nu) {
            cplx acc = 0.0;
            for (int j = 0; j < d.dA; ++j)
                acc += root_of_unity(d.dA, -static_cast<long long>(kappa) * j) *
                       root_of_unity(d.dB, static_cast<long long>(nu) * j);
            s(kappa, nu) = acc / static_cast<double>(d.dA);
        }
    return {d, std::move(s), fourier_from_probabilities(P)};
}

inline CMat reconstruct(const HWDecomposition& dec) { return bds_from_fourier(dec.lambda); }

// Projection onto the Bell-diagonal subspace: keeps the Bell-basis diagonal of rho.
inline CMat bell_projection(const CMat& rho, const BipartiteDims& dims) {
    const int D = dims.total();
    require(rho.rows() == D && rho.cols() == D, "state size does not match dimensions");
    CMat out = CMat::Zero(D, D);
    for (int a = 0; a < dims.dA; ++a)
        for (int b = 0; b < dims.dB; ++b) {
            const CVec v = bell_state(dims, a, b);
            const cplx w = (v.adjoint() * rho * v)(0, 0);
            out.noalias() += w * (v * v.adjoint());
        }
    return out;
}

inline ProbabilityMatrix bell_diagonal_probabilities(const CMat& rho, const BipartiteDims& dims) {
    RMat p(dims.dA, dims.dB);
    for (int a = 0; a < dims.dA; ++a)
        for (int b = 0; b < dims.dB; ++b) {
            const CVec v = bell_state(dims, a, b);
            p(a, b) = (v.adjoint() * rho * v)(0, 0).real();
        }
    return make_probability_matrix(dims, std::move(p), 1e-9);
}

// Interpolated twirl: (1-q) rho + q * bell_projection(rho).
inline CMat twirl_channel(const CMat& rho, const BipartiteDims& dims, double q) {
    require(q >= 0.0 && q <= 1.0, "twirl parameter must lie in [0,1]");
    const int D = dims.total();
    require(rho.rows() == D && rho.cols() == D, "state size does not match dimensions");
    if (q == 0.0) return rho;
    CMat proj = bell_projection(rho, dims);
    if (q == 1.0) return proj;
    return (1.0 - q) * rho + q * proj;
}

namespace detail {

// Average over the unitary family X^mu Ztilde^nu (x) X^mu Z^-nu.  For dA = dB this
// equals bell_projection; for dA < dB it is a different (still non-entangling,
// mixture-of-unitaries) channel and no longer projects onto the Bell diagonal.
inline CMat hw_twirl_average(const CMat& rho, const BipartiteDims& dims) {
    const int D = dims.total();
    CMat out = CMat::Zero(D, D);
    for (int mu = 0; mu < dims.dA; ++mu)
        for (int nu = 0; nu < dims.dB; ++nu) {
            const CMat t = qlinalg::kron(
                qlinalg::hw_operator(dims.dA, mu, 0) * qlinalg::modified_clock(dims.dA, dims.dB, nu),
                qlinalg::hw_operator(dims.dB, mu % dims.dB, 0) *
                    qlinalg::hw_operator(dims.dB, 0, mod(-nu, dims.dB)));
            out.noalias() += t * rho * t.adjoint();
        }
    return out / static_cast<double>(D);
}

}  // namespace detail

struct ToeplitzReport {
    bool pass = true;
    bool has_failure = false;
    int fA = 0, fB = 0, r = 0;
    double min_eig = 0.0;
};

// Herglotz-type necessary condition: every Toeplitz block built from the
// coefficients along a (fA, fB) direction must be PSD.  Necessity saturates at
// finite depth, so the default r_max is dA*dB.
inline ToeplitzReport toeplitz_necessary_check(const FourierMatrix& L, int r_max = 0) {
    const auto& d = L.dims;
    if (r_max <= 0) r_max = d.total();
    require(r_max >= 2, "toeplitz check depth must be at least 2");
    ToeplitzReport rep;
    for (int fA = 0; fA < d.dA; ++fA)
        for (int fB = 0; fB < d.dB; ++fB)
            for (int r = 2; r <= r_max; ++r) {
                CMat t(r, r);
                for (int mu = 0; mu < r; ++mu)
                    for (int nu = 0; nu < r; ++nu)
                        t(mu, nu) = L.lambda(mod(static_cast<long long>(mu - nu) * fA, d.dA),
                                             mod(static_cast<long long>(mu - nu) * fB, d.dB));
                const double e = qlinalg::min_eigenvalue_hermitian(t);
                if (e < -kTol) {
                    rep.pass = false;
                    rep.has_failure = true;
                    rep.fA = fA;
                    rep.fB = fB;
                    rep.r = r;
                    rep.min_eig = e;
                    return rep;
                }
            }
    return rep;
}

inline double ccnr_value_equal_dims(const FourierMatrix& L) {
    require(L.dims.equal(), "coefficient-sum form requires equal local dimensions");
    return L.lambda.cwiseAbs().sum();
}

}  // namespace qbell::bds
