#pragma once

#include "qbell/common.hpp"
#include "qbell/qlinalg.hpp"

#include <vector>

namespace qbell::criteria {

enum class Side { A, B };

// Product operator basis: on A the element with flat index i is X^{floor(i/dA)} Z^{i mod dA};
// on B it is X^{floor(j/dB)} Z^{-(j mod dB)}.  Index 0 is the identity on either side and
// Tr(B_i^dag B_j) = d * delta_ij.
inline CMat basis_operator(const BipartiteDims& dims, Side side, int i) {
    const int d = (side == Side::A) ? dims.dA : dims.dB;
    require(i >= 0 && i < d * d, "basis operator index out of range");
    const int xpow = i / d;
    const int zpow = (side == Side::A) ? (i % d) : mod(-(i % d), d);
    return qlinalg::hw_operator(d, xpow, zpow);
}

struct CorrelationMatrix {
    BipartiteDims dims;
    CMat c;  // dA^2 x dB^2, entry (i,j) = Tr((B_i^A (x) B_j^B)^dag rho)
};

inline CorrelationMatrix correlation_matrix(const CMat& rho, const BipartiteDims& dims) {
    const int dA = dims.dA, dB = dims.dB, D = dims.total();
    require(rho.rows() == D && rho.cols() == D, "state size does not match dimensions");
    std::vector<CMat> bb(dB * dB);
    for (int j = 0; j < dB * dB; ++j) bb[j] = basis_operator(dims, Side::B, j);
    // Contract the B side first: s_j(a2,a1) = sum_{b2,b1} conj(B_j(b2,b1)) rho(a2*dB+b2, a1*dB+b1).
    std::vector<CMat> sj(dB * dB, CMat(dA, dA));
    for (int j = 0; j < dB * dB; ++j)
        for (int a2 = 0; a2 < dA; ++a2)
            for (int a1 = 0; a1 < dA; ++a1) {
                cplx acc = 0.0;
                for (int b2 = 0; b2 < dB; ++b2)
                    for (int b1 = 0; b1 < dB; ++b1)
                        acc += std::conj(bb[j](b2, b1)) * rho(a2 * dB + b2, a1 * dB + b1);
                sj[j](a2, a1) = acc;
            }
    CMat c(dA * dA, dB * dB);
    for (int i = 0; i < dA * dA; ++i) {
        const CMat ba = basis_operator(dims, Side::A, i);
        for (int j = 0; j < dB * dB; ++j) {
            cplx acc = 0.0;
            for (int a2 = 0; a2 < dA; ++a2)
                for (int a1 = 0; a1 < dA; ++a1) acc += std::conj(ba(a2, a1)) * sj[j](a2, a1);
            c(i, j) = acc;
        }
    }
    return {dims, std::move(c)};
}

inline CMat reconstruct_from_correlations(const CorrelationMatrix& C) {
    const int dA = C.dims.dA, dB = C.dims.dB, D = C.dims.total();
    CMat rho = CMat::Zero(D, D);
    for (int i = 0; i < dA * dA; ++i) {
        const CMat ba = basis_operator(C.dims, Side::A, i);
        for (int j = 0; j < dB * dB; ++j) {
            if (std::abs(C.c(i, j)) < 1e-15) continue;
            rho.noalias() += C.c(i, j) * qlinalg::kron(ba, basis_operator(C.dims, Side::B, j));
        }
    }
    return rho / static_cast<double>(D);
}

inline double ssc_bound(const BipartiteDims& dims, double x, double y) {
    return std::sqrt(dims.dA - 1.0 + x * x) * std::sqrt(dims.dB - 1.0 + y * y);
}

// D_x C D_y with D_x = diag(x,1,...,1): scales the identity row/column of C.
inline CMat scaled_correlations(const CorrelationMatrix& C, double x, double y) {
    CMat m = C.c;
    m.row(0) *= x;
    m.col(0) *= y;
    return m;
}

struct SSCResult {
    double x = 0.0, y = 0.0;
    double bound = 0.0;  // R(x,y)
    double norm = 0.0;   // ||D_x C D_y||_1
    double g = 0.0;      // bound - norm; negative => entangled
};

inline SSCResult ssc_value(const CorrelationMatrix& C, double x, double y) {
    require(x >= 0.0 && y >= 0.0, "scaling parameters must be nonnegative");
    SSCResult r;
    r.x = x;
    r.y = y;
    r.bound = ssc_bound(C.dims, x, y);
    r.norm = qlinalg::trace_norm(scaled_correlations(C, x, y));
    r.g = r.bound - r.norm;
    return r;
}

struct CcnrResult {
    double value = 0.0;
    double threshold = 0.0;
    bool detected = false;
};

inline CcnrResult ccnr_from_correlations(const CorrelationMatrix& C) {
    CcnrResult r;
    r.value = qlinalg::trace_norm(C.c);
    r.threshold = std::sqrt(static_cast<double>(C.dims.total()));
    r.detected = r.value > r.threshold + kDetectSlack;
    return r;
}

inline CcnrResult ccnr(const CMat& rho, const BipartiteDims& dims) {
    return ccnr_from_correlations(correlation_matrix(rho, dims));
}

inline CcnrResult de_vicente_from_correlations(const CorrelationMatrix& C) {
    CcnrResult r;
    r.value = qlinalg::trace_norm(scaled_correlations(C, 0.0, 0.0));
    r.threshold = std::sqrt((C.dims.dA - 1.0) * (C.dims.dB - 1.0));
    r.detected = r.value > r.threshold + kDetectSlack;
    return r;
}

inline CcnrResult de_vicente(const CMat& rho, const BipartiteDims& dims) {
    return de_vicente_from_correlations(correlation_matrix(rho, dims));
}

struct PptResult {
    double min_eig = 0.0;
    bool is_ppt = false;
};

inline PptResult ppt_check(const CMat& rho, const BipartiteDims& dims) {
    PptResult r;
    r.min_eig = qlinalg::min_eigenvalue_hermitian(qlinalg::partial_transpose(rho, dims));
    r.is_ppt = r.min_eig >= -kTol;
    return r;
}

}  // namespace qbell::criteria
