#pragma once

#include "qbell/common.hpp"
#include "qbell/criteria.hpp"
#include "qbell/parallel.hpp"
#include "qbell/qlinalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <optional>
#include <random>
#include <vector>

namespace qbell::witness {

struct Isometry {
    BipartiteDims dims;
    CMat u;            // dA^2 x dB^2
    bool full = true;  // true: U U^dag = 1; false: sparse relaxation with ||U||_inf <= 1
};

// Minimizer of Re Tr(D_y U^dag D_x C) over isometries: U = -(svd U factor)(svd V factor)^dag,
// reaching -||D_x C D_y||_1.
inline Isometry optimal_isometry(const criteria::CorrelationMatrix& C, double x, double y) {
    require(x >= 0.0 && y >= 0.0, "scaling parameters must be nonnegative");
    const CMat m = criteria::scaled_correlations(C, x, y);
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {C.dims, -(svd.matrixU() * svd.matrixV().adjoint()), true};
}

struct WitnessOperator {
    BipartiteDims dims;
    double x = 1.0, y = 1.0;
    CMat w;            // coefficient matrix, dA^2 x dB^2
    CMat matrix_form;  // Hermitian operator on the joint space
};

inline WitnessOperator build_witness(const CMat& u, const BipartiteDims& dims, double x, double y) {
    require(u.rows() == dims.dA * dims.dA && u.cols() == dims.dB * dims.dB,
            "isometry shape does not match dimensions");
    WitnessOperator W;
    W.dims = dims;
    W.x = x;
    W.y = y;
    W.w = u;
    for (int i = 1; i < W.w.rows(); ++i) W.w(i, 0) *= y;
    for (int j = 1; j < W.w.cols(); ++j) W.w(0, j) *= x;
    W.w(0, 0) = x * y * u(0, 0) + criteria::ssc_bound(dims, x, y);
    const int D = dims.total();
    CMat t = CMat::Zero(D, D);
    for (int i = 0; i < W.w.rows(); ++i) {
        CMat ba;
        for (int j = 0; j < W.w.cols(); ++j) {
            if (std::abs(W.w(i, j)) < 1e-15) continue;
            if (ba.size() == 0) ba = criteria::basis_operator(dims, criteria::Side::A, i);
            t.noalias() +=
                W.w(i, j) * qlinalg::kron(ba, criteria::basis_operator(dims, criteria::Side::B, j));
        }
    }
    W.matrix_form = 0.5 * (t + t.adjoint());
    return W;
}

inline WitnessOperator build_witness(const Isometry& u, double x, double y) {
    return build_witness(u.u, u.dims, x, y);
}

inline double witness_expectation(const WitnessOperator& W, const CMat& rho) {
    require(rho.rows() == W.matrix_form.rows() && rho.cols() == W.matrix_form.cols(),
            "state size does not match witness");
    const cplx t = (W.matrix_form * rho).trace();
    require(std::abs(t.imag()) <= kTol, "witness expectation has an imaginary residue");
    return t.real();
}

// Coefficient-space evaluation: Tr(W rho) = sum_ij Re(conj(w_ij) c_ij).
inline double expectation_from_correlations(const WitnessOperator& W,
                                            const criteria::CorrelationMatrix& C) {
    require(C.dims == W.dims, "correlation dimensions do not match witness");
    double acc = 0.0;
    for (int i = 0; i < W.w.rows(); ++i)
        for (int j = 0; j < W.w.cols(); ++j)
            acc += (std::conj(W.w(i, j)) * C.c(i, j)).real();
    return acc;
}

inline CMat noisy_state(const CMat& rho, const BipartiteDims& dims, double eps) {
    require(eps >= 0.0 && eps <= 1.0, "noise fraction must lie in [0,1]");
    const int D = dims.total();
    return (1.0 - eps) * rho + (eps / D) * CMat::Identity(D, D);
}

namespace detail {

// White noise acts on correlations as C_eps = (1-eps) C + eps E00, so a scan can reuse
// one correlation matrix for every (x, y, eps).
inline double noisy_ssc_g(const CMat& m0, const BipartiteDims& dims, double x, double y,
                          double eps) {
    CMat m = (1.0 - eps) * m0;
    m(0, 0) += eps * x * y;
    return criteria::ssc_bound(dims, x, y) - qlinalg::trace_norm(m);
}

}  // namespace detail

inline double noise_threshold_from_correlations(const criteria::CorrelationMatrix& C, double x,
                                                double y, double tol = 1e-5) {
    require(tol > 0.0, "bisection tolerance must be positive");
    const CMat m0 = criteria::scaled_correlations(C, x, y);
    const auto detected = [&](double eps) {
        return detail::noisy_ssc_g(m0, C.dims, x, y, eps) < 0.0;
    };
    if (!detected(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    if (detected(1.0)) return 1.0;
    for (int it = 0; it < 64 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        (detected(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double noise_threshold(const CMat& rho, const BipartiteDims& dims, double x, double y,
                              double tol = 1e-5) {
    return noise_threshold_from_correlations(criteria::correlation_matrix(rho, dims), x, y, tol);
}

// Post-hoc check of the bisection assumption that detection holds exactly on [0, eps_max):
// samples n equispaced eps values and compares the sign of g against the threshold.
inline bool detection_interval_consistent(const criteria::CorrelationMatrix& C, double x, double y,
                                          double eps_max, double tol = 1e-5, int n = 20) {
    const CMat m0 = criteria::scaled_correlations(C, x, y);
    for (int i = 0; i < n; ++i) {
        const double eps = (i + 0.5) / n;
        const bool det = detail::noisy_ssc_g(m0, C.dims, x, y, eps) < 0.0;
        if (eps < eps_max - tol && !det) return false;
        if (eps > eps_max + tol && det) return false;
    }
    return true;
}

struct GridSpec {
    double lo = 0.0, hi = 2.0;
    int steps = 200;  // number of subdivisions; samples = steps + 1, endpoints inclusive

    double at(int i) const { return lo + (hi - lo) * i / steps; }
    int samples() const { return steps + 1; }
};

struct NoiseScan {
    GridSpec gx, gy;
    std::vector<double> xs, ys;   // flattened grid, x-major
    std::vector<double> eps_max;  // matching threshold values
    double max_eps = 0.0;
    std::vector<std::pair<double, double>> argmax_set;  // within 1e-4 of the maximum
    std::vector<std::pair<double, double>> boundary;    // undetected points adjacent to detected ones
};

inline NoiseScan scan_noise_threshold(const CMat& rho, const BipartiteDims& dims, GridSpec gx,
                                      GridSpec gy, double tol = 1e-5,
                                      int workers = default_workers()) {
    require(gx.steps >= 1 && gy.steps >= 1, "grid must have at least two samples per axis");
    const auto C = criteria::correlation_matrix(rho, dims);
    NoiseScan scan;
    scan.gx = gx;
    scan.gy = gy;
    const int nx = gx.samples(), ny = gy.samples();
    const long long total = static_cast<long long>(nx) * ny;
    scan.xs.resize(total);
    scan.ys.resize(total);
    scan.eps_max.resize(total);
    parallel_ranges(total, workers, [&](int, long long begin, long long end) {
        for (long long t = begin; t < end; ++t) {
            const int ix = static_cast<int>(t / ny), iy = static_cast<int>(t % ny);
            scan.xs[t] = gx.at(ix);
            scan.ys[t] = gy.at(iy);
            scan.eps_max[t] = noise_threshold_from_correlations(C, scan.xs[t], scan.ys[t], tol);
        }
    });
    scan.max_eps = *std::max_element(scan.eps_max.begin(), scan.eps_max.end());
    if (scan.max_eps > 0.0)
        for (long long t = 0; t < total; ++t)
            if (scan.eps_max[t] >= scan.max_eps - 1e-4)
                scan.argmax_set.emplace_back(scan.xs[t], scan.ys[t]);
    for (long long t = 0; t < total; ++t) {
        if (scan.eps_max[t] > 0.0) continue;
        const int ix = static_cast<int>(t / ny), iy = static_cast<int>(t % ny);
        const long long nbs[4] = {t - ny, t + ny, t - 1, t + 1};
        const bool valid[4] = {ix > 0, ix < nx - 1, iy > 0, iy < ny - 1};
        for (int k = 0; k < 4; ++k)
            if (valid[k] && scan.eps_max[nbs[k]] > 0.0) {
                scan.boundary.emplace_back(scan.xs[t], scan.ys[t]);
                break;
            }
    }
    return scan;
}

// ---------------------------------------------------------------------------
// Sparse witnesses: only l coefficient-matrix entries may be nonzero, subject to
// the operator-norm bound ||U||_inf <= 1.
// ---------------------------------------------------------------------------

struct SparseOptions {
    std::uint64_t seed = 20250823;
    int restarts = 8;
    int iters = 400;
};

namespace detail {

struct FlatEntry {
    int i = 0, j = 0;
    double mag = 0.0;
};

// All positions except (0,0), ordered by decreasing |M|, ties broken by lower flat index.
inline std::vector<FlatEntry> ranked_positions(const CMat& m) {
    std::vector<FlatEntry> v;
    v.reserve(m.rows() * m.cols() - 1);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if (i == 0 && j == 0) continue;
            v.push_back({i, j, std::abs(m(i, j))});
        }
    std::stable_sort(v.begin(), v.end(), [&](const FlatEntry& a, const FlatEntry& b) {
        if (a.mag != b.mag) return a.mag > b.mag;
        return a.i * static_cast<long long>(m.cols()) + a.j <
               b.i * static_cast<long long>(m.cols()) + b.j;
    });
    return v;
}

inline double spectral_norm(const CMat& u) {
    if (u.rows() == 0 || u.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(u);
    return svd.singularValues()(0);
}

// Minimizes Re<M, U> = sum_p Re(M_p conj(U_p)) over matrices supported on the given
// positions with spectral norm at most 1.  The support is split into connected
// components of its bipartite row/column graph; single-row or single-column
// components have the closed-form optimum -||m||_2, the rest run projected descent
// with radial retraction (scale by 1/||U||_inf when the bound is violated).
struct SparseSolution {
    double value = 0.0;  // min of Re<M, U>
    CMat u;              // full-size optimizer, zero off support
};

inline SparseSolution optimize_support(const CMat& m, const std::vector<FlatEntry>& support,
                                       const SparseOptions& opts, const CMat* warm_start) {
    const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
    SparseSolution sol;
    sol.u = CMat::Zero(rows, cols);
    if (support.empty()) return sol;

    // Union-find over row nodes [0, rows) and column nodes [rows, rows+cols).
    std::vector<int> parent(rows + cols);
    for (int i = 0; i < rows + cols; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& e : support) parent[find(e.i)] = find(rows + e.j);

    std::vector<int> roots;
    for (const auto& e : support) {
        const int r = find(e.i);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }

    std::mt19937_64 rng(opts.seed);
    for (const int root : roots) {
        std::vector<FlatEntry> comp;
        for (const auto& e : support)
            if (find(e.i) == root) comp.push_back(e);
        bool one_row = true, one_col = true;
        for (const auto& e : comp) {
            one_row = one_row && e.i == comp[0].i;
            one_col = one_col && e.j == comp[0].j;
        }
        if (one_row || one_col) {
            double n2 = 0.0;
            for (const auto& e : comp) n2 += std::norm(m(e.i, e.j));
            const double nrm = std::sqrt(n2);
            if (nrm > 0.0)
                for (const auto& e : comp) sol.u(e.i, e.j) = -m(e.i, e.j) / nrm;
            sol.value -= nrm;
            continue;
        }

        // Compact the component onto its own row/column index sets.
        std::vector<int> rmap, cmap;
        for (const auto& e : comp) {
            if (std::find(rmap.begin(), rmap.end(), e.i) == rmap.end()) rmap.push_back(e.i);
            if (std::find(cmap.begin(), cmap.end(), e.j) == cmap.end()) cmap.push_back(e.j);
        }
        const int p = static_cast<int>(rmap.size()), q = static_cast<int>(cmap.size());
        CMat mc = CMat::Zero(p, q);
        std::vector<std::pair<int, int>> cells;
        for (const auto& e : comp) {
            const int a = static_cast<int>(std::find(rmap.begin(), rmap.end(), e.i) - rmap.begin());
            const int b = static_cast<int>(std::find(cmap.begin(), cmap.end(), e.j) - cmap.begin());
            mc(a, b) = m(e.i, e.j);
            cells.emplace_back(a, b);
        }
        const double mf = mc.norm();

        const auto project = [&](CMat& u) {
            const double s = spectral_norm(u);
            if (s > 1.0) u /= s;
        };
        const auto objective = [&](const CMat& u) {
            double acc = 0.0;
            for (const auto& [a, b] : cells) acc += (mc(a, b) * std::conj(u(a, b))).real();
            return acc;
        };
        const auto descend = [&](CMat u) {
            project(u);
            double best = objective(u);
            CMat best_u = u;
            for (int t = 0; t < opts.iters; ++t) {
                const double eta = 2.0 / (mf * std::pow(1.0 + t, 0.7));
                for (const auto& [a, b] : cells) u(a, b) -= eta * mc(a, b);
                project(u);
                const double v = objective(u);
                if (v < best) {
                    best = v;
                    best_u = u;
                }
            }
            return std::make_pair(best, best_u);
        };

        double best = 0.0;
        CMat best_u = CMat::Zero(p, q);
        std::vector<CMat> starts;
        if (warm_start) {
            CMat w0 = CMat::Zero(p, q);
            for (size_t ci = 0; ci < cells.size(); ++ci)
                w0(cells[ci].first, cells[ci].second) = (*warm_start)(comp[ci].i, comp[ci].j);
            starts.push_back(std::move(w0));
        }
        CMat phase_start = CMat::Zero(p, q);
        for (const auto& [a, b] : cells)
            if (std::abs(mc(a, b)) > 0.0) phase_start(a, b) = -mc(a, b) / std::abs(mc(a, b));
        starts.push_back(phase_start);
        starts.push_back(-mc / std::max(1e-30, spectral_norm(mc)));
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int r = 0; r < opts.restarts; ++r) {
            CMat u = CMat::Zero(p, q);
            for (const auto& [a, b] : cells) u(a, b) = cplx(unif(rng), unif(rng));
            starts.push_back(std::move(u));
        }
        for (const auto& s : starts) {
            auto [v, u] = descend(s);
            if (v < best) {
                best = v;
                best_u = std::move(u);
            }
        }
        for (size_t ci = 0; ci < cells.size(); ++ci)
            sol.u(comp[ci].i, comp[ci].j) = best_u(cells[ci].first, cells[ci].second);
        sol.value += best;
    }
    return sol;
}

}  // namespace detail

struct SparseWitness {
    WitnessOperator witness;
    double value = 0.0;
    std::vector<std::pair<int, int>> support;
};

inline std::optional<SparseWitness> sparse_witness(const CMat& rho, const BipartiteDims& dims,
                                                   double x, double y, int l,
                                                   const SparseOptions& opts = {}) {
    const int max_l = dims.dA * dims.dA * dims.dB * dims.dB - 1;
    require(l >= 1 && l <= max_l, "sparse witness size out of range");
    const auto C = criteria::correlation_matrix(rho, dims);
    const CMat m = criteria::scaled_correlations(C, x, y);
    const double bound = criteria::ssc_bound(dims, x, y);
    auto ranked = detail::ranked_positions(m);
    ranked.resize(l);
    double reach = 0.0;
    for (const auto& e : ranked) reach += e.mag;
    if (bound - reach >= 0.0) return std::nullopt;  // no admissible U can reach below zero
    const auto sol = detail::optimize_support(m, ranked, opts, nullptr);
    const double value = bound + sol.value;
    if (!(value < -1e-8)) return std::nullopt;
    SparseWitness out;
    out.witness = build_witness(sol.u, dims, x, y);
    out.value = value;
    for (const auto& e : ranked) out.support.emplace_back(e.i, e.j);
    return out;
}

struct FiltrationMap {
    GridSpec gx, gy;
    std::vector<double> xs, ys;
    std::vector<int> min_l;  // smallest detecting l per grid point; 0 = undetected
    int l_max = 0;
};

inline FiltrationMap measurement_filtration(const CMat& rho, const BipartiteDims& dims, GridSpec gx,
                                            GridSpec gy, int l_max,
                                            const SparseOptions& opts = {},
                                            int workers = default_workers()) {
    require(l_max >= 1, "filtration requires l_max >= 1");
    l_max = std::min(l_max, dims.dA * dims.dA * dims.dB * dims.dB - 1);
    const auto C = criteria::correlation_matrix(rho, dims);
    FiltrationMap fm;
    fm.gx = gx;
    fm.gy = gy;
    fm.l_max = l_max;
    const int nx = gx.samples(), ny = gy.samples();
    const long long total = static_cast<long long>(nx) * ny;
    fm.xs.resize(total);
    fm.ys.resize(total);
    fm.min_l.assign(total, 0);
    parallel_ranges(total, workers, [&](int, long long begin, long long end) {
        for (long long t = begin; t < end; ++t) {
            const int ix = static_cast<int>(t / ny), iy = static_cast<int>(t % ny);
            const double x = gx.at(ix), y = gy.at(iy);
            fm.xs[t] = x;
            fm.ys[t] = y;
            const CMat m = criteria::scaled_correlations(C, x, y);
            const double bound = criteria::ssc_bound(dims, x, y);
            const auto ranked = detail::ranked_positions(m);
            double prefix = 0.0;
            int l_start = 0;
            for (int l = 1; l <= l_max; ++l) {
                prefix += ranked[l - 1].mag;
                if (bound - prefix < 0.0) {
                    l_start = l;
                    break;
                }
            }
            if (l_start == 0) continue;  // not reachable within l_max measurements
            SparseOptions local = opts;
            local.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(t));
            CMat warm;
            bool have_warm = false;
            double carried = 0.0;
            for (int l = l_start; l <= l_max; ++l) {
                std::vector<detail::FlatEntry> support(ranked.begin(), ranked.begin() + l);
                const auto sol = detail::optimize_support(m, support, local,
                                                          have_warm ? &warm : nullptr);
                double value = bound + sol.value;
                if (have_warm) value = std::min(value, carried);  // nesting: more freedom never hurts
                warm = sol.u;
                have_warm = true;
                carried = value;
                if (value < -1e-8) {
                    fm.min_l[t] = l;
                    break;
                }
            }
        }
    });
    return fm;
}

}  // namespace qbell::witness
