#pragma once

#include "qbell/bds.hpp"
#include "qbell/common.hpp"
#include "qbell/criteria.hpp"
#include "qbell/parallel.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>
#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace qbell::search {

struct SupportSet {
    BipartiteDims dims;
    std::vector<std::pair<int, int>> points;  // sorted (alpha, beta) pairs

    int size() const { return static_cast<int>(points.size()); }
};

inline SupportSet make_support_set(const BipartiteDims& dims,
                                   std::vector<std::pair<int, int>> points) {
    require(!points.empty(), "support set must be nonempty");
    std::sort(points.begin(), points.end());
    for (size_t i = 0; i < points.size(); ++i) {
        const auto& [a, b] = points[i];
        require(a >= 0 && a < dims.dA && b >= 0 && b < dims.dB, "support point out of range");
        require(i == 0 || points[i] != points[i - 1], "duplicate support point");
    }
    return {dims, std::move(points)};
}

inline std::uint64_t mask_from_support(const SupportSet& s) {
    std::uint64_t m = 0;
    for (const auto& [a, b] : s.points) m |= 1ULL << (a * s.dims.dB + b);
    return m;
}

inline SupportSet support_from_mask(const BipartiteDims& dims, std::uint64_t mask) {
    std::vector<std::pair<int, int>> pts;
    for (int c = 0; c < dims.total(); ++c)
        if (mask >> c & 1) pts.emplace_back(c / dims.dB, c % dims.dB);
    return make_support_set(dims, std::move(pts));
}

// Named fixture supports used by the CLI builtin registry and the test suite.
inline SupportSet eq21_support() {
    return make_support_set(BipartiteDims(4, 4),
                            {{0, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {3, 2}});
}

inline SupportSet eq27_support() {
    return make_support_set(BipartiteDims(4, 6), {{0, 0},
                                                  {0, 2},
                                                  {1, 0},
                                                  {1, 1},
                                                  {1, 2},
                                                  {1, 4},
                                                  {2, 0},
                                                  {2, 2},
                                                  {3, 3},
                                                  {3, 5}});
}

inline SupportSet eq28_support() {
    return make_support_set(BipartiteDims(4, 6), {{0, 0},
                                                  {0, 4},
                                                  {1, 0},
                                                  {1, 1},
                                                  {1, 2},
                                                  {1, 3},
                                                  {1, 4},
                                                  {2, 0},
                                                  {2, 4},
                                                  {3, 5}});
}

inline bds::ProbabilityMatrix dichotomous_state(const SupportSet& s) {
    RMat p = RMat::Zero(s.dims.dA, s.dims.dB);
    const double w = 1.0 / s.size();
    for (const auto& [a, b] : s.points) p(a, b) = w;
    return bds::make_probability_matrix(s.dims, std::move(p));
}

struct PhaseReport {
    bool holds = true;
    std::vector<std::pair<int, int>> failing;  // displacements with a nonvanishing phase sum
};

// For each displacement, sums the symplectic phases over the support points that the
// displacement maps into the complement.  All sums vanishing forces the partial
// transpose to satisfy (rho^T_A)^2 proportional to rho^T_A, hence PPT.
inline PhaseReport phase_condition_check(const SupportSet& s) {
    require(s.dims.equal(), "the phase condition requires equal local dimensions");
    const int d = s.dims.dA;
    std::vector<char> in(d * d, 0);
    for (const auto& [a, b] : s.points) in[a * d + b] = 1;
    PhaseReport rep;
    for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
            if (mu == 0 && nu == 0) continue;
            cplx acc = 0.0;
            for (const auto& [a, b] : s.points)
                if (!in[mod(a + mu, d) * d + mod(b + nu, d)])
                    acc += root_of_unity(d, static_cast<long long>(a) * nu -
                                                static_cast<long long>(b) * mu);
            if (std::abs(acc) >= kTol) {
                rep.holds = false;
                rep.failing.emplace_back(mu, nu);
            }
        }
    return rep;
}

// Returns k when every nonzero displacement maps exactly k support points outside the
// support; nullopt otherwise.
inline std::optional<int> displacement_homogeneity(const SupportSet& s) {
    const int dA = s.dims.dA, dB = s.dims.dB, n = s.dims.total();
    std::vector<char> in(n, 0);
    for (const auto& [a, b] : s.points) in[a * dB + b] = 1;
    int k = -1;
    long long total_links = 0;
    for (int mu = 0; mu < dA; ++mu)
        for (int nu = 0; nu < dB; ++nu) {
            if (mu == 0 && nu == 0) continue;
            int links = 0;
            for (const auto& [a, b] : s.points)
                if (!in[mod(a + mu, dA) * dB + mod(b + nu, dB)]) ++links;
            total_links += links;
            if (k < 0) k = links;
            if (links != k) return std::nullopt;
        }
    // Counting identity: each (inside, outside) pair is linked by exactly one displacement.
    const long long sz = s.size();
    if (total_links != sz * (n - sz))
        throw std::logic_error("displacement link count violates the pair-counting identity");
    return k;
}

// Closed-form realignment value of a k-homogeneous support of cardinality s in d x d.
inline double ccnr_homogeneous(int d, int s, int k) {
    require(d >= 2 && s >= 1 && k >= 0 && k <= s && s <= d * d,
            "homogeneous family parameters out of range");
    return 1.0 + (static_cast<double>(d) * d - 1.0) * std::sqrt(static_cast<double>(k)) / s;
}

struct DiophantineSolution {
    int d = 0;
    int size = 0;  // |S|
    int k = 0;
    double ccnr_excess = 0.0;  // closed-form CCNR value minus d
};

// Integer solutions of (k - s) d^2 - k + s^2 = 0 with 1 < s < d^2, keeping the smaller
// member of each (support, complement) pair.
inline std::vector<DiophantineSolution> diophantine_solutions(int d_min, int d_max) {
    require(2 <= d_min && d_min <= d_max, "invalid dimension range");
    std::vector<DiophantineSolution> out;
    for (int d = d_min; d <= d_max; ++d) {
        const long long n = static_cast<long long>(d) * d;
        for (long long s = 2; 2 * s <= n; ++s) {
            const long long num = s * (n - s);
            if (num % (n - 1) != 0) continue;
            const long long k = num / (n - 1);
            if (k <= 0) continue;
            if ((k - s) * n - k + s * s != 0)
                throw std::logic_error("diophantine arithmetic inconsistency");
            DiophantineSolution sol;
            sol.d = d;
            sol.size = static_cast<int>(s);
            sol.k = static_cast<int>(k);
            sol.ccnr_excess = ccnr_homogeneous(d, sol.size, sol.k) - d;
            out.push_back(sol);
        }
    }
    return out;
}

// Smallest bit-pattern over all cyclic row shifts x cyclic column shifts.
inline std::uint64_t canonical_mask(std::uint64_t mask, const BipartiteDims& dims) {
    const int dA = dims.dA, dB = dims.dB;
    std::uint64_t best = ~0ULL;
    for (int ra = 0; ra < dA; ++ra)
        for (int rb = 0; rb < dB; ++rb) {
            std::uint64_t shifted = 0;
            for (int c = 0; c < dA * dB; ++c)
                if (mask >> c & 1) {
                    const int a = mod(c / dB + ra, dA), b = mod(c % dB + rb, dB);
                    shifted |= 1ULL << (a * dB + b);
                }
            best = std::min(best, shifted);
        }
    return best;
}

inline SupportSet canonical_support(const SupportSet& s) {
    return support_from_mask(s.dims, canonical_mask(mask_from_support(s), s.dims));
}

struct PredicateSet {
    bool phase = false;
    bool ppt = false;
    bool ccnr = false;
    std::optional<int> homogeneous;
};

struct SearchHit {
    SupportSet support;  // canonical representative
    std::uint64_t mask = 0;
    double ccnr_value = 0.0;
    double ccnr_threshold = 0.0;
    bool ccnr_detected = false;
    double pt_min_eig = 0.0;
    bool is_ppt = false;
    bool phase_holds = false;           // meaningful only for equal dimensions
    std::optional<int> homogeneity;
};

struct SearchOutcome {
    std::vector<SearchHit> hits;  // one canonical representative per orbit, ascending mask
    long long total = 0;          // candidate count of the full enumeration
    long long scanned = 0;        // candidates processed so far
    bool completed = false;
};

struct SearchOptions {
    long long budget = 50'000'000;
    int workers = default_workers();
    std::string checkpoint_path;  // empty: no checkpointing
    long long chunk = 65536;
    long long max_chunks = 0;  // 0 = run to completion; used to exercise resumption
};

namespace detail {

inline unsigned long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    static std::array<std::array<unsigned long long, 40>, 40> c = [] {
        std::array<std::array<unsigned long long, 40>, 40> t{};
        for (int i = 0; i < 40; ++i) {
            t[i][0] = 1;
            for (int j = 1; j <= i; ++j) t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0);
        }
        return t;
    }();
    return c[n][k];
}

// Combination of the given colexicographic rank: bits chosen from the top down.
inline std::uint64_t unrank_colex(long long rank, int n, int k) {
    std::uint64_t mask = 0;
    long long r = rank;
    int kk = k;
    for (int v = n - 1; v >= 0 && kk > 0; --v) {
        const long long c = static_cast<long long>(binomial(v, kk));
        if (c <= r) {
            mask |= 1ULL << v;
            r -= c;
            --kk;
        }
    }
    return mask;
}

// Next k-subset in colexicographic order (Gosper's hack).
inline std::uint64_t next_combination(std::uint64_t v) {
    const std::uint64_t t = v | (v - 1);
    return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

struct SearchTables {
    BipartiteDims dims{1, 1};
    int n = 0;
    double ccnr_threshold = 0.0;
    std::vector<CMat> corr;  // per-cell correlation matrix of the Bell projector
    std::vector<CMat> pt;    // per-cell partial transpose of the Bell projector
    std::vector<std::vector<int>> shift;   // [displacement][cell] -> shifted cell
    std::vector<std::vector<cplx>> phase;  // [displacement][cell] symplectic phase (equal dims)
};

inline SearchTables build_tables(const BipartiteDims& dims, const PredicateSet& preds) {
    SearchTables t;
    t.dims = dims;
    t.n = dims.total();
    t.ccnr_threshold = std::sqrt(static_cast<double>(t.n));
    for (int c = 0; c < t.n; ++c) {
        const CVec v = bds::bell_state(dims, c / dims.dB, c % dims.dB);
        const CMat proj = v * v.adjoint();
        if (preds.ccnr) t.corr.push_back(criteria::correlation_matrix(proj, dims).c);
        if (preds.ppt) t.pt.push_back(qlinalg::partial_transpose(proj, dims));
    }
    t.shift.resize(t.n);
    for (int mu = 0; mu < dims.dA; ++mu)
        for (int nu = 0; nu < dims.dB; ++nu) {
            const int delta = mu * dims.dB + nu;
            t.shift[delta].resize(t.n);
            for (int c = 0; c < t.n; ++c)
                t.shift[delta][c] =
                    mod(c / dims.dB + mu, dims.dA) * dims.dB + mod(c % dims.dB + nu, dims.dB);
        }
    if (preds.phase && dims.equal()) {
        const int d = dims.dA;
        t.phase.resize(t.n);
        for (int mu = 0; mu < d; ++mu)
            for (int nu = 0; nu < d; ++nu) {
                const int delta = mu * d + nu;
                t.phase[delta].resize(t.n);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b)
                        t.phase[delta][a * d + b] = root_of_unity(
                            d, static_cast<long long>(a) * nu - static_cast<long long>(b) * mu);
            }
    }
    return t;
}

inline bool mask_homogeneous(const SearchTables& t, std::uint64_t mask, int k) {
    for (int delta = 1; delta < t.n; ++delta) {
        int links = 0;
        std::uint64_t m = mask;
        while (m) {
            const int c = std::countr_zero(m);
            m &= m - 1;
            if (!(mask >> t.shift[delta][c] & 1)) ++links;
        }
        if (links != k) return false;
    }
    return true;
}

inline bool mask_phase_holds(const SearchTables& t, std::uint64_t mask) {
    for (int delta = 1; delta < t.n; ++delta) {
        cplx acc = 0.0;
        std::uint64_t m = mask;
        while (m) {
            const int c = std::countr_zero(m);
            m &= m - 1;
            if (!(mask >> t.shift[delta][c] & 1)) acc += t.phase[delta][c];
        }
        if (std::abs(acc) >= kTol) return false;
    }
    return true;
}

inline bool mask_ccnr_detected(const SearchTables& t, std::uint64_t mask, int popcount) {
    CMat c = CMat::Zero(t.corr[0].rows(), t.corr[0].cols());
    std::uint64_t m = mask;
    while (m) {
        const int cell = std::countr_zero(m);
        m &= m - 1;
        c += t.corr[cell];
    }
    c /= static_cast<double>(popcount);
    if (c.norm() > t.ccnr_threshold + kDetectSlack) return true;  // Frobenius lower bound
    // Gram-based value is ~1e-8 accurate; decide outright outside a guard band and
    // fall back to the exact SVD only near the threshold.
    const double quick = qlinalg::trace_norm_gram(c);
    if (std::abs(quick - t.ccnr_threshold) > 1e-6)
        return quick > t.ccnr_threshold + kDetectSlack;
    return qlinalg::trace_norm(c) > t.ccnr_threshold + kDetectSlack;
}

inline bool mask_is_ppt(const SearchTables& t, std::uint64_t mask, int popcount) {
    CMat pt = CMat::Zero(t.n, t.n);
    std::uint64_t m = mask;
    while (m) {
        const int cell = std::countr_zero(m);
        m &= m - 1;
        pt += t.pt[cell];
    }
    pt /= static_cast<double>(popcount);
    // Quick accept: a Cholesky factorization of pt + 1e-6 certifies min eig > -1e-6;
    // failures are clearly negative and rejected, borderline cases fall through to the
    // exact eigenvalue.
    CMat shifted = pt + 1e-6 * CMat::Identity(t.n, t.n);
    Eigen::LLT<CMat> llt(shifted);
    if (llt.info() != Eigen::Success) return false;
    Eigen::SelfAdjointEigenSolver<CMat> es(pt, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -kTol;
}

inline bool mask_passes(const SearchTables& t, const PredicateSet& preds, std::uint64_t mask,
                        int popcount) {
    if (preds.homogeneous && !mask_homogeneous(t, mask, *preds.homogeneous)) return false;
    if (preds.phase && !mask_phase_holds(t, mask)) return false;
    if (preds.ccnr && !mask_ccnr_detected(t, mask, popcount)) return false;
    if (preds.ppt && !mask_is_ppt(t, mask, popcount)) return false;
    return true;
}

inline nlohmann::json predicates_json(const PredicateSet& p) {
    nlohmann::json j;
    j["phase"] = p.phase;
    j["ppt"] = p.ppt;
    j["ccnr"] = p.ccnr;
    if (p.homogeneous)
        j["homogeneous"] = *p.homogeneous;
    else
        j["homogeneous"] = nullptr;
    return j;
}

}  // namespace detail

inline SearchHit evaluate_support(const SupportSet& s, std::uint64_t mask) {
    SearchHit h;
    h.support = s;
    h.mask = mask;
    const auto P = dichotomous_state(s);
    const CMat rho = bds::bds_from_probabilities(P);
    const auto cc = criteria::ccnr(rho, s.dims);
    h.ccnr_value = cc.value;
    h.ccnr_threshold = cc.threshold;
    h.ccnr_detected = cc.detected;
    const auto pp = criteria::ppt_check(rho, s.dims);
    h.pt_min_eig = pp.min_eig;
    h.is_ppt = pp.is_ppt;
    h.phase_holds = s.dims.equal() && phase_condition_check(s).holds;
    h.homogeneity = displacement_homogeneity(s);
    return h;
}

// Enumerates supports of the requested cardinality (size = -1: every nonempty support,
// grids of at most 16 cells), filters by the predicates, and reduces hits modulo cyclic
// row/column shifts.  The scan runs in committed chunks; with a checkpoint path the
// enumeration index and partial hits survive interruption.
inline SearchOutcome exhaustive_dichotomous_search(const BipartiteDims& dims, int size,
                                                  const PredicateSet& preds,
                                                  const SearchOptions& opts = {}) {
    const int n = dims.total();
    const bool any_size = size < 0;
    if (any_size)
        require(n <= 16, "full enumeration over all sizes is limited to grids of 16 cells");
    else
        require(size >= 1 && size <= n, "support size out of range");
    require(!preds.phase || dims.equal(),
            "the phase condition predicate requires equal local dimensions");

    const long long total = any_size ? (1LL << n) - 1
                                     : static_cast<long long>(detail::binomial(n, size));
    if (total > opts.budget)
        throw std::runtime_error("enumeration budget exceeded: the requested search has " +
                                 std::to_string(total) + " candidates (budget " +
                                 std::to_string(opts.budget) + ")");

    const auto tables = detail::build_tables(dims, preds);
    long long next_index = 0;
    std::set<std::uint64_t> canon;

    const auto config = [&] {
        nlohmann::json j;
        j["d_A"] = dims.dA;
        j["d_B"] = dims.dB;
        j["size"] = any_size ? -1 : size;
        j["predicates"] = detail::predicates_json(preds);
        j["total"] = total;
        return j;
    }();

    if (!opts.checkpoint_path.empty()) {
        std::ifstream in(opts.checkpoint_path);
        if (in.good()) {
            nlohmann::json j = nlohmann::json::parse(in);
            for (const auto& key : {"d_A", "d_B", "size", "predicates", "total"})
                if (j.at(key) != config.at(key))
                    throw std::runtime_error("checkpoint does not match the requested search");
            next_index = j.at("next_index").get<long long>();
            for (const auto& m : j.at("hit_masks")) canon.insert(m.get<std::uint64_t>());
        }
    }

    const auto save_checkpoint = [&] {
        if (opts.checkpoint_path.empty()) return;
        nlohmann::json j = config;
        j["next_index"] = next_index;
        j["hit_masks"] = std::vector<std::uint64_t>(canon.begin(), canon.end());
        write_text_atomic(opts.checkpoint_path, j.dump());
    };

    long long chunks_done = 0;
    while (next_index < total) {
        const long long chunk_len = std::min(opts.chunk, total - next_index);
        const int workers = std::max(1, opts.workers);
        std::vector<std::vector<std::uint64_t>> found(workers);
        parallel_ranges(chunk_len, workers, [&](int w, long long begin, long long end) {
            if (begin >= end) return;
            const long long start_rank = next_index + begin;
            std::uint64_t mask = any_size ? static_cast<std::uint64_t>(start_rank + 1)
                                          : detail::unrank_colex(start_rank, n, size);
            for (long long r = begin; r < end; ++r) {
                const int pop = std::popcount(mask);
                if (detail::mask_passes(tables, preds, mask, pop))
                    found[w].push_back(canonical_mask(mask, dims));
                mask = any_size ? mask + 1 : detail::next_combination(mask);
            }
        });
        for (const auto& v : found) canon.insert(v.begin(), v.end());
        next_index += chunk_len;
        ++chunks_done;
        save_checkpoint();
        if (opts.max_chunks > 0 && chunks_done >= opts.max_chunks) break;
    }

    SearchOutcome out;
    out.total = total;
    out.scanned = next_index;
    out.completed = next_index >= total;
    for (const std::uint64_t m : canon) out.hits.push_back(evaluate_support(support_from_mask(dims, m), m));
    return out;
}

// Stochastic hill climb towards a k-homogeneous support of the given cardinality:
// minimizes the squared deviation of per-displacement link counts, accepting sideways
// moves up to a stall cap.
inline std::optional<SupportSet> find_homogeneous_support(int d, int size, int k,
                                                          std::uint64_t seed = 20250823,
                                                          int restarts = 50,
                                                          int max_sweeps = 400) {
    const BipartiteDims dims(d, d);
    const int n = dims.total();
    require(size >= 1 && size <= n, "support size out of range");
    PredicateSet preds;  // tables only needed for shift maps
    const auto tables = detail::build_tables(dims, preds);
    const auto cost = [&](std::uint64_t mask) {
        long long c = 0;
        for (int delta = 1; delta < n; ++delta) {
            int links = 0;
            std::uint64_t m = mask;
            while (m) {
                const int cell = std::countr_zero(m);
                m &= m - 1;
                if (!(mask >> tables.shift[delta][cell] & 1)) ++links;
            }
            const long long dev = links - k;
            c += dev * dev;
        }
        return c;
    };
    std::mt19937_64 rng(seed);
    std::vector<int> cells(n);
    for (int i = 0; i < n; ++i) cells[i] = i;
    for (int r = 0; r < restarts; ++r) {
        std::shuffle(cells.begin(), cells.end(), rng);
        std::uint64_t mask = 0;
        for (int i = 0; i < size; ++i) mask |= 1ULL << cells[i];
        long long c = cost(mask);
        int stall = 0;
        for (int sweep = 0; sweep < max_sweeps && c > 0 && stall < 400; ++sweep) {
            bool moved = false;
            for (int out_cell = 0; out_cell < n && c > 0; ++out_cell) {
                if (!(mask >> out_cell & 1)) continue;
                for (int in_cell = 0; in_cell < n; ++in_cell) {
                    if (mask >> in_cell & 1) continue;
                    const std::uint64_t cand = (mask & ~(1ULL << out_cell)) | (1ULL << in_cell);
                    const long long cc = cost(cand);
                    if (cc < c || (cc == c && (rng() & 3) == 0)) {
                        if (cc == c) ++stall;
                        else stall = 0;
                        mask = cand;
                        c = cc;
                        moved = true;
                        break;
                    }
                }
                if (moved) break;
            }
            if (!moved) break;
        }
        if (c == 0) {
            auto s = support_from_mask(dims, mask);
            if (displacement_homogeneity(s) == k) return s;
        }
    }
    return std::nullopt;
}

// Repeated seeded hill climbs collecting distinct orbits; a best-effort sampler, not a
// certificate of exhaustiveness.
inline std::vector<SearchHit> heuristic_homogeneous_search(int d, int size, int k, int restarts,
                                                           std::uint64_t seed = 20250823) {
    std::set<std::uint64_t> seen;
    std::vector<SearchHit> hits;
    for (int r = 0; r < restarts; ++r) {
        const auto s = find_homogeneous_support(d, size, k, derive_seed(seed, r), 1);
        if (!s) continue;
        const std::uint64_t cm = canonical_mask(mask_from_support(*s), s->dims);
        if (seen.insert(cm).second)
            hits.push_back(evaluate_support(support_from_mask(s->dims, cm), cm));
    }
    std::sort(hits.begin(), hits.end(),
              [](const SearchHit& a, const SearchHit& b) { return a.mask < b.mask; });
    return hits;
}

// Fourier supports on which the state equals its own partial transpose: the first row,
// plus (for even d) the even columns of row d/2.
inline std::vector<std::pair<int, int>> pt_invariant_support(int d) {
    require(d >= 2, "dimension must be at least 2");
    std::vector<std::pair<int, int>> s;
    for (int nu = 0; nu < d; ++nu) s.emplace_back(0, nu);
    if (d % 2 == 0)
        for (int nu = 0; nu < d; nu += 2) s.emplace_back(d / 2, nu);
    return s;
}

namespace detail {

// Standard Nelder-Mead simplex descent.
inline std::pair<Eigen::VectorXd, double> nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0, double step,
    int max_iter, double ftol = 1e-12) {
    const int n = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (int i = 1; i <= n; ++i) xs[i](i - 1) += step;
    for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);
    std::vector<int> order(n + 1);
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        if (fs[order[n]] - fs[order[0]] < ftol) break;
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += xs[order[i]];
        centroid /= n;
        const int worst = order[n];
        const Eigen::VectorXd refl = centroid + (centroid - xs[worst]);
        const double fr = f(refl);
        if (fr < fs[order[0]]) {
            const Eigen::VectorXd exp_pt = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = f(exp_pt);
            if (fe < fr) {
                xs[worst] = exp_pt;
                fs[worst] = fe;
            } else {
                xs[worst] = refl;
                fs[worst] = fr;
            }
        } else if (fr < fs[order[n - 1]]) {
            xs[worst] = refl;
            fs[worst] = fr;
        } else {
            const Eigen::VectorXd contr = centroid + 0.5 * (xs[worst] - centroid);
            const double fc = f(contr);
            if (fc < fs[worst]) {
                xs[worst] = contr;
                fs[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == order[0]) continue;
                    xs[i] = xs[order[0]] + 0.5 * (xs[i] - xs[order[0]]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    return {xs[best], fs[best]};
}

// Free real parameters of a conjugate-symmetric Fourier matrix restricted to the
// transpose-invariant support.
struct PtParamMap {
    int d = 0;
    // Each parameter either fills a mirrored complex pair or a single real entry.
    struct Slot {
        int mu = 0, nu = 0;
        bool real_only = false;
    };
    std::vector<Slot> slots;  // complex slots consume two parameters, real slots one

    int param_count() const {
        int c = 0;
        for (const auto& s : slots) c += s.real_only ? 1 : 2;
        return c;
    }

    CMat lambda(const Eigen::VectorXd& p) const {
        CMat l = CMat::Zero(d, d);
        l(0, 0) = 1.0;
        int idx = 0;
        for (const auto& s : slots) {
            cplx v;
            if (s.real_only) {
                v = p(idx++);
            } else {
                v = cplx(p(idx), p(idx + 1));
                idx += 2;
            }
            l(s.mu, s.nu) = v;
            l(mod(-s.mu, d), mod(-s.nu, d)) = std::conj(v);
        }
        return l;
    }
};

inline PtParamMap pt_param_map(int d) {
    PtParamMap map;
    map.d = d;
    const auto mirror_is_self = [&](int mu, int nu) {
        return mod(-mu, d) == mu && mod(-nu, d) == nu;
    };
    std::set<std::pair<int, int>> taken;
    for (const auto& [mu, nu] : pt_invariant_support(d)) {
        if (mu == 0 && nu == 0) continue;
        if (taken.count({mu, nu})) continue;
        taken.insert({mu, nu});
        taken.insert({mod(-mu, d), mod(-nu, d)});
        map.slots.push_back({mu, nu, mirror_is_self(mu, nu)});
    }
    return map;
}

}  // namespace detail

struct PtInvariantResult {
    double best_value = 0.0;
    bds::FourierMatrix best_lambda;
};

// Maximizes the coefficient sum over transpose-invariant Fourier supports; infeasible
// iterates (negative reconstructed probabilities) are penalized by the deficit size.
inline PtInvariantResult maximize_ccnr_pt_invariant(int d, int restarts = 64,
                                                    std::uint64_t seed = 20250823) {
    require(d >= 2, "dimension must be at least 2");
    const BipartiteDims dims(d, d);
    const auto map = detail::pt_param_map(d);
    const int np = map.param_count();
    const CMat ga = bds::dft_phases(d, d, d, -1);
    const auto objective = [&](const Eigen::VectorXd& p) {
        const CMat l = map.lambda(p);
        const CMat probs = (ga * l * ga.transpose()) / static_cast<double>(d * d);
        double min_p = 1.0, imag_res = 0.0;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                min_p = std::min(min_p, probs(a, b).real());
                imag_res = std::max(imag_res, std::abs(probs(a, b).imag()));
            }
        const double penalty = 1e4 * (std::max(0.0, -min_p) + imag_res);
        return -l.cwiseAbs().sum() + penalty;
    };

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-0.7, 0.7);
    double best_f = objective(Eigen::VectorXd::Zero(np));
    Eigen::VectorXd best_x = Eigen::VectorXd::Zero(np);
    for (int r = 0; r < restarts; ++r) {
        Eigen::VectorXd x0(np);
        if (r == 0)
            x0.setZero();
        else
            for (int i = 0; i < np; ++i) x0(i) = unif(rng);
        auto [x, fx] = detail::nelder_mead(objective, x0, 0.25, 300 * np);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    CMat l = map.lambda(best_x);
    // Guarantee feasibility of the reported optimum: if rounding left a slightly
    // negative probability, shrink toward the maximally mixed point (which rescales
    // every coefficient except the unit (0,0) entry and stays on the support).
    {
        const CMat probs = (ga * l * ga.transpose()) / static_cast<double>(d * d);
        double min_p = 1.0;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) min_p = std::min(min_p, probs(a, b).real());
        if (min_p < 0.0) {
            const double deficit = -min_p * d * d;
            const double delta = std::min(1.0, deficit / (1.0 + deficit) + 1e-12);
            l *= (1.0 - delta);
            l(0, 0) = 1.0;
        }
    }
    PtInvariantResult res;
    res.best_lambda = bds::make_fourier_matrix(dims, l);
    bds::probabilities_from_fourier(res.best_lambda);  // validates feasibility
    res.best_value = l.cwiseAbs().sum();
    return res;
}

}  // namespace qbell::search
