#pragma once

#include "qbell/bds.hpp"
#include "qbell/common.hpp"
#include "qbell/criteria.hpp"
#include "qbell/search.hpp"
#include "qbell/witness.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qbell::io {

using nlohmann::json;

inline json complex_entry(const cplx& v) { return json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    require(j.is_array() && j.size() == 2, "complex entry must be a number or an [re, im] pair");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const bds::ProbabilityMatrix& P) {
    json rows = json::array();
    for (int a = 0; a < P.dims.dA; ++a) {
        json row = json::array();
        for (int b = 0; b < P.dims.dB; ++b) row.push_back(P.p(a, b));
        rows.push_back(std::move(row));
    }
    return {{"d_A", P.dims.dA}, {"d_B", P.dims.dB}, {"entries", std::move(rows)}};
}

inline bds::ProbabilityMatrix probability_from_json(const json& j) {
    const BipartiteDims dims(j.at("d_A").get<int>(), j.at("d_B").get<int>());
    const auto& rows = j.at("entries");
    require(static_cast<int>(rows.size()) == dims.dA, "entry row count does not match d_A");
    RMat p(dims.dA, dims.dB);
    for (int a = 0; a < dims.dA; ++a) {
        require(static_cast<int>(rows.at(a).size()) == dims.dB,
                "entry column count does not match d_B");
        for (int b = 0; b < dims.dB; ++b) {
            const cplx v = complex_from_json(rows.at(a).at(b));
            require(std::abs(v.imag()) <= kTol, "probability entries must be real");
            p(a, b) = v.real();
        }
    }
    return bds::make_probability_matrix(dims, std::move(p));
}

inline json to_json(const bds::FourierMatrix& L) {
    json rows = json::array();
    for (int m = 0; m < L.dims.dA; ++m) {
        json row = json::array();
        for (int n = 0; n < L.dims.dB; ++n) row.push_back(complex_entry(L.lambda(m, n)));
        rows.push_back(std::move(row));
    }
    return {{"d_A", L.dims.dA}, {"d_B", L.dims.dB}, {"entries", std::move(rows)}};
}

inline bds::FourierMatrix fourier_from_json(const json& j) {
    const BipartiteDims dims(j.at("d_A").get<int>(), j.at("d_B").get<int>());
    const auto& rows = j.at("entries");
    require(static_cast<int>(rows.size()) == dims.dA, "entry row count does not match d_A");
    CMat l(dims.dA, dims.dB);
    for (int m = 0; m < dims.dA; ++m) {
        require(static_cast<int>(rows.at(m).size()) == dims.dB,
                "entry column count does not match d_B");
        for (int n = 0; n < dims.dB; ++n) l(m, n) = complex_from_json(rows.at(m).at(n));
    }
    return bds::make_fourier_matrix(dims, std::move(l));
}

inline json density_to_json(const CMat& rho, const BipartiteDims& dims) {
    const int D = dims.total();
    require(rho.rows() == D && rho.cols() == D, "state size does not match dimensions");
    json rows = json::array();
    for (int r = 0; r < D; ++r) {
        json row = json::array();
        for (int c = 0; c < D; ++c) row.push_back(complex_entry(rho(r, c)));
        rows.push_back(std::move(row));
    }
    return {{"d_A", dims.dA}, {"d_B", dims.dB}, {"entries", std::move(rows)}};
}

inline std::pair<CMat, BipartiteDims> density_from_json(const json& j) {
    const BipartiteDims dims(j.at("d_A").get<int>(), j.at("d_B").get<int>());
    const int D = dims.total();
    const auto& rows = j.at("entries");
    require(static_cast<int>(rows.size()) == D, "entry row count does not match d_A*d_B");
    CMat rho(D, D);
    for (int r = 0; r < D; ++r) {
        require(static_cast<int>(rows.at(r).size()) == D,
                "entry column count does not match d_A*d_B");
        for (int c = 0; c < D; ++c) rho(r, c) = complex_from_json(rows.at(r).at(c));
    }
    return {std::move(rho), dims};
}

inline json to_json(const search::SupportSet& s) {
    json pts = json::array();
    for (const auto& [a, b] : s.points) pts.push_back(json::array({a, b}));
    return {{"d_A", s.dims.dA}, {"d_B", s.dims.dB}, {"points", std::move(pts)}};
}

inline search::SupportSet support_from_json(const json& j) {
    const BipartiteDims dims(j.at("d_A").get<int>(), j.at("d_B").get<int>());
    std::vector<std::pair<int, int>> pts;
    for (const auto& p : j.at("points")) pts.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    return search::make_support_set(dims, std::move(pts));
}

// Witness format: coefficient matrix and operator matrix as flat row-major [re, im] lists;
// shapes follow from d_A, d_B (w is d_A^2 x d_B^2, matrix is (d_A d_B)^2).
inline json to_json(const witness::WitnessOperator& W) {
    json w = json::array();
    for (int i = 0; i < W.w.rows(); ++i)
        for (int j = 0; j < W.w.cols(); ++j) w.push_back(complex_entry(W.w(i, j)));
    json m = json::array();
    for (int r = 0; r < W.matrix_form.rows(); ++r)
        for (int c = 0; c < W.matrix_form.cols(); ++c)
            m.push_back(complex_entry(W.matrix_form(r, c)));
    return {{"d_A", W.dims.dA}, {"d_B", W.dims.dB}, {"x", W.x},
            {"y", W.y},         {"w", std::move(w)}, {"matrix", std::move(m)}};
}

inline json to_json(const bds::ToeplitzReport& r) {
    json j;
    j["pass"] = r.pass;
    if (r.has_failure)
        j["first_failure"] = {{"f_A", r.fA}, {"f_B", r.fB}, {"r", r.r}, {"min_eig", r.min_eig}};
    else
        j["first_failure"] = nullptr;
    return j;
}

inline json to_json(const search::SearchHit& h) {
    json j = to_json(h.support);
    j["mask"] = h.mask;
    j["ccnr_value"] = h.ccnr_value;
    j["ccnr_threshold"] = h.ccnr_threshold;
    j["ccnr_detected"] = h.ccnr_detected;
    j["pt_min_eig"] = h.pt_min_eig;
    j["is_ppt"] = h.is_ppt;
    if (h.support.dims.equal()) j["phase_holds"] = h.phase_holds;
    if (h.homogeneity)
        j["homogeneity"] = *h.homogeneity;
    else
        j["homogeneity"] = nullptr;
    return j;
}

inline json to_json(const search::DiophantineSolution& s) {
    return {{"d", s.d}, {"size", s.size}, {"k", s.k}, {"ccnr_excess", s.ccnr_excess}};
}

inline json to_json(const criteria::CcnrResult& r) {
    return {{"value", r.value}, {"threshold", r.threshold}, {"detected", r.detected}};
}

inline json to_json(const criteria::PptResult& r) {
    return {{"min_eig", r.min_eig}, {"is_ppt", r.is_ppt}};
}

inline json to_json(const criteria::SSCResult& r) {
    return {{"x", r.x}, {"y", r.y}, {"bound", r.bound}, {"norm", r.norm}, {"g", r.g}};
}

inline std::string csv_xyvalue(const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<double>& values) {
    require(xs.size() == ys.size() && xs.size() == values.size(), "csv column length mismatch");
    std::ostringstream out;
    out << "x,y,value\n";
    for (size_t i = 0; i < xs.size(); ++i)
        out << fmt12(xs[i]) << ',' << fmt12(ys[i]) << ',' << fmt12(values[i]) << '\n';
    return out.str();
}

inline std::string jsonl(const std::vector<json>& lines) {
    std::ostringstream out;
    for (const auto& j : lines) out << j.dump() << '\n';
    return out.str();
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::runtime_error("cannot open file: " + path);
    return json::parse(in);
}

// A state input resolved to a density matrix; Bell-diagonal inputs also carry their
// probability matrix.  Input documents are disambiguated by their fields and shape:
// "points" marks a support set; d_A x d_B "entries" hold a probability matrix when all
// entries are real and a Fourier matrix otherwise; (d_A d_B)^2 entries hold a density
// matrix.
struct StateInput {
    BipartiteDims dims;
    CMat rho;
    std::optional<bds::ProbabilityMatrix> P;
};

inline StateInput state_from_probabilities(const bds::ProbabilityMatrix& P) {
    return {P.dims, bds::bds_from_probabilities(P), P};
}

inline StateInput load_state(const json& j) {
    if (j.contains("points")) {
        const auto s = support_from_json(j);
        return state_from_probabilities(search::dichotomous_state(s));
    }
    const BipartiteDims dims(j.at("d_A").get<int>(), j.at("d_B").get<int>());
    const auto& rows = j.at("entries");
    if (static_cast<int>(rows.size()) == dims.total() && dims.total() != dims.dA)
        return {dims, density_from_json(j).first, std::nullopt};
    bool all_real = true;
    for (const auto& row : rows)
        for (const auto& e : row)
            if (!e.is_number()) all_real = false;
    if (all_real) return state_from_probabilities(probability_from_json(j));
    return state_from_probabilities(bds::probabilities_from_fourier(fourier_from_json(j)));
}

}  // namespace qbell::io
