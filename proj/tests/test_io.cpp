#include "qbell/io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

using namespace qbell;
using nlohmann::json;

TEST_CASE("complex entries") {
    const cplx v(1.25, -0.5);
    CHECK(io::complex_from_json(io::complex_entry(v)) == v);
    CHECK(io::complex_from_json(json(2.5)) == cplx(2.5, 0.0));
    CHECK_THROWS_AS(io::complex_from_json(json::array({1.0})), std::invalid_argument);
    CHECK_THROWS_AS(io::complex_from_json(json::object()), std::invalid_argument);
}

TEST_CASE("probability matrix round trip") {
    RMat p(2, 3);
    p << 0.1, 0.2, 0.3, 0.15, 0.05, 0.2;
    const auto P = bds::make_probability_matrix(BipartiteDims(2, 3), p);
    const json j = io::to_json(P);
    CHECK(j.at("d_A") == 2);
    CHECK(j.at("d_B") == 3);
    const auto back = io::probability_from_json(j);
    CHECK((back.p - P.p).cwiseAbs().maxCoeff() == 0.0);

    // The reader accepts [re, 0] pairs for real entries.
    json pairs = j;
    pairs["entries"][0][0] = json::array({0.1, 0.0});
    CHECK((io::probability_from_json(pairs).p - P.p).cwiseAbs().maxCoeff() == 0.0);

    json imag = j;
    imag["entries"][0][0] = json::array({0.1, 0.2});
    CHECK_THROWS_AS(io::probability_from_json(imag), std::invalid_argument);

    json short_row = j;
    short_row["entries"][1].erase(2);
    CHECK_THROWS_AS(io::probability_from_json(short_row), std::invalid_argument);
}

TEST_CASE("fourier matrix round trip") {
    const auto L = bds::fourier_from_probabilities(
        bds::uniform_probabilities(BipartiteDims(2, 3)));
    const auto back = io::fourier_from_json(io::to_json(L));
    CHECK((back.lambda - L.lambda).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("density matrix round trip") {
    const CVec v = bds::bell_state(BipartiteDims(2, 3), 1, 2);
    const CMat rho = v * v.adjoint();
    const auto [back, dims] = io::density_from_json(io::density_to_json(rho, BipartiteDims(2, 3)));
    CHECK(dims == BipartiteDims(2, 3));
    CHECK((back - rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("support set round trip") {
    const auto s = search::eq27_support();
    const auto back = io::support_from_json(io::to_json(s));
    CHECK(back.dims == s.dims);
    CHECK(back.points == s.points);
}

TEST_CASE("witness serialization shape") {
    const CVec v = bds::bell_state(BipartiteDims(2, 2), 0, 0);
    const CMat bell = v * v.adjoint();
    const auto C = criteria::correlation_matrix(bell, BipartiteDims(2, 2));
    const auto W = witness::build_witness(witness::optimal_isometry(C, 1.0, 1.0), 1.0, 1.0);
    const json j = io::to_json(W);
    CHECK(j.at("x") == 1.0);
    CHECK(j.at("w").size() == 16);
    CHECK(j.at("matrix").size() == 16);  // (d_A d_B)^2 entries of the 4x4 operator
    // Row-major flattening: w[0] is the (0,0) coefficient.
    CHECK(io::complex_from_json(j.at("w").at(0)) == W.w(0, 0));
    CHECK(io::complex_from_json(j.at("matrix").at(1)) == W.matrix_form(0, 1));
}

TEST_CASE("toeplitz report serialization") {
    CMat l = CMat::Zero(2, 2);
    l(0, 0) = 1.0;
    l(0, 1) = 1.5;
    const auto bad = bds::toeplitz_necessary_check(
        bds::make_fourier_matrix(BipartiteDims(2, 2), l));
    const json jb = io::to_json(bad);
    CHECK(jb.at("pass") == false);
    CHECK(jb.at("first_failure").at("r") == 2);
    CHECK(jb.at("first_failure").at("min_eig").get<double>() < 0.0);

    l(0, 1) = 0.0;
    const auto good = bds::toeplitz_necessary_check(
        bds::make_fourier_matrix(BipartiteDims(2, 2), l));
    const json jg = io::to_json(good);
    CHECK(jg.at("pass") == true);
    CHECK(jg.at("first_failure").is_null());
}

TEST_CASE("search hit serialization") {
    const auto s44 = search::eq21_support();
    const auto h44 = search::evaluate_support(s44, search::mask_from_support(s44));
    const json j44 = io::to_json(h44);
    CHECK(j44.at("phase_holds") == true);
    CHECK(j44.at("homogeneity") == 4);
    CHECK(j44.at("ccnr_detected") == true);
    CHECK(j44.at("is_ppt") == true);
    CHECK(j44.at("points").size() == 6);

    const auto s46 = search::eq27_support();
    const auto h46 = search::evaluate_support(s46, search::mask_from_support(s46));
    const json j46 = io::to_json(h46);
    CHECK_FALSE(j46.contains("phase_holds"));
    CHECK(j46.at("homogeneity").is_null());
}

TEST_CASE("criterion result serialization") {
    const json d = io::to_json(search::DiophantineSolution{4, 6, 4, 2.0});
    CHECK(d == json({{"d", 4}, {"size", 6}, {"k", 4}, {"ccnr_excess", 2.0}}));

    const json c = io::to_json(criteria::CcnrResult{6.0, 4.0, true});
    CHECK(c.at("detected") == true);

    const json p = io::to_json(criteria::PptResult{-0.5, false});
    CHECK(p.at("min_eig") == -0.5);

    const json s = io::to_json(criteria::SSCResult{1.0, 1.0, 2.0, 4.0, -2.0});
    CHECK(s.at("g") == -2.0);
    CHECK(s.at("bound") == 2.0);
}

TEST_CASE("csv rendering") {
    const std::string csv =
        io::csv_xyvalue({0.0, 0.5}, {1.0, 2.0}, {1.0, -0.0024299906744200683});
    CHECK(csv == "x,y,value\n0,1,1\n0.5,2,-0.00242999067442\n");
    CHECK_THROWS_AS(io::csv_xyvalue({0.0}, {1.0, 2.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("json lines rendering") {
    const std::string out = io::jsonl({json({{"a", 1}}), json({{"b", 2}})});
    CHECK(out == "{\"a\":1}\n{\"b\":2}\n");
}

TEST_CASE("file helpers") {
    const std::string path = "/tmp/qbell_test_io.json";
    write_text_atomic(path, "{\"k\": 7}");
    CHECK(io::read_json_file(path).at("k") == 7);
    write_text_atomic(path, "{\"k\": 8}");
    CHECK(io::read_json_file(path).at("k") == 8);
    std::remove(path.c_str());
    CHECK_THROWS_AS(io::read_json_file(path), std::runtime_error);
}

TEST_CASE("state input disambiguation") {
    // Support set.
    const json sup = io::to_json(search::eq21_support());
    const auto from_sup = io::load_state(sup);
    REQUIRE(from_sup.P.has_value());
    CHECK(from_sup.P->p.maxCoeff() == Catch::Approx(1.0 / 6.0).margin(1e-15));

    // Real probability grid.
    RMat p(2, 3);
    p << 0.1, 0.2, 0.3, 0.15, 0.05, 0.2;
    const auto P = bds::make_probability_matrix(BipartiteDims(2, 3), p);
    const auto from_p = io::load_state(io::to_json(P));
    REQUIRE(from_p.P.has_value());
    CHECK((from_p.P->p - p).cwiseAbs().maxCoeff() == 0.0);
    CHECK((from_p.rho - bds::bds_from_probabilities(P)).cwiseAbs().maxCoeff() < 1e-14);

    // Complex coefficient grid resolves through the inverse transform.
    const auto L = bds::fourier_from_probabilities(P);
    const auto from_l = io::load_state(io::to_json(L));
    REQUIRE(from_l.P.has_value());
    CHECK((from_l.P->p - p).cwiseAbs().maxCoeff() < 1e-12);

    // Full density matrix: no probability matrix attached.
    const CMat rho = bds::bds_from_probabilities(P);
    const auto from_rho = io::load_state(io::density_to_json(rho, BipartiteDims(2, 3)));
    CHECK_FALSE(from_rho.P.has_value());
    CHECK((from_rho.rho - rho).cwiseAbs().maxCoeff() == 0.0);
}
