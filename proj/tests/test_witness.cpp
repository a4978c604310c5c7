#include "qbell/witness.hpp"

#include "qbell/bds.hpp"
#include "qbell/search.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

using namespace qbell;
using namespace qbell::witness;

namespace {

bds::ProbabilityMatrix random_probabilities(const BipartiteDims& dims, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> ex(1.0);
    RMat p(dims.dA, dims.dB);
    double sum = 0.0;
    for (int a = 0; a < dims.dA; ++a)
        for (int b = 0; b < dims.dB; ++b) sum += (p(a, b) = ex(rng));
    p /= sum;
    return bds::make_probability_matrix(dims, std::move(p));
}

CMat random_density(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMat m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = cplx(g(rng), g(rng));
    CMat rho = m * m.adjoint();
    return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("optimal isometry reaches the negated trace norm") {
    const BipartiteDims dims(2, 3);
    const CMat rho = random_density(6, 13);
    const auto C = criteria::correlation_matrix(rho, dims);
    for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
        const auto iso = optimal_isometry(C, x, y);
        CHECK((iso.u * iso.u.adjoint() - CMat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
        const CMat m = criteria::scaled_correlations(C, x, y);
        double reached = 0.0;
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j)
                reached += (m(i, j) * std::conj(iso.u(i, j))).real();
        CHECK(reached == Catch::Approx(-qlinalg::trace_norm(m)).margin(1e-10));
    }
}

TEST_CASE("witness value on the defining state equals the criterion margin") {
    const BipartiteDims d22(2, 2);
    const CVec v = bds::bell_state(d22, 0, 0);
    const CMat bell = v * v.adjoint();
    const auto C = criteria::correlation_matrix(bell, d22);
    const auto W = build_witness(optimal_isometry(C, 1.0, 1.0), 1.0, 1.0);
    CHECK(witness_expectation(W, bell) == Catch::Approx(-2.0).margin(1e-10));
    CHECK(expectation_from_correlations(W, C) == Catch::Approx(-2.0).margin(1e-10));

    // Maximally mixed input: the margin is the bound minus x*y, never negative.
    const CMat mm = CMat::Identity(6, 6) / 6.0;
    const BipartiteDims d23(2, 3);
    const auto Cmm = criteria::correlation_matrix(mm, d23);
    for (auto [x, y] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}}) {
        const auto Wm = build_witness(optimal_isometry(Cmm, x, y), x, y);
        const double expect = criteria::ssc_bound(d23, x, y) - x * y;
        CHECK(witness_expectation(Wm, mm) == Catch::Approx(expect).margin(1e-9));
        CHECK(expect >= 0.0);
    }
}

TEST_CASE("two evaluation routes agree on a noisy detected state") {
    const auto rho0 = bds::bds_from_probabilities(
        search::dichotomous_state(search::eq27_support()));
    const BipartiteDims dims(4, 6);
    const CMat rho = noisy_state(rho0, dims, 0.129);
    const auto C = criteria::correlation_matrix(rho, dims);
    const double x = 0.11, y = 0.07;
    const auto W = build_witness(optimal_isometry(C, x, y), x, y);
    const double via_matrix = witness_expectation(W, rho);
    const double via_coeffs = expectation_from_correlations(W, C);
    const double margin = criteria::ssc_value(C, x, y).g;
    CHECK(via_matrix == Catch::Approx(via_coeffs).margin(1e-10));
    CHECK(via_matrix == Catch::Approx(margin).margin(1e-8));
    CHECK(via_matrix < 0.0);
}

TEST_CASE("equal-dimension diagonal states give the phase witness") {
    // For equal dimensions the correlation matrix of a diagonal state is diagonal with
    // the Fourier coefficients as entries, and the optimal witness takes the closed
    // form d * identity - sum of phase-aligned basis products.
    const int d = 3;
    const BipartiteDims dims(d, d);
    const auto P = random_probabilities(dims, 101);
    const auto L = bds::fourier_from_probabilities(P);
    // All coefficients nonzero: the correlation matrix is invertible and its unitary
    // polar factor (which the isometry construction returns) is unique.
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) REQUIRE(std::abs(L.lambda(m, n)) > 1e-3);

    const CMat rho = bds::bds_from_probabilities(P);
    const auto C = criteria::correlation_matrix(rho, dims);
    const auto W = build_witness(optimal_isometry(C, 1.0, 1.0), 1.0, 1.0);

    CMat expect = static_cast<double>(d) * CMat::Identity(d * d, d * d);
    for (int mu = 0; mu < d; ++mu)
        for (int nu = 0; nu < d; ++nu) {
            const cplx phase = L.lambda(mu, nu) / std::abs(L.lambda(mu, nu));
            const CMat k = qlinalg::kron(qlinalg::hw_operator(d, mu, nu),
                                         qlinalg::hw_operator(d, mu, mod(-nu, d)));
            expect -= 0.5 * (phase * k + std::conj(phase) * k.adjoint());
        }
    CHECK((W.matrix_form - expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("noise robustness thresholds") {
    const BipartiteDims d22(2, 2);
    const CVec v = bds::bell_state(d22, 0, 0);
    const CMat bell = v * v.adjoint();
    CHECK(noise_threshold(bell, d22, 1.0, 1.0) == Catch::Approx(2.0 / 3.0).margin(1e-5));
    CHECK(noise_threshold(bell, d22, 0.0, 0.0) == Catch::Approx(2.0 / 3.0).margin(1e-5));

    const auto C = criteria::correlation_matrix(bell, d22);
    CHECK(detection_interval_consistent(C, 1.0, 1.0, 2.0 / 3.0));

    const CMat mm = CMat::Identity(6, 6) / 6.0;
    CHECK(noise_threshold(mm, BipartiteDims(2, 3), 1.0, 1.0) == 0.0);

    // The noisy-correlation shortcut matches rebuilding the state at each eps.
    for (double eps : {0.1, 0.4}) {
        const CMat me = criteria::scaled_correlations(C, 1.0, 1.0);
        const double direct = criteria::ssc_value(
            criteria::correlation_matrix(noisy_state(bell, d22, eps), d22), 1.0, 1.0).g;
        CHECK(detail::noisy_ssc_g(me, d22, 1.0, 1.0, eps) == Catch::Approx(direct).margin(1e-10));
    }
}

TEST_CASE("grid specification") {
    const GridSpec g{0.0, 2.0, 200};
    CHECK(g.samples() == 201);
    CHECK(g.at(0) == 0.0);
    CHECK(g.at(200) == 2.0);
    CHECK(g.at(100) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("threshold scan over the parameter grid") {
    const BipartiteDims d22(2, 2);
    const CVec v = bds::bell_state(d22, 0, 0);
    const CMat bell = v * v.adjoint();
    // Degenerate single-value grid: both sample points sit at (1, 1).
    const auto scan = scan_noise_threshold(bell, d22, {1.0, 1.0, 1}, {1.0, 1.0, 1});
    CHECK(scan.max_eps == Catch::Approx(2.0 / 3.0).margin(1e-5));
    REQUIRE_FALSE(scan.argmax_set.empty());
    CHECK(scan.argmax_set.front().first == 1.0);
    CHECK(scan.boundary.empty());

    const CMat mm = CMat::Identity(4, 4) / 4.0;
    const auto flat = scan_noise_threshold(mm, d22, {0.0, 2.0, 4}, {0.0, 2.0, 4});
    CHECK(flat.max_eps == 0.0);
    CHECK(flat.argmax_set.empty());
    CHECK(*std::max_element(flat.eps_max.begin(), flat.eps_max.end()) == 0.0);
}

TEST_CASE("restricted witnesses with few terms") {
    const BipartiteDims d23(2, 3);
    const CVec v = bds::bell_state(d23, 0, 0);
    const CMat bell = v * v.adjoint();

    // Three terms suffice at (0, 0); the optimum has a known closed form.
    auto sw3 = sparse_witness(bell, d23, 0.0, 0.0, 3);
    REQUIRE(sw3.has_value());
    CHECK(sw3->value == Catch::Approx(-0.31053130901849335).margin(1e-9));
    REQUIRE(sw3->support.size() == 3);
    std::vector<std::pair<int, int>> sorted = sw3->support;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 3}});
    // The reported value is an expectation value of the built witness.
    CHECK(witness_expectation(sw3->witness, bell) == Catch::Approx(sw3->value).margin(1e-8));

    // One or two terms cannot detect this state anywhere near the origin.
    for (int l : {1, 2}) {
        CHECK_FALSE(sparse_witness(bell, d23, 0.0, 0.0, l).has_value());
        CHECK_FALSE(sparse_witness(bell, d23, 0.1, 0.1, l).has_value());
    }

    CHECK_THROWS_AS(sparse_witness(bell, d23, 0.0, 0.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(sparse_witness(bell, d23, 0.0, 0.0, 36), std::invalid_argument);
}

TEST_CASE("star-shaped supports use the closed form") {
    const BipartiteDims d22(2, 2);
    const CVec v = bds::bell_state(d22, 0, 0);
    const CMat bell = v * v.adjoint();
    // The correlation matrix is the 4x4 identity; three diagonal cells, each its own
    // component, contribute -1 apiece against the bound of 2.
    auto sw = sparse_witness(bell, d22, 1.0, 1.0, 3);
    REQUIRE(sw.has_value());
    CHECK(sw->value == Catch::Approx(-1.0).margin(1e-9));
    CHECK(witness_expectation(sw->witness, bell) == Catch::Approx(-1.0).margin(1e-9));
    // A single diagonal cell only reaches 2 - 1 >= 0: certified undetectable.
    CHECK_FALSE(sparse_witness(bell, d22, 1.0, 1.0, 1).has_value());
}

TEST_CASE("full support recovers the unrestricted criterion") {
    const BipartiteDims d23(2, 3);
    const CVec v = bds::bell_state(d23, 0, 0);
    const CMat bell = v * v.adjoint();
    const auto C = criteria::correlation_matrix(bell, d23);

    const double g00 = criteria::ssc_value(C, 0.0, 0.0).g;
    auto full = sparse_witness(bell, d23, 0.0, 0.0, 35);
    REQUIRE(full.has_value());
    CHECK(full->value >= g00 - 1e-8);
    CHECK(full->value <= -0.25);

    // Separable input has a positive margin everywhere, so no witness exists.
    const CMat mm = CMat::Identity(6, 6) / 6.0;
    const auto Cmm = criteria::correlation_matrix(mm, d23);
    CHECK(criteria::ssc_value(Cmm, 1.0, 1.0).g > 0.0);
    CHECK_FALSE(sparse_witness(mm, d23, 1.0, 1.0, 35).has_value());
}

TEST_CASE("sparse values never beat the unrestricted optimum") {
    const BipartiteDims dims(2, 3);
    const CMat rho = random_density(6, 314);
    const auto C = criteria::correlation_matrix(rho, dims);
    for (auto [x, y] : {std::pair{0.0, 0.0}, std::pair{1.0, 1.0}, std::pair{0.4, 1.3}}) {
        const double g = criteria::ssc_value(C, x, y).g;
        for (int l : {2, 5, 12, 35}) {
            const auto sw = sparse_witness(rho, dims, x, y, l);
            if (sw) CHECK(sw->value >= g - 1e-8);
        }
    }
}

TEST_CASE("measurement filtration map") {
    const BipartiteDims d23(2, 3);
    const CVec v = bds::bell_state(d23, 0, 0);
    const CMat bell = v * v.adjoint();
    const auto fm = measurement_filtration(bell, d23, {0.0, 0.4, 4}, {0.0, 0.4, 4}, 6);
    REQUIRE(fm.min_l.size() == 25);
    // The origin is detected with exactly three terms and no fewer.
    CHECK(fm.min_l[0] == 3);
    // Detected points need at least three terms anywhere on this patch.
    for (int l : fm.min_l)
        if (l != 0) CHECK(l >= 3);
    // At least one more point on the patch is detected.
    int detected = 0;
    for (int l : fm.min_l) detected += (l != 0);
    CHECK(detected >= 2);

    // Separable input: nothing is ever detected.
    const CMat mm = CMat::Identity(6, 6) / 6.0;
    const auto none = measurement_filtration(mm, d23, {0.0, 2.0, 3}, {0.0, 2.0, 3}, 10);
    for (int l : none.min_l) CHECK(l == 0);

    CHECK_THROWS_AS(measurement_filtration(mm, d23, {0.0, 2.0, 3}, {0.0, 2.0, 3}, 0),
                    std::invalid_argument);
}
