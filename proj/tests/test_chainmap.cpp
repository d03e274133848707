#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "fermichain/chainmap.hpp"
#include "fermichain/spectral.hpp"

using namespace fermichain;

namespace {

// independent mass oracle: high-resolution trapezoid rule of J/pi
double trapezoid_mass(const SpectralDensity& J, std::size_t n = 2'000'000) {
    const double lo = J.support().lo, hi = J.support().hi;
    const double h = (hi - lo) / static_cast<double>(n);
    double acc = 0.5 * (J(lo) + J(hi));
    for (std::size_t i = 1; i < n; ++i) acc += J(lo + h * static_cast<double>(i));
    return acc * h / M_PI;
}

} // namespace

TEST_CASE("flat density mass matches trapezoid oracle") {
    const auto J = SpectralDensity::constant(0.1, {-1.0, 1.0});
    const auto m = discretize_measure(J, 2048);
    const double oracle = trapezoid_mass(J, 100'000);
    CHECK(m.total_mass() == Catch::Approx(oracle).epsilon(1e-10));
    CHECK(m.total_mass() == Catch::Approx(2.0 * 0.1 / M_PI).epsilon(1e-12));
    CHECK(m.total_mass() == Catch::Approx(0.063662).margin(1e-6));
}

TEST_CASE("zero density raises EmptyMass") {
    const auto J = SpectralDensity::constant(0.0, {0.0, 2.0});
    CHECK_THROWS_AS(discretize_measure(J, 512), EmptyMassError);
}

TEST_CASE("Newns mass equals Gamma/4") {
    const auto J = SpectralDensity::newns(0.5, {0.0, 2.0});
    const auto m = discretize_measure(J, 4096);
    CHECK(m.total_mass() == Catch::Approx(0.5 / 4.0).epsilon(1e-10));
    CHECK(m.total_mass() == Catch::Approx(trapezoid_mass(J)).epsilon(1e-7));
}

TEST_CASE("negative density rejected") {
    const auto J = SpectralDensity::tabulated({0.0, 1.0, 2.0}, {1.0, -0.5, 1.0});
    CHECK_THROWS_AS(discretize_measure(J, 512), NegativeDensityError);
}

TEST_CASE("empty support rejected") {
    CHECK_THROWS_AS(SpectralDensity::constant(1.0, {2.0, 2.0}), EmptySupportError);
}

TEST_CASE("flat measure reproduces the monic Legendre recurrence") {
    const auto J = SpectralDensity::constant(0.1, {-1.0, 1.0});
    const auto m = discretize_measure(J, 10'000);
    const std::size_t n = 101;
    const auto c = recurrence_coefficients(m, n);
    REQUIRE(c.ok());
    REQUIRE(c.alphas.size() == n);
    REQUIRE(c.betas.size() == n - 1);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(c.alphas[k]) < 1e-12);
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double exact = kk * kk / (4.0 * kk * kk - 1.0);
        CHECK(std::abs(c.betas[k - 1] - exact) / exact < 1e-10);
    }
    CHECK(c.eta == Catch::Approx(std::sqrt(0.2 / M_PI)).epsilon(1e-12));
}

TEST_CASE("semicircle measure reproduces shifted Chebyshev-U recurrence") {
    const auto J = SpectralDensity::newns(0.5, {0.0, 2.0});
    const auto m = discretize_measure(J, 10'000);
    const std::size_t n = 101;
    const auto c = recurrence_coefficients(m, n);
    REQUIRE(c.ok());
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(c.alphas[k] - 1.0) < 1e-10);
    for (std::size_t k = 1; k < n; ++k) CHECK(std::abs(c.betas[k - 1] - 0.25) / 0.25 < 1e-10);
}

TEST_CASE("n = 1 returns the measure mean") {
    const auto J = SpectralDensity::newns(0.5, {0.0, 2.0});
    const auto c = recurrence_coefficients(discretize_measure(J, 512), 1);
    REQUIRE(c.alphas.size() == 1);
    CHECK(c.betas.empty());
    CHECK(c.alphas[0] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("oversampling guard") {
    const auto J = SpectralDensity::constant(0.1, {-1.0, 1.0});
    const auto m = discretize_measure(J, 64);
    CHECK_THROWS_AS(recurrence_coefficients(m, m.nodes.size() / 2 + 1), std::invalid_argument);
    CHECK_NOTHROW(recurrence_coefficients(m, m.nodes.size() / 2));
}

TEST_CASE("chain parameters for the flat two-site example") {
    const auto J = SpectralDensity::constant(0.1, {-1.0, 1.0});
    const auto c = recurrence_coefficients(discretize_measure(J, 2048), 2);
    const auto p = chain_hamiltonian_params(c);
    REQUIRE(p.site_energies.size() == 2);
    REQUIRE(p.hoppings.size() == 1);
    CHECK(std::abs(p.site_energies[0]) < 1e-12);
    CHECK(std::abs(p.site_energies[1]) < 1e-12);
    CHECK(p.hoppings[0] == Catch::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-10));
    CHECK(p.system_coupling == Catch::Approx(0.25231).margin(1e-5));
}

TEST_CASE("degenerate dispersion zeroes the chain but not the coupling") {
    const auto J = SpectralDensity::constant(0.1, {-1.0, 1.0});
    auto c = recurrence_coefficients(discretize_measure(J, 1024), 4);
    c.g_scale = 0.0;
    const auto p = chain_hamiltonian_params(c);
    for (double e : p.site_energies) CHECK(e == 0.0);
    for (double t : p.hoppings) CHECK(t == 0.0);
    CHECK(p.system_coupling == Catch::Approx(c.eta));
}

TEST_CASE("Newns chain tails approach the Chebyshev limits") {
    const auto J = SpectralDensity::newns(0.5, {0.0, 2.0});
    const auto c = recurrence_coefficients(discretize_measure(J, 4096), 40);
    const auto p = chain_hamiltonian_params(c);
    CHECK(p.system_coupling == Catch::Approx(std::sqrt(0.5 / 4.0)).epsilon(1e-10));
    CHECK(p.site_energies.back() == Catch::Approx(1.0).margin(1e-8));
    CHECK(p.hoppings.back() == Catch::Approx(0.5).margin(1e-8));
}

TEST_CASE("reconstructed polynomials stay orthogonal on the grid") {
    const auto J = SpectralDensity::newns(0.3, {0.0, 2.0});
    const auto m = discretize_measure(J, 4096);
    const std::size_t n = 30;
    const auto c = recurrence_coefficients(m, n);
    REQUIRE(c.ok());

    // evaluate monic pi_0..pi_n on the grid by the three-term recurrence
    const std::size_t npts = m.nodes.size();
    std::vector<std::vector<double>> pi(n + 1, std::vector<double>(npts));
    for (std::size_t i = 0; i < npts; ++i) pi[0][i] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < npts; ++i) {
            const double prev = (k == 0) ? 0.0 : c.betas[k - 1] * pi[k - 1][i];
            pi[k + 1][i] = (m.nodes[i] - c.alphas[k]) * pi[k][i] - prev;
        }
        if (k + 1 == n) break;
    }
    auto inner = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = 0; i < npts; ++i) s += m.weights[i] * pi[a][i] * pi[b][i];
        return s;
    };
    std::vector<double> norms(n);
    for (std::size_t k = 0; k < n; ++k) norms[k] = std::sqrt(inner(k, k));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            CHECK(std::abs(inner(a, b)) / (norms[a] * norms[b]) < 1e-8);
}

TEST_CASE("tridiagonal spectral measure reproduces the moments") {
    const auto Jd = SpectralDensity::newns(0.5, {0.0, 2.0});
    const auto m = discretize_measure(Jd, 4096);
    const std::size_t n = 10;
    const auto c = recurrence_coefficients(m, n);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k) T(k, k) = c.alphas[k];
    for (std::size_t k = 0; k + 1 < n; ++k)
        T(k, k + 1) = T(k + 1, k) = std::sqrt(c.betas[k]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    REQUIRE(es.info() == Eigen::Success);

    for (std::size_t j = 0; j < n; ++j) {
        CHECK(es.eigenvalues()(j) >= Jd.support().lo - 1e-10);
        CHECK(es.eigenvalues()(j) <= Jd.support().hi + 1e-10);
    }
    for (std::size_t p = 0; p < 2 * n; ++p) {
        double from_measure = 0.0;
        for (std::size_t i = 0; i < m.nodes.size(); ++i)
            from_measure += m.weights[i] * std::pow(m.nodes[i], static_cast<double>(p));
        double from_chain = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            from_chain += c.eta * c.eta * es.eigenvectors()(0, j) * es.eigenvectors()(0, j) *
                          std::pow(es.eigenvalues()(j), static_cast<double>(p));
        CHECK(std::abs(from_chain - from_measure) / std::abs(from_measure) < 1e-6);
    }
}

TEST_CASE("coefficients are converged in the quadrature resolution") {
    for (const auto& J : {SpectralDensity::constant(0.1, {-1.0, 1.0}),
                          SpectralDensity::newns(0.5, {0.0, 2.0})}) {
        const auto c1 = recurrence_coefficients(discretize_measure(J, 2048), 20);
        const auto c2 = recurrence_coefficients(discretize_measure(J, 4096), 20);
        for (std::size_t k = 0; k < 20; ++k)
            CHECK(std::abs(c2.alphas[k] - c1.alphas[k]) /
                      std::max(std::abs(c2.alphas[k]), 1.0) <
                  1e-9);
        for (std::size_t k = 0; k + 1 < 20; ++k)
            CHECK(std::abs(c2.betas[k] - c1.betas[k]) / std::abs(c2.betas[k]) < 1e-9);
    }
}

TEST_CASE("adaptive wrapper and JSON round trip") {
    const auto J = SpectralDensity::newns(0.5, {0.0, 2.0});
    const auto c = chain_coefficients(J, 12);
    REQUIRE(c.ok());
    const auto j = coefficients_to_json(c, J);
    CHECK(j.at("density").at("family") == "newns");
    const auto back = coefficients_from_json(j);
    CHECK(back.eta == c.eta);
    CHECK(back.alphas == c.alphas);
    CHECK(back.betas == c.betas);
}
