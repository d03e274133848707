#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "dense_reference.hpp"
#include "fermichain/fermionchain.hpp"

using namespace fermichain;
using dense_ref::dense_annihilator;
using dense_ref::dense_fermion_hamiltonian;
using dense_ref::dense_parity;
using dense_ref::dense_spin_hamiltonian;
using dense_ref::sorted_eigenvalues;

namespace {

std::vector<SiteLabel> fermion_sites(std::size_t n) {
    std::vector<SiteLabel> order;
    for (std::size_t i = 0; i < n; ++i)
        order.push_back({"f" + std::to_string(i), SiteKind::Fermion});
    return order;
}

ChainParams toy_chain(std::vector<double> energies, std::vector<double> hoppings,
                      double coupling) {
    return ChainParams{std::move(energies), std::move(hoppings), coupling};
}

double spectrum_distance(const Matrix& a, const Matrix& b) {
    const Eigen::VectorXd ea = sorted_eigenvalues(a);
    const Eigen::VectorXd eb = sorted_eigenvalues(b);
    return (ea - eb).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("dense reference operators satisfy the CAR") {
    const auto order = fermion_sites(3);
    std::vector<Matrix> f;
    for (std::size_t k = 0; k < 3; ++k) f.push_back(dense_annihilator(order, k));
    const Matrix id = Matrix::Identity(8, 8);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
            const Matrix anti = f[k] * f[l].adjoint() + f[l].adjoint() * f[k];
            const Matrix expected = (k == l) ? id : Matrix(Matrix::Zero(8, 8));
            CHECK((anti - expected).cwiseAbs().maxCoeff() < 1e-14);
            CHECK((f[k] * f[l] + f[l] * f[k]).cwiseAbs().maxCoeff() < 1e-14);
        }
}

TEST_CASE("number term maps to sigma+ sigma-") {
    FermionHamiltonianSpec spec;
    spec.site_order = fermion_sites(1);
    spec.quadratic_terms.push_back({QuadKind::Number, 0, 0, 0.7});
    const auto h = jordan_wigner_hamiltonian(spec);
    REQUIRE(h.one_site_terms.size() == 1);
    const Eigen::Matrix2cd expected = 0.7 * local_ops::number();
    CHECK((h.one_site_terms[0].second - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("nearest-neighbor hopping maps to -(s+ s- + s- s+)") {
    FermionHamiltonianSpec spec;
    spec.site_order = fermion_sites(2);
    spec.quadratic_terms.push_back({QuadKind::Hopping, 0, 1, 0.3});
    const auto h = jordan_wigner_hamiltonian(spec);
    CHECK((dense_spin_hamiltonian(h) - dense_fermion_hamiltonian(spec)).cwiseAbs().maxCoeff() <
          1e-14);
    const Eigen::Matrix4cd expected =
        -0.3 * (detail::kron2(local_ops::sigma_plus(), local_ops::sigma_minus()) +
                detail::kron2(local_ops::sigma_minus(), local_ops::sigma_plus()));
    CHECK((h.two_site_terms[0].second - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pairing term matches the dense Fock construction on 3 modes") {
    FermionHamiltonianSpec spec;
    spec.site_order = fermion_sites(3);
    spec.quadratic_terms.push_back({QuadKind::Pairing, 1, 2, 0.45});
    const auto h = jordan_wigner_hamiltonian(spec);
    CHECK((dense_spin_hamiltonian(h) - dense_fermion_hamiltonian(spec)).cwiseAbs().maxCoeff() <
          1e-14);
    const Eigen::Matrix4cd expected =
        -0.45 * (detail::kron2(local_ops::sigma_plus(), local_ops::sigma_plus()) +
                 detail::kron2(local_ops::sigma_minus(), local_ops::sigma_minus()));
    CHECK((h.two_site_terms[0].second - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("non-adjacent Hamiltonian terms are rejected") {
    FermionHamiltonianSpec spec;
    spec.site_order = fermion_sites(3);
    spec.quadratic_terms.push_back({QuadKind::Hopping, 0, 2, 1.0});
    CHECK_THROWS_AS(jordan_wigner_hamiltonian(spec), NonAdjacentTermError);
}

TEST_CASE("observable strings") {
    SECTION("local number operator has bond dimension 1") {
        const auto mpo =
            jordan_wigner_observable({{{1.0, {{0, true}, {0, false}}}}}, fermion_sites(1));
        CHECK(mpo.max_bond() == 1);
        CHECK((to_dense_operator(mpo) - Matrix(local_ops::number())).cwiseAbs().maxCoeff() <
              1e-15);
    }
    SECTION("f_0^dag f_2 on 3 modes carries a sigma^z string") {
        const auto order = fermion_sites(3);
        const auto mpo = jordan_wigner_observable({{{1.0, {{0, true}, {2, false}}}}}, order);
        const Matrix expected =
            -kron(kron(Matrix(local_ops::sigma_plus()), Matrix(local_ops::sigma_z())),
                  Matrix(local_ops::sigma_minus()));
        CHECK((to_dense_operator(mpo) - expected).cwiseAbs().maxCoeff() < 1e-14);
        const Matrix car = dense_annihilator(order, 0).adjoint() * dense_annihilator(order, 2);
        CHECK((to_dense_operator(mpo) - car).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("intra-system current with adjacent dots is a local two-site operator") {
        const auto order = fermion_sites(4);
        const double g = 0.1;
        const Complex pref(0.0, -0.5 * g);  // g / (2i)
        OperatorExpression expr{
            {{pref, {{1, true}, {2, false}}}, {-pref, {{2, true}, {1, false}}}}};
        const auto mpo = jordan_wigner_observable(expr, order);
        const Matrix car =
            pref * (dense_annihilator(order, 1).adjoint() * dense_annihilator(order, 2)) -
            pref * (dense_annihilator(order, 2).adjoint() * dense_annihilator(order, 1));
        CHECK((to_dense_operator(mpo) - car).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("rlm builder reproduces the flat-band two-site chain") {
    const auto J = SpectralDensity::constant(0.1, {-1.0, 1.0});
    const auto chain =
        chain_hamiltonian_params(recurrence_coefficients(discretize_measure(J, 2048), 2));
    const auto spec = build_rlm(0.0, chain);
    REQUIRE(spec.site_order.size() == 3);
    double couplings[2] = {0.0, 0.0};
    for (const auto& t : spec.quadratic_terms) {
        if (t.kind == QuadKind::Number) CHECK(std::abs(t.coeff.real()) < 1e-12);
        if (t.kind == QuadKind::Hopping) couplings[t.i] = t.coeff.real();
    }
    CHECK(couplings[0] == Catch::Approx(0.25231).margin(1e-5));
    CHECK(couplings[1] == Catch::Approx(0.57735).margin(1e-5));
}

TEST_CASE("rlm with no chain is a single mode") {
    const auto spec = build_rlm(0.4, ChainParams{});
    CHECK(spec.site_order.size() == 1);
    REQUIRE(spec.quadratic_terms.size() == 1);
    CHECK(spec.quadratic_terms[0].coeff.real() == 0.4);
}

TEST_CASE("modified rlm couples with equal hopping and pairing") {
    const auto chain = toy_chain({0.5, 1.0}, {0.3}, 0.25);
    const auto spec = build_modified_rlm(0.3, chain);
    double hop = 0.0, pair = 0.0;
    for (const auto& t : spec.quadratic_terms) {
        if (t.i == 0 && t.j == 1 && t.kind == QuadKind::Hopping) hop = t.coeff.real();
        if (t.i == 0 && t.j == 1 && t.kind == QuadKind::Pairing) pair = t.coeff.real();
    }
    CHECK(hop == Catch::Approx(0.25));
    CHECK(pair == Catch::Approx(0.25));

    const auto& order = spec.site_order;
    const Matrix d = dense_annihilator(order, 0);
    const Matrix b0 = dense_annihilator(order, 1);
    const Matrix b1 = dense_annihilator(order, 2);
    const Matrix href = 0.3 * d.adjoint() * d + 0.25 * (d.adjoint() - d) * (b0 + b0.adjoint()) +
                        0.5 * b0.adjoint() * b0 + 1.0 * b1.adjoint() * b1 +
                        0.3 * (b0.adjoint() * b1 + b1.adjoint() * b0);
    CHECK((dense_fermion_hamiltonian(spec) - href).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((dense_spin_hamiltonian(jordan_wigner_hamiltonian(spec)) - href)
              .cwiseAbs()
              .maxCoeff() < 1e-14);
}

TEST_CASE("thermofield mrlm matches its operator-algebra definition") {
    const auto filled = toy_chain({0.4, 0.9}, {0.2}, 0.15);
    const auto empty = toy_chain({0.6, 1.1}, {0.35}, 0.45);
    const auto spec = build_modified_rlm_thermofield(0.3, filled, empty);
    REQUIRE(spec.site_order.size() == 5);
    REQUIRE(spec.site_order[2].name == "d");

    const auto& order = spec.site_order;
    const Matrix c1 = dense_annihilator(order, 0);  // outer filled-chain site
    const Matrix c0 = dense_annihilator(order, 1);
    const Matrix d = dense_annihilator(order, 2);
    const Matrix b0 = dense_annihilator(order, 3);
    const Matrix b1 = dense_annihilator(order, 4);

    Matrix href = 0.3 * d.adjoint() * d;
    href += -0.4 * c0.adjoint() * c0 - 0.9 * c1.adjoint() * c1 +
            0.2 * (c0.adjoint() * c1 + c1.adjoint() * c0);
    href += 0.6 * b0.adjoint() * b0 + 1.1 * b1.adjoint() * b1 +
            0.35 * (b0.adjoint() * b1 + b1.adjoint() * b0);
    href += 0.15 * (d.adjoint() - d) * (c0 + c0.adjoint());
    href += 0.45 * (d.adjoint() - d) * (b0 + b0.adjoint());
    CHECK((dense_fermion_hamiltonian(spec) - href).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((dense_spin_hamiltonian(jordan_wigner_hamiltonian(spec)) - href)
              .cwiseAbs()
              .maxCoeff() < 1e-14);
}

TEST_CASE("quantum dot with v = 0 leaves the TLS decoupled") {
    const auto chain = toy_chain({0.1}, {}, 0.2);
    const auto spec = build_quantum_dot(0.2, 0.0, 0.0, chain);
    const Matrix dense = dense_spin_hamiltonian(jordan_wigner_hamiltonian(spec));
    const Matrix sz = dense_ref::dense_one_site(spec.site_order, 0, local_ops::sigma_z());
    CHECK((dense * sz - sz * dense).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("dimer interaction term has eigenvalues {0, 0, 0, U}") {
    const double u = 3.1;
    const auto spec = build_dimer(0.0, 0.0, 0.0, u, ChainParams{}, ChainParams{});
    REQUIRE(spec.site_order.size() == 2);
    const Eigen::VectorXd ev = sorted_eigenvalues(dense_fermion_hamiltonian(spec));
    CHECK(ev(0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(ev(1) == Catch::Approx(0.0).margin(1e-14));
    CHECK(ev(2) == Catch::Approx(0.0).margin(1e-14));
    CHECK(ev(3) == Catch::Approx(u));
}

TEST_CASE("dimer with U = 0 and g = 0 is two independent halves") {
    const auto left = toy_chain({0.2}, {}, 0.3);
    const auto right = toy_chain({0.7}, {}, 0.4);
    const auto spec = build_dimer(0.6, 0.01, 0.0, 0.0, left, right);
    const Matrix h = dense_fermion_hamiltonian(spec);

    FermionHamiltonianSpec leftspec;
    leftspec.site_order = fermion_sites(2);
    leftspec.quadratic_terms = {{QuadKind::Number, 0, 0, 0.2},
                                {QuadKind::Number, 1, 1, 0.6 + 0.005},
                                {QuadKind::Hopping, 0, 1, 0.3}};
    FermionHamiltonianSpec rightspec;
    rightspec.site_order = fermion_sites(2);
    rightspec.quadratic_terms = {{QuadKind::Number, 0, 0, 0.6 - 0.005},
                                 {QuadKind::Number, 1, 1, 0.7},
                                 {QuadKind::Hopping, 0, 1, 0.4}};
    const Eigen::VectorXd el = sorted_eigenvalues(dense_fermion_hamiltonian(leftspec));
    const Eigen::VectorXd er = sorted_eigenvalues(dense_fermion_hamiltonian(rightspec));
    std::vector<double> sums;
    for (Eigen::Index i = 0; i < el.size(); ++i)
        for (Eigen::Index j = 0; j < er.size(); ++j) sums.push_back(el(i) + er(j));
    std::sort(sums.begin(), sums.end());
    const Eigen::VectorXd eh = sorted_eigenvalues(h);
    for (Eigen::Index i = 0; i < eh.size(); ++i)
        CHECK(eh(i) == Catch::Approx(sums[static_cast<std::size_t>(i)]).margin(1e-12));
}

namespace {

std::vector<FermionHamiltonianSpec> model_zoo() {
    const auto Jflat = SpectralDensity::constant(0.1, {-1.0, 1.0});
    const auto Jhalf = SpectralDensity::constant(0.4, {0.0, 2.0});
    const auto Jnewns = SpectralDensity::newns(0.5, {0.0, 2.0});
    auto chain_of = [](const SpectralDensity& J, std::size_t n) {
        return chain_hamiltonian_params(
            recurrence_coefficients(discretize_measure(J, 1024), n));
    };
    std::vector<FermionHamiltonianSpec> zoo;
    zoo.push_back(build_rlm(-0.2, chain_of(Jflat, 5)));
    zoo.push_back(build_modified_rlm(0.3, chain_of(Jhalf, 4)));
    zoo.push_back(build_modified_rlm_thermofield(0.3, chain_of(Jhalf, 2), chain_of(Jhalf, 3)));
    zoo.push_back(build_quantum_dot(0.2, 0.2, 0.0, chain_of(Jflat, 4)));
    zoo.push_back(build_dimer(0.6, 0.01, 0.1, 0.0, chain_of(Jnewns, 3), chain_of(Jnewns, 3)));
    zoo.push_back(build_dimer(0.6, 0.01, 0.1, 2.0, chain_of(Jnewns, 3), chain_of(Jnewns, 3)));
    return zoo;
}

} // namespace

TEST_CASE("JW equivalence: dense fermionic and spin spectra agree for all builders") {
    for (const auto& spec : model_zoo()) {
        const Matrix hf = dense_fermion_hamiltonian(spec);
        const Matrix hs = dense_spin_hamiltonian(jordan_wigner_hamiltonian(spec));
        CHECK(spectrum_distance(hf, hs) < 1e-10);
    }
}

TEST_CASE("total fermion parity commutes with every built Hamiltonian") {
    for (const auto& spec : model_zoo()) {
        const Matrix h = dense_spin_hamiltonian(jordan_wigner_hamiltonian(spec));
        const Matrix p = dense_parity(spec.site_order);
        CHECK((h * p - p * h).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("number-conserving builders have subset-sum spectra") {
    const auto J = SpectralDensity::constant(0.1, {-1.0, 1.0});
    const auto chain =
        chain_hamiltonian_params(recurrence_coefficients(discretize_measure(J, 1024), 4));
    const auto spec = build_rlm(-0.2, chain);
    const std::size_t m = spec.site_order.size();

    Eigen::MatrixXd single = Eigen::MatrixXd::Zero(m, m);
    for (const auto& t : spec.quadratic_terms) {
        if (t.kind == QuadKind::Number) single(t.i, t.i) += t.coeff.real();
        if (t.kind == QuadKind::Hopping) {
            single(t.i, t.j) += t.coeff.real();
            single(t.j, t.i) += t.coeff.real();
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(single);
    std::vector<double> sums;
    for (std::size_t subset = 0; subset < (std::size_t(1) << m); ++subset) {
        double e = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            if (subset & (std::size_t(1) << k))
                e += es.eigenvalues()(static_cast<Eigen::Index>(k));
        sums.push_back(e);
    }
    std::sort(sums.begin(), sums.end());
    const Eigen::VectorXd many = sorted_eigenvalues(dense_fermion_hamiltonian(spec));
    for (Eigen::Index i = 0; i < many.size(); ++i)
        CHECK(many(i) == Catch::Approx(sums[static_cast<std::size_t>(i)]).margin(1e-10));
}
