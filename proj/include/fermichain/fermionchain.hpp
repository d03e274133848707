// fermionchain.hpp — fermionic model Hamiltonians and the Jordan-Wigner map
//
// Site convention: physical index 0 is the occupied state, so n = sigma^+
// sigma^- = diag(1, 0), matching the Fock ordering |n_1, n_2, ...> =
// (f_1^dag)^{n_1} (f_2^dag)^{n_2} ... |vac>.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "fermichain/chainmap.hpp"
#include "fermichain/errors.hpp"
#include "fermichain/tensor_train.hpp"

namespace fermichain {

enum class SiteKind { Fermion, TwoLevel };

struct SiteLabel {
    std::string name;
    SiteKind kind = SiteKind::Fermion;
};

enum class QuadKind { Number, Hopping, Pairing };

// Number: coeff * f_i^dag f_i  (coeff real)
// Hopping: coeff * f_i^dag f_{i+1} + h.c.
// Pairing: coeff * f_i^dag f_{i+1}^dag + h.c.
struct QuadraticTerm {
    QuadKind kind = QuadKind::Number;
    std::size_t i = 0;
    std::size_t j = 0;
    Complex coeff{0.0, 0.0};
};

// spin term acting on a distinguished non-fermionic two-level site
struct TlsOneSiteTerm {
    std::size_t site = 0;
    Eigen::Matrix2cd op;
};

// coeff * op_tls (x) n_fermion, with the two sites adjacent
struct TlsDensityCoupling {
    std::size_t tls_site = 0;
    std::size_t fermion_site = 0;
    Eigen::Matrix2cd tls_op;
    double coeff = 0.0;
};

// coeff * n_i n_{i+1}
struct DensityDensityTerm {
    std::size_t i = 0;
    double coeff = 0.0;
};

struct FermionHamiltonianSpec {
    std::vector<SiteLabel> site_order;
    std::vector<QuadraticTerm> quadratic_terms;
    std::vector<TlsOneSiteTerm> tls_terms;
    std::vector<TlsDensityCoupling> tls_couplings;
    std::vector<DensityDensityTerm> density_density_terms;

    std::size_t n_sites() const { return site_order.size(); }
};

struct SpinChainHamiltonian {
    std::size_t n_sites = 0;
    std::vector<std::pair<std::size_t, Eigen::Matrix2cd>> one_site_terms;
    std::vector<std::pair<std::size_t, Eigen::Matrix4cd>> two_site_terms;  // on (site, site+1)
};

namespace detail {

inline void require_hermitian(const Eigen::MatrixXcd& m, const char* what) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error(std::string(what) + ": matrix is not Hermitian");
}

inline Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

} // namespace detail

// Maps a nearest-neighbor fermionic Hamiltonian to a nearest-neighbor spin
// chain. Hopping and pairing only connect adjacent sites, so no Z-strings
// survive; any term that would need one is rejected.
inline SpinChainHamiltonian jordan_wigner_hamiltonian(const FermionHamiltonianSpec& spec) {
    using namespace local_ops;
    SpinChainHamiltonian h;
    h.n_sites = spec.n_sites();

    auto require_fermion = [&](std::size_t s) {
        if (s >= h.n_sites || spec.site_order[s].kind != SiteKind::Fermion)
            throw NonAdjacentTermError("quadratic term on a non-fermionic site");
    };

    for (const auto& t : spec.quadratic_terms) {
        switch (t.kind) {
        case QuadKind::Number: {
            require_fermion(t.i);
            if (std::abs(t.coeff.imag()) > 1e-12)
                throw Error("number-term coefficient must be real");
            h.one_site_terms.emplace_back(t.i, t.coeff.real() * number());
            break;
        }
        case QuadKind::Hopping: {
            require_fermion(t.i);
            require_fermion(t.j);
            if (t.j != t.i + 1)
                throw NonAdjacentTermError("hopping term would require a Z-string");
            Eigen::Matrix4cd m = -t.coeff * detail::kron2(sigma_plus(), sigma_minus()) -
                                 std::conj(t.coeff) * detail::kron2(sigma_minus(), sigma_plus());
            h.two_site_terms.emplace_back(t.i, m);
            break;
        }
        case QuadKind::Pairing: {
            require_fermion(t.i);
            require_fermion(t.j);
            if (t.j != t.i + 1)
                throw NonAdjacentTermError("pairing term would require a Z-string");
            Eigen::Matrix4cd m = -t.coeff * detail::kron2(sigma_plus(), sigma_plus()) -
                                 std::conj(t.coeff) * detail::kron2(sigma_minus(), sigma_minus());
            h.two_site_terms.emplace_back(t.i, m);
            break;
        }
        }
    }
    for (const auto& t : spec.tls_terms) {
        detail::require_hermitian(t.op, "tls term");
        h.one_site_terms.emplace_back(t.site, t.op);
    }
    for (const auto& t : spec.tls_couplings) {
        detail::require_hermitian(t.tls_op, "tls coupling");
        // the coupling is fermion-parity-even, so the number operator passes
        // through string-free
        if (t.fermion_site == t.tls_site + 1) {
            h.two_site_terms.emplace_back(t.tls_site,
                                          t.coeff * detail::kron2(t.tls_op, number()));
        } else if (t.tls_site == t.fermion_site + 1) {
            h.two_site_terms.emplace_back(t.fermion_site,
                                          t.coeff * detail::kron2(number(), t.tls_op));
        } else {
            throw NonAdjacentTermError("tls coupling must act on adjacent sites");
        }
    }
    for (const auto& t : spec.density_density_terms) {
        require_fermion(t.i);
        require_fermion(t.i + 1);
        h.two_site_terms.emplace_back(t.i, t.coeff * detail::kron2(number(), number()));
    }
    return h;
}

// ---- observables (full string support) ---------------------------------------

struct LadderFactor {
    std::size_t site = 0;
    bool dagger = false;
};

// coeff * factors[0] * factors[1] * ...
struct OperatorTerm {
    Complex coeff{1.0, 0.0};
    std::vector<LadderFactor> factors;
};

struct OperatorExpression {
    std::vector<OperatorTerm> terms;
};

// MPO of a sum of ladder-operator products, with explicit sigma^z strings
// between non-adjacent endpoints. Two-level sites are excluded from strings.
inline TensorTrain jordan_wigner_observable(const OperatorExpression& expr,
                                            const std::vector<SiteLabel>& site_order) {
    using namespace local_ops;
    const std::size_t n = site_order.size();
    if (expr.terms.empty()) throw Error("jordan_wigner_observable: empty expression");

    TensorTrain out;
    bool first = true;
    for (const auto& term : expr.terms) {
        std::vector<Eigen::Matrix2cd> locals(n, identity());
        for (const auto& f : term.factors) {
            if (f.site >= n || site_order[f.site].kind != SiteKind::Fermion)
                throw Error("ladder factor on a non-fermionic site");
            for (std::size_t s = 0; s < f.site; ++s)
                if (site_order[s].kind == SiteKind::Fermion)
                    locals[s] = (locals[s] * sigma_z()).eval();
            locals[f.site] =
                (locals[f.site] * (f.dagger ? sigma_plus() : sigma_minus())).eval();
        }
        TensorTrain t = TensorTrain::product_operator(locals);
        t.scale(term.coeff);
        out = first ? std::move(t) : mpo_sum(out, t);
        first = false;
    }
    return out;
}

// single-site (non-fermionic) observable, e.g. a TLS coherence operator
inline TensorTrain single_site_observable(std::size_t n_sites, std::size_t site,
                                          const Eigen::Matrix2cd& op) {
    std::vector<Eigen::Matrix2cd> locals(n_sites, local_ops::identity());
    locals[site] = op;
    return TensorTrain::product_operator(locals);
}

// ---- model builders -----------------------------------------------------------

namespace detail {

// appends chain number/hopping terms for sites [offset, offset + N)
inline void append_chain(FermionHamiltonianSpec& spec, const ChainParams& chain,
                         std::size_t offset, bool reversed, double energy_sign = 1.0) {
    const std::size_t n = chain.site_energies.size();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t pos = reversed ? offset + (n - 1 - k) : offset + k;
        spec.quadratic_terms.push_back(
            {QuadKind::Number, pos, pos, energy_sign * chain.site_energies[k]});
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const std::size_t a = reversed ? offset + (n - 1 - k) : offset + k;
        const std::size_t b = reversed ? offset + (n - 2 - k) : offset + k + 1;
        spec.quadratic_terms.push_back(
            {QuadKind::Hopping, std::min(a, b), std::max(a, b), chain.hoppings[k]});
    }
}

} // namespace detail

// Resonant level model: impurity d hybridized with the mapped chain,
// ordering [d, b_0, b_1, ...].
inline FermionHamiltonianSpec build_rlm(double e_imp, const ChainParams& chain) {
    FermionHamiltonianSpec spec;
    const std::size_t n = chain.site_energies.size();
    spec.site_order.push_back({"d", SiteKind::Fermion});
    for (std::size_t k = 0; k < n; ++k)
        spec.site_order.push_back({"b" + std::to_string(k), SiteKind::Fermion});
    spec.quadratic_terms.push_back({QuadKind::Number, 0, 0, e_imp});
    if (n > 0)
        spec.quadratic_terms.push_back({QuadKind::Hopping, 0, 1, chain.system_coupling});
    detail::append_chain(spec, chain, 1, false);
    return spec;
}

// Modified resonant level model with the factorized coupling
// eta * (d^dag - d)(b_0 + b_0^dag), which expands to hopping plus pairing of
// equal magnitude.
inline FermionHamiltonianSpec build_modified_rlm(double e_imp, const ChainParams& chain) {
    FermionHamiltonianSpec spec = build_rlm(e_imp, chain);
    // replace the plain hopping coupling: (d^dag - d)(b + b^dag)
    //   = (d^dag b + b^dag d) + (d^dag b^dag + b d)
    if (!chain.site_energies.empty())
        spec.quadratic_terms.push_back({QuadKind::Pairing, 0, 1, chain.system_coupling});
    return spec;
}

// Thermofield variant: folded geometry [filled chain reversed | d | empty chain]
// with both couplings in the factorized form. The filled bath carries the
// negated free Hamiltonian; after the (-1)^n gauge on its chain the hoppings
// stay positive and only its on-site energies flip sign. Expanding
// (d^dag - d)(c + c^dag) with c on the left of d flips the pairing sign there.
inline FermionHamiltonianSpec build_modified_rlm_thermofield(double e_imp,
                                                             const ChainParams& filled,
                                                             const ChainParams& empty) {
    FermionHamiltonianSpec spec;
    const std::size_t nf = filled.site_energies.size();
    const std::size_t ne = empty.site_energies.size();
    for (std::size_t k = 0; k < nf; ++k)
        spec.site_order.push_back({"c" + std::to_string(nf - 1 - k), SiteKind::Fermion});
    const std::size_t d_pos = nf;
    spec.site_order.push_back({"d", SiteKind::Fermion});
    for (std::size_t k = 0; k < ne; ++k)
        spec.site_order.push_back({"b" + std::to_string(k), SiteKind::Fermion});

    spec.quadratic_terms.push_back({QuadKind::Number, d_pos, d_pos, e_imp});
    detail::append_chain(spec, filled, 0, true, -1.0);
    detail::append_chain(spec, empty, d_pos + 1, false);
    if (nf > 0) {
        spec.quadratic_terms.push_back(
            {QuadKind::Hopping, d_pos - 1, d_pos, filled.system_coupling});
        spec.quadratic_terms.push_back(
            {QuadKind::Pairing, d_pos - 1, d_pos, -filled.system_coupling});
    }
    if (ne > 0) {
        spec.quadratic_terms.push_back(
            {QuadKind::Hopping, d_pos, d_pos + 1, empty.system_coupling});
        spec.quadratic_terms.push_back(
            {QuadKind::Pairing, d_pos, d_pos + 1, empty.system_coupling});
    }
    return spec;
}

// Quantum dot: TLS in front of the fermions, H_sys = (Delta/2) sigma_z +
// (v/2) sigma_z n_d + E_imp n_d.
inline FermionHamiltonianSpec build_quantum_dot(double delta, double v, double e_imp,
                                                const ChainParams& chain) {
    FermionHamiltonianSpec spec;
    spec.site_order.push_back({"tls", SiteKind::TwoLevel});
    spec.site_order.push_back({"d", SiteKind::Fermion});
    const std::size_t n = chain.site_energies.size();
    for (std::size_t k = 0; k < n; ++k)
        spec.site_order.push_back({"b" + std::to_string(k), SiteKind::Fermion});

    spec.tls_terms.push_back({0, 0.5 * delta * local_ops::sigma_z()});
    spec.tls_couplings.push_back({0, 1, local_ops::sigma_z(), 0.5 * v});
    spec.quadratic_terms.push_back({QuadKind::Number, 1, 1, e_imp});
    if (n > 0)
        spec.quadratic_terms.push_back({QuadKind::Hopping, 1, 2, chain.system_coupling});
    detail::append_chain(spec, chain, 2, false);
    return spec;
}

// Two coupled dots between two baths, folded as
// [left chain reversed | d_L | d_R | right chain].
inline FermionHamiltonianSpec build_dimer(double h, double delta, double g, double u,
                                          const ChainParams& left, const ChainParams& right) {
    FermionHamiltonianSpec spec;
    const std::size_t nl = left.site_energies.size();
    const std::size_t nr = right.site_energies.size();
    for (std::size_t k = 0; k < nl; ++k)
        spec.site_order.push_back({"l" + std::to_string(nl - 1 - k), SiteKind::Fermion});
    const std::size_t dl = nl, dr = nl + 1;
    spec.site_order.push_back({"dL", SiteKind::Fermion});
    spec.site_order.push_back({"dR", SiteKind::Fermion});
    for (std::size_t k = 0; k < nr; ++k)
        spec.site_order.push_back({"r" + std::to_string(k), SiteKind::Fermion});

    spec.quadratic_terms.push_back({QuadKind::Number, dl, dl, h + 0.5 * delta});
    spec.quadratic_terms.push_back({QuadKind::Number, dr, dr, h - 0.5 * delta});
    spec.quadratic_terms.push_back({QuadKind::Hopping, dl, dr, -0.5 * g});
    if (u != 0.0) spec.density_density_terms.push_back({dl, u});

    detail::append_chain(spec, left, 0, true);
    detail::append_chain(spec, right, dr + 1, false);
    if (nl > 0)
        spec.quadratic_terms.push_back({QuadKind::Hopping, dl - 1, dl, left.system_coupling});
    if (nr > 0)
        spec.quadratic_terms.push_back({QuadKind::Hopping, dr, dr + 1, right.system_coupling});
    return spec;
}

} // namespace fermichain
