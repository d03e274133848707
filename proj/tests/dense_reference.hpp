// dense_reference.hpp — brute-force Fock-space reference implementations used
// as oracles in the tests. Everything here is built independently of the
// Jordan-Wigner code path: creation/annihilation matrices come straight from
// occupation-number bookkeeping with explicit CAR sign factors.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

#include "fermichain/fermionchain.hpp"

namespace dense_ref {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Basis convention matched to the spin chain: site 0 is the most significant
// bit of the basis index, and bit value 0 means OCCUPIED (the spin basis has
// the occupied state first). The string sign counts EMPTY fermionic sites to
// the left, which is the phase assignment of the sigma^z = diag(1, -1)
// Jordan-Wigner representation; it differs from the occupied-count assignment
// only by a diagonal gauge and satisfies the CAR identically (checked in the
// tests).
inline int occupation(std::size_t basis, std::size_t n, std::size_t site) {
    return ((basis >> (n - 1 - site)) & 1u) == 0 ? 1 : 0;
}

inline Matrix dense_annihilator(const std::vector<fermichain::SiteLabel>& order,
                                std::size_t site) {
    const std::size_t n = order.size();
    const std::size_t dim = std::size_t(1) << n;
    Matrix f = Matrix::Zero(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
        if (occupation(b, n, site) == 0) continue;
        int sign = 1;
        for (std::size_t l = 0; l < site; ++l)
            if (order[l].kind == fermichain::SiteKind::Fermion && occupation(b, n, l) == 0)
                sign = -sign;
        const std::size_t target = b | (std::size_t(1) << (n - 1 - site));  // clear occupation
        f(target, b) = static_cast<double>(sign);
    }
    return f;
}

// operator embedded on a single site (works for TLS sites too)
inline Matrix dense_one_site(const std::vector<fermichain::SiteLabel>& order, std::size_t site,
                             const Eigen::Matrix2cd& op) {
    Matrix acc = Matrix::Ones(1, 1);
    for (std::size_t s = 0; s < order.size(); ++s) {
        const Eigen::Matrix2cd m =
            (s == site) ? op : Eigen::Matrix2cd(Eigen::Matrix2cd::Identity());
        acc = fermichain::kron(acc, m);
    }
    return acc;
}

// Hamiltonian of a FermionHamiltonianSpec assembled directly from CAR
// operators (no Jordan-Wigner involved).
inline Matrix dense_fermion_hamiltonian(const fermichain::FermionHamiltonianSpec& spec) {
    const auto& order = spec.site_order;
    const std::size_t dim = std::size_t(1) << order.size();
    Matrix h = Matrix::Zero(dim, dim);
    auto f = [&](std::size_t s) { return dense_annihilator(order, s); };
    for (const auto& t : spec.quadratic_terms) {
        switch (t.kind) {
        case fermichain::QuadKind::Number:
            h += t.coeff.real() * (f(t.i).adjoint() * f(t.i));
            break;
        case fermichain::QuadKind::Hopping: {
            const Matrix m = t.coeff * (f(t.i).adjoint() * f(t.j));
            h += m + m.adjoint();
            break;
        }
        case fermichain::QuadKind::Pairing: {
            const Matrix m = t.coeff * (f(t.i).adjoint() * f(t.j).adjoint());
            h += m + m.adjoint();
            break;
        }
        }
    }
    for (const auto& t : spec.tls_terms) h += dense_one_site(order, t.site, t.op);
    for (const auto& t : spec.tls_couplings)
        h += t.coeff * dense_one_site(order, t.tls_site, t.tls_op) *
             (f(t.fermion_site).adjoint() * f(t.fermion_site));
    for (const auto& t : spec.density_density_terms)
        h += t.coeff * (f(t.i).adjoint() * f(t.i)) * (f(t.i + 1).adjoint() * f(t.i + 1));
    return h;
}

inline Matrix dense_spin_hamiltonian(const fermichain::SpinChainHamiltonian& H) {
    const std::size_t n = H.n_sites;
    const std::size_t dim = std::size_t(1) << n;
    Matrix h = Matrix::Zero(dim, dim);
    auto embed1 = [&](std::size_t site, const Eigen::Matrix2cd& op) {
        Matrix acc = Matrix::Ones(1, 1);
        for (std::size_t s = 0; s < n; ++s)
            acc = fermichain::kron(
                acc, s == site ? op : Eigen::Matrix2cd(Eigen::Matrix2cd::Identity()));
        return acc;
    };
    for (const auto& [site, op] : H.one_site_terms) h += embed1(site, op);
    for (const auto& [site, op] : H.two_site_terms) {
        Matrix acc = Matrix::Ones(1, 1);
        std::size_t s = 0;
        while (s < n) {
            if (s == site) {
                acc = fermichain::kron(acc, Matrix(op));
                s += 2;
            } else {
                acc = fermichain::kron(acc, Matrix(Eigen::Matrix2cd::Identity()));
                s += 1;
            }
        }
        h += acc;
    }
    return h;
}

// total fermion parity (identity on two-level sites)
inline Matrix dense_parity(const std::vector<fermichain::SiteLabel>& order) {
    const std::size_t n = order.size();
    const std::size_t dim = std::size_t(1) << n;
    Matrix p = Matrix::Zero(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
        int sign = 1;
        for (std::size_t s = 0; s < n; ++s)
            if (order[s].kind == fermichain::SiteKind::Fermion && occupation(b, n, s) == 1)
                sign = -sign;
        p(b, b) = static_cast<double>(sign);
    }
    return p;
}

inline Eigen::VectorXd sorted_eigenvalues(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    return es.eigenvalues();
}

// exp(z h) for Hermitian h
inline Matrix hermitian_exp(const Matrix& h, Complex z) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(z * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace dense_ref
