// dmrg.hpp — Hamiltonian MPOs and two-site variational ground-state search
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "fermichain/errors.hpp"
#include "fermichain/fermionchain.hpp"
#include "fermichain/tensor_train.hpp"

namespace fermichain {

namespace detail {

// operator Schmidt decomposition of a two-site term: M = sum_k L_k (x) R_k
inline std::vector<std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd>> split_two_site_term(
    const Eigen::Matrix4cd& m) {
    Matrix k(4, 4);  // rows (p_i, q_i), cols (p_j, q_j)
    for (int pi = 0; pi < 2; ++pi)
        for (int qi = 0; qi < 2; ++qi)
            for (int pj = 0; pj < 2; ++pj)
                for (int qj = 0; qj < 2; ++qj)
                    k(2 * pi + qi, 2 * pj + qj) = m(2 * pi + pj, 2 * qi + qj);
    Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
    std::vector<std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd>> terms;
    for (int r = 0; r < 4; ++r) {
        const double s = svd.singularValues()(r);
        if (s < 1e-14) continue;
        Eigen::Matrix2cd L, R;
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) {
                L(p, q) = std::sqrt(s) * svd.matrixU()(2 * p + q, r);
                R(p, q) = std::sqrt(s) * std::conj(svd.matrixV()(2 * p + q, r));
            }
        terms.emplace_back(L, R);
    }
    return terms;
}

} // namespace detail

// MPO of a nearest-neighbor Hamiltonian built as the usual finite-state
// machine: bond states [not-started | in-progress terms | done].
inline TensorTrain hamiltonian_mpo(const SpinChainHamiltonian& H) {
    const std::size_t n = H.n_sites;
    if (n == 0) throw Error("hamiltonian_mpo: empty chain");
    std::vector<Eigen::Matrix2cd> one(n, Eigen::Matrix2cd::Zero());
    for (const auto& [site, op] : H.one_site_terms) one[site] += op;
    std::vector<std::vector<std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd>>> bonds(
        n > 0 ? n - 1 : 0);
    for (const auto& [site, op] : H.two_site_terms) {
        auto terms = detail::split_two_site_term(op);
        bonds[site].insert(bonds[site].end(), terms.begin(), terms.end());
    }

    std::vector<TensorTrain::Site> sites(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t kl = (i == 0) ? 0 : bonds[i - 1].size();
        const std::size_t kr = (i + 1 == n) ? 0 : bonds[i].size();
        const Eigen::Index Dl = (i == 0) ? 1 : static_cast<Eigen::Index>(2 + kl);
        const Eigen::Index Dr = (i + 1 == n) ? 1 : static_cast<Eigen::Index>(2 + kr);
        // row/col order: [S, P_1..P_k, C]; first site exposes row S only,
        // last site exposes column C only
        std::vector<Matrix> w(4, Matrix::Zero(Dl, Dr));
        auto put = [&](Eigen::Index r, Eigen::Index c, const Eigen::Matrix2cd& op) {
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) w[2 * p + q](r, c) += op(p, q);
        };
        const Eigen::Index row_s = 0;
        const Eigen::Index col_c = Dr - 1;
        const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
        if (i + 1 < n) {
            put(row_s, 0, id);  // nothing started yet
            for (std::size_t k = 0; k < kr; ++k)
                put(row_s, 1 + static_cast<Eigen::Index>(k), bonds[i][k].first);
        }
        put(row_s, col_c, one[i]);
        if (i > 0) {
            for (std::size_t k = 0; k < kl; ++k)
                put(1 + static_cast<Eigen::Index>(k), col_c, bonds[i - 1][k].second);
            put(Dl - 1, col_c, id);  // term already complete
        }
        sites[i].mats = std::move(w);
    }
    return TensorTrain(TrainKind::Operator, std::move(sites));
}

struct DmrgResult {
    TensorTrain state;
    double energy = 0.0;
    bool converged = false;          // advisory: last-sweep energy change <= 1e-10
    double last_sweep_change = 0.0;
    std::vector<double> sweep_energies;
};

namespace detail {

// environments: env[w] is (bra bond) x (ket bond)
using Environment = std::vector<Matrix>;

inline Environment contract_left(const Environment& L, const TensorTrain::Site& A,
                                 const TensorTrain::Site& W) {
    const std::size_t wr = static_cast<std::size_t>(W.mats[0].cols());
    const std::size_t wl = static_cast<std::size_t>(W.mats[0].rows());
    Environment next(wr, Matrix::Zero(A.right(), A.right()));
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            const Matrix& w = W.mats[2 * p + q];
            for (std::size_t a = 0; a < wl; ++a) {
                const Matrix t = A.mats[p].adjoint() * L[a];
                for (std::size_t b = 0; b < wr; ++b)
                    if (w(a, b) != 0.0) next[b] += w(a, b) * (t * A.mats[q]);
            }
        }
    return next;
}

inline Environment contract_right(const Environment& R, const TensorTrain::Site& A,
                                  const TensorTrain::Site& W) {
    const std::size_t wl = static_cast<std::size_t>(W.mats[0].rows());
    const std::size_t wr = static_cast<std::size_t>(W.mats[0].cols());
    Environment next(wl, Matrix::Zero(A.left(), A.left()));
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            const Matrix& w = W.mats[2 * p + q];
            for (std::size_t b = 0; b < wr; ++b) {
                const Matrix t = A.mats[p].conjugate() * R[b] * A.mats[q].transpose();
                for (std::size_t a = 0; a < wl; ++a)
                    if (w(a, b) != 0.0) next[a] += w(a, b) * t;
            }
        }
    return next;
}

// effective two-site Hamiltonian acting on theta stored as 4 matrices T[pq]
struct TwoSiteProblem {
    const Environment* L;
    const Environment* R;
    const TensorTrain::Site* Wl;
    const TensorTrain::Site* Wr;
    Eigen::Index Dl, Dr;

    Eigen::Index dim() const { return 4 * Dl * Dr; }

    Vector apply(const Vector& x) const {
        const std::size_t wl = static_cast<std::size_t>(Wl->mats[0].rows());
        const std::size_t wm = static_cast<std::size_t>(Wl->mats[0].cols());
        const std::size_t wr = static_cast<std::size_t>(Wr->mats[0].cols());
        auto block = [&](const Vector& v, int p, int q) {
            return Eigen::Map<const Matrix>(v.data() + (2 * p + q) * Dl * Dr, Dl, Dr);
        };
        // stage 1: attach the right environment
        std::vector<std::vector<Matrix>> u(
            wr, std::vector<Matrix>(4, Matrix::Zero(Dl, Dr)));
        for (std::size_t b = 0; b < wr; ++b)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) u[b][2 * p + q] = block(x, p, q) * (*R)[b].transpose();
        // stage 2: right-site operator
        std::vector<std::vector<Matrix>> v(
            wm, std::vector<Matrix>(4, Matrix::Zero(Dl, Dr)));
        for (std::size_t m = 0; m < wm; ++m)
            for (std::size_t b = 0; b < wr; ++b)
                for (int qb = 0; qb < 2; ++qb)
                    for (int q = 0; q < 2; ++q) {
                        const Complex c = Wr->mats[2 * qb + q](m, b);
                        if (c == 0.0) continue;
                        for (int p = 0; p < 2; ++p) v[m][2 * p + qb] += c * u[b][2 * p + q];
                    }
        // stage 3: left-site operator
        std::vector<std::vector<Matrix>> z(
            wl, std::vector<Matrix>(4, Matrix::Zero(Dl, Dr)));
        for (std::size_t a = 0; a < wl; ++a)
            for (std::size_t m = 0; m < wm; ++m)
                for (int pb = 0; pb < 2; ++pb)
                    for (int p = 0; p < 2; ++p) {
                        const Complex c = Wl->mats[2 * pb + p](a, m);
                        if (c == 0.0) continue;
                        for (int q = 0; q < 2; ++q) z[a][2 * pb + q] += c * v[m][2 * p + q];
                    }
        // stage 4: attach the left environment
        Vector y = Vector::Zero(x.size());
        for (std::size_t a = 0; a < wl; ++a)
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    Eigen::Map<Matrix>(y.data() + (2 * p + q) * Dl * Dr, Dl, Dr) +=
                        (*L)[a] * z[a][2 * p + q];
        return y;
    }
};

// Lanczos with full reorthogonalization; returns the lowest Ritz pair.
// Restarts from the current Ritz vector when the basis hits `restart`.
inline std::pair<double, Vector> lanczos_lowest(const TwoSiteProblem& prob, Vector v0,
                                                double tol = 1e-12, int max_iter = 200,
                                                int restart = 60) {
    double nrm = v0.norm();
    if (nrm == 0.0) {
        v0 = Vector::Random(prob.dim());
        nrm = v0.norm();
    }
    v0 /= nrm;
    double theta_prev = std::numeric_limits<double>::infinity();
    int done = 0;
    Vector ritz = v0;
    while (done < max_iter) {
        std::vector<Vector> basis;
        std::vector<double> alpha, beta;
        basis.push_back(ritz);
        Vector w;
        double theta = theta_prev;
        Eigen::VectorXd ground;
        for (int it = 0; it < restart && done < max_iter; ++it, ++done) {
            w = prob.apply(basis.back());
            const double a = std::real(basis.back().dot(w));
            alpha.push_back(a);
            w -= a * basis.back();
            if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
            for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
            // tridiagonal Ritz problem
            const int k = static_cast<int>(alpha.size());
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
            for (int i = 0; i + 1 < k; ++i)
                t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            theta = es.eigenvalues()(0);
            ground = es.eigenvectors().col(0);
            const double b = w.norm();
            if (std::abs(theta - theta_prev) < tol * std::max(1.0, std::abs(theta)) || b < 1e-14) {
                ritz = Vector::Zero(prob.dim());
                for (int i = 0; i < k; ++i) ritz += ground(i) * basis[static_cast<std::size_t>(i)];
                ritz.normalize();
                return {theta, ritz};
            }
            theta_prev = theta;
            beta.push_back(b);
            basis.push_back(w / b);
        }
        ritz = Vector::Zero(prob.dim());
        for (std::size_t i = 0; i < alpha.size(); ++i) ritz += ground(static_cast<int>(i)) * basis[i];
        ritz.normalize();
    }
    return {theta_prev, ritz};
}

} // namespace detail

// Two-site variational ground-state sweeps. The returned energy is the exact
// expectation value of the final (truncated) state, so it is variational.
inline DmrgResult dmrg_ground_state(const SpinChainHamiltonian& H, std::size_t sweeps,
                                    const TruncationPolicy& policy) {
    const std::size_t n = H.n_sites;
    if (n == 0) throw Error("dmrg_ground_state: empty chain");
    DmrgResult out;

    if (n == 1) {
        Eigen::Matrix2cd h = Eigen::Matrix2cd::Zero();
        for (const auto& [site, op] : H.one_site_terms) h += op;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
        out.energy = es.eigenvalues()(0);
        out.state = TensorTrain::product_state({es.eigenvectors().col(0)});
        out.converged = true;
        out.sweep_energies.push_back(out.energy);
        return out;
    }

    const TensorTrain mpo = hamiltonian_mpo(H);

    // deterministic random product start
    std::mt19937 rng(0x5eedu);
    std::normal_distribution<double> dist;
    std::vector<Eigen::Vector2cd> kets(n);
    for (auto& k : kets) {
        k = Eigen::Vector2cd(Complex(dist(rng), dist(rng)), Complex(dist(rng), dist(rng)));
        k.normalize();
    }
    TensorTrain psi = TensorTrain::product_state(kets);
    canonicalize(psi, 0);

    // right environments for bonds 1..n-1; envs[i] covers sites >= i
    std::vector<detail::Environment> renv(n + 1);
    renv[n] = detail::Environment(1, Matrix::Ones(1, 1));
    for (std::size_t i = n; i-- > 2;)
        renv[i] = detail::contract_right(renv[i + 1], psi.site(i), mpo.site(i));
    std::vector<detail::Environment> lenv(n + 1);
    lenv[0] = detail::Environment(1, Matrix::Ones(1, 1));

    double energy = 0.0;
    double prev_sweep_energy = std::numeric_limits<double>::infinity();
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        auto optimize = [&](std::size_t i, bool to_right) {
            detail::TwoSiteProblem prob;
            prob.L = &lenv[i];
            prob.R = &renv[i + 2];
            prob.Wl = &mpo.site(i);
            prob.Wr = &mpo.site(i + 1);
            prob.Dl = psi.site(i).left();
            prob.Dr = psi.site(i + 1).right();
            // current theta as the Lanczos start vector
            Vector v0(prob.dim());
            const Matrix theta = detail::merge_two_sites(psi.site(i), psi.site(i + 1));
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    Eigen::Map<Matrix>(v0.data() + (2 * p + q) * prob.Dl * prob.Dr, prob.Dl,
                                       prob.Dr) =
                        theta.block(p * prob.Dl, q * prob.Dr, prob.Dl, prob.Dr);
            auto [lambda, ground] = detail::lanczos_lowest(prob, std::move(v0));
            energy = lambda;
            Matrix new_theta(2 * prob.Dl, 2 * prob.Dr);
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    new_theta.block(p * prob.Dl, q * prob.Dr, prob.Dl, prob.Dr) =
                        Eigen::Map<const Matrix>(ground.data() + (2 * p + q) * prob.Dl * prob.Dr,
                                                 prob.Dl, prob.Dr);
            detail::split_two_sites(new_theta, 2, prob.Dl, prob.Dr, policy, to_right,
                                    psi.site(i), psi.site(i + 1));
            psi.set_center(static_cast<int>(to_right ? i + 1 : i));
            if (to_right)
                lenv[i + 1] = detail::contract_left(lenv[i], psi.site(i), mpo.site(i));
            else
                renv[i + 1] = detail::contract_right(renv[i + 2], psi.site(i + 1), mpo.site(i + 1));
        };
        for (std::size_t i = 0; i + 1 < n; ++i) optimize(i, true);
        for (std::size_t i = n - 1; i-- > 0;) optimize(i, false);
        out.sweep_energies.push_back(energy);
        out.last_sweep_change = std::abs(prev_sweep_energy - energy);
        prev_sweep_energy = energy;
    }
    out.converged = out.last_sweep_change <= 1e-10;

    const double nrm = norm(psi);
    if (nrm > 0.0) psi.scale(1.0 / nrm);
    out.energy = std::real(expectation(psi, mpo));
    out.state = std::move(psi);
    return out;
}

} // namespace fermichain
