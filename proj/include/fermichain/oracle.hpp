// oracle.hpp — free-fermion exact-diagonalization reference
//
// Correlation-matrix statics and dynamics for quadratic Hamiltonians:
// C_{kl} = <f_k^dag f_l> captures the full state of any Gaussian system.
// Pairing terms (the factorized-coupling models) evolve through the doubled
// Nambu covariance. Everything here is independent of the tensor-network
// code paths and serves as the ground truth for the U = 0 tests.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "fermichain/chainmap.hpp"
#include "fermichain/errors.hpp"
#include "fermichain/spectral.hpp"

namespace fermichain {

namespace detail {

inline void check_hermitian(const Matrix& h, const char* what) {
    if (h.rows() != h.cols() || (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error(std::string(what) + ": matrix is not Hermitian");
}

inline Matrix unitary_exp(const Matrix& h, Complex z) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(z * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace detail

// ---- linear bath discretization ------------------------------------------------

struct LinearDiscretization {
    std::vector<double> energies;   // bin midpoints
    std::vector<double> couplings;  // sqrt of bin mass of J / pi
};

inline LinearDiscretization linear_discretize(const SpectralDensity& J, std::size_t n_ed) {
    if (n_ed < 2) throw std::invalid_argument("linear_discretize: need at least 2 bins");
    const Interval sup = J.support();
    LinearDiscretization out;
    const double width = sup.width() / static_cast<double>(n_ed);
    for (std::size_t k = 0; k < n_ed; ++k) {
        const double lo = sup.lo + width * static_cast<double>(k);
        const double hi = lo + width;
        // graded panels keep endpoint-singular densities (Newns) accurate
        const auto bp = detail::graded_breakpoints(lo, hi, 10, 4.0);
        const auto rule = detail::panelled_rule(bp, 24);
        double mass = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            mass += rule.weights[i] * J(rule.nodes[i]) / M_PI;
        out.energies.push_back(0.5 * (lo + hi));
        out.couplings.push_back(std::sqrt(std::max(0.0, mass)));
    }
    return out;
}

// impurity at index 0 hybridized with every bath mode (star geometry)
inline Matrix star_matrix(double e_imp, const std::vector<double>& energies,
                          const std::vector<double>& couplings) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(energies.size());
    Matrix h = Matrix::Zero(m, m);
    h(0, 0) = e_imp;
    for (Eigen::Index k = 1; k < m; ++k) {
        h(k, k) = energies[static_cast<std::size_t>(k - 1)];
        h(0, k) = h(k, 0) = couplings[static_cast<std::size_t>(k - 1)];
    }
    return h;
}

// single-particle matrix of a mapped chain including the system site in front
inline Matrix chain_matrix(double e_imp, const ChainParams& chain) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(chain.site_energies.size());
    Matrix h = Matrix::Zero(m, m);
    h(0, 0) = e_imp;
    for (Eigen::Index k = 1; k < m; ++k)
        h(k, k) = chain.site_energies[static_cast<std::size_t>(k - 1)];
    if (m > 1) h(0, 1) = h(1, 0) = chain.system_coupling;
    for (Eigen::Index k = 1; k + 1 < m; ++k)
        h(k, k + 1) = h(k + 1, k) = chain.hoppings[static_cast<std::size_t>(k - 1)];
    return h;
}

// ---- correlation matrices ------------------------------------------------------

// C = V f(Lambda) V^dag with a step filling at mu; eigenvalues within 1e-12 of
// mu are half-filled and flag the advisory.
inline Matrix ground_correlation(const Matrix& h, double mu, bool* degenerate_fermi = nullptr) {
    detail::check_hermitian(h, "ground_correlation");
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector occ(es.eigenvalues().size());
    if (degenerate_fermi) *degenerate_fermi = false;
    for (Eigen::Index i = 0; i < occ.size(); ++i) {
        const double lambda = es.eigenvalues()(i);
        if (std::abs(lambda - mu) < 1e-12) {
            occ(i) = 0.5;
            if (degenerate_fermi) *degenerate_fermi = true;
        } else {
            occ(i) = lambda < mu ? 1.0 : 0.0;
        }
    }
    return es.eigenvectors() * occ.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix thermal_correlation(const Matrix& h, const ThermalParameters& p) {
    detail::check_hermitian(h, "thermal_correlation");
    if (p.zero_temperature()) return ground_correlation(h, p.mu);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector occ(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < occ.size(); ++i) occ(i) = fermi_dirac(es.eigenvalues()(i), p);
    return es.eigenvectors() * occ.asDiagonal() * es.eigenvectors().adjoint();
}

// C(t) = exp(i H t) C exp(-i H t); the sign convention is pinned by the
// two-mode Rabi test (occupation of the initially filled site follows
// cos^2(t1 t)).
inline Matrix evolve_correlation(const Matrix& c, const Matrix& h, double t) {
    detail::check_hermitian(h, "evolve_correlation");
    const Matrix u = detail::unitary_exp(h, Complex(0.0, t));
    return u * c * u.adjoint();
}

// ---- pairing (Nambu) evolution -------------------------------------------------

// H = sum h_ij f_i^dag f_j + 1/2 sum (Delta_ij f_i^dag f_j^dag + h.c.),
// Delta antisymmetric
struct NambuState {
    Matrix c;  // <f_k^dag f_l>
    Matrix f;  // <f_k f_l>
};

inline NambuState evolve_nambu(const NambuState& state, const Matrix& h, const Matrix& delta,
                               double t) {
    detail::check_hermitian(h, "evolve_nambu");
    const Eigen::Index m = h.rows();
    if ((delta + delta.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw Error("evolve_nambu: pairing matrix must be antisymmetric");
    Matrix big = Matrix::Zero(2 * m, 2 * m);
    big.topLeftCorner(m, m) = h;
    big.topRightCorner(m, m) = delta;
    big.bottomLeftCorner(m, m) = -delta.conjugate();
    big.bottomRightCorner(m, m) = -h.transpose();

    // covariance Sigma = <Psi Psi^dag> with Psi = (f, f^dag)
    Matrix sigma = Matrix::Zero(2 * m, 2 * m);
    sigma.topLeftCorner(m, m) = Matrix::Identity(m, m) - state.c.transpose();
    sigma.topRightCorner(m, m) = state.f;
    sigma.bottomLeftCorner(m, m) = state.f.adjoint();
    sigma.bottomRightCorner(m, m) = state.c;

    const Matrix w = detail::unitary_exp(big, Complex(0.0, -t));
    const Matrix out = w * sigma * w.adjoint();
    NambuState next;
    next.c = out.bottomRightCorner(m, m);
    next.f = out.topRightCorner(m, m);
    return next;
}

// star matrices of the factorized coupling (d^dag - d) sum_k c_k (f_k + f_k^dag)
inline std::pair<Matrix, Matrix> star_nambu_factorized(double e_imp,
                                                       const std::vector<double>& energies,
                                                       const std::vector<double>& couplings) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(energies.size());
    Matrix h = star_matrix(e_imp, energies, couplings);
    Matrix delta = Matrix::Zero(m, m);
    for (Eigen::Index k = 1; k < m; ++k) {
        delta(0, k) = couplings[static_cast<std::size_t>(k - 1)];
        delta(k, 0) = -couplings[static_cast<std::size_t>(k - 1)];
    }
    return {h, delta};
}

// ---- determinant-formula dephasing ---------------------------------------------

// |det(1 - C0 + C0 e^{i H0 t} e^{-i H1 t})|: the coherence of a two-level
// system whose two branches evolve the Gaussian environment under H0 and H1.
inline double dephasing_coherence(const Matrix& c0, const Matrix& h0, const Matrix& h1,
                                  double t) {
    detail::check_hermitian(h0, "dephasing_coherence");
    detail::check_hermitian(h1, "dephasing_coherence");
    if (t == 0.0) return 1.0;
    const Eigen::Index m = c0.rows();
    const Matrix w = detail::unitary_exp(h0, Complex(0.0, t)) *
                     detail::unitary_exp(h1, Complex(0.0, -t));
    const Matrix arg = Matrix::Identity(m, m) - c0 + c0 * w;
    return std::abs(arg.determinant());
}

// ---- thermalized two-time correlation equivalence ------------------------------

// C2 computed two independent ways: Fourier quadrature of the thermalized
// density over [-wmax, wmax] versus the Fermi-factor form over [0, wmax].
// Returns the maximum absolute deviation over the time grid.
inline double thermal_equivalence_check(const SpectralDensity& J, double beta,
                                        const std::vector<double>& t_grid) {
    const auto jb = thermalized_density(J, ThermalParameters{beta, 0.0});
    const auto ma = discretize_measure(jb, 6144);
    const auto mb = discretize_measure(J, 4096);
    const ThermalParameters p{beta, 0.0};

    double dev = 0.0;
    for (double t : t_grid) {
        Complex c2a{0.0, 0.0};
        for (std::size_t i = 0; i < ma.nodes.size(); ++i)
            c2a += ma.weights[i] * std::exp(Complex(0.0, -ma.nodes[i] * t));
        Complex c2b{0.0, 0.0};
        for (std::size_t i = 0; i < mb.nodes.size(); ++i) {
            const double n = fermi_dirac(mb.nodes[i], p);
            c2b += mb.weights[i] * (n * std::exp(Complex(0.0, mb.nodes[i] * t)) +
                                    (1.0 - n) * std::exp(Complex(0.0, -mb.nodes[i] * t)));
        }
        dev = std::max(dev, std::abs(c2a - c2b));
    }
    return dev;
}

// ---- cached trajectories (one eigendecomposition, many times) -------------------

// entries of exp(i h t) C0 exp(-i h t) with the eigendecomposition done once
class CorrelationTrajectory {
public:
    CorrelationTrajectory(const Matrix& h, const Matrix& c0) : es_(h) {
        detail::check_hermitian(h, "CorrelationTrajectory");
        c0_eig_ = es_.eigenvectors().adjoint() * c0 * es_.eigenvectors();
    }

    Complex entry(std::size_t i, std::size_t j, double t) const {
        const Eigen::Index m = es_.eigenvalues().size();
        Vector x(m), y(m);
        for (Eigen::Index a = 0; a < m; ++a) {
            x(a) = es_.eigenvectors()(static_cast<Eigen::Index>(i), a) *
                   std::exp(Complex(0.0, es_.eigenvalues()(a) * t));
            y(a) = std::conj(es_.eigenvectors()(static_cast<Eigen::Index>(j), a)) *
                   std::exp(Complex(0.0, -es_.eigenvalues()(a) * t));
        }
        return (x.transpose() * c0_eig_ * y)(0, 0);
    }

private:
    Eigen::SelfAdjointEigenSolver<Matrix> es_;
    Matrix c0_eig_;
};

// entries of the Nambu covariance evolution W Sigma W^dag, W = exp(-i M_BdG t)
class NambuTrajectory {
public:
    NambuTrajectory(const NambuState& state, const Matrix& h, const Matrix& delta) {
        const Eigen::Index m = h.rows();
        modes_ = m;
        Matrix big = Matrix::Zero(2 * m, 2 * m);
        big.topLeftCorner(m, m) = h;
        big.topRightCorner(m, m) = delta;
        big.bottomLeftCorner(m, m) = -delta.conjugate();
        big.bottomRightCorner(m, m) = -h.transpose();
        es_.compute(big);
        Matrix sigma = Matrix::Zero(2 * m, 2 * m);
        sigma.topLeftCorner(m, m) = Matrix::Identity(m, m) - state.c.transpose();
        sigma.topRightCorner(m, m) = state.f;
        sigma.bottomLeftCorner(m, m) = state.f.adjoint();
        sigma.bottomRightCorner(m, m) = state.c;
        sigma_eig_ = es_.eigenvectors().adjoint() * sigma * es_.eigenvectors();
    }

    // <f_i^dag f_j>(t): block (modes + i, modes + j) of the covariance
    Complex occupation_entry(std::size_t i, std::size_t j, double t) const {
        const Eigen::Index a = modes_ + static_cast<Eigen::Index>(i);
        const Eigen::Index b = modes_ + static_cast<Eigen::Index>(j);
        const Eigen::Index dim = es_.eigenvalues().size();
        Vector x(dim), y(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            x(k) = es_.eigenvectors()(a, k) * std::exp(Complex(0.0, -es_.eigenvalues()(k) * t));
            y(k) = std::conj(es_.eigenvectors()(b, k)) *
                   std::exp(Complex(0.0, es_.eigenvalues()(k) * t));
        }
        return (x.transpose() * sigma_eig_ * y)(0, 0);
    }

private:
    Eigen::Index modes_ = 0;
    Eigen::SelfAdjointEigenSolver<Matrix> es_;
    Matrix sigma_eig_;
};

// |det(1 - C0 + C0 W(t))| with both branch eigendecompositions cached
class DephasingTrajectory {
public:
    DephasingTrajectory(const Matrix& c0, const Matrix& h0, const Matrix& h1)
        : c0_(c0), es0_(h0), es1_(h1) {}

    double coherence(double t) const {
        if (t == 0.0) return 1.0;
        const Matrix u0 = phase(es0_, t);
        const Matrix u1 = phase(es1_, -t);
        const Eigen::Index m = c0_.rows();
        const Matrix arg = Matrix::Identity(m, m) - c0_ + c0_ * (u0 * u1);
        return std::abs(arg.determinant());
    }

private:
    static Matrix phase(const Eigen::SelfAdjointEigenSolver<Matrix>& es, double t) {
        Vector ph(es.eigenvalues().size());
        for (Eigen::Index i = 0; i < ph.size(); ++i)
            ph(i) = std::exp(Complex(0.0, es.eigenvalues()(i) * t));
        return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    }

    Matrix c0_;
    Eigen::SelfAdjointEigenSolver<Matrix> es0_;
    Eigen::SelfAdjointEigenSolver<Matrix> es1_;
};

// ---- Heisenberg-picture ladder coefficients ------------------------------------

// f_m^dag(t) = sum_l b_l f_l^dag for number-conserving h, with
// b = [e^{i h t}] column m; the alpha vector is zero.
inline std::pair<Vector, Vector> heisenberg_ladder_coefficients(const Matrix& h, std::size_t m,
                                                                double t) {
    detail::check_hermitian(h, "heisenberg_ladder_coefficients");
    const Matrix u = detail::unitary_exp(h, Complex(0.0, t));
    Vector a = Vector::Zero(h.rows());
    Vector b = u.col(static_cast<Eigen::Index>(m));
    return {a, b};
}

} // namespace fermichain
