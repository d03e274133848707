// tebd.hpp — Trotterized two-site gate evolution of tensor trains
//
// Operator trains evolve two-sided through 16x16 superoperator gates acting on
// the vectorized physical index: rho -> U rho U^dag (real time),
// rho -> exp(-dt H/2) rho exp(-dt H/2) with trace renormalization (thermal
// preparation) and O -> U^dag O U (Heisenberg picture).
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "fermichain/errors.hpp"
#include "fermichain/fermionchain.hpp"
#include "fermichain/tensor_train.hpp"

namespace fermichain {

struct TrotterScheme {
    int order = 4;  // 2 or 4
    double dt = 0.01;
};

struct StepRecord {
    std::size_t step = 0;
    double time = 0.0;
    std::vector<std::size_t> bond_dims;
    std::size_t parameter_count = 0;
    double cumulative_discarded = 0.0;
};

// called after every step (and once for the initial state)
using TrajectorySink = std::function<void(const StepRecord&, const TensorTrain&)>;

struct EvolutionResult {
    TensorTrain state;
    std::vector<StepRecord> records;
    double cumulative_discarded = 0.0;
};

namespace detail {

// two-site Hamiltonians per bond, with one-site terms split evenly between the
// neighboring bonds (full weight at the chain ends)
inline std::vector<Eigen::Matrix4cd> bond_hamiltonians(const SpinChainHamiltonian& H) {
    if (H.n_sites < 2) throw Error("tebd: need at least two sites");
    const std::size_t nb = H.n_sites - 1;
    std::vector<Eigen::Matrix4cd> h(nb, Eigen::Matrix4cd::Zero());
    for (const auto& [site, op] : H.two_site_terms) {
        if (site + 1 >= H.n_sites) throw Error("tebd: two-site term out of range");
        h[site] += op;
    }
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    for (const auto& [site, op] : H.one_site_terms) {
        if (site >= H.n_sites) throw Error("tebd: one-site term out of range");
        if (site == 0) {
            h[0] += kron2(op, id);
        } else if (site + 1 == H.n_sites) {
            h[nb - 1] += kron2(id, op);
        } else {
            h[site] += 0.5 * kron2(op, id);
            h[site - 1] += 0.5 * kron2(id, op);
        }
    }
    return h;
}

inline Matrix hermitian_gate(const Eigen::Matrix4cd& h, Complex z) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
    Eigen::Vector4cd phases;
    for (int i = 0; i < 4; ++i) phases(i) = std::exp(z * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// superoperator of rho -> A rho B on the vectorized pair index; the row is
// ((2 p_i + q_i), (2 p_j + q_j)) interleaved per site
inline Matrix two_sided_superoperator(const Matrix& A, const Matrix& B) {
    Matrix S(16, 16);
    for (int pi = 0; pi < 2; ++pi)
        for (int qi = 0; qi < 2; ++qi)
            for (int pj = 0; pj < 2; ++pj)
                for (int qj = 0; qj < 2; ++qj)
                    for (int Pi = 0; Pi < 2; ++Pi)
                        for (int Qi = 0; Qi < 2; ++Qi)
                            for (int Pj = 0; Pj < 2; ++Pj)
                                for (int Qj = 0; Qj < 2; ++Qj) {
                                    const int row = (2 * pi + qi) * 4 + (2 * pj + qj);
                                    const int col = (2 * Pi + Qi) * 4 + (2 * Pj + Qj);
                                    S(row, col) = A(2 * pi + pj, 2 * Pi + Pj) *
                                                  B(2 * Qi + Qj, 2 * qi + qj);
                                }
    return S;
}

enum class GateMode { StateReal, StateImaginary, DensityReal, ThermalImaginary, Heisenberg };

inline Matrix make_gate(const Eigen::Matrix4cd& h, double tau, GateMode mode) {
    switch (mode) {
    case GateMode::StateReal:
        return hermitian_gate(h, Complex(0.0, -tau));
    case GateMode::StateImaginary:
        return hermitian_gate(h, Complex(-tau, 0.0));
    case GateMode::DensityReal: {
        const Matrix u = hermitian_gate(h, Complex(0.0, -tau));
        return two_sided_superoperator(u, u.adjoint());
    }
    case GateMode::ThermalImaginary: {
        // symmetric two-sided application of exp(-tau H / 2)
        const Matrix g = hermitian_gate(h, Complex(-0.5 * tau, 0.0));
        return two_sided_superoperator(g, g);
    }
    case GateMode::Heisenberg: {
        const Matrix u = hermitian_gate(h, Complex(0.0, -tau));
        return two_sided_superoperator(u.adjoint(), u);
    }
    }
    throw Error("tebd: unknown gate mode");
}

struct GateApplication {
    std::size_t bond = 0;
    std::size_t gate_index = 0;
};

struct GatePlan {
    std::vector<Matrix> gates;           // one per (bond, tau) pair actually used
    std::vector<GateApplication> order;  // application order within one step
};

// Second-order pattern: evens(tau/2) ascending, odds(tau) descending,
// evens(tau/2) ascending. The fourth-order scheme is the symmetric
// Suzuki composition of second-order steps with p = 1/(4 - 4^(1/3)).
// All patterns are palindromic as operator products, so the same order is
// valid for Heisenberg conjugation.
inline GatePlan build_plan(const std::vector<Eigen::Matrix4cd>& bonds,
                           const TrotterScheme& scheme, GateMode mode) {
    if (scheme.dt <= 0.0) throw Error("tebd: step width must be positive");
    if (scheme.order != 2 && scheme.order != 4)
        throw Error("tebd: Trotter order must be 2 or 4");
    const std::size_t nb = bonds.size();

    GatePlan plan;
    std::vector<std::pair<std::size_t, double>> taus;  // gate index lookup by (bond, tau)
    auto gate_for = [&](std::size_t bond, double tau) {
        for (std::size_t k = 0; k < taus.size(); ++k)
            if (taus[k].first == bond && taus[k].second == tau) return k;
        taus.emplace_back(bond, tau);
        plan.gates.push_back(make_gate(bonds[bond], tau, mode));
        return plan.gates.size() - 1;
    };
    auto append_s2 = [&](double tau) {
        for (std::size_t b = 0; b < nb; b += 2) plan.order.push_back({b, gate_for(b, 0.5 * tau)});
        for (std::size_t k = nb; k-- > 0;)
            if (k % 2 == 1) plan.order.push_back({k, gate_for(k, tau)});
        for (std::size_t b = 0; b < nb; b += 2) plan.order.push_back({b, gate_for(b, 0.5 * tau)});
    };

    if (scheme.order == 2) {
        append_s2(scheme.dt);
    } else {
        const double p = 1.0 / (4.0 - std::pow(4.0, 1.0 / 3.0));
        append_s2(p * scheme.dt);
        append_s2(p * scheme.dt);
        append_s2((1.0 - 4.0 * p) * scheme.dt);
        append_s2(p * scheme.dt);
        append_s2(p * scheme.dt);
    }
    return plan;
}

// apply one gate at the given bond; center management is the caller's job
inline detail::SplitResult apply_gate(TensorTrain& t, std::size_t bond, const Matrix& gate,
                                      const TruncationPolicy& policy, bool center_right) {
    auto& a = t.site(bond);
    auto& b = t.site(bond + 1);
    const Eigen::Index d = t.local_dim();
    const Eigen::Index Dl = a.left(), Dr = b.right();
    const Matrix theta = merge_two_sites(a, b);
    Matrix out = Matrix::Zero(theta.rows(), theta.cols());
    for (Eigen::Index p = 0; p < d; ++p)
        for (Eigen::Index q = 0; q < d; ++q) {
            Matrix block = Matrix::Zero(Dl, Dr);
            for (Eigen::Index pp = 0; pp < d; ++pp)
                for (Eigen::Index qq = 0; qq < d; ++qq) {
                    const Complex g = gate(p * d + q, pp * d + qq);
                    if (g != 0.0) block += g * theta.block(pp * Dl, qq * Dr, Dl, Dr);
                }
            out.block(p * Dl, q * Dr, Dl, Dr) = block;
        }
    const auto res = split_two_sites(out, d, Dl, Dr, policy, center_right, a, b);
    t.set_center(static_cast<int>(center_right ? bond + 1 : bond));
    return res;
}

} // namespace detail

// Trotterized evolution for total_time in steps of scheme.dt. Mode selection:
// states evolve under U(dt) (or exp(-dt H) with renormalization when
// `imaginary`); operator trains evolve two-sided as rho -> U rho U^dag,
// rho -> exp(-dt H/2) rho exp(-dt H/2) with trace renormalization when
// `imaginary`, or O -> U^dag O U when `heisenberg`.
inline EvolutionResult tebd_evolve(TensorTrain state, const SpinChainHamiltonian& H,
                                   double total_time, const TrotterScheme& scheme,
                                   const TruncationPolicy& policy, bool imaginary = false,
                                   bool heisenberg = false,
                                   const TrajectorySink& sink = nullptr) {
    if (state.size() != H.n_sites)
        throw SiteMismatchError("tebd_evolve: state and Hamiltonian site counts differ");
    if (heisenberg && state.kind() != TrainKind::Operator)
        throw Error("tebd_evolve: Heisenberg evolution needs an operator train");
    if (heisenberg && imaginary)
        throw Error("tebd_evolve: Heisenberg imaginary evolution is not defined");

    detail::GateMode mode;
    if (state.kind() == TrainKind::State)
        mode = imaginary ? detail::GateMode::StateImaginary : detail::GateMode::StateReal;
    else if (heisenberg)
        mode = detail::GateMode::Heisenberg;
    else
        mode = imaginary ? detail::GateMode::ThermalImaginary : detail::GateMode::DensityReal;

    const auto bonds = detail::bond_hamiltonians(H);
    const auto plan = detail::build_plan(bonds, scheme, mode);

    const std::size_t n_steps =
        static_cast<std::size_t>(std::llround(total_time / scheme.dt));

    EvolutionResult result;
    result.state = std::move(state);
    double cumulative = 0.0;

    auto record = [&](std::size_t step) {
        StepRecord r;
        r.step = step;
        r.time = static_cast<double>(step) * scheme.dt;
        r.bond_dims = result.state.bond_dims();
        r.parameter_count = result.state.parameter_count();
        r.cumulative_discarded = cumulative;
        result.records.push_back(r);
        if (sink) sink(result.records.back(), result.state);
    };
    record(0);

    for (std::size_t step = 1; step <= n_steps; ++step) {
        for (std::size_t k = 0; k < plan.order.size(); ++k) {
            const auto& app = plan.order[k];
            move_center(result.state, app.bond);
            const bool toward_right =
                (k + 1 < plan.order.size()) ? plan.order[k + 1].bond > app.bond : false;
            const auto res = detail::apply_gate(result.state, app.bond, plan.gates[app.gate_index],
                                                policy, toward_right);
            cumulative += res.discarded;
            if (res.xi_bound && res.discarded > 100.0 * policy.epsilon)
                throw PolicyExhaustedError(
                    "tebd_evolve: bond hit the rank cap with discarded weight above "
                    "100x epsilon at step " +
                    std::to_string(step));
        }
        if (imaginary) {
            if (result.state.kind() == TrainKind::State) {
                const double nrm = norm(result.state);
                if (nrm > 0.0) result.state.scale(1.0 / nrm);
            } else {
                const Complex tr = trace(result.state);
                if (std::abs(tr) > 0.0) result.state.scale(1.0 / tr);
            }
        }
        record(step);
    }
    result.cumulative_discarded = cumulative;
    return result;
}

} // namespace fermichain
