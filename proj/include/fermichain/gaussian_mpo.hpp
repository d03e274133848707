// gaussian_mpo.hpp — exact constant-bond-dimension MPOs for Heisenberg-evolved
// ladder operators of quadratic Hamiltonians
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "fermichain/errors.hpp"
#include "fermichain/tensor_train.hpp"

namespace fermichain {

// MPO of sum_l (string of sigma^z left of l) (a_l sigma^-_l + b_l sigma^+_l),
// i.e. the Jordan-Wigner image of sum_l (a_l f_l + b_l f_l^dag). Every bond
// has dimension exactly 2: the block pattern is
//   W_1 = [G_1, sigma^z],  W_l = [[1, 0], [G_l, sigma^z]],  W_n = [[1], [G_n]]
// with G_l = a_l sigma^- + b_l sigma^+.
inline TensorTrain gaussian_heisenberg_mpo(const Vector& a, const Vector& b) {
    const std::size_t n = static_cast<std::size_t>(a.size());
    if (n == 0 || b.size() != a.size())
        throw SiteMismatchError("gaussian_heisenberg_mpo: coefficient lengths differ");
    using namespace local_ops;

    auto g_of = [&](std::size_t l) {
        return Eigen::Matrix2cd(a(static_cast<Eigen::Index>(l)) * sigma_minus() +
                                b(static_cast<Eigen::Index>(l)) * sigma_plus());
    };

    std::vector<TensorTrain::Site> sites(n);
    if (n == 1) {
        sites[0].mats.assign(4, Matrix::Zero(1, 1));
        const Eigen::Matrix2cd g = g_of(0);
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) sites[0].mats[2 * p + q](0, 0) = g(p, q);
        return TensorTrain(TrainKind::Operator, std::move(sites));
    }
    auto put = [](TensorTrain::Site& s, Eigen::Index r, Eigen::Index c,
                  const Eigen::Matrix2cd& op) {
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) s.mats[2 * p + q](r, c) += op(p, q);
    };
    for (std::size_t l = 0; l < n; ++l) {
        const Eigen::Index Dl = (l == 0) ? 1 : 2;
        const Eigen::Index Dr = (l + 1 == n) ? 1 : 2;
        sites[l].mats.assign(4, Matrix::Zero(Dl, Dr));
        if (l == 0) {
            put(sites[l], 0, 0, g_of(l));
            put(sites[l], 0, 1, sigma_z());
        } else if (l + 1 == n) {
            put(sites[l], 0, 0, identity());
            put(sites[l], 1, 0, g_of(l));
        } else {
            put(sites[l], 0, 0, identity());
            put(sites[l], 1, 0, g_of(l));
            put(sites[l], 1, 1, sigma_z());
        }
    }
    return TensorTrain(TrainKind::Operator, std::move(sites));
}

} // namespace fermichain
