// tensor_train.hpp — matrix-product states and operators
//
// Operators are stored as vectorized trains: local dimension 4 with the
// physical pair (p, q) of |p><q| packed row-major as v = 2*p + q. This lets
// states and operators share the same canonicalization, truncation and
// arithmetic code paths.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "fermichain/errors.hpp"

namespace fermichain {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class TrainKind { State, Operator };

struct TruncationPolicy {
    double epsilon = 1e-8;                                    // relative discarded weight per bond
    std::size_t xi = std::numeric_limits<std::size_t>::max(); // maximum retained rank
};

namespace local_ops {
inline Eigen::Matrix2cd identity() { return Eigen::Matrix2cd::Identity(); }
inline Eigen::Matrix2cd sigma_plus() {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 1) = 1.0;
    return m;
}
inline Eigen::Matrix2cd sigma_minus() {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(1, 0) = 1.0;
    return m;
}
inline Eigen::Matrix2cd sigma_z() {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}
inline Eigen::Matrix2cd number() { return sigma_plus() * sigma_minus(); }  // diag(1, 0)
// occupation basis kets; index 0 is the occupied state in this convention
inline Eigen::Vector2cd ket_occupied() { return Eigen::Vector2cd(1.0, 0.0); }
inline Eigen::Vector2cd ket_empty() { return Eigen::Vector2cd(0.0, 1.0); }
} // namespace local_ops

class TensorTrain {
public:
    // mats[p] has shape (left bond) x (right bond); p < local_dim
    struct Site {
        std::vector<Matrix> mats;
        Eigen::Index left() const { return mats.front().rows(); }
        Eigen::Index right() const { return mats.front().cols(); }
    };

    TensorTrain() = default;
    TensorTrain(TrainKind kind, std::vector<Site> sites)
        : kind_(kind), sites_(std::move(sites)) {}

    TrainKind kind() const { return kind_; }
    std::size_t size() const { return sites_.size(); }
    int local_dim() const { return kind_ == TrainKind::State ? 2 : 4; }
    const Site& site(std::size_t i) const { return sites_[i]; }
    Site& site(std::size_t i) { return sites_[i]; }
    int center() const { return center_; }
    void set_center(int c) { center_ = c; }

    std::vector<std::size_t> bond_dims() const {
        std::vector<std::size_t> dims;
        for (std::size_t i = 0; i + 1 < sites_.size(); ++i)
            dims.push_back(static_cast<std::size_t>(sites_[i].right()));
        return dims;
    }
    std::size_t max_bond() const {
        std::size_t m = 1;
        for (std::size_t d : bond_dims()) m = std::max(m, d);
        return m;
    }
    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& s : sites_)
            n += s.mats.size() * static_cast<std::size_t>(s.left() * s.right());
        return n;
    }

    static TensorTrain product_state(const std::vector<Eigen::Vector2cd>& kets) {
        std::vector<Site> sites(kets.size());
        for (std::size_t i = 0; i < kets.size(); ++i) {
            sites[i].mats.resize(2);
            for (int p = 0; p < 2; ++p) sites[i].mats[p] = Matrix::Constant(1, 1, kets[i](p));
        }
        TensorTrain t(TrainKind::State, std::move(sites));
        t.center_ = 0;
        return t;
    }

    static TensorTrain product_operator(const std::vector<Eigen::Matrix2cd>& ops) {
        std::vector<Site> sites(ops.size());
        for (std::size_t i = 0; i < ops.size(); ++i) {
            sites[i].mats.resize(4);
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                    sites[i].mats[2 * p + q] = Matrix::Constant(1, 1, ops[i](p, q));
        }
        TensorTrain t(TrainKind::Operator, std::move(sites));
        t.center_ = 0;
        return t;
    }

    static TensorTrain identity_operator(std::size_t n) {
        return product_operator(std::vector<Eigen::Matrix2cd>(n, local_ops::identity()));
    }

    void scale(Complex factor) {
        if (sites_.empty()) return;
        for (auto& m : sites_[0].mats) m *= factor;
    }

    // append the sites of `other` (boundary bonds are 1, so the result is the
    // tensor product of the two trains)
    void concat(const TensorTrain& other) {
        if (other.kind_ != kind_) throw SiteMismatchError("concat: mixed train kinds");
        sites_.insert(sites_.end(), other.sites_.begin(), other.sites_.end());
        center_ = -1;
    }

private:
    TrainKind kind_ = TrainKind::State;
    std::vector<Site> sites_;
    int center_ = -1;  // canonical center, -1 when unknown
};

namespace detail {

// theta matrix with row (p*Dl + a), col (q*Dr + b) for the two-site block
inline Matrix merge_two_sites(const TensorTrain::Site& a, const TensorTrain::Site& b) {
    const Eigen::Index d = static_cast<Eigen::Index>(a.mats.size());
    const Eigen::Index Dl = a.left(), Dr = b.right();
    Matrix theta(d * Dl, d * Dr);
    for (Eigen::Index p = 0; p < d; ++p)
        for (Eigen::Index q = 0; q < d; ++q)
            theta.block(p * Dl, q * Dr, Dl, Dr) = a.mats[p] * b.mats[q];
    return theta;
}

struct SplitResult {
    double discarded = 0.0;      // relative discarded weight at this bond
    bool xi_bound = false;       // rank cap was the binding constraint
    std::size_t rank = 0;
};

// SVD-split theta back into two site tensors, truncating per policy. The
// singular values are absorbed into the site named by `center_right`.
inline SplitResult split_two_sites(const Matrix& theta, Eigen::Index d, Eigen::Index Dl,
                                   Eigen::Index Dr, const TruncationPolicy& policy,
                                   bool center_right, TensorTrain::Site& a,
                                   TensorTrain::Site& b) {
    Eigen::BDCSVD<Matrix> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::Index full = s.size();

    double total = 0.0;
    for (Eigen::Index i = 0; i < full; ++i) total += s(i) * s(i);

    SplitResult res;
    Eigen::Index rank = full;
    if (total > 0.0) {
        double discarded = 0.0;
        while (rank > 1) {
            const double next = discarded + s(rank - 1) * s(rank - 1);
            if (next > policy.epsilon * total) break;
            discarded = next;
            --rank;
        }
        const Eigen::Index cap = static_cast<Eigen::Index>(
            std::min<std::size_t>(policy.xi, static_cast<std::size_t>(full)));
        if (rank > cap) {
            rank = cap;
            res.xi_bound = true;
            discarded = 0.0;
            for (Eigen::Index i = rank; i < full; ++i) discarded += s(i) * s(i);
        }
        res.discarded = discarded / total;
    } else {
        rank = 1;
    }
    res.rank = static_cast<std::size_t>(rank);

    const Matrix U = svd.matrixU().leftCols(rank);
    const Matrix Vd = svd.matrixV().leftCols(rank).adjoint();
    const Eigen::VectorXd sv = s.head(rank);

    a.mats.assign(d, Matrix());
    b.mats.assign(d, Matrix());
    if (center_right) {
        const Matrix W = sv.asDiagonal() * Vd;
        for (Eigen::Index p = 0; p < d; ++p) a.mats[p] = U.middleRows(p * Dl, Dl);
        for (Eigen::Index q = 0; q < d; ++q) b.mats[q] = W.middleCols(q * Dr, Dr);
    } else {
        const Matrix W = U * sv.asDiagonal();
        for (Eigen::Index p = 0; p < d; ++p) a.mats[p] = W.middleRows(p * Dl, Dl);
        for (Eigen::Index q = 0; q < d; ++q) b.mats[q] = Vd.middleCols(q * Dr, Dr);
    }
    return res;
}

} // namespace detail

// ---- canonical form ---------------------------------------------------------

// QR-push the center one site to the right (no truncation)
inline void shift_center_right(TensorTrain& t, std::size_t i) {
    auto& a = t.site(i);
    auto& b = t.site(i + 1);
    const Eigen::Index d = static_cast<Eigen::Index>(a.mats.size());
    const Eigen::Index Dl = a.left(), Dr = a.right();
    Matrix m(d * Dl, Dr);
    for (Eigen::Index p = 0; p < d; ++p) m.middleRows(p * Dl, Dl) = a.mats[p];
    Eigen::HouseholderQR<Matrix> qr(m);
    const Eigen::Index k = std::min(m.rows(), m.cols());
    const Matrix Q = qr.householderQ() * Matrix::Identity(m.rows(), k);
    const Matrix R =
        qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
    for (Eigen::Index p = 0; p < d; ++p) a.mats[p] = Q.middleRows(p * Dl, Dl);
    for (auto& mat : b.mats) mat = (R * mat).eval();
    t.set_center(static_cast<int>(i) + 1);
}

// LQ-push the center one site to the left (no truncation)
inline void shift_center_left(TensorTrain& t, std::size_t i) {
    auto& b = t.site(i);
    auto& a = t.site(i - 1);
    const Eigen::Index d = static_cast<Eigen::Index>(b.mats.size());
    const Eigen::Index Dl = b.left(), Dr = b.right();
    Matrix m(Dl, d * Dr);
    for (Eigen::Index q = 0; q < d; ++q) m.middleCols(q * Dr, Dr) = b.mats[q];
    Eigen::HouseholderQR<Matrix> qr(m.adjoint());
    const Eigen::Index k = std::min(m.rows(), m.cols());
    const Matrix Q = (qr.householderQ() * Matrix::Identity(m.cols(), k)).adjoint();
    const Matrix L =
        Matrix(qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>()).adjoint();
    for (Eigen::Index q = 0; q < d; ++q) b.mats[q] = Q.middleCols(q * Dr, Dr);
    for (auto& mat : a.mats) mat = (mat * L).eval();
    t.set_center(static_cast<int>(i) - 1);
}

// full canonicalization with the center at `target`
inline void canonicalize(TensorTrain& t, std::size_t target = 0) {
    if (t.size() == 0) return;
    // right-to-left LQ sweep leaves everything right of site 0 right-canonical
    for (std::size_t i = t.size() - 1; i > 0; --i) shift_center_left(t, i);
    for (std::size_t i = 0; i < target; ++i) shift_center_right(t, i);
    t.set_center(static_cast<int>(target));
}

inline void move_center(TensorTrain& t, std::size_t target) {
    if (t.center() < 0) {
        canonicalize(t, target);
        return;
    }
    while (t.center() < static_cast<int>(target))
        shift_center_right(t, static_cast<std::size_t>(t.center()));
    while (t.center() > static_cast<int>(target))
        shift_center_left(t, static_cast<std::size_t>(t.center()));
}

// ---- compression ------------------------------------------------------------

// SVD-truncate every bond per policy; returns the accumulated relative
// discarded weight (squared Schmidt coefficients). Output is canonical with
// the center on the last site.
inline double compress_inplace(TensorTrain& t, const TruncationPolicy& policy) {
    if (t.size() < 2) {
        t.set_center(0);
        return 0.0;
    }
    canonicalize(t, 0);
    const Eigen::Index d = t.local_dim();
    double discarded = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        auto& a = t.site(i);
        auto& b = t.site(i + 1);
        const Eigen::Index Dl = a.left(), Dr = b.right();
        const Matrix theta = detail::merge_two_sites(a, b);
        const auto res = detail::split_two_sites(theta, d, Dl, Dr, policy, true, a, b);
        discarded += res.discarded;
    }
    t.set_center(static_cast<int>(t.size()) - 1);
    return discarded;
}

inline std::pair<TensorTrain, double> compress(TensorTrain t, const TruncationPolicy& policy) {
    const double w = compress_inplace(t, policy);
    return {std::move(t), w};
}

// ---- contractions -----------------------------------------------------------

// <a|b> for states; Frobenius inner product tr(a^dagger b) for operators
inline Complex inner(const TensorTrain& a, const TensorTrain& b) {
    if (a.size() != b.size() || a.kind() != b.kind())
        throw SiteMismatchError("inner: train shapes do not match");
    Matrix env = Matrix::Ones(1, 1);
    const std::size_t d = static_cast<std::size_t>(a.local_dim());
    for (std::size_t i = 0; i < a.size(); ++i) {
        Matrix next = Matrix::Zero(a.site(i).right(), b.site(i).right());
        for (std::size_t p = 0; p < d; ++p)
            next += a.site(i).mats[p].adjoint() * env * b.site(i).mats[p];
        env = std::move(next);
    }
    return env(0, 0);
}

inline double norm(const TensorTrain& t) { return std::sqrt(std::abs(inner(t, t))); }

inline Complex trace(const TensorTrain& op) {
    if (op.kind() != TrainKind::Operator) throw SiteMismatchError("trace: not an operator");
    Matrix env = Matrix::Ones(1, 1);
    for (std::size_t i = 0; i < op.size(); ++i) {
        Matrix next = Matrix::Zero(env.rows(), op.site(i).right());
        for (int p = 0; p < 2; ++p) next += env * op.site(i).mats[2 * p + p];
        env = std::move(next);
    }
    return env(0, 0);
}

// <psi|O|psi> for states, tr(rho O)/tr(rho) for operator trains
inline Complex expectation(const TensorTrain& state, const TensorTrain& obs) {
    if (obs.kind() != TrainKind::Operator)
        throw SiteMismatchError("expectation: observable must be an operator train");
    if (state.size() != obs.size())
        throw SiteMismatchError("expectation: site counts do not match");
    const std::size_t n = state.size();

    if (state.kind() == TrainKind::State) {
        // env[w] is (bra bond) x (ket bond)
        std::vector<Matrix> env(1, Matrix::Ones(1, 1));
        for (std::size_t i = 0; i < n; ++i) {
            const auto& A = state.site(i);
            const auto& W = obs.site(i);
            const std::size_t wl = static_cast<std::size_t>(W.mats[0].rows());
            const std::size_t wr = static_cast<std::size_t>(W.mats[0].cols());
            std::vector<Matrix> next(wr, Matrix::Zero(A.right(), A.right()));
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) {
                    const Matrix& w = W.mats[2 * p + q];
                    for (std::size_t a = 0; a < wl; ++a) {
                        const Matrix t = A.mats[p].adjoint() * env[a];
                        for (std::size_t b = 0; b < wr; ++b) {
                            if (w(a, b) == 0.0) continue;
                            next[b] += w(a, b) * (t * A.mats[q]);
                        }
                    }
                }
            env = std::move(next);
        }
        return env[0](0, 0);
    }

    // operator (density) mode: env is (rho bond) x (obs bond)
    Matrix env = Matrix::Ones(1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& R = state.site(i);
        const auto& W = obs.site(i);
        Matrix next = Matrix::Zero(R.mats[0].cols(), W.mats[0].cols());
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                next += R.mats[2 * p + q].transpose() * env * W.mats[2 * q + p];
        env = std::move(next);
    }
    const Complex tr = trace(state);
    if (std::abs(tr) == 0.0) throw Error("expectation: traceless density operator");
    return env(0, 0) / tr;
}

// ---- operator arithmetic ----------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// operator product a*b (bond dimensions multiply)
inline TensorTrain mpo_multiply(const TensorTrain& a, const TensorTrain& b) {
    if (a.size() != b.size()) throw SiteMismatchError("mpo_multiply: site counts differ");
    std::vector<TensorTrain::Site> sites(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        sites[i].mats.assign(4, Matrix());
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) {
                Matrix acc = Matrix::Zero(a.site(i).left() * b.site(i).left(),
                                          a.site(i).right() * b.site(i).right());
                for (int r = 0; r < 2; ++r)
                    acc += kron(a.site(i).mats[2 * p + r], b.site(i).mats[2 * r + q]);
                sites[i].mats[2 * p + q] = std::move(acc);
            }
    }
    return TensorTrain(TrainKind::Operator, std::move(sites));
}

// operator sum a + b (bond dimensions add)
inline TensorTrain mpo_sum(const TensorTrain& a, const TensorTrain& b) {
    if (a.size() != b.size()) throw SiteMismatchError("mpo_sum: site counts differ");
    const std::size_t n = a.size();
    std::vector<TensorTrain::Site> sites(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index al = a.site(i).left(), ar = a.site(i).right();
        const Eigen::Index bl = b.site(i).left(), br = b.site(i).right();
        const Eigen::Index L = (i == 0) ? 1 : al + bl;
        const Eigen::Index R = (i + 1 == n) ? 1 : ar + br;
        sites[i].mats.assign(4, Matrix::Zero(L, R));
        for (int v = 0; v < 4; ++v) {
            Matrix& m = sites[i].mats[v];
            if (i == 0 && i + 1 == n) {
                m = a.site(i).mats[v] + b.site(i).mats[v];
            } else if (i == 0) {
                m.block(0, 0, 1, ar) = a.site(i).mats[v];
                m.block(0, ar, 1, br) = b.site(i).mats[v];
            } else if (i + 1 == n) {
                m.block(0, 0, al, 1) = a.site(i).mats[v];
                m.block(al, 0, bl, 1) = b.site(i).mats[v];
            } else {
                m.block(0, 0, al, ar) = a.site(i).mats[v];
                m.block(al, ar, bl, br) = b.site(i).mats[v];
            }
        }
    }
    return TensorTrain(TrainKind::Operator, std::move(sites));
}

// ---- dense conversions (small systems; tests and oracles) -------------------

inline Vector to_dense_state(const TensorTrain& t) {
    if (t.kind() != TrainKind::State) throw SiteMismatchError("to_dense_state: not a state");
    Matrix acc = Matrix::Ones(1, 1);  // (configurations) x (bond)
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Eigen::Index rows = acc.rows();
        Matrix next(rows * 2, t.site(i).right());
        for (int p = 0; p < 2; ++p)
            next.middleRows(p * rows, rows) = acc * t.site(i).mats[p];
        // row index is (p * rows + config): site i is the most significant of
        // the trailing block, so reorder to keep site-0-major convention
        Matrix reordered(next.rows(), next.cols());
        for (Eigen::Index c = 0; c < rows; ++c)
            for (int p = 0; p < 2; ++p) reordered.row(c * 2 + p) = next.row(p * rows + c);
        acc = std::move(reordered);
    }
    return acc.col(0);
}

inline Matrix to_dense_operator(const TensorTrain& t) {
    if (t.kind() != TrainKind::Operator)
        throw SiteMismatchError("to_dense_operator: not an operator");
    const std::size_t n = t.size();
    // accumulate as vectorized configurations, then unpack (p, q) bits
    Matrix acc = Matrix::Ones(1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Index rows = acc.rows();
        Matrix next(rows * 4, t.site(i).right());
        for (int v = 0; v < 4; ++v) next.middleRows(v * rows, rows) = acc * t.site(i).mats[v];
        Matrix reordered(next.rows(), next.cols());
        for (Eigen::Index c = 0; c < rows; ++c)
            for (int v = 0; v < 4; ++v) reordered.row(c * 4 + v) = next.row(v * rows + c);
        acc = std::move(reordered);
    }
    const Eigen::Index dim = Eigen::Index(1) << n;
    Matrix out(dim, dim);
    for (Eigen::Index idx = 0; idx < acc.rows(); ++idx) {
        Eigen::Index row = 0, col = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const Eigen::Index v = (idx >> (2 * (n - 1 - k))) & 3;
            row = (row << 1) | (v >> 1);
            col = (col << 1) | (v & 1);
        }
        out(row, col) = acc(idx, 0);
    }
    return out;
}

} // namespace fermichain
