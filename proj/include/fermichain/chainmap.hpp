// chainmap.hpp — spectral density -> chain coefficients via orthogonal polynomials
//
// The measure is dmu(x) = h^2(x) dx with h^2(x) = g*J(g*x)/pi on the support of
// J pulled back through the linear dispersion. Recurrence coefficients of the
// monic orthogonal polynomials are computed by Lanczos tridiagonalization of
// the node matrix, which is the numerically stable route for discretized
// measures.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"

#include "fermichain/errors.hpp"
#include "fermichain/quadrature.hpp"
#include "fermichain/spectral.hpp"

namespace fermichain {

struct DiscretizedMeasure {
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;  // nonnegative, at least one positive
    double g_scale = 1.0;

    double total_mass() const {
        double m = 0.0;
        for (double w : weights) m += w;
        return m;
    }
};

// Three-term recurrence data of the monic orthogonal polynomials. betas hold
// the squared hopping ratios beta_1..beta_{n-1}; a breakdown index marks the
// first coefficient that could not be computed reliably (the arrays then hold
// the valid prefix).
struct ChainCoefficients {
    double eta = 0.0;  // system-chain coupling, sqrt(total mass)
    std::vector<double> alphas;
    std::vector<double> betas;
    double g_scale = 1.0;
    std::optional<std::size_t> breakdown;

    bool ok() const { return !breakdown.has_value(); }
};

struct ChainParams {
    std::vector<double> site_energies;
    std::vector<double> hoppings;
    double system_coupling = 0.0;
};

namespace detail {

// Panel boundaries on [a, b] graded toward both endpoints (exponent q), so
// that integrable endpoint singularities such as the Newns square root do not
// spoil the Gauss-Legendre convergence.
inline std::vector<double> graded_breakpoints(double a, double b, std::size_t panels,
                                              double q = 3.0) {
    std::vector<double> bp(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(panels);
        const double num = std::pow(t, q);
        const double f = num / (num + std::pow(1.0 - t, q));
        bp[i] = a + (b - a) * f;
    }
    bp.front() = a;
    bp.back() = b;
    return bp;
}

inline QuadratureRule panelled_rule(const std::vector<double>& breakpoints,
                                    std::size_t points_per_panel) {
    const QuadratureRule base = gauss_legendre(points_per_panel);
    QuadratureRule rule;
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double lo = breakpoints[p], hi = breakpoints[p + 1];
        for (std::size_t j = 0; j < points_per_panel; ++j) {
            rule.nodes.push_back(lo + 0.5 * (hi - lo) * (base.nodes[j] + 1.0));
            rule.weights.push_back(0.5 * (hi - lo) * base.weights[j]);
        }
    }
    return rule;
}

} // namespace detail

inline DiscretizedMeasure discretize_measure(const SpectralDensity& J,
                                             std::size_t quadrature_points, double g = 1.0) {
    const Interval sup = J.support();
    if (!(sup.lo < sup.hi)) throw EmptySupportError("discretize_measure: empty support");
    if (!(g > 0.0)) throw std::invalid_argument("discretize_measure: dispersion slope must be > 0");

    constexpr std::size_t points_per_panel = 32;
    const std::size_t panels = std::max<std::size_t>(
        4, (quadrature_points + points_per_panel - 1) / points_per_panel);

    // split at omega = 0 when the support straddles it (thermalized densities
    // have a kink or jump there), otherwise at the midpoint
    const double a = sup.lo / g, b = sup.hi / g;
    const double mid = (a < 0.0 && b > 0.0) ? 0.0 : 0.5 * (a + b);
    const std::size_t left_panels = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::lround(panels * (mid - a) / (b - a))));
    const std::size_t right_panels = std::max<std::size_t>(2, panels - left_panels);
    std::vector<double> bp = detail::graded_breakpoints(a, mid, left_panels);
    const std::vector<double> bp_r = detail::graded_breakpoints(mid, b, right_panels);
    bp.insert(bp.end(), bp_r.begin() + 1, bp_r.end());
    const QuadratureRule rule = detail::panelled_rule(bp, points_per_panel);
    DiscretizedMeasure m;
    m.g_scale = g;
    m.nodes = rule.nodes;
    m.weights.resize(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double j = J(g * rule.nodes[i]);
        if (j < 0.0) throw NegativeDensityError("discretize_measure: J(omega) < 0 on the grid");
        m.weights[i] = rule.weights[i] * g * j / M_PI;
    }
    if (!(m.total_mass() > 0.0)) throw EmptyMassError("discretize_measure: zero total mass");
    return m;
}

// Lanczos with full reorthogonalization on the diagonal node matrix, start
// vector sqrt(weights). Mathematically equivalent to the discretized
// Stieltjes procedure but better conditioned.
inline ChainCoefficients recurrence_coefficients(const DiscretizedMeasure& measure,
                                                 std::size_t n) {
    const std::size_t m = measure.nodes.size();
    if (n == 0) throw std::invalid_argument("recurrence_coefficients: n must be positive");
    if (2 * n > m)
        throw std::invalid_argument(
            "recurrence_coefficients: need quadrature_points >= 2*chain_length");

    ChainCoefficients out;
    out.g_scale = measure.g_scale;
    const double mass = measure.total_mass();
    out.eta = std::sqrt(mass);

    double scale = 0.0;
    for (double x : measure.nodes) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) scale = 1.0;

    std::vector<std::vector<double>> basis;  // Lanczos vectors, kept for reorthogonalization
    std::vector<double> q(m), r(m);
    for (std::size_t i = 0; i < m; ++i) q[i] = std::sqrt(measure.weights[i] / mass);
    basis.push_back(q);

    out.alphas.reserve(n);
    out.betas.reserve(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const std::vector<double>& qk = basis.back();
        double alpha = 0.0;
        for (std::size_t i = 0; i < m; ++i) alpha += measure.nodes[i] * qk[i] * qk[i];
        out.alphas.push_back(alpha);
        if (k + 1 == n) break;

        for (std::size_t i = 0; i < m; ++i) r[i] = measure.nodes[i] * qk[i] - alpha * qk[i];
        // two passes of classical Gram-Schmidt against all previous vectors
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                double proj = 0.0;
                for (std::size_t i = 0; i < m; ++i) proj += b[i] * r[i];
                for (std::size_t i = 0; i < m; ++i) r[i] -= proj * b[i];
            }
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) norm2 += r[i] * r[i];
        const double b = std::sqrt(norm2);
        if (!(b > scale * 1e-14)) {
            out.breakdown = k + 1;  // beta_{k+1} lost all significant digits
            return out;
        }
        out.betas.push_back(norm2);  // beta_{k+1} = ||r||^2 (monic convention)
        for (std::size_t i = 0; i < m; ++i) q[i] = r[i] / b;
        basis.push_back(q);
    }
    return out;
}

// Site energies g*alpha_k, hoppings g*sqrt(beta_{k+1}), coupling eta.
inline ChainParams chain_hamiltonian_params(const ChainCoefficients& coeffs) {
    ChainParams p;
    p.system_coupling = coeffs.eta;
    p.site_energies.reserve(coeffs.alphas.size());
    p.hoppings.reserve(coeffs.betas.size());
    for (double a : coeffs.alphas) p.site_energies.push_back(coeffs.g_scale * a);
    for (double b : coeffs.betas) p.hoppings.push_back(coeffs.g_scale * std::sqrt(b));
    return p;
}

// One-call mapping with adaptive panel refinement: quadrature resolution is
// doubled until every reported coefficient has stopped drifting.
inline ChainCoefficients chain_coefficients(const SpectralDensity& J, std::size_t n,
                                            double g = 1.0, double drift_tol = 1e-10,
                                            std::size_t initial_points = 2048,
                                            std::size_t max_points = 1 << 20) {
    std::size_t points = std::max<std::size_t>(initial_points, 2 * n);
    ChainCoefficients prev = recurrence_coefficients(discretize_measure(J, points, g), n);
    while (2 * points <= max_points) {
        points *= 2;
        ChainCoefficients next = recurrence_coefficients(discretize_measure(J, points, g), n);
        double scale = std::max(std::abs(J.support().lo), std::abs(J.support().hi)) / g;
        if (scale == 0.0) scale = 1.0;
        double drift = 0.0;
        const std::size_t na = std::min(prev.alphas.size(), next.alphas.size());
        const std::size_t nb = std::min(prev.betas.size(), next.betas.size());
        for (std::size_t k = 0; k < na; ++k)
            drift = std::max(drift, std::abs(next.alphas[k] - prev.alphas[k]) / scale);
        for (std::size_t k = 0; k < nb; ++k)
            drift = std::max(drift, std::abs(next.betas[k] - prev.betas[k]) / (scale * scale));
        prev = std::move(next);
        if (prev.ok() && drift < drift_tol) break;
    }
    return prev;
}

inline nlohmann::json coefficients_to_json(const ChainCoefficients& c,
                                           const SpectralDensity& density) {
    return {{"eta", c.eta},
            {"alphas", c.alphas},
            {"betas", c.betas},
            {"g", c.g_scale},
            {"density", density.descriptor()}};
}

inline ChainCoefficients coefficients_from_json(const nlohmann::json& j) {
    ChainCoefficients c;
    c.eta = j.at("eta").get<double>();
    c.alphas = j.at("alphas").get<std::vector<double>>();
    c.betas = j.at("betas").get<std::vector<double>>();
    c.g_scale = j.at("g").get<double>();
    return c;
}

} // namespace fermichain
