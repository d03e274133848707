// spectral.hpp — spectral-density families and finite-temperature transforms
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fermichain/errors.hpp"

namespace fermichain {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// Inverse temperature and chemical potential (hbar = k_B = 1).
// beta = +inf is the exact zero-temperature sentinel.
struct ThermalParameters {
    double beta = std::numeric_limits<double>::infinity();
    double mu = 0.0;

    bool zero_temperature() const { return std::isinf(beta); }
};

// Mean occupation 1/(exp(beta*(omega - mu)) + 1), overflow-safe.
inline double fermi_dirac(double omega, const ThermalParameters& p) {
    if (p.zero_temperature()) {
        if (omega < p.mu) return 1.0;
        if (omega > p.mu) return 0.0;
        return 0.5;
    }
    const double x = p.beta * (omega - p.mu);
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

namespace detail {

// tanh(beta*omega/2) with the beta = +inf sentinel mapped to sign(omega)
inline double tanh_half(double beta, double omega) {
    if (std::isinf(beta)) return omega > 0.0 ? 1.0 : (omega < 0.0 ? -1.0 : 0.0);
    return std::tanh(0.5 * beta * omega);
}

// Fritsch-Carlson monotone cubic interpolant through (x_i, y_i)
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("tabulated density needs >= 2 samples");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw std::invalid_argument("tabulated density nodes must be increasing");
        slopes_.resize(n);
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        slopes_[0] = delta[0];
        slopes_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                slopes_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
    }

    double operator()(double x) const {
        if (x < x_.front() || x > x_.back())
            throw Error("tabulated density evaluated outside its table");
        std::size_t i = 0;
        std::size_t j = x_.size() - 1;
        while (j - i > 1) {
            const std::size_t m = (i + j) / 2;
            (x_[m] <= x ? i : j) = m;
        }
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return y_[i] * (2.0 * t3 - 3.0 * t2 + 1.0) + h * slopes_[i] * (t3 - 2.0 * t2 + t) +
               y_[i + 1] * (-2.0 * t3 + 3.0 * t2) + h * slopes_[i + 1] * (t3 - t2);
    }

private:
    std::vector<double> x_, y_;
    std::vector<double> slopes_;
};

} // namespace detail

// An evaluable coupling profile J(omega) with compact support. Instances are
// immutable values; the descriptor records how the density was built so runs
// can be serialized and replayed.
class SpectralDensity {
public:
    double operator()(double omega) const { return eval_(omega); }
    const Interval& support() const { return support_; }
    const nlohmann::json& descriptor() const { return descriptor_; }
    std::string family() const { return descriptor_.value("family", "unknown"); }

    static SpectralDensity constant(double gamma, Interval support) {
        check_support(support);
        SpectralDensity J;
        J.support_ = support;
        J.descriptor_ = {{"family", "constant"},
                         {"gamma", gamma},
                         {"support", {support.lo, support.hi}}};
        J.eval_ = [gamma](double) { return gamma; };
        return J;
    }

    // (Gamma/2) sqrt(1 - (omega - c)^2 / r^2) on [c - r, c + r]
    static SpectralDensity newns(double gamma, Interval support) {
        check_support(support);
        SpectralDensity J;
        J.support_ = support;
        J.descriptor_ = {{"family", "newns"},
                         {"gamma", gamma},
                         {"support", {support.lo, support.hi}}};
        const double c = 0.5 * (support.lo + support.hi);
        const double r = 0.5 * support.width();
        J.eval_ = [gamma, c, r](double w) {
            const double u = (w - c) / r;
            const double s = 1.0 - u * u;
            return s <= 0.0 ? 0.0 : 0.5 * gamma * std::sqrt(s);
        };
        return J;
    }

    static SpectralDensity tabulated(std::vector<double> omega, std::vector<double> value) {
        SpectralDensity J;
        J.support_ = {omega.front(), omega.back()};
        check_support(J.support_);
        J.descriptor_ = {{"family", "tabulated"}, {"omega", omega}, {"value", value}};
        auto interp = std::make_shared<detail::MonotoneCubic>(std::move(omega), std::move(value));
        J.eval_ = [interp](double w) { return (*interp)(w); };
        return J;
    }

    // Config grammar: {"family":"constant","gamma":0.1,"support":[-1,1]}
    static SpectralDensity from_json(const nlohmann::json& j) {
        const std::string family = j.at("family").get<std::string>();
        if (family == "constant" || family == "newns") {
            const auto sup = j.at("support");
            Interval support{sup.at(0).get<double>(), sup.at(1).get<double>()};
            const double gamma = j.at("gamma").get<double>();
            return family == "constant" ? constant(gamma, support) : newns(gamma, support);
        }
        if (family == "tabulated")
            return tabulated(j.at("omega").get<std::vector<double>>(),
                             j.at("value").get<std::vector<double>>());
        throw ConfigInvalidError("unknown spectral-density family: " + family);
    }

    // wraps an existing density with a pointwise weight; used by the thermal
    // transforms below
    static SpectralDensity weighted(const SpectralDensity& base, Interval support,
                                    std::function<double(double)> eval,
                                    nlohmann::json descriptor) {
        SpectralDensity J;
        J.support_ = support;
        J.eval_ = std::move(eval);
        J.descriptor_ = std::move(descriptor);
        (void)base;
        return J;
    }

private:
    SpectralDensity() = default;

    static void check_support(const Interval& s) {
        if (!(s.lo < s.hi)) throw EmptySupportError("spectral density support is empty");
    }

    std::function<double(double)> eval_;
    Interval support_;
    nlohmann::json descriptor_;
};

enum class BathStatistics { Fermionic, Bosonic };

// Thermalized extension J_beta(omega) = J(|omega|)/2 * (tanh(beta*omega/2) + 1)
// on [-omega_max, omega_max]. Requires mu = 0 and support starting at 0.
inline SpectralDensity thermalized_density(const SpectralDensity& J, const ThermalParameters& p,
                                           BathStatistics stats = BathStatistics::Fermionic) {
    if (stats == BathStatistics::Bosonic)
        throw UnsupportedError("bosonic thermalized densities are not supported");
    if (p.mu != 0.0)
        throw NonzeroChemicalPotentialError(
            "thermalized density requires vanishing chemical potential");
    if (std::abs(J.support().lo) > 1e-12 * std::abs(J.support().hi))
        throw Error("thermalized density requires support of the form [0, omega_max]");
    const double wmax = J.support().hi;
    const double beta = p.beta;
    auto eval = [J, beta](double w) {
        return 0.5 * J(std::abs(w)) * (detail::tanh_half(beta, w) + 1.0);
    };
    nlohmann::json desc = {{"family", "thermalized"},
                           {"beta", std::isinf(beta) ? nlohmann::json("inf") : nlohmann::json(beta)},
                           {"base", J.descriptor()}};
    return SpectralDensity::weighted(J, Interval{-wmax, wmax}, std::move(eval), std::move(desc));
}

// Thermofield split J1 = J u^2, J2 = J v^2 with v^2 the Fermi-Dirac occupation
// and u^2 + v^2 = 1. Both halves keep the original support.
inline std::pair<SpectralDensity, SpectralDensity> thermofield_split(const SpectralDensity& J,
                                                                     const ThermalParameters& p) {
    auto eval1 = [J, p](double w) { return J(w) * (1.0 - fermi_dirac(w, p)); };
    auto eval2 = [J, p](double w) { return J(w) * fermi_dirac(w, p); };
    const auto beta_json =
        std::isinf(p.beta) ? nlohmann::json("inf") : nlohmann::json(p.beta);
    nlohmann::json d1 = {{"family", "thermofield_empty"},
                         {"beta", beta_json},
                         {"mu", p.mu},
                         {"base", J.descriptor()}};
    nlohmann::json d2 = {{"family", "thermofield_filled"},
                         {"beta", beta_json},
                         {"mu", p.mu},
                         {"base", J.descriptor()}};
    return {SpectralDensity::weighted(J, J.support(), std::move(eval1), std::move(d1)),
            SpectralDensity::weighted(J, J.support(), std::move(eval2), std::move(d2))};
}

} // namespace fermichain
