// experiment.hpp — config-driven experiment runner
//
// Assembles the four model studies (resonant level quench, modified resonant
// level with thermal methods, quantum dot coherence, dimer transport) from the
// library modules and emits machine-readable time series with optional
// exact-diagonalization reference columns.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fermichain/chainmap.hpp"
#include "fermichain/dmrg.hpp"
#include "fermichain/errors.hpp"
#include "fermichain/fermionchain.hpp"
#include "fermichain/gaussian_mpo.hpp"
#include "fermichain/oracle.hpp"
#include "fermichain/spectral.hpp"
#include "fermichain/tebd.hpp"
#include "fermichain/tensor_train.hpp"

namespace fermichain {

inline const char* version_string() { return "fermichain 0.1.0"; }

struct ExperimentConfig {
    // model block
    std::string model;
    nlohmann::json model_params;
    // discretization block
    std::size_t chain_length = 32;       // per-bath sites for the dimer
    std::size_t quadrature_points = 4096;
    std::string thermal_method = "none"; // none | thermalized | thermofield | mpo
    double beta = std::numeric_limits<double>::infinity();
    double mu = 0.0;
    double split_ratio = 0.5;            // thermofield: fraction of sites for the empty bath
    // evolution block
    double dt = 0.1;
    int trotter_order = 4;
    double t_max = 10.0;
    TruncationPolicy policy{1e-8, 64};
    std::string picture = "schroedinger";
    // preparation block
    std::size_t dmrg_sweeps = 10;
    TruncationPolicy prep_policy{1e-8, 64};
    double prep_dt = 0.05;
    int prep_order = 4;
    // outputs block
    bool oracle = false;
    std::size_t n_ed = 200;
    std::vector<std::string> observables;  // empty = model default

    nlohmann::json raw;  // original document, echoed into the artifacts
};

namespace detail {

inline double json_number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_string() && v.get<std::string>() == "inf")
        return std::numeric_limits<double>::infinity();
    return v.get<double>();
}

inline void config_require(bool cond, const std::string& rule) {
    if (!cond) throw ConfigInvalidError(rule);
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& doc) {
    ExperimentConfig cfg;
    cfg.raw = doc;
    detail::config_require(doc.contains("model") && doc.at("model").contains("name"),
                           "config needs a model block with a name");
    cfg.model = doc.at("model").at("name").get<std::string>();
    cfg.model_params = doc.at("model");

    const auto disc = doc.value("discretization", nlohmann::json::object());
    cfg.chain_length = disc.value("chain_length", cfg.chain_length);
    cfg.quadrature_points = disc.value("quadrature_points", cfg.quadrature_points);
    const auto thermal = disc.value("thermal", nlohmann::json::object());
    cfg.thermal_method = thermal.value("method", cfg.thermal_method);
    cfg.beta = detail::json_number(thermal, "beta", cfg.beta);
    cfg.mu = detail::json_number(thermal, "mu", cfg.mu);
    cfg.split_ratio = thermal.value("split_ratio", cfg.split_ratio);

    const auto evo = doc.value("evolution", nlohmann::json::object());
    cfg.dt = evo.value("dt", cfg.dt);
    cfg.trotter_order = evo.value("order", cfg.trotter_order);
    cfg.t_max = evo.value("t_max", cfg.t_max);
    cfg.policy.epsilon = evo.value("epsilon", cfg.policy.epsilon);
    cfg.policy.xi = evo.value("xi", cfg.policy.xi);
    cfg.picture = evo.value("picture", cfg.picture);

    const auto prep = doc.value("preparation", nlohmann::json::object());
    cfg.dmrg_sweeps = prep.value("dmrg_sweeps", cfg.dmrg_sweeps);
    cfg.prep_policy.epsilon = prep.value("epsilon", cfg.prep_policy.epsilon);
    cfg.prep_policy.xi = prep.value("xi", cfg.prep_policy.xi);
    cfg.prep_dt = prep.value("imaginary_dt", cfg.prep_dt);
    cfg.prep_order = prep.value("imaginary_order", cfg.prep_order);

    const auto outputs = doc.value("outputs", nlohmann::json::object());
    cfg.oracle = outputs.value("oracle", cfg.oracle);
    cfg.n_ed = outputs.value("n_ed", cfg.n_ed);
    if (outputs.contains("observables"))
        cfg.observables = outputs.at("observables").get<std::vector<std::string>>();
    return cfg;
}

// model / method compatibility matrix
inline void validate_config(const ExperimentConfig& cfg) {
    using detail::config_require;
    const std::string& m = cfg.model;
    config_require(m == "rlm_quench" || m == "modified_rlm" || m == "quantum_dot" || m == "dimer",
                   "unknown model '" + m + "'");
    config_require(cfg.dt > 0.0 && cfg.t_max >= 0.0, "evolution needs dt > 0 and t_max >= 0");
    config_require(cfg.trotter_order == 2 || cfg.trotter_order == 4,
                   "Trotter order must be 2 or 4");
    config_require(cfg.policy.epsilon >= 0.0 && cfg.policy.epsilon < 1.0 && cfg.policy.xi >= 1,
                   "truncation policy needs 0 <= epsilon < 1 and xi >= 1");
    config_require(cfg.picture == "schroedinger" || cfg.picture == "heisenberg",
                   "picture must be schroedinger or heisenberg");

    if (m == "rlm_quench" || m == "quantum_dot") {
        config_require(cfg.thermal_method == "none",
                       "model '" + m +
                           "' has a hopping system-bath coupling prepared in its ground state; "
                           "thermal methods are defined for the factorized-coupling and "
                           "two-bath studies only");
    }
    if (m == "modified_rlm") {
        config_require(cfg.thermal_method == "thermalized" || cfg.thermal_method == "thermofield" ||
                           cfg.thermal_method == "mpo",
                       "modified_rlm needs thermal method thermalized, thermofield or mpo");
        if (cfg.thermal_method == "thermalized")
            config_require(cfg.mu == 0.0,
                           "thermalized fTEDOPA requires mu = 0 (model-assumption matrix: the "
                           "factorized coupling fixes the chemical potential)");
        if (cfg.thermal_method == "mpo")
            config_require(std::isfinite(cfg.beta),
                           "mpo thermal preparation needs a finite beta");
        config_require(cfg.split_ratio > 0.0 && cfg.split_ratio < 1.0,
                       "thermofield split_ratio must lie in (0, 1)");
    }
    if (m == "dimer") {
        config_require(cfg.thermal_method == "mpo" || cfg.thermal_method == "none",
                       "dimer supports thermal method mpo (thermal right bath) or none (both "
                       "baths empty)");
        if (cfg.thermal_method == "mpo")
            config_require(std::isfinite(cfg.beta), "mpo thermal preparation needs a finite beta");
        if (cfg.oracle)
            config_require(cfg.model_params.value("u", 0.0) == 0.0,
                           "the exact-diagonalization reference exists only at U = 0");
    }
    config_require(cfg.picture == "schroedinger" || m == "quantum_dot",
                   "the heisenberg picture is wired up for the quantum_dot model");
    if (cfg.oracle) detail::config_require(cfg.n_ed >= 2, "oracle needs n_ed >= 2");
}

// ---- run artifacts -------------------------------------------------------------

struct RunResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json resolved;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw Error("no column named " + name);
    }
    std::vector<double> series(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }
};

namespace detail {

struct NamedObservable {
    std::string name;
    TensorTrain mpo;
};

// oracle trajectory: per-time values aligned with the named observables
using OracleFn = std::function<std::vector<double>(double)>;

struct AssembledRun {
    SpinChainHamiltonian hamiltonian;
    TensorTrain initial;
    std::vector<NamedObservable> observables;
    OracleFn oracle;                  // may be empty
    std::optional<TensorTrain> heisenberg_observable;
    TensorTrain heisenberg_state;     // fixed state for the Heisenberg picture
    double heisenberg_scale = 1.0;    // 2.0 for coherences
    bool heisenberg_abs = false;
};

inline TensorTrain vacuum_state(std::size_t n, std::optional<std::size_t> occupied = {}) {
    using namespace local_ops;
    std::vector<Eigen::Vector2cd> kets(n, ket_empty());
    if (occupied) kets[*occupied] = ket_occupied();
    return TensorTrain::product_state(kets);
}

inline SpinChainHamiltonian bare_chain_hamiltonian(const ChainParams& chain) {
    FermionHamiltonianSpec spec;
    const std::size_t n = chain.site_energies.size();
    for (std::size_t k = 0; k < n; ++k)
        spec.site_order.push_back({"b" + std::to_string(k), SiteKind::Fermion});
    for (std::size_t k = 0; k < n; ++k)
        spec.quadratic_terms.push_back({QuadKind::Number, k, k, chain.site_energies[k]});
    for (std::size_t k = 0; k + 1 < n; ++k)
        spec.quadratic_terms.push_back({QuadKind::Hopping, k, k + 1, chain.hoppings[k]});
    return jordan_wigner_hamiltonian(spec);
}

// thermal state of the bare chain via imaginary-time evolution of the identity
inline TensorTrain thermal_chain_mpo(const ChainParams& chain, double beta,
                                     const ExperimentConfig& cfg) {
    const auto H = bare_chain_hamiltonian(chain);
    TensorTrain rho = TensorTrain::identity_operator(chain.site_energies.size());
    if (beta <= 0.0) return rho;
    if (chain.site_energies.size() == 1) {
        // single site: exact
        using namespace local_ops;
        const double e = chain.site_energies[0];
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
        m(0, 0) = std::exp(-beta * e);
        m(1, 1) = 1.0;
        m /= m.trace();
        return TensorTrain::product_operator({m});
    }
    const double dt = std::min(cfg.prep_dt, beta);
    const auto res = tebd_evolve(rho, H, beta, {cfg.prep_order, dt}, cfg.prep_policy, true);
    return res.state;
}

inline SpectralDensity density_for(const ExperimentConfig& cfg, const char* fallback_family,
                                   double gamma, Interval support) {
    if (cfg.model_params.contains("density"))
        return SpectralDensity::from_json(cfg.model_params.at("density"));
    if (std::string(fallback_family) == "newns") return SpectralDensity::newns(gamma, support);
    return SpectralDensity::constant(gamma, support);
}

inline ChainParams mapped_chain(const SpectralDensity& J, std::size_t n, std::size_t points) {
    const auto measure = discretize_measure(J, std::max(points, 2 * n));
    const auto coeffs = recurrence_coefficients(measure, n);
    if (!coeffs.ok())
        throw Error("chain mapping broke down at coefficient " +
                    std::to_string(*coeffs.breakdown));
    return chain_hamiltonian_params(coeffs);
}

} // namespace detail

// ---- model assembly ------------------------------------------------------------

namespace detail {

inline AssembledRun assemble_rlm_quench(const ExperimentConfig& cfg) {
    const double gamma = cfg.model_params.value("gamma", 0.1);
    const double e0 = cfg.model_params.value("e_imp_initial", 0.0);
    const double e1 = json_number(cfg.model_params, "e_imp", -2.0 * gamma);
    const auto J = density_for(cfg, "constant", gamma, {-1.0, 1.0});
    const auto chain = mapped_chain(J, cfg.chain_length, cfg.quadrature_points);

    AssembledRun run;
    run.hamiltonian = jordan_wigner_hamiltonian(build_rlm(e1, chain));
    const auto H0 = jordan_wigner_hamiltonian(build_rlm(e0, chain));
    run.initial = dmrg_ground_state(H0, cfg.dmrg_sweeps, cfg.prep_policy).state;
    run.observables.push_back(
        {"n_imp", single_site_observable(cfg.chain_length + 1, 0, local_ops::number())});

    if (cfg.oracle) {
        const auto d = linear_discretize(J, cfg.n_ed);
        const Matrix h0 = star_matrix(e0, d.energies, d.couplings);
        const Matrix h1 = star_matrix(e1, d.energies, d.couplings);
        const Matrix c0 = ground_correlation(h0, cfg.mu);
        auto traj = std::make_shared<CorrelationTrajectory>(h1, c0);
        run.oracle = [traj](double t) {
            return std::vector<double>{std::real(traj->entry(0, 0, t))};
        };
    }
    return run;
}

inline AssembledRun assemble_modified_rlm(const ExperimentConfig& cfg) {
    const double gamma = cfg.model_params.value("gamma", 0.4);
    const double e_imp = cfg.model_params.value("e_imp", 0.3);
    const auto J = density_for(cfg, "constant", gamma, {0.0, 2.0});
    const ThermalParameters tp{cfg.beta, cfg.mu};

    AssembledRun run;
    std::size_t imp_site = 0;
    if (cfg.thermal_method == "thermalized") {
        const auto jb = thermalized_density(J, tp);
        const auto chain = mapped_chain(jb, cfg.chain_length, cfg.quadrature_points);
        run.hamiltonian = jordan_wigner_hamiltonian(build_modified_rlm(e_imp, chain));
        run.initial = vacuum_state(cfg.chain_length + 1, 0);
        imp_site = 0;
    } else if (cfg.thermal_method == "thermofield") {
        const auto [j1, j2] = thermofield_split(J, tp);
        std::size_t n1 = static_cast<std::size_t>(
            std::lround(cfg.split_ratio * static_cast<double>(cfg.chain_length)));
        n1 = std::min(std::max<std::size_t>(n1, 1), cfg.chain_length);
        std::size_t n2 = cfg.chain_length - n1;
        // an exactly empty filled bath (T = 0) carries no weight at all
        const double mass2 =
            integrate_panels(J.support().lo, J.support().hi, 64, 16, j2) / M_PI;
        if (mass2 < 1e-14) n2 = 0;
        const ChainParams empty_chain = mapped_chain(j1, n1, cfg.quadrature_points);
        const ChainParams filled_chain =
            n2 > 0 ? mapped_chain(j2, n2, cfg.quadrature_points) : ChainParams{};
        run.hamiltonian = jordan_wigner_hamiltonian(
            build_modified_rlm_thermofield(e_imp, filled_chain, empty_chain));
        imp_site = n2;
        run.initial = vacuum_state(n1 + n2 + 1, imp_site);
    } else {  // mpo
        const auto chain = mapped_chain(J, cfg.chain_length, cfg.quadrature_points);
        run.hamiltonian = jordan_wigner_hamiltonian(build_modified_rlm(e_imp, chain));
        TensorTrain rho = TensorTrain::product_operator({local_ops::number()});
        rho.concat(thermal_chain_mpo(chain, cfg.beta, cfg));
        run.initial = std::move(rho);
        imp_site = 0;
    }
    run.observables.push_back(
        {"n_imp",
         single_site_observable(run.hamiltonian.n_sites, imp_site, local_ops::number())});

    if (cfg.oracle) {
        const auto d = linear_discretize(J, cfg.n_ed);
        const auto [h, delta] = star_nambu_factorized(e_imp, d.energies, d.couplings);
        NambuState s0;
        const Eigen::Index m = h.rows();
        s0.c = Matrix::Zero(m, m);
        s0.c(0, 0) = 1.0;
        for (Eigen::Index k = 1; k < m; ++k)
            s0.c(k, k) = fermi_dirac(d.energies[static_cast<std::size_t>(k - 1)], tp);
        s0.f = Matrix::Zero(m, m);
        auto traj = std::make_shared<NambuTrajectory>(s0, h, delta);
        run.oracle = [traj](double t) {
            return std::vector<double>{std::real(traj->occupation_entry(0, 0, t))};
        };
    }
    return run;
}

inline AssembledRun assemble_quantum_dot(const ExperimentConfig& cfg) {
    const double gamma = cfg.model_params.value("gamma", 0.1);
    const double delta = cfg.model_params.value("delta", 0.2);
    const double v = cfg.model_params.value("v", 0.2);
    const double e_imp = cfg.model_params.value("e_imp", 0.0);
    const auto J = density_for(cfg, "constant", gamma, {-1.0, 1.0});
    const auto chain = mapped_chain(J, cfg.chain_length, cfg.quadrature_points);
    const std::size_t n = cfg.chain_length + 2;

    AssembledRun run;
    run.hamiltonian = jordan_wigner_hamiltonian(build_quantum_dot(delta, v, e_imp, chain));

    const auto h_el = jordan_wigner_hamiltonian(build_rlm(e_imp, chain));
    const auto gs = dmrg_ground_state(h_el, cfg.dmrg_sweeps, cfg.prep_policy);
    Eigen::Vector2cd plus;
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    TensorTrain psi0 = TensorTrain::product_state({plus});
    psi0.concat(gs.state);
    canonicalize(psi0, 0);

    const auto coh = single_site_observable(n, 0, local_ops::sigma_minus());
    if (cfg.picture == "heisenberg") {
        run.heisenberg_observable = coh;
        run.heisenberg_state = psi0;
        run.heisenberg_scale = 2.0;
        run.heisenberg_abs = true;
        run.initial = coh;
    } else {
        run.initial = psi0;
    }
    run.observables.push_back({"coherence", coh});

    if (cfg.oracle) {
        const auto d = linear_discretize(J, cfg.n_ed);
        const Matrix hel = star_matrix(e_imp, d.energies, d.couplings);
        Matrix hplus = hel, hminus = hel;
        hplus(0, 0) += 0.5 * v;
        hminus(0, 0) -= 0.5 * v;
        const Matrix c0 = ground_correlation(hel, cfg.mu);
        auto traj = std::make_shared<DephasingTrajectory>(c0, hminus, hplus);
        run.oracle = [traj](double t) {
            return std::vector<double>{traj->coherence(t)};
        };
    }
    return run;
}

inline AssembledRun assemble_dimer(const ExperimentConfig& cfg) {
    const double gamma = cfg.model_params.value("gamma", 0.5);
    const double h = cfg.model_params.value("h", 0.6);
    const double delta = cfg.model_params.value("delta", 0.01);
    const double g = cfg.model_params.value("g", 0.1);
    const double u = cfg.model_params.value("u", 0.0);
    const auto J = density_for(cfg, "newns", gamma, {0.0, 2.0});
    const std::size_t na = cfg.chain_length;  // per-bath sites
    const auto chain = mapped_chain(J, na, cfg.quadrature_points);

    AssembledRun run;
    const auto spec = build_dimer(h, delta, g, u, chain, chain);
    run.hamiltonian = jordan_wigner_hamiltonian(spec);
    const std::size_t dl = na, dr = na + 1;
    const std::size_t n = 2 * na + 2;

    if (cfg.thermal_method == "mpo") {
        using namespace local_ops;
        const Eigen::Matrix2cd empty = identity() - number();
        std::vector<Eigen::Matrix2cd> left_part(na + 2, empty);
        TensorTrain rho = TensorTrain::product_operator(left_part);
        rho.concat(thermal_chain_mpo(chain, cfg.beta, cfg));
        run.initial = std::move(rho);
    } else {
        run.initial = vacuum_state(n);
    }

    run.observables.push_back({"n_left", single_site_observable(n, dl, local_ops::number())});
    run.observables.push_back({"n_right", single_site_observable(n, dr, local_ops::number())});
    const Complex pref(0.0, -0.5 * g);  // g / (2i)
    OperatorExpression current{
        {{pref, {{dl, true}, {dr, false}}}, {-pref, {{dr, true}, {dl, false}}}}};
    run.observables.push_back({"current", jordan_wigner_observable(current, spec.site_order)});

    if (cfg.oracle) {
        const auto d = linear_discretize(J, cfg.n_ed);
        const std::size_t nb = d.energies.size();
        const Eigen::Index m = static_cast<Eigen::Index>(2 * nb + 2);
        const Eigen::Index odl = static_cast<Eigen::Index>(nb);
        const Eigen::Index odr = odl + 1;
        Matrix hsp = Matrix::Zero(m, m);
        for (std::size_t k = 0; k < nb; ++k) {
            hsp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = d.energies[k];
            hsp(static_cast<Eigen::Index>(k), odl) = hsp(odl, static_cast<Eigen::Index>(k)) =
                d.couplings[k];
            const Eigen::Index r = odr + 1 + static_cast<Eigen::Index>(k);
            hsp(r, r) = d.energies[k];
            hsp(r, odr) = hsp(odr, r) = d.couplings[k];
        }
        hsp(odl, odl) = h + 0.5 * delta;
        hsp(odr, odr) = h - 0.5 * delta;
        hsp(odl, odr) = hsp(odr, odl) = -0.5 * g;
        Matrix c0 = Matrix::Zero(m, m);
        if (cfg.thermal_method == "mpo")
            for (std::size_t k = 0; k < nb; ++k)
                c0(odr + 1 + static_cast<Eigen::Index>(k), odr + 1 + static_cast<Eigen::Index>(k)) =
                    fermi_dirac(d.energies[k], {cfg.beta, cfg.mu});
        auto traj = std::make_shared<CorrelationTrajectory>(hsp, c0);
        const double gg = g;
        run.oracle = [traj, odl, odr, gg](double t) {
            const double nl = std::real(traj->entry(static_cast<std::size_t>(odl),
                                                    static_cast<std::size_t>(odl), t));
            const double nr = std::real(traj->entry(static_cast<std::size_t>(odr),
                                                    static_cast<std::size_t>(odr), t));
            const double cur = gg * std::imag(traj->entry(static_cast<std::size_t>(odl),
                                                          static_cast<std::size_t>(odr), t));
            return std::vector<double>{nl, nr, cur};
        };
    }
    return run;
}

inline AssembledRun assemble(const ExperimentConfig& cfg) {
    if (cfg.model == "rlm_quench") return assemble_rlm_quench(cfg);
    if (cfg.model == "modified_rlm") return assemble_modified_rlm(cfg);
    if (cfg.model == "quantum_dot") return assemble_quantum_dot(cfg);
    return assemble_dimer(cfg);
}

} // namespace detail

// ---- run -----------------------------------------------------------------------

inline RunResult run(const ExperimentConfig& cfg) {
    validate_config(cfg);
    auto assembled = detail::assemble(cfg);

    // observable subset selection
    if (!cfg.observables.empty()) {
        std::vector<detail::NamedObservable> picked;
        for (const auto& want : cfg.observables) {
            bool found = false;
            for (auto& o : assembled.observables)
                if (o.name == want) {
                    picked.push_back(o);
                    found = true;
                }
            detail::config_require(found, "unknown observable '" + want + "' for model '" +
                                              cfg.model + "'");
        }
        assembled.observables = std::move(picked);
    }

    RunResult out;
    out.columns.push_back("time");
    for (const auto& o : assembled.observables) out.columns.push_back(o.name);
    if (assembled.oracle)
        for (const auto& o : assembled.observables) out.columns.push_back("oracle_" + o.name);
    if (assembled.oracle)
        for (const auto& o : assembled.observables) out.columns.push_back("residual_" + o.name);
    const std::size_t n_bonds = assembled.hamiltonian.n_sites - 1;
    for (std::size_t b = 0; b < n_bonds; ++b)
        out.columns.push_back("bond_" + std::to_string(b));
    out.columns.push_back("parameter_count");
    out.columns.push_back("discarded_weight");

    const bool heisenberg = assembled.heisenberg_observable.has_value();
    auto sink = [&](const StepRecord& rec, const TensorTrain& state) {
        std::vector<double> row;
        row.push_back(rec.time);
        std::vector<double> values;
        for (const auto& o : assembled.observables) {
            double value;
            if (heisenberg) {
                const Complex e = expectation(assembled.heisenberg_state, state);
                value = assembled.heisenberg_abs
                            ? assembled.heisenberg_scale * std::abs(e)
                            : assembled.heisenberg_scale * std::real(e);
            } else if (o.name == "coherence") {
                value = 2.0 * std::abs(expectation(state, o.mpo));
            } else {
                value = std::real(expectation(state, o.mpo));
            }
            values.push_back(value);
        }
        row.insert(row.end(), values.begin(), values.end());
        if (assembled.oracle) {
            const auto ref = assembled.oracle(rec.time);
            for (double r : ref) row.push_back(r);
            for (std::size_t i = 0; i < values.size(); ++i)
                row.push_back(std::abs(values[i] - ref[i]));
        }
        for (std::size_t d : rec.bond_dims) row.push_back(static_cast<double>(d));
        row.push_back(static_cast<double>(rec.parameter_count));
        row.push_back(rec.cumulative_discarded);
        out.rows.push_back(std::move(row));
    };

    const TrotterScheme scheme{cfg.trotter_order, cfg.dt};
    const bool operator_mode = assembled.initial.kind() == TrainKind::Operator;
    tebd_evolve(std::move(assembled.initial), assembled.hamiltonian, cfg.t_max, scheme,
                cfg.policy, false, heisenberg && operator_mode, sink);

    out.resolved = cfg.raw;
    out.resolved["version"] = version_string();
    return out;
}

inline RunResult run(const nlohmann::json& doc) { return run(parse_config(doc)); }

// ---- compare_methods -----------------------------------------------------------

struct CompareResult {
    std::vector<std::string> methods;
    std::map<std::string, RunResult> runs;
};

// one run per thermal method with identical site budget and policy
inline CompareResult compare_methods(const ExperimentConfig& base,
                                     const std::vector<std::string>& methods) {
    CompareResult out;
    for (const auto& m : methods) {
        ExperimentConfig cfg = base;
        cfg.thermal_method = m;
        out.methods.push_back(m);
        out.runs.emplace(m, run(cfg));
    }
    return out;
}

// ---- artifact writers ----------------------------------------------------------

namespace detail {

inline std::string format_number(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

} // namespace detail

inline void write_csv(const RunResult& result, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open " + path.string());
    for (std::size_t i = 0; i < result.columns.size(); ++i)
        f << (i ? "," : "") << result.columns[i];
    f << "\n";
    for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            f << (i ? "," : "") << detail::format_number(row[i]);
        f << "\n";
    }
}

inline void write_run_artifacts(const RunResult& result, const std::filesystem::path& dir,
                                const std::string& stem = "run") {
    std::filesystem::create_directories(dir);
    write_csv(result, dir / (stem + ".csv"));
    std::ofstream f(dir / (stem + ".json"));
    f << result.resolved.dump(2) << "\n";
}

inline void write_compare_artifacts(const CompareResult& result,
                                    const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [method, res] : result.runs) write_run_artifacts(res, dir, method);

    // aligned parameter-count and residual table
    std::ofstream f(dir / "compare.csv");
    f << "time";
    for (const auto& m : result.methods) f << ",params_" << m;
    for (const auto& m : result.methods) {
        const auto& res = result.runs.at(m);
        for (const auto& c : res.columns)
            if (c.rfind("residual_", 0) == 0) f << "," << m << "_" << c;
    }
    f << "\n";
    const std::size_t n_rows = result.runs.begin()->second.rows.size();
    for (std::size_t r = 0; r < n_rows; ++r) {
        f << detail::format_number(result.runs.begin()->second.rows[r][0]);
        for (const auto& m : result.methods) {
            const auto& res = result.runs.at(m);
            f << "," << detail::format_number(res.rows[r][res.column("parameter_count")]);
        }
        for (const auto& m : result.methods) {
            const auto& res = result.runs.at(m);
            for (std::size_t c = 0; c < res.columns.size(); ++c)
                if (res.columns[c].rfind("residual_", 0) == 0)
                    f << "," << detail::format_number(res.rows[r][c]);
        }
        f << "\n";
    }
}

} // namespace fermichain
