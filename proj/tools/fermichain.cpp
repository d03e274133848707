// fermichain — config-driven fermionic chain-mapping simulator
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fermichain/experiment.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw fermichain::ConfigInvalidError("cannot open config file " + path);
    nlohmann::json doc;
    try {
        f >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw fermichain::ConfigInvalidError(std::string("config is not valid JSON: ") + e.what());
    }
    return doc;
}

std::string canonical_method(const std::string& name) {
    if (name == "tt" || name == "thermalized") return "thermalized";
    if (name == "tf" || name == "thermofield") return "thermofield";
    if (name == "mpo") return "mpo";
    throw fermichain::ConfigInvalidError("unknown method '" + name +
                                         "' (expected tt, tf or mpo)");
}

std::vector<std::string> split_methods(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(canonical_method(item));
    if (out.empty()) throw fermichain::ConfigInvalidError("no methods requested");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fermichain: fermionic bath chain-mapping and tensor-train simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string methods_csv = "tt,tf,mpo";

    auto* cmd_run = app.add_subcommand("run", "run one experiment config");
    cmd_run->add_option("config", config_path, "experiment config (JSON)")->required();
    cmd_run->add_option("--out", out_dir, "output directory");

    auto* cmd_compare =
        app.add_subcommand("compare", "run one config under several thermal methods");
    cmd_compare->add_option("config", config_path, "experiment config (JSON)")->required();
    cmd_compare->add_option("--methods", methods_csv, "comma list from {tt, tf, mpo}");
    cmd_compare->add_option("--out", out_dir, "output directory");

    auto* cmd_validate = app.add_subcommand("validate", "check a config without running it");
    cmd_validate->add_option("config", config_path, "experiment config (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const auto doc = load_json(config_path);
        auto cfg = fermichain::parse_config(doc);

        if (cmd_validate->parsed()) {
            fermichain::validate_config(cfg);
            std::cout << "config ok: model " << cfg.model << ", " << cfg.chain_length
                      << " chain sites, t_max " << cfg.t_max << "\n";
            return 0;
        }
        if (cmd_run->parsed()) {
            const auto result = fermichain::run(cfg);
            fermichain::write_run_artifacts(result, out_dir);
            std::cout << "wrote " << out_dir << "/run.csv (" << result.rows.size()
                      << " rows, " << result.columns.size() << " columns)\n";
            return 0;
        }
        const auto methods = split_methods(methods_csv);
        const auto result = fermichain::compare_methods(cfg, methods);
        fermichain::write_compare_artifacts(result, out_dir);
        std::cout << "wrote " << out_dir << "/compare.csv for";
        for (const auto& m : methods) std::cout << " " << m;
        std::cout << "\n";
        return 0;
    } catch (const fermichain::ConfigInvalidError& e) {
        std::cerr << "config invalid: " << e.what() << "\n";
        return 2;
    } catch (const fermichain::PolicyExhaustedError& e) {
        std::cerr << "policy exhausted: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
