// Batch verification CLI: runs suites from flags/config, writes report.json
// (one verdict object per identity) and plot-ready CSVs into --out.
//
// Exit codes: 0 all verdicts pass, 1 at least one identity failed,
// 2 invalid configuration.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "kgamma/serialize.hpp"
#include "kgamma/suites.hpp"

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

kgamma::Json config_json(const kgamma::RunConfig& cfg) {
    kgamma::Json j;
    j["suite"] = cfg.suite;
    j["seed"] = cfg.seed;
    j["n"] = cfg.n;
    j["shards"] = cfg.shards;
    j["eps"] = cfg.eps;
    j["coeff"] = cfg.coeff.label();
    j["dim"] = cfg.dim;
    j["quad_degree"] = cfg.quad_degree;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gamma-measure verification suites"};
    app.get_formatter()->column_width(34);

    std::string suite_positional, suite_flag, config_file;
    std::string seed_s, shards_s, n_s, eps_s, coeff_s, dim_s, degree_s, out_s;

    app.add_option("SUITE", suite_positional,
                   "suite: laplace|mecke|moments|gamma-marginal|forms|duality|"
                   "one-particle|besq|fock|all");
    app.add_option("--suite", suite_flag, "same as the positional argument");
    app.add_option("--seed", seed_s, "root seed (all streams derive from it)");
    app.add_option("--shards", shards_s, "Monte Carlo shards (deterministic reduce)");
    app.add_option("--n", n_s, "samples per estimate");
    app.add_option("--eps", eps_s, "mass floor of the sampling window");
    app.add_option("--coeff", coeff_s, "one|s|s2|cubic:a1,a2,a3");
    app.add_option("--dim", dim_s, "spatial dimension 1..3");
    app.add_option("--quad-degree", degree_s, "Mecke quadrature degree (>= 8)");
    app.add_option("--out", out_s, "output directory");
    app.add_option("--config", config_file, "flat key=value config file");

    CLI11_PARSE(app, argc, argv);

    kgamma::RunConfig cfg;
    try {
        // Config file first; flags override its keys.
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw std::invalid_argument("cannot open config: " + config_file);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            kgamma::apply_flat_config(kgamma::parse_flat_config(text), cfg);
        }
        std::map<std::string, std::string> overrides;
        if (!seed_s.empty()) overrides["seed"] = seed_s;
        if (!shards_s.empty()) overrides["shards"] = shards_s;
        if (!n_s.empty()) overrides["n"] = n_s;
        if (!eps_s.empty()) overrides["eps"] = eps_s;
        if (!coeff_s.empty()) overrides["coeff"] = coeff_s;
        if (!dim_s.empty()) overrides["dim"] = dim_s;
        if (!degree_s.empty()) overrides["quad-degree"] = degree_s;
        if (!out_s.empty()) overrides["out"] = out_s;
        if (!suite_flag.empty()) overrides["suite"] = suite_flag;
        if (!suite_positional.empty()) overrides["suite"] = suite_positional;
        kgamma::apply_flat_config(overrides, cfg);

        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::vector<std::string> to_run;
        if (cfg.suite == "all")
            to_run = kgamma::kSuiteNames;
        else
            to_run = {cfg.suite};

        std::filesystem::create_directories(cfg.out_dir);

        kgamma::Json report;
        report["timestamp"] = iso_timestamp();
        report["config"] = config_json(cfg);
        report["verdicts"] = kgamma::Json::array();

        bool all_pass = true;
        for (const auto& name : to_run) {
            const auto result = kgamma::run_suite(name, cfg);
            for (const auto& v : result.verdicts) {
                auto jv = kgamma::to_json(v);
                jv["suite"] = name;
                report["verdicts"].push_back(jv);
                std::cout << (v.pass ? "PASS" : "FAIL") << "  " << name << " / "
                          << v.identity;
                if (!v.kind.empty()) std::cout << " [" << v.kind;
                if (!v.coefficient.empty()) std::cout << ", c=" << v.coefficient;
                if (!v.kind.empty()) std::cout << "]";
                if (!v.detail.empty()) std::cout << "  (" << v.detail << ")";
                std::cout << "\n";
                all_pass = all_pass && v.pass;
            }
            for (const auto& [fname, contents] : result.csv_files) {
                std::ofstream out(std::filesystem::path(cfg.out_dir) / fname);
                out << contents;
            }
        }

        std::ofstream out(std::filesystem::path(cfg.out_dir) / "report.json");
        out << report.dump(2) << "\n";
        std::cout << (all_pass ? "all identities pass" : "identity failures present")
                  << "; report written to " << cfg.out_dir << "/report.json\n";
        return all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
}
