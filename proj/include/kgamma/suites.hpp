#pragma once

#include <map>
#include <string>
#include <vector>

#include "kgamma/forms_mc.hpp"
#include "kgamma/mass_coefficient.hpp"
#include "kgamma/stats.hpp"

namespace kgamma {

// Validated batch-run configuration. Flags override config-file keys; the
// config file is flat key=value text.
struct RunConfig {
    std::string suite = "all";
    std::uint64_t seed = 1;
    std::uint64_t n = 100000;
    int shards = 4;
    double eps = 1e-6;
    MassCoefficient coeff = MassCoefficient::quadratic();
    int dim = 1;
    int quad_degree = 16;
    std::string out_dir = ".";

    void validate() const;
};

// Fixed split index of each suite under the root seed, so cross-suite runs
// are independent but reproducible.
extern const std::vector<std::string> kSuiteNames;
std::uint32_t suite_split_index(const std::string& name);

struct SuiteResult {
    std::string name;
    std::vector<IdentityVerdict> verdicts;
    // plot-ready data: file name -> CSV contents
    std::map<std::string, std::string> csv_files;

    bool all_pass() const;
};

// Runs one named suite (not "all") with families derived deterministically
// from the seed.
SuiteResult run_suite(const std::string& name, const RunConfig& cfg);

// key=value text, one per line; '#' comments.
std::map<std::string, std::string> parse_flat_config(const std::string& text);
void apply_flat_config(const std::map<std::string, std::string>& kv, RunConfig& cfg);

}  // namespace kgamma
