#pragma once

// Run configuration in flat `key = value` text: one entry per line, `#`
// starts a comment, values in base SI units without suffixes. Every
// ExperimentConfig field is required; analysis, OPO-cavity and loss-budget
// keys are optional.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hpl/budget.hpp"
#include "hpl/fock.hpp"
#include "hpl/herald.hpp"

namespace hpl::config {

struct AnalysisSettings {
    int n_max = fock::kDefaultNMax;
    int max_iter = 5000;
    double tol = 1e-9;
    int bootstrap_replicates = 100;
    std::size_t histogram_bins = 60;
    double histogram_range = 5.0;
    double wigner_extent = 5.0;
    std::size_t wigner_points = 101;
};

struct OpoCavity {
    double output_coupler = 0.142;
    double round_trip_loss = 0.0022;
};

struct RunConfig {
    herald::ExperimentConfig experiment;
    AnalysisSettings analysis;
    OpoCavity opo;
    /// `loss.<label> = fraction` entries in file order; the reference budget
    /// when the file has none.
    budget::LossBudget budget = budget::reference_loss_budget();
};

/// Names of the required keys, in canonical order.
const std::vector<std::string>& required_keys();

/// Throws ConfigError listing every missing, unknown, duplicated or malformed
/// key, and every key whose value violates an invariant.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text for a RunConfig (all keys, 17 significant digits), which
/// parse_config reads back exactly.
std::string format_config(const RunConfig& config);

}  // namespace hpl::config
