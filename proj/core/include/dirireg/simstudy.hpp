#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dirireg/dataset.hpp"
#include "dirireg/sampler.hpp"

namespace dirireg {

/// Data-generating configuration for the simulation studies. The two
/// standard scenarios come from the factory functions; `custom` fills the
/// same fields from a user specification.
struct ScenarioConfig {
    std::string name = "A";
    Index P = 3;
    Index n_levels = 3;
    Index n_per_level = 20;
    /// Per-level linear predictor offsets, one row per factor level,
    /// one column per dimension (dimension 1 zero by convention).
    Matrix level_coefficients;
    /// Continuous covariate on an even grid, added to selected dimensions'
    /// linear predictors before the softmax.
    bool has_x2 = false;
    double x2_min = 4.5;
    double x2_max = 7.5;
    Vector x2_coefficients;  // per dimension; empty when has_x2 is false
    /// Precision: either a constant phi, or a log-linear model in [1, X2].
    double phi = 1.0;
    std::optional<Vector> precision_coefficients;  // overrides phi when set
    int replicates = 100;
    std::uint64_t seed = 0;

    static ScenarioConfig scenario_a(double phi = 1.0);
    static ScenarioConfig scenario_b();
    /// Scenario A structure with P dimensions and random U(-1.5, 1.5)
    /// coefficients for dimensions 2..P.
    static ScenarioConfig scenario_a_dim(Index P, std::uint64_t coef_seed);
};

struct GeneratedData {
    CompositionDataset dataset;
    Matrix true_mu;   // n x P, rows sum to one
    Vector true_phi;  // n
};

/// Deterministic dataset generation for one replicate.
GeneratedData generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Fresh responses from the same truth (held-out replicate for predictive
/// coverage).
Matrix generate_responses(const GeneratedData& truth, std::uint64_t seed);

/// Synthetic analogue of the netball movement study: positions as fixed
/// factor, players as random intercepts on the logit scale.
struct NetballConfig {
    int n_positions = 7;
    int n_players = 40;
    int min_matches = 1;
    int max_matches = 9;
    double player_sd = 0.5;
    double phi = 30.0;
    std::uint64_t seed = 0;
};

struct NetballData {
    CompositionDataset dataset;  // X: position cell means, group: player
    Matrix true_mu;              // per observation (includes player effects)
    Vector true_phi;
    std::vector<std::string> position_of_row;
    std::vector<std::string> player_of_row;
};

NetballData generate_netball(const NetballConfig& config);

/// One fitted method's study-level aggregates.
struct MethodStudySummary {
    std::string method;
    double mean_sce = 0.0;
    double mean_coverage = 0.0;
    double mean_std_width = 0.0;
    double mean_predictive_coverage = 0.0;
    int n_success = 0;
    int n_failed = 0;
    /// Median p-value per coefficient label over successful replicates.
    std::map<std::string, double> median_p;
};

struct StudySummary {
    std::string scenario_name;
    int replicates = 0;
    std::vector<MethodStudySummary> methods;
};

/// Runs the replicate loop for the requested methods ("new_bayes",
/// "maier_ml"), computing fit statistics of each replicate against the
/// generator truth. Replicates run in parallel up to `n_threads`
/// (0 = hardware limit, still deterministic).
StudySummary run_study(const ScenarioConfig& scenario_config, const SamplerConfig& sampler_config,
                       const std::set<std::string>& methods, int n_threads = 0);

/// Thread cap from the DIRIREG_THREADS environment variable (0 when unset).
int env_thread_cap();

}  // namespace dirireg
