#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dirireg/csv.hpp"
#include "dirireg/linalg.hpp"

namespace dirireg {

/// Factor-expansion policy for design matrices.
///     automatic  - cell-means when a single factor is the only term,
///                  treatment coding with an intercept otherwise
///     cell_means - one indicator column per level, no intercept
///     treatment  - intercept plus indicators for levels 2..L
enum class Coding { automatic, cell_means, treatment };

std::string coding_name(Coding c);

/// Response matrix, mean/precision designs and optional grouping labels.
struct CompositionDataset {
    Matrix Y;  // n x P, every row a valid Composition
    Matrix X;  // n x Q mean design, full column rank
    Matrix W;  // n x R precision design, full column rank
    std::vector<std::string> response_names;
    std::vector<std::string> x_names;
    std::vector<std::string> w_names;
    Coding x_coding = Coding::automatic;

    /// Group index per row (0-based, contiguous) when random effects apply.
    std::optional<std::vector<int>> group;
    std::vector<std::string> group_levels;

    std::vector<std::string> warnings;

    Index n_obs() const { return Y.rows(); }
    Index n_dim() const { return Y.cols(); }
    Index n_mean_coef() const { return X.cols(); }
    Index n_precision_coef() const { return W.cols(); }
    Index n_groups() const { return static_cast<Index>(group_levels.size()); }
};

struct LoadOptions {
    /// Response column names; empty means autodetect y1..yP.
    std::vector<std::string> response_columns;
    /// Mean design terms: column names, or the literal "1" for an intercept.
    std::vector<std::string> mean_columns{"1"};
    /// Precision design terms; defaults to intercept only.
    std::vector<std::string> precision_columns{"1"};
    std::optional<std::string> group_column;
    Coding coding = Coding::automatic;
};

/// Builds a validated dataset from a parsed CSV table. Rows whose response
/// sum deviates from 1 by more than 1e-6 are renormalized with a warning;
/// components below the Composition floor are zero-replaced with a warning.
CompositionDataset load_dataset(const CsvTable& table, const LoadOptions& options);
CompositionDataset load_dataset_file(const std::string& path, const LoadOptions& options);

/// Assembles a dataset from in-memory matrices (simulation generators).
/// Applies the same response validation and rank checks as the loader.
CompositionDataset make_dataset(Matrix Y, Matrix X, Matrix W,
                                std::vector<std::string> x_names = {},
                                std::vector<std::string> w_names = {},
                                std::optional<std::vector<int>> group = std::nullopt,
                                std::vector<std::string> group_levels = {});

/// Serializes a dataset back to CSV (responses y1..yP, then any covariate
/// columns given at load time are not retained; used for generated data).
CsvTable dataset_to_csv(const CompositionDataset& dataset,
                        const std::vector<std::string>& extra_headers = {},
                        const std::vector<std::vector<std::string>>& extra_columns = {});

}  // namespace dirireg
