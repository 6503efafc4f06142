#include "dirireg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "dirireg/dirichlet.hpp"
#include "dirireg/errors.hpp"

namespace dirireg {

std::string coding_name(Coding c) {
    switch (c) {
        case Coding::cell_means: return "cell_means";
        case Coding::treatment: return "treatment";
        default: return "automatic";
    }
}

namespace {

bool parse_number(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc()) return false;
    while (res.ptr < e && (*res.ptr == ' ' || *res.ptr == '\t')) ++res.ptr;
    return res.ptr == e;
}

bool column_is_numeric(const CsvTable& t, std::size_t col) {
    double v;
    for (const auto& row : t.rows) {
        if (!parse_number(row[col], v)) return false;
    }
    return true;
}

struct Term {
    std::string name;
    bool intercept = false;
    bool factor = false;
    std::size_t col = 0;
    std::vector<std::string> levels;  // factor levels in first-appearance order
};

std::vector<Term> analyze_terms(const CsvTable& t, const std::vector<std::string>& columns) {
    std::vector<Term> terms;
    for (const auto& name : columns) {
        Term term;
        term.name = name;
        if (name == "1") {
            term.intercept = true;
        } else {
            term.col = t.column(name);
            term.factor = !column_is_numeric(t, term.col);
            if (term.factor) {
                std::set<std::string> seen;
                for (const auto& row : t.rows) {
                    if (seen.insert(row[term.col]).second) term.levels.push_back(row[term.col]);
                }
                if (term.levels.size() < 2) {
                    throw DegenerateDataError("factor column '" + name +
                                              "' has fewer than 2 levels");
                }
            }
        }
        terms.push_back(std::move(term));
    }
    return terms;
}

Coding resolve_coding(const std::vector<Term>& terms, Coding requested) {
    if (requested != Coding::automatic) return requested;
    const bool single_factor = terms.size() == 1 && terms[0].factor;
    return single_factor ? Coding::cell_means : Coding::treatment;
}

void build_design(const CsvTable& t, const std::vector<Term>& terms, Coding coding,
                  Matrix& X, std::vector<std::string>& names) {
    const std::size_t n = t.n_rows();
    std::vector<std::vector<double>> cols;
    names.clear();

    const bool cell_means = coding == Coding::cell_means;
    bool explicit_intercept = false;
    for (const auto& term : terms) explicit_intercept |= term.intercept;

    // Treatment coding carries an intercept unless the only term is "1".
    if (!cell_means) {
        names.push_back("(intercept)");
        cols.emplace_back(n, 1.0);
    } else if (explicit_intercept && terms.size() == 1) {
        names.push_back("(intercept)");
        cols.emplace_back(n, 1.0);
    }

    for (const auto& term : terms) {
        if (term.intercept) continue;
        if (!term.factor) {
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) {
                double v;
                parse_number(t.rows[i][term.col], v);
                col[i] = v;
            }
            names.push_back(term.name);
            cols.push_back(std::move(col));
            continue;
        }
        const std::size_t first = cell_means ? 0 : 1;
        for (std::size_t l = first; l < term.levels.size(); ++l) {
            std::vector<double> col(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (t.rows[i][term.col] == term.levels[l]) col[i] = 1.0;
            }
            names.push_back(term.name + "=" + term.levels[l]);
            cols.push_back(std::move(col));
        }
    }

    X.resize(static_cast<Index>(n), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) X(static_cast<Index>(i), static_cast<Index>(j)) = cols[j][i];
    }
}

void check_full_rank(const Matrix& X, const std::vector<std::string>& names,
                     const std::string& which) {
    if (X.cols() < 1) throw DimensionError(which + " design has no columns");
    Eigen::ColPivHouseholderQR<Matrix> qr(X);
    qr.setThreshold(1e-10);
    const Index rank = qr.rank();
    if (rank < X.cols()) {
        // Columns pivoted past the numerical rank are the dependent ones.
        const auto perm = qr.colsPermutation().indices();
        const Index bad = perm(rank);
        throw InitializationError(which + " design is rank deficient: column '" +
                                  names[static_cast<std::size_t>(bad)] +
                                  "' is linearly dependent on the others");
    }
}

void validate_responses(Matrix& Y, std::vector<std::string>& warnings) {
    std::size_t renormalized = 0;
    std::size_t replaced = 0;
    for (Index i = 0; i < Y.rows(); ++i) {
        Vector row = Y.row(i).transpose();
        for (Index j = 0; j < row.size(); ++j) {
            if (row(j) < 0.0) {
                throw DomainError("response row " + std::to_string(i + 1) +
                                  " has a negative component");
            }
        }
        const double s = row.sum();
        if (s <= 0.0) {
            throw DomainError("response row " + std::to_string(i + 1) + " sums to zero");
        }
        if (std::abs(s - 1.0) > 1e-6) ++renormalized;
        bool small = false;
        for (Index j = 0; j < row.size(); ++j) small |= row(j) / s < kCompositionFloor;
        if (small) ++replaced;
        Y.row(i) = zero_replace(row).transpose();
    }
    if (renormalized > 0) {
        warnings.push_back(std::to_string(renormalized) +
                           " response row(s) had sum outside 1 +/- 1e-6 and were renormalized");
    }
    if (replaced > 0) {
        warnings.push_back(std::to_string(replaced) +
                           " response row(s) contained components below 1e-12; multiplicative "
                           "replacement with eps=1e-6 applied");
    }
    // Construction doubles as validation of the final rows.
    for (Index i = 0; i < Y.rows(); ++i) Composition(Y.row(i).transpose());
}

}  // namespace

CompositionDataset load_dataset(const CsvTable& table, const LoadOptions& options) {
    CompositionDataset ds;
    if (table.n_rows() == 0) throw DegenerateDataError("input has no data rows");

    // Responses: explicit names, else y1..yP in index order.
    std::vector<std::string> resp = options.response_columns;
    if (resp.empty()) {
        for (std::size_t p = 1;; ++p) {
            const std::string name = "y" + std::to_string(p);
            if (!table.has_column(name)) break;
            resp.push_back(name);
        }
        if (resp.size() < 2) {
            throw Error("no response columns found: expected y1..yP or --response names");
        }
    }
    if (resp.size() < 2) throw DimensionError("need at least 2 response columns");

    const std::size_t n = table.n_rows();
    ds.Y.resize(static_cast<Index>(n), static_cast<Index>(resp.size()));
    for (std::size_t j = 0; j < resp.size(); ++j) {
        const std::size_t col = table.column(resp[j]);
        for (std::size_t i = 0; i < n; ++i) {
            double v;
            if (!parse_number(table.rows[i][col], v)) {
                throw Error("non-numeric response value in column '" + resp[j] + "' at line " +
                            std::to_string(i + 2));
            }
            ds.Y(static_cast<Index>(i), static_cast<Index>(j)) = v;
        }
    }
    ds.response_names = resp;
    validate_responses(ds.Y, ds.warnings);

    const auto mean_terms = analyze_terms(table, options.mean_columns);
    ds.x_coding = resolve_coding(mean_terms, options.coding);
    build_design(table, mean_terms, ds.x_coding, ds.X, ds.x_names);
    check_full_rank(ds.X, ds.x_names, "mean");

    const auto prec_terms = analyze_terms(table, options.precision_columns);
    build_design(table, prec_terms, resolve_coding(prec_terms, options.coding), ds.W, ds.w_names);
    check_full_rank(ds.W, ds.w_names, "precision");

    if (options.group_column) {
        const std::size_t col = table.column(*options.group_column);
        std::vector<int> ids(n);
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& label = table.rows[i][col];
            auto it = index.find(label);
            if (it == index.end()) {
                it = index.emplace(label, static_cast<int>(ds.group_levels.size())).first;
                ds.group_levels.push_back(label);
            }
            ids[i] = it->second;
        }
        ds.group = std::move(ids);
    }
    return ds;
}

CompositionDataset load_dataset_file(const std::string& path, const LoadOptions& options) {
    return load_dataset(read_csv_file(path), options);
}

CompositionDataset make_dataset(Matrix Y, Matrix X, Matrix W, std::vector<std::string> x_names,
                                std::vector<std::string> w_names,
                                std::optional<std::vector<int>> group,
                                std::vector<std::string> group_levels) {
    CompositionDataset ds;
    if (Y.rows() != X.rows() || Y.rows() != W.rows()) {
        throw DimensionError("make_dataset: Y, X, W row counts differ");
    }
    ds.Y = std::move(Y);
    ds.X = std::move(X);
    ds.W = std::move(W);
    validate_responses(ds.Y, ds.warnings);
    ds.x_names = std::move(x_names);
    ds.w_names = std::move(w_names);
    for (Index j = static_cast<Index>(ds.x_names.size()); j < ds.X.cols(); ++j) {
        ds.x_names.push_back("x" + std::to_string(j + 1));
    }
    for (Index j = static_cast<Index>(ds.w_names.size()); j < ds.W.cols(); ++j) {
        ds.w_names.push_back("w" + std::to_string(j + 1));
    }
    for (Index j = 0; j < ds.Y.cols(); ++j) ds.response_names.push_back("y" + std::to_string(j + 1));
    check_full_rank(ds.X, ds.x_names, "mean");
    check_full_rank(ds.W, ds.w_names, "precision");
    if (group) {
        if (static_cast<Index>(group->size()) != ds.Y.rows()) {
            throw DimensionError("make_dataset: group length mismatch");
        }
        int g_max = -1;
        for (int g : *group) {
            if (g < 0) throw DomainError("make_dataset: negative group id");
            g_max = std::max(g_max, g);
        }
        if (group_levels.empty()) {
            for (int g = 0; g <= g_max; ++g) group_levels.push_back("g" + std::to_string(g + 1));
        }
        if (static_cast<int>(group_levels.size()) != g_max + 1) {
            throw DomainError("make_dataset: group ids not contiguous 0..G-1");
        }
        ds.group = std::move(group);
        ds.group_levels = std::move(group_levels);
    }
    return ds;
}

CsvTable dataset_to_csv(const CompositionDataset& dataset,
                        const std::vector<std::string>& extra_headers,
                        const std::vector<std::vector<std::string>>& extra_columns) {
    CsvTable t;
    t.header = dataset.response_names;
    for (const auto& h : extra_headers) t.header.push_back(h);
    for (Index i = 0; i < dataset.Y.rows(); ++i) {
        std::vector<std::string> row;
        for (Index j = 0; j < dataset.Y.cols(); ++j) row.push_back(format_double(dataset.Y(i, j)));
        for (const auto& col : extra_columns) row.push_back(col[static_cast<std::size_t>(i)]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace dirireg
