#include "dirireg/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "dirireg/dirichlet.hpp"
#include "dirireg/errors.hpp"
#include "dirireg/links.hpp"
#include "dirireg/metrics.hpp"
#include "dirireg/ml_baseline.hpp"
#include "dirireg/rng.hpp"

namespace dirireg {

ScenarioConfig ScenarioConfig::scenario_a(double phi) {
    ScenarioConfig c;
    c.name = "A";
    c.P = 3;
    c.n_levels = 3;
    c.n_per_level = 20;
    c.level_coefficients = Matrix::Zero(3, 3);
    c.level_coefficients.col(1) << -0.9, 0.6, 1.2;
    c.level_coefficients.col(2) << 0.8, -1.0, 0.5;
    c.phi = phi;
    return c;
}

ScenarioConfig ScenarioConfig::scenario_b() {
    ScenarioConfig c;
    c.name = "B";
    c.P = 3;
    c.n_levels = 2;
    c.n_per_level = 40;
    c.level_coefficients = Matrix::Zero(2, 3);
    c.level_coefficients.col(1) << -0.9, 0.6;
    c.level_coefficients.col(2) << 1.8, -1.0;
    c.has_x2 = true;
    c.x2_min = 4.5;
    c.x2_max = 7.5;
    c.x2_coefficients = Vector::Zero(3);
    c.x2_coefficients(2) = 0.75;
    c.precision_coefficients = (Vector(2) << -1.0, 0.5).finished();
    return c;
}

ScenarioConfig ScenarioConfig::scenario_a_dim(Index P, std::uint64_t coef_seed) {
    ScenarioConfig c = scenario_a();
    c.name = "A_dim" + std::to_string(P);
    c.P = P;
    c.level_coefficients = Matrix::Zero(3, P);
    Rng rng(mix_seed(coef_seed, 0xd1));
    for (Index l = 0; l < 3; ++l) {
        for (Index j = 1; j < P; ++j) c.level_coefficients(l, j) = rng.uniform(-1.5, 1.5);
    }
    return c;
}

namespace {

struct TruthDesign {
    Matrix X;  // fitting design
    Matrix W;
    std::vector<std::string> x_names;
    std::vector<std::string> w_names;
    Matrix true_mu;
    Vector true_phi;
};

TruthDesign build_truth(const ScenarioConfig& c) {
    const Index n = c.n_levels * c.n_per_level;
    TruthDesign t;

    std::vector<int> level(static_cast<std::size_t>(n));
    Vector x2 = Vector::Zero(n);
    for (Index l = 0; l < c.n_levels; ++l) {
        for (Index k = 0; k < c.n_per_level; ++k) {
            const Index i = l * c.n_per_level + k;
            level[static_cast<std::size_t>(i)] = static_cast<int>(l);
            if (c.has_x2) {
                // even grid over [x2_min, x2_max] per level
                const double frac = c.n_per_level > 1
                                        ? static_cast<double>(k) / static_cast<double>(c.n_per_level - 1)
                                        : 0.5;
                x2(i) = c.x2_min + frac * (c.x2_max - c.x2_min);
            }
        }
    }

    // Linear predictors: level offsets plus the X2 term, then softmax.
    Matrix eta(n, c.P);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < c.P; ++j) {
            eta(i, j) = c.level_coefficients(level[static_cast<std::size_t>(i)], j);
            if (c.has_x2) eta(i, j) += c.x2_coefficients(j) * x2(i);
        }
    }
    t.true_mu = inverse_multivariate_logit(eta);

    t.true_phi.resize(n);
    for (Index i = 0; i < n; ++i) {
        t.true_phi(i) = c.precision_coefficients
                            ? std::exp((*c.precision_coefficients)(0) +
                                       (*c.precision_coefficients)(1) * x2(i))
                            : c.phi;
    }

    // Fitting design: cell means for the lone factor; treatment coding with
    // an intercept once the continuous term enters.
    if (!c.has_x2) {
        t.X = Matrix::Zero(n, c.n_levels);
        for (Index i = 0; i < n; ++i) t.X(i, level[static_cast<std::size_t>(i)]) = 1.0;
        for (Index l = 0; l < c.n_levels; ++l) t.x_names.push_back("level=" + std::to_string(l + 1));
        t.W = Matrix::Ones(n, 1);
        t.w_names = {"(intercept)"};
    } else {
        t.X = Matrix::Zero(n, c.n_levels + 1);
        t.X.col(0).setOnes();
        for (Index i = 0; i < n; ++i) {
            const int l = level[static_cast<std::size_t>(i)];
            if (l > 0) t.X(i, l) = 1.0;
        }
        t.X.col(c.n_levels) = x2;
        t.x_names.push_back("(intercept)");
        for (Index l = 1; l < c.n_levels; ++l) t.x_names.push_back("level=" + std::to_string(l + 1));
        t.x_names.push_back("x2");
        t.W = Matrix::Ones(n, 2);
        t.W.col(1) = x2;
        t.w_names = {"(intercept)", "x2"};
    }
    return t;
}

Matrix draw_responses(const Matrix& true_mu, const Vector& true_phi, Rng& rng) {
    Matrix Y(true_mu.rows(), true_mu.cols());
    for (Index i = 0; i < Y.rows(); ++i) {
        const Vector alpha = true_mu.row(i).transpose() * true_phi(i);
        Y.row(i) = zero_replace(sample_one(alpha, rng)).transpose();
    }
    return Y;
}

}  // namespace

GeneratedData generate_scenario(const ScenarioConfig& c, std::uint64_t seed) {
    TruthDesign t = build_truth(c);
    Rng rng(mix_seed(seed, 0x5c));
    GeneratedData g;
    g.true_mu = t.true_mu;
    g.true_phi = t.true_phi;
    g.dataset = make_dataset(draw_responses(t.true_mu, t.true_phi, rng), t.X, t.W, t.x_names,
                             t.w_names);
    return g;
}

Matrix generate_responses(const GeneratedData& truth, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x4e));
    return draw_responses(truth.true_mu, truth.true_phi, rng);
}

NetballData generate_netball(const NetballConfig& c) {
    // Plausible standing/walking/running profiles by position; rows are
    // logit-scale intercepts so the raw means sum to one at zero player
    // effect.
    const std::vector<std::string> position_names = {"GS", "GA", "WA", "C", "WD", "GD", "GK"};
    const double profiles[7][3] = {
        {0.50, 0.35, 0.15}, {0.35, 0.40, 0.25}, {0.25, 0.45, 0.30}, {0.20, 0.45, 0.35},
        {0.30, 0.45, 0.25}, {0.40, 0.40, 0.20}, {0.55, 0.30, 0.15}};

    if (c.n_positions < 1 || c.n_positions > 7) throw DomainError("generate_netball: 1..7 positions");
    Rng rng(mix_seed(c.seed, 0xba11));

    std::vector<int> player_position(static_cast<std::size_t>(c.n_players));
    std::vector<int> player_matches(static_cast<std::size_t>(c.n_players));
    std::vector<Vector> player_effect(static_cast<std::size_t>(c.n_players));
    Index n = 0;
    for (int pl = 0; pl < c.n_players; ++pl) {
        player_position[static_cast<std::size_t>(pl)] = pl % c.n_positions;
        const int span = c.max_matches - c.min_matches + 1;
        player_matches[static_cast<std::size_t>(pl)] =
            c.min_matches + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(span));
        Vector u(3);
        for (Index j = 0; j < 3; ++j) u(j) = c.player_sd * rng.normal();
        player_effect[static_cast<std::size_t>(pl)] = u;
        n += player_matches[static_cast<std::size_t>(pl)];
    }

    NetballData data;
    Matrix X = Matrix::Zero(n, c.n_positions);
    Matrix W = Matrix::Ones(n, 1);
    data.true_mu.resize(n, 3);
    data.true_phi = Vector::Constant(n, c.phi);
    std::vector<int> group(static_cast<std::size_t>(n));
    Matrix Y(n, 3);

    Index row = 0;
    for (int pl = 0; pl < c.n_players; ++pl) {
        const int pos = player_position[static_cast<std::size_t>(pl)];
        for (int m = 0; m < player_matches[static_cast<std::size_t>(pl)]; ++m) {
            X(row, pos) = 1.0;
            group[static_cast<std::size_t>(row)] = pl;
            Vector mu_raw(3);
            for (Index j = 0; j < 3; ++j) {
                const double eta = logit(profiles[pos][j]) + player_effect[static_cast<std::size_t>(pl)](j);
                mu_raw(j) = inv_logit(eta);
            }
            const Vector mu = mu_raw / mu_raw.sum();
            data.true_mu.row(row) = mu.transpose();
            const Vector alpha = mu * c.phi;
            Y.row(row) = zero_replace(sample_one(alpha, rng)).transpose();
            data.position_of_row.push_back(position_names[static_cast<std::size_t>(pos)]);
            data.player_of_row.push_back("P" + std::to_string(pl + 1));
            ++row;
        }
    }

    std::vector<std::string> x_names;
    for (int p = 0; p < c.n_positions; ++p) x_names.push_back("position=" + position_names[static_cast<std::size_t>(p)]);
    std::vector<std::string> player_levels;
    for (int pl = 0; pl < c.n_players; ++pl) player_levels.push_back("P" + std::to_string(pl + 1));
    data.dataset = make_dataset(std::move(Y), std::move(X), std::move(W), std::move(x_names),
                                {"(intercept)"}, std::move(group), std::move(player_levels));
    return data;
}

int env_thread_cap() {
    const char* env = std::getenv("DIRIREG_THREADS");
    if (!env) return 0;
    const int v = std::atoi(env);
    return v > 0 ? v : 0;
}

namespace {

struct ReplicateResult {
    bool bayes_ok = false;
    bool ml_ok = false;
    FitStatistics bayes_stats;
    FitStatistics ml_stats;
    std::map<std::string, double> bayes_p;
    std::map<std::string, double> ml_p;
};

double fraction_covered(const Matrix& lower, const Matrix& upper, const Matrix& values) {
    double covered = 0.0;
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) {
            if (lower(i, j) <= values(i, j) && values(i, j) <= upper(i, j)) covered += 1.0;
        }
    }
    return covered / static_cast<double>(values.size());
}

std::string mu_label(const std::string& x_name, Index dim) {
    return "mu:" + x_name + ":dim" + std::to_string(dim + 1);
}

std::string phi_label(const std::string& w_name) { return "phi:" + w_name; }

ReplicateResult run_replicate(const ScenarioConfig& sc, const SamplerConfig& base_sampler,
                              const std::set<std::string>& methods, int rep) {
    ReplicateResult out;
    const std::uint64_t rep_seed = mix_seed(sc.seed, static_cast<std::uint64_t>(rep));
    const GeneratedData gen = generate_scenario(sc, rep_seed);
    const Matrix held_out = generate_responses(gen, mix_seed(rep_seed, 0x40));
    const auto& ds = gen.dataset;
    const Index P = ds.n_dim();
    const Index Q = ds.X.cols();

    if (methods.count("new_bayes")) {
        try {
            SamplerConfig cfg = base_sampler;
            cfg.seed = mix_seed(rep_seed, 0x8a);
            cfg.n_threads = 1;
            const auto chains = run(ds, ModelConfig{}, cfg);
            const FitSummary fs = summarize(chains);
            out.bayes_stats.sce = sce(fs.mu_mean, gen.true_mu);
            const CoverageWidth cw =
                coverage_and_width(fs.mu_lower, fs.mu_upper, gen.true_mu, gen.true_mu);
            out.bayes_stats.coverage = cw.coverage;
            out.bayes_stats.std_width = cw.std_width;
            const PredictiveSummary pred =
                posterior_predictive(chains, ds, mix_seed(rep_seed, 0x9e));
            out.bayes_stats.predictive_coverage = fraction_covered(pred.lower, pred.upper, held_out);
            for (Index j = 0; j < P; ++j) {
                for (Index k = 0; k < Q; ++k) {
                    const auto& p = fs.parameter("beta[" + std::to_string(k + 1) + "," +
                                                 std::to_string(j + 1) + "]");
                    out.bayes_p[mu_label(ds.x_names[static_cast<std::size_t>(k)], j)] = p.p_value;
                }
            }
            for (Index r = 0; r < ds.W.cols(); ++r) {
                const auto& p = fs.parameter("beta_phi[" + std::to_string(r + 1) + "]");
                out.bayes_p[phi_label(ds.w_names[static_cast<std::size_t>(r)])] = p.p_value;
            }
            out.bayes_ok = true;
        } catch (const Error&) {
            out.bayes_ok = false;
        }
    }

    if (methods.count("maier_ml")) {
        try {
            const MLFit fit = fit_ml_regression(ds);
            out.ml_stats.sce = sce(fit.mu_hat, gen.true_mu);
            const MuIntervals mi = ml_mu_intervals(fit, ds);
            const CoverageWidth cw = coverage_and_width(mi.lower, mi.upper, gen.true_mu, gen.true_mu);
            out.ml_stats.coverage = cw.coverage;
            out.ml_stats.std_width = cw.std_width;
            const MuIntervals pred = ml_plug_in_predictive(fit, 2000, mix_seed(rep_seed, 0x77));
            out.ml_stats.predictive_coverage = fraction_covered(pred.lower, pred.upper, held_out);
            std::size_t k = 0;
            for (Index j = 0; j < P; ++j) {
                if (j == fit.base_dim) continue;
                for (Index q = 0; q < Q; ++q, ++k) {
                    out.ml_p[mu_label(ds.x_names[static_cast<std::size_t>(q)], j)] = fit.wald_p(static_cast<Index>(k));
                }
            }
            for (Index r = 0; r < ds.W.cols(); ++r, ++k) {
                out.ml_p[phi_label(ds.w_names[static_cast<std::size_t>(r)])] = fit.wald_p(static_cast<Index>(k));
            }
            out.ml_ok = true;
        } catch (const Error&) {
            out.ml_ok = false;
        }
    }
    return out;
}

MethodStudySummary aggregate(const std::string& method, const std::vector<ReplicateResult>& reps) {
    MethodStudySummary s;
    s.method = method;
    const bool bayes = method == "new_bayes";
    std::map<std::string, std::vector<double>> p_collect;
    for (const auto& r : reps) {
        const bool ok = bayes ? r.bayes_ok : r.ml_ok;
        if (!ok) {
            ++s.n_failed;
            continue;
        }
        const FitStatistics& st = bayes ? r.bayes_stats : r.ml_stats;
        s.mean_sce += st.sce;
        s.mean_coverage += st.coverage;
        s.mean_std_width += st.std_width;
        s.mean_predictive_coverage += st.predictive_coverage;
        ++s.n_success;
        for (const auto& [label, p] : (bayes ? r.bayes_p : r.ml_p)) {
            if (std::isfinite(p)) p_collect[label].push_back(p);
        }
    }
    if (s.n_success > 0) {
        const double denom = static_cast<double>(s.n_success);
        s.mean_sce /= denom;
        s.mean_coverage /= denom;
        s.mean_std_width /= denom;
        s.mean_predictive_coverage /= denom;
    }
    for (auto& [label, values] : p_collect) {
        std::sort(values.begin(), values.end());
        const std::size_t m = values.size();
        s.median_p[label] = (m % 2 == 1) ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
    }
    return s;
}

}  // namespace

StudySummary run_study(const ScenarioConfig& scenario_config, const SamplerConfig& sampler_config,
                       const std::set<std::string>& methods, int n_threads) {
    if (scenario_config.replicates < 1) throw DomainError("run_study: replicates must be >= 1");
    for (const auto& m : methods) {
        if (m != "new_bayes" && m != "maier_ml") {
            throw DomainError("run_study: unknown method '" + m + "'");
        }
    }

    const int R = scenario_config.replicates;
    std::vector<ReplicateResult> results(static_cast<std::size_t>(R));

    int cap = n_threads > 0 ? n_threads : env_thread_cap();
    if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
    cap = std::max(1, std::min(cap, R));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int rep = next.fetch_add(1);
            if (rep >= R) return;
            results[static_cast<std::size_t>(rep)] =
                run_replicate(scenario_config, sampler_config, methods, rep);
        }
    };
    if (cap == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < cap; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    StudySummary summary;
    summary.scenario_name = scenario_config.name;
    summary.replicates = R;
    for (const auto& m : methods) summary.methods.push_back(aggregate(m, results));
    return summary;
}

}  // namespace dirireg
