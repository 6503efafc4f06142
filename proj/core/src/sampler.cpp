#include "dirireg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dirireg/dirichlet.hpp"
#include "dirireg/diagnostics.hpp"
#include "dirireg/errors.hpp"
#include "dirireg/links.hpp"
#include "dirireg/rng.hpp"
#include "dirireg/special_functions.hpp"

namespace dirireg {

Index PosteriorChain::col(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) return static_cast<Index>(k);
    }
    throw DiagnosticsError("chain has no parameter named '" + name + "'");
}

const ParameterSummary& FitSummary::parameter(const std::string& name) const {
    for (const auto& p : parameters) {
        if (p.name == name) return p;
    }
    throw DiagnosticsError("summary has no parameter named '" + name + "'");
}

GammaParams xi_conditional(const Matrix& mu, double prior_rate) {
    double ss = 0.0;
    for (Index i = 0; i < mu.rows(); ++i) {
        const double d = mu.row(i).sum() - 1.0;
        ss += d * d;
    }
    return {0.5 * static_cast<double>(mu.rows()) + 1.0, 0.5 * ss + prior_rate};
}

GammaParams xi_star_conditional(const Matrix& log_alpha, const Matrix& log_mu,
                                const Vector& log_phi, double prior_rate) {
    double ss = 0.0;
    for (Index i = 0; i < log_alpha.rows(); ++i) {
        for (Index j = 0; j < log_alpha.cols(); ++j) {
            const double r = log_alpha(i, j) - log_mu(i, j) - log_phi(i);
            ss += r * r;
        }
    }
    return {0.5 * static_cast<double>(log_alpha.size()) + 1.0, 0.5 * ss + prior_rate};
}

namespace {

// Tracks one proposal block: adaptive step size (Robbins-Monro toward the
// target rate during burn-in, frozen afterwards) plus acceptance tallies.
struct Block {
    double step = 0.1;
    long window_accepts = 0;
    long window_proposals = 0;
    long windows_done = 0;
    long post_accepts = 0;
    long post_proposals = 0;
    double step_after_burnin = 0.0;

    void tally(bool accepted, bool adapting, double target, int window) {
        if (adapting) {
            window_accepts += accepted;
            if (++window_proposals >= window) {
                const double rate =
                    static_cast<double>(window_accepts) / static_cast<double>(window_proposals);
                ++windows_done;
                const double gain = 1.0 / std::sqrt(static_cast<double>(windows_done));
                step *= std::exp(gain * (rate - target));
                step = std::clamp(step, 1e-6, 50.0);
                window_accepts = 0;
                window_proposals = 0;
            }
        } else {
            post_accepts += accepted;
            ++post_proposals;
        }
    }

    double post_rate() const {
        return post_proposals > 0
                   ? static_cast<double>(post_accepts) / static_cast<double>(post_proposals)
                   : 0.0;
    }
};

class ChainRunner {
  public:
    ChainRunner(const CompositionDataset& ds, const ModelConfig& mc, const SamplerConfig& sc,
                std::uint64_t chain_seed)
        : ds_(ds), mc_(mc), sc_(sc), rng_(chain_seed) {
        n_ = ds.n_obs();
        P_ = ds.n_dim();
        Q_ = ds.X.cols();
        R_ = ds.W.cols();
        re_ = mc.random_effects;
        G_ = re_ ? ds.n_groups() : 0;
        lny_ = ds.Y.array().log().matrix();
        if (re_) {
            group_rows_.resize(static_cast<std::size_t>(G_));
            for (Index i = 0; i < n_; ++i) {
                group_rows_[static_cast<std::size_t>((*ds.group)[static_cast<std::size_t>(i)])]
                    .push_back(i);
            }
        }
        initialize();
    }

    PosteriorChain sample() {
        const int T = sc_.n_retained();
        PosteriorChain chain;
        chain.n_obs = n_;
        chain.n_dim = P_;
        chain.names = parameter_names();
        chain.draws.resize(T, static_cast<Index>(chain.names.size()));
        chain.mu_adj.resize(T, n_ * P_);
        chain.phi.resize(T, n_);

        int stored = 0;
        for (int t = 0; t < sc_.n_iter; ++t) {
            adapting_ = t < sc_.n_burnin;
            iterate();
            if (t == sc_.n_burnin - 1) record_steps_after_burnin();
            if (t >= sc_.n_burnin && (t - sc_.n_burnin + 1) % sc_.thin == 0) {
                store_draw(chain, stored++);
            }
        }
        finalize_diagnostics(chain);
        return chain;
    }

  private:
    // --- initialization ---------------------------------------------------

    void initialize() {
        // Least squares of the clamped logit responses on X.
        Matrix Z(n_, P_);
        for (Index i = 0; i < n_; ++i) {
            for (Index j = 0; j < P_; ++j) {
                Z(i, j) = logit(std::clamp(ds_.Y(i, j), 0.001, 0.999));
            }
        }
        beta_ = ds_.X.colPivHouseholderQr().solve(Z);

        double alpha0_hat = static_cast<double>(P_);
        try {
            std::vector<Composition> rows;
            rows.reserve(static_cast<std::size_t>(n_));
            for (Index i = 0; i < n_; ++i) rows.emplace_back(ds_.Y.row(i).transpose());
            alpha0_hat = fit_moments(rows).alpha0();
        } catch (const Error&) {
            // keep the neutral default when the moment fit degenerates
        }
        const Vector target = Vector::Constant(n_, std::log(alpha0_hat));
        beta_phi_ = ds_.W.colPivHouseholderQr().solve(target);

        // Chain-specific overdispersion.
        for (Index k = 0; k < beta_.size(); ++k) {
            beta_.data()[k] += sc_.init_jitter_sd * rng_.normal();
        }
        for (Index r = 0; r < R_; ++r) beta_phi_(r) += sc_.init_jitter_sd * rng_.normal();

        if (re_) {
            u_ = Matrix::Zero(G_, P_);
            sigma_u_ = Vector::Constant(P_, mc_.sigma_u_prior_mean);
        }

        xi_ = sc_.fix_xi ? *sc_.fix_xi : mc_.xi_mean(P_);
        xi_star_ = sc_.fix_xi_star ? *sc_.fix_xi_star : mc_.xi_star_mean(P_);

        rebuild_caches();
        la_ = log_mu_;
        for (Index i = 0; i < n_; ++i) la_.row(i).array() += log_phi_(i);
        rebuild_alpha_caches();

        if (!std::isfinite(current_log_posterior())) {
            throw InitializationError("sampler: log posterior not finite at initialization");
        }

        blk_beta_.assign(static_cast<std::size_t>(P_), Block{});
        for (auto& b : blk_beta_) b.step = 0.25;
        blk_phi_.step = 0.25;
        blk_la_.assign(static_cast<std::size_t>(n_ * P_), Block{});
        for (auto& b : blk_la_) b.step = 0.5;
        if (re_) {
            blk_u_.assign(static_cast<std::size_t>(G_), Block{});
            for (auto& b : blk_u_) b.step = 0.25;
            blk_sigma_.assign(static_cast<std::size_t>(P_), Block{});
            for (auto& b : blk_sigma_) b.step = 0.4;
        }
    }

    void rebuild_caches() {
        eta_ = ds_.X * beta_;
        if (re_) {
            for (Index i = 0; i < n_; ++i) {
                eta_.row(i) += u_.row((*ds_.group)[static_cast<std::size_t>(i)]);
            }
        }
        mu_.resize(n_, P_);
        log_mu_.resize(n_, P_);
        for (Index i = 0; i < n_; ++i) {
            for (Index j = 0; j < P_; ++j) {
                mu_(i, j) = inv_logit(eta_(i, j));
                log_mu_(i, j) = log_inv_logit(eta_(i, j));
            }
        }
        row_sum_ = mu_.rowwise().sum();
        log_phi_ = ds_.W * beta_phi_;
    }

    void rebuild_alpha_caches() {
        alpha_ = la_.array().exp().matrix();
        lg_alpha_.resize(n_, P_);
        for (Index i = 0; i < n_; ++i) {
            for (Index j = 0; j < P_; ++j) lg_alpha_(i, j) = log_gamma(alpha_(i, j));
        }
        alpha0_ = alpha_.rowwise().sum();
        resid_ = la_ - log_mu_;
        for (Index i = 0; i < n_; ++i) resid_.row(i).array() -= log_phi_(i);
    }

    // Full target evaluation; used only at initialization and in debug
    // comparisons, the updates below work with local differences.
    double current_log_posterior() const {
        CoefficientSet c;
        c.beta = beta_;
        c.beta_phi = beta_phi_;
        if (re_) {
            c.u = u_;
            c.sigma_u = sigma_u_;
        }
        LatentState l;
        l.log_alpha = la_;
        l.xi = xi_;
        l.xi_star = xi_star_;
        return log_penalized_posterior(ds_, c, l, mc_);
    }

    // --- block updates ----------------------------------------------------

    void iterate() {
        for (Index j = 0; j < P_; ++j) update_beta_column(j);
        update_beta_phi();
        if (re_) {
            for (Index g = 0; g < G_; ++g) update_u_block(g);
            for (Index j = 0; j < P_; ++j) update_sigma_u(j);
        }
        for (Index i = 0; i < n_; ++i) {
            for (Index j = 0; j < P_; ++j) update_la_site(i, j);
        }
        if (!sc_.fix_xi) {
            const GammaParams g = xi_conditional(mu_, mc_.xi_rate(P_));
            xi_ = rng_.gamma(g.shape, g.rate);
        }
        if (!sc_.fix_xi_star) {
            const GammaParams g = xi_star_conditional(la_, log_mu_, log_phi_, mc_.xi_star_rate(P_));
            xi_star_ = rng_.gamma(g.shape, g.rate);
        }
    }

    void update_beta_column(Index j) {
        Block& blk = blk_beta_[static_cast<std::size_t>(j)];
        Vector delta(Q_);
        for (Index k = 0; k < Q_; ++k) delta(k) = blk.step * rng_.normal();
        const Vector deta = ds_.X * delta;

        double dlp = 0.0;
        Vector new_eta(n_), new_mu(n_), new_logmu(n_);
        for (Index i = 0; i < n_; ++i) {
            new_eta(i) = eta_(i, j) + deta(i);
            new_mu(i) = inv_logit(new_eta(i));
            new_logmu(i) = log_inv_logit(new_eta(i));
            const double r_old = resid_(i, j);
            const double r_new = la_(i, j) - new_logmu(i) - log_phi_(i);
            dlp += -0.5 * xi_star_ * (r_new * r_new - r_old * r_old);
            const double d_old = row_sum_(i) - 1.0;
            const double d_new = d_old - mu_(i, j) + new_mu(i);
            dlp += -0.5 * xi_ * (d_new * d_new - d_old * d_old);
        }
        const Vector bnew = beta_.col(j) + delta;
        dlp += -0.5 * (bnew.squaredNorm() - beta_.col(j).squaredNorm()) / mc_.prior_beta_variance;

        const bool accept = std::log(rng_.uniform()) < dlp;
        if (accept) {
            beta_.col(j) = bnew;
            for (Index i = 0; i < n_; ++i) {
                row_sum_(i) += new_mu(i) - mu_(i, j);
                eta_(i, j) = new_eta(i);
                mu_(i, j) = new_mu(i);
                log_mu_(i, j) = new_logmu(i);
                resid_(i, j) = la_(i, j) - new_logmu(i) - log_phi_(i);
            }
        }
        blk.tally(accept, adapting_, sc_.target_accept, sc_.adapt_window);
    }

    void update_beta_phi() {
        Vector delta(R_);
        for (Index r = 0; r < R_; ++r) delta(r) = blk_phi_.step * rng_.normal();
        const Vector dlogphi = ds_.W * delta;

        double dlp = 0.0;
        for (Index i = 0; i < n_; ++i) {
            for (Index j = 0; j < P_; ++j) {
                const double r_old = resid_(i, j);
                const double r_new = r_old - dlogphi(i);
                dlp += -0.5 * xi_star_ * (r_new * r_new - r_old * r_old);
            }
        }
        const Vector bnew = beta_phi_ + delta;
        dlp += -0.5 * (bnew.squaredNorm() - beta_phi_.squaredNorm()) / mc_.prior_beta_variance;

        const bool accept = std::log(rng_.uniform()) < dlp;
        if (accept) {
            beta_phi_ = bnew;
            log_phi_ += dlogphi;
            for (Index i = 0; i < n_; ++i) resid_.row(i).array() -= dlogphi(i);
        }
        blk_phi_.tally(accept, adapting_, sc_.target_accept, sc_.adapt_window);
    }

    void update_u_block(Index g) {
        Block& blk = blk_u_[static_cast<std::size_t>(g)];
        Vector delta(P_);
        for (Index j = 0; j < P_; ++j) delta(j) = blk.step * rng_.normal();

        const auto& rows = group_rows_[static_cast<std::size_t>(g)];
        double dlp = 0.0;
        Matrix new_eta(static_cast<Index>(rows.size()), P_);
        Matrix new_mu(static_cast<Index>(rows.size()), P_);
        Matrix new_logmu(static_cast<Index>(rows.size()), P_);
        for (std::size_t ri = 0; ri < rows.size(); ++ri) {
            const Index i = rows[ri];
            double sum_new = 0.0;
            for (Index j = 0; j < P_; ++j) {
                const double e = eta_(i, j) + delta(j);
                new_eta(static_cast<Index>(ri), j) = e;
                const double m = inv_logit(e);
                new_mu(static_cast<Index>(ri), j) = m;
                new_logmu(static_cast<Index>(ri), j) = log_inv_logit(e);
                sum_new += m;
                const double r_old = resid_(i, j);
                const double r_new = la_(i, j) - new_logmu(static_cast<Index>(ri), j) - log_phi_(i);
                dlp += -0.5 * xi_star_ * (r_new * r_new - r_old * r_old);
            }
            const double d_old = row_sum_(i) - 1.0;
            const double d_new = sum_new - 1.0;
            dlp += -0.5 * xi_ * (d_new * d_new - d_old * d_old);
        }
        for (Index j = 0; j < P_; ++j) {
            const double un = u_(g, j) + delta(j);
            dlp += -0.5 * (un * un - u_(g, j) * u_(g, j)) / (sigma_u_(j) * sigma_u_(j));
        }

        const bool accept = std::log(rng_.uniform()) < dlp;
        if (accept) {
            u_.row(g) += delta.transpose();
            for (std::size_t ri = 0; ri < rows.size(); ++ri) {
                const Index i = rows[ri];
                eta_.row(i) = new_eta.row(static_cast<Index>(ri));
                mu_.row(i) = new_mu.row(static_cast<Index>(ri));
                log_mu_.row(i) = new_logmu.row(static_cast<Index>(ri));
                row_sum_(i) = mu_.row(i).sum();
                for (Index j = 0; j < P_; ++j) {
                    resid_(i, j) = la_(i, j) - log_mu_(i, j) - log_phi_(i);
                }
            }
        }
        blk.tally(accept, adapting_, sc_.target_accept, sc_.adapt_window);
    }

    void update_sigma_u(Index j) {
        Block& blk = blk_sigma_[static_cast<std::size_t>(j)];
        const double s_old = sigma_u_(j);
        const double s_new = s_old * std::exp(blk.step * rng_.normal());

        double dlp = 0.0;
        const double v_old = s_old * s_old;
        const double v_new = s_new * s_new;
        for (Index g = 0; g < G_; ++g) {
            const double uu = u_(g, j) * u_(g, j);
            dlp += -0.5 * std::log(v_new) - 0.5 * uu / v_new;
            dlp -= -0.5 * std::log(v_old) - 0.5 * uu / v_old;
        }
        dlp += -(s_new - s_old) / mc_.sigma_u_prior_mean;
        dlp += std::log(s_new) - std::log(s_old);  // Jacobian of the log-scale walk

        const bool accept = std::log(rng_.uniform()) < dlp;
        if (accept) sigma_u_(j) = s_new;
        blk.tally(accept, adapting_, sc_.target_accept, sc_.adapt_window);
    }

    void update_la_site(Index i, Index j) {
        Block& blk = blk_la_[static_cast<std::size_t>(i * P_ + j)];
        const double la_old = la_(i, j);
        const double la_new = la_old + blk.step * rng_.normal();
        const double a_old = alpha_(i, j);
        const double a_new = std::exp(la_new);
        const double a0_new = alpha0_(i) - a_old + a_new;
        const double lg_new = log_gamma(a_new);

        double dlp = log_gamma(a0_new) - log_gamma(alpha0_(i));
        dlp += -(lg_new - lg_alpha_(i, j));
        dlp += (a_new - a_old) * lny_(i, j);
        const double r_old = resid_(i, j);
        const double r_new = r_old + (la_new - la_old);
        dlp += -0.5 * xi_star_ * (r_new * r_new - r_old * r_old);

        const bool accept = std::log(rng_.uniform()) < dlp;
        if (accept) {
            la_(i, j) = la_new;
            alpha_(i, j) = a_new;
            alpha0_(i) = a0_new;
            lg_alpha_(i, j) = lg_new;
            resid_(i, j) = r_new;
        }
        blk.tally(accept, adapting_, sc_.target_accept, sc_.adapt_window);
    }

    // --- bookkeeping --------------------------------------------------------

    std::vector<std::string> parameter_names() const {
        std::vector<std::string> names;
        for (Index j = 0; j < P_; ++j) {
            for (Index k = 0; k < Q_; ++k) {
                names.push_back("beta[" + std::to_string(k + 1) + "," + std::to_string(j + 1) + "]");
            }
        }
        for (Index r = 0; r < R_; ++r) names.push_back("beta_phi[" + std::to_string(r + 1) + "]");
        names.push_back("xi");
        names.push_back("xi_star");
        if (re_) {
            for (Index j = 0; j < P_; ++j) {
                for (Index g = 0; g < G_; ++g) {
                    names.push_back("u[" + std::to_string(g + 1) + "," + std::to_string(j + 1) + "]");
                }
            }
            for (Index j = 0; j < P_; ++j) names.push_back("sigma_u[" + std::to_string(j + 1) + "]");
        }
        return names;
    }

    void store_draw(PosteriorChain& chain, int t) {
        Index k = 0;
        for (Index j = 0; j < P_; ++j) {
            for (Index q = 0; q < Q_; ++q) chain.draws(t, k++) = beta_(q, j);
        }
        for (Index r = 0; r < R_; ++r) chain.draws(t, k++) = beta_phi_(r);
        chain.draws(t, k++) = xi_;
        chain.draws(t, k++) = xi_star_;
        if (re_) {
            for (Index j = 0; j < P_; ++j) {
                for (Index g = 0; g < G_; ++g) chain.draws(t, k++) = u_(g, j);
            }
            for (Index j = 0; j < P_; ++j) chain.draws(t, k++) = sigma_u_(j);
        }
        const Vector phi = log_phi_.array().exp();
        const CorrectedDraw corrected = apply_corrections(mu_, phi);
        for (Index j = 0; j < P_; ++j) {
            for (Index i = 0; i < n_; ++i) chain.mu_adj(t, j * n_ + i) = corrected.mu_adj(i, j);
        }
        chain.phi.row(t) = phi.transpose();
    }

    void record_steps_after_burnin() {
        for (auto& b : blk_beta_) b.step_after_burnin = b.step;
        blk_phi_.step_after_burnin = blk_phi_.step;
        for (auto& b : blk_la_) b.step_after_burnin = b.step;
        for (auto& b : blk_u_) b.step_after_burnin = b.step;
        for (auto& b : blk_sigma_) b.step_after_burnin = b.step;
    }

    void finalize_diagnostics(PosteriorChain& chain) {
        long accepts = 0;
        long proposals = 0;
        auto push = [&](const std::string& name, const Block& b) {
            chain.blocks.push_back({name, b.post_rate(), b.step_after_burnin, b.step});
            accepts += b.post_accepts;
            proposals += b.post_proposals;
        };
        for (Index j = 0; j < P_; ++j) {
            push("beta[" + std::to_string(j + 1) + "]", blk_beta_[static_cast<std::size_t>(j)]);
        }
        push("beta_phi", blk_phi_);
        for (Index g = 0; g < G_; ++g) {
            push("u[" + std::to_string(g + 1) + "]", blk_u_[static_cast<std::size_t>(g)]);
        }
        for (Index j = 0; j < static_cast<Index>(blk_sigma_.size()); ++j) {
            push("sigma_u[" + std::to_string(j + 1) + "]", blk_sigma_[static_cast<std::size_t>(j)]);
        }
        // log-alpha sites reported in aggregate
        long la_acc = 0;
        long la_prop = 0;
        double la_step_b = 0.0;
        double la_step_f = 0.0;
        for (const auto& b : blk_la_) {
            la_acc += b.post_accepts;
            la_prop += b.post_proposals;
            la_step_b += b.step_after_burnin;
            la_step_f += b.step;
        }
        chain.blocks.push_back({"log_alpha",
                                la_prop > 0 ? static_cast<double>(la_acc) / static_cast<double>(la_prop) : 0.0,
                                la_step_b / static_cast<double>(blk_la_.size()),
                                la_step_f / static_cast<double>(blk_la_.size())});
        accepts += la_acc;
        proposals += la_prop;
        chain.overall_accept =
            proposals > 0 ? static_cast<double>(accepts) / static_cast<double>(proposals) : 0.0;
        if (chain.overall_accept < 0.05) {
            chain.warnings.push_back("overall post-burn-in acceptance rate below 0.05 (" +
                                     std::to_string(chain.overall_accept) + ")");
        }
    }

    const CompositionDataset& ds_;
    const ModelConfig& mc_;
    const SamplerConfig& sc_;
    Rng rng_;
    Index n_ = 0, P_ = 0, Q_ = 0, R_ = 0, G_ = 0;
    bool re_ = false;
    bool adapting_ = true;
    Matrix lny_;
    std::vector<std::vector<Index>> group_rows_;

    // state
    Matrix beta_;
    Vector beta_phi_;
    Matrix u_;
    Vector sigma_u_;
    Matrix la_;
    double xi_ = 0.0, xi_star_ = 0.0;

    // caches
    Matrix eta_, mu_, log_mu_, resid_, alpha_, lg_alpha_;
    Vector row_sum_, log_phi_, alpha0_;

    // adaptation
    std::vector<Block> blk_beta_, blk_la_, blk_u_, blk_sigma_;
    Block blk_phi_;
};

}  // namespace

std::vector<PosteriorChain> run(const CompositionDataset& dataset, const ModelConfig& model_config,
                                const SamplerConfig& sampler_config) {
    if (sampler_config.n_chains < 1 || sampler_config.n_burnin < 0 ||
        sampler_config.n_iter <= sampler_config.n_burnin || sampler_config.thin < 1) {
        throw InitializationError("sampler: invalid chain/iteration configuration");
    }
    if (!(sampler_config.target_accept > 0.0 && sampler_config.target_accept < 1.0)) {
        throw InitializationError("sampler: target_accept must lie in (0,1)");
    }
    if (model_config.random_effects && !dataset.group) {
        throw InitializationError(
            "random effects requested (--random-effects) but no group labels present (--group)");
    }

    const int n_chains = sampler_config.n_chains;
    std::vector<PosteriorChain> chains(static_cast<std::size_t>(n_chains));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_chains));

    int max_threads = sampler_config.n_threads > 0 ? sampler_config.n_threads : n_chains;
    max_threads = std::max(1, std::min(max_threads, n_chains));

    auto run_chain = [&](int c) {
        try {
            ChainRunner runner(dataset, model_config, sampler_config,
                               mix_seed(sampler_config.seed, static_cast<std::uint64_t>(c)));
            chains[static_cast<std::size_t>(c)] = runner.sample();
        } catch (...) {
            errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
    };

    if (max_threads == 1) {
        for (int c = 0; c < n_chains; ++c) run_chain(c);
    } else {
        std::vector<std::thread> workers;
        for (int c = 0; c < n_chains; ++c) workers.emplace_back(run_chain, c);
        for (auto& w : workers) w.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return chains;
}

FitSummary summarize(const std::vector<PosteriorChain>& chains) {
    if (chains.empty()) throw DiagnosticsError("summarize: no chains");
    const Index K = chains.front().draws.cols();
    std::size_t total = 0;
    for (const auto& c : chains) total += static_cast<std::size_t>(c.draws.rows());
    if (total < 100) throw DiagnosticsError("summarize: need at least 100 retained draws");

    FitSummary fs;
    fs.n_draws = total;
    for (const auto& c : chains) {
        fs.warnings.insert(fs.warnings.end(), c.warnings.begin(), c.warnings.end());
    }

    for (Index k = 0; k < K; ++k) {
        ParameterSummary ps;
        ps.name = chains.front().names[static_cast<std::size_t>(k)];
        std::vector<double> pooled;
        pooled.reserve(total);
        std::vector<std::vector<double>> per_chain;
        for (const auto& c : chains) {
            std::vector<double> v(c.draws.col(k).data(), c.draws.col(k).data() + c.draws.rows());
            pooled.insert(pooled.end(), v.begin(), v.end());
            per_chain.push_back(std::move(v));
        }
        double mean = 0.0;
        for (double d : pooled) mean += d;
        ps.mean = mean / static_cast<double>(pooled.size());
        ps.median = quantile(pooled, 0.5);
        const Interval ci = equal_tailed_interval(pooled);
        ps.lower95 = ci.lower;
        ps.upper95 = ci.upper;
        ps.p_value = bayesian_p_value(pooled);
        try {
            ps.rhat = r_hat(per_chain);
            ps.ess = effective_sample_size(per_chain);
        } catch (const DiagnosticsError&) {
            ps.rhat = std::numeric_limits<double>::quiet_NaN();
            ps.ess = std::numeric_limits<double>::quiet_NaN();
        }
        fs.parameters.push_back(std::move(ps));
    }

    const Index n = chains.front().n_obs;
    const Index P = chains.front().n_dim;
    fs.mu_mean.resize(n, P);
    fs.mu_median.resize(n, P);
    fs.mu_lower.resize(n, P);
    fs.mu_upper.resize(n, P);
    std::vector<double> cell;
    cell.reserve(total);
    for (Index j = 0; j < P; ++j) {
        for (Index i = 0; i < n; ++i) {
            cell.clear();
            double mean = 0.0;
            for (const auto& c : chains) {
                const Index col = j * n + i;
                for (Index t = 0; t < c.mu_adj.rows(); ++t) {
                    cell.push_back(c.mu_adj(t, col));
                    mean += c.mu_adj(t, col);
                }
            }
            fs.mu_mean(i, j) = mean / static_cast<double>(cell.size());
            fs.mu_median(i, j) = quantile(cell, 0.5);
            const Interval ci = equal_tailed_interval(cell);
            fs.mu_lower(i, j) = ci.lower;
            fs.mu_upper(i, j) = ci.upper;
        }
    }
    return fs;
}

PredictiveSummary posterior_predictive(const std::vector<PosteriorChain>& chains,
                                       const CompositionDataset& dataset, std::uint64_t seed,
                                       double level) {
    if (chains.empty()) throw DiagnosticsError("posterior_predictive: no chains");
    const Index n = dataset.n_obs();
    const Index P = dataset.n_dim();
    PredictiveSummary out;
    Rng rng(mix_seed(seed, 0x9d));

    for (const auto& c : chains) {
        for (Index t = 0; t < c.draws.rows(); ++t) {
            Matrix y(n, P);
            for (Index i = 0; i < n; ++i) {
                Vector alpha(P);
                for (Index j = 0; j < P; ++j) alpha(j) = c.mu_adj(t, j * n + i) * c.phi(t, i);
                y.row(i) = zero_replace(sample_one(alpha, rng)).transpose();
            }
            out.draws.push_back(std::move(y));
        }
    }
    out.lower.resize(n, P);
    out.upper.resize(n, P);
    out.mean.resize(n, P);
    std::vector<double> cell(out.draws.size());
    const double tail = 0.5 * (1.0 - level);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < P; ++j) {
            double mean = 0.0;
            for (std::size_t t = 0; t < out.draws.size(); ++t) {
                cell[t] = out.draws[t](i, j);
                mean += cell[t];
            }
            out.mean(i, j) = mean / static_cast<double>(cell.size());
            out.lower(i, j) = quantile(cell, tail);
            out.upper(i, j) = quantile(cell, 1.0 - tail);
        }
    }
    return out;
}

}  // namespace dirireg
