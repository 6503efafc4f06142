#include "dirireg/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "dirireg/errors.hpp"

namespace dirireg {

double quantile(std::vector<double> draws, double q) {
    if (draws.empty()) throw DiagnosticsError("quantile: no draws");
    if (q <= 0.0) return *std::min_element(draws.begin(), draws.end());
    if (q >= 1.0) return *std::max_element(draws.begin(), draws.end());
    std::sort(draws.begin(), draws.end());
    const double h = q * (static_cast<double>(draws.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, draws.size() - 1);
    const double frac = h - std::floor(h);
    return draws[lo] * (1.0 - frac) + draws[hi] * frac;
}

Interval equal_tailed_interval(const std::vector<double>& draws, double level) {
    const double tail = 0.5 * (1.0 - level);
    return {quantile(draws, tail), quantile(draws, 1.0 - tail)};
}

double bayesian_p_value(const std::vector<double>& draws) {
    if (draws.empty()) throw DiagnosticsError("bayesian_p_value: no draws");
    double pos = 0.0;
    for (double d : draws) {
        if (d > 0.0) pos += 1.0;
    }
    const double n = static_cast<double>(draws.size());
    return std::min(1.0, 2.0 * std::min(pos / n, 1.0 - pos / n));
}

namespace {

std::vector<std::vector<double>> maybe_split(const std::vector<std::vector<double>>& chains) {
    if (chains.size() != 1) return chains;
    const auto& c = chains.front();
    const std::size_t half = c.size() / 2;
    return {std::vector<double>(c.begin(), c.begin() + half),
            std::vector<double>(c.begin() + half, c.end())};
}

}  // namespace

double r_hat(const std::vector<std::vector<double>>& chains_in) {
    const auto chains = maybe_split(chains_in);
    const std::size_t m = chains.size();
    std::size_t n = chains.front().size();
    for (const auto& c : chains) n = std::min(n, c.size());
    if (m < 2 || n < 4) throw DiagnosticsError("r_hat: need >= 2 chains of >= 4 draws");

    std::vector<double> means(m);
    std::vector<double> vars(m);
    for (std::size_t c = 0; c < m; ++c) {
        double mean = 0.0;
        for (std::size_t t = 0; t < n; ++t) mean += chains[c][t];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double d = chains[c][t] - mean;
            var += d * d;
        }
        means[c] = mean;
        vars[c] = var / static_cast<double>(n - 1);
    }
    double grand = 0.0;
    for (double mu : means) grand += mu;
    grand /= static_cast<double>(m);
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= static_cast<double>(n) / static_cast<double>(m - 1);
    double w = 0.0;
    for (double v : vars) w += v;
    w /= static_cast<double>(m);
    if (w <= 0.0) return 1.0;  // constant chains
    const double nn = static_cast<double>(n);
    const double var_hat = (nn - 1.0) / nn * w + b / nn;
    return std::sqrt(var_hat / w);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains_in) {
    const auto chains = maybe_split(chains_in);
    const std::size_t m = chains.size();
    std::size_t n = chains.front().size();
    for (const auto& c : chains) n = std::min(n, c.size());
    if (n < 8) throw DiagnosticsError("effective_sample_size: chains too short");

    // Per-chain autocovariances, averaged, combined with between-chain
    // variance as in the split-chain estimator.
    std::vector<double> means(m);
    double w = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
        double mean = 0.0;
        for (std::size_t t = 0; t < n; ++t) mean += chains[c][t];
        means[c] = mean / static_cast<double>(n);
    }
    std::vector<std::vector<double>> acov(m);
    const std::size_t max_lag = n - 4;
    for (std::size_t c = 0; c < m; ++c) {
        acov[c].resize(max_lag + 1);
        for (std::size_t lag = 0; lag <= max_lag; ++lag) {
            double s = 0.0;
            for (std::size_t t = lag; t < n; ++t) {
                s += (chains[c][t] - means[c]) * (chains[c][t - lag] - means[c]);
            }
            acov[c][lag] = s / static_cast<double>(n);
        }
        w += acov[c][0] * static_cast<double>(n) / static_cast<double>(n - 1);
    }
    w /= static_cast<double>(m);
    double grand = 0.0;
    for (double mu : means) grand += mu;
    grand /= static_cast<double>(m);
    double b = 0.0;
    if (m > 1) {
        for (double mu : means) b += (mu - grand) * (mu - grand);
        b *= static_cast<double>(n) / static_cast<double>(m - 1);
    }
    const double var_plus = w * static_cast<double>(n - 1) / static_cast<double>(n) +
                            b / static_cast<double>(n);
    if (var_plus <= 0.0) return static_cast<double>(m * n);

    double rho_sum = 0.0;
    double prev_pair = 0.0;
    bool first_pair = true;
    for (std::size_t lag = 1; lag + 1 <= max_lag; lag += 2) {
        double mean_acov_a = 0.0;
        double mean_acov_b = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            mean_acov_a += acov[c][lag];
            mean_acov_b += acov[c][lag + 1];
        }
        mean_acov_a /= static_cast<double>(m);
        mean_acov_b /= static_cast<double>(m);
        const double rho_a = 1.0 - (w - mean_acov_a) / var_plus;
        const double rho_b = 1.0 - (w - mean_acov_b) / var_plus;
        double pair = rho_a + rho_b;
        if (pair < 0.0) break;  // initial positive sequence
        if (!first_pair) pair = std::min(pair, prev_pair);  // monotone
        rho_sum += pair;
        prev_pair = pair;
        first_pair = false;
    }
    const double tau = 1.0 + 2.0 * rho_sum;
    const double ess = static_cast<double>(m * n) / std::max(tau, 1e-12);
    return std::min(ess, static_cast<double>(m * n));
}

}  // namespace dirireg
