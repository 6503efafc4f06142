#pragma once

#include <cstdint>
#include <vector>

#include "dirireg/linalg.hpp"
#include "dirireg/rng.hpp"

namespace dirireg {

/// Smallest component admitted at Composition construction. Entries below
/// this must be treated upstream with zero_replace().
inline constexpr double kCompositionFloor = 1e-12;

/// Default replacement value for below-floor components (multiplicative
/// zero replacement, renormalized).
inline constexpr double kZeroReplaceEps = 1e-6;

/// A point on the open unit simplex: strictly positive entries summing
/// to 1 within 1e-9.
class Composition {
  public:
    explicit Composition(Vector y);

    const Vector& values() const { return y_; }
    double operator[](Index j) const { return y_(j); }
    Index dim() const { return y_.size(); }

  private:
    Vector y_;
};

/// Multiplicative zero replacement: entries below `floor` are set to `eps`,
/// the remaining entries are scaled down to compensate, and the vector is
/// renormalized to sum to one.
Vector zero_replace(const Vector& raw, double eps = kZeroReplaceEps,
                    double floor = kCompositionFloor);

/// Concentration parameters of a Dirichlet distribution.
class DirichletParams {
  public:
    explicit DirichletParams(Vector alpha);

    const Vector& alpha() const { return alpha_; }
    double alpha0() const { return alpha0_; }
    Index dim() const { return alpha_.size(); }

  private:
    Vector alpha_;
    double alpha0_;
};

/// Mean vector and covariance matrix of a Dirichlet distribution.
struct MomentSummary {
    Vector mean;
    Matrix covariance;
};

/// Log density at y; standard normalization lnG(a0) - sum lnG(ai).
double log_density(const Composition& y, const DirichletParams& params);

/// Log density of a raw positive vector (no Composition validation); used
/// on latent alpha draws where the floor policy does not apply.
double log_density_raw(const Vector& y, const Vector& alpha);

MomentSummary moments(const DirichletParams& params);

/// n independent draws via normalized Gamma(alpha_j, 1) variates.
/// Components falling below the construction floor are zero-replaced.
std::vector<Composition> sample(const DirichletParams& params, std::size_t n,
                                std::uint64_t rng_seed);

/// Same draws through a caller-owned stream.
std::vector<Composition> sample(const DirichletParams& params, std::size_t n, Rng& rng);

/// Single draw as a raw vector.
Vector sample_one(const Vector& alpha, Rng& rng);

/// Marginal Dirichlet of a proper subset plus one aggregated remainder
/// component, in the order (subset..., remainder).
DirichletParams marginal(const DirichletParams& params, const std::vector<Index>& subset);

/// Method-of-moments fit; alpha0 from the first coordinate's
/// mean/variance relation.
DirichletParams fit_moments(const std::vector<Composition>& sample);

/// Maximum likelihood via the digamma fixed point, started at the moments
/// estimate. Stops when the largest parameter change drops below tol.
DirichletParams fit_ml(const std::vector<Composition>& sample, double tol = 1e-10,
                       std::size_t max_iter = 1000);

/// Mean log-likelihood of a sample under params.
double mean_log_likelihood(const std::vector<Composition>& sample,
                           const DirichletParams& params);

}  // namespace dirireg
