#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bangbang/objective.hpp"
#include "bangbang/optimizer.hpp"

namespace bangbang {

/// Least-squares power-law fit of the near-zero level-set measure of a field:
/// measure(eps) ~ prefactor * eps^exponent over [eps_lo, eps_hi].
/// A degenerate fit (field bounded away from zero, every measure zero) is
/// represented by exponent = +inf.
struct MeasureFit {
    std::vector<double> epsilons;
    std::vector<double> measures;
    double exponent = 0.0;  // fitted growth exponent
    double prefactor = 0.0; // exp(intercept)
    double r2 = 0.0;
    double eps_lo = 0.0;
    double eps_hi = 0.0;
    /// Every used measure stays below prefactor * eps^exponent * 1.25.
    bool envelope_ok = false;

    bool degenerate() const { return std::isinf(exponent); }

    static MeasureFit degenerate_sentinel(double eps_lo, double eps_hi);
};

/// Fit over n_points log-spaced epsilons in [eps_min, eps_max]. Points with
/// zero measure are dropped; fewer than 4 usable points raises
/// InsufficientDataError, all-zero measures raises DegenerateFitError.
MeasureFit fit_measure_condition(const GridFunction& phi, double eps_min, double eps_max,
                                 int n_points);

/// Growth constant kappa = (1/2) * (2 ||upper-lower||_inf * prefactor)^(-1/exponent),
/// the value the first-order growth argument actually yields. The degenerate
/// sentinel (exponent = +inf) gives the formula limit 1/2.
double compute_kappa(const Bounds& b, const MeasureFit& fit);

struct GrowthCheckResult {
    double pass_rate = 0.0;
    double worst_ratio = 0.0; // min of pairing / ||u - u_bar||^{1 + 1/exponent}
    int samples = 0;
};

/// Sample admissible controls (alternating nodewise-uniform draws and random
/// two-level draws) and test the first-order growth inequality
///   J'(u_bar)(u - u_bar) >= kappa * ||u - u_bar||_{L1}^{1 + 1/exponent} - slack
/// with slack = 1e-10 * (1 + |J(u_bar)|).
GrowthCheckResult verify_first_order_growth(const ProblemSpec& spec, const EvaluatedControl& ec,
                                            double kappa, double exponent, int n_samples,
                                            std::uint64_t seed, int threads = 1);

struct ConeParams {
    double tau = 0.0;     // adjoint threshold defining the extended cone
    double tol_bb = 1e-6; // bound-activity tolerance, relative to the local gap
};

/// Random directions in the extended critical cone at ec.u: zero where
/// |adjoint| > tau, nonnegative where the control sits at the lower bound,
/// nonpositive at the upper bound, free elsewhere; normalized to unit L2.
/// Returns an empty list when no node satisfies |adjoint| <= tau.
std::vector<GridFunction> sample_critical_cone(const EvaluatedControl& ec, const Bounds& b,
                                               const ConeParams& cone, int n_samples,
                                               std::uint64_t seed);

/// Nodewise membership re-check for a direction.
bool in_critical_cone(const EvaluatedControl& ec, const Bounds& b, const ConeParams& cone,
                      const GridFunction& v);

struct SscReport {
    int n_samples = 0;
    double delta_min = 0.0; // +inf sentinel when the cone sample is empty
    std::optional<GridFunction> argmin_direction;
    double kappa = 0.0;                        // filled by the analysis driver
    double growth_pass_rate = 0.0;             // filled by the analysis driver
    double quadratic_growth_pass_rate = 0.0;   // filled by the analysis driver

    bool satisfied() const { return delta_min > 0.0; }
};

/// Minimal sampled Rayleigh ratio J''(u_bar)(v,v) / ||z_v||^2 over cone
/// directions. Empty cone returns the +inf sentinel (vacuously coercive).
SscReport estimate_ssc_delta(const ProblemSpec& spec, const EvaluatedControl& ec,
                             const ConeParams& cone, int n_samples, std::uint64_t seed,
                             int threads = 1);

struct QuadraticGrowthResult {
    double pass_rate = 0.0;
    double worst_violation = 0.0; // max of lhs - J(u) over samples, <= 0 when all pass
    int samples = 0;
};

/// Test the quadratic growth inequality
///   J(u_bar) + kappa/2 d1^{1+1/exponent} + delta/8 ||z||^2 <= J(u) + slack
/// over admissible samples pulled into the L2 ball of the given radius.
QuadraticGrowthResult check_quadratic_growth(const ProblemSpec& spec, const EvaluatedControl& ec,
                                             double kappa, double exponent, double delta,
                                             int n_samples, double radius, std::uint64_t seed,
                                             int threads = 1);

struct LinearizedConstants {
    double c1 = 0.0; // Lipschitz constant of (state, adjoint) in the Y-norm proxy
    double c3 = 0.0; // L1 -> L2 bound of the linearized solution map
};

/// Empirical maxima of the two solution-map ratios over random admissible
/// controls and random directions.
LinearizedConstants estimate_linearized_constants(const ProblemSpec& spec,
                                                  const GridFunction& u_bar, int n_samples,
                                                  std::uint64_t seed, int threads = 1);

/// Minimal sampled ratio of the perturbed Hessian form to ||z^e_v||^2 over
/// the same cone directions used by estimate_ssc_delta (same seed draws the
/// same directions). With e = (0,0) this reproduces estimate_ssc_delta.
double check_perturbed_ssc(const ProblemSpec& spec, const EvaluatedControl& ec,
                           const Perturbation& e, const ConeParams& cone, int n_samples,
                           std::uint64_t seed, int threads = 1);

/// Default cone threshold: the epsilon at which the fitted level-set measure
/// reaches 5% of the box measure. Degenerate fits give 0 (empty cone).
double default_cone_tau(const MeasureFit& fit, double box_measure);

/// Simple least squares of y against x; returns (slope, intercept, r2).
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace bangbang
