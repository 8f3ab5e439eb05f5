#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bangbang/analysis.hpp"

namespace bangbang {

/// One perturbation sweep: a fixed direction scaled down a geometric ladder.
/// Plans built through make_sweep_plan carry a unit direction (the (d, t)
/// parametrization is redundant under joint rescaling, so nothing but the
/// products t * d matters); a direction of exact zero is allowed and produces
/// the superstable all-zero-distance outcome.
struct SweepPlan {
    Perturbation direction;      // norm_E == 1 from make_sweep_plan, or exactly 0
    std::vector<double> scales;  // strictly decreasing, positive
    bool include_zero_reference = false; // append a t = 0 record at the end
    SolveOptions options;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Normalize the direction to unit E-norm (zero stays zero) and attach the
/// ladder.
SweepPlan make_sweep_plan(Perturbation direction, std::vector<double> scales,
                          SolveOptions options);

/// Geometric ladder t0, t0*ratio, ..., m rungs.
std::vector<double> geometric_ladder(double t0, double ratio, int rungs);

/// A unit-norm direction from seeded smooth random fields (truncated Fourier
/// series, 5 modes per axis). `kind` 0 perturbs only the cost gradient,
/// 1 only the state equation, 2 both.
Perturbation smooth_random_direction(const std::shared_ptr<const Grid>& grid, int kind,
                                     std::uint64_t seed);

struct SweepRecord {
    double t = 0.0;
    double norm_e = 0.0;
    double dist_l1 = 0.0;
    double dist_l2 = 0.0;
    double gap = 0.0; // perturbed VI gap at the returned control
    int iters = 0;
    bool converged = false;
};

struct SweepResult {
    std::vector<SweepRecord> records; // ordered by decreasing t
};

/// Solve the perturbed problem at every scale, warm-started at the reference
/// solution, and record control distances. Scales whose solve does not
/// converge are kept but flagged; if every scale fails the sweep throws.
SweepResult run_sweep(const ProblemSpec& spec, const EvaluatedControl& ec_bar,
                      const SweepPlan& plan);

enum class HolderVerdict { consistent, inconsistent, superstable };

struct HolderFit {
    double slope = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
    HolderVerdict verdict = HolderVerdict::inconsistent;
};

std::string to_string(HolderVerdict v);

/// Log-log regression of the L1 control distance against the perturbation
/// norm. The stability estimate is an upper bound, so only a slope below
/// 0.9 * expected refutes it; faster decay is consistent. All-zero distances
/// mean the perturbations never moved the control: superstable.
HolderFit fit_holder(const SweepResult& result, double expected_exponent);

/// Empirical constant c in the perturbed-adjoint bound
///   ||phi_{u,e} - phi_u||_inf <= c ||e||_E,
/// probed with random smooth perturbations (gradient-only, state-only, and
/// mixed draws in rotation).
double probe_adjoint_constant(const ProblemSpec& spec, const GridFunction& u, int n_probes,
                              std::uint64_t seed);

struct KktDistanceCheck {
    double lhs = 0.0; // kappa/2 d1^{1+1/ae} + delta/8 ||z||^2
    double rhs = 0.0; // c ||e||_E d1
    double c = 0.0;   // probed adjoint-perturbation constant
    double rho = 0.0; // implied stability prefactor 2 c / kappa
    bool holds = false;
};

/// Evaluate both sides of the stability argument's central inequality at a
/// computed perturbed control. Throws OutOfNeighborhoodError when u_e is
/// farther than eta from the reference control in L2.
KktDistanceCheck kkt_distance_check(const ProblemSpec& spec, const EvaluatedControl& ec_bar,
                                    const GridFunction& u_e, const Perturbation& e, double kappa,
                                    double exponent, double delta, double eta,
                                    std::uint64_t seed);

} // namespace bangbang
