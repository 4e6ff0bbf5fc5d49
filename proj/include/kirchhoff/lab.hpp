#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/integrator.hpp"
#include "kirchhoff/mollification.hpp"
#include "kirchhoff/reparam.hpp"

namespace kirchhoff {

// ---------------------------------------------------------------------------
// Nondegeneracy criterion

struct CriterionReport {
    double D1 = 0.0;  ///< <A u0, u1>
    double D2 = 0.0;  ///< |A^{1/2}u1|^2 - m(|A^{1/2}u0|^2) |A u0|^2
    bool nondegenerate = false;
    double tol = 0.0;
};

/// Default tolerance 1e-12 * (1 + |A u0| |u1|).
double default_criterion_tolerance(const SpectralOperator& op, const ModeVector& u0, const ModeVector& u1);

CriterionReport evaluate_criterion(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                                   const ModeVector& u1, std::optional<double> tol = std::nullopt);

struct DegeneracyEvent {
    double t_star = 0.0;
    double D1_at = 0.0;
    double D2_at = 0.0;
};

/// Times where |D1(t)| + |D2(t)| <= tol: every sample below tol, plus interior local minima of the
/// sampled profile refined on the cubic Hermite interpolant of the state.
std::vector<DegeneracyEvent> scan_degeneracy(const Trajectory& traj, double tol);

struct EigenpairClassification {
    bool applicable = false;
    bool as1 = false;  ///< <A u0, u1> = 0
    bool as2 = false;  ///< |A^{1/2}u1|^2 = m(|A^{1/2}u0|^2)|A u0|^2
    std::string as3 = "unknown";
    std::optional<double> eigenvalue;
    std::string reason;
};

/// Applies only when u0 and u1 are supported on eigenvectors of one common eigenvalue.
EigenpairClassification classify_eigenpair(const SpectralOperator& op, const ModeVector& u0, const ModeVector& u1,
                                           const Nonlinearity& m, std::optional<double> tol = std::nullopt);

// ---------------------------------------------------------------------------
// Cross-solver agreement

struct AgreementReport {
    double distance = 0.0;  ///< sup over common times of |u_A - u_B| + |u'_A - u'_B|
    std::size_t common_samples = 0;
    double t_compared = 0.0;  ///< last common time included
    std::optional<double> divergence_time;
    bool partial = false;
};

/// Both runs use the same data; comparison restricted to t <= t_window when given.
AgreementReport cross_solver_agreement(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                                       const ModeVector& u1, const IntegratorConfig& a, const IntegratorConfig& b,
                                       std::optional<double> t_window = std::nullopt);

AgreementReport compare_trajectories(const Trajectory& a, const Trajectory& b,
                                     std::optional<double> t_window = std::nullopt);

/// sup over aligned states of |z_1 - z_2| + |w_1 - w_2| for two s-trajectories, after
/// resampling the second onto the first's s values (cubic Hermite in sqrt(s)).
double s_trajectory_distance(const STrajectory& a, const STrajectory& b, const Coefficient& c_b);

// ---------------------------------------------------------------------------
// Approximate energy diagnostics

struct EnergyTrace {
    std::size_t k = 0;  ///< mode index (0-based)
    double lambda_k = 0.0;
    double epsilon_k = 0.0;
    Hyperbolicity schedule = Hyperbolicity::strict;
    double E0 = 0.0;        ///< E at s = 0
    double gamma = 0.0;     ///< smallest constant making E' <= eta1 E + eta2 on the grid
    double gamma11 = 0.0;   ///< constant in |d1^2 - d2^2| <= gamma11 int (|A^{1/2}x| + |A^{1/2}y|)

    // interior grid points (s > 0, excluding the last)
    std::vector<double> s, E, I1, I2, I3, dE, eta1, eta2, residual, psi12, gronwall;

    double max_E() const;
    double max_residual() const;
    /// min over samples of gronwall - E (>= 0 when the integrated bound dominates)
    double gronwall_margin() const;
};

/// E_{k,eps}(s) = |y_k|^2 + c_eps(s)|x_k|^2 for x = z1 - z2, y = w1 - w2 on the common prefix of a shared s-grid,
/// with its derivative split I1 + I2 + I3 and the Gronwall bound
/// exp(2 gamma (phi(lambda_k)+1) sqrt(s)) (E(0) + int_0^s eta2).
EnergyTrace energy_trace(const STrajectory& first, const STrajectory& second, const Coefficient& c,
                         const MollifiedCoefficient& c_eps, std::size_t k, const WeightPhi& phi);

/// `s,E,I1,I2,I3,eta1,eta2,residual`
void write_energy_trace_csv(std::ostream& os, const EnergyTrace& trace);

// ---------------------------------------------------------------------------
// Iterated integral bound

struct IterationReport {
    bool envelope_ok = true;
    std::vector<double> envelope_ratio;  ///< per n = 1..N: max_t iterate_n(t) / (4^n k^n M t^{n/2} / n!)
    double max_y = 0.0;
    bool subsolution = false;  ///< y <= Phi y on the grid
    bool vanishes = false;     ///< subsolution and max y <= tolerance
};

/// (Phi y)(t) = k int_0^t s^{-3/2} int_0^s y. Applies Phi to y n = 1..iterations times and checks
/// the factorial envelope.
IterationReport iteration_bound_check(const std::vector<double>& t, const std::vector<double>& y, double k,
                                      int iterations = 12, double tolerance = 1e-12);

/// One application of Phi on the grid t (t[0] = 0).
std::vector<double> apply_iteration_operator(const std::vector<double>& t, const std::vector<double>& y, double k);

}  // namespace kirchhoff
