#pragma once

#include <optional>
#include <vector>

#include "kirchhoff/integrator.hpp"
#include "kirchhoff/mollification.hpp"
#include "kirchhoff/spectral.hpp"

namespace kirchhoff {

/// One point of the s-parametrized curve: z = A^{1/2}u and w = u' at the time where
/// orientation * (|A^{1/2}u|^2 - |A^{1/2}u0|^2) = s.
struct SState {
    double s = 0.0;
    ModeVector z;
    ModeVector w;
};

/// The trajectory (z(s), w(s)) on the first monotone window of psi.
///
/// `orientation` is the sign of psi' on that window; s is always the oriented
/// (nonnegative, increasing) variable and `denom` the oriented denominator
/// orientation * 2 <A^{1/2}z, w>, positive for s > 0.
struct STrajectory {
    SpectralOperator op;
    std::vector<SState> states;
    int orientation = 1;
    std::vector<double> time;   ///< t(s) aligned with states, t(0) = 0
    std::vector<double> denom;  ///< oriented d(s)
    double D1 = 0.0;            ///< <A u0, u1>
    double beta = 0.0;          ///< |A^{1/2}u1|^2 - m(s0) |A u0|^2
    double gamma1_measured = 0.0;
    bool truncated = false;             ///< a degeneracy event stopped integrate_s early
    std::optional<double> degeneracy_s;
    std::vector<double> denom_rate;  ///< d/dt of denom, orientation * 2 (|A^{1/2}w|^2 - c |A^{1/2}z|^2)

    std::size_t size() const noexcept { return states.size(); }
    std::vector<double> s_values() const;
    /// beta in the oriented frame; equals |beta| when D1 = 0
    double oriented_beta() const noexcept { return orientation * beta; }
};

struct StartupParams {
    double D1 = 0.0;
    double beta = 0.0;
    double s_start = 0.0;  ///< 0 selects 16 * ds

    /// sign(D1), or sign(beta) when D1 = 0; throws DegenerateDataError when both vanish.
    int orientation() const;
};

StartupParams startup_params(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                             const ModeVector& u1, double s_start = 0.0);

struct SIntegratorConfig {
    double ds = 1e-4;
    int startup_substeps = 64;  ///< steps in tau = sqrt(s) on [0, s_start]
};

struct SRhs {
    ModeVector dz;
    ModeVector dw;
    double denom = 0.0;  ///< oriented denominator used
};

/// dz/ds = A^{1/2}w / d,  dw/ds = -c(s) A^{1/2}z / d,  d = orientation * 2 <A^{1/2}z, w>.
/// Throws SingularDenominatorError when d <= 0.
SRhs s_rhs(const SpectralOperator& op, const SState& state, const Coefficient& c, int orientation = 1);

/// Integrates the s-system from (z0, w0) to s_max. When D1 = 0 (more precisely when
/// D1^2 <= |beta| s_start) the singular start on [0, s_start] is integrated in tau = sqrt(s),
/// where the system is regular; afterwards fixed RK4 steps in s. `c` must be the coefficient in
/// the oriented variable, c(s) = m(s0 + orientation * s).
STrajectory integrate_s(const SpectralOperator& op, const Coefficient& c, const StartupParams& startup,
                        const ModeVector& z0, const ModeVector& w0, double s_max, const SIntegratorConfig& cfg = {});

/// t(s) = int_0^s dsigma / g(sigma). Each cell uses 2 ds / (g_i + g_{i+1}), exact when g^2 is
/// affine in s. With the rate g' = dg/dt, each cell instead solves the Hermite-corrected
/// trapezoid ds = dt (g_i + g_{i+1})/2 + dt^2 (g'_i - g'_{i+1})/12 for dt; g is smooth in t at
/// both square-root ends of the window, so this keeps fourth order there.
std::vector<double> recover_time(const std::vector<double>& s, const std::vector<double>& g);
std::vector<double> recover_time(const std::vector<double>& s, const std::vector<double>& g,
                                 const std::vector<double>& rate);
std::vector<double> recover_time(const STrajectory& traj);

struct IdentityReport {
    std::vector<double> residuals;
    std::vector<std::size_t> violations;  ///< samples whose radicand fell below -1e-10
    double max_residual = 0.0;
};

/// |d(s)/2 - sqrt(D1^2 + orientation * int_0^s (|A^{1/2}w|^2 - c |A^{1/2}z|^2))| per sample.
IdentityReport denominator_identity(const STrajectory& traj, const Coefficient& c, double D1);

struct MonotoneWindow {
    std::size_t end_index = 0;
    double t_end = 0.0;
    double s_max = 0.0;  ///< oriented psi at the window end
    int orientation = 1;
};

/// First window on which psi is strictly monotone (discrete differences with hysteresis 1e-12,
/// psi' of one sign). Throws StationaryDataError if psi never moves.
MonotoneWindow monotone_window(const Trajectory& traj);

/// Resamples the time solution on a uniform s-grid over its first monotone window.
/// `points` = 0 uses as many points as there are samples in the window.
STrajectory to_s_trajectory(const Trajectory& traj, std::size_t points = 0);

/// min over s in (0, fraction * s_last] of (d(s)/2) / sqrt(s).
double measure_gamma1(const STrajectory& traj, double fraction = 0.01);

/// `s,t,d,z_1..z_K,w_1..w_K`
void write_s_trajectory_csv(std::ostream& os, const STrajectory& traj);

}  // namespace kirchhoff
