#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/modulus.hpp"
#include "kirchhoff/spectral.hpp"

namespace kirchhoff {

enum class Scheme { stormer_verlet, rk4 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct IntegratorConfig {
    Scheme scheme = Scheme::stormer_verlet;
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_stride = 1;

    void validate() const;
    std::size_t step_count() const;
};

/// Samples of the truncated Kirchhoff flow u_k'' + m(|A^{1/2}u|^2) lambda_k^2 u_k = 0.
struct Trajectory {
    SpectralOperator op;
    Nonlinearity m;
    std::vector<PhaseState> samples;
    double dt = 0.0;  ///< step used to produce the samples
};

struct IntegrationResult {
    Trajectory trajectory;
    std::optional<double> divergence_time;  ///< last good time when the run blew up
};

/// Runs to completion or to the first non-finite state, keeping the samples produced so far.
/// Throws ModelError if m returns a negative value.
IntegrationResult try_integrate(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                                const ModeVector& u1, const IntegratorConfig& cfg);

/// As try_integrate, but divergence raises DivergenceError.
Trajectory integrate(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0, const ModeVector& u1,
                     const IntegratorConfig& cfg);

/// |u'|^2 + M(|A^{1/2}u|^2)
double energy(const SpectralOperator& op, const Nonlinearity& m, const PhaseState& state);

/// max_t |E(t) - E(0)| / E(0) along the samples
double relative_energy_drift(const Trajectory& traj);

struct InitialSignature {
    double psi_prime0 = 0.0;   ///< 2 <A u0, u1>
    double psi_second0 = 0.0;  ///< 2 (|A^{1/2}u1|^2 - m(|A^{1/2}u0|^2) |A u0|^2)
};

InitialSignature initial_signature(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u0,
                                   const ModeVector& u1);

/// Acceleration -m(s) A u.
ModeVector acceleration(const SpectralOperator& op, const Nonlinearity& m, const ModeVector& u);

/// Header `t,u_1..u_K,v_1..v_K,s,energy`, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace kirchhoff
