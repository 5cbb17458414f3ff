#pragma once

#include <array>
#include <stdexcept>

#include "qpurify/qstate.hpp"

// Two interacting qubits X and S in a common dephasing bath; qubit X is
// repeatedly confirmed in |up>_X at intervals tau. The joint Lindblad
// evolution has an exact three-operator Kraus form, and the projected
// dynamics of S closes on a diagonal map with a known N-step solution.

namespace qpurify {

struct DephasingParams {
    double omega = 1.0;    // X level splitting
    double Omega = 1.0;    // S level splitting
    double g = 0.5;        // exchange coupling
    double gamma = 0.0;    // dephasing rate, >= 0
    double delta_e = 0.0;  // Lamb-type shift on the |uu>/|dd> levels
    double tau = 1.0;      // measurement interval, > 0

    double e2() const { return 0.5 * (omega + Omega); }           // E2 = -E0
    double e_plus() const {                                       // E+ = -E-
        return std::sqrt(0.25 * (omega - Omega) * (omega - Omega) + g * g);
    }
    double e2_shifted() const { return e2() + delta_e; }
    double e0_shifted() const { return -e2() + delta_e; }

    void validate() const {
        if (gamma < 0) throw std::invalid_argument("dephasing: gamma must be >= 0");
        if (!(tau > 0)) throw std::invalid_argument("dephasing: tau must be > 0");
        if (!(e_plus() > 0))
            throw std::invalid_argument("dephasing: need g^2 + (omega-Omega)^2 > 0");
    }
};

struct DephasingEigensystem {
    std::array<double, 4> energies{};  // E2, E0, E+, E-
    std::array<CVec4, 4> states{};     // |2>, |0>, |+>, |->
};

// Eigensystem of the two-qubit exchange Hamiltonian in the fixed basis.
DephasingEigensystem dephasing_eigensystem(const DephasingParams& p);

struct DephasingChannel {
    CMat4 k0, kplus, kminus;
};

// Exact Kraus solution of the dephasing master equation at elapsed time t;
// satisfies sum_i K_i^dag K_i = 1.
DephasingChannel kraus_dephasing(const DephasingParams& p, double t);

CMat4 apply_channel(const DephasingChannel& ch, const CMat4& rho_xs);

struct DephasingProjectedOps {
    CMat2 v0, vplus, vminus;  // <up|K_i|up>_X, all diagonal on S
};

DephasingProjectedOps projected_ops_up(const DephasingParams& p);

// Survival amplitude of the S down state over one interval,
//   xi = cos(E+ tau) - i (omega-Omega)/(2 E+) sin(E+ tau),
// with |xi|^2 >= (omega-Omega)^2 / ((omega-Omega)^2 + 4 g^2).
cplx xi(const DephasingParams& p);

inline double xi_min_sq(const DephasingParams& p) {
    double d2 = (p.omega - p.Omega) * (p.omega - p.Omega);
    return d2 / (d2 + 4.0 * p.g * p.g);
}

// One measurement step: rho -> sum_i V_i rho V_i^dag. Preserves the up-up
// population exactly.
CMat2 step_dephasing(const CMat2& rho, const DephasingProjectedOps& ops);

// N-step state in closed form: diagonal (rho_uu(0), |xi|^{2N} rho_dd(0)),
// off-diagonals rotated by (e^{-i E2~ tau - gamma tau/2} xi^*)^N.
CMat2 rhoN_dephasing_closed(const CMat2& rho0, const DephasingParams& p, int n);

struct OptimalTau {
    double tau_star;    // smallest tau > 0 with cos(E+ tau) = 0
    double xi_min_sq;   // (omega-Omega)^2 / ((omega-Omega)^2 + 4 g^2)
};

OptimalTau optimal_tau(const DephasingParams& p);

// Independent oracle: n cycles of {tensor |up><up|_X, evolve the 4x4 Kraus
// channel over tau, project X on up}.
CMat2 joint_oracle_dephasing(const CMat2& rho0, const DephasingParams& p, int n);

}  // namespace qpurify
