#pragma once

#include <stdexcept>
#include <vector>

#include "qpurify/qstate.hpp"

// Two resonant qubits (omega = Omega) in a common T=0 dissipative bath with
// the decay cascade |2> -> |+> -> |0> at equal rates gamma. Qubit X is
// repeatedly confirmed in |a>_X = (alpha|up> + |down>)/sqrt(1+|alpha|^2).
// One measurement step on S is the four-operator map {V, C0, C1, C2}, or
// equivalently V rho V^dag + F(rho) rho_dd + G(rho) rho_astar.

namespace qpurify {

struct DissipativeParams {
    double Omega = 1.0;        // common splitting; requires Omega > g > 0
    double g = 0.4;            // exchange coupling
    double gamma = 0.0;        // cascade decay rate, >= 0
    double delta_e2 = 0.0;     // shift on E2
    double delta_e_plus = 0.0; // shift on E+
    double tau = 1.0;          // measurement interval, > 0
    cplx alpha = cplx(1.0);    // measurement amplitude
    bool measure_up = false;   // |alpha| -> infinity limit: confirm |up>_X

    void validate() const {
        if (!(Omega > g) || !(g > 0))
            throw std::invalid_argument("dissipative: need Omega > g > 0");
        if (gamma < 0) throw std::invalid_argument("dissipative: gamma must be >= 0");
        if (!(tau > 0)) throw std::invalid_argument("dissipative: tau must be > 0");
    }

    double e2_shifted() const { return Omega + delta_e2; }
    double e_plus_shifted() const { return g + delta_e_plus; }
};

// Normalized X measurement amplitudes (alpha, 1)/sqrt(1+|alpha|^2), or
// (1, 0) in the measure_up limit.
CVec2 measurement_amps(const DissipativeParams& p);

// The pure state |a*><a*| fed by the C2 jump: |a*> = (|up> + alpha^*|down>)
// normalized; |down><down| in the measure_up limit.
CMat2 rho_alpha_star(const DissipativeParams& p);

inline CMat2 rho_down() { return CMat2{{0, 0, 0, 1}}; }

struct JointKraus {
    CMat4 e_at;      // damped phase evolution on the eigenprojectors
    CMat4 b0;        // |0><+|
    CMat4 b0b1;      // |0><2|
    CMat4 b1;        // |+><2|
    double w0, w1, w2;  // (1-e^-gt), (1-e^-gt-gt e^-gt), gt e^-gt
};

// Exact solution of the T=0 cascade master equation at elapsed time t;
// trace preserving and positivity preserving.
JointKraus dissipative_kraus_joint(const DissipativeParams& p, double t);

CMat4 apply_joint(const JointKraus& k, const CMat4& rho_xs);

struct ProjectedMap {
    CMat2 v, c0, c1, c2;  // include the 1/(1+|alpha|^2) normalization
    double w0, w1, w2;
    cplx alpha;
    bool measure_up;
};

ProjectedMap build_projected_map(const DissipativeParams& p);

struct FG {
    double F, G;
};

// Weights of the incoherent feeding into rho_dd and rho_astar over one step.
FG coefficients_FG(const CMat2& rho, const DissipativeParams& p);

// Three-term form V rho V^dag + F rho_dd + G rho_astar; identical to the
// four-operator Kraus sum.
CMat2 step_dissipative(const CMat2& rho, const ProjectedMap& map);

// The four-operator Kraus sum, kept as an independent route.
CMat2 step_dissipative_kraus(const CMat2& rho, const ProjectedMap& map);

struct StepRecord {
    int n;
    CMat2 rho;       // unnormalized; trace = cumulative success probability
    double trace;
    double purity;
    double fid_u1;   // fidelity of the normalized state to u1 of V
    double fid_down;
    double F, G;     // coefficients evaluated on this state
};

struct Trajectory {
    std::vector<StepRecord> steps;
};

Trajectory iterate(const CMat2& rho0, const DissipativeParams& p, int n);

// Independent oracle: n cycles of {tensor |a><a|_X, evolve the joint Kraus
// solution over tau, project X on |a>}.
CMat2 joint_oracle_dissipative(const CMat2& rho0, const DissipativeParams& p, int n);

}  // namespace qpurify
