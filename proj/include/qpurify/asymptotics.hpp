#pragma once

#include <stdexcept>
#include <vector>

#include "qpurify/closedform.hpp"

// Large-N behavior of the dissipative projected dynamics: resummed dominant
// contributions to the second term of the exact rho_N, regime predictions
// (weak / intermediate / strong dissipation), and trajectory diagnostics.

namespace qpurify {

struct SingularResummation : std::runtime_error {
    explicit SingularResummation(const std::string& what) : std::runtime_error(what) {}
};

enum class Regime { weak, intermediate, strong };

struct RegimeReport {
    Regime regime;
    CVec2 M11{}, M22{}, M12{};
    CMat2 rho_pred{};       // normalized prediction
    double fid_u1_pred = 0;
    double yield_pred = 0;
    // In the intermediate window the off-dominant coefficients stop decaying
    // relative to the dominant one: the state carries a mixedness floor.
    bool mixedness_floor = false;
};

// Regime boundaries; scaling relations only fix these up to O(1) choices.
inline constexpr double kWeakGammaTauMax = 0.1;
inline constexpr double kWeakNGammaTauMax = 1.5;
inline constexpr double kStrongGammaTauMin = 5.0;

struct MVectors {
    CVec2 M11, M22, M12;
};

// Resummed dominant contributions to sum_k Lambda_ij^{N-1-k} [F_k, G_k]:
// the geometric A_0 series of the exceptional terms plus the binomially
// resummed same-index chains. The structurally singular C^{-1} combination
// is evaluated through its exact binomial-series form; genuinely singular
// (Lambda - A_0) or (1 +- C/Lambda)-type factors raise SingularResummation,
// in which case callers fall back to the direct k-sum over the recursion.
MVectors M_resummed(const CoefficientTensors& t, const EigensystemV& eig, int n);

// Direct evaluation of the same dominant partial sums (the small-n oracle
// for M_resummed).
MVectors M_dominant_direct(const CoefficientTensors& t, int n);

// Exact M_ij = sum_k Lambda_ij^{N-1-k} [F_k, G_k] via the recursion.
MVectors M_exact(const CoefficientTensors& t, int n);

// Weak dissipation (gamma*tau < 0.1, n*gamma*tau <~ 1): the normalized state
// approaches |u1><u1| with corrections O(gamma*tau, |l2/l1|^n); the yield is
// of order (1 + n*gamma*tau) Lambda_11^n.
RegimeReport predict_weak(const CoefficientTensors& t, const EigensystemV& eig, int n);

// Intermediate window 1/(gamma*tau) < n < 1/(gamma*tau)^2: exponentially
// resummed M vectors; the report flags the mixedness floor.
RegimeReport predict_intermediate(const CoefficientTensors& t, const EigensystemV& eig, int n);

// Strong-dissipation (gamma*tau >= 5) structured prediction for rho_N
// (unnormalized); its normalization tends to |down><down| as gamma*tau and
// N grow. Requires n >= 2.
CMat2 strong_limit_state(const CMat2& rho0, const DissipativeParams& p, int n);

struct CurvePoint {
    int n;
    double fid_u1;
    double purity;
    double trace;  // cumulative success probability; may underflow to 0
};

struct FidelityCurve {
    std::vector<CurvePoint> points;  // indexed by n = 0..n_max
    int peak_n = 0;                  // argmax fid_u1
};

// Per-n diagnostics from the iterated map. States are renormalized each
// step internally so deep trajectories stay finite.
FidelityCurve fidelity_curve(const CMat2& rho0, const DissipativeParams& p, int n_max);

}  // namespace qpurify
