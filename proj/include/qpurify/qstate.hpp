#pragma once

#include <stdexcept>
#include <string>

#include "qpurify/cmatrix.hpp"

namespace qpurify {

// Thrown by eig2 when the two eigenvalues are too close for the
// biorthogonal decomposition to be reliable. Callers fall back to
// direct (power) iteration.
struct NearDegenerate : std::runtime_error {
    explicit NearDegenerate(const std::string& what) : std::runtime_error(what) {}
};

// Biorthogonal eigensystem of a (generally non-normal) 2x2 matrix V:
//   V u_i = lambda_i u_i,   v_i^dag V = lambda_i v_i^dag,
//   <v_i|u_j> = delta_ij,   sum_i |u_i><v_i| = 1,
// ordered |lambda1| >= |lambda2|.
struct EigensystemV {
    cplx lambda1{};
    cplx lambda2{};
    CVec2 u1{}, u2{};
    CVec2 v1{}, v2{};
    double gap = 0.0;  // |lambda1| - |lambda2|

    cplx lambda(int i) const { return i == 0 ? lambda1 : lambda2; }
    const CVec2& u(int i) const { return i == 0 ? u1 : u2; }
    const CVec2& v(int i) const { return i == 0 ? v1 : v2; }
    // Lambda_ab = lambda_a * conj(lambda_b)
    cplx Lambda(int a, int b) const { return lambda(a) * std::conj(lambda(b)); }
};

inline constexpr double kDefaultDegeneracyTol = 1e-8;

// Eigendecomposition via the quadratic characteristic polynomial, with a
// deterministic phase convention: the largest-magnitude component of each
// right eigenvector is made real positive, and |u_i| = 1.
EigensystemV eig2(const CMat2& m, double degeneracy_tol = kDefaultDegeneracyTol);

// Dominant right eigenvector; falls back to power iteration when eig2
// reports near-degeneracy.
CVec2 dominant_eigvec(const CMat2& m);

// Hermitian within tol, eigenvalues >= -tol, 0 < trace <= 1 + tol.
bool is_density(const CMat2& rho, double tol);

// tr(rho^2) / tr(rho)^2; scale invariant. Throws on nonpositive trace.
double purity(const CMat2& rho);

// <psi|rho|psi> / (tr rho * <psi|psi>).  Throws on zero trace or zero vector.
double fidelity_pure(const CMat2& rho, const CVec2& psi);

// Reduce over the X index: (rho_S)_{ss'} = sum_x rho[(x s),(x s')].
CMat2 partial_trace_X(const CMat4& rho_xs);

// <a|rho_XS|a>_X with the normalized measurement vector
// |a>_X = (alpha|up> + |down>)/sqrt(1+|alpha|^2).
CMat2 project_X(const CMat4& rho_xs, cplx alpha);

// Same with |up>_X measured (the |alpha| -> infinity limit).
CMat2 project_X_up(const CMat4& rho_xs);

// |x><x|_X tensor rho_S for a (normalized) X amplitude pair x = (x_up, x_down).
CMat4 tensor_X(const CVec2& x_amps, const CMat2& rho_s);

}  // namespace qpurify
