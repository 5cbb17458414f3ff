#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "qpurify/dissipative.hpp"

// Exact machinery for the N-step dissipative state: the coefficient tensors
// coupling the F/G recursion across steps, the recursion itself, the nested
// multi-geometric sum identity with its brute-force oracle, and the exact
// rho_N assembled from the eigenbasis of V.

namespace qpurify {

struct ConfluentPoints : std::runtime_error {
    explicit ConfluentPoints(const std::string& what) : std::runtime_error(what) {}
};

// C^{ab} (2x2), d^{ab} (2-vector) and Lambda_ab = lambda_a lambda_b^* for
// a,b in {1,2}, plus the directly computed recursion seed F(rho0), G(rho0).
// Index pairs satisfy (C^{ab})^* = C^{ba} entrywise and likewise for d.
struct CoefficientTensors {
    CMat2 C[2][2];
    CVec2 d[2][2];
    cplx Lambda[2][2];
    cplx rho0_vv[2][2];         // <v_a|rho0|v_b>
    double f0 = 0.0, g0 = 0.0;  // F(rho0), G(rho0) from coefficients_FG
    double gamma_tau = 0.0;
    cplx alpha{};
    bool measure_up = false;
};

CoefficientTensors tensors(const EigensystemV& eig, const DissipativeParams& p,
                           const CMat2& rho0);

struct SeriesTerm {
    CMat2 Ak;
    CVec2 bk;
};

// A_k = sum_ab Lambda_ab^k C^{ab}, b_k = sum_ab Lambda_ab^k d^{ab}.
// Entries are real up to rounding (conjugate index pairs).
SeriesTerm series_Ak_bk(const CoefficientTensors& t, int k);

struct FGSeries {
    std::vector<double> F, G;  // indexed 0..n
};

// [F_N, G_N] = sum_{k<N} A_{N-1-k} [F_k, G_k] + b_N, seeded with the direct
// F(rho0), G(rho0); consistency of the seed with b_0 is asserted.
FGSeries fg_by_recursion(const CoefficientTensors& t, int n);

// Literal nested summation sum over k_1..k_l of
// x_1^{k_1} ... x_l^{k_l} x_{l+1}^{k - l - sum k_i}, with l = xs.size() - 1.
// Exponential cost; restricted to l <= 6, k <= 25.
cplx nested_sum_brute(std::span<const cplx> xs, int k);

// Closed form sum_m x_m^k / prod_{n != m} (x_m - x_n); requires pairwise
// distinct points, otherwise throws ConfluentPoints.
cplx nested_sum_closed(std::span<const cplx> xs, int k, double tol = 1e-9);

inline constexpr int kFgClosedMaxK = 12;

// Exact F(rho_k), G(rho_k) by expanding all operator chains, summing the
// exponent combinatorics in closed form per index assignment (grouped exact
// summation where points coincide). Cost 4^(l+1) per chain length l.
FG fg_closed(const CoefficientTensors& t, int k);

// Exact rho_N: eigenbasis first term plus the k-summed second term with the
// fg_closed coefficients. Degenerate eigensystems propagate NearDegenerate;
// if the closed coefficient path is unavailable the recursion path is used
// (still exact, O(n^2)).
CMat2 rhoN_closed(const CMat2& rho0, const DissipativeParams& p, int n);

// binomial(n, l+1): the number of nonnegative-integer solutions counted in
// the rearranged same-index sums.
long long composition_count(int n, int l);

}  // namespace qpurify
