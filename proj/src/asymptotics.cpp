#include "qpurify/asymptotics.hpp"

#include <cmath>

namespace qpurify {

namespace {

cplx pow_n(cplx x, long n) { return std::pow(x, static_cast<double>(n)); }

CMat2 checked_inverse(const CMat2& m, const char* what) {
    double scale = max_abs(m);
    if (std::abs(det(m)) < 1e-12 * scale * scale)
        throw SingularResummation(what);
    return inverse(m);
}

// C^{-1} (1 - (1 + C/Lam)^{N-1}) d without forming C^{-1}: every term of the
// bracket carries at least one factor of C, so the product equals
// -(1/Lam) sum_{j=1}^{N-1} binom(N-1, j) (C/Lam)^{j-1} d, accumulated with
// the ratio recurrence (no overflow for large N).
CVec2 cinv_binom_tail(const CMat2& C, cplx lam, const CVec2& d, int N) {
    CMat2 c = (cplx(1) / lam) * C;
    CVec2 term = cplx(static_cast<double>(N - 1)) * d;
    CVec2 acc = term;
    for (int j = 2; j <= N - 1; ++j) {
        term = (cplx(static_cast<double>(N - j) / j)) * (c * term);
        acc += term;
    }
    return cplx(-1) / lam * acc;
}

// Solve C x = d where C may be rank deficient (the coefficient tensors are
// structurally rank one) but the system is consistent; minimal-norm solution
// in the deficient case. Inconsistent systems raise SingularResummation.
CVec2 solve_or_lsq(const CMat2& C, const CVec2& d) {
    double scale = max_abs(C);
    if (scale < 1e-300) {
        if (max_abs(d) < 1e-300) return CVec2{};
        throw SingularResummation("solve_or_lsq: zero matrix, nonzero rhs");
    }
    if (std::abs(det(C)) > 1e-10 * scale * scale) return inverse(C) * d;

    CVec2 a0{{C(0, 0), C(1, 0)}};
    CVec2 a1{{C(0, 1), C(1, 1)}};
    bool swap_cols = norm2(a1) > norm2(a0);
    if (swap_cols) std::swap(a0, a1);
    cplx kappa = inner(a0, a1) / norm2(a0);
    cplx mu = inner(a0, d) / norm2(a0);
    double denom = 1.0 + std::norm(kappa);
    CVec2 x{{mu / denom, mu * std::conj(kappa) / denom}};
    if (swap_cols) std::swap(x[0], x[1]);
    double resid = std::sqrt(norm2(C * x - d));
    if (resid > 1e-8 * (scale * std::sqrt(norm2(x)) + std::sqrt(norm2(d)) + 1e-300))
        throw SingularResummation("solve_or_lsq: inconsistent rank-deficient system");
    return x;
}

// Matrix exponential of a 2x2 by scaling and squaring on the Taylor series.
CMat2 expm(const CMat2& m) {
    double s = max_abs(m);
    int squarings = 0;
    CMat2 a = m;
    while (s > 0.5) {
        a = cplx(0.5) * a;
        s *= 0.5;
        ++squarings;
    }
    CMat2 result = CMat2::identity();
    CMat2 term = CMat2::identity();
    for (int k = 1; k <= 18; ++k) {
        term = cplx(1.0 / k) * (term * a);
        result += term;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

struct Weights {
    cplx dd, as;  // <v_i|rho_dd|v_j>, <v_i|rho_astar|v_j>
};

Weights pair_weights(const CoefficientTensors& t, const EigensystemV& eig, int i, int j) {
    CMat2 rdd = rho_down();
    DissipativeParams q;
    q.alpha = t.alpha;
    q.measure_up = t.measure_up;
    CMat2 ras = rho_alpha_star(q);
    return {expect(eig.v(i), rdd, eig.v(j)), expect(eig.v(i), ras, eig.v(j))};
}

CMat2 assemble_second_term(const CoefficientTensors& t, const EigensystemV& eig,
                           const MVectors& m) {
    auto w11 = pair_weights(t, eig, 0, 0);
    auto w22 = pair_weights(t, eig, 1, 1);
    auto w12 = pair_weights(t, eig, 0, 1);
    CMat2 out = CMat2::zero();
    out += (w11.dd * m.M11[0] + w11.as * m.M11[1]) * outer(eig.u1, eig.u1);
    out += (w22.dd * m.M22[0] + w22.as * m.M22[1]) * outer(eig.u2, eig.u2);
    CMat2 cross = (w12.dd * m.M12[0] + w12.as * m.M12[1]) * outer(eig.u1, eig.u2);
    out += cross + adjoint(cross);
    return out;
}

CMat2 first_term(const CoefficientTensors& t, const EigensystemV& eig, int n) {
    CMat2 out = CMat2::zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out += (pow_n(t.Lambda[i][j], n) * t.rho0_vv[i][j]) * outer(eig.u(i), eig.u(j));
    return out;
}

}  // namespace

MVectors M_exact(const CoefficientTensors& t, int n) {
    auto fg = fg_by_recursion(t, n - 1);
    MVectors m{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CVec2 s{};
            for (int k = 0; k < n; ++k)
                s += pow_n(t.Lambda[i][j], n - 1 - k) *
                     CVec2{{cplx(fg.F[static_cast<std::size_t>(k)]),
                            cplx(fg.G[static_cast<std::size_t>(k)])}};
            if (i == 0 && j == 0) m.M11 = s;
            if (i == 1 && j == 1) m.M22 = s;
            if (i == 0 && j == 1) m.M12 = s;
        }
    return m;
}

MVectors M_dominant_direct(const CoefficientTensors& t, int n) {
    auto s0 = series_Ak_bk(t, 0);
    const CMat2& A0 = s0.Ak;
    const CVec2& b0 = s0.bk;

    auto one_ij = [&](int i, int j) {
        cplx lij = t.Lambda[i][j];
        // exceptional k = l terms
        CVec2 s{};
        CMat2 a_pow = CMat2::identity();
        for (int l = 0; l < n; ++l) {
            s += pow_n(lij, n - 1 - l) * (a_pow * b0);
            a_pow = a_pow * A0;
        }
        // same-index chains, k > l
        bool diag = (i == j);
        const CMat2& C = diag ? t.C[0][0] : t.C[i][j];
        const CVec2& d = diag ? t.d[0][0] : t.d[i][j];
        cplx lsel = diag ? t.Lambda[0][0] : lij;
        for (int k = 1; k < n; ++k) {
            CVec2 chain = d;
            double binom = 1.0;  // binom(k, 0)
            for (int l = 0; l < k; ++l) {
                if (l > 0) {
                    binom = binom * (k - l + 1) / l;
                    chain = C * chain;
                }
                s += (binom * pow_n(lij, n - 1 - k) * pow_n(lsel, k - l)) * chain;
            }
        }
        return s;
    };
    return {one_ij(0, 0), one_ij(1, 1), one_ij(0, 1)};
}

MVectors M_resummed(const CoefficientTensors& t, const EigensystemV& eig, int n) {
    (void)eig;
    if (n < 2) throw std::invalid_argument("M_resummed: need n >= 2");
    auto s0 = series_Ak_bk(t, 0);
    const CMat2& A0 = s0.Ak;
    const CVec2& b0 = s0.bk;
    const CMat2 I = CMat2::identity();

    double cscale = std::max(max_abs(t.C[0][0]), max_abs(t.C[0][1]));
    double dscale = std::max(max_abs(t.d[0][0]), max_abs(t.d[0][1]));
    bool all_zero = cscale < 1e-300 && dscale < 1e-300 && max_abs(b0) < 1e-300;

    auto geometric_piece = [&](cplx lij) {
        CMat2 lhs = lij * I - A0;
        CMat2 inv = checked_inverse(lhs, "M_resummed: singular (Lambda - A0)");
        CMat2 diff = pow_n(lij, n) * I - pow_int(A0, n);
        return inv * (diff * b0);
    };

    // M11 / M12 pattern: -Lam^N (1+c) [C^{-1}(1 - (1+c)^{N-1})] d
    //                    -Lam^{N-2} C (1-c)^{-1} (1 - c^{N-1}) d
    auto binom_piece = [&](cplx lam, const CMat2& C, const CVec2& d) {
        if (max_abs(C) < 1e-300 && max_abs(d) < 1e-300) return CVec2{};
        CMat2 c = (cplx(1) / lam) * C;
        CVec2 t1 = cplx(-1) * pow_n(lam, n) * ((I + c) * cinv_binom_tail(C, lam, d, n));
        CMat2 inv = checked_inverse(I - c, "M_resummed: singular (1 - C/Lambda)");
        CVec2 t2 = cplx(-1) * pow_n(lam, n - 2) *
                   (C * (inv * ((I - pow_int(c, n - 1)) * d)));
        return t1 + t2;
    };

    MVectors m{};
    if (all_zero) return m;

    m.M11 = geometric_piece(t.Lambda[0][0]) + binom_piece(t.Lambda[0][0], t.C[0][0], t.d[0][0]);
    m.M12 = geometric_piece(t.Lambda[0][1]) + binom_piece(t.Lambda[0][1], t.C[0][1], t.d[0][1]);

    // M22: same-index chains dominated by Lambda_11.
    {
        cplx l22 = t.Lambda[1][1];
        cplx l11 = t.Lambda[0][0];
        const CMat2& C = t.C[0][0];
        const CVec2& d = t.d[0][0];
        CVec2 second{};
        if (!(max_abs(C) < 1e-300 && max_abs(d) < 1e-300)) {
            CMat2 c = (cplx(1) / l11) * C;
            cplx r = l22 / l11;
            CMat2 inv1 = checked_inverse(I + c - r * I,
                                         "M_resummed: singular (1 + C/Lambda11 - Lambda22/Lambda11)");
            CMat2 grow = pow_n(cplx(1) / r, n - 1) * pow_int(I + c, n - 1) - I;
            CVec2 x1 = inv1 * ((I + c) * (grow * d));
            CMat2 c22 = (cplx(1) / l22) * C;
            CMat2 inv2 = checked_inverse(I - c22, "M_resummed: singular (1 - C/Lambda22)");
            CVec2 x2 = cplx(-1) * (inv2 * (c22 * ((I - pow_int(c22, n - 1)) * d)));
            second = pow_n(l22, n - 1) * (x1 + x2);
        }
        m.M22 = geometric_piece(l22) + second;
    }
    return m;
}

RegimeReport predict_weak(const CoefficientTensors& t, const EigensystemV& eig, int n) {
    double gt = t.gamma_tau;
    if (!(gt < kWeakGammaTauMax) || n * gt > kWeakNGammaTauMax)
        throw std::domain_error(
            "predict_weak: outside the weak window (gamma*tau < 0.1, n*gamma*tau <~ 1)");

    RegimeReport rep;
    rep.regime = Regime::weak;
    cplx l11 = eig.Lambda(0, 0);
    cplx l12 = eig.Lambda(0, 1);
    rep.M11 = cplx(static_cast<double>(n - 1)) * pow_n(l11, n - 1) * t.d[0][0];
    rep.M22 = pow_n(l11, n - 1) * t.d[0][0];
    rep.M12 = cplx(static_cast<double>(n - 1)) * pow_n(l12, n - 1) * t.d[0][1];
    rep.rho_pred = outer(eig.u1, eig.u1);
    double ratio = std::abs(eig.lambda2 / eig.lambda1);
    rep.fid_u1_pred = 1.0 - std::min(1.0, gt + std::pow(ratio, n));
    rep.yield_pred = (1.0 + n * gt) * std::pow(std::abs(eig.lambda1), 2.0 * n);
    rep.mixedness_floor = false;
    return rep;
}

RegimeReport predict_intermediate(const CoefficientTensors& t, const EigensystemV& eig, int n) {
    double gt = t.gamma_tau;
    if (!(gt > 0) || !(n > 1.0 / gt) || !(n < 1.0 / (gt * gt)))
        throw std::domain_error(
            "predict_intermediate: outside the window 1/(gamma*tau) < n < 1/(gamma*tau)^2");

    cplx l11 = eig.Lambda(0, 0);
    cplx l12 = eig.Lambda(0, 1);
    const CMat2& C11 = t.C[0][0];
    const CMat2& C12 = t.C[0][1];

    CMat2 e11 = expm(cplx(static_cast<double>(n - 1)) / l11 * C11);
    CMat2 e12 = expm(cplx(static_cast<double>(n - 1)) / l12 * C12);
    // C is structurally rank one; C^{-1} d is the consistent pre-image.
    CVec2 c11_inv_d = solve_or_lsq(C11, t.d[0][0]);
    CVec2 c12_inv_ed = solve_or_lsq(C12, e12 * t.d[0][1]);

    RegimeReport rep;
    rep.regime = Regime::intermediate;
    rep.M11 = pow_n(l11, n - 1) * (e11 * c11_inv_d);
    rep.M22 = pow_n(l11, n - 1) * (e11 * t.d[0][0]);
    rep.M12 = pow_n(l12, n - 1) * c12_inv_ed;
    rep.mixedness_floor = true;

    CMat2 second = first_term(t, eig, n) +
                   assemble_second_term(t, eig, {rep.M11, rep.M22, rep.M12});
    double tr = trace(second).real();
    rep.yield_pred = tr;
    if (tr > 0) {
        rep.rho_pred = cplx(1.0 / tr) * second;
        rep.rho_pred = cplx(0.5) * (rep.rho_pred + adjoint(rep.rho_pred));
        rep.fid_u1_pred = fidelity_pure(rep.rho_pred, eig.u1);
    } else {
        rep.rho_pred = outer(eig.u1, eig.u1);
        rep.fid_u1_pred = 0.0;
    }
    return rep;
}

CMat2 strong_limit_state(const CMat2& rho0, const DissipativeParams& p, int n) {
    p.validate();
    if (!(p.gamma * p.tau >= kStrongGammaTauMin))
        throw std::invalid_argument("strong_limit_state: needs gamma*tau >= 5");
    if (n < 2) throw std::invalid_argument("strong_limit_state: needs n >= 2");

    auto map = build_projected_map(p);
    EigensystemV eig = eig2(map.v);
    CoefficientTensors t = tensors(eig, p, rho0);

    cplx s11 = pow_n(t.C[0][0](0, 0), n - 2) * t.d[0][0][0];
    cplx s12 = pow_n(t.C[0][1](0, 0), n - 2) * t.d[0][1][0];
    CMat2 rdd = rho_down();
    auto w = [&](int i, int j) { return expect(eig.v(i), rdd, eig.v(j)); };

    CMat2 out = (w(0, 0) * s11) * outer(eig.u1, eig.u1);
    CMat2 cross = (w(0, 1) * s12) * outer(eig.u1, eig.u2);
    out += cross + adjoint(cross);
    out += (w(1, 1) * s11) * outer(eig.u2, eig.u2);
    out += s11 * rdd;
    double scale = static_cast<double>(n) * std::norm(eig.lambda1);
    return cplx(scale) * out;
}

FidelityCurve fidelity_curve(const CMat2& rho0, const DissipativeParams& p, int n_max) {
    p.validate();
    if (n_max < 1) throw std::invalid_argument("fidelity_curve: n_max must be >= 1");
    auto map = build_projected_map(p);
    CVec2 u1 = dominant_eigvec(map.v);

    FidelityCurve curve;
    curve.points.reserve(static_cast<std::size_t>(n_max) + 1);
    double tr0 = trace(rho0).real();
    CMat2 rho = cplx(1.0 / tr0) * rho0;
    double cumulative = tr0;
    double best = -1.0;
    for (int n = 0; n <= n_max; ++n) {
        CurvePoint pt;
        pt.n = n;
        pt.fid_u1 = fidelity_pure(rho, u1);
        pt.purity = purity(rho);
        pt.trace = cumulative;
        curve.points.push_back(pt);
        if (pt.fid_u1 > best) {
            best = pt.fid_u1;
            curve.peak_n = n;
        }
        if (n < n_max) {
            rho = step_dissipative(rho, map);
            double tr = trace(rho).real();
            cumulative *= tr;
            rho = cplx(1.0 / tr) * rho;
        }
    }
    return curve;
}

}  // namespace qpurify
