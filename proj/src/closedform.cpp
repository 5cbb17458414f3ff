#include "qpurify/closedform.hpp"

#include <cmath>

namespace qpurify {

namespace {

const CVec2 kUp{{cplx(1), cplx(0)}};
const CVec2 kDown{{cplx(0), cplx(1)}};

// <x|u_a> <v_a|y> for a = 0, 1.
std::array<cplx, 2> bra_ket(const EigensystemV& eig, const CVec2& x, const CVec2& y) {
    return {inner(x, eig.u1) * inner(eig.v1, y), inner(x, eig.u2) * inner(eig.v2, y)};
}

// Complete homogeneous symmetric polynomial h_n(xs) by the prefix
// recurrence; exact for coincident points (the grouped fallback for the
// closed nested-sum formula).
cplx hsum(std::span<const cplx> xs, int n) {
    std::vector<cplx> h(static_cast<std::size_t>(n) + 1, cplx(0));
    h[0] = cplx(1);
    for (cplx x : xs) {
        for (int m = 1; m <= n; ++m) h[m] += x * h[m - 1];
    }
    return h[n];
}

bool pairwise_distinct(std::span<const cplx> xs, double tol) {
    double scale = 0;
    for (cplx x : xs) scale = std::max(scale, std::abs(x));
    scale = std::max(scale, 1e-300);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j)
            if (std::abs(xs[i] - xs[j]) < tol * scale) return false;
    return true;
}

cplx nested_sum_closed_unchecked(std::span<const cplx> xs, int k) {
    cplx s = 0;
    for (std::size_t m = 0; m < xs.size(); ++m) {
        cplx denom = 1;
        for (std::size_t n = 0; n < xs.size(); ++n)
            if (n != m) denom *= xs[m] - xs[n];
        s += std::pow(xs[m], k) / denom;
    }
    return s;
}

}  // namespace

CoefficientTensors tensors(const EigensystemV& eig, const DissipativeParams& p,
                           const CMat2& rho0) {
    p.validate();
    CoefficientTensors t;
    t.gamma_tau = p.gamma * p.tau;
    t.alpha = p.alpha;
    t.measure_up = p.measure_up;

    double e = std::exp(-t.gamma_tau);
    double w0 = 1.0 - e;
    double w1 = 1.0 - e - t.gamma_tau * e;
    double w2 = t.gamma_tau * e;
    double f1, f2, g1;
    CVec2 astar;
    if (p.measure_up) {
        f1 = f2 = 0.0;
        g1 = 0.5 * w2;
        astar = kDown;
    } else {
        double a2 = std::norm(p.alpha);
        double na = 1.0 + a2;
        f1 = w0 / (2.0 * na);
        f2 = a2 * w1 / (na * na);
        g1 = a2 * w2 / (2.0 * na);
        astar = CVec2{{cplx(1.0 / std::sqrt(na)), std::conj(p.alpha) / std::sqrt(na)}};
    }

    auto z_ad = bra_ket(eig, astar, kDown);   // <a*|u_a><v_a|down>
    auto z_ud = bra_ket(eig, kUp, kDown);     // <up|u_a><v_a|down>
    auto z_aa = bra_ket(eig, astar, astar);   // <a*|u_a><v_a|a*>
    auto z_ua = bra_ket(eig, kUp, astar);     // <up|u_a><v_a|a*>
    std::array<cplx, 2> ua{inner(astar, eig.u1), inner(astar, eig.u2)};
    std::array<cplx, 2> uu{inner(kUp, eig.u1), inner(kUp, eig.u2)};

    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            t.Lambda[a][b] = eig.Lambda(a, b);
            CMat2& C = t.C[a][b];
            C(0, 0) = f1 * z_ad[a] * std::conj(z_ad[b]) + f2 * z_ud[a] * std::conj(z_ud[b]);
            C(0, 1) = f1 * z_aa[a] * std::conj(z_aa[b]) + f2 * z_ua[a] * std::conj(z_ua[b]);
            C(1, 0) = g1 * z_ud[a] * std::conj(z_ud[b]);
            C(1, 1) = g1 * z_ua[a] * std::conj(z_ua[b]);
            // <v_a|rho0|v_b>
            cplx m_ab = expect(eig.v(a), rho0, eig.v(b));
            t.rho0_vv[a][b] = m_ab;
            CVec2& d = t.d[a][b];
            d[0] = (f1 * ua[a] * std::conj(ua[b]) + f2 * uu[a] * std::conj(uu[b])) * m_ab;
            d[1] = g1 * uu[a] * std::conj(uu[b]) * m_ab;
        }
    }

    auto fg0 = coefficients_FG(rho0, p);
    t.f0 = fg0.F;
    t.g0 = fg0.G;
    return t;
}

SeriesTerm series_Ak_bk(const CoefficientTensors& t, int k) {
    if (k < 0) throw std::invalid_argument("series_Ak_bk: k must be >= 0");
    SeriesTerm s{CMat2::zero(), CVec2{}};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cplx w = std::pow(t.Lambda[a][b], k);
            s.Ak += w * t.C[a][b];
            s.bk += w * t.d[a][b];
        }
    return s;
}

FGSeries fg_by_recursion(const CoefficientTensors& t, int n) {
    if (n < 0) throw std::invalid_argument("fg_by_recursion: n must be >= 0");
    // Seed consistency: b_0 must reproduce the directly computed F(rho0), G(rho0).
    auto s0 = series_Ak_bk(t, 0);
    double scale = std::max({std::abs(t.f0), std::abs(t.g0), 1.0});
    if (std::abs(s0.bk[0] - t.f0) > 1e-10 * scale || std::abs(s0.bk[1] - t.g0) > 1e-10 * scale)
        throw std::runtime_error("fg_by_recursion: b_0 inconsistent with direct seed");

    FGSeries out;
    out.F.resize(static_cast<std::size_t>(n) + 1);
    out.G.resize(static_cast<std::size_t>(n) + 1);
    out.F[0] = t.f0;
    out.G[0] = t.g0;

    std::vector<SeriesTerm> terms;
    terms.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) terms.push_back(series_Ak_bk(t, k));

    for (int N = 1; N <= n; ++N) {
        cplx f = terms[static_cast<std::size_t>(N)].bk[0];
        cplx g = terms[static_cast<std::size_t>(N)].bk[1];
        for (int k = 0; k < N; ++k) {
            const CMat2& A = terms[static_cast<std::size_t>(N - 1 - k)].Ak;
            cplx fk = out.F[static_cast<std::size_t>(k)];
            cplx gk = out.G[static_cast<std::size_t>(k)];
            f += A(0, 0) * fk + A(0, 1) * gk;
            g += A(1, 0) * fk + A(1, 1) * gk;
        }
        out.F[static_cast<std::size_t>(N)] = f.real();
        out.G[static_cast<std::size_t>(N)] = g.real();
    }
    return out;
}

cplx nested_sum_brute(std::span<const cplx> xs, int k) {
    int l = static_cast<int>(xs.size()) - 1;
    if (l < 0) throw std::invalid_argument("nested_sum_brute: empty point list");
    if (k < l) throw std::invalid_argument("nested_sum_brute: need k >= l");
    if (l > 6 || k > 25) throw std::invalid_argument("nested_sum_brute: limits l <= 6, k <= 25");

    // DFS over k_1..k_l with remaining budget; x_{l+1} takes the rest.
    struct Rec {
        std::span<const cplx> xs;
        int l;
        cplx total = 0;
        void run(int i, int rem, cplx prod) {
            if (i == l) {
                cplx last = 1;
                for (int j = 0; j < rem; ++j) last *= xs[static_cast<std::size_t>(l)];
                total += prod * last;
                return;
            }
            cplx powx = 1;
            for (int ki = 0; ki <= rem; ++ki) {
                run(i + 1, rem - ki, prod * powx);
                powx *= xs[static_cast<std::size_t>(i)];
            }
        }
    } rec{xs, l};
    rec.run(0, k - l, cplx(1));
    return rec.total;
}

cplx nested_sum_closed(std::span<const cplx> xs, int k, double tol) {
    if (xs.empty()) throw std::invalid_argument("nested_sum_closed: empty point list");
    if (!pairwise_distinct(xs, tol))
        throw ConfluentPoints("nested_sum_closed: coincident points");
    return nested_sum_closed_unchecked(xs, k);
}

namespace {

// DFS over the 4^(l+1) index-pair assignments of one chain
// C^{a_1 b_1} ... C^{a_l b_l} d^{a_{l+1} b_{l+1}}, carrying the suffix
// product vector and the multiset of Lambda values. Per leaf the exponent
// sum is the closed formula for distinct points and the grouped exact
// recurrence otherwise.
struct ChainSum {
    const CoefficientTensors& t;
    int k;
    double tol;
    CVec2 acc{};
    std::vector<cplx> lam_stack;

    // Switch to the grouped recurrence well before the closed-form
    // denominators lose precision.
    explicit ChainSum(const CoefficientTensors& tt, int kk)
        : t(tt), k(kk), tol(1e-6) {}

    void leaves(int remaining, const CVec2& suffix) {
        if (remaining == 0) {
            int l = static_cast<int>(lam_stack.size()) - 1;
            cplx w = pairwise_distinct(lam_stack, tol)
                         ? nested_sum_closed_unchecked(lam_stack, k)
                         : hsum(lam_stack, k - l);
            acc += w * suffix;
            return;
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                lam_stack.push_back(t.Lambda[a][b]);
                leaves(remaining - 1, t.C[a][b] * suffix);
                lam_stack.pop_back();
            }
    }

    CVec2 run(int l) {
        acc = CVec2{};
        lam_stack.clear();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                lam_stack.push_back(t.Lambda[a][b]);
                leaves(l, t.d[a][b]);
                lam_stack.pop_back();
            }
        return acc;
    }
};

}  // namespace

FG fg_closed(const CoefficientTensors& t, int k) {
    if (k < 0) throw std::invalid_argument("fg_closed: k must be >= 0");
    if (k > kFgClosedMaxK)
        throw std::invalid_argument("fg_closed: k too large, use recursion path");
    ChainSum cs(t, k);
    CVec2 total{};
    for (int l = 0; l <= k; ++l) total += cs.run(l);
    return {total[0].real(), total[1].real()};
}

CMat2 rhoN_closed(const CMat2& rho0, const DissipativeParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("rhoN_closed: n must be >= 0");
    if (n > kFgClosedMaxK)
        throw std::invalid_argument("rhoN_closed: n capped at 12 on the exact path");
    if (n == 0) return rho0;

    auto map = build_projected_map(p);
    EigensystemV eig = eig2(map.v);  // NearDegenerate propagates to the caller
    CoefficientTensors t = tensors(eig, p, rho0);

    // F_k, G_k for k = 0..n-1, preferring the closed evaluation.
    std::vector<double> F(static_cast<std::size_t>(n)), G(static_cast<std::size_t>(n));
    try {
        for (int k = 0; k < n; ++k) {
            auto fg = fg_closed(t, k);
            F[static_cast<std::size_t>(k)] = fg.F;
            G[static_cast<std::size_t>(k)] = fg.G;
        }
    } catch (const std::exception&) {
        auto series = fg_by_recursion(t, n - 1);
        F = series.F;
        G = series.G;
    }

    CMat2 rdd = rho_down();
    CMat2 ras = rho_alpha_star(p);
    CMat2 out = CMat2::zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            cplx lij = t.Lambda[i][j];
            CMat2 uiuj = outer(eig.u(i), eig.u(j));
            out += (std::pow(lij, n) * expect(eig.v(i), rho0, eig.v(j))) * uiuj;
            cplx wdd = expect(eig.v(i), rdd, eig.v(j));
            cplx was = expect(eig.v(i), ras, eig.v(j));
            cplx s = 0;
            for (int k = 0; k < n; ++k)
                s += std::pow(lij, n - 1 - k) *
                     (wdd * F[static_cast<std::size_t>(k)] + was * G[static_cast<std::size_t>(k)]);
            out += s * uiuj;
        }
    return out;
}

long long composition_count(int n, int l) {
    if (l < 0 || l > n - 1) throw std::invalid_argument("composition_count: need 0 <= l <= n-1");
    // binomial(n, l+1) by the multiplicative rule; exact for the small n used here.
    long long r = 1;
    int kk = l + 1;
    if (kk > n - kk) kk = n - kk;
    for (int i = 1; i <= kk; ++i) {
        r = r * (n - kk + i) / i;
    }
    return r;
}

}  // namespace qpurify
