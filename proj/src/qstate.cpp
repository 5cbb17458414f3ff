#include "qpurify/qstate.hpp"

#include <algorithm>
#include <cmath>

namespace qpurify {

std::array<double, 4> hermitian_eigs(const CMat4& m) {
    // Cyclic Jacobi with complex Givens rotations. The matrix is small and
    // well scaled in all our uses; a fixed sweep count converges far past
    // double precision.
    CMat4 a = m;
    for (int sweep = 0; sweep < 30; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < 4; ++p)
            for (std::size_t q = p + 1; q < 4; ++q) off += std::norm(a(p, q));
        if (off < 1e-32) break;
        for (std::size_t p = 0; p < 4; ++p) {
            for (std::size_t q = p + 1; q < 4; ++q) {
                cplx apq = a(p, q);
                double mag = std::abs(apq);
                if (mag < 1e-300) continue;
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                cplx phase = apq / mag;
                double tau = (aqq - app) / (2.0 * mag);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                // Columns: col_p' = c*col_p - conj(s*phase)*col_q, col_q' = s*phase*col_p + c*col_q
                cplx sp = s * phase;
                for (std::size_t r = 0; r < 4; ++r) {
                    cplx arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp - std::conj(sp) * arq;
                    a(r, q) = sp * arp + c * arq;
                }
                for (std::size_t cidx = 0; cidx < 4; ++cidx) {
                    cplx apc = a(p, cidx), aqc = a(q, cidx);
                    a(p, cidx) = c * apc - sp * aqc;
                    a(q, cidx) = std::conj(sp) * apc + c * aqc;
                }
            }
        }
    }
    std::array<double, 4> ev{a(0, 0).real(), a(1, 1).real(), a(2, 2).real(), a(3, 3).real()};
    std::sort(ev.begin(), ev.end());
    return ev;
}

EigensystemV eig2(const CMat2& m, double degeneracy_tol) {
    cplx tr = trace(m);
    cplx dt = det(m);
    cplx disc = std::sqrt(tr * tr - cplx(4) * dt);
    cplx l1 = (tr + disc) / cplx(2);
    cplx l2 = (tr - disc) / cplx(2);
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);

    double scale = std::max(std::abs(l1), 1.0);
    if (std::abs(l1 - l2) < degeneracy_tol * scale)
        throw NearDegenerate("eig2: eigenvalue gap below tolerance");

    auto right_vec = [&m](cplx lambda) {
        // Rows of (m - lambda I) are both orthogonal to the eigenvector;
        // pick the candidate from the larger row for stability.
        CVec2 c1{{m(0, 1), lambda - m(0, 0)}};
        CVec2 c2{{lambda - m(1, 1), m(1, 0)}};
        CVec2 v = (norm2(c1) >= norm2(c2)) ? c1 : c2;
        double n = std::sqrt(norm2(v));
        if (n == 0.0) throw NearDegenerate("eig2: vanishing eigenvector candidate");
        v = (cplx(1.0 / n)) * v;
        // Phase convention: largest-magnitude component real positive.
        std::size_t k = (std::abs(v[0]) >= std::abs(v[1])) ? 0 : 1;
        cplx ph = v[k] / std::abs(v[k]);
        return cplx(1.0) / ph * v;
    };

    EigensystemV es;
    es.lambda1 = l1;
    es.lambda2 = l2;
    es.u1 = right_vec(l1);
    es.u2 = right_vec(l2);
    es.gap = std::abs(l1) - std::abs(l2);

    // Left eigen-bras are the rows of [u1 u2]^{-1}; stored as kets so that
    // <v_i| = conj(row_i).
    cplx d = es.u1[0] * es.u2[1] - es.u1[1] * es.u2[0];
    if (std::abs(d) < degeneracy_tol)
        throw NearDegenerate("eig2: eigenvectors nearly parallel");
    cplx inv_d = cplx(1) / d;
    es.v1 = CVec2{{std::conj(inv_d * es.u2[1]), std::conj(-inv_d * es.u2[0])}};
    es.v2 = CVec2{{std::conj(-inv_d * es.u1[1]), std::conj(inv_d * es.u1[0])}};
    return es;
}

CVec2 dominant_eigvec(const CMat2& m) {
    try {
        return eig2(m).u1;
    } catch (const NearDegenerate&) {
        CVec2 v{{cplx(1.0), cplx(0.7071067811865476)}};
        for (int it = 0; it < 200; ++it) {
            v = m * v;
            double n = std::sqrt(norm2(v));
            if (n == 0.0) return CVec2{{1, 0}};
            v = cplx(1.0 / n) * v;
        }
        std::size_t k = (std::abs(v[0]) >= std::abs(v[1])) ? 0 : 1;
        cplx ph = v[k] / std::abs(v[k]);
        return cplx(1.0) / ph * v;
    }
}

bool is_density(const CMat2& rho, double tol) {
    if (!all_finite(rho)) return false;
    if (max_abs_diff(rho, adjoint(rho)) > tol) return false;
    CMat2 h = cplx(0.5) * (rho + adjoint(rho));
    auto ev = hermitian_eigs(h);
    if (ev[0] < -tol) return false;
    double tr = trace(h).real();
    return tr > 0.0 && tr <= 1.0 + tol;
}

double purity(const CMat2& rho) {
    double tr = trace(rho).real();
    if (!(tr > 0.0)) throw std::domain_error("purity: empty state");
    double tr2 = trace(rho * rho).real();
    return tr2 / (tr * tr);
}

double fidelity_pure(const CMat2& rho, const CVec2& psi) {
    double tr = trace(rho).real();
    double n = norm2(psi);
    if (!(tr > 0.0)) throw std::domain_error("fidelity_pure: empty state");
    if (!(n > 0.0)) throw std::domain_error("fidelity_pure: zero vector");
    return expect(psi, rho, psi).real() / (tr * n);
}

CMat2 partial_trace_X(const CMat4& rho_xs) {
    CMat2 r;
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t sp = 0; sp < 2; ++sp)
            r(s, sp) = rho_xs(s, sp) + rho_xs(2 + s, 2 + sp);
    return r;
}

CMat2 project_X(const CMat4& rho_xs, cplx alpha) {
    double nrm = 1.0 + std::norm(alpha);
    cplx n0 = alpha / std::sqrt(nrm);
    cplx n1 = cplx(1.0) / std::sqrt(nrm);
    std::array<cplx, 2> n{n0, n1};
    CMat2 r;
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t sp = 0; sp < 2; ++sp) {
            cplx acc = 0;
            for (std::size_t x = 0; x < 2; ++x)
                for (std::size_t xp = 0; xp < 2; ++xp)
                    acc += std::conj(n[x]) * rho_xs(2 * x + s, 2 * xp + sp) * n[xp];
            r(s, sp) = acc;
        }
    return r;
}

CMat2 project_X_up(const CMat4& rho_xs) {
    CMat2 r;
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t sp = 0; sp < 2; ++sp)
            r(s, sp) = rho_xs(s, sp);
    return r;
}

CMat4 tensor_X(const CVec2& x_amps, const CMat2& rho_s) {
    CMat4 r;
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t xp = 0; xp < 2; ++xp) {
            cplx w = x_amps[x] * std::conj(x_amps[xp]);
            for (std::size_t s = 0; s < 2; ++s)
                for (std::size_t sp = 0; sp < 2; ++sp)
                    r(2 * x + s, 2 * xp + sp) = w * rho_s(s, sp);
        }
    return r;
}

}  // namespace qpurify
