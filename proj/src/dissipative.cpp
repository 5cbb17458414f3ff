#include "qpurify/dissipative.hpp"

#include <cmath>

namespace qpurify {

namespace {

const CVec2 kUp{{cplx(1), cplx(0)}};
const CVec2 kDown{{cplx(0), cplx(1)}};

struct Weights {
    double w0, w1, w2;
};

Weights cascade_weights(double gt) {
    double e = std::exp(-gt);
    return {1.0 - e, 1.0 - e - gt * e, gt * e};
}

// F = f1 <a*|rho|a*> + f2 <up|rho|up>, G = g1 <up|rho|up>, with the
// measure_up limits f1, f2 -> 0 and g1 -> w2/2 (rho_astar -> rho_dd).
struct FGWeights {
    double f1, f2, g1;
};

FGWeights fg_weights(const DissipativeParams& p) {
    auto w = cascade_weights(p.gamma * p.tau);
    if (p.measure_up) return {0.0, 0.0, 0.5 * w.w2};
    double a2 = std::norm(p.alpha);
    double na = 1.0 + a2;
    return {w.w0 / (2.0 * na), a2 * w.w1 / (na * na), a2 * w.w2 / (2.0 * na)};
}

}  // namespace

CVec2 measurement_amps(const DissipativeParams& p) {
    if (p.measure_up) return kUp;
    double n = std::sqrt(1.0 + std::norm(p.alpha));
    return CVec2{{p.alpha / n, cplx(1.0) / n}};
}

CMat2 rho_alpha_star(const DissipativeParams& p) {
    if (p.measure_up) return rho_down();
    double na = 1.0 + std::norm(p.alpha);
    CVec2 astar{{cplx(1.0 / std::sqrt(na)), std::conj(p.alpha) / std::sqrt(na)}};
    return outer(astar, astar);
}

JointKraus dissipative_kraus_joint(const DissipativeParams& p, double t) {
    p.validate();
    if (t < 0) throw std::invalid_argument("dissipative_kraus_joint: t must be >= 0");

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CVec4 s2{{1, 0, 0, 0}};
    CVec4 s0{{0, 0, 0, 1}};
    CVec4 sp{{0, inv_sqrt2, inv_sqrt2, 0}};
    CVec4 sm{{0, inv_sqrt2, -inv_sqrt2, 0}};

    JointKraus k;
    cplx f2 = std::exp(cplx(-0.5 * p.gamma * t, -p.e2_shifted() * t));
    cplx fp = std::exp(cplx(-0.5 * p.gamma * t, -p.e_plus_shifted() * t));
    cplx f0 = std::exp(cplx(0.0, p.Omega * t));   // E0 = -Omega
    cplx fm = std::exp(cplx(0.0, p.g * t));       // E- = -g
    k.e_at = f2 * outer(s2, s2) + fp * outer(sp, sp) + f0 * outer(s0, s0) + fm * outer(sm, sm);
    k.b0 = outer(s0, sp);
    k.b1 = outer(sp, s2);
    k.b0b1 = outer(s0, s2);
    auto w = cascade_weights(p.gamma * t);
    k.w0 = w.w0;
    k.w1 = w.w1;
    k.w2 = w.w2;
    return k;
}

CMat4 apply_joint(const JointKraus& k, const CMat4& rho_xs) {
    CMat4 out = sandwich(k.e_at, rho_xs);
    out += cplx(k.w0) * sandwich(k.b0, rho_xs);
    out += cplx(k.w1) * sandwich(k.b0b1, rho_xs);
    out += cplx(k.w2) * sandwich(k.b1, rho_xs);
    return out;
}

ProjectedMap build_projected_map(const DissipativeParams& p) {
    p.validate();
    auto w = cascade_weights(p.gamma * p.tau);
    ProjectedMap m;
    m.w0 = w.w0;
    m.w1 = w.w1;
    m.w2 = w.w2;
    m.alpha = p.alpha;
    m.measure_up = p.measure_up;

    cplx e2 = std::exp(cplx(-0.5 * p.gamma * p.tau, -p.e2_shifted() * p.tau));
    cplx ep = std::exp(cplx(-0.5 * p.gamma * p.tau, -p.e_plus_shifted() * p.tau));
    cplx e0 = std::exp(cplx(0.0, p.Omega * p.tau));
    cplx em = std::exp(cplx(0.0, p.g * p.tau));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    if (p.measure_up) {
        m.v = CMat2{{e2, 0, 0, 0.5 * (ep + em)}};
        m.c0 = CMat2::zero();
        m.c1 = CMat2::zero();
        m.c2 = CMat2{{0, 0, inv_sqrt2, 0}};
        return m;
    }

    cplx a = p.alpha;
    double a2 = std::norm(a);
    cplx norm = cplx(1.0 / (1.0 + a2));
    m.v = norm * CMat2{{a2 * e2 + 0.5 * ep + 0.5 * em, (a / 2.0) * (ep - em),
                        (std::conj(a) / 2.0) * (ep - em), (a2 / 2.0) * (ep + em) + e0}};
    m.c0 = norm * CMat2{{0, 0, inv_sqrt2, a * inv_sqrt2}};
    m.c1 = norm * CMat2{{0, 0, a, 0}};
    m.c2 = norm * CMat2{{a * inv_sqrt2, 0, a2 * inv_sqrt2, 0}};
    return m;
}

FG coefficients_FG(const CMat2& rho, const DissipativeParams& p) {
    auto w = fg_weights(p);
    double up_pop = rho(0, 0).real();
    double astar_pop = (trace(rho_alpha_star(p) * rho)).real();
    return {w.f1 * astar_pop + w.f2 * up_pop, w.g1 * up_pop};
}

namespace {

CMat2 rho_alpha_star_of(const ProjectedMap& map) {
    if (map.measure_up) return rho_down();
    double na = 1.0 + std::norm(map.alpha);
    CVec2 astar{{cplx(1.0 / std::sqrt(na)), std::conj(map.alpha) / std::sqrt(na)}};
    return outer(astar, astar);
}

FG fg_of(const CMat2& rho, const ProjectedMap& map) {
    double up_pop = rho(0, 0).real();
    double astar_pop = trace(rho_alpha_star_of(map) * rho).real();
    if (map.measure_up) return {0.0, 0.5 * map.w2 * up_pop};
    double a2 = std::norm(map.alpha);
    double na = 1.0 + a2;
    double f1 = map.w0 / (2.0 * na);
    double f2 = a2 * map.w1 / (na * na);
    double g1 = a2 * map.w2 / (2.0 * na);
    return {f1 * astar_pop + f2 * up_pop, g1 * up_pop};
}

}  // namespace

CMat2 step_dissipative(const CMat2& rho, const ProjectedMap& map) {
    auto fg = fg_of(rho, map);
    return sandwich(map.v, rho) + cplx(fg.F) * rho_down() + cplx(fg.G) * rho_alpha_star_of(map);
}

CMat2 step_dissipative_kraus(const CMat2& rho, const ProjectedMap& map) {
    CMat2 out = sandwich(map.v, rho);
    out += cplx(map.w0) * sandwich(map.c0, rho);
    out += cplx(map.w1) * sandwich(map.c1, rho);
    out += cplx(map.w2) * sandwich(map.c2, rho);
    return out;
}

Trajectory iterate(const CMat2& rho0, const DissipativeParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("iterate: n must be >= 0");
    auto map = build_projected_map(p);
    CVec2 u1 = dominant_eigvec(map.v);

    Trajectory traj;
    traj.steps.reserve(static_cast<std::size_t>(n) + 1);
    CMat2 rho = rho0;
    for (int k = 0; k <= n; ++k) {
        StepRecord rec;
        rec.n = k;
        rec.rho = rho;
        rec.trace = trace(rho).real();
        rec.purity = purity(rho);
        rec.fid_u1 = fidelity_pure(rho, u1);
        rec.fid_down = fidelity_pure(rho, kDown);
        auto fg = coefficients_FG(rho, p);
        rec.F = fg.F;
        rec.G = fg.G;
        traj.steps.push_back(rec);
        if (k < n) rho = step_dissipative(rho, map);
    }
    return traj;
}

CMat2 joint_oracle_dissipative(const CMat2& rho0, const DissipativeParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("joint_oracle_dissipative: n must be >= 0");
    auto k = dissipative_kraus_joint(p, p.tau);
    CVec2 amps = measurement_amps(p);
    CMat2 rho = rho0;
    for (int it = 0; it < n; ++it) {
        CMat4 joint = tensor_X(amps, rho);
        joint = apply_joint(k, joint);
        rho = p.measure_up ? project_X_up(joint) : project_X(joint, p.alpha);
    }
    return rho;
}

}  // namespace qpurify
