#include "qpurify/dephasing.hpp"

#include <cmath>

namespace qpurify {

namespace {

cplx phase_exp(double energy, double t, double damp = 0.0) {
    return std::exp(cplx(-damp, -energy * t));
}

}  // namespace

DephasingEigensystem dephasing_eigensystem(const DephasingParams& p) {
    p.validate();
    DephasingEigensystem es;
    double ep = p.e_plus();
    double delta = (p.omega - p.Omega) / (2.0 * ep);
    double a = std::sqrt(0.5 * (1.0 + delta));
    double b = std::sqrt(0.5 * (1.0 - delta));

    es.energies = {p.e2(), -p.e2(), ep, -ep};
    es.states[0] = CVec4{{1, 0, 0, 0}};           // |2> = |uu>
    es.states[1] = CVec4{{0, 0, 0, 1}};           // |0> = |dd>
    es.states[2] = CVec4{{0, a, b, 0}};           // |+>
    es.states[3] = CVec4{{0, b, -a, 0}};          // |->
    return es;
}

DephasingChannel kraus_dephasing(const DephasingParams& p, double t) {
    p.validate();
    if (t < 0) throw std::invalid_argument("kraus_dephasing: t must be >= 0");
    auto es = dephasing_eigensystem(p);
    CMat4 p2 = outer(es.states[0], es.states[0]);
    CMat4 p0 = outer(es.states[1], es.states[1]);
    CMat4 pp = outer(es.states[2], es.states[2]);
    CMat4 pm = outer(es.states[3], es.states[3]);

    cplx f2 = phase_exp(p.e2_shifted(), t, 0.5 * p.gamma * t);
    cplx f0 = phase_exp(p.e0_shifted(), t, 0.5 * p.gamma * t);
    cplx fp = phase_exp(es.energies[2], t);
    cplx fm = phase_exp(es.energies[3], t);

    DephasingChannel ch;
    ch.k0 = f2 * p2 + f0 * p0 + fp * pp + fm * pm;
    double cosh_w = std::sqrt(std::max(0.0, std::cosh(p.gamma * t) - 1.0));
    double sinh_w = std::sqrt(std::max(0.0, std::sinh(p.gamma * t)));
    ch.kplus = cplx(cosh_w) * (f2 * p2 + f0 * p0);
    ch.kminus = cplx(sinh_w) * (f2 * p2 - f0 * p0);
    return ch;
}

CMat4 apply_channel(const DephasingChannel& ch, const CMat4& rho_xs) {
    return sandwich(ch.k0, rho_xs) + sandwich(ch.kplus, rho_xs) + sandwich(ch.kminus, rho_xs);
}

cplx xi(const DephasingParams& p) {
    p.validate();
    double ep = p.e_plus();
    double delta = (p.omega - p.Omega) / (2.0 * ep);
    return cplx(std::cos(ep * p.tau), -delta * std::sin(ep * p.tau));
}

DephasingProjectedOps projected_ops_up(const DephasingParams& p) {
    p.validate();
    cplx e2 = phase_exp(p.e2_shifted(), p.tau, 0.5 * p.gamma * p.tau);
    cplx x = xi(p);
    DephasingProjectedOps ops;
    ops.v0 = CMat2{{e2, 0, 0, x}};
    double cosh_w = std::sqrt(std::max(0.0, std::cosh(p.gamma * p.tau) - 1.0));
    double sinh_w = std::sqrt(std::max(0.0, std::sinh(p.gamma * p.tau)));
    ops.vplus = CMat2{{cosh_w * e2, 0, 0, 0}};
    ops.vminus = CMat2{{sinh_w * e2, 0, 0, 0}};
    return ops;
}

CMat2 step_dephasing(const CMat2& rho, const DephasingProjectedOps& ops) {
    return sandwich(ops.v0, rho) + sandwich(ops.vplus, rho) + sandwich(ops.vminus, rho);
}

CMat2 rhoN_dephasing_closed(const CMat2& rho0, const DephasingParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("rhoN_dephasing_closed: n must be >= 0");
    if (n == 0) return rho0;
    cplx e2 = phase_exp(p.e2_shifted(), p.tau, 0.5 * p.gamma * p.tau);
    cplx x = xi(p);
    cplx up_down = std::pow(e2 * std::conj(x), n);
    double dd = std::pow(std::norm(x), n);
    CMat2 r;
    r(0, 0) = rho0(0, 0);
    r(0, 1) = up_down * rho0(0, 1);
    r(1, 0) = std::conj(up_down) * rho0(1, 0);
    r(1, 1) = dd * rho0(1, 1);
    return r;
}

OptimalTau optimal_tau(const DephasingParams& p) {
    if (p.g == 0) throw std::domain_error("optimal_tau: no purification possible at g = 0");
    DephasingParams q = p;
    q.tau = 1.0;  // validate() needs tau > 0; tau itself is the output here
    q.validate();
    double ep = q.e_plus();
    return {M_PI / (2.0 * ep), xi_min_sq(p)};
}

CMat2 joint_oracle_dephasing(const CMat2& rho0, const DephasingParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("joint_oracle_dephasing: n must be >= 0");
    auto ch = kraus_dephasing(p, p.tau);
    CVec2 up{{1, 0}};
    CMat2 rho = rho0;
    for (int k = 0; k < n; ++k) {
        CMat4 joint = tensor_X(up, rho);
        joint = apply_channel(ch, joint);
        rho = project_X_up(joint);
    }
    return rho;
}

}  // namespace qpurify
