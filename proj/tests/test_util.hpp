#pragma once

#include <random>

#include "qpurify/dephasing.hpp"
#include "qpurify/dissipative.hpp"

// Shared random generators for the test suites. All tests seed explicitly so
// failures reproduce.

namespace qpurify::testutil {

inline CMat2 random_density2(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CMat2 g;
    for (auto& x : g.e) x = cplx(nd(rng), nd(rng));
    CMat2 r = g * adjoint(g);
    return cplx(1.0 / trace(r).real()) * r;
}

inline CMat4 random_psd4(std::mt19937_64& rng, bool unit_trace = true) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CMat4 g;
    for (auto& x : g.e) x = cplx(nd(rng), nd(rng));
    CMat4 r = g * adjoint(g);
    if (unit_trace) r = cplx(1.0 / trace(r).real()) * r;
    return r;
}

inline CVec2 random_unit2(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CVec2 v{{cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng))}};
    double n = std::sqrt(norm2(v));
    return cplx(1.0 / n) * v;
}

inline cplx random_cplx(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    return {nd(rng), nd(rng)};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

inline DephasingParams random_dephasing(std::mt19937_64& rng) {
    DephasingParams p;
    p.omega = uniform(rng, 0.3, 2.5);
    p.Omega = uniform(rng, 0.3, 2.5);
    p.g = uniform(rng, 0.1, 1.2);
    p.gamma = uniform(rng, 0.0, 1.5);
    p.delta_e = uniform(rng, -0.5, 0.5);
    p.tau = uniform(rng, 0.3, 2.5);
    return p;
}

inline DissipativeParams random_dissipative(std::mt19937_64& rng, double gamma_tau_max = 2.0) {
    DissipativeParams p;
    p.g = uniform(rng, 0.2, 0.8);
    p.Omega = uniform(rng, p.g + 0.2, 2.2);
    p.tau = uniform(rng, 0.4, 2.0);
    p.gamma = uniform(rng, 0.0, gamma_tau_max) / p.tau;
    p.delta_e2 = uniform(rng, -0.3, 0.3);
    p.delta_e_plus = uniform(rng, -0.3, 0.3);
    double mag = uniform(rng, 0.3, 1.6);
    double ph = uniform(rng, 0.0, 2.0 * M_PI);
    p.alpha = std::polar(mag, ph);
    return p;
}

}  // namespace qpurify::testutil
