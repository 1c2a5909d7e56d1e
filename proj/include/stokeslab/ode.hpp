#pragma once

// Matrix-valued ODE transport along explicit paths in C*.  Points carry a
// modulus and a continuous (non-reduced) argument, so every branch choice in
// the Stokes machinery is plain arithmetic on args.

#include <cmath>
#include <functional>

#include "common.hpp"

namespace stokeslab {

template <class Real>
using CMat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
struct PathPointT {
    Real modulus;
    Real arg;  // continuous, may exceed (-pi, pi]
    std::complex<Real> z() const {
        return std::polar(modulus, arg);
    }
};

using PathPoint = PathPointT<double>;

struct IntegratorConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-13;
    double h_init = 1e-4;
    double h_min = 1e-15;
    long max_steps = 4000000;
    bool fixed_rk4 = false;   // cross-check mode
    long fixed_steps = 20000; // per path leg when fixed_rk4
};

// Dormand-Prince 5(4) with standard step control.  f(s, Y) -> dY/ds on s in
// [0,1]; Y is a complex matrix.
template <class Real, class F>
void dp54_integrate(const F& f, CMat<Real>& y, Real s0, Real s1,
                    const IntegratorConfig& cfg) {
    static const Real c2 = Real(1) / 5, c3 = Real(3) / 10, c4 = Real(4) / 5,
                      c5 = Real(8) / 9;
    static const Real a21 = Real(1) / 5;
    static const Real a31 = Real(3) / 40, a32 = Real(9) / 40;
    static const Real a41 = Real(44) / 45, a42 = Real(-56) / 15, a43 = Real(32) / 9;
    static const Real a51 = Real(19372) / 6561, a52 = Real(-25360) / 2187,
                      a53 = Real(64448) / 6561, a54 = Real(-212) / 729;
    static const Real a61 = Real(9017) / 3168, a62 = Real(-355) / 33,
                      a63 = Real(46732) / 5247, a64 = Real(49) / 176,
                      a65 = Real(-5103) / 18656;
    static const Real b1 = Real(35) / 384, b3 = Real(500) / 1113, b4 = Real(125) / 192,
                      b5 = Real(-2187) / 6784, b6 = Real(11) / 84;
    static const Real e1 = Real(71) / 57600, e3 = Real(-71) / 16695,
                      e4 = Real(71) / 1920, e5 = Real(-17253) / 339200,
                      e6 = Real(22) / 525, e7 = Real(-1) / 40;

    const Real rtol = Real(cfg.rel_tol), atol = Real(cfg.abs_tol);
    Real s = s0, h = Real(cfg.h_init) * (s1 > s0 ? 1 : -1);
    CMat<Real> k1 = f(s, y), k2, k3, k4, k5, k6, k7, ynew, err;
    long steps = 0;
    while ((s1 > s0) ? (s < s1) : (s > s1)) {
        if (++steps > cfg.max_steps)
            throw StepUnderflow("step budget exhausted");
        if (std::abs(h) < cfg.h_min)
            throw StepUnderflow("step size underflow");
        if ((s1 > s0) ? (s + h > s1) : (s + h < s1)) h = s1 - s;

        k2 = f(s + c2 * h, (y + h * (a21 * k1)).eval());
        k3 = f(s + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
        k4 = f(s + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
        k5 = f(s + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
        k6 = f(s + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f(s + h, ynew);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        Real sc = atol + rtol * std::max(y.norm(), ynew.norm());
        Real en = err.norm() / sc;
        if (en <= Real(1)) {
            s += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
        } else {
            k1 = f(s, y);
        }
        Real fac = Real(0.9) * std::pow(std::max(en, Real(1e-30)), Real(-0.2));
        fac = std::min(Real(5), std::max(Real(0.2), fac));
        h *= fac;
    }
}

template <class Real, class F>
void rk4_integrate(const F& f, CMat<Real>& y, Real s0, Real s1, long nsteps) {
    Real h = (s1 - s0) / Real(nsteps);
    CMat<Real> k1, k2, k3, k4;
    for (long i = 0; i < nsteps; ++i) {
        Real s = s0 + h * Real(i);
        k1 = f(s, y);
        k2 = f(s + h / 2, (y + (h / 2) * k1).eval());
        k3 = f(s + h / 2, (y + (h / 2) * k2).eval());
        k4 = f(s + h, (y + h * k3).eval());
        y += (h / 6) * (k1 + Real(2) * k2 + Real(2) * k3 + k4);
    }
}

// Transport Y along one path leg (radial or arc) for dY/dz = M(z) Y - Y N(z)
// style right-hand sides supplied as rhs(z, Y).
template <class Real, class RHS>
void transport_leg(const RHS& rhs, CMat<Real>& y, const PathPointT<Real>& from,
                   const PathPointT<Real>& to, const IntegratorConfig& cfg) {
    using C = std::complex<Real>;
    if (from.modulus <= 0 || to.modulus <= 0)
        throw SingularOnPath("path touches the irregular singularity");
    auto f = [&](Real s, const CMat<Real>& y_) -> CMat<Real> {
        Real rho = from.modulus + s * (to.modulus - from.modulus);
        Real th = from.arg + s * (to.arg - from.arg);
        C z = std::polar(rho, th);
        C dz = std::polar(Real(1), th) * (to.modulus - from.modulus)
             + C(0, 1) * z * (to.arg - from.arg);
        return (rhs(z, y_) * dz).eval();
    };
    if (cfg.fixed_rk4)
        rk4_integrate<Real>(f, y, Real(0), Real(1), cfg.fixed_steps);
    else
        dp54_integrate<Real>(f, y, Real(0), Real(1), cfg);
}

}  // namespace stokeslab
