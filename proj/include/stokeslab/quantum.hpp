#pragma once

// Order-one layer of the dynamical twist and of the quantum Stokes matrices
// for the joch-type connection d - (sfh Omega / z + ad mu^(1)) dz on a two-leg
// tensor space, with hbar = 2 pi i sfh.
//
// Everything at this order is a sum over the roots alpha of gl_n with scalar
// coefficients given by contour integrals of e^{-alpha(mu) w} dw / w:
//
//  * the twist coefficient for the upper (lower) family is
//        F(u) = -log z0 - Int_0^{z0} (e^{-uw} - 1) dw/w
//                       - Int_{z0}^{+-i oo} e^{-uw} dw/w,   z0 = +-i,
//    whose closed form is gamma_EM + log|u| (-+ i pi when u < 0);
//  * the quantum Stokes coefficients come from the difference of the two
//    regularized tails, i.e. a full vertical contour passing the origin on
//    the right (for S+) or on the left (for S-).
//
// The quadratures below evaluate these integrals directly -- the Euler
// constant and the residue 2 pi i must emerge from the numerics, they are
// never inserted by hand.

#include <cmath>
#include <functional>
#include <vector>

#include "lie.hpp"
#include "pbw.hpp"
#include "stokes.hpp"

namespace stokeslab {

namespace quadrature {

// Gauss-Legendre 20 point rule on [-1, 1]
inline void gl20(std::vector<double>& x, std::vector<double>& w) {
    static const double xs[10] = {
        0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
        0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
        0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
        0.9931285991850949};
    static const double ws[10] = {
        0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
        0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
        0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
        0.0176140071391521};
    for (int i = 0; i < 10; ++i) {
        x.push_back(-xs[i]);
        w.push_back(ws[i]);
        x.push_back(xs[i]);
        w.push_back(ws[i]);
    }
}

// composite rule for f over the straight segment [a, b]
template <class F>
cplx segment(F&& f, cplx a, cplx b, int panels) {
    std::vector<double> gx, gw;
    gl20(gx, gw);
    cplx acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        cplx pa = a + (b - a) * (double(p) / panels);
        cplx pb = a + (b - a) * (double(p + 1) / panels);
        cplx mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        for (size_t k = 0; k < gx.size(); ++k)
            acc += gw[k] * half * f(mid + half * gx[k]);
    }
    return acc;
}

// segment rule with one doubling step as a convergence guard
template <class F>
cplx segment_checked(F&& f, cplx a, cplx b, int panels, double tol = 1e-9) {
    cplx c1 = segment(f, a, b, panels);
    cplx c2 = segment(f, a, b, 2 * panels);
    if (std::abs(c1 - c2) > tol * (1.0 + std::abs(c2)))
        throw QuadratureFailure("contour quadrature did not converge");
    return c2;
}

}  // namespace quadrature

// ---------------------------------------------------------------------------

struct TwistQuadrature {
    double tail = 40.0;  // truncation of decaying tails, in units of 1/|u|
    int panels = 24;
    double check_tol = 1e-9;  // doubling-guard tolerance of the quadrature
};

namespace detail {

inline void require_real_regular_diag(const Mat& mu) {
    int n = (int)mu.rows();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i != j && std::abs(mu(i, j)) != 0.0)
                throw ValidationError("mu must be diagonal");
            if (i == j && std::abs(mu(i, i).imag()) > 0.0)
                throw ValidationError("mu must be real diagonal");
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (mu(i, i) == mu(j, j))
                throw NonRegularA("mu must be regular");
}

// twist coefficient for root value u on the family with base point
// z0 = family * i (family = +1 upper, -1 lower)
inline cplx twist_coefficient(double u, int family, const TwistQuadrature& q) {
    cplx z0 = cplx(0.0, double(family));
    double sg = u > 0 ? 1.0 : -1.0;
    // Int_0^{z0} (e^{-uw} - 1) dw / w  with  w = z0 t
    cplx leg1 = quadrature::segment_checked(
        [&](cplx t) { return (std::exp(-u * z0 * t) - 1.0) / t; }, cplx(1e-30),
        cplx(1.0), q.panels, q.check_tol);
    // tail from z0 to family * i oo, bent to the decaying horizontal
    // direction:  w = z0 + sg * tau / |u|
    double au = std::abs(u);
    cplx leg2 = quadrature::segment_checked(
        [&](cplx tau) {
            cplx w = z0 + sg * tau / au;
            return std::exp(-u * w) * (sg / au) / w;
        },
        cplx(0.0), cplx(q.tail), q.panels, q.check_tol);
    return -std::log(z0) - leg1 - leg2;
}

// Int e^{-uw} dw / w over the vertical contour from -i oo to +i oo passing
// the origin on the given side (+1 right, -1 left); tails are bent to the
// decaying horizontal direction
inline cplx crossing_integral(double u, int side, const TwistQuadrature& q) {
    double sg = u > 0 ? 1.0 : -1.0;
    double au = std::abs(u);
    auto f = [&](cplx w) { return std::exp(-u * w) / w; };
    cplx lo(0.0, -1.0), hi(0.0, 1.0), mid(double(side), 0.0);
    cplx tail = sg * q.tail / au;
    cplx acc = 0.0;
    acc += quadrature::segment_checked(f, lo + tail, lo, q.panels, q.check_tol);
    acc += quadrature::segment_checked(f, lo, mid, q.panels, q.check_tol);
    acc += quadrature::segment_checked(f, mid, hi, q.panels, q.check_tol);
    acc += quadrature::segment_checked(f, hi, hi + tail, q.panels, q.check_tol);
    return acc;
}

}  // namespace detail

// roots with positive value on mu (the chamber of mu)
inline std::vector<Root> positive_roots_for_chamber(const Mat& mu) {
    detail::require_real_regular_diag(mu);
    std::vector<Root> out;
    for (const Root& a : all_roots((int)mu.rows()))
        if ((mu(a.i, a.i) - mu(a.j, a.j)).real() > 0.0) out.push_back(a);
    return out;
}

// order-hbar coefficient of the twist J_{+-} = 1 + (hbar/2) j_{+-}, computed
// by quadrature of the profile integrals
inline Tensor2 dkz_twist_order1(const Mat& mu, int family,
                                const TwistQuadrature& q = {}) {
    detail::require_real_regular_diag(mu);
    int n = (int)mu.rows();
    Tensor2 j(n);
    for (const Root& a : all_roots(n)) {
        double u = (mu(a.i, a.i) - mu(a.j, a.j)).real();
        j = j + (detail::twist_coefficient(u, family, q) / (PI * IU)) *
                    omega_root(n, a);
    }
    return j;
}

// the closed form of the same coefficient:
//   j_{+-} = -+ Omega_- + (1/pi i) sum_{alpha(mu) > 0}
//                (log alpha(mu) + gamma_EM)(Omega_alpha + Omega_{-alpha})
inline Tensor2 closed_form_twist(const Mat& mu, int family) {
    detail::require_real_regular_diag(mu);
    int n = (int)mu.rows();
    Tensor2 j(n);
    for (const Root& a : positive_roots_for_chamber(mu)) {
        double u = (mu(a.i, a.i) - mu(a.j, a.j)).real();
        cplx c = (std::log(u) + EULER_GAMMA) / (PI * IU);
        j = j + c * (omega_root(n, a) + omega_root(n, Root{a.j, a.i}));
        j = j - double(family) * omega_root(n, Root{a.j, a.i});
    }
    return j;
}

// ---------------------------------------------------------------------------
// Quantum Stokes matrices at order hbar: S_{+-} = 1 + hbar s_{+-} + ...

struct QuantumStokes {
    Tensor2 s_plus;         // from the identities route (uses the twist)
    Tensor2 s_minus;
    Tensor2 s_plus_direct;  // from the crossing-contour route
    Tensor2 s_minus_direct;
};

inline QuantumStokes quantum_stokes_order1(const Mat& mu,
                                           const TwistQuadrature& q = {},
                                           double route_tol = 1e-6) {
    detail::require_real_regular_diag(mu);
    int n = (int)mu.rows();

    // route 1: R+ = (J+^{-1})^{21} e^{pi i sfh Omega} J+  and
    // R+ = e^{pi i sfh Omega0} S-^{-1} give, at order hbar,
    //   s- = Omega0/2 - Omega/2 - (j+ - j+^{21})/2,   s+ = s-^{21}
    Tensor2 jp = dkz_twist_order1(mu, +1, q);
    Tensor2 om = omega_full(n), om0 = omega_cartan(n);
    QuantumStokes out;
    out.s_minus = 0.5 * om0 - 0.5 * om - 0.5 * (jp - jp.swapped());
    out.s_plus = out.s_minus.swapped();

    // route 2: regularized solutions continued across the positive
    // (negative) axis differ by the crossing contour right (left) of 0
    out.s_plus_direct = Tensor2(n);
    out.s_minus_direct = Tensor2(n);
    for (const Root& a : all_roots(n)) {
        double u = (mu(a.i, a.i) - mu(a.j, a.j)).real();
        cplx right = detail::crossing_integral(u, +1, q);
        cplx left = detail::crossing_integral(u, -1, q);
        out.s_plus_direct =
            out.s_plus_direct - (right / (2.0 * PI * IU)) * omega_root(n, a);
        out.s_minus_direct =
            out.s_minus_direct + (left / (2.0 * PI * IU)) * omega_root(n, a);
    }

    if ((out.s_plus - out.s_plus_direct).norm() > route_tol ||
        (out.s_minus - out.s_minus_direct).norm() > route_tol)
        throw RouteMismatch("the two quantum Stokes routes disagree");
    return out;
}

// order-hbar coefficient of R+ = e^{pi i sfh Omega0} S-^{-1}; should equal
// the classical r-matrix Omega_+ + Omega0/2
inline Tensor2 rmatrix_order1(const QuantumStokes& qs) {
    int n = qs.s_minus.n();
    return 0.5 * omega_cartan(n) - qs.s_minus;
}

// order-hbar residual of  J+^{-1} e^{2 pi i sfh Omega} J+ =
// S+^{-1} e^{2 pi i sfh Omega0} S-^{-1}
inline double monodromy_identity_residual_order1(const Mat& mu,
                                                 const QuantumStokes& qs) {
    int n = (int)mu.rows();
    Tensor2 lhs = omega_full(n);  // conjugation only enters at hbar^2
    Tensor2 rhs = omega_cartan(n) - qs.s_plus - qs.s_minus;
    return (lhs - rhs).norm();
}

// ---------------------------------------------------------------------------
// Cocycle residual at order hbar:  (Delta (x) id)(j) + j_{12}  vs
// (id (x) Delta)(j) + j_{23}  on three legs (products only enter at hbar^2).

inline double twist_cocycle_residual(const pbw::Tensor& j, int cap = 4) {
    pbw::Tensor lhs = pbw::add(pbw::coproduct(j, 0, cap),
                               [&] {  // j (x) 1
                                   pbw::Tensor t = j;
                                   t.legs = 3;
                                   std::map<std::vector<pbw::Mono>, cplx> m;
                                   for (const auto& [k, c] : j.terms) {
                                       auto kk = k;
                                       kk.push_back({});
                                       m[kk] = c;
                                   }
                                   t.terms = std::move(m);
                                   return t;
                               }());
    pbw::Tensor rhs = pbw::add(pbw::coproduct(j, 1, cap),
                               [&] {  // 1 (x) j
                                   pbw::Tensor t = j;
                                   t.legs = 3;
                                   std::map<std::vector<pbw::Mono>, cplx> m;
                                   for (const auto& [k, c] : j.terms) {
                                       std::vector<pbw::Mono> kk;
                                       kk.push_back({});
                                       kk.insert(kk.end(), k.begin(), k.end());
                                       m[kk] = c;
                                   }
                                   t.terms = std::move(m);
                                   return t;
                               }());
    return pbw::sub(lhs, rhs).norm();
}

// ---------------------------------------------------------------------------
// Differential equation in mu at order hbar:
//   d_v j+ = (1/pi i) sum_{alpha(mu) > 0} (alpha(v)/alpha(mu))
//                                         (Omega_alpha + Omega_{-alpha})

inline double casimir_pde_residual_order1(const Mat& mu, const Mat& v,
                                          double fd_step = 1e-4,
                                          const TwistQuadrature& q = {}) {
    int n = (int)mu.rows();
    Tensor2 jp = dkz_twist_order1((mu + fd_step * v).eval(), +1, q);
    Tensor2 jm = dkz_twist_order1((mu - fd_step * v).eval(), +1, q);
    Tensor2 lhs = (1.0 / (2.0 * fd_step)) * (jp - jm);
    Tensor2 rhs(n);
    for (const Root& a : positive_roots_for_chamber(mu)) {
        double u = (mu(a.i, a.i) - mu(a.j, a.j)).real();
        double uv = (v(a.i, a.i) - v(a.j, a.j)).real();
        rhs = rhs + (uv / u / (PI * IU)) *
                        (omega_root(n, a) + omega_root(n, Root{a.j, a.i}));
    }
    return (lhs - rhs).norm();
}

// ---------------------------------------------------------------------------
// Semiclassical extraction.  A two-leg series 1 + hbar sum u_k (x) x_k with
// x_k in g maps, for a linear functional lambda = tr(L .), to the matrix
// 1 + sum rep(u_k) tr(L x_k); order-hbar terms whose second leg is scalar
// are discarded by the definition of the limit.

inline Mat generator_matrix(int n, const pbw::Mono& m) {
    Mat out = Mat::Identity(n, n);
    for (int id : m) out = (out * unit_matrix(n, id / n, id % n)).eval();
    return out;
}

inline Mat scl_extract(const pbw::Series& s, const Mat& L) {
    if (s.legs != 2 || s.order() < 1)
        throw PatternViolation("need a two-leg series of order >= 1");
    int n = s.n;
    // order hbar^0 must be scalar
    for (const auto& [k, c] : s.c[0].terms)
        if (!k[0].empty() || !k[1].empty())
            throw PatternViolation("constant term is not scalar");
    Mat out = Mat::Identity(n, n);
    cplx c0 = s.c[0].terms.empty() ? cplx(0.0) : s.c[0].terms.begin()->second;
    out *= c0;
    for (const auto& [k, c] : s.c[1].terms) {
        if ((int)k[1].size() > 1)
            throw PatternViolation(
                "order-hbar term leaves g in the second leg");
        if (k[1].empty()) continue;  // killed by the limit
        int id = k[1][0];
        cplx lam = L(id % n, id / n);  // tr(L E_{id/n, id%n})
        out += c * lam * generator_matrix(n, k[0]);
    }
    return out;
}

inline pbw::Series order1_series(const Tensor2& coeff) {
    pbw::Series s = pbw::Series::zero(coeff.n(), 2, 1);
    s.c[0] = pbw::Tensor::one(coeff.n(), 2);
    s.c[1] = pbw::from_tensor2(coeff);
    return s;
}

// ---------------------------------------------------------------------------
// Cross-checks against the classical transport engine with A = -mu.

struct SclCheckConfig {
    double fd_step = 1e-3;
    double ray = -PI / 2;
    double cut = PI;
    IntegratorConfig ode = {};
};

// max over directions of the relative gap between the linearization of the
// classical S+ at B = 0 along nu_check(lambda) and (id (x) lambda)(s+)
inline double scl_stokes_residual(const Mat& mu, const Tensor2& s_plus,
                                  const std::vector<Mat>& lambdas,
                                  const SclCheckConfig& cfg = {}) {
    Mat A = (-mu).eval();
    double worst = 0.0;
    for (const Mat& L : lambdas) {
        Mat pred = s_plus.contract_second(L);
        auto splus_at = [&](double t) {
            Connection c{A, (t * nu_check(L)).eval(), cfg.ray, cfg.cut};
            StokesEngine<double> eng(c, cfg.ode);
            return eng.stokes_plus();
        };
        Mat fd = (splus_at(cfg.fd_step) - splus_at(-cfg.fd_step)) /
                 (2.0 * cfg.fd_step);
        double scale = std::max(1.0, pred.norm());
        worst = std::max(worst, (fd - pred).norm() / scale);
    }
    return worst;
}

// same comparison for the twist against the classical connection matrix:
// scl(J+)(lambda) should match the linearization of C_-(nu_check(lambda))^{-1}
inline double scl_twist_residual(const Mat& mu, const Tensor2& j_plus,
                                 const std::vector<Mat>& lambdas,
                                 const SclCheckConfig& cfg = {}) {
    Mat A = (-mu).eval();
    double worst = 0.0;
    for (const Mat& L : lambdas) {
        Mat pred = 0.5 * j_plus.contract_second(L);
        auto cinv_at = [&](double t) {
            Connection c{A, (t * nu_check(L)).eval(), cfg.ray, cfg.cut};
            StokesEngine<double> eng(c, cfg.ode);
            return eng.connection_matrix().inverse().eval();
        };
        Mat fd = (cinv_at(cfg.fd_step) - cinv_at(-cfg.fd_step)) /
                 (2.0 * cfg.fd_step);
        double scale = std::max(1.0, pred.norm());
        worst = std::max(worst, (fd - pred).norm() / scale);
    }
    return worst;
}

}  // namespace stokeslab
