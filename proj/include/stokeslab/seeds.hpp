#pragma once

// Formal-series seeds for the two singular points of
//   d gamma / dz = (A / z^2 + B / z) gamma.
//
// At z = 0 the normalized solution is gamma = hhat(z) e^{-A/z} z^{[B]} with
// hhat = 1 + sum h_k z^k a divergent (Gevrey) series; we truncate at the
// optimal order and seed the transport at a small modulus chosen from the
// truncation rule.  At z = infinity gamma_inf = ghat(z) z^B with ghat
// holomorphic at infinity, so that series converges for large |z|.

#include <limits>
#include <vector>

#include "ode.hpp"
#include "lie.hpp"

namespace stokeslab {

template <class Real>
struct IrregularSeed {
    std::vector<CMat<Real>> h;  // h[0] = I

    CMat<Real> eval(std::complex<Real> z0, int order) const {
        CMat<Real> s = h[0];
        std::complex<Real> p(1, 0);
        for (int k = 1; k <= order; ++k) {
            p *= z0;
            s += h[k] * p;
        }
        return s;
    }

    struct Choice {
        int order;
        Real rho0;
        Real err;  // truncation error times outward amplification
    };

    // Truncation rule.  Outward transport from rho0 amplifies any seed-level
    // error (series truncation, but also the arithmetic floor injected along
    // the transport) by up to e^{amp/rho0}, where amp is the largest growth
    // rate max_alpha Re(alpha(A) e^{-i theta}) on the seeding direction.
    // Minimize (|h_{k+1}| r^{k+1} + floor) e^{amp/r} over order and radius;
    // among near-optimal pairs prefer the largest radius (cheapest path).
    Choice choose(Real amp, Real floor_eps, Real cap = Real(0.3)) const {
        auto err_at = [&](int k, Real r) {
            return (h[k + 1].norm() * std::pow(r, Real(k + 1)) + floor_eps) *
                   std::exp(amp / r);
        };
        Real best_err = std::numeric_limits<Real>::max();
        for (int k = 1; k + 1 < (int)h.size(); ++k) {
            if (h[k + 1].norm() == Real(0)) return {k, cap, floor_eps};
            for (int i = 0; i <= 120; ++i) {
                Real r = Real(1e-3) * std::pow(cap / Real(1e-3), Real(i) / Real(120));
                best_err = std::min(best_err, err_at(k, r));
            }
        }
        // among near-optimal pairs take the largest radius (cheapest path)
        Choice best{1, Real(0), best_err};
        for (int k = 1; k + 1 < (int)h.size(); ++k)
            for (int i = 0; i <= 120; ++i) {
                Real r = Real(1e-3) * std::pow(cap / Real(1e-3), Real(i) / Real(120));
                if (r > best.rho0 && err_at(k, r) <= Real(2) * best_err)
                    best = {k, r, err_at(k, r)};
            }
        if (best.rho0 < Real(2e-4))
            throw SeedDivergence("irregular seed radius collapsed");
        return best;
    }
};

// Recursion: [A, h_k] = (k-1) h_{k-1} + h_{k-1}[B] - B h_{k-1}, with the
// diagonal fixed by (h_k)_ii = (1/k) sum_{j != i} B_ij (h_k)_ji.
template <class Real>
IrregularSeed<Real> seed_irregular(const CMat<Real>& A, const CMat<Real>& B,
                                   int m_max = 80) {
    using C = std::complex<Real>;
    int n = (int)A.rows();
    CMat<Real> Bd = CMat<Real>::Zero(n, n);
    for (int i = 0; i < n; ++i) Bd(i, i) = B(i, i);

    IrregularSeed<Real> seed;
    seed.h.push_back(CMat<Real>::Identity(n, n));
    for (int k = 1; k <= m_max; ++k) {
        const CMat<Real>& p = seed.h[k - 1];
        CMat<Real> rhs = Real(k - 1) * p + p * Bd - B * p;
        CMat<Real> hk = CMat<Real>::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) hk(i, j) = rhs(i, j) / (A(i, i) - A(j, j));
        for (int i = 0; i < n; ++i) {
            C d = 0;
            for (int j = 0; j < n; ++j)
                if (j != i) d += B(i, j) * hk(j, i);
            hk(i, i) = d / Real(k);
        }
        seed.h.push_back(hk);
        if (!hk.allFinite())
            throw SeedDivergence("irregular seed coefficients overflowed");
    }
    return seed;
}

template <class Real>
struct InfinitySeed {
    std::vector<CMat<Real>> g;  // g[0] = I, coefficients of z^{-k}
    Real radius;                // seed at |z| = radius
    Real err_est;

    CMat<Real> eval(std::complex<Real> z0) const {
        CMat<Real> s = g[0];
        std::complex<Real> p(1, 0);
        for (size_t k = 1; k < g.size(); ++k) {
            p /= z0;
            s += g[k] * p;
        }
        return s;
    }
};

// Non-resonance: no two eigenvalues of B may differ by a nonzero integer.
inline void require_nonresonant(const Mat& B, double tol = 1e-9) {
    Eigen::ComplexEigenSolver<Mat> es(B);
    const Vec& ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i)
        for (int j = 0; j < ev.size(); ++j) {
            if (i == j) continue;
            cplx d = ev(i) - ev(j);
            double r = std::round(d.real());
            if (r != 0.0 && std::abs(d - cplx(r, 0)) < tol)
                throw ResonantB("eigenvalues of B differ by a nonzero integer");
        }
}

// Recursion: (ad B + k) g_k = -A g_{k-1}, solved as an n^2 linear system.
template <class Real>
InfinitySeed<Real> seed_regular_infinity(const CMat<Real>& A, const CMat<Real>& B,
                                         int m_max = 32, Real tol = Real(1e-15)) {
    int n = (int)A.rows();
    {
        Mat Bd(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                Bd(i, j) = cplx((double)B(i, j).real(), (double)B(i, j).imag());
        require_nonresonant(Bd);
    }
    CMat<Real> idn = CMat<Real>::Identity(n, n);
    CMat<Real> adB = Eigen::kroneckerProduct(idn, B).eval()
                   - Eigen::kroneckerProduct(B.transpose(), idn).eval();

    InfinitySeed<Real> seed;
    seed.g.push_back(idn);
    Real rad_conv = 0;
    for (int k = 1; k <= m_max; ++k) {
        CMat<Real> rhs_m = (-A * seed.g[k - 1]).eval();
        Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> rhs(n * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) rhs(j * n + i) = rhs_m(i, j);
        CMat<Real> M = adB + Real(k) * CMat<Real>::Identity(n * n, n * n);
        Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> sol =
            M.partialPivLu().solve(rhs);
        CMat<Real> gk(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) gk(i, j) = sol(j * n + i);
        seed.g.push_back(gk);
        rad_conv = std::max(rad_conv, std::pow(gk.norm(), Real(1) / Real(k)));
    }
    // seed radius: comfortably outside the convergence-limiting scale and
    // large enough that the last kept term is negligible
    Real R = std::max(Real(2) * rad_conv, Real(2));
    for (int k = m_max - 4; k <= m_max; ++k) {
        Real nk = seed.g[k].norm();
        if (nk > Real(0)) R = std::max(R, std::pow(nk / tol, Real(1) / Real(k)));
    }
    seed.radius = R;
    seed.err_est = seed.g[m_max].norm() * std::pow(R, -Real(m_max));
    return seed;
}

}  // namespace stokeslab
