#pragma once

// Poisson structures on both sides of the Stokes map:
//  - Kirillov-Kostant-Souriau bracket on g* (matrices via the trace form),
//    {f,g}(L) = tr([d_L f, d_L g] L) on polynomial observables;
//  - quasitriangular bracket on the dual group in the coordinates (b+, b-),
//    {b (x) b'} = kappa [r, b (x) b'] extended by Leibniz, with one global
//    calibration scale kappa;
//  - finite-difference pushforward of KKS through sigma = (Stokes map) o nu_v
//    and the residual comparing the two, which is the numerical form of the
//    Poisson-map theorem.

#include <utility>
#include <vector>

#include "poly.hpp"
#include "stokes.hpp"

namespace stokeslab {

// ---------------------------------------------------------------------------
// Observables on g*: polynomials in the entries of L, id = i*n + j.

inline int l_var(int n, int i, int j) { return i * n + j; }

// f_X(L) = tr(L X)
inline Poly linear_observable(const Mat& X) {
    int n = (int)X.rows();
    Poly f;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (X(j, i) != cplx(0.0))
                f = f + X(j, i) * Poly::variable(l_var(n, i, j));
    return f;
}

// gradient as a matrix through the trace pairing: (df)_{ij} = d f / d L_{ji}
inline Mat kks_gradient(const Poly& f, const Mat& L, int n) {
    Mat g = Mat::Zero(n, n);
    auto look = [&](int id) { return L(id / n, id % n); };
    for (int id : f.support())
        g(id % n, id / n) = f.derivative(id).eval(look);
    return g;
}

inline cplx kks_bracket(const Poly& f, const Poly& g, const Mat& L) {
    int n = (int)L.rows();
    Mat df = kks_gradient(f, L, n), dg = kks_gradient(g, L, n);
    return ((df * dg - dg * df) * L).trace();
}

// ---------------------------------------------------------------------------
// Observables on the dual group.  Variable ids: b+ entries first, then b-.

inline int bplus_var(int n, int i, int j) { return i * n + j; }
inline int bminus_var(int n, int i, int j) { return n * n + i * n + j; }

template <class Pair>
cplx eval_dual(const Poly& F, const Pair& pt) {
    int n = (int)pt.b_plus.rows();
    return F.eval([&](int id) {
        int f = id / (n * n), r = id % (n * n);
        return f == 0 ? pt.b_plus(r / n, r % n) : pt.b_minus(r / n, r % n);
    });
}

// Quasitriangular coordinate brackets.  The table entry for a pair of
// coordinate functions is itself a quadratic polynomial, so nested brackets
// (Jacobi) stay symbolic.
class DualBracket {
public:
    DualBracket(int n, const std::vector<Root>& positive, cplx kappa = 1.0,
                cplx r_scale = 1.0)
        : n_(n), kappa_(kappa), r_(standard_r(n, positive) * r_scale) {
        table_[0] = build(0, 0);
        table_[1] = build(1, 1);
        table_[2] = build(0, 1);
    }

    cplx kappa() const { return kappa_; }

    // {coordinate(f1,i,j), coordinate(f2,k,l)} without the kappa factor
    const Poly& coord_bracket(int f1, int i, int j, int f2, int k, int l) const {
        if (f1 == 0 && f2 == 0) return table_[0][idx(i, k, j, l)];
        if (f1 == 1 && f2 == 1) return table_[1][idx(i, k, j, l)];
        if (f1 == 0 && f2 == 1) return table_[2][idx(i, k, j, l)];
        return flipped_[idx(k, i, l, j)];  // {b-, b+} = -{b+, b-} swapped
    }

    Poly bracket(const Poly& F, const Poly& G) const {
        Poly out;
        for (int u : F.support()) {
            Poly Fu = F.derivative(u);
            for (int v : G.support()) {
                Poly Gv = G.derivative(v);
                const Poly& c = coord_bracket(u / (n_ * n_), (u % (n_ * n_)) / n_,
                                              u % n_, v / (n_ * n_),
                                              (v % (n_ * n_)) / n_, v % n_);
                if (!c.is_zero()) out = out + Fu * Gv * c;
            }
        }
        return out * kappa_;
    }

    template <class Pair>
    cplx eval(const Poly& F, const Poly& G, const Pair& pt) const {
        return eval_dual(bracket(F, G), pt);
    }

private:
    int idx(int i, int k, int j, int l) const {
        return (i * n_ + k) * n_ * n_ + (j * n_ + l);
    }

    std::vector<Poly> build(int f1, int f2) {
        int N = n_ * n_;
        auto var = [&](int fam, int i, int j) {
            return Poly::variable(fam == 0 ? bplus_var(n_, i, j)
                                           : bminus_var(n_, i, j));
        };
        // polynomial matrix b_{f1} (x) b_{f2} in Kronecker layout
        std::vector<Poly> kron(N * N);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int l = 0; l < n_; ++l)
                        kron[(i * n_ + k) * N + (j * n_ + l)] =
                            var(f1, i, j) * var(f2, k, l);
        const Mat& R = r_.rep();
        std::vector<Poly> out(N * N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) {
                Poly s;
                for (int c = 0; c < N; ++c) {
                    if (R(a, c) != cplx(0.0)) s = s + R(a, c) * kron[c * N + b];
                    if (R(c, b) != cplx(0.0)) s = s - kron[a * N + c] * R(c, b);
                }
                out[a * N + b] = s;
            }
        if (f1 == 0 && f2 == 1) {
            flipped_.resize(N * N);
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b)
                    flipped_[a * N + b] = Poly() - out[a * N + b];
        }
        return out;
    }

    int n_;
    cplx kappa_;
    Tensor2 r_;
    std::vector<Poly> table_[3];
    std::vector<Poly> flipped_;
};

// ---------------------------------------------------------------------------
// sigma = (Stokes map) o nu_v, its finite-difference differential, and the
// pushforward of KKS through it.

struct SigmaConfig {
    Mat A;  // diagonal, in the negative chamber for the Poisson-map theorem
    double ray = -PI / 2;
    double cut = PI;
    IntegratorConfig ode;
    double fd_step = 1e-3;
};

using DualPoint = StokesEngine<double>::DualPair;

inline DualPoint sigma_point(const SigmaConfig& sc, const Mat& lambda) {
    Connection c{sc.A, nu_check(lambda), sc.ray, sc.cut};
    StokesEngine<double> eng(c, sc.ode);
    return eng.stokes_map();
}

struct SigmaDifferential {
    int n;
    DualPoint base;
    std::vector<DualPoint> d;  // d sigma / d lambda_{pq}, index p*n + q
};

// central differences with one Richardson level; real steps suffice since
// sigma is holomorphic in the entries of lambda
inline SigmaDifferential sigma_differential(const SigmaConfig& sc, const Mat& lambda) {
    int n = (int)lambda.rows();
    SigmaDifferential out{n, sigma_point(sc, lambda), {}};
    double h = sc.fd_step;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            auto diff = [&](double step) {
                Mat lp = lambda, lm = lambda;
                lp(p, q) += step;
                lm(p, q) -= step;
                DualPoint a = sigma_point(sc, lp), b = sigma_point(sc, lm);
                return DualPoint{(a.b_plus - b.b_plus) / (2.0 * step),
                                 (a.b_minus - b.b_minus) / (2.0 * step)};
            };
            DualPoint dh = diff(h), dh2 = diff(h / 2);
            out.d.push_back({(4.0 * dh2.b_plus - dh.b_plus) / 3.0,
                             (4.0 * dh2.b_minus - dh.b_minus) / 3.0});
        }
    return out;
}

// d_lambda (F o sigma) as a matrix through the trace pairing
inline Mat pullback_gradient(const Poly& F, const SigmaDifferential& J) {
    int n = J.n;
    Mat g = Mat::Zero(n, n);
    for (int u : F.support()) {
        cplx fu = F.derivative(u).eval([&](int id) {
            int f = id / (n * n), r = id % (n * n);
            return f == 0 ? J.base.b_plus(r / n, r % n)
                          : J.base.b_minus(r / n, r % n);
        });
        if (fu == cplx(0.0)) continue;
        int fam = u / (n * n), i = (u % (n * n)) / n, j = u % n;
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                const DualPoint& dpq = J.d[p * n + q];
                cplx dcoord = fam == 0 ? dpq.b_plus(i, j) : dpq.b_minus(i, j);
                g(q, p) += fu * dcoord;  // (dF)_{qp} = dF/d lambda_{pq}
            }
    }
    return g;
}

inline cplx pushforward_kks(const Poly& F, const Poly& G,
                            const SigmaDifferential& J, const Mat& lambda) {
    Mat df = pullback_gradient(F, J), dg = pullback_gradient(G, J);
    return ((df * dg - dg * df) * lambda).trace();
}

// ---------------------------------------------------------------------------
// Calibration of kappa and the Poisson-map residual.

struct Calibration {
    cplx kappa;
    double spread;        // max relative deviation of per-cell ratios
    double fit_residual;  // rms of |lhs - kappa rhs| over the grid
};

inline Calibration calibrate_kappa(
    const SigmaConfig& sc, const DualBracket& db,
    const std::vector<Mat>& lambdas,
    const std::vector<std::pair<Poly, Poly>>& pairs,
    double spread_tol = 1e-3) {
    std::vector<cplx> lhs, rhs;
    for (const Mat& lam : lambdas) {
        SigmaDifferential J = sigma_differential(sc, lam);
        for (const auto& [F, G] : pairs) {
            lhs.push_back(pushforward_kks(F, G, J, lam));
            rhs.push_back(db.eval(F, G, J.base) / db.kappa());
        }
    }
    cplx num = 0.0;
    double den = 0.0, rmax = 0.0;
    for (size_t k = 0; k < lhs.size(); ++k) {
        num += lhs[k] * std::conj(rhs[k]);
        den += std::norm(rhs[k]);
        rmax = std::max(rmax, std::abs(rhs[k]));
    }
    if (den == 0.0) throw NoConsistentScale("all dual brackets vanish on the grid");
    Calibration out{num / den, 0.0, 0.0};
    double rss = 0.0;
    for (size_t k = 0; k < lhs.size(); ++k) {
        rss += std::norm(lhs[k] - out.kappa * rhs[k]);
        if (std::abs(rhs[k]) > 1e-2 * rmax)
            out.spread = std::max(out.spread,
                                  std::abs(lhs[k] / rhs[k] - out.kappa) /
                                      std::abs(out.kappa));
    }
    out.fit_residual = std::sqrt(rss / lhs.size());
    if (out.spread > spread_tol)
        throw NoConsistentScale("per-cell scale ratios disagree");
    return out;
}

inline double poisson_map_residual(
    const SigmaConfig& sc, const DualBracket& db,
    const std::vector<Mat>& lambdas,
    const std::vector<std::pair<Poly, Poly>>& pairs) {
    double worst = 0.0, scale = 0.0;
    std::vector<cplx> l, r;
    for (const Mat& lam : lambdas) {
        SigmaDifferential J = sigma_differential(sc, lam);
        for (const auto& [F, G] : pairs) {
            l.push_back(pushforward_kks(F, G, J, lam));
            r.push_back(db.eval(F, G, J.base));
            scale = std::max({scale, std::abs(l.back()), std::abs(r.back())});
        }
    }
    for (size_t k = 0; k < l.size(); ++k)
        worst = std::max(worst, std::abs(l[k] - r[k]) / std::max(scale, 1e-12));
    return worst;
}

// first-order Taylor coefficient of beta o sigma at 0 against nu(lambda)
inline double linearization_residual(const SigmaConfig& sc,
                                     const std::vector<Mat>& directions,
                                     double t = 1e-3) {
    double worst = 0.0;
    for (const Mat& lam : directions) {
        DualPoint p = sigma_point(sc, (t * lam).eval());
        DualPoint m = sigma_point(sc, (-t * lam).eval());
        Mat beta_p = p.b_plus * p.b_minus.inverse();
        Mat beta_m = m.b_plus * m.b_minus.inverse();
        Mat d = (beta_p - beta_m) / (2.0 * t);
        Mat nu = nu_map(lam);
        worst = std::max(worst, (d - nu).norm() / std::max(1.0, nu.norm()));
    }
    return worst;
}

}  // namespace stokeslab
