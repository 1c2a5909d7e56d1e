#pragma once

// Canonical solutions, Stokes matrices, factorization and the monodromy
// identity for d gamma/dz = (A/z^2 + B/z) gamma.
//
// All transports run in the "h-gauge" gamma = h(z) e^{-A/z} z^{[B]} (resp.
// g-gauge g(z) z^B near infinity), which keeps the integrated quantity of
// moderate size on every path leg.  Determinations of log z are fixed per
// seed by reducing the seed angle into (cut - 2*pi, cut]; transported
// solutions carry their continuous argument, so the e^{2*pi*i*[B]} cut
// factors fall out of argument bookkeeping alone.

#include <optional>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "seeds.hpp"

namespace stokeslab {

struct Connection {
    Mat A;            // diagonal, regular
    Mat B;
    double ray = -PI / 2;
    double cut = PI;

    void validate() const {
        require_regular(A);
        if (!ray_admissible(A, ray))
            throw NonAdmissibleRay("chosen ray is a Stokes ray");
        double c = reduce_angle(cut, ray + 2.0 * PI);
        if (c <= ray + PI + 1e-12)
            throw ValidationError("cut must lie in the sector from -ray to ray");
    }
};

template <class Real>
class StokesEngine {
public:
    using C = std::complex<Real>;
    using M = CMat<Real>;

    StokesEngine(Connection conn, IntegratorConfig cfg = {},
                 double match_radius = 0.0)
        : conn_(std::move(conn)), cfg_(cfg) {
        conn_.validate();
        n_ = (int)conn_.A.rows();
        A_ = cast(conn_.A);
        B_ = cast(conn_.B);
        Bd_ = M::Zero(n_, n_);
        for (int i = 0; i < n_; ++i) Bd_(i, i) = B_(i, i);
        seed_ = seed_irregular<Real>(A_, B_);
        if (match_radius > 0) {
            rho_m_ = Real(match_radius);
        } else {
            double amax = 0;
            for (const Root& a : all_roots(n_))
                amax = std::max(amax, std::abs(root_value(a, conn_.A)));
            rho_m_ = Real(std::max(1.0, 0.5 * amax));
        }
    }

    const Connection& connection() const { return conn_; }
    int n() const { return n_; }
    Real match_radius() const { return rho_m_; }

    // largest outward-amplification rate on the direction theta
    double amp_rate(double theta) const {
        double a = 0;
        for (const Root& al : all_roots(n_)) {
            cplx v = root_value(al, conn_.A) * std::polar(1.0, -theta);
            a = std::max(a, v.real());
        }
        return a;
    }

    // h-part of the canonical solution attached to the admissible direction
    // seed_arg (continuous argument), transported to (rho, arg).  By local
    // constancy in the ray, the series is seeded on the direction of the
    // ambient Stokes-ray gap that minimizes the amplification of the
    // truncation error along the outward transport.
    M canonical_h(double seed_arg, Real rho, Real arg) const {
        auto rhs = [this](C z, const M& h) -> M {
            C iz = C(1, 0) / z, iz2 = iz * iz;
            M out = iz2 * (A_ * h - h * A_) + iz * (B_ * h - h * Bd_);
            return out;
        };
        // Stokes-ray gap around seed_arg, in continuous angles
        double lo = seed_arg - 2.0 * PI, hi = seed_arg + 2.0 * PI;
        for (double base : stokes_ray_angles(conn_.A))
            for (int k = -2; k <= 2; ++k) {
                double t = base + 2.0 * PI * k;
                if (t < seed_arg) lo = std::max(lo, t);
                if (t > seed_arg) hi = std::min(hi, t);
            }
        double th_star = seed_arg, best_amp = amp_rate(seed_arg);
        for (int i = 1; i < 40; ++i) {
            double t = lo + (hi - lo) * (0.025 + 0.95 * i / 40.0);
            double a = amp_rate(t);
            if (a < best_amp) {
                best_amp = a;
                th_star = t;
            }
        }
        Real floor = Real(30) * (std::numeric_limits<Real>::epsilon() + Real(cfg_.rel_tol));
        auto choice = seed_.choose(Real(best_amp), floor);
        M h = seed_.eval(std::polar(choice.rho0, Real(th_star)), choice.order);
        PathPointT<Real> p0{choice.rho0, Real(th_star)};
        PathPointT<Real> p1{rho, Real(th_star)};
        PathPointT<Real> p2{rho, arg};
        transport_leg<Real>(rhs, h, p0, p1, cfg_);
        if (arg != Real(th_star)) transport_leg<Real>(rhs, h, p1, p2, cfg_);
        return h;
    }

    // e^{-A/z} z^{[B]} at continuous argument
    M diag_factor(Real rho, Real arg) const {
        M d = M::Zero(n_, n_);
        C z = std::polar(rho, arg);
        C lz(std::log(rho), arg);
        for (int i = 0; i < n_; ++i)
            d(i, i) = std::exp(-A_(i, i) / z + B_(i, i) * lz);
        return d;
    }

    // full canonical solution gamma_{theta_ray} at a path point; the point's
    // continuous argument selects the analytic continuation
    M canonical_solution(double theta_ray, PathPointT<Real> z) const {
        if (!ray_admissible(conn_.A, theta_ray))
            throw NonAdmissibleRay("canonical solution needs an admissible ray");
        double a0 = reduce_angle(theta_ray, conn_.cut);
        M h = canonical_h(a0, z.modulus, z.arg);
        return h * diag_factor(z.modulus, z.arg);
    }

    struct Transition {
        Mat S;
        int eps;  // number of cut crossings in the sweep
    };

    // S with gamma~_{from} = gamma_{to} . S . e^{2 pi i [B] eps}, where
    // gamma~ is continued anti-clockwise from its principal seed.
    Transition transition(double th_from, double th_to) const {
        if (th_to <= th_from || th_to - th_from > 2.0 * PI + 1e-12)
            throw ValidationError("transition sweep must be in (0, 2*pi]");
        if (!ray_admissible(conn_.A, th_from) || !ray_admissible(conn_.A, th_to))
            throw NonAdmissibleRay("transition endpoints must be admissible");
        if (angle_close(th_from, conn_.cut, 1e-10) || angle_close(th_to, conn_.cut, 1e-10))
            throw CutHandling("sweep endpoint coincides with the log cut");
        double a_from = reduce_angle(th_from, conn_.cut);
        double a_to = reduce_angle(th_to, conn_.cut);
        double a_cont = a_from + (th_to - th_from);
        int eps = (int)std::lround((a_cont - a_to) / (2.0 * PI));
        M h1 = canonical_h(a_from, rho_m_, Real(a_cont));
        M h2 = canonical_h(a_to, rho_m_, Real(a_to));
        M d = diag_factor(rho_m_, Real(a_to));
        M s = d.inverse() * (h2.inverse() * h1) * d;
        return {demote(s), eps};
    }

    // compose (S2,eps2) after (S1,eps1):
    // T = S2 e^{2 pi i [B] eps2} S1 e^{-2 pi i [B] eps2}, eps = eps1 + eps2
    Transition compose(const Transition& t2, const Transition& t1) const {
        Mat e = cut_factor(t2.eps);
        return {t2.S * e * t1.S * e.inverse(), t1.eps + t2.eps};
    }

    Mat cut_factor(int eps = 1) const {  // e^{2 pi i [B] eps}
        Mat e = Mat::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
            e(i, i) = std::exp(2.0 * PI * IU * conn_.B(i, i) * (double)eps);
        return e;
    }

    Mat stokes_plus() const { return transition(conn_.ray, conn_.ray + PI).S; }

    Mat stokes_minus() const {
        Transition t = transition(conn_.ray + PI, conn_.ray + 2.0 * PI);
        if (t.eps != 1)
            throw ValidationError("clockwise-sector sweep must cross the cut once");
        return t.S;
    }

    // connection matrix C with gamma_inf = gamma_ray . C
    Mat connection_matrix() const {
        if (!inf_seed_) inf_seed_ = seed_regular_infinity<Real>(A_, B_);
        auto rhs = [this](C z, const M& g) -> M {
            C iz = C(1, 0) / z;
            M out = (iz * iz) * (A_ * g) + iz * (B_ * g - g * B_);
            return out;
        };
        double a0 = reduce_angle(conn_.ray, conn_.cut);
        Real R = inf_seed_->radius;
        M g = inf_seed_->eval(std::polar(R, Real(a0)));
        transport_leg<Real>(rhs, g, {R, Real(a0)}, {rho_m_, Real(a0)}, cfg_);
        M h = canonical_h(a0, rho_m_, Real(a0));
        M d = diag_factor(rho_m_, Real(a0));
        Mat zB = (conn_.B * cplx(std::log((double)rho_m_), a0)).exp();
        return demote((d.inverse() * (h.inverse() * g)).eval()) * zB;
    }

    // || C e^{2 pi i B} C^{-1} - S_- e^{2 pi i [B]} S_+ || / || lhs ||
    double monodromy_residual() const {
        Mat Cm = connection_matrix();
        Mat lhs = Cm * (2.0 * PI * IU * conn_.B).exp() * Cm.inverse();
        Mat rhs = stokes_minus() * cut_factor() * stokes_plus();
        return (lhs - rhs).norm() / lhs.norm();
    }

    struct Factor {
        double ray_angle;
        Mat S;
        int eps;
    };

    // one unipotent factor per Stokes ray crossed sweeping th_from -> th_to.
    // The decomposition refuses a cut sitting on a crossed Stokes ray: the
    // position of the e^{2 pi i [B]} insertion would need an edge convention.
    std::vector<Factor> factors(double th_from, double th_to) const {
        std::vector<double> crossed;
        for (double base : stokes_ray_angles(conn_.A))
            for (int k = -3; k <= 3; ++k) {
                double t = base + 2.0 * PI * k;
                if (t > th_from + 1e-10 && t < th_to - 1e-10) crossed.push_back(t);
            }
        std::sort(crossed.begin(), crossed.end());
        for (double t : crossed)
            if (angle_close(t, conn_.cut, 1e-10))
                throw CutOnStokesRay("log cut lies on a crossed Stokes ray");
        std::vector<double> mids;
        mids.push_back(th_from);
        for (size_t i = 0; i + 1 < crossed.size(); ++i)
            mids.push_back(0.5 * (crossed[i] + crossed[i + 1]));
        mids.push_back(th_to);
        std::vector<Factor> out;
        for (size_t i = 0; i < crossed.size(); ++i) {
            Transition t = transition(mids[i], mids[i + 1]);
            out.push_back({crossed[i], t.S, t.eps});
        }
        return out;
    }

    Transition product_of_factors(const std::vector<Factor>& fs) const {
        Transition acc{Mat::Identity(n_, n_), 0};
        for (const Factor& f : fs) acc = compose({f.S, f.eps}, acc);
        return acc;
    }

    struct DualPair {
        Mat b_plus;   // S_+^{-1} e^{-i pi [B]}
        Mat b_minus;  // S_-  e^{+i pi [B]}
    };

    DualPair stokes_map() const {
        Mat e = Mat::Zero(n_, n_);
        for (int i = 0; i < n_; ++i) e(i, i) = std::exp(IU * PI * conn_.B(i, i));
        return {stokes_plus().inverse() * e.inverse(), stokes_minus() * e};
    }

    // beta(b+, b-) = b+ b-^{-1} should equal C e^{-2 pi i B} C^{-1}
    double big_cell_residual() const {
        DualPair p = stokes_map();
        Mat beta = p.b_plus * p.b_minus.inverse();
        Mat Cm = connection_matrix();
        Mat target = Cm * (-2.0 * PI * IU * conn_.B).exp() * Cm.inverse();
        return (beta - target).norm() / target.norm();
    }

private:
    M cast(const Mat& x) const {
        M y(x.rows(), x.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                y(i, j) = C(Real(x(i, j).real()), Real(x(i, j).imag()));
        return y;
    }
    static Mat demote(const M& x) {
        Mat y(x.rows(), x.cols());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j)
                y(i, j) = cplx((double)x(i, j).real(), (double)x(i, j).imag());
        return y;
    }

    Connection conn_;
    IntegratorConfig cfg_;
    int n_;
    M A_, B_, Bd_;
    IrregularSeed<Real> seed_;
    mutable std::optional<InfinitySeed<Real>> inf_seed_;
    Real rho_m_;
};

// deviation of S from "identity plus allowed root spaces"
inline double pattern_residual(const Mat& S, const std::vector<Root>& allowed) {
    int n = (int)S.rows();
    Mat d = S - Mat::Identity(n, n);
    for (const Root& a : allowed) d(a.i, a.j) = 0.0;
    return d.norm();
}

}  // namespace stokeslab
