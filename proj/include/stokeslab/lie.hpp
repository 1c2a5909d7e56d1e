#pragma once

// Root data, chambers and Casimir-type tensors for gl_n / sl_n with the
// trace form.  Tensors in g (x) g are stored through the faithful action on
// C^n (x) C^n, i.e. as n^2 x n^2 matrices in Kronecker layout:
//   (E_ij (x) E_kl)[(i*n+k), (j*n+l)] = 1.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "common.hpp"

namespace stokeslab {

enum class AlgebraKind { gl, sl };

struct Root {
    int i, j;  // alpha_ij = e_i - e_j, root vector E_ij; 0-based
    bool operator==(const Root& o) const { return i == o.i && j == o.j; }
};

inline Mat unit_matrix(int n, int i, int j) {
    Mat e = Mat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

inline cplx root_value(const Root& a, const Mat& A) { return A(a.i, a.i) - A(a.j, a.j); }

inline std::vector<Root> all_roots(int n) {
    std::vector<Root> r;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) r.push_back({i, j});
    return r;
}

// A is required diagonal with pairwise distinct entries.
inline void require_regular(const Mat& A, double tol = 1e-12) {
    int n = (int)A.rows();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                if (std::abs(A(i, j)) > tol)
                    throw NonRegularA("irregular part must be diagonal");
                if (std::abs(A(i, i) - A(j, j)) < tol)
                    throw NonRegularA("coincident eigenvalues of A");
            }
}

// Anti-clockwise sector test: is angle of w in (theta, theta + span)?
inline bool in_sector(cplx w, double theta, double span, double tol = 0.0) {
    double a = std::arg(w);  // (-pi, pi]
    double d = a - theta;
    while (d <= 0) d += 2.0 * PI;
    while (d > 2.0 * PI) d -= 2.0 * PI;
    return d > tol && d < span - tol;
}

// Angles (mod 2*pi, in [0, 2*pi)) of the rays where some alpha(A) points.
inline std::vector<double> stokes_ray_angles(const Mat& A) {
    int n = (int)A.rows();
    std::vector<double> out;
    for (const Root& a : all_roots(n)) {
        double th = std::arg(root_value(a, A));
        if (th < 0) th += 2.0 * PI;
        bool dup = false;
        for (double t : out)
            if (angle_close(t, th, 1e-10)) dup = true;
        if (!dup) out.push_back(th);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline bool ray_admissible(const Mat& A, double theta, double tol = 1e-9) {
    for (double t : stokes_ray_angles(A))
        if (angle_close(t, theta, tol)) return false;
    return true;
}

// Roots alpha with alpha(A) in the half-plane swept anti-clockwise from the
// ray at angle theta.  For A in the negative chamber and theta = -pi/2 this
// gives the strictly lower-triangular pattern.
inline std::vector<Root> positive_roots_for_ray(const Mat& A, double theta) {
    std::vector<Root> out;
    for (const Root& a : all_roots((int)A.rows()))
        if (in_sector(root_value(a, A), theta, PI)) out.push_back(a);
    return out;
}

// ---------------------------------------------------------------------------
// Two-leg tensors.

class Tensor2 {
public:
    Tensor2() : n_(0) {}
    explicit Tensor2(int n) : n_(n), rep_(Mat::Zero(n * n, n * n)) {}
    Tensor2(int n, Mat rep) : n_(n), rep_(std::move(rep)) {}

    static Tensor2 pure(const Mat& a, const Mat& b) {
        return Tensor2((int)a.rows(), Eigen::kroneckerProduct(a, b).eval());
    }
    static Tensor2 identity(int n) {
        return Tensor2(n, Mat::Identity(n * n, n * n));
    }

    int n() const { return n_; }
    const Mat& rep() const { return rep_; }
    Mat& rep() { return rep_; }

    // coefficient of E_ij (x) E_kl
    cplx coeff(int i, int j, int k, int l) const { return rep_(i * n_ + k, j * n_ + l); }

    Tensor2 swapped() const {  // t^{21}
        Tensor2 s(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int l = 0; l < n_; ++l)
                        s.rep_(k * n_ + i, l * n_ + j) = rep_(i * n_ + k, j * n_ + l);
        return s;
    }

    // (id (x) lambda)(t) with lambda(x) = tr(L x)
    Mat contract_second(const Mat& L) const {
        Mat out = Mat::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k)
                    for (int l = 0; l < n_; ++l)
                        out(i, j) += rep_(i * n_ + k, j * n_ + l) * L(l, k);
        return out;
    }

    // (lambda (x) id)(t)
    Mat contract_first(const Mat& L) const { return swapped().contract_second(L); }

    double norm() const { return rep_.norm(); }

    Tensor2 operator+(const Tensor2& o) const { return {n_, rep_ + o.rep_}; }
    Tensor2 operator-(const Tensor2& o) const { return {n_, rep_ - o.rep_}; }
    Tensor2 operator*(cplx c) const { return {n_, (rep_ * c).eval()}; }
    Tensor2 operator*(const Tensor2& o) const { return {n_, (rep_ * o.rep_).eval()}; }

private:
    int n_;
    Mat rep_;
};

inline Tensor2 operator*(cplx c, const Tensor2& t) { return t * c; }

inline Tensor2 commutator(const Tensor2& a, const Tensor2& b) {
    return {a.n(), (a.rep() * b.rep() - b.rep() * a.rep()).eval()};
}

// [x (x) 1 + 1 (x) x, t]
inline Tensor2 ad_diag(const Mat& x, const Tensor2& t) {
    int n = (int)x.rows();
    Mat d = Eigen::kroneckerProduct(x, Mat::Identity(n, n)).eval()
          + Eigen::kroneckerProduct(Mat::Identity(n, n), x).eval();
    return {n, (d * t.rep() - t.rep() * d).eval()};
}

// ---------------------------------------------------------------------------
// Casimir tensors.  kind == sl projects each leg to trace-free part where a
// Cartan piece is involved.

struct CasimirSet {
    Tensor2 omega;    // sum E_ij (x) E_ji
    Tensor2 omega0;   // Cartan part
    Tensor2 omega_p;  // sum over positive roots (pattern supplied)
    Tensor2 omega_m;
};

inline Tensor2 omega_root(int n, const Root& a) {
    return Tensor2::pure(unit_matrix(n, a.i, a.j), unit_matrix(n, a.j, a.i));
}

inline Tensor2 omega_full(int n, AlgebraKind kind = AlgebraKind::gl) {
    Tensor2 t(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            t = t + Tensor2::pure(unit_matrix(n, i, j), unit_matrix(n, j, i));
    if (kind == AlgebraKind::sl) {
        Mat id = Mat::Identity(n, n);
        t = t - (1.0 / n) * Tensor2::pure(id, id);
    }
    return t;
}

inline Tensor2 omega_cartan(int n, AlgebraKind kind = AlgebraKind::gl) {
    Tensor2 t(n);
    for (int i = 0; i < n; ++i)
        t = t + Tensor2::pure(unit_matrix(n, i, i), unit_matrix(n, i, i));
    if (kind == AlgebraKind::sl) {
        Mat id = Mat::Identity(n, n);
        t = t - (1.0 / n) * Tensor2::pure(id, id);
    }
    return t;
}

inline CasimirSet casimir_tensors(int n, const std::vector<Root>& positive,
                                  AlgebraKind kind = AlgebraKind::gl) {
    CasimirSet c{omega_full(n, kind), omega_cartan(n, kind), Tensor2(n), Tensor2(n)};
    std::vector<Root> all = all_roots(n);
    for (const Root& a : all) {
        bool pos = std::find(positive.begin(), positive.end(), a) != positive.end();
        (pos ? c.omega_p : c.omega_m) = (pos ? c.omega_p : c.omega_m) + omega_root(n, a);
    }
    return c;
}

// Standard r-matrix for a chamber: Omega_+ + Omega_0 / 2.
inline Tensor2 standard_r(int n, const std::vector<Root>& positive,
                          AlgebraKind kind = AlgebraKind::gl) {
    CasimirSet c = casimir_tensors(n, positive, kind);
    return c.omega_p + 0.5 * c.omega0;
}

// ---------------------------------------------------------------------------
// Three-leg scaffolding for the classical Yang-Baxter residual.

inline Mat leg_matrix_12(const Tensor2& t) {
    int n = t.n();
    return Eigen::kroneckerProduct(t.rep(), Mat::Identity(n, n)).eval();
}

inline Mat leg_matrix_23(const Tensor2& t) {
    int n = t.n();
    return Eigen::kroneckerProduct(Mat::Identity(n, n), t.rep()).eval();
}

inline Mat swap_matrix(int n) {  // P with P (u (x) v) = v (x) u
    Mat p = Mat::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p(i * n + j, j * n + i) = 1.0;
    return p;
}

inline Mat leg_matrix_13(const Tensor2& t) {
    int n = t.n();
    Mat p23 = Eigen::kroneckerProduct(Mat::Identity(n, n), swap_matrix(n)).eval();
    return p23 * leg_matrix_12(t) * p23;
}

// || [r12,r13] + [r12,r23] + [r13,r23] ||
inline double cybe_residual(const Tensor2& r) {
    Mat r12 = leg_matrix_12(r), r23 = leg_matrix_23(r), r13 = leg_matrix_13(r);
    auto comm = [](const Mat& a, const Mat& b) { return (a * b - b * a).eval(); };
    return (comm(r12, r13) + comm(r12, r23) + comm(r13, r23)).norm();
}

// Identifications g* ~ g through the trace form.
inline Mat nu_map(const Mat& L) { return L; }
inline Mat nu_check(const Mat& L) { return -L / (2.0 * PI * IU); }

inline Mat cartan_project(const Mat& x) {
    Mat d = Mat::Zero(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) d(i, i) = x(i, i);
    return d;
}

}  // namespace stokeslab
