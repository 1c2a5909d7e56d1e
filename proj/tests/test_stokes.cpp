#include <catch2/catch_amalgamated.hpp>

#include "oracles/born_oracle.hpp"
#include "oracles/kummer_oracle.hpp"
#include "stokeslab/stokes.hpp"
#include "test_util.hpp"

using namespace stokeslab;

TEST_CASE("oracle internals: log gamma") {
    using oracle::log_gamma;
    using oracle::lcplx;
    CHECK(std::abs(std::exp(log_gamma(lcplx(0.5L))) - std::sqrt((long double)PI)) < 1e-15L);
    CHECK(std::abs(std::exp(log_gamma(lcplx(5.0L))) - 24.0L) < 1e-12L);
    lcplx z(0.3L, 1.7L);
    lcplx lhs = log_gamma(z + 1.0L);
    lcplx rhs = log_gamma(z) + std::log(z);
    CHECK(std::abs(lhs - rhs) < 1e-13L);
    // reflection-covered region
    lcplx w(-1.3L, 0.4L);
    CHECK(std::abs(std::exp(log_gamma(w + 1.0L)) - w * std::exp(log_gamma(w))) < 1e-12L);
}

static Connection sample_2x2(int which) {
    Connection c;
    c.A = Mat::Zero(2, 2);
    c.B = Mat::Zero(2, 2);
    switch (which) {
        case 0:
            c.A(0, 0) = -1.1;
            c.A(1, 1) = 0.4;
            c.B << cplx(0.11, 0.07), cplx(0.23, -0.05), cplx(-0.13, 0.17), cplx(-0.21, 0.03);
            break;
        case 1:
            c.A(0, 0) = -0.8;
            c.A(1, 1) = 0.9;
            c.B << cplx(-0.05, 0.21), cplx(0.31, 0.11), cplx(0.14, -0.09), cplx(0.18, -0.12);
            break;
        case 2:
            c.A(0, 0) = -1.6;
            c.A(1, 1) = -0.2;
            c.B << cplx(0.02, -0.16), cplx(-0.27, 0.08), cplx(0.19, 0.21), cplx(0.12, 0.06);
            break;
        case 3:
            c.A(0, 0) = -0.5;
            c.A(1, 1) = 1.3;
            c.B << cplx(0.24, 0.02), cplx(0.05, 0.33), cplx(-0.21, -0.07), cplx(-0.09, 0.14);
            break;
        default:
            c.A(0, 0) = -2.0;
            c.A(1, 1) = -0.9;
            c.B << cplx(-0.14, 0.09), cplx(0.18, 0.22), cplx(0.26, -0.13), cplx(0.07, 0.19);
            break;
    }
    return c;
}

TEST_CASE("oracle satisfies the connection ODE and normalization") {
    Connection c = sample_2x2(0);
    oracle::KummerOracle ko(c.A, c.B);

    // finite-difference ODE residual at a generic point
    double rho = 0.9, th = -0.6, h = 1e-5;
    Mat gp = ko.canonical(-PI / 2, rho + h, th);
    Mat gm = ko.canonical(-PI / 2, rho - h, th);
    Mat g0 = ko.canonical(-PI / 2, rho, th);
    cplx z = std::polar(rho, th);
    cplx ph = std::polar(1.0, th);
    Mat dg = (gp - gm) / (2.0 * h * ph);  // d/drho -> d/dz on the radial line
    Mat rhs = (c.A / (z * z) + c.B / z) * g0;
    CHECK((dg - rhs).norm() / rhs.norm() < 1e-7);

    // h-part tends to the identity deep in the half-plane (moderate radii:
    // the M-series evaluation loses digits once |eta| gets large)
    for (double r : {0.4, 0.25}) {
        Mat gam = ko.canonical(-PI / 2, r, -PI / 2);
        Mat d = Mat::Zero(2, 2);
        cplx zz = std::polar(r, -PI / 2);
        cplx lz(std::log(r), -PI / 2);
        for (int i = 0; i < 2; ++i)
            d(i, i) = std::exp(-c.A(i, i) / zz + c.B(i, i) * lz);
        Mat hpart = gam * d.inverse();
        CHECK((hpart - Mat::Identity(2, 2)).norm() < 2.0 * r);
    }
}

TEST_CASE("engine canonical solutions match the hypergeometric oracle") {
    for (int which = 0; which < 5; ++which) {
        Connection c = sample_2x2(which);
        StokesEngine<double> eng(c);
        oracle::KummerOracle ko(c.A, c.B);
        for (double th : {-PI / 2, -3 * PI / 4, -PI / 4}) {
            for (double rho : {0.7, 1.3}) {
                Mat got = eng.canonical_solution(-PI / 2, {rho, th});
                Mat want = ko.canonical(-PI / 2, rho, th);
                INFO("instance " << which << " rho " << rho << " th " << th);
                CHECK((got - want).norm() / want.norm() < 1e-8);
            }
        }
    }
}

TEST_CASE("diagonal B gives trivial Stokes data") {
    Connection c;
    c.A = Mat::Zero(2, 2);
    c.A(0, 0) = -1.0;
    c.A(1, 1) = 0.5;
    c.B = Mat::Zero(2, 2);
    c.B(0, 0) = cplx(0.2, 0.1);
    c.B(1, 1) = cplx(-0.3, 0.05);
    StokesEngine<double> eng(c);
    Mat I2 = Mat::Identity(2, 2);
    CHECK((eng.stokes_plus() - I2).norm() < 1e-10);
    CHECK((eng.stokes_minus() - I2).norm() < 1e-10);
    CHECK((eng.connection_matrix() - I2).norm() < 1e-9);
    CHECK(eng.monodromy_residual() < 1e-9);
}

TEST_CASE("unipotence, pattern and the monodromy identity") {
    std::mt19937_64 rng(2024);
    for (int n : {2, 3}) {
        for (int trial = 0; trial < 3; ++trial) {
            Connection c;
            c.A = testutil::random_A(rng, n);
            c.B = testutil::random_B(rng, n);
            StokesEngine<double> eng(c);
            Mat sp = eng.stokes_plus(), sm = eng.stokes_minus();
            auto pos = positive_roots_for_ray(c.A, c.ray);
            auto neg = positive_roots_for_ray(c.A, c.ray + PI);
            INFO("n=" << n << " trial=" << trial);
            CHECK(pattern_residual(sp, pos) < 1e-9);
            CHECK(pattern_residual(sm, neg) < 1e-9);
            CHECK(eng.monodromy_residual() < 1e-8);
        }
    }
}

TEST_CASE("equivariance under diagonal torus conjugation") {
    std::mt19937_64 rng(7);
    Connection c;
    c.A = testutil::random_A(rng, 3);
    c.B = testutil::random_B(rng, 3);
    Mat T = Mat::Zero(3, 3);
    T(0, 0) = cplx(1.3, 0.2);
    T(1, 1) = cplx(0.6, -0.4);
    T(2, 2) = cplx(-0.9, 1.1);
    Connection c2 = c;
    c2.B = T * c.B * T.inverse();
    StokesEngine<double> e1(c), e2(c2);
    Mat want = T * e1.stokes_plus() * T.inverse();
    CHECK((e2.stokes_plus() - want).norm() / want.norm() < 1e-9);
}

TEST_CASE("factorization across individual Stokes rays") {
    std::mt19937_64 rng(99);
    Connection c;
    c.A = Mat::Zero(3, 3);
    c.A(1, 1) = 1.0;
    c.A(2, 2) = cplx(1.0, 1.0);
    c.B = testutil::random_B(rng, 3);
    // the default downward ray is a Stokes ray here; pick an admissible one
    // and park the cut between the Stokes rays at 3*pi/4... use 0.9*pi
    c.ray = -1.2;
    c.cut = 0.9 * PI;
    StokesEngine<double> eng(c);

    // half-plane from the ray crosses the Stokes rays at 0, pi/4, pi/2
    auto fs = eng.factors(c.ray, c.ray + PI);
    REQUIRE(fs.size() == 3);
    CHECK(angle_close(fs[0].ray_angle, 0.0));
    CHECK(angle_close(fs[1].ray_angle, PI / 4));
    CHECK(angle_close(fs[2].ray_angle, PI / 2));
    for (const auto& f : fs) CHECK(f.eps == 0);
    auto tot = eng.product_of_factors(fs);
    CHECK(tot.eps == 0);
    CHECK((tot.S - eng.stokes_plus()).norm() < 1e-6);

    // clockwise sector: the sweep crosses the branch cut once
    auto fs2 = eng.factors(c.ray + PI, c.ray + 2.0 * PI);
    auto tot2 = eng.product_of_factors(fs2);
    CHECK(tot2.eps == 1);
    CHECK((tot2.S - eng.stokes_minus()).norm() < 1e-6);

    // extended precision sharpens the product identities to roundoff
    IntegratorConfig xc;
    xc.rel_tol = 1e-16;
    xc.abs_tol = 1e-17;
    StokesEngine<long double> ex(c, xc);
    auto xfs = ex.factors(c.ray, c.ray + PI);
    CHECK((ex.product_of_factors(xfs).S - ex.stokes_plus()).norm() < 1e-12);
    auto xfs2 = ex.factors(c.ray + PI, c.ray + 2.0 * PI);
    CHECK((ex.product_of_factors(xfs2).S - ex.stokes_minus()).norm() < 1e-12);
}

TEST_CASE("per-factor support on an equal-modulus root configuration") {
    // Individual factors come from canonical solutions seeded between
    // consecutive Stokes rays.  The seed series is divergent; its optimal
    // truncation error e^{-d/rho0} (d = min |alpha(A)|) is re-amplified by
    // e^{amp/rho0} along dominant directions, so off-support contamination
    // of a single factor bottoms out near exp(-(1 - amp/d) L) with
    // L = log(1/arithmetic floor).  With all root values of modulus 1 the
    // rays sit 60 degrees apart, amp = cos(30deg), and the floor is a few
    // percent in double and under 1 percent in extended precision.  The
    // ordered product is exact to roundoff regardless (it telescopes).
    std::mt19937_64 rng(99);
    Connection c;
    c.A = Mat::Zero(3, 3);
    c.A(1, 1) = 1.0;
    c.A(2, 2) = 1.0 + std::polar(1.0, 2.0 * PI / 3.0);
    c.B = testutil::random_B(rng, 3);
    c.ray = -1.2;
    c.cut = 0.9 * PI;

    auto support_residuals = [&](auto& engine) {
        std::vector<double> out;
        auto fs = engine.factors(c.ray, c.ray + PI);
        REQUIRE(fs.size() == 3);
        for (const auto& f : fs) {
            std::vector<Root> on_ray;
            for (const Root& a : all_roots(3))
                if (angle_close(std::arg(root_value(a, c.A)), f.ray_angle, 1e-9))
                    on_ray.push_back(a);
            REQUIRE(!on_ray.empty());
            out.push_back(pattern_residual(f.S, on_ray));
        }
        return out;
    };

    StokesEngine<double> ed(c);
    for (double r : support_residuals(ed)) CHECK(r < 0.05);

    IntegratorConfig xc;
    xc.rel_tol = 1e-16;
    xc.abs_tol = 1e-17;
    StokesEngine<long double> ex(c, xc);
    for (double r : support_residuals(ex)) CHECK(r < 0.02);
}

TEST_CASE("small B: Stokes entries match the first-order perturbation oracle") {
    // the loop quadrature itself must land on 2 pi i
    CHECK(std::abs(oracle::hankel_loop() - 2.0 * PI * IU) < 1e-12);

    Connection c;
    c.A = Mat::Zero(2, 2);
    c.A(0, 0) = -1.0;
    c.A(1, 1) = 0.6;
    Mat dir(2, 2);
    dir << cplx(0.2, 0.0), cplx(0.7, 0.3), cplx(-0.4, 0.8), cplx(-0.1, 0.0);
    double prev = 0.0;
    for (double eps : {1e-3, 1e-4}) {
        c.B = eps * dir;
        StokesEngine<double> eng(c);
        double rp = (eng.stokes_plus() - oracle::born_stokes(c.A, c.B, c.ray)).norm();
        double rm = (eng.stokes_minus() - oracle::born_stokes(c.A, c.B, c.ray + PI)).norm();
        // deviation is second order in eps
        CHECK(rp < 100.0 * eps * eps);
        CHECK(rm < 100.0 * eps * eps);
        if (prev > 0.0) CHECK(std::max(rp, rm) < prev / 20.0);
        prev = std::max(rp, rm);
    }
}

TEST_CASE("big cell residual and dual pair patterns") {
    std::mt19937_64 rng(31337);
    Connection c;
    c.A = testutil::random_A(rng, 3);
    c.B = testutil::random_B(rng, 3);
    StokesEngine<double> eng(c);
    CHECK(eng.big_cell_residual() < 1e-8);

    auto dp = eng.stokes_map();
    // with A in the negative chamber and the downward ray, S+ is lower
    // unipotent, so b+ = S+^{-1} e^{-i pi [B]} is lower triangular
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            CHECK(std::abs(dp.b_plus(i, j)) < 1e-9);
            CHECK(std::abs(dp.b_minus(j, i)) < 1e-9);
        }
    // opposite diagonals are inverse to each other
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(dp.b_plus(i, i) * dp.b_minus(i, i) - 1.0) < 1e-9);
}

TEST_CASE("extended precision agrees with double") {
    Connection c = sample_2x2(1);
    StokesEngine<double> ed(c);
    StokesEngine<long double> el(c);
    CHECK((ed.stokes_plus() - el.stokes_plus()).norm() < 1e-9);
    CHECK((ed.connection_matrix() - el.connection_matrix()).norm() < 1e-8);
}

TEST_CASE("fixed-step cross check") {
    Connection c = sample_2x2(2);
    IntegratorConfig fc;
    fc.fixed_rk4 = true;
    fc.fixed_steps = 30000;
    StokesEngine<double> ea(c), ef(c, fc);
    CHECK((ea.stokes_plus() - ef.stokes_plus()).norm() < 1e-7);
}

TEST_CASE("validation of ray and cut configuration") {
    Connection c;
    c.A = Mat::Zero(2, 2);
    c.A(0, 0) = -1.0;
    c.A(1, 1) = 1.0;  // Stokes rays at 0 and pi
    c.B = Mat::Zero(2, 2);
    CHECK_THROWS_AS(StokesEngine<double>(Connection{c.A, c.B, 0.0, PI}),
                    NonAdmissibleRay);
    // cut outside the clockwise sector
    Mat A2 = Mat::Zero(2, 2);
    A2(0, 0) = -1.0;
    A2(1, 1) = -0.3;
    CHECK_THROWS_AS(StokesEngine<double>(Connection{A2, c.B, -PI / 2, -PI / 4}),
                    ValidationError);

    std::mt19937_64 rng2(5);
    StokesEngine<double> eng(Connection{A2, testutil::random_B(rng2, 2), -PI / 2, PI});
    // sweep endpoint on the cut (complex A so the cut is not a Stokes ray)
    Mat A3 = Mat::Zero(2, 2);
    A3(1, 1) = std::polar(1.0, PI / 4);
    StokesEngine<double> eng3(Connection{A3, testutil::random_B(rng2, 2), -PI / 2, 0.9 * PI});
    CHECK_THROWS_AS(eng3.transition(-0.1 * PI, 0.9 * PI), CutHandling);
    // for real A the cut sits on the leftward Stokes ray: the factor
    // decomposition of the clockwise sector must refuse
    CHECK_THROWS_AS(eng.factors(PI / 2, 3 * PI / 2), CutOnStokesRay);
    // while the anti-clockwise one is fine
    CHECK(eng.factors(-PI / 2, PI / 2).size() == 1);
}
