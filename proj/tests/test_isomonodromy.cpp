#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "stokeslab/isomonodromy.hpp"
#include "stokeslab/poisson.hpp"
#include "test_util.hpp"

using namespace stokeslab;

namespace {

Mat random_small(std::mt19937_64& rng, int n, double scale) {
    std::normal_distribution<double> g;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * cplx(g(rng), g(rng));
    return m;
}

MuPath line_path(Mat mu0, Mat dir) {
    return [mu0, dir](double t) { return (mu0 + t * dir).eval(); };
}

}  // namespace

TEST_CASE("Hamiltonian field of the root Casimirs") {
    int n = 3;
    std::mt19937_64 rng(67);
    Root a{0, 2};

    // diagonal points are fixed
    Mat d = Mat::Zero(n, n);
    d(0, 0) = cplx(1.0, 0.5);
    d(1, 1) = -2.0;
    d(2, 2) = cplx(0.0, -1.0);
    CHECK(hamiltonian_field(a, d).norm() < 1e-15);

    // gl2: at L = E12 + E21 the gradient equals L, so the field vanishes
    Mat L2 = Mat::Zero(2, 2);
    L2(0, 1) = 1.0;
    L2(1, 0) = 1.0;
    CHECK(hamiltonian_field(Root{0, 1}, L2).norm() < 1e-15);

    // brute-force pairing oracle: for every linear observable f_X,
    // {Q_alpha, f_X}(L) = tr(X . field) in the same bracket conventions
    Mat L = random_small(rng, n, 1.0);
    Poly q = Poly::variable(l_var(n, a.i, a.j)) * Poly::variable(l_var(n, a.j, a.i));
    for (int trial = 0; trial < 5; ++trial) {
        Mat X = random_small(rng, n, 1.0);
        cplx lhs = kks_bracket(q, linear_observable(X), L);
        cplx rhs = (X * hamiltonian_field(a, L)).trace();
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("trivial flows stay put") {
    std::mt19937_64 rng(71);
    Mat mu0 = Mat::Zero(2, 2);
    mu0(0, 0) = -2.0;
    mu0(1, 1) = -1.0;
    Mat dir = Mat::Zero(2, 2);
    dir(0, 0) = -1.0;

    // diagonal B is a fixed point of every H_alpha
    Mat B0 = Mat::Zero(2, 2);
    B0(0, 0) = cplx(0.11, 0.05);
    B0(1, 1) = cplx(-0.07, 0.2);
    auto traj = iso_flow(line_path(mu0, dir), B0, 0.0, 0.5);
    CHECK((traj.back().B - B0).norm() < 1e-14);
    CHECK(stokes_constancy(traj) < 1e-9);

    // a constant mu path moves nothing
    Mat Bg = random_small(rng, 2, 0.2);
    auto traj2 = iso_flow(line_path(mu0, Mat::Zero(2, 2).eval()), Bg, 0.0, 0.5);
    CHECK((traj2.back().B - Bg).norm() < 1e-14);
}

TEST_CASE("Stokes matrices are constant along the flow") {
    std::mt19937_64 rng(73);

    Mat mu2 = Mat::Zero(2, 2);
    mu2(0, 0) = -2.0;
    mu2(1, 1) = -1.0;
    Mat dir2 = Mat::Zero(2, 2);
    dir2(0, 0) = -1.0;
    Mat B2 = random_small(rng, 2, 0.2);
    auto traj2 = iso_flow(line_path(mu2, dir2), B2, 0.0, 0.5);
    CHECK(stokes_constancy(traj2) < 1e-8);
    CHECK(eigenvalue_drift(traj2) < 1e-8);

    // the flipped sign is not isomonodromic
    IsoFlowConfig bad;
    bad.sigma = -ISO_FLOW_SIGN;
    auto trajb = iso_flow(line_path(mu2, dir2), B2, 0.0, 0.5, bad);
    CHECK(stokes_constancy(trajb) > 1e-2);

    // gl3 along the standard wall-avoiding path
    Mat mu3 = Mat::Zero(3, 3);
    mu3(0, 0) = -2.0;
    mu3(1, 1) = -1.0;
    Mat dir3 = Mat::Zero(3, 3);
    dir3(0, 0) = -1.0;
    Mat B3 = random_small(rng, 3, 0.15);
    auto traj3 = iso_flow(line_path(mu3, dir3), B3, 0.0, 0.5);
    CHECK(stokes_constancy(traj3) < 1e-8);
    CHECK(eigenvalue_drift(traj3) < 1e-8);
}

TEST_CASE("the integrator converges at fourth order") {
    std::mt19937_64 rng(79);
    Mat mu0 = Mat::Zero(2, 2);
    mu0(0, 0) = -2.0;
    mu0(1, 1) = -1.0;
    Mat dir = Mat::Zero(2, 2);
    dir(0, 0) = -1.0;
    Mat B0 = random_small(rng, 2, 0.3);

    auto endpoint = [&](int steps) {
        IsoFlowConfig cfg;
        cfg.steps = steps;
        cfg.checkpoints = 2;
        return iso_flow(line_path(mu0, dir), B0, 0.0, 0.5, cfg).back().B;
    };
    Mat ref = endpoint(800);
    double e1 = (endpoint(10) - ref).norm();
    double e2 = (endpoint(20) - ref).norm();
    REQUIRE(e1 > 1e-13);  // above roundoff, so the ratio is meaningful
    CHECK(e1 / e2 > 10.0);
    CHECK(e1 / e2 < 24.0);
}

TEST_CASE("walls and resonances abort the flow") {
    Mat mu0 = Mat::Zero(2, 2);
    mu0(0, 0) = -1.0;
    Mat dir = Mat::Zero(2, 2);
    dir(0, 0) = 2.0;  // crosses the root hyperplane at t = 1/2
    std::mt19937_64 rng(83);
    Mat B0 = random_small(rng, 2, 0.1);
    CHECK_THROWS_AS(iso_flow(line_path(mu0, dir), B0, 0.0, 1.0), LeftChamber);

    Mat Bres = Mat::Zero(2, 2);
    Bres(0, 0) = 1.0;  // eigenvalues differ by a nonzero integer
    Mat safe = Mat::Zero(2, 2);
    safe(0, 0) = -1.0;
    CHECK_THROWS_AS(
        iso_flow(line_path(mu0, safe), Bres, 0.0, 0.5), ResonantB);
}

TEST_CASE("differential equation for the Stokes matrices in mu") {
    std::mt19937_64 rng(89);
    Mat B = random_small(rng, 2, 0.2);
    Mat v = Mat::Zero(2, 2);
    v(0, 0) = -1.0;
    v(1, 1) = 0.3;

    // a small grid in the chamber of increasing real diagonals
    for (double shift : {0.0, 0.2, 0.4}) {
        Mat mu = Mat::Zero(2, 2);
        mu(0, 0) = -2.0 - shift;
        mu(1, 1) = -1.0 + 0.5 * shift;
        CHECK(classical_pde_residual(mu, B, v) < 1e-4);
    }

    Mat mu = Mat::Zero(2, 2);
    mu(0, 0) = -2.0;
    mu(1, 1) = -1.0;
    // diagonal B: both sides vanish identically
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 0.2;
    d(1, 1) = cplx(0.0, 0.1);
    CHECK(classical_pde_residual(mu, d, v) < 1e-9);
    // flipped sign control
    CHECK(classical_pde_residual(mu, B, v, 1e-4, 1e-4, -ISO_FLOW_SIGN) > 1e-2);
}

TEST_CASE("trajectory export") {
    std::mt19937_64 rng(97);
    Mat mu0 = Mat::Zero(2, 2);
    mu0(0, 0) = -2.0;
    mu0(1, 1) = -1.0;
    Mat dir = Mat::Zero(2, 2);
    dir(0, 0) = -1.0;
    IsoFlowConfig cfg;
    cfg.steps = 50;
    cfg.checkpoints = 6;
    auto traj = iso_flow(line_path(mu0, dir), random_small(rng, 2, 0.2), 0.0,
                         0.5, cfg);
    REQUIRE(traj.size() == 6);

    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line.rfind("t,re_mu0,im_mu0", 0) == 0);
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 6);
}
