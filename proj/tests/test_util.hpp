#pragma once

// Seeded random instances shared by the test files.

#include <random>

#include "stokeslab/stokes.hpp"

namespace testutil {

using namespace stokeslab;

// diagonal A with increasing real entries (minus the fundamental chamber),
// consecutive gaps at least min_gap
inline Mat random_A(std::mt19937_64& rng, int n, double min_gap = 0.5) {
    std::uniform_real_distribution<double> gap(min_gap, min_gap + 1.5);
    std::uniform_real_distribution<double> base(-2.0, 0.0);
    Mat A = Mat::Zero(n, n);
    double v = base(rng);
    for (int i = 0; i < n; ++i) {
        A(i, i) = v;
        v += gap(rng);
    }
    return A;
}

inline Mat random_B(std::mt19937_64& rng, int n, double scale = 0.5) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = cplx(u(rng), u(rng));
    double nb = B.norm();
    if (nb > 0) B *= scale / nb;
    return B;
}

}  // namespace testutil
