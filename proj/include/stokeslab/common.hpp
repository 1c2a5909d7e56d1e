#pragma once

// Shared scalar types and error taxonomy for the Stokes laboratory.

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stokeslab {

using cplx = std::complex<double>;
using Mat  = Eigen::MatrixXcd;
using Vec  = Eigen::VectorXcd;

inline constexpr double PI = 3.14159265358979323846264338327950288;
inline const cplx IU{0.0, 1.0};           // imaginary unit
inline constexpr double EULER_GAMMA = 0.57721566490153286060651209008240243;

// Every failure mode carries a stable code string so the CLI can report it.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }
private:
    std::string code_;
};

#define STOKESLAB_ERROR(code)                                       \
    class code : public Error {                                     \
    public:                                                         \
        explicit code(const std::string& w) : Error(#code, w) {}    \
    }

STOKESLAB_ERROR(NonRegularA);
STOKESLAB_ERROR(ResonantB);
STOKESLAB_ERROR(NonAdmissibleRay);
STOKESLAB_ERROR(CutOnStokesRay);
STOKESLAB_ERROR(CutHandling);
STOKESLAB_ERROR(OutsideHalfPlane);
STOKESLAB_ERROR(StepUnderflow);
STOKESLAB_ERROR(SingularOnPath);
STOKESLAB_ERROR(SeedDivergence);
STOKESLAB_ERROR(QuadratureFailure);
STOKESLAB_ERROR(DegreeOverflow);
STOKESLAB_ERROR(PatternViolation);
STOKESLAB_ERROR(NotInDualSubalgebra);
STOKESLAB_ERROR(RouteMismatch);
STOKESLAB_ERROR(NoConsistentScale);
STOKESLAB_ERROR(LeftChamber);
STOKESLAB_ERROR(ValidationError);

#undef STOKESLAB_ERROR

// Angle helpers.  Arguments of path points are continuous (not reduced mod
// 2*pi); reduction happens only where a determination is chosen explicitly.
inline double reduce_angle(double a, double hi) {
    // representative in (hi - 2*pi, hi]
    while (a > hi) a -= 2.0 * PI;
    while (a <= hi - 2.0 * PI) a += 2.0 * PI;
    return a;
}

inline bool angle_close(double a, double b, double tol = 1e-12) {
    double d = std::fmod(std::abs(a - b), 2.0 * PI);
    return d < tol || 2.0 * PI - d < tol;
}

}  // namespace stokeslab
