#pragma once

#include <cstddef>

namespace thermocorr {

/// Central record of every numerical tolerance used by the library.
/// Values are referenced by the module contracts; tests pin against these.
struct Tolerances {
    double hermiticity = 1e-10;        // ||A - A^dag||_max admissible on input
    double jacobi_offdiag = 1e-13;     // eigensolver convergence, absolute per element
    double trace_unit = 1e-10;         // |Tr(rho) - 1|
    double psd_floor = -1e-9;          // smallest admissible eigenvalue of a state
    double unitarity = 1e-12;          // ||U^dag U - 1||_max for constructed unitaries
    double bisection_residual = 1e-10; // energy matching residual in solve_beta_prime
    int bisection_max_iters = 200;
    double root_residual = 1e-9;       // |f(root)| for threshold solvers
    double spectrum_match = 1e-9;      // protocol spectrum preservation
    double work_floor = -1e-9;         // work non-negativity slack
    double clamp_negative = -1e-9;     // floating-point guard before clamping to 0
    double alpha_floor = -1e-10;       // circulant plan coefficient positivity slack
};

inline const Tolerances& tol() {
    static const Tolerances t{};
    return t;
}

/// Dense operations are sized for Hilbert dimensions up to this cap.
inline constexpr std::size_t kMaxDenseDim = 4096;

} // namespace thermocorr
