#pragma once

#include <functional>

#include "detcal/types.hpp"

namespace detcal {

struct IntegrationResult {
    double value;
    double error;       // estimated absolute error bound
    int subdivisions;   // panels used
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b]. The panel
/// with the largest error estimate is split until the total estimated error
/// drops below max(abs_tol, rel_tol * |integral|). The final value is a
/// compensated sum over panels sorted by position, so it does not depend on
/// the refinement history. Throws ConvergenceFailure if the tolerance is not
/// met within max_subdivisions panels.
IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b,
                                     double abs_tol = 1e-12,
                                     double rel_tol = 1e-10,
                                     int max_subdivisions = 4000);

}  // namespace detcal
