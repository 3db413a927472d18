#ifndef UPIMH_QUADRATURE_HPP
#define UPIMH_QUADRATURE_HPP

#include <functional>

namespace upimh {

// Adaptive Gauss-Kronrod (G7/K15) integration on [a, b] by interval
// bisection until the summed error estimate falls below abs_tol.
// Throws std::runtime_error if the tolerance cannot be reached.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol);

}  // namespace upimh

#endif
