// Gauss-Legendre and composite-Simpson rules on [a, b].

#ifndef IONSIM_QUADRATURE_HPP
#define IONSIM_QUADRATURE_HPP

#include <vector>

namespace ionsim {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b] (Newton iteration on P_n).
QuadratureRule gauss_legendre(int n, double a, double b);

/// Composite Simpson rule with n subintervals (n rounded up to even).
QuadratureRule composite_simpson(int n, double a, double b);

}  // namespace ionsim

#endif  // IONSIM_QUADRATURE_HPP
