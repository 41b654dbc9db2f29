#include "ionsim/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ionsim {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and P'_n(x).
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

QuadratureRule composite_simpson(int n, double a, double b) {
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;
    QuadratureRule rule;
    const double h = (b - a) / n;
    rule.nodes.resize(n + 1);
    rule.weights.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        rule.nodes[i] = a + i * h;
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        rule.weights[i] = w * h / 3.0;
    }
    return rule;
}

}  // namespace ionsim
