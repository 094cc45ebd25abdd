#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the library's integration code.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Adaptive quadrature of g over [a, b], split at the given interior points.
inline double integrate(const std::function<double(double)>& g, std::vector<double> cuts, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    cuts.insert(cuts.begin(), a);
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        total += ts.integrate(g, cuts[i], cuts[i + 1], 1e-14);
    }
    return total;
}

/// Haar ψ on half-open cells.
inline double haar_psi(double x) {
    if (x >= 0.0 && x < 0.5) return 1.0;
    if (x >= 0.5 && x < 1.0) return -1.0;
    return 0.0;
}

inline double haar(int j, long long k, double x) {
    if (j < 0) return (x >= static_cast<double>(k) && x < static_cast<double>(k) + 1.0) ? 1.0 : 0.0;
    return std::pow(2.0, j / 2.0) * haar_psi(std::pow(2.0, j) * x - static_cast<double>(k));
}

/// Closed-form Haar coefficient of x^{-β} 1_[0,1] at (j, k), j >= 0, 0 <= k < 2^j.
inline double spike_beta(double beta, int j, long long k) {
    const double e = 1.0 - beta;
    const double kk = static_cast<double>(k);
    return std::pow(2.0, -j * (0.5 - beta)) / e *
           (2.0 * std::pow(kk + 0.5, e) - std::pow(kk, e) - std::pow(kk + 1.0, e));
}

/// Closed-form ∫ψ_{j,k}² x^{-β} over [0,1].
inline double spike_sigma_sq(double beta, int j, long long k) {
    const double e = 1.0 - beta;
    const double kk = static_cast<double>(k);
    return std::pow(2.0, j * beta) / e * (std::pow(kk + 1.0, e) - std::pow(kk, e));
}

/// Ṽ and η evaluated term by term from their definitions.
inline double v_tilde(double v_hat, double sup, double gamma, double n) {
    const double L = std::log(n);
    return v_hat + std::sqrt(2.0 * gamma * L * v_hat * sup * sup / (n * n)) + 3.0 * gamma * L * sup * sup / (n * n);
}

inline double eta(double vt, double sup, double gamma, double n) {
    const double L = std::log(n);
    return std::sqrt(2.0 * gamma * vt * L) + gamma * L / (3.0 * n) * sup;
}

}  // namespace oracle
