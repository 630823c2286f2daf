#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

namespace fluxgraph {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduce an angle to the interval (-pi, pi].
inline double wrap_angle(double x) {
    double r = std::remainder(x, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

/// Distance between two angles modulo 2*pi.
inline double angle_distance(double a, double b = 0.0) {
    return std::abs(wrap_angle(a - b));
}

/// Numerical policy shared by the subspace and classification routines.
///
/// `rank` is the relative singular-value cutoff (sigma <= rank * sigma_max
/// counts as zero), `orth` bounds the orthonormality defect of stored bases,
/// `eq` is the residual threshold for equality-style predicates.
struct ToleranceConfig {
    double rank = 1e-10;
    double orth = 1e-10;
    double eq = 1e-9;

    bool valid() const {
        auto in_unit = [](double t) { return t > 0.0 && t < 1.0; };
        return in_unit(rank) && in_unit(orth) && in_unit(eq);
    }
};

}  // namespace fluxgraph
