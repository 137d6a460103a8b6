#pragma once

// Reference computations that share no code with the library: subset
// enumeration for elementary symmetric functions, plane and sphere curve
// curvature from explicit parametrisations, and a convergence-order helper.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

namespace oracle {

/// sigma_k by summing products over all k-subsets, skipping masked entries.
inline double brute_sigma(const std::vector<double>& v, int k, unsigned skip = 0) {
    const int n = static_cast<int>(v.size());
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (mask & skip) continue;
        if (__builtin_popcount(mask) != k) continue;
        double p = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) p *= v[std::size_t(i)];
        total += p;
    }
    return total;
}

inline std::vector<double> to_std(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

/// Curvature of the polar curve r = r(u) in the Euclidean plane.
inline double polar_curvature(double r, double r1, double r2) {
    return (r * r + 2 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5);
}

/// Geodesic curvature on the unit sphere of the curve at polar angle z(u),
/// longitude u, from its embedding X(u) in R^3: det(X, X', X'') / |X'|^3.
inline double sphere_curve_curvature(double u, double z, double z1, double z2) {
    const double s = std::sin(z), c = std::cos(z), cu = std::cos(u), su = std::sin(u);
    const Eigen::Vector3d x(s * cu, s * su, c);
    const Eigen::Vector3d x1(c * z1 * cu - s * su, c * z1 * su + s * cu, -s * z1);
    const double radial = -s * z1 * z1 + c * z2 - s;
    const Eigen::Vector3d x2(radial * cu - 2 * c * z1 * su, radial * su + 2 * c * z1 * cu, -c * z1 * z1 - s * z2);
    Eigen::Matrix3d m;
    m << x, x1, x2;
    return m.determinant() / std::pow(x1.norm(), 3);
}

/// Smallest observed order log2(e_i / e_{i+1}) over successive grid doublings.
inline double observed_order(const std::vector<double>& errors) {
    double order = INFINITY;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) order = std::min(order, std::log2(errors[i] / errors[i + 1]));
    return order;
}

}  // namespace oracle
