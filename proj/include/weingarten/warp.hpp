#pragma once

// Warping functions h(t) of the ambient metric dt^2 + h(t)^2 g', the slice
// principal curvature h'/h and the potential eta = -int h dt.

#include <memory>
#include <string>

#include "weingarten/psiexpr.hpp"

namespace weingarten::warp {

enum class AmbientKind { sphere, euclidean, hyperbolic, custom };

std::string to_string(AmbientKind kind);
AmbientKind ambient_kind_from_string(const std::string& name);

struct ProfileValues {
    double h = 0.0;
    double hp = 0.0;
    double hpp = 0.0;
};

/// Which additive constant fixes eta.
enum class EtaAnchor {
    lower_endpoint,  ///< eta(t_min) = 0
    closed_form,     ///< builtin antiderivative: cos(sqrt(l) t)/l, -t^2/2, -cosh(sqrt(l) t)/l
};

/// Immutable warping profile on an open interval (t_min, t_max), t_min > 0.
/// Construction samples the interval densely and rejects profiles with
/// h <= 0 or h' <= 0 anywhere.
class WarpProfile {
public:
    static WarpProfile sphere(double lambda, double t_min, double t_max);
    static WarpProfile euclidean(double t_min, double t_max);
    static WarpProfile hyperbolic(double lambda, double t_min, double t_max);
    /// Custom profile from expressions in t for h, h' and h''.
    static WarpProfile custom(psiexpr::Expression h, psiexpr::Expression hp, psiexpr::Expression hpp, double t_min,
                              double t_max);

    AmbientKind kind() const noexcept { return kind_; }
    double lambda() const noexcept { return lambda_; }
    double t_min() const noexcept { return t_min_; }
    double t_max() const noexcept { return t_max_; }
    bool contains(double t) const noexcept { return t > t_min_ && t < t_max_; }
    bool is_space_form() const noexcept { return kind_ != AmbientKind::custom; }

    /// Sectional curvature of the space form (lambda, 0 or -lambda); 0 for custom.
    double ambient_curvature() const noexcept;

    /// Throws DomainError outside the open interval.
    ProfileValues eval(double t) const;
    double slice_curvature(double t) const;
    double slice_curvature_derivative(double t) const;
    double eta(double t, EtaAnchor anchor = EtaAnchor::lower_endpoint) const;

private:
    WarpProfile() = default;
    void require_inside(double t, const char* op) const;
    void validate() const;
    double eta_closed_form(double t) const;

    struct CustomExprs {
        psiexpr::Expression h, hp, hpp;
    };

    AmbientKind kind_ = AmbientKind::euclidean;
    double lambda_ = 1.0;
    double sqrt_lambda_ = 1.0;
    double t_min_ = 0.0;
    double t_max_ = 0.0;
    std::shared_ptr<const CustomExprs> custom_;
};

inline ProfileValues eval_profile(const WarpProfile& p, double t) { return p.eval(t); }
inline double slice_curvature(const WarpProfile& p, double t) { return p.slice_curvature(t); }
inline double slice_curvature_derivative(const WarpProfile& p, double t) { return p.slice_curvature_derivative(t); }
inline double eta_of_t(const WarpProfile& p, double t, EtaAnchor anchor = EtaAnchor::lower_endpoint) {
    return p.eta(t, anchor);
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`; throws NumericError
/// when the recursion limit is hit or the integrand is not finite.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

}  // namespace weingarten::warp
