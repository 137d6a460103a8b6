#include "weingarten/warp.hpp"

#include <cmath>
#include <numbers>

#include "weingarten/errors.hpp"

namespace weingarten::warp {

std::string to_string(AmbientKind kind) {
    switch (kind) {
        case AmbientKind::sphere: return "sphere";
        case AmbientKind::euclidean: return "euclidean";
        case AmbientKind::hyperbolic: return "hyperbolic";
        case AmbientKind::custom: return "custom";
    }
    return "?";
}

AmbientKind ambient_kind_from_string(const std::string& name) {
    if (name == "sphere") return AmbientKind::sphere;
    if (name == "euclidean") return AmbientKind::euclidean;
    if (name == "hyperbolic") return AmbientKind::hyperbolic;
    if (name == "custom") return AmbientKind::custom;
    throw DomainError("unknown ambient kind '" + name + "'");
}

namespace {

void check_interval(double t_min, double t_max) {
    if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max))
        throw DomainError("warp profile: need 0 < t_min < t_max < inf");
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("warp profile: lambda must be positive");
}

}  // namespace

WarpProfile WarpProfile::sphere(double lambda, double t_min, double t_max) {
    check_lambda(lambda);
    check_interval(t_min, t_max);
    WarpProfile p;
    p.kind_ = AmbientKind::sphere;
    p.lambda_ = lambda;
    p.sqrt_lambda_ = std::sqrt(lambda);
    p.t_min_ = t_min;
    p.t_max_ = t_max;
    p.validate();
    return p;
}

WarpProfile WarpProfile::euclidean(double t_min, double t_max) {
    check_interval(t_min, t_max);
    WarpProfile p;
    p.kind_ = AmbientKind::euclidean;
    p.lambda_ = 0.0;
    p.sqrt_lambda_ = 0.0;
    p.t_min_ = t_min;
    p.t_max_ = t_max;
    p.validate();
    return p;
}

WarpProfile WarpProfile::hyperbolic(double lambda, double t_min, double t_max) {
    check_lambda(lambda);
    check_interval(t_min, t_max);
    WarpProfile p;
    p.kind_ = AmbientKind::hyperbolic;
    p.lambda_ = lambda;
    p.sqrt_lambda_ = std::sqrt(lambda);
    p.t_min_ = t_min;
    p.t_max_ = t_max;
    p.validate();
    return p;
}

WarpProfile WarpProfile::custom(psiexpr::Expression h, psiexpr::Expression hp, psiexpr::Expression hpp, double t_min,
                                double t_max) {
    check_interval(t_min, t_max);
    for (const auto* e : {&h, &hp, &hpp}) {
        for (const auto& v : e->free_variables())
            if (v.kind != psiexpr::Variable::Kind::t)
                throw DomainError("custom warp profile: expression '" + e->source() + "' may only depend on t");
    }
    WarpProfile p;
    p.kind_ = AmbientKind::custom;
    p.lambda_ = 0.0;
    p.sqrt_lambda_ = 0.0;
    p.t_min_ = t_min;
    p.t_max_ = t_max;
    p.custom_ = std::make_shared<const CustomExprs>(CustomExprs{std::move(h), std::move(hp), std::move(hpp)});
    p.validate();
    return p;
}

void WarpProfile::validate() const {
    constexpr int samples = 1000;
    for (int i = 1; i <= samples; ++i) {
        const double t = t_min_ + (t_max_ - t_min_) * i / (samples + 1.0);
        const ProfileValues v = eval(t);
        if (!(v.h > 0.0)) throw DomainError("warp profile: h <= 0 at t=" + std::to_string(t));
        if (!(v.hp > 0.0)) throw DomainError("warp profile: h' <= 0 at t=" + std::to_string(t));
    }
}

double WarpProfile::ambient_curvature() const noexcept {
    switch (kind_) {
        case AmbientKind::sphere: return lambda_;
        case AmbientKind::hyperbolic: return -lambda_;
        default: return 0.0;
    }
}

void WarpProfile::require_inside(double t, const char* op) const {
    if (!contains(t)) {
        throw DomainError(std::string(op) + ": t=" + std::to_string(t) + " outside (" + std::to_string(t_min_) + ", " +
                          std::to_string(t_max_) + ")");
    }
}

ProfileValues WarpProfile::eval(double t) const {
    require_inside(t, "eval_profile");
    switch (kind_) {
        case AmbientKind::sphere: {
            const double s = std::sin(sqrt_lambda_ * t);
            return {s / sqrt_lambda_, std::cos(sqrt_lambda_ * t), -sqrt_lambda_ * s};
        }
        case AmbientKind::euclidean: return {t, 1.0, 0.0};
        case AmbientKind::hyperbolic: {
            const double s = std::sinh(sqrt_lambda_ * t);
            return {s / sqrt_lambda_, std::cosh(sqrt_lambda_ * t), sqrt_lambda_ * s};
        }
        case AmbientKind::custom:
            return {psiexpr::eval_at_t(custom_->h, t), psiexpr::eval_at_t(custom_->hp, t),
                    psiexpr::eval_at_t(custom_->hpp, t)};
    }
    return {};
}

double WarpProfile::slice_curvature(double t) const {
    require_inside(t, "slice_curvature");
    switch (kind_) {
        case AmbientKind::sphere: return sqrt_lambda_ / std::tan(sqrt_lambda_ * t);
        case AmbientKind::euclidean: return 1.0 / t;
        case AmbientKind::hyperbolic: return sqrt_lambda_ / std::tanh(sqrt_lambda_ * t);
        case AmbientKind::custom: {
            const ProfileValues v = eval(t);
            return v.hp / v.h;
        }
    }
    return 0.0;
}

double WarpProfile::slice_curvature_derivative(double t) const {
    require_inside(t, "slice_curvature_derivative");
    switch (kind_) {
        case AmbientKind::sphere:
        case AmbientKind::hyperbolic: {
            const double h = eval(t).h;
            return -1.0 / (h * h);
        }
        case AmbientKind::euclidean: return -1.0 / (t * t);
        case AmbientKind::custom: {
            const ProfileValues v = eval(t);
            const double kappa = v.hp / v.h;
            return v.hpp / v.h - kappa * kappa;
        }
    }
    return 0.0;
}

double WarpProfile::eta_closed_form(double t) const {
    switch (kind_) {
        case AmbientKind::sphere: return std::cos(sqrt_lambda_ * t) / lambda_;
        case AmbientKind::euclidean: return -0.5 * t * t;
        case AmbientKind::hyperbolic: return -std::cosh(sqrt_lambda_ * t) / lambda_;
        case AmbientKind::custom: break;
    }
    return 0.0;
}

double WarpProfile::eta(double t, EtaAnchor anchor) const {
    require_inside(t, "eta_of_t");
    if (kind_ == AmbientKind::custom) {
        // No closed form: always anchored at the lower endpoint.
        return -integrate([this](double s) { return psiexpr::eval_at_t(custom_->h, s); }, t_min_, t);
    }
    const double value = eta_closed_form(t);
    return anchor == EtaAnchor::closed_form ? value : value - eta_closed_form(t_min_);
}

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    int evaluations = 0;
};

double simpson_step(SimpsonState& st, double a, double b, double fa, double fm, double fb, double whole, double tol,
                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    st.evaluations += 2;
    if (!std::isfinite(flm) || !std::isfinite(frm)) throw NumericError("integrate: non-finite integrand");
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw NumericError("integrate: recursion limit reached");
    return simpson_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    SimpsonState st{f};
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw NumericError("integrate: non-finite integrand");
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(st, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace weingarten::warp
