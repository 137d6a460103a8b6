#include "weingarten/basegrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weingarten/errors.hpp"

namespace weingarten::basegrid {

std::string to_string(BaseKind kind) {
    switch (kind) {
        case BaseKind::torus1: return "torus1";
        case BaseKind::torus2: return "torus2";
        case BaseKind::sphere2: return "sphere2";
        case BaseKind::axisym: return "axisym";
    }
    return "?";
}

BaseKind base_kind_from_string(const std::string& name) {
    if (name == "torus1") return BaseKind::torus1;
    if (name == "torus2") return BaseKind::torus2;
    if (name == "sphere2") return BaseKind::sphere2;
    if (name == "axisym") return BaseKind::axisym;
    throw ConfigError("unknown base kind '" + name + "'", "base.kind");
}

GridField::GridField(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), values_(Eigen::VectorXd::Constant(Eigen::Index(rows) * cols, fill)) {}

GridField::GridField(const BaseManifold& mfld, double fill) : GridField(mfld.rows(), mfld.cols(), fill) {}

GridField::GridField(int rows, int cols, Eigen::VectorXd values) : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != Eigen::Index(rows) * cols) throw DomainError("GridField: value count does not match shape");
}

bool GridField::matches(const BaseManifold& mfld) const noexcept {
    return rows_ == mfld.rows() && cols_ == mfld.cols();
}

BaseManifold BaseManifold::build(const GridSpec& spec) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    BaseManifold m;
    m.spec_ = spec;
    if (spec.m1 < 8) throw ConfigError("grid size must be at least 8", "base.size");
    switch (spec.kind) {
        case BaseKind::torus1:
            m.rows_ = spec.m1;
            m.cols_ = 1;
            m.h1_ = two_pi / spec.m1;
            break;
        case BaseKind::torus2:
            if (spec.m2 < 8) throw ConfigError("grid size must be at least 8", "base.size");
            m.rows_ = spec.m1;
            m.cols_ = spec.m2;
            m.h1_ = two_pi / spec.m1;
            m.h2_ = two_pi / spec.m2;
            break;
        case BaseKind::sphere2:
            if (spec.m2 < 8) throw ConfigError("grid size must be at least 8", "base.size");
            if (spec.m2 % 2 != 0) throw ConfigError("sphere2 needs an even longitude count", "base.size");
            m.rows_ = spec.m1;
            m.cols_ = spec.m2;
            m.h1_ = std::numbers::pi / spec.m1;
            m.h2_ = two_pi / spec.m2;
            break;
        case BaseKind::axisym:
            m.rows_ = spec.m1;
            m.cols_ = 1;
            m.h1_ = std::numbers::pi / spec.m1;
            break;
    }
    if (m.is_sphere()) {
        m.sin_theta_.resize(static_cast<std::size_t>(m.rows_));
        m.cos_theta_.resize(static_cast<std::size_t>(m.rows_));
        for (int i = 0; i < m.rows_; ++i) {
            const double theta = (i + 0.5) * m.h1_;
            m.sin_theta_[static_cast<std::size_t>(i)] = std::sin(theta);
            m.cos_theta_[static_cast<std::size_t>(i)] = std::cos(theta);
        }
    }
    return m;
}

bool BaseManifold::periodic(int axis) const noexcept {
    switch (spec_.kind) {
        case BaseKind::torus1: return axis == 0;
        case BaseKind::torus2: return true;
        case BaseKind::sphere2: return axis == 1;
        case BaseKind::axisym: return false;
    }
    return false;
}

Coordinates BaseManifold::coordinates(Eigen::Index node) const {
    const int i = row_of(node);
    const int j = col_of(node);
    switch (spec_.kind) {
        case BaseKind::torus1: return {i * h1_, 0.0};
        case BaseKind::torus2: return {i * h1_, j * h2_};
        case BaseKind::sphere2: return {(i + 0.5) * h1_, j * h2_};
        case BaseKind::axisym: return {(i + 0.5) * h1_, 0.0};
    }
    return {0.0, 0.0};
}

MetricData BaseManifold::metric(Eigen::Index node) const {
    const int n = dimension();
    MetricData md;
    md.g = LocalVector::Ones(n);
    md.g_inv = LocalVector::Ones(n);
    for (auto& c : md.christoffel) c = LocalMatrix::Zero(n, n);
    if (is_sphere()) {
        const auto i = static_cast<std::size_t>(row_of(node));
        const double s = sin_theta_[i];
        const double c = cos_theta_[i];
        md.g(1) = s * s;
        md.g_inv(1) = 1.0 / (s * s);
        md.christoffel[0](1, 1) = -s * c;                            // Gamma^theta_{phi phi}
        md.christoffel[1](0, 1) = md.christoffel[1](1, 0) = c / s;  // Gamma^phi_{theta phi}
    }
    return md;
}

bool BaseManifold::pole_adjacent(Eigen::Index node) const noexcept {
    if (!is_sphere()) return false;
    const int i = row_of(node);
    return i == 0 || i == rows_ - 1;
}

Eigen::Index BaseManifold::wrapped(int i, int j) const noexcept {
    if (is_sphere()) {
        // Crossing a pole lands on the same latitude, half a turn in longitude.
        if (i < 0 || i >= rows_) {
            i = i < 0 ? -i - 1 : 2 * rows_ - i - 1;
            j += cols_ / 2;
        }
    } else {
        i = ((i % rows_) + rows_) % rows_;
    }
    j = ((j % cols_) + cols_) % cols_;
    return node(i, j);
}

CovariantData BaseManifold::covariant_data(const GridField& z, Eigen::Index p) const {
    const int n = dimension();
    const int i = row_of(p);
    const int j = col_of(p);
    auto at = [&](int di, int dj) { return z[wrapped(i + di, j + dj)]; };

    const double c = z[p];
    LocalVector d = LocalVector::Zero(n);
    LocalMatrix dd = LocalMatrix::Zero(n, n);
    d(0) = (at(1, 0) - at(-1, 0)) / (2.0 * h1_);
    dd(0, 0) = (at(1, 0) - 2.0 * c + at(-1, 0)) / (h1_ * h1_);
    if (cols_ > 1) {
        d(1) = (at(0, 1) - at(0, -1)) / (2.0 * h2_);
        dd(1, 1) = (at(0, 1) - 2.0 * c + at(0, -1)) / (h2_ * h2_);
        dd(0, 1) = dd(1, 0) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h1_ * h2_);
    }

    CovariantData out;
    if (!is_sphere()) {
        out.grad = d;
        out.hess = dd;
        return out;
    }
    const MetricData md = metric(p);
    LocalMatrix hess_chart = dd;
    for (int k = 0; k < n; ++k) hess_chart -= md.christoffel[static_cast<std::size_t>(k)] * d(k);
    const LocalVector scale = md.g_inv.cwiseSqrt();
    out.grad = d.cwiseProduct(scale);
    out.hess = scale.asDiagonal() * hess_chart * scale.asDiagonal();
    out.hess(0, 1) = out.hess(1, 0) = 0.5 * (out.hess(0, 1) + out.hess(1, 0));
    return out;
}

std::vector<Eigen::Index> BaseManifold::stencil(Eigen::Index p) const {
    const int i = row_of(p);
    const int j = col_of(p);
    std::vector<Eigen::Index> out;
    const int reach2 = cols_ > 1 ? 1 : 0;
    for (int di = -1; di <= 1; ++di)
        for (int dj = -reach2; dj <= reach2; ++dj) out.push_back(wrapped(i + di, j + dj));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace weingarten::basegrid
