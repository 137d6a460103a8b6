#pragma once

// Structured grids over the compact base (M, g'): the flat circle and 2-torus,
// the round 2-sphere in latitude-longitude coordinates, and an axisymmetric
// reduction of the sphere. Covariant derivatives of grid fields are returned in
// the orthonormal frame e_i = d_i / sqrt(g'_ii) of the (diagonal) chart metric.

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace weingarten::basegrid {

enum class BaseKind { torus1, torus2, sphere2, axisym };

std::string to_string(BaseKind kind);
BaseKind base_kind_from_string(const std::string& name);

/// Grid sizes: `m1` along the first coordinate (u1 or theta), `m2` along the
/// second (u2 or phi). One-dimensional kinds ignore m2.
struct GridSpec {
    BaseKind kind = BaseKind::torus1;
    int m1 = 64;
    int m2 = 1;
};

inline constexpr int kMaxDim = 2;
using LocalVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Coordinates = std::array<double, kMaxDim>;

/// Chart metric g' (diagonal in all supported charts), its inverse, and the
/// Christoffel symbols christoffel[k](i, j) = Gamma^k_ij.
struct MetricData {
    LocalVector g;
    LocalVector g_inv;
    std::array<LocalMatrix, kMaxDim> christoffel;
};

/// Gradient and covariant Hessian of a field at a node, orthonormal frame.
struct CovariantData {
    LocalVector grad;
    LocalMatrix hess;
};

class BaseManifold;

/// One value per grid node, row-major in (first, second) coordinate index.
class GridField {
public:
    GridField() = default;
    GridField(int rows, int cols, double fill = 0.0);
    explicit GridField(const BaseManifold& mfld, double fill = 0.0);
    GridField(int rows, int cols, Eigen::VectorXd values);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    Eigen::Index size() const noexcept { return values_.size(); }

    const Eigen::VectorXd& values() const noexcept { return values_; }
    Eigen::VectorXd& values() noexcept { return values_; }
    double operator[](Eigen::Index node) const { return values_(node); }
    double& operator[](Eigen::Index node) { return values_(node); }

    bool matches(const BaseManifold& mfld) const noexcept;
    bool all_finite() const noexcept { return values_.allFinite(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    Eigen::VectorXd values_;
};

/// Immutable discretised base manifold.
class BaseManifold {
public:
    /// Throws ConfigError for sizes below 8, or an odd longitude count on sphere2.
    static BaseManifold build(const GridSpec& spec);

    BaseKind kind() const noexcept { return spec_.kind; }
    const GridSpec& spec() const noexcept { return spec_; }
    /// Dimension n of the base (and of the hypersurface).
    int dimension() const noexcept { return spec_.kind == BaseKind::torus1 ? 1 : 2; }
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    Eigen::Index size() const noexcept { return Eigen::Index(rows_) * cols_; }
    Eigen::Index node(int i, int j) const noexcept { return Eigen::Index(i) * cols_ + j; }
    int row_of(Eigen::Index node) const noexcept { return static_cast<int>(node / cols_); }
    int col_of(Eigen::Index node) const noexcept { return static_cast<int>(node % cols_); }

    /// Grid step along axis 0 or 1 (radians or flat units).
    double spacing(int axis) const noexcept { return axis == 0 ? h1_ : h2_; }
    /// Chart coordinates of a node: (u1, u2) on tori, (theta, phi) on spheres.
    Coordinates coordinates(Eigen::Index node) const;
    MetricData metric(Eigen::Index node) const;
    bool periodic(int axis) const noexcept;
    bool is_sphere() const noexcept { return spec_.kind == BaseKind::sphere2 || spec_.kind == BaseKind::axisym; }

    /// True on the latitude rows nearest a pole, where the 1/sin(theta) frame
    /// factors reduce stencil accuracy to first order.
    bool pole_adjacent(Eigen::Index node) const noexcept;

    /// Second-order centred differences converted to the orthonormal frame.
    CovariantData covariant_data(const GridField& z, Eigen::Index node) const;

    /// Nodes whose values enter covariant_data at `node` (sorted, unique).
    std::vector<Eigen::Index> stencil(Eigen::Index node) const;

    /// Sample f(coordinates) at every node.
    template <typename F>
    GridField sample(F&& f) const {
        GridField out(*this);
        for (Eigen::Index p = 0; p < size(); ++p) out[p] = f(coordinates(p));
        return out;
    }

private:
    BaseManifold() = default;
    /// Node index of (i, j) after periodic wrap and pole reflection.
    Eigen::Index wrapped(int i, int j) const noexcept;

    GridSpec spec_;
    int rows_ = 0;
    int cols_ = 1;
    double h1_ = 0.0;
    double h2_ = 0.0;
    std::vector<double> sin_theta_;
    std::vector<double> cos_theta_;
};

inline BaseManifold build_grid(const GridSpec& spec) { return BaseManifold::build(spec); }

inline CovariantData covariant_data(const BaseManifold& mfld, const GridField& z, Eigen::Index node) {
    return mfld.covariant_data(z, node);
}

}  // namespace weingarten::basegrid
