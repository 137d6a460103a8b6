#pragma once

// Geometry of the graph {(z(u), u)} in I x_h M at a single point, from the
// warping values at t = z(u) and the orthonormal-frame derivatives of z.
// Uses the inward normal, <nu, d_t> < 0.

#include <Eigen/Dense>

#include <cmath>

#include "weingarten/basegrid.hpp"
#include "weingarten/errors.hpp"
#include "weingarten/warp.hpp"

namespace weingarten::graphgeom {

using basegrid::LocalMatrix;
using basegrid::LocalVector;

/// g_ij = h^2 delta_ij + z_i z_j
template <typename Scalar, typename DerivedG>
auto induced_metric(Scalar h, const Eigen::MatrixBase<DerivedG>& grad) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, DerivedG::MaxRowsAtCompileTime,
                              DerivedG::MaxRowsAtCompileTime>;
    Mat g = grad * grad.transpose();
    g.diagonal().array() += h * h;
    return g;
}

/// a_ij = (-h z_ij + 2 h' z_i z_j + h^2 h' delta_ij) / W,  W = sqrt(h^2 + |grad z|^2)
template <typename Scalar, typename DerivedG, typename DerivedH>
auto second_fundamental_form(Scalar h, Scalar hp, const Eigen::MatrixBase<DerivedG>& grad,
                             const Eigen::MatrixBase<DerivedH>& hess) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, DerivedG::MaxRowsAtCompileTime,
                              DerivedG::MaxRowsAtCompileTime>;
    using std::sqrt;
    const Scalar w = sqrt(h * h + grad.squaredNorm());
    Mat a = -h * hess + Scalar(2) * hp * grad * grad.transpose();
    a.diagonal().array() += h * h * hp;
    a /= w;
    return a;
}

/// Eigenvalues of g^{-1/2} a g^{-1/2} (the spectrum of g^{-1} a), descending.
/// Uses g^{-1/2} = I/h + (1/W - 1/h) e e^T with e = grad/|grad|.
template <typename Scalar, typename DerivedG, typename DerivedA>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, DerivedG::MaxRowsAtCompileTime, 1> shape_eigenvalues(
    Scalar h, const Eigen::MatrixBase<DerivedG>& grad, const Eigen::MatrixBase<DerivedA>& a) {
    constexpr int MaxN = DerivedG::MaxRowsAtCompileTime;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, MaxN, MaxN>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, MaxN, 1>;
    using std::abs;
    using std::hypot;
    using std::sqrt;
    if (!(h > Scalar(0))) throw GeometryError("induced metric is not positive definite (h <= 0)");
    const Eigen::Index n = grad.size();
    const Scalar grad2 = grad.squaredNorm();
    Mat root_inv = Mat::Identity(n, n) / h;
    if (grad2 > Scalar(0)) {
        const Scalar w = sqrt(h * h + grad2);
        root_inv += (Scalar(1) / w - Scalar(1) / h) * (grad * grad.transpose()) / grad2;
    }
    const Mat s = root_inv * a * root_inv;
    Vec kappa(n);
    if (n == 1) {
        kappa(0) = s(0, 0);
    } else if (n == 2) {
        const Scalar off = Scalar(0.5) * (s(0, 1) + s(1, 0));
        const Scalar mean = Scalar(0.5) * (s(0, 0) + s(1, 1));
        const Scalar rad = hypot(Scalar(0.5) * (s(0, 0) - s(1, 1)), off);
        kappa << mean + rad, mean - rad;
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> es(Scalar(0.5) * (s + s.transpose()), Eigen::EigenvaluesOnly);
        kappa = es.eigenvalues().reverse();
    }
    return kappa;
}

/// Per-point geometry bundle, all tensors in the orthonormal base frame.
struct PointFrame {
    double t = 0.0;       ///< z(u)
    double h = 0.0;
    double hp = 0.0;
    LocalVector grad;     ///< z_i
    LocalMatrix hess;     ///< z_ij
    double W = 0.0;       ///< sqrt(h^2 + |grad z|^2)
    LocalMatrix g;        ///< induced metric
    LocalMatrix a;        ///< second fundamental form
    LocalVector kappa;    ///< principal curvatures, descending
    double tau = 0.0;     ///< support function h^2 / W
    double eta = 0.0;     ///< eta(z(u)), anchored at t_min
    double nu_t = 0.0;    ///< <nu, d_t> = -h / W
};

/// Frame from pointwise data; discretisation-agnostic. `eta` is copied in.
PointFrame frame_from_derivatives(const warp::ProfileValues& pv, double t, const LocalVector& grad,
                                  const LocalMatrix& hess, double eta = 0.0);

struct FrameOptions {
    bool with_eta = true;  ///< eta may need quadrature for custom profiles
};

/// Geometry at a grid node. Throws DomainError when z(node) leaves the interval.
PointFrame point_geometry(const warp::WarpProfile& p, const basegrid::BaseManifold& mfld,
                          const basegrid::GridField& z, Eigen::Index node, FrameOptions opts = {});

/// Principal curvatures of a frame (recomputed from g and a).
LocalVector principal_curvatures(const PointFrame& frame);

struct SupportMonitor {
    double tau_min = 0.0;
    double gradmax = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
};

SupportMonitor support_and_gradient_monitor(const warp::WarpProfile& p, const basegrid::BaseManifold& mfld,
                                            const basegrid::GridField& z);

}  // namespace weingarten::graphgeom
