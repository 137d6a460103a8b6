#include "weingarten/graphgeom.hpp"

#include <algorithm>
#include <limits>

namespace weingarten::graphgeom {

PointFrame frame_from_derivatives(const warp::ProfileValues& pv, double t, const LocalVector& grad,
                                  const LocalMatrix& hess, double eta) {
    PointFrame f;
    f.t = t;
    f.h = pv.h;
    f.hp = pv.hp;
    f.grad = grad;
    f.hess = hess;
    f.W = std::sqrt(pv.h * pv.h + grad.squaredNorm());
    f.g = induced_metric(pv.h, grad);
    f.a = second_fundamental_form(pv.h, pv.hp, grad, hess);
    f.kappa = shape_eigenvalues(pv.h, grad, f.a);
    f.tau = pv.h * pv.h / f.W;
    f.eta = eta;
    f.nu_t = -pv.h / f.W;
    return f;
}

PointFrame point_geometry(const warp::WarpProfile& p, const basegrid::BaseManifold& mfld,
                          const basegrid::GridField& z, Eigen::Index node, FrameOptions opts) {
    const double t = z[node];
    const warp::ProfileValues pv = p.eval(t);
    const basegrid::CovariantData cd = mfld.covariant_data(z, node);
    return frame_from_derivatives(pv, t, cd.grad, cd.hess, opts.with_eta ? p.eta(t) : 0.0);
}

LocalVector principal_curvatures(const PointFrame& frame) {
    Eigen::LLT<LocalMatrix> llt(frame.g);
    if (llt.info() != Eigen::Success || !(frame.h > 0.0))
        throw GeometryError("principal_curvatures: induced metric is not positive definite");
    return shape_eigenvalues(frame.h, frame.grad, frame.a);
}

SupportMonitor support_and_gradient_monitor(const warp::WarpProfile& p, const basegrid::BaseManifold& mfld,
                                            const basegrid::GridField& z) {
    SupportMonitor m;
    m.tau_min = std::numeric_limits<double>::infinity();
    m.z_min = std::numeric_limits<double>::infinity();
    m.z_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index node = 0; node < mfld.size(); ++node) {
        const double t = z[node];
        const double h = p.eval(t).h;
        const basegrid::CovariantData cd = mfld.covariant_data(z, node);
        const double grad_norm = cd.grad.norm();
        m.tau_min = std::min(m.tau_min, h * h / std::sqrt(h * h + grad_norm * grad_norm));
        m.gradmax = std::max(m.gradmax, grad_norm);
        m.z_min = std::min(m.z_min, t);
        m.z_max = std::max(m.z_max, t);
    }
    return m;
}

}  // namespace weingarten::graphgeom
