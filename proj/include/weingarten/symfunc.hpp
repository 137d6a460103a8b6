#pragma once

// Elementary symmetric functions sigma_k of a curvature vector, their first and
// second partial derivatives, membership in the Garding cone Gamma_k, and the
// algebraic inequalities that the curvature estimates rely on.
//
// All functions take any Eigen column expression and are templated on its
// scalar type. Inputs are canonicalised by sorting before any arithmetic, so
// results are bitwise invariant under permutation of the entries.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "weingarten/errors.hpp"

namespace weingarten::symfunc {

template <typename Scalar>
using KappaVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using SymMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Order and openness of a cone membership query. `margin` shifts the
/// threshold: strict mode tests sigma_m > margin, closed mode sigma_m >= margin.
struct ConeQuery {
    int k = 1;
    bool strict = true;
    double margin = 0.0;
};

/// Binomial coefficient C(n, k) as a floating value; 0 outside 0 <= k <= n.
template <typename Scalar = double>
Scalar binomial(int n, int k) {
    if (k < 0 || k > n) return Scalar(0);
    k = std::min(k, n - k);
    Scalar c(1);
    for (int i = 1; i <= k; ++i) c = c * Scalar(n - k + i) / Scalar(i);
    return c;
}

namespace detail {

template <typename Derived>
KappaVector<typename Derived::Scalar> sorted_copy(const Eigen::MatrixBase<Derived>& kappa) {
    KappaVector<typename Derived::Scalar> v = kappa;
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    return v;
}

// e_0..e_max_order of the entries of `v` whose index is not skip1/skip2,
// by the product-expansion recurrence e_j <- e_j + x e_{j-1}.
template <typename Scalar>
KappaVector<Scalar> elementary_skip(const KappaVector<Scalar>& v, int max_order, Eigen::Index skip1 = -1,
                                    Eigen::Index skip2 = -1) {
    KappaVector<Scalar> e = KappaVector<Scalar>::Zero(max_order + 1);
    e(0) = Scalar(1);
    int seen = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i == skip1 || i == skip2) continue;
        ++seen;
        for (int j = std::min(seen, max_order); j >= 1; --j) e(j) += v(i) * e(j - 1);
    }
    return e;
}

inline void check_order(int k, Eigen::Index n, int lo, const char* op) {
    if (k < lo || k > n) {
        throw DomainError(std::string(op) + ": order k=" + std::to_string(k) + " outside [" + std::to_string(lo) +
                          ", " + std::to_string(n) + "]");
    }
}

}  // namespace detail

/// All elementary symmetric values e_0 .. e_{max_order}; orders above n are 0.
template <typename Derived>
KappaVector<typename Derived::Scalar> elementary_symmetric(const Eigen::MatrixBase<Derived>& kappa, int max_order) {
    if (max_order < 0) throw DomainError("elementary_symmetric: negative order");
    return detail::elementary_skip(detail::sorted_copy(kappa), max_order);
}

/// sigma_k(kappa): sum of all k-fold products of distinct entries, sigma_0 = 1.
template <typename Derived>
typename Derived::Scalar sigma(const Eigen::MatrixBase<Derived>& kappa, int k) {
    detail::check_order(k, kappa.size(), 0, "sigma");
    return detail::elementary_skip(detail::sorted_copy(kappa), k)(k);
}

/// d sigma_k / d kappa_i = sigma_{k-1}(kappa | i).
template <typename Derived>
KappaVector<typename Derived::Scalar> sigma_grad(const Eigen::MatrixBase<Derived>& kappa, int k) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = kappa.size();
    detail::check_order(k, n, 1, "sigma_grad");
    KappaVector<Scalar> grad(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        KappaVector<Scalar> rest(n - 1);
        for (Eigen::Index j = 0, r = 0; j < n; ++j)
            if (j != i) rest(r++) = kappa(j);
        std::sort(rest.data(), rest.data() + rest.size(), std::greater<>());
        grad(i) = detail::elementary_skip(rest, k - 1)(k - 1);
    }
    return grad;
}

/// d^2 sigma_k / d kappa_p d kappa_q = sigma_{k-2}(kappa | p, q) off the
/// diagonal; the diagonal vanishes since sigma_k is affine in each entry.
template <typename Derived>
SymMatrix<typename Derived::Scalar> sigma_hess(const Eigen::MatrixBase<Derived>& kappa, int k) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = kappa.size();
    detail::check_order(k, n, 1, "sigma_hess");
    SymMatrix<Scalar> hess = SymMatrix<Scalar>::Zero(n, n);
    if (k < 2) return hess;
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
            KappaVector<Scalar> rest(n - 2);
            for (Eigen::Index j = 0, r = 0; j < n; ++j)
                if (j != p && j != q) rest(r++) = kappa(j);
            std::sort(rest.data(), rest.data() + rest.size(), std::greater<>());
            hess(p, q) = hess(q, p) = detail::elementary_skip(rest, k - 2)(k - 2);
        }
    }
    return hess;
}

/// Membership of kappa in Gamma_k = {sigma_m > 0, m = 1..k}.
template <typename Derived>
bool in_gamma_k(const Eigen::MatrixBase<Derived>& kappa, const ConeQuery& q) {
    using Scalar = typename Derived::Scalar;
    if (q.k < 1 || q.k > kappa.size()) return false;
    const KappaVector<Scalar> e = elementary_symmetric(kappa, q.k);
    for (int m = 1; m <= q.k; ++m) {
        if (!std::isfinite(static_cast<double>(e(m)))) return false;
        if (q.strict ? !(e(m) > Scalar(q.margin)) : !(e(m) >= Scalar(q.margin))) return false;
    }
    return true;
}

/// F(kappa) = (sigma_k / C(n,k))^{1/k}; degree-one homogeneous and concave on Gamma_k.
template <typename Derived>
typename Derived::Scalar normalized_f(const Eigen::MatrixBase<Derived>& kappa, int k) {
    using Scalar = typename Derived::Scalar;
    const auto n = static_cast<int>(kappa.size());
    detail::check_order(k, n, 1, "normalized_f");
    if (!in_gamma_k(kappa, ConeQuery{k})) throw AdmissibilityError("normalized_f: kappa outside Gamma_k");
    using std::pow;
    return pow(sigma(kappa, k) / binomial<Scalar>(n, k), Scalar(1) / Scalar(k));
}

/// Second derivative of F = sigma_k as a function of a symmetric matrix with
/// eigenvalues kappa, contracted twice with B expressed in the eigenbasis:
///
///   sum_{i,j} f_ij b_ii b_jj + sum_{i != j} (f_i - f_j) / (kappa_i - kappa_j) b_ij^2
///
/// Divided differences across gaps below `gap_threshold` are replaced by their
/// limit f_ii - f_ij. A negative threshold selects the default 1e-8 (1 + |kappa|_inf).
template <typename Derived, typename DerivedB>
typename Derived::Scalar quad_form_second_derivative(const Eigen::MatrixBase<Derived>& kappa,
                                                     const Eigen::MatrixBase<DerivedB>& b, int k,
                                                     double gap_threshold = -1.0) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = kappa.size();
    detail::check_order(k, n, 1, "quad_form_second_derivative");
    if (b.rows() != n || b.cols() != n) throw DomainError("quad_form_second_derivative: B shape mismatch");
    using std::abs;
    const Scalar gap = gap_threshold >= 0.0 ? Scalar(gap_threshold)
                                            : Scalar(1e-8) * (Scalar(1) + kappa.cwiseAbs().maxCoeff());
    const KappaVector<Scalar> f1 = sigma_grad(kappa, k);
    const SymMatrix<Scalar> f2 = sigma_hess(kappa, k);

    Scalar total(0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) total += f2(i, j) * b(i, i) * b(j, j);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const Scalar dk = kappa(i) - kappa(j);
            const Scalar divided = abs(dk) < gap ? f2(i, i) - f2(i, j) : (f1(i) - f1(j)) / dk;
            total += divided * b(i, j) * b(i, j);
        }
    }
    return total;
}

/// Both sides of an inequality and whether lhs >= rhs within tolerance.
struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

namespace detail {

template <typename Scalar>
struct GrwTerms {
    Scalar sk, sl;          // sigma_k(W), sigma_l(W)
    Scalar dk, dl;          // (sigma_k)_h, (sigma_l)_h
    Scalar qk, ql;          // sigma^{pp,qq} w_pph w_qqh for orders k and l
    Scalar alpha;
};

template <typename Derived, typename DerivedW>
GrwTerms<typename Derived::Scalar> grw_terms(const Eigen::MatrixBase<Derived>& w_diag,
                                             const Eigen::MatrixBase<DerivedW>& w_h, int k, int l) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = w_diag.size();
    check_order(k, n, 1, "check_grw_inequality");
    if (l < 0 || l >= k) throw DomainError("check_grw_inequality: need 0 <= l < k");
    if (w_h.size() != n) throw DomainError("check_grw_inequality: w_h size mismatch");
    if (!in_gamma_k(w_diag, ConeQuery{k})) throw AdmissibilityError("check_grw_inequality: W outside Gamma_k");

    GrwTerms<Scalar> t{};
    t.alpha = Scalar(1) / Scalar(k - l);
    t.sk = sigma(w_diag, k);
    t.sl = sigma(w_diag, l);
    if (t.sl == Scalar(0)) throw NumericError("check_grw_inequality: sigma_l(W) vanishes");
    const KappaVector<Scalar> xi = w_h;
    t.dk = sigma_grad(w_diag, k).dot(xi);
    t.qk = xi.dot(sigma_hess(w_diag, k) * xi);
    if (l == 0) {
        t.dl = Scalar(0);
        t.ql = Scalar(0);
    } else {
        t.dl = sigma_grad(w_diag, l).dot(xi);
        t.ql = xi.dot(sigma_hess(w_diag, l) * xi);
    }
    return t;
}

inline bool within(double lhs, double rhs, double rel_tol) {
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return lhs >= rhs - rel_tol * scale;
}

}  // namespace detail

/// Concavity inequality for (sigma_k / sigma_l)^{1/(k-l)} at a diagonal W in
/// Gamma_k, tested along the direction w_h = (w_11h, ..., w_nnh):
///
///   -sigma_k^{pp,qq}/sigma_k w w + sigma_l^{pp,qq}/sigma_l w w
///       >= (A - B)((alpha - 1) A - (alpha + 1) B),   A = (sigma_k)_h/sigma_k, B = (sigma_l)_h/sigma_l.
template <typename Derived, typename DerivedW>
InequalityReport check_grw_inequality(const Eigen::MatrixBase<Derived>& w_diag, const Eigen::MatrixBase<DerivedW>& w_h,
                                      int k, int l, double rel_tol = 1e-9) {
    const auto t = detail::grw_terms(w_diag, w_h, k, l);
    const auto a = t.dk / t.sk;
    const auto b = t.dl / t.sl;
    InequalityReport r;
    r.lhs = static_cast<double>(-t.qk / t.sk + t.ql / t.sl);
    r.rhs = static_cast<double>((a - b) * ((t.alpha - 1) * a - (t.alpha + 1) * b));
    r.holds = detail::within(r.lhs, r.rhs, rel_tol);
    return r;
}

/// Companion form with the cross term split by delta > 0:
///
///   -sigma_k^{pp,qq} w w + (1 - alpha + alpha/delta) (sigma_k)_h^2 / sigma_k
///       >= sigma_k (alpha + 1 - delta alpha) B^2 - sigma_k/sigma_l sigma_l^{pp,qq} w w.
template <typename Derived, typename DerivedW>
InequalityReport check_grw_inequality_delta(const Eigen::MatrixBase<Derived>& w_diag,
                                            const Eigen::MatrixBase<DerivedW>& w_h, int k, int l, double delta,
                                            double rel_tol = 1e-9) {
    if (!(delta > 0.0)) throw DomainError("check_grw_inequality_delta: delta must be positive");
    const auto t = detail::grw_terms(w_diag, w_h, k, l);
    const auto b = t.dl / t.sl;
    InequalityReport r;
    r.lhs = static_cast<double>(-t.qk + (1 - t.alpha + t.alpha / delta) * t.dk * t.dk / t.sk);
    r.rhs = static_cast<double>(t.sk * (t.alpha + 1 - delta * t.alpha) * b * b - t.sk / t.sl * t.ql);
    r.holds = detail::within(r.lhs, r.rhs, rel_tol);
    return r;
}

struct NewtonMaclaurinReport {
    /// (sigma_{k-1}/C)(sigma_{k+1}/C) <= (sigma_k/C)^2
    InequalityReport newton;
    /// (sigma_k/C)^{1/k} <= (sigma_{k-1}/C)^{1/(k-1)}; vacuous (holds) for k = 1.
    InequalityReport maclaurin;
    bool holds = false;
};

/// Newton and Maclaurin inequalities between normalised sigma_{k-1}, sigma_k,
/// sigma_{k+1}. In each report, `lhs` is the larger side.
template <typename Derived>
NewtonMaclaurinReport check_newton_maclaurin(const Eigen::MatrixBase<Derived>& kappa, int k, double rel_tol = 1e-12) {
    using Scalar = typename Derived::Scalar;
    const auto n = static_cast<int>(kappa.size());
    if (k < 1 || k > n - 1) throw DomainError("check_newton_maclaurin: need 1 <= k <= n-1");
    if (!in_gamma_k(kappa, ConeQuery{k})) throw AdmissibilityError("check_newton_maclaurin: kappa outside Gamma_k");
    const KappaVector<Scalar> e = elementary_symmetric(kappa, k + 1);
    auto normed = [&](int m) { return static_cast<double>(e(m) / binomial<Scalar>(n, m)); };

    NewtonMaclaurinReport r;
    r.newton.lhs = normed(k) * normed(k);
    r.newton.rhs = normed(k - 1) * normed(k + 1);
    r.newton.holds = detail::within(r.newton.lhs, r.newton.rhs, rel_tol);
    if (k >= 2) {
        r.maclaurin.lhs = std::pow(normed(k - 1), 1.0 / (k - 1));
        r.maclaurin.rhs = std::pow(normed(k), 1.0 / k);
        r.maclaurin.holds = detail::within(r.maclaurin.lhs, r.maclaurin.rhs, rel_tol);
    } else {
        r.maclaurin.holds = true;
    }
    r.holds = r.newton.holds && r.maclaurin.holds;
    return r;
}

}  // namespace weingarten::symfunc
