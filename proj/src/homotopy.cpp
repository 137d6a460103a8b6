#include "weingarten/homotopy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "weingarten/errors.hpp"
#include "weingarten/symfunc.hpp"

namespace weingarten::homotopy {

namespace {

constexpr int kPhiSamples = 1000;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Running minimum of a margin with its location.
struct Worst {
    double margin = std::numeric_limits<double>::infinity();
    double t = 0.0;
    basegrid::Coordinates x{};
    double nu_t = 0.0;
    int samples = 0;

    void offer(double m, double at_t, const basegrid::Coordinates& at_x = {}, double at_nu = 0.0) {
        ++samples;
        if (m < margin || std::isnan(m)) {
            margin = m;
            t = at_t;
            x = at_x;
            nu_t = at_nu;
        }
    }

    ConditionReport report(std::string name, std::string description, bool strict, double tol = 0.0) const {
        ConditionReport r;
        r.name = std::move(name);
        r.description = std::move(description);
        r.samples = samples;
        if (samples == 0) {
            r.passed = true;
            r.margin = 0.0;
            return r;
        }
        r.margin = margin;
        r.passed = strict ? margin > 0.0 : margin >= -tol;
        r.worst_t = t;
        r.worst_x = x;
        r.worst_nu_t = nu_t;
        return r;
    }
};

std::vector<ConditionReport> phi_conditions(const PhiSpec& phi, double lo, double hi) {
    Worst positive, above, below, decreasing;
    auto sample = [&](double t) {
        const double v = phi(t);
        positive.offer(v, t);
        if (t <= phi.t_minus) above.offer(v - 1.0, t);
        if (t >= phi.t_plus) below.offer(1.0 - v, t);
        decreasing.offer(-phi.derivative(t), t);
    };
    for (int i = 1; i <= kPhiSamples; ++i) sample(lo + (hi - lo) * i / (kPhiSamples + 1.0));
    sample(phi.t_minus);
    sample(phi.t_plus);
    return {positive.report("phi_positive", "(i) phi > 0 on I", true),
            above.report("phi_above_one", "(ii) phi > 1 for t <= t_minus", true),
            below.report("phi_below_one", "(iii) phi < 1 for t >= t_plus", true),
            decreasing.report("phi_decreasing", "(iv) phi' < 0 on I", true)};
}

ConditionReport phi_convexity(const PhiSpec& phi, int k) {
    Worst w;
    constexpr int samples = 200;
    for (int i = 0; i <= samples; ++i) {
        const double t = phi.t_minus + (phi.t_plus - phi.t_minus) * i / samples;
        const double v = phi(t);
        const double d1 = phi.derivative(t);
        const double d2 = phi.second_derivative(t);
        w.offer(std::min(v * d2 - (k - 1.0) / k * d1 * d1, -d1), t);
    }
    return w.report("phi_convexity_k" + std::to_string(k),
                    "phi' < 0 and phi phi'' > ((k-1)/k) phi'^2 on [t_minus, t_plus], k=" + std::to_string(k), true);
}

}  // namespace

double PhiSpec::derivative(double t) const {
    return psiexpr::richardson_derivative([this](double s) { return (*this)(s); }, t);
}

double PhiSpec::second_derivative(double t) const {
    const double h = 1e-4 * (1.0 + std::abs(t));
    return ((*this)(t + h) - 2.0 * (*this)(t) + (*this)(t - h)) / (h * h);
}

std::string default_phi_expression(double t_minus, double t_plus) {
    return "exp(" + fmt17(0.5 * (t_minus + t_plus)) + " - t)";
}

PhiSpec build_phi(double t_minus, double t_plus, double lo, double hi, const std::optional<std::string>& expr) {
    if (!(t_minus < t_plus) || !(lo < t_minus) || !(t_plus < hi))
        throw DomainError("build_phi: need lo < t_minus < t_plus < hi");
    PhiSpec phi;
    phi.t_minus = t_minus;
    phi.t_plus = t_plus;
    phi.expr = psiexpr::Expression::parse(expr.value_or(default_phi_expression(t_minus, t_plus)));
    for (const auto& v : phi.expr.free_variables())
        if (v.kind != psiexpr::Variable::Kind::t) throw DomainError("phi may only depend on t");

    for (const auto& c : phi_conditions(phi, lo, hi)) {
        if (!c.passed)
            throw ValidationError(c.description, c.worst_t, "margin " + fmt17(c.margin));
    }
    double a = t_minus;
    double b = t_plus;
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        (phi(m) > 1.0 ? a : b) = m;
    }
    phi.t0 = std::abs(phi(a) - 1.0) <= std::abs(phi(b) - 1.0) ? a : b;
    return phi;
}

std::string to_string(Mode mode) { return mode == Mode::linear ? "linear" : "inverse_k_power"; }

Mode mode_from_string(const std::string& name) {
    if (name == "linear") return Mode::linear;
    if (name == "inverse_k_power") return Mode::inverse_k_power;
    throw DomainError("unknown homotopy mode '" + name + "'");
}

double barrier_target(const PhiSpec& phi, const warp::WarpProfile& profile, int n, int k, double t) {
    return symfunc::binomial(n, k) * phi(t) * std::pow(profile.slice_curvature(t), k);
}

Prescribed barrier_psi(const PhiSpec& phi, const warp::WarpProfile& profile, int n, int k, double scale,
                       const std::optional<psiexpr::Expression>& modulation) {
    Prescribed p;
    p.label = (scale == 1.0 ? std::string() : fmt17(scale) + "*") + "phibar" +
              (modulation ? "*(" + modulation->source() + ")" : std::string());
    p.depends_on_normal = modulation && modulation->depends_on(psiexpr::Variable::normal());
    p.value = [phi, profile, n, k, scale, modulation](const PsiPoint& q) {
        double v = scale * barrier_target(phi, profile, n, k, q.t);
        if (modulation) {
            psiexpr::Bindings b;
            b.t = q.t;
            b.nu_t = q.nu_t;
            for (int i = 0; i < n; ++i) b.x[static_cast<std::size_t>(i)] = q.x[static_cast<std::size_t>(i)];
            v *= modulation->eval(b);
        }
        return v;
    };
    return p;
}

double psi_s(const HomotopyConfig& cfg, const warp::WarpProfile& profile, int n, double s, const PsiPoint& at) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("psi_s: s outside [0, 1]");
    if (s == 1.0) return cfg.target(at);
    const double bar = barrier_target(cfg.phi, profile, n, cfg.k, at.t);
    if (s == 0.0) return bar;
    const double psi = cfg.target(at);
    if (cfg.mode == Mode::linear) return s * psi + (1.0 - s) * bar;
    if (!(psi > 0.0)) throw DomainError("psi_s: inverse_k_power mode needs psi > 0");
    const double inv = 1.0 / cfg.k;
    return std::pow(s * std::pow(psi, -inv) + (1.0 - s) * std::pow(bar, -inv), -static_cast<double>(cfg.k));
}

Prescribed homotopy_psi(const HomotopyConfig& cfg, const warp::WarpProfile& profile, int n, double s) {
    Prescribed p;
    p.label = "psi^s(" + fmt17(s) + ")";
    p.depends_on_normal = cfg.target.depends_on_normal;
    p.value = [cfg, profile, n, s](const PsiPoint& q) { return psi_s(cfg, profile, n, s, q); };
    return p;
}

ContinuationResult continue_path(const HomotopyConfig& cfg, const pde::SolverState& state) {
    const int n = state.mfld.dimension();
    pde::SolverState st = state;
    st.k = cfg.k;
    ContinuationResult out;
    out.z = state.z;

    auto attempt = [&](double s, const pde::GridField& from) -> std::optional<pde::NewtonResult> {
        st.z = from;
        st.psi = homotopy_psi(cfg, state.profile, n, s);
        try {
            pde::NewtonResult r = pde::newton_iterate(st);
            if (r.converged()) return r;
        } catch (const AdmissibilityError&) {
        } catch (const DomainError&) {
        } catch (const NumericError&) {
        }
        return std::nullopt;
    };
    auto accept = [&](double s, const pde::NewtonResult& r) {
        StepRecord rec;
        rec.s = s;
        rec.newton_iterations = r.iterations;
        rec.iterates = r.history;
        rec.final = r.history.back();
        out.steps.push_back(std::move(rec));
        out.z = r.z;
        out.last_good_s = s;
    };

    const auto start = attempt(0.0, state.z);
    if (!start) {
        out.message = "initial field does not solve the s=0 problem";
        out.last_good_s = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    accept(0.0, *start);

    double s = 0.0;
    double ds = cfg.initial_step;
    while (s < 1.0) {
        const double s_try = std::min(1.0, s + ds);
        if (const auto r = attempt(s_try, out.z)) {
            s = s_try;
            accept(s, *r);
            ds = std::min(cfg.max_step, ds * cfg.growth);
        } else {
            ++out.failed_attempts;
            ds *= 0.5;
            if (ds < cfg.min_step) {
                out.message = "continuation step fell below " + fmt17(cfg.min_step) + " after s=" + fmt17(s);
                return out;
            }
        }
    }
    out.success = true;
    out.message = "reached s=1";
    return out;
}

const ConditionReport* HypothesisReport::find(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

const ConditionReport* HypothesisReport::first_failure() const {
    for (const auto& c : conditions)
        if (!c.passed && !c.advisory) return &c;
    return nullptr;
}

double min_ambient_convexity(const std::function<double(double, const basegrid::Coordinates&)>& f,
                             const warp::WarpProfile& profile, const basegrid::BaseManifold& mfld, double t,
                             basegrid::Coordinates* worst) {
    const int n = mfld.dimension();
    const double dt = 1e-4 * (1.0 + std::abs(t));
    const auto f0 = mfld.sample([&](const auto& x) { return f(t, x); });
    const auto fp = mfld.sample([&](const auto& x) { return f(t + dt, x); });
    const auto fm = mfld.sample([&](const auto& x) { return f(t - dt, x); });
    const warp::ProfileValues pv = profile.eval(t);
    const double lambda = profile.ambient_curvature();

    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index node = 0; node < mfld.size(); ++node) {
        const auto c0 = mfld.covariant_data(f0, node);
        const auto cp = mfld.covariant_data(fp, node);
        const auto cm = mfld.covariant_data(fm, node);
        const double v = f0[node];
        const double ft = (fp[node] - fm[node]) / (2.0 * dt);
        const double ftt = (fp[node] - 2.0 * v + fm[node]) / (dt * dt);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
        m(0, 0) = ftt + lambda * v;
        for (int i = 0; i < n; ++i) {
            const double fti = (cp.grad(i) - cm.grad(i)) / (2.0 * dt);
            m(0, i + 1) = m(i + 1, 0) = fti / pv.h - pv.hp * c0.grad(i) / (pv.h * pv.h);
            for (int j = 0; j < n; ++j) m(i + 1, j + 1) = c0.hess(i, j) / (pv.h * pv.h);
            m(i + 1, i + 1) += pv.hp / pv.h * ft + lambda * v;
        }
        const double low = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
        if (low < best) {
            best = low;
            if (worst) *worst = mfld.coordinates(node);
        }
    }
    return best;
}

HypothesisReport check_hypotheses(const HomotopyConfig& cfg, const warp::WarpProfile& profile,
                                  const basegrid::BaseManifold& mfld, const HypothesisOptions& opts) {
    const int n = mfld.dimension();
    const int k = cfg.k;
    const double ck = symfunc::binomial(n, k);
    HypothesisReport rep;

    for (auto& c : phi_conditions(cfg.phi, profile.t_min(), profile.t_max())) rep.conditions.push_back(std::move(c));
    if (profile.kind() == warp::AmbientKind::sphere) {
        const std::vector<int> orders = opts.convexity_orders.empty() ? std::vector<int>{k} : opts.convexity_orders;
        for (int order : orders) rep.conditions.push_back(phi_convexity(cfg.phi, order));
    }

    std::vector<double> nus = opts.nu_samples;
    if (!cfg.target.depends_on_normal) {
        nus = {-1.0};
    } else if (nus.empty()) {
        for (int i = 0; i < 32; ++i) nus.push_back(-1.0 + 0.95 * i / 31.0);
    }
    const int nt = std::max(1, opts.t_samples);

    auto for_points = [&](double t, auto&& fn) {
        for (Eigen::Index node = 0; node < mfld.size(); ++node) {
            const auto x = mfld.coordinates(node);
            for (double nu : nus) fn(PsiPoint{t, x, nu, node});
        }
    };

    Worst a, b, c;
    for (int j = 1; j <= nt && profile.t_min() < cfg.phi.t_minus; ++j) {
        const double t = profile.t_min() + (cfg.phi.t_minus - profile.t_min()) * j / nt;
        if (!profile.contains(t)) continue;
        const double umbilic = ck * std::pow(profile.slice_curvature(t), k);
        for_points(t, [&](const PsiPoint& q) { a.offer(cfg.target(q) / umbilic - 1.0, t, q.x, q.nu_t); });
    }
    for (int j = 0; j < nt && cfg.phi.t_plus < profile.t_max(); ++j) {
        const double t = cfg.phi.t_plus + (profile.t_max() - cfg.phi.t_plus) * j / nt;
        if (!profile.contains(t)) continue;
        const double umbilic = ck * std::pow(profile.slice_curvature(t), k);
        for_points(t, [&](const PsiPoint& q) { b.offer(1.0 - cfg.target(q) / umbilic, t, q.x, q.nu_t); });
    }
    for (int j = 1; j <= 2 * nt; ++j) {
        const double t = cfg.phi.t_minus + (cfg.phi.t_plus - cfg.phi.t_minus) * j / (2.0 * nt + 1.0);
        for_points(t, [&](const PsiPoint& q) {
            auto weighted = [&](double s) {
                PsiPoint at = q;
                at.t = s;
                return std::pow(profile.eval(s).h, k) * cfg.target(at);
            };
            const double d = psiexpr::richardson_derivative(weighted, t);
            c.offer(-d / weighted(t), t, q.x, q.nu_t);
        });
    }
    rep.conditions.push_back(a.report("barrier_a", "(a) psi > C(n,k) kappa(t)^k for t <= t_minus", true));
    rep.conditions.push_back(b.report("barrier_b", "(b) psi < C(n,k) kappa(t)^k for t >= t_plus", true));
    rep.conditions.push_back(
        c.report("monotone_c", "(c) d/dt (h^k psi) <= 0 on (t_minus, t_plus); margin is -d/dt log(h^k psi)", false,
                 1e-9));

    if (profile.kind() == warp::AmbientKind::sphere && mfld.is_sphere()) {
        auto surrogate = [&](const std::string& name, const std::string& description, auto&& f) {
            Worst w;
            constexpr int slices = 8;
            for (int j = 0; j <= slices; ++j) {
                const double t = cfg.phi.t_minus + (cfg.phi.t_plus - cfg.phi.t_minus) * j / slices;
                basegrid::Coordinates x{};
                const double m = min_ambient_convexity(f, profile, mfld, t, &x);
                w.offer(m, t, x);
            }
            ConditionReport r = w.report(name, description, false, 0.0);
            r.advisory = true;
            rep.conditions.push_back(std::move(r));
        };
        surrogate("barrier_claim", "ambient Hessian of phibar^{-1/k} + lambda phibar^{-1/k} g >= 0 (slice frame)",
                  [&](double t, const basegrid::Coordinates&) {
                      return std::pow(barrier_target(cfg.phi, profile, n, k, t), -1.0 / k);
                  });
        if (!cfg.target.depends_on_normal) {
            surrogate("convexity_surrogate",
                      "surrogate: ambient Hessian of psi^{-1/k} + lambda psi^{-1/k} g >= 0 (slice frame, nu-independent psi)",
                      [&](double t, const basegrid::Coordinates& x) {
                          return std::pow(cfg.target(PsiPoint{t, x, -1.0, -1}), -1.0 / k);
                      });
        }
    }

    rep.passed = rep.first_failure() == nullptr;
    return rep;
}

}  // namespace weingarten::homotopy
