#include "weingarten/run.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "weingarten/errors.hpp"
#include "weingarten/verify.hpp"

namespace weingarten::run {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string num(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// nlohmann prints the shortest round-trip form; outputs here use %.17g.
void emit(std::ostream& os, const json& j, int indent, int depth) {
    const std::string pad = indent < 0 ? "" : std::string(std::size_t(indent * (depth + 1)), ' ');
    const std::string close = indent < 0 ? "" : std::string(std::size_t(indent * depth), ' ');
    const char* nl = indent < 0 ? "" : "\n";
    const char* sep = indent < 0 ? ":" : ": ";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{' << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad << json(it.key()).dump() << sep;
                emit(os, it.value(), indent, depth + 1);
            }
            os << nl << close << '}';
            return;
        }
        case json::value_t::array: {
            bool scalars = true;
            for (const auto& v : j) scalars = scalars && !v.is_structured();
            if (j.empty() || scalars) {
                os << '[';
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) os << (indent < 0 ? "," : ", ");
                    emit(os, j[i], indent, depth + 1);
                }
                os << ']';
                return;
            }
            os << '[' << nl;
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ',' << nl;
                os << pad;
                emit(os, j[i], indent, depth + 1);
            }
            os << nl << close << ']';
            return;
        }
        case json::value_t::number_float:
            os << num(j.get<double>());
            return;
        default:
            os << j.dump();
    }
}

std::string dump(const json& j, int indent = 2) {
    std::ostringstream os;
    emit(os, j, indent, 0);
    return os.str();
}

json vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json mat(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
    return a;
}

// ---- config reading -------------------------------------------------------

void require_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError("expected an object", path);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) known = known || it.key() == a;
        if (!known) throw ConfigError("unknown key", path.empty() ? it.key() : path + "." + it.key());
    }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

template <typename T>
void read(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError("expected a boolean", join(path, key));
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError("expected an integer", join(path, key));
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError("expected a number", join(path, key));
        } else {
            if (!v.is_string()) throw ConfigError("expected a string", join(path, key));
        }
        out = v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(e.what(), join(path, key));
    }
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(what, key);
}

// Parses an expression, turning syntax errors into a config error with a caret line.
psiexpr::Expression expression(const std::string& text, const std::string& key) {
    try {
        return psiexpr::Expression::parse(text);
    } catch (const ParseError& e) {
        throw ConfigError(e.message() + " at position " + std::to_string(e.position()) + "\n  " + text + "\n  " +
                              std::string(e.position(), ' ') + "^",
                          key);
    }
}

PsiFamily family_from_string(const std::string& s) {
    if (s == "expr") return PsiFamily::expr;
    if (s == "barrier") return PsiFamily::barrier;
    if (s == "umbilic") return PsiFamily::umbilic;
    if (s == "manufactured") return PsiFamily::manufactured;
    throw ConfigError("unknown family '" + s + "' (expr, barrier, umbilic, manufactured)", "psi.family");
}

json diag_json(double s, const pde::Diagnostics& d) {
    json r;
    r["s"] = s;
    r["iter"] = d.iteration;
    r["residual"] = d.residual_norm;
    r["kappa_max"] = d.kappa_max;
    r["gradmax"] = d.gradmax;
    r["tau_min"] = d.tau_min;
    r["min_shape_eig"] = d.min_shape_eigenvalue;
    r["z_min"] = d.z_min;
    r["z_max"] = d.z_max;
    r["gamma_k_ok"] = d.gamma_k_ok;
    r["step_length"] = d.step_length;
    return r;
}

json hypotheses_json(const homotopy::HypothesisReport& rep, int n) {
    json out;
    out["passed"] = rep.passed;
    json list = json::array();
    for (const auto& c : rep.conditions) {
        json j;
        j["name"] = c.name;
        j["description"] = c.description;
        j["passed"] = c.passed;
        j["advisory"] = c.advisory;
        j["margin"] = c.margin;
        j["samples"] = c.samples;
        json worst;
        worst["t"] = c.worst_t;
        json x = json::array();
        for (int i = 0; i < n; ++i) x.push_back(c.worst_x[std::size_t(i)]);
        worst["x"] = x;
        worst["nu_t"] = c.worst_nu_t;
        j["worst"] = worst;
        list.push_back(j);
    }
    out["conditions"] = list;
    if (const auto* f = rep.first_failure()) out["first_failure"] = f->name;
    return out;
}

fs::path prepare_output(const RunConfig& cfg) {
    const fs::path dir(cfg.output);
    fs::create_directories(dir / "plotdata");
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void write_plotdata(const fs::path& dir, const basegrid::BaseManifold& mfld, const basegrid::GridField& z) {
    std::string a = "coord,z\n";
    for (int i = 0; i < mfld.rows(); ++i) {
        const auto node = mfld.node(i, 0);
        a += num(mfld.coordinates(node)[0]) + "," + num(z[node]) + "\n";
    }
    write_text(dir / "plotdata" / "axis0.csv", a);
    if (mfld.cols() > 1) {
        std::string b = "coord,z\n";
        const int mid = mfld.rows() / 2;
        for (int j = 0; j < mfld.cols(); ++j) {
            const auto node = mfld.node(mid, j);
            b += num(mfld.coordinates(node)[1]) + "," + num(z[node]) + "\n";
        }
        write_text(dir / "plotdata" / "axis1.csv", b);
    }
}

double max_error(const basegrid::GridField& a, const basegrid::GridField& b) {
    return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

}  // namespace

std::string to_string(PsiFamily family) {
    switch (family) {
        case PsiFamily::expr: return "expr";
        case PsiFamily::barrier: return "barrier";
        case PsiFamily::umbilic: return "umbilic";
        case PsiFamily::manufactured: return "manufactured";
    }
    return "?";
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON: " + std::string(e.what()), e.byte);
    }
    RunConfig c;
    require_keys(j, "", {"ambient", "base", "k", "psi", "phi", "homotopy", "solver", "verify", "output", "seed"});

    if (j.contains("ambient")) {
        const json& a = j["ambient"];
        require_keys(a, "ambient", {"kind", "lambda", "t_min", "t_max", "h", "hp", "hpp"});
        std::string kind = warp::to_string(c.ambient.kind);
        read(a, "ambient", "kind", kind);
        try {
            c.ambient.kind = warp::ambient_kind_from_string(kind);
        } catch (const std::exception& e) {
            throw ConfigError(e.what(), "ambient.kind");
        }
        if (c.ambient.kind != warp::AmbientKind::sphere) c.ambient.t_max = 5.0;
        if (c.ambient.kind != warp::AmbientKind::sphere) c.ambient.t_min = 0.1;
        read(a, "ambient", "lambda", c.ambient.lambda);
        read(a, "ambient", "t_min", c.ambient.t_min);
        read(a, "ambient", "t_max", c.ambient.t_max);
        read(a, "ambient", "h", c.ambient.h);
        read(a, "ambient", "hp", c.ambient.hp);
        read(a, "ambient", "hpp", c.ambient.hpp);
    }
    require(c.ambient.lambda > 0, "ambient.lambda", "must be positive");
    require(c.ambient.t_min > 0, "ambient.t_min", "must be positive");
    require(c.ambient.t_max > c.ambient.t_min, "ambient.t_max", "must exceed ambient.t_min");
    if (c.ambient.kind == warp::AmbientKind::custom)
        require(!c.ambient.h.empty() && !c.ambient.hp.empty() && !c.ambient.hpp.empty(), "ambient.h",
                "custom profiles need h, hp and hpp expressions");

    if (j.contains("base")) {
        const json& b = j["base"];
        require_keys(b, "base", {"kind", "size"});
        std::string kind = basegrid::to_string(c.base.kind);
        read(b, "base", "kind", kind);
        c.base.kind = basegrid::base_kind_from_string(kind);
        const bool two_d = c.base.kind == basegrid::BaseKind::torus2 || c.base.kind == basegrid::BaseKind::sphere2;
        if (c.base.kind == basegrid::BaseKind::torus1) c.base = {c.base.kind, 64, 1};
        if (c.base.kind == basegrid::BaseKind::axisym) c.base = {c.base.kind, 32, 1};
        if (c.base.kind == basegrid::BaseKind::torus2) c.base = {c.base.kind, 32, 32};
        if (b.contains("size")) {
            const json& s = b["size"];
            if (s.is_number_integer()) {
                c.base.m1 = s.get<int>();
                c.base.m2 = !two_d ? 1 : c.base.kind == basegrid::BaseKind::sphere2 ? 2 * c.base.m1 : c.base.m1;
            } else if (s.is_array() && s.size() == 2 && s[0].is_number_integer() && s[1].is_number_integer() && two_d) {
                c.base.m1 = s[0].get<int>();
                c.base.m2 = s[1].get<int>();
            } else {
                throw ConfigError(two_d ? "expected an integer or [m1, m2]" : "expected an integer", "base.size");
            }
        }
    }

    read(j, "", "k", c.k);
    require(c.k >= 1, "k", "must be at least 1");
    const int n = c.base.kind == basegrid::BaseKind::torus1 ? 1 : 2;
    require(c.k <= n, "k", "k exceeds base dimension (k <= n = " + std::to_string(n) + ")");

    if (j.contains("psi")) {
        const json& p = j["psi"];
        require_keys(p, "psi", {"family", "expr", "scale", "modulation", "zstar"});
        std::string family = to_string(c.psi.family);
        read(p, "psi", "family", family);
        c.psi.family = family_from_string(family);
        read(p, "psi", "expr", c.psi.expr);
        read(p, "psi", "scale", c.psi.scale);
        read(p, "psi", "modulation", c.psi.modulation);
        read(p, "psi", "zstar", c.psi.zstar);
    }
    require(c.psi.scale > 0, "psi.scale", "must be positive");
    if (c.psi.family == PsiFamily::expr) require(!c.psi.expr.empty(), "psi.expr", "required for family expr");
    if (c.psi.family == PsiFamily::manufactured)
        require(!c.psi.zstar.empty(), "psi.zstar", "required for family manufactured");
    if (!c.psi.expr.empty()) expression(c.psi.expr, "psi.expr");
    if (!c.psi.modulation.empty()) expression(c.psi.modulation, "psi.modulation");
    if (!c.psi.zstar.empty()) expression(c.psi.zstar, "psi.zstar");
    if (!c.ambient.h.empty()) expression(c.ambient.h, "ambient.h");
    if (!c.ambient.hp.empty()) expression(c.ambient.hp, "ambient.hp");
    if (!c.ambient.hpp.empty()) expression(c.ambient.hpp, "ambient.hpp");

    if (j.contains("phi")) {
        const json& p = j["phi"];
        require_keys(p, "phi", {"t_minus", "t_plus", "expr"});
        read(p, "phi", "t_minus", c.phi.t_minus);
        read(p, "phi", "t_plus", c.phi.t_plus);
        read(p, "phi", "expr", c.phi.expr);
    }
    require(c.phi.t_minus < c.phi.t_plus, "phi.t_plus", "must exceed phi.t_minus");
    if (!c.phi.expr.empty()) expression(c.phi.expr, "phi.expr");

    if (j.contains("homotopy")) {
        const json& h = j["homotopy"];
        require_keys(h, "homotopy", {"mode", "step", "min_step", "max_step", "growth"});
        std::string mode = homotopy::to_string(c.homotopy.mode);
        read(h, "homotopy", "mode", mode);
        try {
            c.homotopy.mode = homotopy::mode_from_string(mode);
        } catch (const std::exception& e) {
            throw ConfigError(e.what(), "homotopy.mode");
        }
        read(h, "homotopy", "step", c.homotopy.step);
        read(h, "homotopy", "min_step", c.homotopy.min_step);
        read(h, "homotopy", "max_step", c.homotopy.max_step);
        read(h, "homotopy", "growth", c.homotopy.growth);
    }
    require(c.homotopy.step > 0 && c.homotopy.step <= 1, "homotopy.step", "must lie in (0, 1]");
    require(c.homotopy.min_step > 0 && c.homotopy.min_step <= c.homotopy.step, "homotopy.min_step",
            "must lie in (0, homotopy.step]");
    require(c.homotopy.max_step >= c.homotopy.step && c.homotopy.max_step <= 1, "homotopy.max_step",
            "must lie in [homotopy.step, 1]");
    require(c.homotopy.growth >= 1, "homotopy.growth", "must be at least 1");

    if (j.contains("solver")) {
        const json& s = j["solver"];
        require_keys(s, "solver", {"tol_residual", "max_newton", "normalized", "polish_steps", "initial"});
        read(s, "solver", "tol_residual", c.solver.tol_residual);
        read(s, "solver", "max_newton", c.solver.max_newton);
        read(s, "solver", "normalized", c.solver.normalized);
        read(s, "solver", "polish_steps", c.solver.polish_steps);
        if (s.contains("initial")) {
            double v = 0;
            read(s, "solver", "initial", v);
            c.solver.initial = v;
        }
    }
    require(c.solver.tol_residual > 0, "solver.tol_residual", "must be positive");
    require(c.solver.max_newton >= 1, "solver.max_newton", "must be at least 1");
    require(c.solver.polish_steps >= 0, "solver.polish_steps", "must be non-negative");

    if (j.contains("verify")) {
        require_keys(j["verify"], "verify", {"samples"});
        read(j["verify"], "verify", "samples", c.verify.samples);
    }
    require(c.verify.samples >= 1, "verify.samples", "must be at least 1");
    read(j, "", "output", c.output);
    if (j.contains("seed")) {
        require(j["seed"].is_number_unsigned() || (j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0),
                "seed", "expected a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open '" + path + "'", "config");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string echo_config(const RunConfig& c) {
    json j;
    json a;
    a["kind"] = warp::to_string(c.ambient.kind);
    a["lambda"] = c.ambient.lambda;
    a["t_min"] = c.ambient.t_min;
    a["t_max"] = c.ambient.t_max;
    if (c.ambient.kind == warp::AmbientKind::custom) {
        a["h"] = c.ambient.h;
        a["hp"] = c.ambient.hp;
        a["hpp"] = c.ambient.hpp;
    }
    j["ambient"] = a;
    json b;
    b["kind"] = basegrid::to_string(c.base.kind);
    if (c.base.kind == basegrid::BaseKind::torus1 || c.base.kind == basegrid::BaseKind::axisym)
        b["size"] = c.base.m1;
    else
        b["size"] = json::array({c.base.m1, c.base.m2});
    j["base"] = b;
    j["k"] = c.k;
    json p;
    p["family"] = to_string(c.psi.family);
    if (!c.psi.expr.empty()) p["expr"] = c.psi.expr;
    p["scale"] = c.psi.scale;
    if (!c.psi.modulation.empty()) p["modulation"] = c.psi.modulation;
    if (!c.psi.zstar.empty()) p["zstar"] = c.psi.zstar;
    j["psi"] = p;
    json phi;
    phi["t_minus"] = c.phi.t_minus;
    phi["t_plus"] = c.phi.t_plus;
    phi["expr"] = c.phi.expr.empty() ? homotopy::default_phi_expression(c.phi.t_minus, c.phi.t_plus) : c.phi.expr;
    j["phi"] = phi;
    json h;
    h["mode"] = homotopy::to_string(c.homotopy.mode);
    h["step"] = c.homotopy.step;
    h["min_step"] = c.homotopy.min_step;
    h["max_step"] = c.homotopy.max_step;
    h["growth"] = c.homotopy.growth;
    j["homotopy"] = h;
    json s;
    s["tol_residual"] = c.solver.tol_residual;
    s["max_newton"] = c.solver.max_newton;
    s["normalized"] = c.solver.normalized;
    s["polish_steps"] = c.solver.polish_steps;
    if (c.solver.initial) s["initial"] = *c.solver.initial;
    j["solver"] = s;
    j["verify"] = json{{"samples", c.verify.samples}};
    j["output"] = c.output;
    j["seed"] = c.seed;
    return dump(j);
}

Problem build_problem(const RunConfig& cfg, bool need_phi) {
    const auto& a = cfg.ambient;
    auto make_profile = [&] {
        switch (a.kind) {
            case warp::AmbientKind::sphere: return warp::WarpProfile::sphere(a.lambda, a.t_min, a.t_max);
            case warp::AmbientKind::euclidean: return warp::WarpProfile::euclidean(a.t_min, a.t_max);
            case warp::AmbientKind::hyperbolic: return warp::WarpProfile::hyperbolic(a.lambda, a.t_min, a.t_max);
            case warp::AmbientKind::custom: break;
        }
        return warp::WarpProfile::custom(expression(a.h, "ambient.h"), expression(a.hp, "ambient.hp"),
                                         expression(a.hpp, "ambient.hpp"), a.t_min, a.t_max);
    };
    std::optional<warp::WarpProfile> made;
    try {
        made = make_profile();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), "ambient");
    }
    const warp::WarpProfile& profile = *made;
    Problem p{cfg, profile, basegrid::build_grid(cfg.base), 1, std::nullopt, {}, std::nullopt};
    p.n = p.mfld.dimension();
    if (cfg.k > p.n) throw ConfigError("k exceeds base dimension (k <= n = " + std::to_string(p.n) + ")", "k");

    if (need_phi || cfg.psi.family == PsiFamily::barrier) {
        try {
            p.phi = homotopy::build_phi(cfg.phi.t_minus, cfg.phi.t_plus, profile.t_min(), profile.t_max(),
                                        cfg.phi.expr.empty() ? std::nullopt : std::optional<std::string>(cfg.phi.expr));
        } catch (const DomainError& e) {
            throw ConfigError(e.what(), "phi");
        }
    }

    auto check_coordinates = [&](const psiexpr::Expression& e, const std::string& key) {
        for (const auto& v : e.free_variables())
            if (v.kind == psiexpr::Variable::Kind::x && v.index > p.n)
                throw ConfigError(v.name() + " exceeds base dimension " + std::to_string(p.n), key);
    };

    switch (cfg.psi.family) {
        case PsiFamily::expr: {
            const auto e = expression(cfg.psi.expr, "psi.expr");
            check_coordinates(e, "psi.expr");
            p.psi = pde::expression_psi(e, p.n);
            break;
        }
        case PsiFamily::barrier: {
            std::optional<psiexpr::Expression> mod;
            if (!cfg.psi.modulation.empty()) {
                mod = expression(cfg.psi.modulation, "psi.modulation");
                check_coordinates(*mod, "psi.modulation");
            }
            p.psi = homotopy::barrier_psi(*p.phi, profile, p.n, cfg.k, cfg.psi.scale, mod);
            break;
        }
        case PsiFamily::umbilic:
            p.psi = pde::umbilic_psi(profile, p.n, cfg.k);
            break;
        case PsiFamily::manufactured: {
            const auto e = expression(cfg.psi.zstar, "psi.zstar");
            check_coordinates(e, "psi.zstar");
            for (const auto& v : e.free_variables())
                if (v.kind != psiexpr::Variable::Kind::x) throw ConfigError("z* may only depend on x1..xn", "psi.zstar");
            const int n = p.n;
            auto zs = p.mfld.sample([&](const basegrid::Coordinates& x) {
                psiexpr::Bindings b;
                for (int i = 0; i < n; ++i) b.x[std::size_t(i)] = x[std::size_t(i)];
                return e.eval(b);
            });
            for (Eigen::Index i = 0; i < zs.size(); ++i)
                if (!profile.contains(zs[i])) throw ConfigError("z* leaves the ambient interval", "psi.zstar");
            try {
                p.psi = pde::sampled_psi(pde::manufacture_psi(profile, p.mfld, zs, cfg.k), "manufactured");
            } catch (const AdmissibilityError& err) {
                throw ConfigError(std::string("z* is not admissible: ") + err.what(), "psi.zstar");
            }
            p.zstar = std::move(zs);
            break;
        }
    }
    return p;
}

homotopy::HomotopyConfig homotopy_config(const Problem& p) {
    homotopy::HomotopyConfig h;
    h.mode = p.config.homotopy.mode;
    h.initial_step = p.config.homotopy.step;
    h.min_step = p.config.homotopy.min_step;
    h.max_step = p.config.homotopy.max_step;
    h.growth = p.config.homotopy.growth;
    h.target = p.psi;
    if (p.phi) h.phi = *p.phi;
    h.k = p.config.k;
    return h;
}

pde::SolverOptions solver_options(const RunConfig& cfg) {
    pde::SolverOptions o;
    o.tol_residual = cfg.solver.tol_residual;
    o.max_newton = cfg.solver.max_newton;
    o.normalized = cfg.solver.normalized;
    o.polish_steps = cfg.solver.polish_steps;
    return o;
}

void write_field(const std::string& path, const basegrid::GridField& z) {
    std::string text = "# shape: " + std::to_string(z.rows()) + " " + std::to_string(z.cols()) + "\n";
    for (Eigen::Index i = 0; i < z.size(); ++i) text += num(z[i]) + "\n";
    write_text(path, text);
}

basegrid::GridField read_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open '" + path + "'", "field");
    std::string line;
    int rows = 0, cols = 0;
    if (!std::getline(is, line) || std::sscanf(line.c_str(), "# shape: %d %d", &rows, &cols) != 2 || rows <= 0 ||
        cols <= 0)
        throw ConfigError("missing '# shape: m1 m2' header", "field");
    Eigen::VectorXd v(Eigen::Index(rows) * cols);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::getline(is, line)) throw ConfigError("field has fewer values than its shape", "field");
        try {
            v(i) = std::stod(line);
        } catch (const std::exception&) {
            throw ConfigError("bad value on line " + std::to_string(i + 2), "field");
        }
    }
    return basegrid::GridField(rows, cols, std::move(v));
}

std::string frame_json(const graphgeom::PointFrame& f) {
    json j;
    j["t"] = f.t;
    j["h"] = f.h;
    j["hp"] = f.hp;
    j["W"] = f.W;
    j["g"] = mat(f.g);
    j["a"] = mat(f.a);
    j["kappa"] = vec(f.kappa);
    j["tau"] = f.tau;
    j["eta"] = f.eta;
    j["nu_t"] = f.nu_t;
    return dump(j);
}

int run_solve(const RunConfig& cfg, std::ostream& log) {
    const Problem p = build_problem(cfg, true);
    const auto hc = homotopy_config(p);
    const auto hyp = homotopy::check_hypotheses(hc, p.profile, p.mfld);
    if (!hyp.passed) log << "warning: hypothesis check fails (" << hyp.first_failure()->name << "); solving anyway\n";

    pde::SolverState st{basegrid::GridField(p.mfld, p.phi->t0), cfg.k, hc.target, p.profile, p.mfld,
                        solver_options(cfg)};
    const auto res = homotopy::continue_path(hc, st);

    const fs::path dir = prepare_output(cfg);
    std::string lines;
    std::string curve = "s,iterations,residual,kappa_max,gradmax,tau_min,min_shape_eig\n";
    for (const auto& step : res.steps) {
        for (const auto& d : step.iterates) lines += dump(diag_json(step.s, d), -1) + "\n";
        const auto& d = step.final;
        curve += num(step.s) + "," + std::to_string(step.newton_iterations) + "," + num(d.residual_norm) + "," +
                 num(d.kappa_max) + "," + num(d.gradmax) + "," + num(d.tau_min) + "," + num(d.min_shape_eigenvalue) +
                 "\n";
    }
    if (!res.success) {
        json f;
        f["status"] = "failure";
        f["last_good_s"] = res.last_good_s;
        f["message"] = res.message;
        lines += dump(f, -1) + "\n";
    }
    write_text(dir / "diagnostics.jsonl", lines);
    write_field((dir / "solution.csv").string(), res.z);
    write_text(dir / "plotdata" / "continuation.csv", curve);
    write_plotdata(dir, p.mfld, res.z);

    json rep;
    rep["command"] = "solve";
    rep["config"] = json::parse(echo_config(cfg));
    rep["t0"] = p.phi->t0;
    rep["psi"] = p.psi.label;
    rep["hypotheses"] = hypotheses_json(hyp, p.n);
    json c;
    c["success"] = res.success;
    c["last_good_s"] = res.last_good_s;
    c["message"] = res.message;
    c["accepted_steps"] = res.steps.size();
    c["failed_attempts"] = res.failed_attempts;
    bool admissible = true;
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& step : res.steps)
        for (const auto& d : step.iterates) {
            admissible = admissible && d.gamma_k_ok;
            min_eig = std::min(min_eig, d.min_shape_eigenvalue);
        }
    c["all_iterates_admissible"] = admissible;
    c["min_shape_eig_over_path"] = min_eig;
    if (!res.steps.empty()) c["final"] = diag_json(res.steps.back().s, res.steps.back().final);
    rep["continuation"] = c;
    write_text(dir / "report.json", dump(rep) + "\n");

    log << (res.success ? "solve: reached s=1" : "solve: continuation failed, last good s=" + num(res.last_good_s))
        << " (" << res.steps.size() << " steps)\n";
    if (!res.success) log << "  " << res.message << "\n";
    return res.success ? ExitCode::ok : ExitCode::solver_failure;
}

int run_newton(const RunConfig& cfg, std::ostream& log) {
    const Problem p = build_problem(cfg, !cfg.solver.initial.has_value());
    const double start = cfg.solver.initial ? *cfg.solver.initial : p.phi->t0;
    pde::SolverState st{basegrid::GridField(p.mfld, start), cfg.k, p.psi, p.profile, p.mfld, solver_options(cfg)};

    pde::NewtonResult res;
    try {
        res = pde::newton_iterate(st);
    } catch (const AdmissibilityError& e) {
        res.status = pde::NewtonResult::Status::divergence;
        res.message = e.what();
        res.z = st.z;
    }

    const fs::path dir = prepare_output(cfg);
    std::string lines;
    for (const auto& d : res.history) lines += dump(diag_json(1.0, d), -1) + "\n";
    if (!res.converged()) {
        json f;
        f["status"] = "failure";
        f["reason"] = pde::to_string(res.status);
        f["message"] = res.message;
        lines += dump(f, -1) + "\n";
    }
    write_text(dir / "diagnostics.jsonl", lines);
    write_field((dir / "solution.csv").string(), res.z);
    write_plotdata(dir, p.mfld, res.z);

    json rep;
    rep["command"] = "newton";
    rep["config"] = json::parse(echo_config(cfg));
    rep["initial"] = start;
    rep["psi"] = p.psi.label;
    rep["status"] = pde::to_string(res.status);
    rep["message"] = res.message;
    rep["iterations"] = res.iterations;
    if (!res.history.empty()) rep["final"] = diag_json(1.0, res.history.back());
    if (p.zstar) rep["max_error_vs_zstar"] = max_error(res.z, *p.zstar);
    write_text(dir / "report.json", dump(rep) + "\n");

    log << "newton: " << pde::to_string(res.status) << " after " << res.iterations << " iterations";
    if (!res.history.empty()) log << ", |R|_inf = " << num(res.history.back().residual_norm);
    log << "\n";
    return res.converged() ? ExitCode::ok : ExitCode::solver_failure;
}

int run_check(const RunConfig& cfg, std::ostream& out) {
    const Problem p = build_problem(cfg, true);
    const auto hc = homotopy_config(p);
    const auto hyp = homotopy::check_hypotheses(hc, p.profile, p.mfld);
    json rep;
    rep["command"] = "check";
    rep["t0"] = p.phi->t0;
    rep["psi"] = p.psi.label;
    rep["hypotheses"] = hypotheses_json(hyp, p.n);
    const std::string text = dump(rep) + "\n";
    const fs::path dir = prepare_output(cfg);
    write_text(dir / "report.json", text);
    out << text;
    return hyp.passed ? ExitCode::ok : ExitCode::hypothesis_failure;
}

int run_verify(const RunConfig& cfg, std::ostream& out) {
    const auto results = verify::run_all(cfg.seed, cfg.verify.samples);
    bool ok = true;
    json list = json::array();
    for (const auto& r : results) {
        ok = ok && r.passed;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %-28s samples=%-7ld violations=%-4ld worst=%.3e tol=%.1e %s\n",
                      r.passed ? "PASS" : "FAIL", r.name.c_str(), r.samples, r.violations, r.worst, r.tolerance,
                      r.detail.c_str());
        out << buf;
        json j;
        j["name"] = r.name;
        j["passed"] = r.passed;
        j["samples"] = r.samples;
        j["violations"] = r.violations;
        j["worst"] = r.worst;
        j["tolerance"] = r.tolerance;
        j["detail"] = r.detail;
        list.push_back(j);
    }
    json rep;
    rep["command"] = "verify";
    rep["seed"] = cfg.seed;
    rep["samples"] = cfg.verify.samples;
    rep["suites"] = list;
    rep["passed"] = ok;
    const fs::path dir = prepare_output(cfg);
    write_text(dir / "verify.json", dump(rep) + "\n");
    return ok ? ExitCode::ok : ExitCode::failure;
}

int run_slice(const RunConfig& cfg, std::optional<double> t, std::ostream& out) {
    const Problem p = build_problem(cfg, !t.has_value());
    const double at = t ? *t : p.phi->t0;
    if (!p.profile.contains(at)) throw ConfigError("slice height outside the ambient interval", "t");
    const basegrid::GridField z(p.mfld, at);
    out << frame_json(graphgeom::point_geometry(p.profile, p.mfld, z, 0)) << "\n";
    return ExitCode::ok;
}

int run_inspect(const RunConfig& cfg, const std::string& field_path, long node, std::ostream& out) {
    const Problem p = build_problem(cfg, false);
    const auto z = read_field(field_path);
    if (!z.matches(p.mfld))
        throw ConfigError("field shape " + std::to_string(z.rows()) + "x" + std::to_string(z.cols()) +
                              " does not match the configured base grid",
                          "field");
    if (node < 0 || node >= p.mfld.size()) throw ConfigError("node out of range", "node");
    out << frame_json(graphgeom::point_geometry(p.profile, p.mfld, z, node)) << "\n";
    return ExitCode::ok;
}

}  // namespace weingarten::run
