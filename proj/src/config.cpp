#include "fhn/config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

int line_of(const YAML::Node& n) {
    const auto m = n.Mark();
    return m.line >= 0 ? m.line + 1 : 0;
}

// A node together with its dotted path, for error messages.
struct Ref {
    YAML::Node node;
    std::string path;

    [[noreturn]] void fail(const std::string& detail) const { throw ParseError(path, detail, line_of(node)); }

    bool has(const std::string& key) const { return node.IsMap() && node[key]; }

    Ref at(const std::string& key) const {
        if (!node.IsMap()) fail("expected a mapping");
        const YAML::Node child = node[key];
        const std::string p = path.empty() ? key : path + "." + key;
        if (!child) throw ParseError(p, "missing", line_of(node));
        return {child, p};
    }

    double num() const {
        if (!node.IsScalar()) fail("expected a number");
        try {
            return node.as<double>();
        } catch (const YAML::Exception&) {
            fail("expected a number, got '" + node.Scalar() + "'");
        }
    }

    int integer() const {
        if (!node.IsScalar()) fail("expected an integer");
        try {
            return node.as<int>();
        } catch (const YAML::Exception&) {
            fail("expected an integer, got '" + node.Scalar() + "'");
        }
    }

    bool flag() const {
        if (!node.IsScalar()) fail("expected true or false");
        try {
            return node.as<bool>();
        } catch (const YAML::Exception&) {
            fail("expected true or false, got '" + node.Scalar() + "'");
        }
    }

    std::string str() const {
        if (!node.IsScalar()) fail("expected a string");
        return node.Scalar();
    }

    std::vector<double> list() const {
        if (!node.IsSequence()) fail("expected a list of numbers");
        std::vector<double> out;
        for (std::size_t k = 0; k < node.size(); ++k) {
            out.push_back(Ref{node[k], path + "[" + std::to_string(k) + "]"}.num());
        }
        return out;
    }
};

template <class T, class Get>
void optional(const Ref& r, const std::string& key, T& target, Get get) {
    if (r.has(key)) target = get(r.at(key));
}

// Runs a constructor that may reject values, reporting the failure at r.
template <class F>
auto guarded(const Ref& r, F make) {
    try {
        return make();
    } catch (const ValidationError& e) {
        const std::string p = r.path + "." + e.field();
        throw ParseError(p, e.constraint(), line_of(r.node));
    } catch (const DomainError& e) {
        r.fail(e.what());
    }
}

ModelParams read_params(const Ref& r, ParamScope scope) {
    std::map<std::string, double> raw;
    for (const char* key : {"epsilon", "a", "b", "beta", "L"}) raw[key] = r.at(key).num();
    return guarded(r, [&] { return validate_params(raw, scope); });
}

SpaceFunction read_space(const Ref& r, double L) {
    if (r.node.IsScalar()) return guarded(r, [&] { return SpaceFunction::constant(r.num(), L); });
    const std::string kind = r.at("kind").str();
    return guarded(r, [&] {
        if (kind == "constant") return SpaceFunction::constant(r.at("value").num(), L);
        if (kind == "polynomial") return SpaceFunction::polynomial(r.at("coeffs").list(), L);
        if (kind == "cosine") return SpaceFunction::cosine(r.at("coeffs").list(), L);
        if (kind == "table") return SpaceFunction::table(r.at("x").list(), r.at("values").list(), L);
        r.at("kind").fail("unknown space function kind '" + kind + "'");
    });
}

TimeFunction read_time(const Ref& r) {
    if (r.node.IsScalar()) return guarded(r, [&] { return TimeFunction::constant(r.num()); });
    const std::string kind = r.at("kind").str();
    return guarded(r, [&] {
        if (kind == "constant") return TimeFunction::constant(r.at("value").num());
        if (kind == "saturating") return TimeFunction::saturating(r.at("limit").num(), r.at("rate").num());
        if (kind == "decaying") return TimeFunction::decaying(r.at("value").num(), r.at("rate").num());
        if (kind == "ramp") {
            return TimeFunction::ramp(r.at("start").num(), r.at("end").num(), r.at("t_ramp").num());
        }
        if (kind == "table") {
            TableInterp interp = TableInterp::monotone_cubic;
            if (r.has("interp")) {
                const std::string s = r.at("interp").str();
                if (s == "linear") {
                    interp = TableInterp::linear;
                } else if (s != "monotone_cubic") {
                    r.at("interp").fail("expected monotone_cubic or linear");
                }
            }
            return TimeFunction::table(r.at("t").list(), r.at("values").list(), interp);
        }
        r.at("kind").fail("unknown time function kind '" + kind + "'");
    });
}

ProblemSpec read_problem(const Ref& root, ParamScope scope) {
    ProblemSpec s;
    s.params = read_params(root.at("params"), scope);
    const double L = s.params.L;
    s.T = root.at("T").num();
    if (!(s.T > 0.0)) root.at("T").fail("must be > 0");
    s.u0 = SpaceFunction::constant(0.0, L);
    s.v0 = SpaceFunction::constant(0.0, L);
    if (root.has("u0")) s.u0 = read_space(root.at("u0"), L);
    if (root.has("v0")) s.v0 = read_space(root.at("v0"), L);
    if (root.has("phi1")) s.phi1 = read_time(root.at("phi1"));
    if (root.has("phi2")) s.phi2 = read_time(root.at("phi2"));
    return s;
}

auto as_num = [](const Ref& r) { return r.num(); };
auto as_int = [](const Ref& r) { return r.integer(); };
auto as_flag = [](const Ref& r) { return r.flag(); };

void positive_count(const Ref& root, const char* section, const char* key, int value, int min) {
    if (value < min) root.at(section).at(key).fail("must be >= " + std::to_string(min));
}

RunSettings convert(const YAML::Node& doc, Purpose purpose) {
    const Ref root{doc.IsNull() ? YAML::Node(YAML::NodeType::Map) : doc, ""};
    if (!root.node.IsMap()) root.fail("document must be a mapping");
    RunSettings out;

    if (root.has("grid")) {
        const Ref g = root.at("grid");
        optional(g, "nx", out.nx, as_int);
        optional(g, "nt", out.nt, as_int);
        positive_count(root, "grid", "nx", out.nx, 3);
        positive_count(root, "grid", "nt", out.nt, 2);
    }
    out.fd.nx = out.nx;
    out.fd.nt_out = out.nt;

    if (root.has("ie")) {
        const Ref r = root.at("ie");
        optional(r, "tol_fix", out.ie.tol_fix, as_num);
        optional(r, "max_iter", out.ie.max_iter, as_int);
        optional(r, "rho_max", out.ie.rho_max, as_num);
        optional(r, "kernel_order", out.ie.kernel_order, as_int);
        optional(r, "time_order", out.ie.time_order, as_int);
        optional(r, "panel0_levels", out.ie.panel0_levels, as_int);
        optional(r, "linearized", out.ie.linearized, as_flag);
        if (r.has("rect")) {
            const Ref q = r.at("rect");
            optional(q, "u_min", out.ie.rect.u_min, as_num);
            optional(q, "u_max", out.ie.rect.u_max, as_num);
            optional(q, "v_min", out.ie.rect.v_min, as_num);
            optional(q, "v_max", out.ie.rect.v_max, as_num);
        }
    }
    if (root.has("fd")) {
        const Ref r = root.at("fd");
        optional(r, "nx", out.fd.nx, as_int);
        optional(r, "dt", out.fd.dt, as_num);
        optional(r, "safety", out.fd.safety, as_num);
        optional(r, "nt_out", out.fd.nt_out, as_int);
        if (r.has("scheme")) {
            const Ref s = r.at("scheme");
            try {
                out.fd.scheme = parse_fd_scheme(s.str());
            } catch (const ValidationError& e) {
                s.fail(e.constraint());
            }
        }
    }
    if (root.has("kernel")) {
        const Ref r = root.at("kernel");
        optional(r, "tol_kernel", out.kernel.tol_kernel, as_num);
        optional(r, "n_image_max", out.kernel.n_image_max, as_int);
        if (!(out.kernel.tol_kernel > 0.0)) r.at("tol_kernel").fail("must be > 0");
        if (out.kernel.n_image_max < 1) r.at("n_image_max").fail("must be >= 1");
    }
    if (root.has("tabulate")) {
        const Ref r = root.at("tabulate");
        optional(r, "nx", out.tab_nx, as_int);
        optional(r, "nt", out.tab_nt, as_int);
        positive_count(root, "tabulate", "nx", out.tab_nx, 2);
        positive_count(root, "tabulate", "nt", out.tab_nt, 1);
    }

    switch (purpose) {
    case Purpose::solve:
        out.spec = read_problem(root, ParamScope::model);
        break;
    case Purpose::tabulate:
        out.spec.params = read_params(root.at("params"), ParamScope::kernel);
        out.spec.T = 1.0;
        if (root.has("T")) {
            out.spec.T = root.at("T").num();
            if (!(out.spec.T > 0.0)) root.at("T").fail("must be > 0");
        }
        break;
    case Purpose::verify: {
        out.verify = default_verify_config();
        if (root.has("params")) {
            out.verify.problem = read_problem(root, ParamScope::model);
            out.spec = out.verify.problem;
            if (root.has("grid")) {
                out.verify.nx = out.nx;
                out.verify.nt = out.nt;
            }
        }
        out.verify.rect = out.ie.rect;
        if (root.has("verify")) {
            const Ref r = root.at("verify");
            optional(r, "samples", out.verify.plan.samples, [](const Ref& q) { return long{q.integer()}; });
            optional(r, "seed", out.verify.plan.seed,
                     [](const Ref& q) { return static_cast<unsigned>(q.integer()); });
            optional(r, "x", out.verify.x, as_num);
            optional(r, "steady_tol", out.verify.steady_tol, as_num);
            optional(r, "nx", out.verify.nx, as_int);
            optional(r, "nt", out.verify.nt, as_int);
            if (r.has("bound_params")) out.verify.bound_params = read_params(r.at("bound_params"), ParamScope::kernel);
            if (r.has("limit_params")) out.verify.limit_params = read_params(r.at("limit_params"), ParamScope::kernel);
            if (r.has("phi")) out.verify.phi = read_time(r.at("phi"));
            if (out.verify.plan.samples < 1) r.at("samples").fail("must be >= 1");
            if (!(out.verify.steady_tol > 0.0)) r.at("steady_tol").fail("must be > 0");
        }
        break;
    }
    }
    return out;
}

void apply_override(YAML::Node& doc, const Override& ov) {
    std::vector<std::string> keys;
    std::stringstream ss(ov.first);
    for (std::string k; std::getline(ss, k, '.');) {
        if (k.empty()) throw ParseError(ov.first, "empty key segment in override");
        keys.push_back(k);
    }
    YAML::Node value;
    try {
        value = YAML::Load(ov.second);
    } catch (const YAML::Exception& e) {
        throw ParseError(ov.first, "cannot parse override value '" + ov.second + "'");
    }
    // YAML::Node assignment rebinds, so walk by re-fetching from the root.
    std::vector<YAML::Node> chain{doc};
    for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
        YAML::Node cur = chain.back();
        if (!cur.IsMap() && !cur.IsNull()) {
            throw ParseError(ov.first, "'" + keys[k] + "' is not a section");
        }
        if (!cur[keys[k]]) cur[keys[k]] = YAML::Node(YAML::NodeType::Map);
        chain.push_back(cur[keys[k]]);
    }
    YAML::Node last = chain.back();
    if (!last.IsMap() && !last.IsNull()) throw ParseError(ov.first, "parent is not a section");
    last[keys.back()] = value;
}

RunSettings load_node(YAML::Node doc, const std::vector<Override>& overrides, Purpose purpose) {
    if (!doc || doc.IsNull()) doc = YAML::Node(YAML::NodeType::Map);
    if (!doc.IsMap()) throw ParseError("", "document must be a mapping", line_of(doc));
    for (const auto& ov : overrides) apply_override(doc, ov);
    try {
        return convert(doc, purpose);
    } catch (const ParseError& e) {
        // values set on the command line have no line in the document
        for (const auto& ov : overrides) {
            const auto& f = e.field();
            if (f == ov.first || f.rfind(ov.first + ".", 0) == 0 || f.rfind(ov.first + "[", 0) == 0) {
                throw ParseError(f, e.detail() + " (from --set)");
            }
        }
        throw;
    }
}

}  // namespace

Override parse_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(text, "override must look like key=value");
    Override ov{text.substr(0, eq), text.substr(eq + 1)};
    if (ov.first.empty()) throw ParseError(text, "override has an empty key");
    return ov;
}

RunSettings load_settings_from_string(const std::string& yaml, const std::vector<Override>& overrides,
                                      Purpose purpose) {
    YAML::Node doc;
    try {
        doc = YAML::Load(yaml);
    } catch (const YAML::ParserException& e) {
        throw ParseError("", e.msg, e.mark.line + 1);
    }
    return load_node(doc, overrides, purpose);
}

RunSettings load_settings(const std::string& path, const std::vector<Override>& overrides, Purpose purpose) {
    if (path.empty()) return load_node(YAML::Node(YAML::NodeType::Map), overrides, purpose);
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_settings_from_string(buf.str(), overrides, purpose);
}

}  // namespace fhn
