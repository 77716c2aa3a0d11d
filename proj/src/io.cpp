#include "fhn/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fhn/errors.hpp"

namespace fhn {

namespace {

constexpr const char* kCorner = "x\\t";

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& s, int line, int col) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (s.empty() || end != begin + s.size()) {
        throw ParseError("column " + std::to_string(col), "not a number: '" + s + "'", line);
    }
    return v;
}

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_matrix_csv(std::ostream& out, const Field& f) {
    const auto& g = f.grid;
    out << kCorner;
    for (double t : g.t_nodes) out << ',' << format_g17(t);
    out << '\n';
    for (int i = 0; i < g.nx; ++i) {
        out << format_g17(g.x_nodes[i]);
        for (int m = 0; m < g.nt; ++m) out << ',' << format_g17(f.at(i, m));
        out << '\n';
    }
}

void write_matrix_csv(const std::string& path, const Field& f) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_matrix_csv(out, f);
}

Field read_matrix_csv(std::istream& in, const std::string& label) {
    std::string line;
    int lineno = 1;
    if (!std::getline(in, line)) throw ParseError("header", "empty file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto head = split(line);
    if (head.empty() || head[0] != kCorner) {
        throw ParseError("header", std::string("corner cell must be ") + kCorner, lineno);
    }
    Grid g;
    for (std::size_t c = 1; c < head.size(); ++c) g.t_nodes.push_back(parse_cell(head[c], lineno, int(c)));
    g.nt = static_cast<int>(g.t_nodes.size());
    if (g.nt < 1) throw ParseError("header", "no time nodes", lineno);

    std::vector<double> values;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (static_cast<int>(cells.size()) != g.nt + 1) {
            throw ParseError("row", "expected " + std::to_string(g.nt + 1) + " cells, found " +
                                        std::to_string(cells.size()),
                             lineno);
        }
        g.x_nodes.push_back(parse_cell(cells[0], lineno, 0));
        for (int m = 0; m < g.nt; ++m) values.push_back(parse_cell(cells[m + 1], lineno, m + 1));
    }
    g.nx = static_cast<int>(g.x_nodes.size());
    if (g.nx < 1) throw ParseError("rows", "no data rows", lineno);
    Field f(label, g);
    f.values = std::move(values);
    return f;
}

Field read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    try {
        return read_matrix_csv(in, path);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.field(), e.detail(), e.line());
    }
}

nlohmann::json to_json(const CheckReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["samples"] = r.samples;
    j["worst_margin"] = number(r.worst_margin);
    j["tolerance"] = number(r.tolerance);
    j["passed"] = r.passed;
    j["status"] = r.status;
    j["notes"] = r.notes;
    j["quantity"] = number(r.quantity);
    j["bound"] = number(r.bound);
    j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const std::vector<CheckReport>& reports) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : reports) a.push_back(to_json(r));
    return a;
}

nlohmann::json run_report(const Solution& sol) {
    const auto& p = sol.spec.params;
    nlohmann::json j;
    j["method"] = sol.method;
    j["linearized"] = sol.linearized;
    j["params"] = {{"epsilon", p.epsilon}, {"a", p.a}, {"b", p.b}, {"beta", p.beta}, {"L", p.L}};
    j["T"] = sol.spec.T;
    j["data"] = {{"u0", sol.spec.u0.describe()},
                 {"v0", sol.spec.v0.describe()},
                 {"phi1", sol.spec.phi1.describe()},
                 {"phi2", sol.spec.phi2.describe()}};
    j["grid"] = {{"nx", sol.u.grid.nx}, {"nt", sol.u.grid.nt}};
    if (sol.reaction_sup) j["reaction_sup"] = *sol.reaction_sup;
    if (sol.picard) {
        nlohmann::json w = nlohmann::json::array();
        for (const auto& win : sol.picard->windows) {
            w.push_back({{"t_start", win.t_start},
                         {"t_end", win.t_end},
                         {"iterations", win.iterations},
                         {"final_residual", win.final_residual},
                         {"contraction_estimate", win.contraction_estimate},
                         {"observed_ratio", win.observed_ratio}});
        }
        j["picard"] = {{"converged", sol.picard->converged}, {"windows", w}};
    }
    if (sol.fd) j["fd"] = {{"scheme", sol.fd->scheme}, {"dt", sol.fd->dt}, {"steps", sol.fd->steps}};
    return j;
}

CompareResult compare_fields(const Field& a, const Field& b) {
    const auto& ga = a.grid;
    const auto& gb = b.grid;
    if (ga.nx != gb.nx || ga.nt != gb.nt) {
        throw ShapeError("compare: grids differ (" + std::to_string(ga.nx) + "x" + std::to_string(ga.nt) +
                         " vs " + std::to_string(gb.nx) + "x" + std::to_string(gb.nt) + ")");
    }
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
    for (int i = 0; i < ga.nx; ++i) {
        if (!close(ga.x_nodes[i], gb.x_nodes[i])) throw ShapeError("compare: x nodes differ at row " + std::to_string(i));
    }
    for (int m = 0; m < ga.nt; ++m) {
        if (!close(ga.t_nodes[m], gb.t_nodes[m])) throw ShapeError("compare: t nodes differ at column " + std::to_string(m));
    }
    CompareResult c;
    c.t = ga.t_nodes;
    double total = 0.0;
    for (int m = 0; m < ga.nt; ++m) {
        double peak = 0.0, sgn = 0.0, acc = 0.0;
        for (int i = 0; i < ga.nx; ++i) {
            const double d = a.at(i, m) - b.at(i, m);
            if (std::abs(d) > peak) {
                peak = std::abs(d);
                sgn = d;
            }
            if (i + 1 < ga.nx) {
                const double d1 = a.at(i + 1, m) - b.at(i + 1, m);
                acc += 0.5 * (ga.x_nodes[i + 1] - ga.x_nodes[i]) * (d * d + d1 * d1);
            }
        }
        c.slice_sup.push_back(peak);
        c.slice_l2.push_back(std::sqrt(acc));
        c.slice_signed.push_back(sgn);
        c.sup = std::max(c.sup, peak);
        if (m > 0) total += 0.5 * (ga.t_nodes[m] - ga.t_nodes[m - 1]) * (acc + c.slice_l2[m - 1] * c.slice_l2[m - 1]);
    }
    c.l2 = std::sqrt(total);
    return c;
}

void write_compare_csv(std::ostream& out, const CompareResult& c) {
    out << "t,sup_abs,l2,signed\n";
    for (std::size_t m = 0; m < c.t.size(); ++m) {
        out << format_g17(c.t[m]) << ',' << format_g17(c.slice_sup[m]) << ',' << format_g17(c.slice_l2[m])
            << ',' << format_g17(c.slice_signed[m]) << '\n';
    }
}

}  // namespace fhn
