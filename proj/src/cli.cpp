#include "fhn/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "fhn/analysis.hpp"
#include "fhn/config.hpp"
#include "fhn/errors.hpp"
#include "fhn/io.hpp"
#include "fhn/kernel.hpp"
#include "fhn/solver_fd.hpp"
#include "fhn/solver_ie.hpp"

namespace fhn {

namespace {

namespace fs = std::filesystem;

struct Args {
    std::string spec;
    std::string out;
    std::vector<std::string> sets;
    std::string grid;
    bool linearized = false;
    std::string checks;
    std::vector<std::string> inputs;
};

std::vector<Override> overrides(const Args& a) {
    std::vector<Override> ovs;
    for (const auto& s : a.sets) ovs.push_back(parse_override(s));
    if (!a.grid.empty()) {
        const auto comma = a.grid.find(',');
        auto is_count = [](const std::string& s) {
            return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
        };
        const std::string nx = comma == std::string::npos ? "" : a.grid.substr(0, comma);
        const std::string nt = comma == std::string::npos ? "" : a.grid.substr(comma + 1);
        if (!is_count(nx) || !is_count(nt)) throw ParseError("grid", "expected nx,nt, got '" + a.grid + "'");
        ovs.emplace_back("grid.nx", nx);
        ovs.emplace_back("grid.nt", nt);
    }
    if (a.linearized) ovs.emplace_back("ie.linearized", "true");
    return ovs;
}

fs::path output_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw Error("cannot create output directory " + dir);
    return p;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

void write_solution(const Solution& sol, const std::string& dir) {
    const fs::path p = output_dir(dir);
    write_matrix_csv((p / "u.csv").string(), sol.u);
    write_matrix_csv((p / "v.csv").string(), sol.v);
    write_text(p / "report.json", run_report(sol).dump(2) + "\n");
}

int solve_ie_cmd(const Args& a, std::ostream& out) {
    const RunSettings s = load_settings(a.spec, overrides(a), Purpose::solve);
    const KernelContext ctx(s.spec.params, s.kernel);
    const Grid grid = make_grid(s.spec.params.L, s.spec.T, s.nx, s.nt);
    const Solution sol = solve_ie(s.spec, grid, ctx, s.ie);
    write_solution(sol, a.out);
    out << "solve-ie: " << grid.nx << " x " << grid.nt << " nodes, " << sol.picard->windows.size()
        << " windows, written to " << a.out << "\n";
    return kExitOk;
}

int solve_fd_cmd(const Args& a, std::ostream& out) {
    const RunSettings s = load_settings(a.spec, overrides(a), Purpose::solve);
    const Solution sol = solve_fd(s.spec, s.fd);
    write_solution(sol, a.out);
    out << "solve-fd: " << sol.u.grid.nx << " x " << sol.u.grid.nt << " nodes, " << sol.fd->steps
        << " steps, written to " << a.out << "\n";
    return kExitOk;
}

int compare_cmd(const Args& a, std::ostream& out) {
    const Field fa = read_matrix_csv(a.inputs.at(0));
    const Field fb = read_matrix_csv(a.inputs.at(1));
    const CompareResult c = compare_fields(fa, fb);
    nlohmann::json j;
    j["a"] = a.inputs[0];
    j["b"] = a.inputs[1];
    j["sup"] = c.sup;
    j["l2"] = c.l2;
    j["nx"] = fa.grid.nx;
    j["nt"] = fa.grid.nt;
    if (!a.out.empty()) {
        const fs::path p = output_dir(a.out);
        write_text(p / "compare.json", j.dump(2) + "\n");
        std::ostringstream csv;
        write_compare_csv(csv, c);
        write_text(p / "compare_slices.csv", csv.str());
    }
    out << "sup " << format_g17(c.sup) << "\nl2 " << format_g17(c.l2) << "\n";
    return kExitOk;
}

int tabulate_cmd(const Args& a, std::ostream& out) {
    auto ovs = overrides(a);
    // --grid sizes the table here
    for (auto& ov : ovs) {
        if (ov.first == "grid.nx") ov.first = "tabulate.nx";
        if (ov.first == "grid.nt") ov.first = "tabulate.nt";
    }
    const RunSettings s = load_settings(a.spec, ovs, Purpose::tabulate);
    const KernelContext ctx(s.spec.params, s.kernel);
    const double L = s.spec.params.L, T = s.spec.T;
    std::ostringstream csv;
    csv << "x,t,K,theta,G_diag\n";
    for (int m = 1; m <= s.tab_nt; ++m) {
        const double t = T * m / s.tab_nt;
        for (int i = 0; i < s.tab_nx; ++i) {
            const double x = L * i / (s.tab_nx - 1);
            csv << format_g17(x) << ',' << format_g17(t) << ',' << format_g17(eval_K(x, t, ctx)) << ','
                << format_g17(eval_theta(x, t, ctx)) << ',' << format_g17(eval_G(x, x, t, ctx)) << '\n';
        }
    }
    if (a.out.empty()) {
        out << csv.str();
    } else {
        write_text(output_dir(a.out) / "kernel.csv", csv.str());
        out << "tabulate-kernel: " << s.tab_nx * s.tab_nt << " rows written to " << a.out << "\n";
    }
    return kExitOk;
}

int verify_cmd(const Args& a, std::ostream& out) {
    const RunSettings s = load_settings(a.spec, overrides(a), Purpose::verify);
    std::vector<std::string> names;
    if (!a.checks.empty()) {
        std::stringstream ss(a.checks);
        for (std::string n; std::getline(ss, n, ',');) {
            if (n.empty()) continue;
            if (std::find(check_names().begin(), check_names().end(), n) == check_names().end()) {
                throw ParseError("checks", "unknown check '" + n + "'");
            }
            names.push_back(n);
        }
    }
    const auto reports = run_checks(s.verify, names);
    const std::string text = to_json(reports).dump(2) + "\n";
    if (!a.out.empty()) write_text(output_dir(a.out) / "verify.json", text);
    out << text;
    const bool failed = std::any_of(reports.begin(), reports.end(),
                                    [](const CheckReport& r) { return !r.skipped() && !r.passed; });
    return failed ? kExitCheckFailed : kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"FitzHugh-Nagumo strip solver and bound checks", "fhn"};
    app.require_subcommand(1);
    Args a;

    auto common = [&](CLI::App* sub, bool spec_required) {
        auto* opt = sub->add_option("--spec", a.spec, "YAML problem description")->check(CLI::ExistingFile);
        if (spec_required) opt->required();
        sub->add_option("--set", a.sets, "override a config entry, key=value (repeatable)");
        sub->add_option("--grid", a.grid, "grid size nx,nt");
    };
    auto* ie = app.add_subcommand("solve-ie", "integral-equation solver");
    common(ie, true);
    ie->add_option("--out", a.out, "output directory")->required();
    ie->add_flag("--linearized", a.linearized, "drop the cubic part of the reaction");
    auto* fd = app.add_subcommand("solve-fd", "finite-difference solver");
    common(fd, true);
    fd->add_option("--out", a.out, "output directory")->required();
    auto* cmp = app.add_subcommand("compare", "diff two solution matrices");
    cmp->add_option("inputs", a.inputs, "two CSV matrices")->required()->expected(2)->check(CLI::ExistingFile);
    cmp->add_option("--out", a.out, "output directory");
    auto* tab = app.add_subcommand("tabulate-kernel", "tabulate K, theta and the Green diagonal");
    common(tab, true);
    tab->add_option("--out", a.out, "output directory");
    auto* ver = app.add_subcommand("verify", "run the bound and limit checks");
    common(ver, false);
    ver->add_option("--out", a.out, "output directory");
    ver->add_option("--checks", a.checks, "comma-separated subset of checks");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    }

    try {
        if (ie->parsed()) return solve_ie_cmd(a, out);
        if (fd->parsed()) return solve_fd_cmd(a, out);
        if (cmp->parsed()) return compare_cmd(a, out);
        if (tab->parsed()) return tabulate_cmd(a, out);
        return verify_cmd(a, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}

}  // namespace fhn
