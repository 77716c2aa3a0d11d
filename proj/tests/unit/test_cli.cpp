#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fhn/cli.hpp"
#include "fhn/config.hpp"
#include "fhn/errors.hpp"
#include "fhn/io.hpp"

using namespace fhn;
namespace fs = std::filesystem;

namespace {

const char* kBench = R"(params: {epsilon: 0.1, a: 0.25, b: 1.0, beta: 0.8, L: 1.0}
T: 0.5
u0: {kind: cosine, coeffs: [0.0, 0.1]}
grid: {nx: 17, nt: 11}
fd: {dt: 0.005}
)";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fhn_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("config: full document and overrides") {
    const auto s = load_settings_from_string(kBench, {parse_override("grid.nx=9"), parse_override("u0.coeffs=[0, 0.2]")});
    CHECK(s.spec.params.epsilon == 0.1);
    CHECK(s.spec.T == 0.5);
    CHECK(s.nx == 9);
    CHECK(s.fd.nx == 9);
    CHECK(s.fd.nt_out == 11);
    CHECK(s.fd.dt == 0.005);
    CHECK(eval_space_fn(s.spec.u0, 0.0) == doctest::Approx(0.2));
    CHECK(s.spec.homogeneous_bc());

    const auto t = load_settings_from_string(kBench, {parse_override("phi1.kind=saturating"),
                                                      parse_override("phi1.limit=0.1"),
                                                      parse_override("phi1.rate=2")});
    CHECK(t.spec.phi1.declared_limit() == doctest::Approx(0.1));
}

TEST_CASE("config: errors name the field") {
    auto field_of = [](const std::string& doc, std::vector<Override> ovs = {}) {
        try {
            load_settings_from_string(doc, ovs);
        } catch (const ParseError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of("params: {epsilon: 1, a: 0.5, b: 1, beta: 1}\nT: 1\n") == "params.L");
    CHECK(field_of("params: {epsilon: 1, a: 1.5, b: 1, beta: 1, L: 1}\nT: 1\n") == "params.a");
    CHECK(field_of(kBench, {{"T", "-1"}}) == "T");
    CHECK(field_of(kBench, {{"u0.kind", "spline"}}) == "u0.kind");
    CHECK(field_of(kBench, {{"fd.scheme", "euler"}}) == "fd.scheme");
    CHECK(field_of(kBench, {{"grid.nt", "x"}}) == "grid.nt");
    try {
        load_settings_from_string("params:\n  epsilon: 1\n  a: zero\n", {});
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.field() == "params.a");
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_override("novalue"), ParseError);
    CHECK_THROWS_AS(load_settings_from_string("[1, 2", {}), ParseError);
}

TEST_CASE("config: kernel scope for tabulation, optional problem for verify") {
    const char* doc = "params: {epsilon: 1, a: 2, b: 1, beta: 1, L: 1}\n";
    CHECK_THROWS_AS(load_settings_from_string(doc, {}, Purpose::solve), ParseError);
    const auto s = load_settings_from_string(doc, {}, Purpose::tabulate);
    CHECK(s.spec.params.a == 2.0);
    const auto v = load_settings_from_string("", {parse_override("verify.samples=50")}, Purpose::verify);
    CHECK(v.verify.plan.samples == 50);
    CHECK(v.verify.problem.params.epsilon == 0.1);
}

TEST_CASE("CSV matrices round-trip exactly") {
    const Grid g = make_grid(1.0, 0.3, 4, 3);
    Field f("u", g);
    for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = std::sin(1.0 + k) / 3.0;
    std::stringstream ss;
    write_matrix_csv(ss, f);
    const std::string text = ss.str();
    CHECK(text.rfind("x\\t,0,0.14999999999999999,0.29999999999999999\n", 0) == 0);
    const Field back = read_matrix_csv(ss);
    CHECK(back.values == f.values);
    CHECK(back.grid.t_nodes == g.t_nodes);
    CHECK(back.grid.x_nodes == g.x_nodes);

    std::stringstream bad("x\\t,0,1\n0,1\n");
    try {
        read_matrix_csv(bad);
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::stringstream corner("x,0,1\n0,1,2\n");
    CHECK_THROWS_AS(read_matrix_csv(corner), ParseError);
}

TEST_CASE("compare is symmetric up to the signed column") {
    const Grid g = make_grid(1.0, 1.0, 5, 3);
    Field a("a", g), b("b", g);
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        a.values[k] = 0.1 * k;
        b.values[k] = 0.1 * k + (k % 3 == 0 ? 0.01 : -0.002);
    }
    const auto ab = compare_fields(a, b);
    const auto ba = compare_fields(b, a);
    CHECK(ab.sup == ba.sup);
    CHECK(ab.l2 == ba.l2);
    for (std::size_t m = 0; m < ab.t.size(); ++m) CHECK(ab.slice_signed[m] == -ba.slice_signed[m]);
    CHECK(compare_fields(a, a).sup == 0.0);
    CHECK_THROWS_AS(compare_fields(a, Field("c", make_grid(1.0, 1.0, 4, 3))), ShapeError);
}

TEST_CASE("cli: solve, compare, tabulate") {
    const fs::path dir = scratch("solve");
    const fs::path spec = write_file(dir / "spec.yaml", kBench);
    CHECK(run({"solve-ie", "--spec", spec.string(), "--out", (dir / "ie").string()}) == 0);
    CHECK(run({"solve-fd", "--spec", spec.string(), "--out", (dir / "fd").string()}) == 0);
    CHECK(fs::exists(dir / "ie" / "report.json"));
    CHECK(fs::exists(dir / "fd" / "v.csv"));

    std::string out;
    CHECK(run({"compare", (dir / "ie" / "u.csv").string(), (dir / "ie" / "u.csv").string()}, &out) == 0);
    CHECK(out.rfind("sup 0\n", 0) == 0);
    CHECK(run({"compare", (dir / "ie" / "u.csv").string(), (dir / "fd" / "u.csv").string(), "--out",
               (dir / "cmp").string()}) == 0);
    CHECK(slurp(dir / "cmp" / "compare_slices.csv").rfind("t,sup_abs,l2,signed\n", 0) == 0);

    // identical inputs give byte-identical outputs
    CHECK(run({"solve-ie", "--spec", spec.string(), "--out", (dir / "ie2").string()}) == 0);
    CHECK(slurp(dir / "ie" / "u.csv") == slurp(dir / "ie2" / "u.csv"));

    CHECK(run({"solve-ie", "--spec", spec.string(), "--out", (dir / "lin").string(), "--linearized",
               "--grid", "9,6"}) == 0);
    CHECK(slurp(dir / "lin" / "report.json").find("\"linearized\": true") != std::string::npos);

    const fs::path kspec = write_file(dir / "kernel.yaml", "params: {epsilon: 1, a: 2, b: 1, beta: 1, L: 1}\nT: 1\n");
    CHECK(run({"tabulate-kernel", "--spec", kspec.string(), "--grid", "3,2"}, &out) == 0);
    CHECK(out.rfind("x,t,K,theta,G_diag\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 7);
}

TEST_CASE("cli: exit codes") {
    const fs::path dir = scratch("errors");
    std::string err;
    const fs::path missing_L =
        write_file(dir / "bad.yaml", "params: {epsilon: 0.1, a: 0.25, b: 1.0, beta: 0.8}\nT: 1\n");
    CHECK(run({"solve-ie", "--spec", missing_L.string(), "--out", (dir / "o").string()}, nullptr, &err) == 2);
    CHECK(err.find("'params.L'") != std::string::npos);

    const fs::path spec = write_file(dir / "spec.yaml", kBench);
    CHECK(run({"solve-ie", "--spec", spec.string(), "--out", (dir / "o").string(), "--set", "ie.max_iter=1"},
              nullptr, &err) == 3);
    CHECK(run({"solve-fd", "--spec", spec.string(), "--out", (dir / "o").string(), "--grid", "7"}) == 2);
    CHECK(run({"verify", "--checks", "bogus"}) == 2);
    CHECK(run({"launch"}) == 2);
    CHECK(run({"solve-fd", "--spec", spec.string(), "--out", (dir / "o").string(), "--set", "fd.scheme=explicit_rk4",
               "--set", "fd.dt=0.1"}) == 2);
}

TEST_CASE("cli: verify is deterministic and reports failures through the exit code") {
    std::string a, b;
    const std::vector<std::string> args{"verify", "--checks", "steady_limit,invariant_rectangle,theta_decay"};
    CHECK(run(args, &a) == 0);
    CHECK(run(args, &b) == 0);
    CHECK(a == b);
    CHECK(a.find("\"status\": \"pass\"") != std::string::npos);
    CHECK(run({"verify", "--checks", "invariant_rectangle", "--set", "ie.rect.u_max=0.1", "--set",
               "ie.rect.v_max=0.001"}) == 1);
}
