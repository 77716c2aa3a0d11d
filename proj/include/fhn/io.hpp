#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fhn/analysis.hpp"
#include "fhn/field.hpp"
#include "json.hpp"

namespace fhn {

/// Matrix layout: the first row is the corner cell "x\t" followed by the
/// t_nodes, each later row is x_i followed by f(x_i, t_m). Values use %.17g.
void write_matrix_csv(std::ostream& out, const Field& f);
void write_matrix_csv(const std::string& path, const Field& f);

/// Inverse of write_matrix_csv. Throws ParseError naming the line.
Field read_matrix_csv(std::istream& in, const std::string& label = "u");
Field read_matrix_csv(const std::string& path);

std::string format_g17(double v);

nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(const std::vector<CheckReport>& reports);
/// Run report: params, grid, method and the Picard or FD record.
nlohmann::json run_report(const Solution& sol);

struct CompareResult {
    double sup = 0.0;  ///< max |a - b| over the grid
    double l2 = 0.0;   ///< space-time L2 norm of a - b (trapezoid)
    std::vector<double> t;
    std::vector<double> slice_sup;
    std::vector<double> slice_l2;
    std::vector<double> slice_signed;  ///< a - b where |a - b| peaks on the slice
};

/// Both fields must share their node coordinates (ShapeError otherwise).
CompareResult compare_fields(const Field& a, const Field& b);
void write_compare_csv(std::ostream& out, const CompareResult& c);

}  // namespace fhn
