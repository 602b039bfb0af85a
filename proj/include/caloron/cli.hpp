#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "caloron/nahm_data.hpp"

namespace caloron::cli {

inline constexpr int schema_version = 1;

enum ExitCode : int {
    exit_ok = 0,
    exit_parse = 1,
    exit_checks = 2,
    exit_integrator = 3,
    exit_irregular = 4,
};

struct ScanAxis {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    double value(int i) const { return count == 1 ? start : start + (stop - start) * i / (count - 1); }
};

struct ScanSpec {
    std::array<ScanAxis, 4> axes;
    double h = 1e-3;
    double tol = 1e-10;
    std::string output;
    std::string format = "csv";

    int size() const { return axes[0].count * axes[1].count * axes[2].count * axes[3].count; }
    /// Point number `index` in lexicographic order (t_0 slowest).
    FourPoint point(int index) const;
};

/// "t0,t1,t2,t3"
FourPoint parse_point(const std::string& text);
/// "axis=start:stop:count,..." with axis t0..t3; unlisted axes stay at `base`.
std::array<ScanAxis, 4> parse_grid(const std::string& text, const FourPoint& base);

nlohmann::json complex_matrix_json(const Matrix& m);
Matrix complex_matrix_from_json(const nlohmann::json& j);

struct Report {
    nlohmann::json doc;
    int exit_code = exit_ok;
};

Report cmd_validate(const std::string& config_path, bool strict);
Report cmd_regularity(const std::string& config_path, const FourPoint& t, double tol);
Report cmd_connection(const std::string& config_path, const FourPoint& t, double h, double tol,
                      const std::string& method);
Report cmd_selfdual_scan(const std::string& config_path, const ScanSpec& scan, unsigned threads = 0);
Report cmd_oracle_compare(const std::string& config_path, const FourPoint& t, int N, double h, double tol);

/// Scan rows as CSV (header plus one line per grid point).
std::string scan_csv(const nlohmann::json& doc);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace caloron::cli
