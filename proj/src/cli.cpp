#include "caloron/cli.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "caloron/oracle.hpp"

namespace caloron::cli {

namespace {

constexpr double strict_tolerance = 1e-8;
constexpr double dense_tolerance = 1e-4;
constexpr double connection_tolerance = 1e-4;
constexpr double gram_tolerance = 1e-6;

nlohmann::json point_json(const FourPoint& t) { return {t[0], t[1], t[2], t[3]}; }

nlohmann::json header(const std::string& command, const NahmData& data) {
    return {{"schema_version", schema_version},
            {"command", command},
            {"k", data.rank()},
            {"n", data.num_points()},
            {"description", data.description()}};
}

int exit_code_of(const std::exception& e) {
    if (dynamic_cast<const IrregularPoint*>(&e) || dynamic_cast<const NotPositiveDefinite*>(&e))
        return exit_irregular;
    if (dynamic_cast<const IntegratorError*>(&e)) return exit_integrator;
    return exit_parse;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot write " + path);
    file << text;
}

} // namespace

FourPoint ScanSpec::point(int index) const {
    FourPoint t;
    for (int mu = 3; mu >= 0; --mu) {
        const int c = axes[static_cast<std::size_t>(mu)].count;
        t[mu] = axes[static_cast<std::size_t>(mu)].value(index % c);
        index /= c;
    }
    return t;
}

FourPoint parse_point(const std::string& text) {
    FourPoint t;
    std::stringstream ss(text);
    std::string item;
    int mu = 0;
    while (std::getline(ss, item, ',')) {
        if (mu > 3) throw ConfigError("--t expects four comma-separated numbers");
        std::size_t used = 0;
        try {
            t[mu] = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw ConfigError("--t: cannot read '" + item + "'");
        ++mu;
    }
    if (mu != 4) throw ConfigError("--t expects four comma-separated numbers");
    return t;
}

std::array<ScanAxis, 4> parse_grid(const std::string& text, const FourPoint& base) {
    std::array<ScanAxis, 4> axes;
    for (int mu = 0; mu < 4; ++mu) axes[static_cast<std::size_t>(mu)] = {base[mu], base[mu], 1};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--grid: expected axis=start:stop:count, got '" + item + "'");
        const std::string axis = item.substr(0, eq);
        int mu = -1;
        if (axis.size() == 2 && axis[0] == 't' && axis[1] >= '0' && axis[1] <= '3') mu = axis[1] - '0';
        if (mu < 0) throw ConfigError("--grid: unknown axis '" + axis + "'");
        double start = 0, stop = 0;
        int count = 0;
        char c1 = 0, c2 = 0;
        std::istringstream spec(item.substr(eq + 1));
        if (!(spec >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' || !(spec >> std::ws).eof())
            throw ConfigError("--grid: cannot read '" + item + "'");
        if (count < 1) throw ConfigError("--grid: count must be >= 1");
        if (start > stop) throw ConfigError("--grid: start must not exceed stop");
        axes[static_cast<std::size_t>(mu)] = {start, stop, count};
    }
    return axes;
}

nlohmann::json complex_matrix_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

Matrix complex_matrix_from_json(const nlohmann::json& j) {
    const auto r = static_cast<Eigen::Index>(j.size());
    const auto c = r == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
    Matrix m(r, c);
    for (Eigen::Index a = 0; a < r; ++a)
        for (Eigen::Index b = 0; b < c; ++b) {
            const auto& z = j.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b));
            m(a, b) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
        }
    return m;
}

Report cmd_validate(const std::string& config_path, bool strict) {
    const NahmData data = load_nahm_data(config_path);
    const ValidationReport rep = validate(data);
    Report r;
    r.doc = header("validate", data);
    r.doc["interval_residual"] = rep.interval_residual;
    r.doc["matching_residual"] = rep.matching;
    r.doc["max_residual"] = rep.max_residual();
    r.doc["tolerance"] = strict_tolerance;
    r.doc["strict"] = strict;
    const bool ok = rep.max_residual() <= strict_tolerance;
    r.doc["within_tolerance"] = ok;
    r.exit_code = (ok || !strict) ? exit_ok : exit_checks;
    return r;
}

Report cmd_regularity(const std::string& config_path, const FourPoint& t, double tol) {
    const NahmData data = load_nahm_data(config_path);
    const Regularity reg = regularity(data, t, tol);
    Report r;
    r.doc = header("regularity", data);
    r.doc["t"] = point_json(t);
    r.doc["gap_Ddag"] = reg.gap_Ddag;
    r.doc["gap_D"] = reg.gap_D;
    r.doc["threshold"] = default_regularity_threshold;
    r.doc["is_regular"] = reg.is_regular;
    return r;
}

Report cmd_connection(const std::string& config_path, const FourPoint& t, double h, double tol,
                      const std::string& method) {
    const NahmData data = load_nahm_data(config_path);
    ConnectionOptions opt;
    opt.h = h;
    opt.tol = tol;
    opt.method = parse_derivative_method(method);
    const GaugePotential gp = gauge_potential(data, t, opt);
    Report r;
    r.doc = header("connection", data);
    r.doc["t"] = point_json(t);
    r.doc["h"] = h;
    r.doc["ode_tol"] = tol;
    r.doc["method"] = method;
    nlohmann::json A = nlohmann::json::array();
    for (const auto& a : gp.A) A.push_back(complex_matrix_json(a));
    r.doc["A"] = A;
    r.doc["antihermiticity_defect"] = gp.antihermiticity_defect();
    r.doc["chi_min_eigenvalue"] = gp.chi_min_eigenvalue;
    return r;
}

Report cmd_selfdual_scan(const std::string& config_path, const ScanSpec& scan, unsigned threads) {
    const NahmData data = load_nahm_data(config_path);
    ConnectionOptions opt;
    opt.tol = scan.tol;
    const int total = scan.size();
    std::vector<nlohmann::json> rows(static_cast<std::size_t>(total));

    auto evaluate = [&](int index) {
        const FourPoint t = scan.point(index);
        nlohmann::json row = {{"index", index}, {"t", point_json(t)}};
        try {
            const Regularity reg = regularity(data, t, scan.tol);
            row["gap"] = std::min(reg.gap_Ddag, reg.gap_D);
            if (!reg.is_regular) throw IrregularPoint("irregular", std::min(reg.gap_Ddag, reg.gap_D));
            const Curvature c = curvature(data, t, scan.h, opt);
            const SelfDualResidual sd = selfdual_residual(c);
            row["status"] = "ok";
            row["residual"] = sd.residual;
            row["orientation"] = sd.orientation;
            row["topological_density"] = c.topological_density();
            row["trace_square"] = c.trace_square();
        } catch (const IrregularPoint&) {
            row["status"] = "irregular";
        } catch (const NotPositiveDefinite&) {
            row["status"] = "irregular";
        } catch (const IntegratorError& e) {
            row["status"] = "integrator_error";
            row["message"] = e.what();
        }
        rows[static_cast<std::size_t>(index)] = std::move(row);
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(total, 1)));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < total; i = next++) evaluate(i);
        });
    for (auto& th : pool) th.join();

    Report r;
    r.doc = header("selfdual-scan", data);
    r.doc["h"] = scan.h;
    r.doc["ode_tol"] = scan.tol;
    r.doc["rows"] = rows;
    return r;
}

Report cmd_oracle_compare(const std::string& config_path, const FourPoint& t, int N, double h, double tol) {
    const NahmData data = load_nahm_data(config_path);
    const BoundaryGreens bg = boundary_greens(data, t, tol);
    const BoundaryGreens dense = dense_greens(data, t, N);
    const double dense_error = (bg.F_matrix() - dense.F_matrix()).norm();

    ConnectionOptions opt;
    opt.h = h;
    opt.tol = tol;
    const GaugePotential compact = gauge_potential(data, t, opt);
    const GaugePotential classical = classical_gauge_potential(data, t, h, 1e-8, tol);
    nlohmann::json dA = nlohmann::json::array();
    double worst = 0.0;
    for (int mu = 0; mu < 4; ++mu) {
        const double d = (compact.A[mu] - classical.A[mu]).norm();
        dA.push_back(d);
        worst = std::max(worst, d);
    }
    const double gram = ZeroModes(data, t, tol).gram_defect(1e-8);

    Report r;
    r.doc = header("oracle-compare", data);
    r.doc["t"] = point_json(t);
    r.doc["N"] = N;
    r.doc["dense_error"] = dense_error;
    r.doc["connection_difference"] = dA;
    r.doc["gram_defect"] = gram;
    r.doc["tolerances"] = {{"dense", dense_tolerance}, {"connection", connection_tolerance}, {"gram", gram_tolerance}};
    const bool ok = dense_error <= dense_tolerance && worst <= connection_tolerance && gram <= gram_tolerance;
    r.doc["pass"] = ok;
    r.exit_code = ok ? exit_ok : exit_checks;
    return r;
}

std::string scan_csv(const nlohmann::json& doc) {
    std::ostringstream os;
    os << "index,t0,t1,t2,t3,status,residual,orientation,topological_density,trace_square\n";
    for (const auto& row : doc.at("rows")) {
        os << row.at("index").get<int>();
        for (const auto& x : row.at("t")) os << ',' << x.dump();
        os << ',' << row.at("status").get<std::string>();
        for (const char* key : {"residual", "orientation", "topological_density", "trace_square"})
            os << ',' << (row.contains(key) ? row.at(key).dump() : std::string());
        os << '\n';
    }
    return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Caloron gauge potentials from Nahm data on a circle"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help message and exit");

    std::string config, t_text = "0,0,0,0", grid, format = "json", output, method = "fd";
    double h = 1e-4, scan_h = 1e-3, tol = default_ode_tol;
    bool strict = false;
    int N = 512;
    unsigned threads = 0;

    auto common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print this help message and exit");
        sub->add_option("--config", config, "Nahm data JSON file")->required();
        sub->add_option("--output", output, "write the result here instead of stdout");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto* validate_cmd = app.add_subcommand("validate", "Nahm-equation and matching residuals");
    common(validate_cmd);
    validate_cmd->add_flag("--strict", strict, "exit 2 when residuals exceed 1e-8");

    auto* regularity_cmd = app.add_subcommand("regularity", "monodromy eigenvalue gaps at t");
    common(regularity_cmd);
    regularity_cmd->add_option("--t", t_text, "t0,t1,t2,t3");
    regularity_cmd->add_option("--ode-tol", tol);

    auto* connection_cmd = app.add_subcommand("connection", "gauge potential A_mu at t");
    common(connection_cmd);
    connection_cmd->add_option("--t", t_text, "t0,t1,t2,t3");
    connection_cmd->add_option("--h", h, "finite-difference step for dF");
    connection_cmd->add_option("--ode-tol", tol);
    connection_cmd->add_option("--method", method, "fd or integral")->check(CLI::IsMember({"fd", "integral"}));

    auto* scan_cmd = app.add_subcommand("selfdual-scan", "self-duality residual over a grid of t");
    common(scan_cmd);
    scan_cmd->add_option("--t", t_text, "values of the axes not listed in --grid");
    scan_cmd->add_option("--grid", grid, "axis=start:stop:count,...");
    scan_cmd->add_option("--h", scan_h, "curvature stencil step");
    scan_cmd->add_option("--ode-tol", tol);
    scan_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* oracle_cmd = app.add_subcommand("oracle-compare", "cross-check against the dense and classical oracles");
    common(oracle_cmd);
    oracle_cmd->add_option("--t", t_text, "t0,t1,t2,t3");
    oracle_cmd->add_option("--N", N, "dense grid size")->check(CLI::Range(64, 1 << 14));
    oracle_cmd->add_option("--h", h);
    oracle_cmd->add_option("--ode-tol", tol);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_parse;
    }

    try {
        Report report;
        const bool is_scan = scan_cmd->parsed();
        if (!is_scan && format == "csv") throw ConfigError("csv output is only available for selfdual-scan");
        if (is_scan && !scan_cmd->count("--format")) format = "csv";

        if (validate_cmd->parsed()) {
            report = cmd_validate(config, strict);
        } else if (regularity_cmd->parsed()) {
            report = cmd_regularity(config, parse_point(t_text), tol);
        } else if (connection_cmd->parsed()) {
            report = cmd_connection(config, parse_point(t_text), h, tol, method);
        } else if (is_scan) {
            ScanSpec scan;
            scan.axes = parse_grid(grid, parse_point(t_text));
            scan.h = scan_h;
            scan.tol = tol;
            scan.output = output;
            scan.format = format;
            report = cmd_selfdual_scan(config, scan, threads);
        } else {
            report = cmd_oracle_compare(config, parse_point(t_text), N, h, tol);
        }
        emit(format == "csv" ? scan_csv(report.doc) : report.doc.dump(2) + "\n", output, out);
        if (report.exit_code == exit_checks) err << "checks above tolerance\n";
        return report.exit_code;
    } catch (const IrregularPoint& e) {
        err << "irregular point: " << e.what() << " (gap " << e.gap() << ")\n";
        return exit_irregular;
    } catch (const NotPositiveDefinite& e) {
        err << "irregular point: " << e.what() << "\n";
        return exit_irregular;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_of(e);
    }
}

} // namespace caloron::cli
