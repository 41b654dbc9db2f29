#include "ionsim/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ionsim/nmpm.hpp"
#include "ionsim/validate.hpp"

namespace ionsim {

namespace {

std::string fmt12e(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::string initial_to_string(InitialKind kind, int n) {
    switch (kind) {
        case InitialKind::fock_ground: return "fock_ground:" + std::to_string(n);
        case InitialKind::fock_excited: return "fock_excited:" + std::to_string(n);
        case InitialKind::coherent_excited: return "coherent_excited";
    }
    return "?";
}

}  // namespace

std::string format_float_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void RunConfig::validate() const {
    if (tau_steps < 2) throw std::invalid_argument("config: tau_steps must be >= 2");
    if (fock_cutoff < 16) throw std::invalid_argument("config: cutoff must be >= 16");
    if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be > 0");
    if (order != 1 && order != 2) throw std::invalid_argument("config: order must be 1 or 2");
    if (!(tau_max > 0.0)) throw std::invalid_argument("config: tau_max must be > 0");
    for (double l : lambdas)
        if (!(l > 0.0)) throw std::invalid_argument("config: lambdas must be > 0");
}

InitialStateSpec RunConfig::initial() const {
    switch (initial_kind) {
        case InitialKind::fock_ground: return InitialStateSpec::fock_ground(initial_n);
        case InitialKind::fock_excited: return InitialStateSpec::fock_excited(initial_n);
        case InitialKind::coherent_excited: return InitialStateSpec::coherent_excited(alpha);
    }
    throw std::logic_error("RunConfig::initial: unknown kind");
}

void apply_config_line(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "lambda") config.lambda = std::stod(value);
    else if (key == "eta") config.eta = std::stod(value);
    else if (key == "kappa") config.kappa = std::stod(value);
    else if (key == "alpha") config.alpha = std::stod(value);
    else if (key == "order") config.order = std::stoi(value);
    else if (key == "cutoff") config.fock_cutoff = std::stoi(value);
    else if (key == "tau_max") config.tau_max = std::stod(value);
    else if (key == "tau_steps") config.tau_steps = std::stoi(value);
    else if (key == "out_dir") config.out_dir = value;
    else if (key == "threads") config.threads = std::stoi(value);
    else if (key == "lambdas") config.lambdas = parse_list(value);
    else if (key == "etas") config.etas = parse_list(value);
    else if (key == "alphas") config.alphas = parse_list(value);
    else if (key == "initial") {
        const auto colon = value.find(':');
        const std::string kind = colon == std::string::npos ? value : value.substr(0, colon);
        const int n = colon == std::string::npos ? 0 : std::stoi(value.substr(colon + 1));
        if (kind == "fock_ground") { config.initial_kind = InitialKind::fock_ground; config.initial_n = n; }
        else if (kind == "fock_excited") { config.initial_kind = InitialKind::fock_excited; config.initial_n = n; }
        else if (kind == "coherent_excited") config.initial_kind = InitialKind::coherent_excited;
        else throw std::invalid_argument("config: unknown initial kind '" + kind + "'");
    } else if (key == "outputs") {
        config.out_csv = value.find("csv") != std::string::npos;
        config.out_svg = value.find("svg") != std::string::npos;
        config.out_deviation_report = value.find("deviation_report") != std::string::npos;
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        apply_config_line(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void print_config(std::ostream& os, const RunConfig& config) {
    os << "lambda = " << format_float_short(config.lambda) << "\n";
    os << "eta = " << format_float_short(config.eta) << "\n";
    os << "kappa = " << format_float_short(config.kappa) << "\n";
    os << "alpha = " << format_float_short(config.alpha) << "\n";
    os << "order = " << config.order << "\n";
    os << "cutoff = " << config.fock_cutoff << "\n";
    os << "tau_max = " << format_float_short(config.tau_max) << "\n";
    os << "tau_steps = " << config.tau_steps << "\n";
    os << "initial = " << initial_to_string(config.initial_kind, config.initial_n) << "\n";
    os << "out_dir = " << config.out_dir << "\n";
    os << "threads = " << config.threads << "\n";
    std::string outputs;
    if (config.out_csv) outputs += "csv";
    if (config.out_svg) outputs += outputs.empty() ? "svg" : ",svg";
    if (config.out_deviation_report) outputs += outputs.empty() ? "deviation_report" : ",deviation_report";
    os << "outputs = " << outputs << "\n";
    if (!config.lambdas.empty()) {
        os << "lambdas =";
        for (size_t i = 0; i < config.lambdas.size(); ++i)
            os << (i ? "," : " ") << format_float_short(config.lambdas[i]);
        os << "\n";
    }
}

// ---------------------------------------------------------------------------
// Comparison series

std::vector<ComparisonRow> compute_comparison_series(const IonParams& p,
                                                     const InitialStateSpec& initial, int order,
                                                     TruncationConfig t, double tau_max,
                                                     int tau_steps, DeviationReport* report) {
    const TimeGrid grid = TimeGrid::linspace(tau_max, tau_steps);
    const FockSpinState psi0 = build_initial_state(initial, t);
    const ExactPropagator exact(p, t);
    const double lambda = p.lambda();

    const bool coherent = initial.kind == InitialKind::coherent_excited;
    std::optional<EnginePropagator> engine;
    if (!coherent) {
        const auto split = split_high_intensity(p, t);
        engine.emplace(split.h0, split.hp, order, grid.taus[1] - grid.taus[0]);
        engine->reset(psi0);
    }

    std::vector<ComparisonRow> rows;
    rows.reserve(grid.taus.size());
    for (size_t i = 0; i < grid.taus.size(); ++i) {
        const double tau = grid.taus[i];
        double pe_pert, pert_norm_defect;
        if (coherent) {
            const auto cf = order == 1
                                ? first_order_coherent_excited(p, initial.alpha, tau, t, report)
                                : second_order_coherent_excited(p, initial.alpha, tau, t, report);
            pe_pert = p_excited(cf.state);
            pert_norm_defect = std::abs(cf.state.norm() - 1.0);
        } else {
            if (i > 0) engine->step();
            const FockSpinState state = assemble_state(engine->kets(lambda));
            pe_pert = p_excited(state);
            pert_norm_defect = std::abs(state.norm() - 1.0);
        }
        const FockSpinState psi_exact = exact.evolve(psi0, tau);
        const double pe_exact = p_excited(psi_exact);
        const double pe_sr = p_excited_small_rotation(coherent ? initial.alpha : 0.0, p.eta,
                                                      lambda, tau);
        ComparisonRow row;
        row.tau = tau;
        row.pe_pert = pe_pert;
        row.pe_small_rot = pe_sr;
        row.pe_exact = pe_exact;
        row.err_pert_exact = std::abs(pe_pert - pe_exact);
        row.err_pert_smallrot = std::abs(pe_pert - pe_sr);
        row.norm_defect = std::max(pert_norm_defect, std::abs(psi_exact.norm() - 1.0));
        rows.push_back(row);
    }
    return rows;
}

void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows) {
    os << "tau,pe_pert,pe_small_rot,pe_exact,err_pert_exact,err_pert_smallrot,norm_defect\n";
    for (const auto& r : rows) {
        os << fmt12e(r.tau) << ',' << fmt12e(r.pe_pert) << ',' << fmt12e(r.pe_small_rot) << ','
           << fmt12e(r.pe_exact) << ',' << fmt12e(r.err_pert_exact) << ','
           << fmt12e(r.err_pert_smallrot) << ',' << fmt12e(r.norm_defect) << '\n';
    }
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct SvgFrame {
    static constexpr double width = 900, height = 560;
    static constexpr double left = 70, right = 20, top = 40, bottom = 50;
    double tau_max;

    double x(double tau) const { return left + (width - left - right) * tau / tau_max; }
    double y(double pe) const { return top + (height - top - bottom) * (1.0 - pe); }
};

std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void polyline(std::ostream& os, const SvgFrame& f, const std::vector<ComparisonRow>& rows,
              double ComparisonRow::*field, const char* stroke, const char* dash) {
    os << "  <polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.2\"";
    if (dash[0]) os << " stroke-dasharray=\"" << dash << "\"";
    os << " points=\"";
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i) os << ' ';
        os << px(f.x(rows[i].tau)) << ',' << px(f.y(std::clamp(rows[i].*field, 0.0, 1.0)));
    }
    os << "\"/>\n";
}

}  // namespace

void write_comparison_svg(std::ostream& os, const std::vector<ComparisonRow>& rows,
                          const std::string& title) {
    const SvgFrame f{rows.empty() ? 1.0 : rows.back().tau};
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
       << f.height << "\" viewBox=\"0 0 " << f.width << " " << f.height << "\">\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "  <text x=\"" << px(f.width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // axes
    os << "  <line x1=\"" << px(f.left) << "\" y1=\"" << px(f.y(0)) << "\" x2=\""
       << px(f.width - f.right) << "\" y2=\"" << px(f.y(0)) << "\" stroke=\"black\"/>\n";
    os << "  <line x1=\"" << px(f.left) << "\" y1=\"" << px(f.y(0)) << "\" x2=\"" << px(f.left)
       << "\" y2=\"" << px(f.y(1)) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double pe = 0.25 * i;
        os << "  <text x=\"" << px(f.left - 8) << "\" y=\"" << px(f.y(pe) + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_float_short(pe) << "</text>\n";
    }
    const int xticks = 5;
    for (int i = 0; i <= xticks; ++i) {
        const double tau = f.tau_max * i / xticks;
        os << "  <text x=\"" << px(f.x(tau)) << "\" y=\"" << px(f.y(0) + 18)
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_float_short(tau) << "</text>\n";
    }
    os << "  <text x=\"" << px((f.left + f.width - f.right) / 2) << "\" y=\""
       << px(f.height - 12) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"13\">tau</text>\n";
    os << "  <text x=\"18\" y=\"" << px((f.y(0) + f.y(1)) / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
       << "transform=\"rotate(-90 18 " << px((f.y(0) + f.y(1)) / 2) << ")\">Pe</text>\n";

    // series: exact solid, perturbative dashed, small-rotation dotted
    polyline(os, f, rows, &ComparisonRow::pe_exact, "#888888", "");
    polyline(os, f, rows, &ComparisonRow::pe_pert, "#cc0000", "7,4");
    polyline(os, f, rows, &ComparisonRow::pe_small_rot, "#000000", "2,3");

    // legend
    const double lx = f.width - 220, ly = f.top + 8;
    const char* labels[3] = {"perturbative", "small-rotation", "exact"};
    const char* colors[3] = {"#cc0000", "#000000", "#888888"};
    const char* dashes[3] = {"7,4", "2,3", ""};
    for (int i = 0; i < 3; ++i) {
        os << "  <line x1=\"" << px(lx) << "\" y1=\"" << px(ly + 18 * i) << "\" x2=\""
           << px(lx + 36) << "\" y2=\"" << px(ly + 18 * i) << "\" stroke=\"" << colors[i]
           << "\" stroke-width=\"1.6\"";
        if (dashes[i][0]) os << " stroke-dasharray=\"" << dashes[i] << "\"";
        os << "/>\n";
        os << "  <text x=\"" << px(lx + 44) << "\" y=\"" << px(ly + 18 * i + 4)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << labels[i] << "</text>\n";
    }
    os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Commands

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string out_path(const RunConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.out_dir);
    return (std::filesystem::path(config.out_dir) / name).string();
}

}  // namespace

int cmd_fig1(const RunConfig& config, std::ostream& log) {
    config.validate();
    const std::vector<double> lambdas =
        config.lambdas.empty() ? std::vector<double>{0.1, 0.2, 0.3, 0.4} : config.lambdas;
    DeviationReport report;
    for (double lambda : lambdas) {
        const IonParams p = IonParams::from_lambda(lambda, config.eta, config.kappa);
        for (const auto& warning : parameter_warnings(p)) log << "warning: " << warning << "\n";
        const auto rows = compute_comparison_series(
            p, InitialStateSpec::coherent_excited(config.alpha), 2, config.truncation(),
            config.tau_max, config.tau_steps, &report);
        const std::string stem = "fig1_lambda" + format_float_short(lambda);
        if (config.out_csv) {
            std::ostringstream csv;
            write_comparison_csv(csv, rows);
            write_file(out_path(config, stem + ".csv"), csv.str());
            log << "wrote " << stem << ".csv\n";
        }
        if (config.out_svg) {
            std::ostringstream svg;
            write_comparison_svg(svg, rows,
                                 "Pe(tau), lambda=" + format_float_short(lambda) + ", eta=" +
                                     format_float_short(config.eta) + ", alpha=" +
                                     format_float_short(config.alpha));
            write_file(out_path(config, stem + ".svg"), svg.str());
            log << "wrote " << stem << ".svg\n";
        }
    }
    if (config.out_deviation_report) {
        std::ostringstream csv;
        report.write_csv(csv);
        write_file(out_path(config, "deviation_report.csv"), csv.str());
        log << "wrote deviation_report.csv (" << report.rows().size() << " rows)\n";
    }
    return 0;
}

std::vector<SweepRow> run_sweep(const RunConfig& config) {
    config.validate();
    const std::vector<double> lambdas =
        config.lambdas.empty() ? std::vector<double>{config.lambda} : config.lambdas;
    const std::vector<double> etas =
        config.etas.empty() ? std::vector<double>{config.eta} : config.etas;
    const std::vector<double> alphas =
        config.alphas.empty() ? std::vector<double>{config.alpha} : config.alphas;

    struct Combo {
        double lambda, eta, alpha;
    };
    std::vector<Combo> combos;
    for (double l : lambdas)
        for (double e : etas)
            for (double a : alphas) combos.push_back({l, e, a});

    std::vector<std::vector<SweepRow>> per_combo(combos.size());
    const int hw = int(std::thread::hardware_concurrency());
    const int workers =
        std::max(1, std::min<int>(int(combos.size()),
                                  config.threads > 0 ? config.threads : std::max(1, hw)));

    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < combos.size(); i = next.fetch_add(1)) {
            const Combo c = combos[i];
            auto& rows = per_combo[i];
            try {
                const IonParams p = IonParams::from_lambda(c.lambda, c.eta, config.kappa);
                const auto series = compute_comparison_series(
                    p, InitialStateSpec::coherent_excited(c.alpha), config.order,
                    config.truncation(), config.tau_max, config.tau_steps);
                rows.reserve(series.size());
                for (const auto& row : series) rows.push_back({c.lambda, c.eta, c.alpha, row, ""});
            } catch (const std::exception& e) {
                // one error row per grid point so row count stays = grid cardinality
                std::string message = e.what();
                std::replace(message.begin(), message.end(), ',', ';');
                rows.clear();
                const TimeGrid grid = TimeGrid::linspace(config.tau_max, config.tau_steps);
                for (double tau : grid.taus) {
                    ComparisonRow row{};
                    row.tau = tau;
                    rows.push_back({c.lambda, c.eta, c.alpha, row, message});
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    std::vector<SweepRow> rows;  // deterministic order: combo-major, then tau
    for (auto& chunk : per_combo)
        for (auto& row : chunk) rows.push_back(std::move(row));
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "lambda,eta,alpha,tau,pe_pert,pe_small_rot,pe_exact,err_pert_exact,err_pert_smallrot,"
          "norm_defect,error\n";
    for (const auto& r : rows) {
        os << fmt12e(r.lambda) << ',' << fmt12e(r.eta) << ',' << fmt12e(r.alpha) << ','
           << fmt12e(r.row.tau) << ',' << fmt12e(r.row.pe_pert) << ','
           << fmt12e(r.row.pe_small_rot) << ',' << fmt12e(r.row.pe_exact) << ','
           << fmt12e(r.row.err_pert_exact) << ',' << fmt12e(r.row.err_pert_smallrot) << ','
           << fmt12e(r.row.norm_defect) << ',' << r.error << '\n';
    }
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
    const auto rows = run_sweep(config);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_file(out_path(config, "sweep.csv"), csv.str());
    log << "wrote sweep.csv (" << rows.size() << " rows)\n";
    size_t failed = 0;
    for (const auto& r : rows)
        if (!r.error.empty()) ++failed;
    if (failed) log << failed << " rows carry an error\n";
    return 0;
}

int cmd_evolve(const RunConfig& config, std::ostream& log) {
    config.validate();
    const IonParams p = config.params();
    for (const auto& warning : parameter_warnings(p)) log << "warning: " << warning << "\n";
    DeviationReport report;
    const auto rows =
        compute_comparison_series(p, config.initial(), config.order, config.truncation(),
                                  config.tau_max, config.tau_steps, &report);
    if (config.out_csv) {
        std::ostringstream csv;
        write_comparison_csv(csv, rows);
        write_file(out_path(config, "evolve.csv"), csv.str());
        log << "wrote evolve.csv\n";
    }
    if (config.out_svg) {
        std::ostringstream svg;
        write_comparison_svg(svg, rows, "Pe(tau), lambda=" + format_float_short(config.lambda));
        write_file(out_path(config, "evolve.svg"), svg.str());
        log << "wrote evolve.svg\n";
    }
    if (config.out_deviation_report) {
        std::ostringstream csv;
        report.write_csv(csv);
        write_file(out_path(config, "deviation_report.csv"), csv.str());
    }
    return 0;
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
    DeviationReport report;
    const auto results = run_validation_suites(report);
    bool all_pass = true;
    for (const auto& r : results) {
        char line[256];
        std::snprintf(line, sizeof line, "%-24s %s  max_defect=%.3e  tol=%.1e  (%.2fs)",
                      r.name.c_str(), r.pass ? "PASS" : "FAIL", r.max_defect, r.tolerance,
                      r.seconds);
        log << line << "\n";
        if (!r.detail.empty()) log << "    " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    if (config.out_deviation_report) {
        std::ostringstream csv;
        report.write_csv(csv);
        write_file(out_path(config, "deviation_report.csv"), csv.str());
        log << "wrote deviation_report.csv (" << report.rows().size() << " rows)\n";
    }
    log << (all_pass ? "all suites passed" : "FAILURES PRESENT") << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace ionsim
