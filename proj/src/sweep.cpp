#include "tqc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tqc/errors.hpp"
#include "tqc/oracle.hpp"

#ifndef TQC_VERSION
#define TQC_VERSION "0.0.0"
#endif

namespace tqc::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t index_of(Param p) {
    return static_cast<std::size_t>(std::find(kAllParams.begin(), kAllParams.end(), p) -
                                    kAllParams.begin());
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string_view name(Param p) {
    switch (p) {
        case Param::j0_over_j: return "J0_over_J";
        case Param::t_over_j: return "T_over_J";
        case Param::h_over_j: return "h_over_J";
        case Param::gamma: return "gamma";
        case Param::jz_over_j: return "Jz_over_J";
    }
    return "?";
}

Param parse_param(std::string_view key) {
    for (Param p : kAllParams)
        if (name(p) == key) return p;
    throw ConfigError("unknown parameter '" + std::string(key) + "'");
}

std::string_view name(Measure m) {
    switch (m) {
        case Measure::qd: return "qd";
        case Measure::tdd: return "tdd";
        case Measure::concurrence: return "concurrence";
        case Measure::mutual_info: return "mutual_info";
        case Measure::entropy_ab: return "entropy_ab";
    }
    return "?";
}

Measure parse_measure(std::string_view key) {
    for (Measure m : kAllMeasures)
        if (name(m) == key) return m;
    throw ConfigError("unknown measure '" + std::string(key) + "'");
}

std::vector<double> Axis::values() const {
    if (spacing == Spacing::list) return list;
    std::vector<double> v(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double f = static_cast<double>(i) / (n_points - 1);
        v[i] = spacing == Spacing::linear
                   ? start + (stop - start) * f
                   : std::exp(std::log(start) + (std::log(stop) - std::log(start)) * f);
    }
    // Pin the end point exactly.
    v.back() = stop;
    return v;
}

std::string Axis::describe() const {
    std::ostringstream os;
    if (spacing == Spacing::list) {
        os << "list";
        for (double x : list) os << ' ' << format_number(x);
        return os.str();
    }
    os << (spacing == Spacing::linear ? "linear " : "log ") << format_number(start) << ' '
       << format_number(stop) << ' ' << n_points;
    return os.str();
}

std::optional<double> SweepSpec::fixed_value(Param p) const {
    for (const auto& [k, v] : fixed)
        if (k == p) return v;
    return std::nullopt;
}

bool SweepSpec::wants(Measure m) const {
    return std::find(measures.begin(), measures.end(), m) != measures.end();
}

void SweepSpec::validate() const {
    if (axes.empty() || axes.size() > 2)
        throw ConfigError("a sweep needs one or two axes, got " + std::to_string(axes.size()));
    for (Param p : kAllParams) {
        int uses = fixed_value(p) ? 1 : 0;
        for (const auto& a : axes) uses += a.param == p ? 1 : 0;
        if (uses > 1)
            throw ConfigError("parameter '" + std::string(sweep::name(p)) +
                              "' is assigned more than once");
    }
    for (const auto& a : axes) {
        if (a.spacing == Spacing::list) {
            if (a.list.empty())
                throw ConfigError("axis '" + std::string(sweep::name(a.param)) + "' has an empty list");
        } else if (a.n_points < 2) {
            throw ConfigError("axis '" + std::string(sweep::name(a.param)) + "' needs n_points >= 2");
        }
        if (a.spacing == Spacing::log && (a.start <= 0.0 || a.stop <= 0.0))
            throw ConfigError("axis '" + std::string(sweep::name(a.param)) +
                              "' uses log spacing with a non-positive bound");
        if (a.param == Param::t_over_j)
            for (double t : a.values())
                if (!(t > 0.0))
                    throw ConfigError("T_over_J must be positive, got " + format_number(t));
    }
    const bool t_on_axis = std::any_of(axes.begin(), axes.end(),
                                       [](const Axis& a) { return a.param == Param::t_over_j; });
    if (!t_on_axis) {
        const auto t = fixed_value(Param::t_over_j);
        if (!t) throw ConfigError("T_over_J must be fixed or swept");
        if (!(*t > 0.0)) throw ConfigError("T_over_J must be positive, got " + format_number(*t));
    }
    if (measures.empty()) throw ConfigError("no measures requested");
    if (oracle_every < 0) throw ConfigError("oracle_every must be >= 0");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

ModelParams model_params(const Coordinates& c) {
    return {1.0, c[index_of(Param::gamma)], c[index_of(Param::jz_over_j)],
            c[index_of(Param::j0_over_j)], c[index_of(Param::h_over_j)]};
}

GridPoint evaluate_point(const Coordinates& c, const std::vector<Measure>& measures) {
    GridPoint g;
    g.coords = c;
    const auto state = thermal_state(model_params(c), ThermalPoint(c[index_of(Param::t_over_j)]));
    g.rho_eig_min = state.min_eigenvalue;
    g.psd = state.psd;

    auto& r = g.report;
    r.qd = r.tdd = r.concurrence = r.mutual_info = r.entropy_ab = r.entropy_a = kNaN;
    r.d1 = r.d2 = kNaN;
    auto wants = [&](Measure m) {
        return std::find(measures.begin(), measures.end(), m) != measures.end();
    };
    try {
        if (wants(Measure::qd)) {
            const auto q = qd_x_state(state.rho);
            r.qd = q.qd;
            r.d1 = q.d1;
            r.d2 = q.d2;
            r.qd_branch = q.branch;
        }
        if (wants(Measure::tdd)) {
            const auto t = tdd_x_state(state.rho);
            r.tdd = t.tdd;
            r.tdd_branch = t.branch;
        }
        if (wants(Measure::concurrence)) r.concurrence = concurrence(state.rho);
        if (wants(Measure::mutual_info)) r.mutual_info = mutual_information(state.rho);
        if (wants(Measure::entropy_ab)) r.entropy_ab = von_neumann_entropy(state.rho);
    } catch (const InvalidState&) {
        // Far outside the PSD tolerance; the row stays flagged with NaN measures.
        g.psd = false;
    }
    return g;
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    result.spec = spec;

    Coordinates base{};
    for (const auto& [p, v] : spec.fixed) base[index_of(p)] = v;
    std::vector<std::vector<double>> axis_values;
    for (const auto& a : spec.axes) axis_values.push_back(a.values());

    std::vector<Coordinates> grid;
    const std::size_t inner = axis_values.size() == 2 ? axis_values[1].size() : 1;
    grid.reserve(axis_values[0].size() * inner);
    for (double x : axis_values[0]) {
        for (std::size_t j = 0; j < inner; ++j) {
            Coordinates c = base;
            c[index_of(spec.axes[0].param)] = x;
            if (axis_values.size() == 2) c[index_of(spec.axes[1].param)] = axis_values[1][j];
            grid.push_back(c);
        }
    }

    result.rows.resize(grid.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t i = next++; i < grid.size(); i = next++)
                result.rows[i] = evaluate_point(grid[i], spec.measures);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = grid.size();
        }
    };
    if (spec.workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < spec.workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    result.psd_flags = static_cast<std::size_t>(
        std::count_if(result.rows.begin(), result.rows.end(), [](const auto& g) { return !g.psd; }));

    if (spec.oracle_every > 0) {
        for (std::size_t i = 0; i < result.rows.size(); i += spec.oracle_every) {
            const auto& row = result.rows[i];
            if (!row.psd) continue;
            const auto params = model_params(row.coords);
            const ThermalPoint tp(row.coords[index_of(Param::t_over_j)]);
            const auto closed = correlators(params, tp);
            const auto chain = oracle::finite_chain_correlators({14, params, tp});
            OracleResidual res;
            res.row = i;
            res.correlators = std::max({std::abs(closed.xx - chain.xx), std::abs(closed.yy - chain.yy),
                                        std::abs(closed.zz - chain.zz), std::abs(closed.z - chain.z)});
            const auto rho = dimer_density_matrix(closed).rho;
            res.qd = std::isnan(row.report.qd) ? kNaN : row.report.qd - oracle::qd_bruteforce(rho);
            res.tdd = std::isnan(row.report.tdd)
                          ? kNaN
                          : row.report.tdd - oracle::tdd_bruteforce(rho, 8, spec.seed);
            result.oracle.push_back(res);
        }
    }
    return result;
}

std::vector<std::string_view> preset_names() {
    return {"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig4a", "fig4b", "fig5"};
}

SweepSpec figure_preset(std::string_view preset, int points) {
    if (points < 2) throw ConfigError("points must be >= 2");
    const Axis j0_axis{Param::j0_over_j, -2.0, 2.0, points, Spacing::linear, {}};
    const Axis t_axis{Param::t_over_j, kMinPresetTemperature, 2.0, points, Spacing::linear, {}};
    const Axis h_axis{Param::h_over_j, -3.0, 3.0, points, Spacing::linear, {}};
    const Axis gamma_axis{Param::gamma, -1.5, 1.5, points, Spacing::linear, {}};

    SweepSpec s;
    s.name = std::string(preset);
    if (preset == "fig2a" || preset == "fig2b") {
        s.fixed = {{Param::jz_over_j, 0.0}, {Param::gamma, 0.95}, {Param::h_over_j, 0.27}};
        s.axes = {j0_axis, t_axis};
    } else if (preset == "fig2c" || preset == "fig2d") {
        s.fixed = {{Param::jz_over_j, 0.3}, {Param::gamma, 0.6}, {Param::h_over_j, 0.35}};
        s.axes = {j0_axis, t_axis};
    } else if (preset == "fig3a" || preset == "fig3b") {
        s.fixed = {{Param::gamma, 0.5}, {Param::j0_over_j, -0.3}, {Param::jz_over_j, 0.3}};
        Axis lines{Param::t_over_j, 0.0, 0.0, 4, Spacing::list, {0.2, 0.5, 0.7, 1.5}};
        s.axes = {lines, h_axis};
    } else if (preset == "fig4a" || preset == "fig4b") {
        s.fixed = {{Param::gamma, 0.5},
                   {Param::j0_over_j, -0.3},
                   {Param::jz_over_j, 0.3},
                   {Param::t_over_j, preset == "fig4a" ? 0.5 : 1.0}};
        s.axes = {h_axis};
    } else if (preset == "fig5") {
        s.fixed = {{Param::j0_over_j, -0.3}, {Param::jz_over_j, 0.3}, {Param::h_over_j, 0.5}};
        s.axes = {gamma_axis, t_axis};
    } else {
        throw ConfigError("unknown preset '" + std::string(preset) + "'");
    }
    return s;
}

int count_peaks(const std::vector<std::pair<double, double>>& series, double prominence) {
    if (series.size() < 3) throw std::invalid_argument("count_peaks needs at least 3 points");
    if (!(prominence > 0.0)) throw std::invalid_argument("prominence must be positive");
    for (std::size_t i = 1; i < series.size(); ++i)
        if (series[i].first < series[i - 1].first)
            throw std::invalid_argument("series must be sorted by x");

    const std::size_t n = series.size();
    auto y = [&](std::size_t i) { return series[i].second; };
    int peaks = 0;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y(i) > y(i - 1))) {
            ++i;
            continue;
        }
        // Walk over a plateau; it is a maximum only if it falls afterwards.
        std::size_t end = i;
        while (end + 1 < n && y(end + 1) == y(i)) ++end;
        if (end + 1 >= n || !(y(end + 1) < y(i))) {
            i = end + 1;
            continue;
        }
        const double top = y(i);
        double left_min = top;
        for (std::size_t k = i; k-- > 0;) {
            if (y(k) > top) break;
            left_min = std::min(left_min, y(k));
        }
        double right_min = top;
        for (std::size_t k = end + 1; k < n; ++k) {
            if (y(k) > top) break;
            right_min = std::min(right_min, y(k));
        }
        if (top - std::max(left_min, right_min) >= prominence) ++peaks;
        i = end + 1;
    }
    return peaks;
}

void write_csv(const SweepResult& result, std::ostream& os) {
    const auto& spec = result.spec;
    os << "# tqc sweep table\n";
    os << "# version = " << version() << '\n';
    os << "# name = " << spec.name << '\n';
    os << "# seed = " << spec.seed << '\n';
    os << "# J = 1\n";
    for (Param p : kAllParams) {
        os << "# " << name(p) << " = ";
        if (auto v = spec.fixed_value(p)) {
            os << format_number(*v) << '\n';
            continue;
        }
        for (std::size_t a = 0; a < spec.axes.size(); ++a)
            if (spec.axes[a].param == p) os << "axis " << a + 1 << ' ' << spec.axes[a].describe();
        os << '\n';
    }
    os << "# measures = ";
    for (std::size_t m = 0; m < spec.measures.size(); ++m)
        os << (m ? "," : "") << name(spec.measures[m]);
    os << '\n';
    os << "# oracle_every = " << spec.oracle_every << '\n';
    os << "# rows = " << result.rows.size() << '\n';
    os << "# psd_flags = " << result.psd_flags << '\n';
    os << "# oracle_checks = " << result.oracle.size() << '\n';
    if (!result.oracle.empty()) {
        double corr = 0.0, qd = 0.0, tdd = 0.0;
        for (const auto& r : result.oracle) {
            corr = std::max(corr, r.correlators);
            if (!std::isnan(r.qd)) qd = std::max(qd, std::abs(r.qd));
            if (!std::isnan(r.tdd)) tdd = std::max(tdd, std::abs(r.tdd));
        }
        os << "# oracle_max_correlator_residual = " << format_number(corr) << '\n';
        os << "# oracle_max_qd_residual = " << format_number(qd) << '\n';
        os << "# oracle_max_tdd_residual = " << format_number(tdd) << '\n';
    }
    os << kCsvColumns << '\n';
    for (const auto& g : result.rows) {
        for (double c : g.coords) os << format_number(c) << ',';
        const auto& r = g.report;
        for (double v : {r.qd, r.tdd, r.concurrence, r.mutual_info, r.entropy_ab})
            os << format_number(v) << ',';
        os << format_number(g.rho_eig_min) << ',' << (g.psd ? 0 : 1) << '\n';
    }
}

void emit_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    write_csv(result, out);
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

namespace {

namespace pt = boost::property_tree;

double number_at(const pt::ptree& node, const std::string& key) {
    const auto text = node.get_value<std::string>();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' expects a number, got '" + text + "'");
    }
}

int integer_at(const pt::ptree& node, const std::string& key) {
    const double v = number_at(node, key);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError("key '" + key + "' expects an integer");
    return static_cast<int>(v);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

Axis parse_axis(const pt::ptree& section, const std::string& prefix) {
    Axis a;
    bool have_param = false, have_start = false, have_stop = false;
    for (const auto& [k, node] : section) {
        const std::string key = prefix + "." + k;
        if (k == "param") {
            a.param = parse_param(node.get_value<std::string>());
            have_param = true;
        } else if (k == "start") {
            a.start = number_at(node, key);
            have_start = true;
        } else if (k == "stop") {
            a.stop = number_at(node, key);
            have_stop = true;
        } else if (k == "n_points") {
            a.n_points = integer_at(node, key);
        } else if (k == "spacing") {
            const auto v = node.get_value<std::string>();
            if (v == "linear") a.spacing = Spacing::linear;
            else if (v == "log") a.spacing = Spacing::log;
            else if (v == "list") a.spacing = Spacing::list;
            else throw ConfigError("key '" + key + "' must be linear, log or list");
        } else if (k == "values") {
            for (const auto& item : split_list(node.get_value<std::string>())) {
                pt::ptree leaf(item);
                a.list.push_back(number_at(leaf, key));
            }
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    if (!have_param) throw ConfigError("missing key '" + prefix + ".param'");
    if (a.spacing == Spacing::list) {
        a.n_points = static_cast<int>(a.list.size());
    } else if (!have_start || !have_stop) {
        throw ConfigError("missing key '" + prefix + (have_start ? ".stop'" : ".start'"));
    }
    return a;
}

}  // namespace

SweepSpec parse_config(std::istream& is) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("malformed configuration: " + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }
    SweepSpec s;
    s.axes.clear();
    std::optional<Axis> axis1, axis2;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("key '" + section + "' must be inside a section");
        if (section == "sweep") {
            for (const auto& [k, node] : body) {
                const std::string key = "sweep." + k;
                if (k == "name") s.name = node.get_value<std::string>();
                else if (k == "oracle_every") s.oracle_every = integer_at(node, key);
                else if (k == "workers") s.workers = integer_at(node, key);
                else if (k == "seed") {
                    const int v = integer_at(node, key);
                    if (v < 0) throw ConfigError("key '" + key + "' must be >= 0");
                    s.seed = static_cast<std::uint64_t>(v);
                } else if (k == "measures") {
                    s.measures.clear();
                    for (const auto& m : split_list(node.get_value<std::string>()))
                        s.measures.push_back(parse_measure(m));
                } else {
                    throw ConfigError("unknown key '" + key + "'");
                }
            }
        } else if (section == "fixed") {
            for (const auto& [k, node] : body)
                s.fixed.emplace_back(parse_param(k), number_at(node, "fixed." + k));
        } else if (section == "axis1") {
            axis1 = parse_axis(body, section);
        } else if (section == "axis2") {
            axis2 = parse_axis(body, section);
        } else {
            throw ConfigError("unknown section '" + section + "'");
        }
    }
    if (axis2 && !axis1) throw ConfigError("[axis2] given without [axis1]");
    if (axis1) s.axes.push_back(*axis1);
    if (axis2) s.axes.push_back(*axis2);
    s.validate();
    return s;
}

SweepSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open for reading");
    return parse_config(in);
}

std::string version() { return TQC_VERSION; }

}  // namespace tqc::sweep
