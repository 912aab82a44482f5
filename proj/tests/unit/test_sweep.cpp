#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "tqc/errors.hpp"
#include "tqc/sweep.hpp"

using namespace tqc;
using namespace tqc::sweep;
using doctest::Approx;

namespace {

std::string render(const SweepResult& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream is(csv);
    std::string line;
    bool past_header = false;
    while (std::getline(is, line)) {
        if (line.rfind("#", 0) == 0) continue;
        if (!past_header) {
            past_header = true;
            continue;
        }
        out.push_back(line);
    }
    return out;
}

SweepSpec small_grid() {
    SweepSpec s;
    s.fixed = {{Param::gamma, 0.5}, {Param::jz_over_j, 0.3}, {Param::j0_over_j, -0.3}};
    s.axes = {Axis{Param::t_over_j, 0.5, 1.0, 2, Spacing::linear, {}},
              Axis{Param::h_over_j, -1.0, 1.0, 2, Spacing::linear, {}}};
    return s;
}

}  // namespace

TEST_CASE("parameter and measure names") {
    for (Param p : kAllParams) CHECK(parse_param(name(p)) == p);
    for (Measure m : kAllMeasures) CHECK(parse_measure(name(m)) == m);
    try {
        parse_param("J1_over_J");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("J1_over_J") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_measure("negativity"), ConfigError);
}

TEST_CASE("axis values") {
    const Axis lin{Param::h_over_j, -3.0, 3.0, 7, Spacing::linear, {}};
    const auto v = lin.values();
    REQUIRE(v.size() == 7);
    CHECK(v.front() == -3.0);
    CHECK(v.back() == 3.0);
    CHECK(v[3] == Approx(0.0));
    const Axis lg{Param::t_over_j, 0.01, 100.0, 5, Spacing::log, {}};
    const auto w = lg.values();
    CHECK(w[2] == Approx(1.0));
    CHECK(w.back() == 100.0);
}

TEST_CASE("sweep validation") {
    auto s = small_grid();
    CHECK_NOTHROW(s.validate());

    auto none = s;
    none.axes.clear();
    CHECK_THROWS_AS(none.validate(), ConfigError);

    auto three = s;
    three.axes.push_back(Axis{Param::gamma, 0.0, 1.0, 2, Spacing::linear, {}});
    CHECK_THROWS_AS(three.validate(), ConfigError);

    auto one_point = s;
    one_point.axes[1].n_points = 1;
    CHECK_THROWS_AS(one_point.validate(), ConfigError);

    auto cold = s;
    cold.axes[0].start = 0.0;
    CHECK_THROWS_AS(cold.validate(), ConfigError);

    auto twice = s;
    twice.fixed.emplace_back(Param::h_over_j, 0.2);
    CHECK_THROWS_AS(twice.validate(), ConfigError);

    auto no_t = s;
    no_t.axes.erase(no_t.axes.begin());
    CHECK_THROWS_AS(no_t.validate(), ConfigError);
}

TEST_CASE("preset fixed parameters and axes") {
    struct Expect {
        const char* name;
        std::map<Param, double> fixed;
        std::vector<Param> axes;
    };
    const std::vector<Expect> table{
        {"fig2a", {{Param::jz_over_j, 0.0}, {Param::gamma, 0.95}, {Param::h_over_j, 0.27}},
         {Param::j0_over_j, Param::t_over_j}},
        {"fig2b", {{Param::jz_over_j, 0.0}, {Param::gamma, 0.95}, {Param::h_over_j, 0.27}},
         {Param::j0_over_j, Param::t_over_j}},
        {"fig2c", {{Param::jz_over_j, 0.3}, {Param::gamma, 0.6}, {Param::h_over_j, 0.35}},
         {Param::j0_over_j, Param::t_over_j}},
        {"fig2d", {{Param::jz_over_j, 0.3}, {Param::gamma, 0.6}, {Param::h_over_j, 0.35}},
         {Param::j0_over_j, Param::t_over_j}},
        {"fig3a", {{Param::gamma, 0.5}, {Param::j0_over_j, -0.3}, {Param::jz_over_j, 0.3}},
         {Param::t_over_j, Param::h_over_j}},
        {"fig3b", {{Param::gamma, 0.5}, {Param::j0_over_j, -0.3}, {Param::jz_over_j, 0.3}},
         {Param::t_over_j, Param::h_over_j}},
        {"fig4a",
         {{Param::gamma, 0.5}, {Param::j0_over_j, -0.3}, {Param::jz_over_j, 0.3}, {Param::t_over_j, 0.5}},
         {Param::h_over_j}},
        {"fig4b",
         {{Param::gamma, 0.5}, {Param::j0_over_j, -0.3}, {Param::jz_over_j, 0.3}, {Param::t_over_j, 1.0}},
         {Param::h_over_j}},
        {"fig5", {{Param::j0_over_j, -0.3}, {Param::jz_over_j, 0.3}, {Param::h_over_j, 0.5}},
         {Param::gamma, Param::t_over_j}},
    };
    CHECK(preset_names().size() == table.size());
    for (const auto& e : table) {
        CAPTURE(e.name);
        const auto s = figure_preset(e.name);
        CHECK(s.fixed.size() == e.fixed.size());
        for (const auto& [p, v] : e.fixed) CHECK(s.fixed_value(p) == v);
        REQUIRE(s.axes.size() == e.axes.size());
        for (std::size_t i = 0; i < e.axes.size(); ++i) CHECK(s.axes[i].param == e.axes[i]);
        CHECK_NOTHROW(s.validate());
    }
    CHECK(figure_preset("fig3a").axes[0].values() == std::vector<double>{0.2, 0.5, 0.7, 1.5});
    CHECK(figure_preset("fig2a").axes[1].values().front() == kMinPresetTemperature);
    CHECK(figure_preset("fig2a").axes[0].n_points == kDefaultPresetPoints);
    CHECK_THROWS_AS(figure_preset("fig9"), ConfigError);
}

TEST_CASE("peak counting") {
    std::vector<std::pair<double, double>> mono;
    for (int i = 0; i < 20; ++i) mono.emplace_back(i, i * 0.1);
    CHECK(count_peaks(mono, 0.005) == 0);

    std::vector<std::pair<double, double>> two;
    for (int i = 0; i < 200; ++i) {
        const double x = -3.0 + 6.0 * i / 199.0;
        two.emplace_back(x, std::exp(-(x - 1) * (x - 1) * 4) + std::exp(-(x + 1) * (x + 1) * 4));
    }
    CHECK(count_peaks(two, 0.005) == 2);
    CHECK(count_peaks(two, 2.0) == 0);

    // A bump smaller than the prominence is ignored; plateaus count once.
    CHECK(count_peaks({{0, 0.0}, {1, 0.003}, {2, 0.0}, {3, 1.0}, {4, 1.0}, {5, 0.0}}, 0.005) == 1);
    CHECK_THROWS_AS(count_peaks({{0, 0.0}, {1, 1.0}}, 0.005), std::invalid_argument);
    CHECK_THROWS_AS(count_peaks(two, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(count_peaks({{1, 0.0}, {0, 1.0}, {2, 0.0}}, 0.005), std::invalid_argument);
}

TEST_CASE("near-infinite temperature single point") {
    SweepSpec s;
    s.fixed = {{Param::t_over_j, 1e4}, {Param::gamma, 0.95}, {Param::j0_over_j, 0.5}};
    s.axes = {Axis{Param::h_over_j, 0.27, 0.27, 2, Spacing::linear, {}}};
    const auto r = run_sweep(s);
    for (const auto& g : r.rows) {
        CHECK(g.report.qd <= 1e-3);
        CHECK(g.report.tdd <= 1e-3);
    }
}

TEST_CASE("row-major output and CSV layout") {
    auto spec = small_grid();
    spec.oracle_every = 2;
    const auto r = run_sweep(spec);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows[0].coords[1] == 0.5);
    CHECK(r.rows[0].coords[2] == -1.0);
    CHECK(r.rows[1].coords[1] == 0.5);
    CHECK(r.rows[1].coords[2] == 1.0);
    CHECK(r.rows[2].coords[1] == 1.0);
    CHECK(r.oracle.size() == 2);
    for (const auto& o : r.oracle) {
        CHECK(std::abs(o.qd) < 1e-4);
        CHECK(std::abs(o.tdd) < 1e-4);
    }

    const auto csv = render(r);
    CHECK(csv.back() == '\n');
    CHECK(csv.find(std::string(kCsvColumns) + "\n") != std::string::npos);
    CHECK(csv.find("# seed = 0\n") != std::string::npos);
    CHECK(csv.find("# version = " + version() + "\n") != std::string::npos);
    CHECK(csv.find("# gamma = 0.5\n") != std::string::npos);
    const auto rows = data_lines(csv);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("-0.3,0.5,-1,0.5,0.3,", 0) == 0);
    CHECK(std::count(rows[0].begin(), rows[0].end(), ',') == 11);

    SweepResult empty;
    empty.spec = small_grid();
    const auto bare = render(empty);
    CHECK(data_lines(bare).empty());
    CHECK(bare.find(kCsvColumns) != std::string::npos);
}

TEST_CASE("unrequested measures are NaN") {
    auto spec = small_grid();
    spec.measures = {Measure::qd};
    const auto r = run_sweep(spec);
    CHECK(std::isnan(r.rows[0].report.tdd));
    CHECK_FALSE(std::isnan(r.rows[0].report.qd));
    CHECK(data_lines(render(r))[0].find(",nan,") != std::string::npos);
}

TEST_CASE("determinism across runs and worker counts") {
    auto spec = figure_preset("fig3a", 41);
    spec.seed = 7;
    const auto a = render(run_sweep(spec));
    CHECK(a == render(run_sweep(spec)));
    spec.workers = 4;
    CHECK(a == render(run_sweep(spec)));
}

TEST_CASE("configuration files") {
    std::istringstream ok(
        "# fig4-like line\n"
        "[sweep]\nname = line\nmeasures = qd, tdd\nseed = 3\noracle_every = 0\n"
        "[fixed]\ngamma = 0.5\nJ0_over_J = -0.3\nJz_over_J = 0.3\nT_over_J = 0.5\n"
        "[axis1]\nparam = h_over_J\nstart = -3\nstop = 3\nn_points = 11\nspacing = linear\n");
    const auto s = parse_config(ok);
    CHECK(s.name == "line");
    CHECK(s.seed == 3);
    CHECK(s.measures.size() == 2);
    CHECK(s.fixed_value(Param::t_over_j) == 0.5);
    REQUIRE(s.axes.size() == 1);
    CHECK(s.axes[0].values().size() == 11);

    std::istringstream list(
        "[fixed]\nh_over_J = 0.1\n[axis1]\nparam = T_over_J\nspacing = list\nvalues = 0.2, 0.5\n"
        "[axis2]\nparam = gamma\nstart = -1\nstop = 1\nn_points = 3\n");
    CHECK(parse_config(list).axes[0].values() == std::vector<double>{0.2, 0.5});

    auto fails_naming = [](const std::string& text, const std::string& key) {
        std::istringstream is(text);
        try {
            parse_config(is);
        } catch (const ConfigError& e) {
            return std::string(e.what()).find(key) != std::string::npos;
        }
        return false;
    };
    const std::string axis = "[axis1]\nparam = h_over_J\nstart = -1\nstop = 1\nn_points = 3\n";
    CHECK(fails_naming("[fixed]\nT_over_J = 1\nJ2_over_J = 0\n" + axis, "J2_over_J"));
    CHECK(fails_naming("[fixed]\nT_over_J = abc\n" + axis, "fixed.T_over_J"));
    CHECK(fails_naming("[fixed]\nT_over_J = -1\n" + axis, "T_over_J"));
    CHECK(fails_naming("[sweep]\ncolour = red\n[fixed]\nT_over_J = 1\n" + axis, "sweep.colour"));
    CHECK(fails_naming("[plot]\nx = 1\n", "plot"));
    CHECK(fails_naming("[fixed]\nT_over_J = 1\n[axis1]\nstart = 0\nstop = 1\n", "axis1.param"));

    CHECK_THROWS_AS(load_config("/nonexistent/sweep.ini"), IoError);
}

TEST_CASE("output errors carry the path") {
    SweepResult r;
    r.spec = small_grid();
    const std::string path = "/nonexistent-dir/out.csv";
    try {
        emit_csv(r, path);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(e.path() == path);
    }
    const auto tmp = std::filesystem::temp_directory_path() / "tqc_emit_test.csv";
    emit_csv(run_sweep(small_grid()), tmp.string());
    std::ifstream in(tmp);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(data_lines(buf.str()).size() == 4);
    std::filesystem::remove(tmp);
}
