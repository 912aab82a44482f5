// sweep.hpp: parameter grids over the reduced-unit model (J = 1), figure
// presets, peak counting and the CSV table format.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tqc/measures.hpp"
#include "tqc/model.hpp"

namespace tqc::sweep {

enum class Param { j0_over_j, t_over_j, h_over_j, gamma, jz_over_j };
inline constexpr std::array<Param, 5> kAllParams{Param::j0_over_j, Param::t_over_j,
                                                 Param::h_over_j, Param::gamma, Param::jz_over_j};

std::string_view name(Param p);
// Throws ConfigError naming the offending key.
Param parse_param(std::string_view key);

enum class Measure { qd, tdd, concurrence, mutual_info, entropy_ab };
inline constexpr std::array<Measure, 5> kAllMeasures{Measure::qd, Measure::tdd,
                                                     Measure::concurrence, Measure::mutual_info,
                                                     Measure::entropy_ab};
std::string_view name(Measure m);
Measure parse_measure(std::string_view key);

enum class Spacing { linear, log, list };

struct Axis {
    Param param{Param::t_over_j};
    double start{0.0};
    double stop{1.0};
    int n_points{2};
    Spacing spacing{Spacing::linear};
    std::vector<double> list;  // used when spacing == list

    std::vector<double> values() const;
    std::string describe() const;
};

struct SweepSpec {
    std::string name{"custom"};
    std::vector<std::pair<Param, double>> fixed;
    std::vector<Axis> axes;  // row-major: axes[0] is the slowest index
    std::vector<Measure> measures{kAllMeasures.begin(), kAllMeasures.end()};
    int oracle_every{0};     // 0 disables oracle re-verification
    int workers{1};
    std::uint64_t seed{0};

    // Throws ConfigError.
    void validate() const;
    std::optional<double> fixed_value(Param p) const;
    bool wants(Measure m) const;
};

// Coordinates in reduced units, in kAllParams order.
using Coordinates = std::array<double, 5>;

ModelParams model_params(const Coordinates& c);

struct GridPoint {
    Coordinates coords{};
    CorrelationReport report;
    double rho_eig_min{0.0};
    bool psd{true};
};

struct OracleResidual {
    std::size_t row{0};
    double correlators{0.0};  // max |closed form - finite chain (N = 14)|
    double qd{0.0};           // closed form - measurement search
    double tdd{0.0};          // closed form - classical-quantum search
};

struct SweepResult {
    SweepSpec spec;
    std::vector<GridPoint> rows;
    std::size_t psd_flags{0};
    std::vector<OracleResidual> oracle;
};

// Measures not requested are reported as NaN.
GridPoint evaluate_point(const Coordinates& c, const std::vector<Measure>& measures);

SweepResult run_sweep(const SweepSpec& spec);

inline constexpr int kDefaultPresetPoints = 201;
inline constexpr double kMinPresetTemperature = 0.02;

std::vector<std::string_view> preset_names();
// Throws ConfigError for unknown names.
SweepSpec figure_preset(std::string_view name, int points = kDefaultPresetPoints);

// Strict local maxima whose height exceeds the higher of the two bounding
// minima by at least `prominence`. Series must be sorted by x.
int count_peaks(const std::vector<std::pair<double, double>>& series, double prominence);

inline constexpr double kDefaultProminence = 0.005;

inline constexpr const char* kCsvColumns =
    "J0_over_J,T_over_J,h_over_J,gamma,Jz_over_J,qd,tdd,concurrence,mutual_info,entropy_ab,"
    "rho_eig_min,psd_flag";

void write_csv(const SweepResult& result, std::ostream& os);
// Throws IoError carrying the path.
void emit_csv(const SweepResult& result, const std::string& path);

// Flat INI-style sweep configuration ([sweep], [fixed], [axis1], [axis2]).
SweepSpec parse_config(std::istream& is);
SweepSpec load_config(const std::string& path);

std::string version();

}  // namespace tqc::sweep
