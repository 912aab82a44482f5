// measures.hpp: closed-form correlation measures of X-structured two-qubit
// states. Entropies and discords are in bits.

#pragma once

#include <Eigen/Core>

#include <span>

#include "tqc/model.hpp"

namespace tqc {

inline constexpr double kEigenRejectTolerance = 1e-8;
inline constexpr double kTraceRejectTolerance = 1e-6;
inline constexpr double kEntropyCutoff = 1e-15;
inline constexpr double kXStructureTolerance = 1e-12;
inline constexpr double kTddDegenerateDenominator = 1e-12;

struct QdResult {
    double qd{0.0};
    double d1{0.0};  // z-basis measurement on B
    double d2{0.0};  // x-basis measurement on B
    int branch{1};   // 1 when D1 <= D2 (ties within 1e-12 go to D1)
};

struct TddBranch {
    double gamma1{0.0}, gamma2{0.0}, gamma3{0.0};
    double x_a3{0.0};
    double gamma_max_sq{0.0}, gamma_min_sq{0.0};
    double denominator{0.0};
    bool fallback{false};  // degenerate denominator, value from the numerical search
};

struct TddResult {
    double tdd{0.0};
    TddBranch branch;
};

struct CorrelationReport {
    double qd{0.0};
    double tdd{0.0};
    double concurrence{0.0};
    double mutual_info{0.0};
    double entropy_ab{0.0};
    double entropy_a{0.0};
    double d1{0.0};
    double d2{0.0};
    int qd_branch{1};
    TddBranch tdd_branch;
};

// S = -Σ λ log2 λ. Eigenvalues below -1e-8 or a sum off by more than 1e-6
// throw InvalidState; small negatives are clipped.
double entropy_bits(std::span<const double> eigenvalues);
double von_neumann_entropy(const DimerDensityMatrix& rho);
// Any Hermitian matrix up to 4x4.
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

// Throws InvalidState on negative eigenvalues or a bad trace.
void validate(const DimerDensityMatrix& rho);

// Accepts a full 4x4 matrix if every element outside the X pattern is below
// 1e-12 and the anti-diagonal is real; throws InvalidState otherwise.
DimerDensityMatrix x_state_from_matrix(const Eigen::Matrix4cd& m);
Eigen::Matrix4cd to_matrix(const DimerDensityMatrix& rho);

double mutual_information(const DimerDensityMatrix& rho);

// Quantum discord with projective measurements on B. D1 and D2 are the
// z- and x-basis branches; min{D1, D2} is exact for almost all X states and
// an upper bound otherwise.
QdResult qd_x_state(const DimerDensityMatrix& rho);

// Trace-distance discord (classical on A), Schatten-1 normalization.
TddResult tdd_x_state(const DimerDensityMatrix& rho);

// Wootters concurrence; not part of the discord family, kept as the
// entanglement baseline.
double concurrence(const DimerDensityMatrix& rho);

CorrelationReport correlation_report(const DimerDensityMatrix& rho);

}  // namespace tqc
