// oracle.hpp: brute-force ground truth for the closed forms: exact finite
// diamond chains, projective-measurement minimization for quantum discord and
// direct minimization over classical-quantum states for trace-distance
// discord. Nothing here calls the closed-form routines it is meant to check.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>

#include "tqc/model.hpp"

namespace tqc::oracle {

enum class IsingMagnitude { half, one };         // S_i = ±1/2 or ±1
enum class HeisenbergConvention { pauli, spin_half };  // σ or σ/2 in the cell Hamiltonian

inline constexpr int kMaxCells = 20;

struct FiniteChainSpec {
    int n_cells{14};
    ModelParams params;
    ThermalPoint tp{1.0};
    IsingMagnitude ising{IsingMagnitude::one};
    HeisenbergConvention heisenberg{HeisenbergConvention::spin_half};
};

// Throws std::invalid_argument for n_cells outside [2, 20].
void validate(const FiniteChainSpec& spec);

// Dimer part of one diamond cell, with the nodal field term h/2 (s + s')
// included on the diagonal. Basis |↑↑>, |↑↓>, |↓↑>, |↓↓>.
Eigen::Matrix4d cell_hamiltonian(const ModelParams& p, double s_left, double s_right,
                                 HeisenbergConvention convention);

// Reduced density matrix of one dimer on a periodic chain, by contracting the
// 2x2 transfer matrix around the ring.
Eigen::Matrix4d finite_chain_density_matrix(const FiniteChainSpec& spec);

// Same quantity by summing all 2^N Ising configurations, with each cell
// weight from a Padé matrix exponential. Intended for N <= 12.
Eigen::Matrix4d enumerated_density_matrix(const FiniteChainSpec& spec);

// Spin-1/2 expectations <SxSx>, <SySy>, <SzSz>, <Sz_a> of a 4x4 state.
CorrelationSet correlators_from_matrix(const Eigen::Matrix4d& rho);

CorrelationSet finite_chain_correlators(const FiniteChainSpec& spec);

struct ConventionFit {
    IsingMagnitude ising;
    HeisenbergConvention heisenberg;
    double max_deviation;  // max |finite-chain - closed-form| over the four correlators
};

// Runs all four conventions against the corrected closed forms; sorted by
// deviation, best first.
std::array<ConventionFit, 4> calibrate_conventions(const ModelParams& p, const ThermalPoint& tp,
                                                   int n_cells);

// Full-matrix routines (generic Hermitian eigen-decomposition).
double entropy_bits(const Eigen::MatrixXcd& rho);
Eigen::Matrix2cd partial_trace_a(const Eigen::Matrix4cd& rho);  // returns ρ_B
Eigen::Matrix2cd partial_trace_b(const Eigen::Matrix4cd& rho);  // returns ρ_A
double mutual_information(const Eigen::Matrix4cd& rho);

struct MeasurementParam {
    double theta{0.0};  // [0, π]
    double phi{0.0};    // [0, 2π)

    // Rank-1 projector onto ±n(θ, φ); k = 0 or 1.
    Eigen::Matrix2cd projector(int k) const;
};

// Σ_k p_k S(ρ_k) after measuring B with {Π_0, Π_1}.
double conditional_entropy(const Eigen::Matrix4cd& rho, const MeasurementParam& m);

struct QdSearchResult {
    double qd;
    double min_conditional_entropy;
    MeasurementParam best;
};

// n_grid x n_grid scan of (θ, φ) followed by n_refine rounds of
// golden-section line searches in a shrinking box around the best point.
QdSearchResult qd_search(const Eigen::Matrix4cd& rho, int n_grid = 32, int n_refine = 20);
double qd_bruteforce(const DimerDensityMatrix& rho, int n_grid = 32, int n_refine = 20);

struct CQStateParam {
    double theta{0.0};
    double phi{0.0};
    double p{0.5};
    Eigen::Vector3d bloch0{Eigen::Vector3d::Zero()};
    Eigen::Vector3d bloch1{Eigen::Vector3d::Zero()};

    // p Π_0 ⊗ ρ_0 + (1-p) Π_1 ⊗ ρ_1 with Π_k along ±n(θ, φ) on A.
    Eigen::Matrix4cd state() const;
};

// Σ|λ_i|; throws std::invalid_argument unless Hermitian to 1e-12.
double trace_norm(const Eigen::Matrix4cd& delta);

inline constexpr double kTddAgreement = 1e-3;

struct TddSearchResult {
    double value;      // best ‖ρ - χ‖₁ found; always attained by a valid χ
    double runner_up;  // second-best start
    bool converged;    // best two starts within 1e-3
    CQStateParam best;
    long evaluations;
};

TddSearchResult tdd_search(const Eigen::Matrix4cd& rho, int n_starts, std::uint64_t seed);
double tdd_bruteforce(const DimerDensityMatrix& rho, int n_starts = 8, std::uint64_t seed = 0);

}  // namespace tqc::oracle
