// model.hpp: Ising-XYZ diamond chain: thermal correlators and the reduced
// dimer density matrix in the thermodynamic limit.
//
// Operator convention: the Heisenberg dimer uses spin-1/2 operators (S = σ/2)
// and the nodal Ising spins take values ±1, so a bond carries
// μ = S_i + S_{i+1} ∈ {2, 0, -2}. All correlators are spin-1/2 expectations.

#pragma once

#include <array>

namespace tqc {

struct ModelParams {
    double j{1.0};      // XY exchange (energy unit)
    double gamma{0.0};  // XY anisotropy
    double jz{0.0};     // Ising-like z exchange of the dimer
    double j0{0.0};     // dimer / Ising-node coupling
    double h{0.0};      // magnetic field
};

class ThermalPoint {
public:
    // Throws std::invalid_argument unless t > 0 and finite.
    explicit ThermalPoint(double t);
    static ThermalPoint from_beta(double beta);

    double t() const { return t_; }
    double beta() const { return beta_; }

private:
    ThermalPoint(double t, double beta) : t_(t), beta_(beta) {}
    double t_;
    double beta_;
};

struct CorrelationSet {
    double xx{0.0};  // <S^x_a S^x_b>
    double yy{0.0};  // <S^y_a S^y_b>
    double zz{0.0};  // <S^z_a S^z_b>
    double z{0.0};   // <S^z_a>

    bool within_bounds(double tol = 1e-12) const;
};

// X-structured two-qubit state in the basis |↑↑>, |↑↓>, |↓↑>, |↓↓>.
struct DimerDensityMatrix {
    double r11{0.25}, r22{0.25}, r33{0.25}, r44{0.25};
    double r14{0.0}, r23{0.0};

    double trace() const { return r11 + r22 + r33 + r44; }
    // Closed-form eigenvalues of the two 2x2 blocks, ascending.
    std::array<double, 4> eigenvalues() const;
    double min_eigenvalue() const { return eigenvalues()[0]; }

    static DimerDensityMatrix maximally_mixed() { return {}; }
};

inline constexpr double kPsdTolerance = 1e-10;

struct AssembledDimer {
    DimerDensityMatrix rho;
    double min_eigenvalue{0.0};
    bool psd{true};  // false flags an inconsistent CorrelationSet
};

enum class Formula {
    corrected,      // transfer-matrix eigenvector average (ships by default)
    single_bond,  // μ = 1 bond only, un-halved λ+; kept to compare against the chain
};

// Δ(μ) = sqrt((h + μ J0)^2 + J^2 γ^2 / 4)
double delta(const ModelParams& p, double mu);

// Boltzmann weight of one cell summed over the dimer, for bond μ.
double omega(const ModelParams& p, const ThermalPoint& tp, double mu);
double log_omega(const ModelParams& p, const ThermalPoint& tp, double mu);

// Dominant eigenvalue of [[ω(2), ω(0)], [ω(0), ω(-2)]]. The trace form
// ω(2)+ω(-2)+sqrt(...) is twice this value (see lambda_plus_trace_form).
double lambda_plus(const ModelParams& p, const ThermalPoint& tp);
double log_lambda_plus(const ModelParams& p, const ThermalPoint& tp);
double lambda_plus_trace_form(const ModelParams& p, const ThermalPoint& tp);

// |λ-| / λ+ of the same matrix. A periodic chain of N cells differs from the
// infinite chain by terms of order ratio^N.
double subleading_ratio(const ModelParams& p, const ThermalPoint& tp);

CorrelationSet correlators(const ModelParams& p, const ThermalPoint& tp,
                           Formula formula = Formula::corrected);

AssembledDimer dimer_density_matrix(const CorrelationSet& c);

// correlators followed by dimer_density_matrix.
AssembledDimer thermal_state(const ModelParams& p, const ThermalPoint& tp);

}  // namespace tqc
