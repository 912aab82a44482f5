#include "tqc/measures.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "tqc/errors.hpp"
#include "tqc/oracle.hpp"

namespace tqc {

namespace {

double xlog2x(double x) { return x > kEntropyCutoff ? x * std::log2(x) : 0.0; }

// -x log2(x / total), the contribution of one outcome to a conditional entropy.
double conditional_term(double x, double total) {
    return x > kEntropyCutoff && total > 0.0 ? -x * std::log2(x / total) : 0.0;
}

double binary_entropy(double p) { return -xlog2x(p) - xlog2x(1.0 - p); }

}  // namespace

double entropy_bits(std::span<const double> eigenvalues) {
    double sum = 0.0;
    for (double l : eigenvalues) {
        if (l < -kEigenRejectTolerance)
            throw InvalidState("negative eigenvalue " + std::to_string(l));
        sum += l;
    }
    if (std::abs(sum - 1.0) > kTraceRejectTolerance)
        throw InvalidState("trace " + std::to_string(sum) + " is not 1");
    double s = 0.0;
    for (double l : eigenvalues) s -= xlog2x(std::max(l, 0.0));
    return std::max(s, 0.0);
}

double von_neumann_entropy(const DimerDensityMatrix& rho) {
    const auto ev = rho.eigenvalues();
    return entropy_bits(ev);
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0 || rho.rows() > 4)
        throw InvalidState("expected a square matrix of dimension 1..4");
    if (!rho.isApprox(rho.adjoint(), 1e-12))
        throw InvalidState("matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    return entropy_bits(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

void validate(const DimerDensityMatrix& rho) {
    if (std::abs(rho.trace() - 1.0) > kTraceRejectTolerance)
        throw InvalidState("trace " + std::to_string(rho.trace()) + " is not 1");
    const double m = rho.min_eigenvalue();
    if (m < -kEigenRejectTolerance)
        throw InvalidState("negative eigenvalue " + std::to_string(m));
}

DimerDensityMatrix x_state_from_matrix(const Eigen::Matrix4cd& m) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const bool on_x = i == j || i + j == 3;
            if (!on_x && std::abs(m(i, j)) > kXStructureTolerance)
                throw InvalidState("element (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") breaks the X structure");
        }
    if (std::abs(m(0, 3) - std::conj(m(3, 0))) > kXStructureTolerance ||
        std::abs(m(1, 2) - std::conj(m(2, 1))) > kXStructureTolerance)
        throw InvalidState("matrix is not Hermitian");
    if (std::abs(m(0, 3).imag()) > kXStructureTolerance ||
        std::abs(m(1, 2).imag()) > kXStructureTolerance)
        throw InvalidState("complex anti-diagonal elements are not supported");
    DimerDensityMatrix r;
    r.r11 = m(0, 0).real();
    r.r22 = m(1, 1).real();
    r.r33 = m(2, 2).real();
    r.r44 = m(3, 3).real();
    r.r14 = m(0, 3).real();
    r.r23 = m(1, 2).real();
    return r;
}

Eigen::Matrix4cd to_matrix(const DimerDensityMatrix& rho) {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(0, 0) = rho.r11;
    m(1, 1) = rho.r22;
    m(2, 2) = rho.r33;
    m(3, 3) = rho.r44;
    m(0, 3) = m(3, 0) = rho.r14;
    m(1, 2) = m(2, 1) = rho.r23;
    return m;
}

double mutual_information(const DimerDensityMatrix& rho) {
    validate(rho);
    const double s_a = binary_entropy(rho.r11 + rho.r22);
    const double s_b = binary_entropy(rho.r11 + rho.r33);
    return std::max(0.0, s_a + s_b - von_neumann_entropy(rho));
}

QdResult qd_x_state(const DimerDensityMatrix& rho) {
    validate(rho);
    const double s_ab = von_neumann_entropy(rho);
    const double s_b = binary_entropy(rho.r11 + rho.r33);

    // z-basis on B: outcome ↑ keeps {ρ11, ρ33}, outcome ↓ keeps {ρ22, ρ44}.
    const double up = rho.r11 + rho.r33;
    const double down = rho.r22 + rho.r44;
    const double cond_z = conditional_term(rho.r11, up) + conditional_term(rho.r33, up) +
                          conditional_term(rho.r22, down) + conditional_term(rho.r44, down);

    // x-basis on B: both outcomes have probability 1/2 and conditional A
    // states with Bloch length Γ.
    const double a_z = rho.r11 + rho.r22 - rho.r33 - rho.r44;
    const double off = std::abs(rho.r14) + std::abs(rho.r23);
    const double gamma = std::min(1.0, std::sqrt(a_z * a_z + 4.0 * off * off));
    const double cond_x = binary_entropy(0.5 * (1.0 + gamma));

    QdResult r;
    r.d1 = std::max(0.0, s_b - s_ab + cond_z);
    r.d2 = std::max(0.0, s_b - s_ab + cond_x);
    r.branch = (r.d1 <= r.d2 || std::abs(r.d1 - r.d2) < 1e-12) ? 1 : 2;
    r.qd = r.branch == 1 ? r.d1 : r.d2;
    return r;
}

TddResult tdd_x_state(const DimerDensityMatrix& rho) {
    validate(rho);
    TddResult r;
    auto& b = r.branch;
    b.gamma1 = 2.0 * (std::abs(rho.r23) + std::abs(rho.r14));
    b.gamma2 = 2.0 * (std::abs(rho.r23) - std::abs(rho.r14));
    b.gamma3 = 1.0 - 2.0 * (rho.r22 + rho.r33);
    b.x_a3 = 2.0 * (rho.r11 + rho.r22) - 1.0;
    const double g1 = b.gamma1 * b.gamma1;
    const double g2 = b.gamma2 * b.gamma2;
    const double g3 = b.gamma3 * b.gamma3;
    b.gamma_max_sq = std::max(g3, g2 + b.x_a3 * b.x_a3);
    b.gamma_min_sq = std::min(g1, g3);
    b.denominator = b.gamma_max_sq - b.gamma_min_sq + g1 - g2;

    if (std::abs(b.denominator) < kTddDegenerateDenominator) {
        b.fallback = true;
        r.tdd = oracle::tdd_bruteforce(rho);
        return r;
    }
    const double num = g1 * b.gamma_max_sq - g2 * b.gamma_min_sq;
    r.tdd = std::sqrt(std::max(0.0, num / b.denominator));
    return r;
}

double concurrence(const DimerDensityMatrix& rho) {
    validate(rho);
    const double a = std::abs(rho.r14) - std::sqrt(std::max(0.0, rho.r22 * rho.r33));
    const double b = std::abs(rho.r23) - std::sqrt(std::max(0.0, rho.r11 * rho.r44));
    return 2.0 * std::max({0.0, a, b});
}

CorrelationReport correlation_report(const DimerDensityMatrix& rho) {
    const auto qd = qd_x_state(rho);
    const auto tdd = tdd_x_state(rho);
    CorrelationReport r;
    r.qd = qd.qd;
    r.d1 = qd.d1;
    r.d2 = qd.d2;
    r.qd_branch = qd.branch;
    r.tdd = tdd.tdd;
    r.tdd_branch = tdd.branch;
    r.concurrence = concurrence(rho);
    r.mutual_info = mutual_information(rho);
    r.entropy_ab = von_neumann_entropy(rho);
    r.entropy_a = binary_entropy(rho.r11 + rho.r22);
    return r;
}

}  // namespace tqc
