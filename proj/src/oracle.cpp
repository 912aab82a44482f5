#include "tqc/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tqc::oracle {

namespace {

using cd = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::Matrix4d;

Matrix2cd pauli_x() { return (Matrix2cd() << 0, 1, 1, 0).finished(); }
Matrix2cd pauli_y() { return (Matrix2cd() << 0, cd(0, -1), cd(0, 1), 0).finished(); }
Matrix2cd pauli_z() { return (Matrix2cd() << 1, 0, 0, -1).finished(); }

Matrix4cd kron(const Matrix2cd& a, const Matrix2cd& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

double ising_value(IsingMagnitude m) { return m == IsingMagnitude::one ? 1.0 : 0.5; }

// Ising spin of state index 0 / 1.
std::array<double, 2> ising_states(IsingMagnitude m) {
    const double v = ising_value(m);
    return {v, -v};
}

// Eigen-decomposition route to exp(-β(H - shift)).
Matrix4d boltzmann_spectral(const Matrix4d& h, double beta, double shift) {
    Eigen::SelfAdjointEigenSolver<Matrix4d> es(h);
    const Eigen::Vector4d w = (-beta * (es.eigenvalues().array() - shift)).exp();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

double min_cell_energy(const FiniteChainSpec& spec) {
    const auto s = ising_states(spec.ising);
    double e = std::numeric_limits<double>::infinity();
    for (double a : s)
        for (double b : s) {
            Eigen::SelfAdjointEigenSolver<Matrix4d> es(
                cell_hamiltonian(spec.params, a, b, spec.heisenberg), Eigen::EigenvaluesOnly);
            e = std::min(e, es.eigenvalues()(0));
        }
    return e;
}

double hermitian_trace_norm(const Matrix4cd& m) {
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double smoothed_trace_norm(const Matrix4cd& m, double eps) {
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::hypot(es.eigenvalues()(i), eps);
    return s;
}

Eigen::Vector3d unit_vector(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Matrix2cd bloch_state(const Eigen::Vector3d& r) {
    return 0.5 * (Matrix2cd::Identity() + r.x() * pauli_x() + r.y() * pauli_y() +
                  r.z() * pauli_z());
}

// ---- classical-quantum search -------------------------------------------

constexpr int kCqDims = 9;
using CqVector = std::array<double, kCqDims>;

// Unconstrained coordinates: axis (θ, φ), p = sin²u, and for each B state a
// radius sin²w with polar angles (α, β). Every point maps to a valid χ.
CQStateParam decode(const CqVector& x) {
    CQStateParam c;
    c.theta = x[0];
    c.phi = x[1];
    c.p = std::pow(std::sin(x[2]), 2);
    c.bloch0 = std::pow(std::sin(x[3]), 2) * unit_vector(x[4], x[5]);
    c.bloch1 = std::pow(std::sin(x[6]), 2) * unit_vector(x[7], x[8]);
    return c;
}

double radical_inverse(std::uint64_t index, unsigned base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

// Shifted Halton points in the natural coordinate box.
std::vector<CqVector> start_points(int n, std::uint64_t seed) {
    static constexpr std::array<unsigned, kCqDims> primes{2, 3, 5, 7, 11, 13, 17, 19, 23};
    constexpr double pi = std::numbers::pi;
    static constexpr CqVector span{pi, 2 * pi, pi / 2, pi / 2, pi, 2 * pi, pi / 2, pi, 2 * pi};
    std::mt19937_64 rng(seed);
    CqVector shift{};
    for (auto& s : shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    std::vector<CqVector> pts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < kCqDims; ++d) {
            double u = radical_inverse(static_cast<std::uint64_t>(i) + 1, primes[d]) + shift[d];
            u -= std::floor(u);
            pts[i][d] = u * span[d];
        }
    return pts;
}

struct LocalMin {
    CqVector x;
    double f;
};

// Hooke-Jeeves: coordinate exploration with pattern moves, halving the step
// on failure until it drops below min_step.
LocalMin pattern_search(const std::function<double(const CqVector&)>& f, CqVector base,
                        double step, double min_step, long& evals) {
    auto eval = [&](const CqVector& x) {
        ++evals;
        return f(x);
    };
    auto explore = [&](CqVector x, double fx, double h) {
        for (int i = 0; i < kCqDims; ++i) {
            const double keep = x[i];
            x[i] = keep + h;
            double ft = eval(x);
            if (ft < fx) {
                fx = ft;
                continue;
            }
            x[i] = keep - h;
            ft = eval(x);
            if (ft < fx) {
                fx = ft;
                continue;
            }
            x[i] = keep;
        }
        return LocalMin{x, fx};
    };

    double fb = eval(base);
    while (step >= min_step) {
        auto trial = explore(base, fb, step);
        if (!(trial.f < fb)) {
            step *= 0.5;
            continue;
        }
        while (trial.f < fb) {
            CqVector jump{};
            for (int i = 0; i < kCqDims; ++i) jump[i] = 2.0 * trial.x[i] - base[i];
            base = trial.x;
            fb = trial.f;
            trial = explore(jump, eval(jump), step);
        }
    }
    return {base, fb};
}

}  // namespace

void validate(const FiniteChainSpec& spec) {
    if (spec.n_cells < 2 || spec.n_cells > kMaxCells)
        throw std::invalid_argument("n_cells must be in [2, " + std::to_string(kMaxCells) +
                                    "], got " + std::to_string(spec.n_cells));
}

Matrix4d cell_hamiltonian(const ModelParams& p, double s_left, double s_right,
                          HeisenbergConvention convention) {
    const double k = convention == HeisenbergConvention::pauli ? 1.0 : 0.5;
    const Matrix2cd x = k * pauli_x(), y = k * pauli_y(), z = k * pauli_z();
    const Matrix2cd id = Matrix2cd::Identity();
    const double nodes = s_left + s_right;
    const Matrix4cd h = -(p.j * (1.0 + p.gamma) * kron(x, x) + p.j * (1.0 - p.gamma) * kron(y, y) +
                          p.jz * kron(z, z) + (p.j0 * nodes + p.h) * (kron(z, id) + kron(id, z)) +
                          0.5 * p.h * nodes * Matrix4cd::Identity());
    return h.real();
}

Matrix4d finite_chain_density_matrix(const FiniteChainSpec& spec) {
    validate(spec);
    const auto s = ising_states(spec.ising);
    const double beta = spec.tp.beta();
    const double e0 = min_cell_energy(spec);

    std::array<std::array<Matrix4d, 2>, 2> blocks;
    Eigen::Matrix2d w;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            blocks[a][b] = boltzmann_spectral(
                cell_hamiltonian(spec.params, s[a], s[b], spec.heisenberg), beta, e0);
            w(a, b) = blocks[a][b].trace();
        }
    const double scale = w.maxCoeff();
    w /= scale;

    Eigen::Matrix2d ring = Eigen::Matrix2d::Identity();  // W^{N-1}
    for (int i = 1; i < spec.n_cells; ++i) ring = ring * w;
    const double z = (ring * w).trace();

    Matrix4d rho = Matrix4d::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) rho += ring(b, a) * blocks[a][b] / scale;
    return rho / z;
}

Matrix4d enumerated_density_matrix(const FiniteChainSpec& spec) {
    validate(spec);
    const auto s = ising_states(spec.ising);
    const double beta = spec.tp.beta();
    const double e0 = min_cell_energy(spec);

    std::array<std::array<Matrix4d, 2>, 2> blocks;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const Matrix4d arg =
                -beta * (cell_hamiltonian(spec.params, s[a], s[b], spec.heisenberg) -
                         e0 * Matrix4d::Identity());
            blocks[a][b] = arg.exp();
        }
    double scale = 0.0;
    for (const auto& row : blocks)
        for (const auto& m : row) scale = std::max(scale, m.trace());

    const int n = spec.n_cells;
    Matrix4d numer = Matrix4d::Zero();
    double z = 0.0;
    for (std::uint32_t config = 0; config < (1u << n); ++config) {
        auto spin = [&](int site) { return (config >> (site % n)) & 1u; };
        double rest = 1.0;
        for (int i = 1; i < n; ++i) rest *= blocks[spin(i)][spin(i + 1)].trace() / scale;
        const Matrix4d& first = blocks[spin(0)][spin(1)];
        numer += rest * first / scale;
        z += rest * first.trace() / scale;
    }
    return numer / z;
}

CorrelationSet correlators_from_matrix(const Matrix4d& rho) {
    const Matrix2cd sx = 0.5 * pauli_x(), sy = 0.5 * pauli_y(), sz = 0.5 * pauli_z();
    const Matrix4cd r = rho.cast<cd>();
    auto expect = [&](const Matrix4cd& op) { return (r * op).trace().real(); };
    return {expect(kron(sx, sx)), expect(kron(sy, sy)), expect(kron(sz, sz)),
            expect(kron(sz, Matrix2cd::Identity()))};
}

CorrelationSet finite_chain_correlators(const FiniteChainSpec& spec) {
    return correlators_from_matrix(finite_chain_density_matrix(spec));
}

std::array<ConventionFit, 4> calibrate_conventions(const ModelParams& p, const ThermalPoint& tp,
                                                   int n_cells) {
    const auto closed = correlators(p, tp);
    std::array<ConventionFit, 4> fits{};
    std::size_t k = 0;
    for (auto ising : {IsingMagnitude::half, IsingMagnitude::one})
        for (auto heis : {HeisenbergConvention::pauli, HeisenbergConvention::spin_half}) {
            FiniteChainSpec spec{n_cells, p, tp, ising, heis};
            const auto c = finite_chain_correlators(spec);
            const double dev = std::max({std::abs(c.xx - closed.xx), std::abs(c.yy - closed.yy),
                                         std::abs(c.zz - closed.zz), std::abs(c.z - closed.z)});
            fits[k++] = {ising, heis, dev};
        }
    std::sort(fits.begin(), fits.end(),
              [](const auto& a, const auto& b) { return a.max_deviation < b.max_deviation; });
    return fits;
}

double entropy_bits(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = es.eigenvalues()(i);
        if (l > 1e-15) s -= l * std::log2(l);
    }
    return s;
}

Matrix2cd partial_trace_a(const Matrix4cd& rho) {
    Matrix2cd out = Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a) out(i, j) += rho(2 * a + i, 2 * a + j);
    return out;
}

Matrix2cd partial_trace_b(const Matrix4cd& rho) {
    Matrix2cd out = Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int b = 0; b < 2; ++b) out(i, j) += rho(2 * i + b, 2 * j + b);
    return out;
}

double mutual_information(const Matrix4cd& rho) {
    return entropy_bits(partial_trace_b(rho)) + entropy_bits(partial_trace_a(rho)) -
           entropy_bits(rho);
}

Matrix2cd MeasurementParam::projector(int k) const {
    const double sign = k == 0 ? 1.0 : -1.0;
    return bloch_state(sign * unit_vector(theta, phi));
}

double conditional_entropy(const Matrix4cd& rho, const MeasurementParam& m) {
    double s = 0.0;
    for (int k = 0; k < 2; ++k) {
        const Matrix4cd lift = kron(Matrix2cd::Identity(), m.projector(k));
        const Matrix4cd post = lift * rho * lift;
        const double pk = post.trace().real();
        if (pk > 1e-15) s += pk * entropy_bits(post / pk);
    }
    return s;
}

QdSearchResult qd_search(const Matrix4cd& rho, int n_grid, int n_refine) {
    if (n_grid < 16) throw std::invalid_argument("n_grid must be at least 16");
    if (n_refine < 0) throw std::invalid_argument("n_refine must be non-negative");
    constexpr double pi = std::numbers::pi;

    auto cost = [&](double theta, double phi) {
        return conditional_entropy(rho, MeasurementParam{theta, phi});
    };
    MeasurementParam best{};
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_grid; ++i)
        for (int j = 0; j < n_grid; ++j) {
            const double theta = pi * i / n_grid, phi = 2.0 * pi * j / n_grid;
            const double c = cost(theta, phi);
            if (c < best_cost) {
                best_cost = c;
                best = {theta, phi};
            }
        }

    auto golden = [&](const std::function<double(double)>& f, double lo, double hi) {
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 40; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
        }
        return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
    };

    double half_theta = pi / n_grid, half_phi = 2.0 * pi / n_grid;
    for (int round = 0; round < n_refine; ++round) {
        const auto [t, ft] = golden([&](double th) { return cost(th, best.phi); },
                                    best.theta - half_theta, best.theta + half_theta);
        if (ft < best_cost) {
            best_cost = ft;
            best.theta = t;
        }
        const auto [ph, fp] = golden([&](double phi) { return cost(best.theta, phi); },
                                     best.phi - half_phi, best.phi + half_phi);
        if (fp < best_cost) {
            best_cost = fp;
            best.phi = ph;
        }
        half_theta *= 0.618;
        half_phi *= 0.618;
    }

    const double classical = entropy_bits(partial_trace_b(rho)) - best_cost;
    return {mutual_information(rho) - classical, best_cost, best};
}

double qd_bruteforce(const DimerDensityMatrix& rho, int n_grid, int n_refine) {
    Matrix4cd m = Matrix4cd::Zero();
    m(0, 0) = rho.r11;
    m(1, 1) = rho.r22;
    m(2, 2) = rho.r33;
    m(3, 3) = rho.r44;
    m(0, 3) = m(3, 0) = rho.r14;
    m(1, 2) = m(2, 1) = rho.r23;
    return qd_search(m, n_grid, n_refine).qd;
}

Matrix4cd CQStateParam::state() const {
    if (bloch0.norm() > 1.0 + 1e-12 || bloch1.norm() > 1.0 + 1e-12 || p < 0.0 || p > 1.0)
        throw std::invalid_argument("classical-quantum parameters out of range");
    const Eigen::Vector3d n = unit_vector(theta, phi);
    return p * kron(bloch_state(n), bloch_state(bloch0)) +
           (1.0 - p) * kron(bloch_state(-n), bloch_state(bloch1));
}

double trace_norm(const Matrix4cd& delta) {
    if ((delta - delta.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("trace_norm expects a Hermitian matrix");
    return hermitian_trace_norm(delta);
}

TddSearchResult tdd_search(const Matrix4cd& rho, int n_starts, std::uint64_t seed) {
    if (n_starts < 8) throw std::invalid_argument("n_starts must be at least 8");
    long evals = 0;
    auto distance = [&](const CqVector& x, double eps) {
        const Matrix4cd diff = rho - decode(x).state();
        return eps > 0.0 ? smoothed_trace_norm(diff, eps) : hermitian_trace_norm(diff);
    };

    // Smoothing continuation: Σ sqrt(λ² + ε²) is differentiable, so the
    // pattern search does not stall on eigenvalue crossings; the last stage
    // polishes the exact trace norm.
    static constexpr std::array<double, 6> kEps{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 0.0};
    std::vector<LocalMin> results;
    for (const auto& x0 : start_points(n_starts, seed)) {
        LocalMin cur{x0, 0.0};
        double step = 0.4;
        for (double eps : kEps) {
            const double min_step = eps > 0.0 ? std::max(1e-7, eps * 1e-2) : 1e-7;
            cur = pattern_search([&](const CqVector& x) { return distance(x, eps); }, cur.x,
                                 step, min_step, evals);
            step = std::max(1e-3, 10.0 * eps);
        }
        results.push_back(cur);
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const auto& a, const auto& b) { return a.f < b.f; });
    TddSearchResult r;
    r.value = results[0].f;
    r.runner_up = results[1].f;
    r.converged = r.runner_up - r.value <= kTddAgreement;
    r.best = decode(results[0].x);
    r.evaluations = evals;
    return r;
}

double tdd_bruteforce(const DimerDensityMatrix& rho, int n_starts, std::uint64_t seed) {
    Matrix4cd m = Matrix4cd::Zero();
    m(0, 0) = rho.r11;
    m(1, 1) = rho.r22;
    m(2, 2) = rho.r33;
    m(3, 3) = rho.r44;
    m(0, 3) = m(3, 0) = rho.r14;
    m(1, 2) = m(2, 1) = rho.r23;
    return tdd_search(m, n_starts, seed).value;
}

}  // namespace tqc::oracle
