#include "tqc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tqc {

namespace {

constexpr std::array<double, 3> kBonds{2.0, 0.0, -2.0};

// e^{e0} cosh(x) e^{-shift} and e^{e0} sinh(x) e^{-shift} without forming
// the unshifted exponentials.
double cosh_shifted(double e0, double x, double shift) {
    if (std::abs(x) < 1.0) return std::exp(e0 - shift) * std::cosh(x);
    return 0.5 * (std::exp(e0 + x - shift) + std::exp(e0 - x - shift));
}

double sinh_shifted(double e0, double x, double shift) {
    if (std::abs(x) < 1.0) return std::exp(e0 - shift) * std::sinh(x);
    return 0.5 * (std::exp(e0 + x - shift) - std::exp(e0 - x - shift));
}

// Exponent offsets of the two dimer sectors for bond μ: the antiparallel
// sector {|↑↓>,|↓↑>} carries e^{a - βJz/4} cosh(βJ/2), the parallel sector
// {|↑↑>,|↓↓>} carries e^{a + βJz/4} cosh(βΔ(μ)), with a = βμh/2.
struct SectorExponents {
    double anti;
    double par;
    double anti_arg;  // βJ/2
    double par_arg;   // βΔ(μ)
    double delta;
    double field;     // h + μ J0

    double max_exponent() const {
        return std::max(anti + std::abs(anti_arg), par + std::abs(par_arg));
    }
};

SectorExponents sector_exponents(const ModelParams& p, double beta, double mu) {
    const double a = beta * mu * p.h / 2.0;
    const double d = delta(p, mu);
    return {a - beta * p.jz / 4.0, a + beta * p.jz / 4.0, beta * p.j / 2.0, beta * d, d,
            p.h + mu * p.j0};
}

// Per-bond traces Tr[O e^{-βH_cell}] scaled by e^{-shift}.
struct CellTraces {
    double weight;
    double xx;
    double yy;
    double zz;
    double z;
};

CellTraces cell_traces(const ModelParams& p, const SectorExponents& e, double shift) {
    const double anti_c = cosh_shifted(e.anti, e.anti_arg, shift);
    const double anti_s = sinh_shifted(e.anti, e.anti_arg, shift);
    const double par_c = cosh_shifted(e.par, e.par_arg, shift);
    const double par_s = sinh_shifted(e.par, e.par_arg, shift);
    // (Jγ/2)/Δ and (h+μJ0)/Δ are the sines/cosines of the parallel-sector
    // mixing angle; both vanish with Δ.
    const double mix_x = e.delta > 0.0 ? p.j * p.gamma / (2.0 * e.delta) : 0.0;
    const double mix_z = e.delta > 0.0 ? e.field / e.delta : 0.0;

    CellTraces t{};
    t.weight = 2.0 * (anti_c + par_c);
    t.xx = 0.5 * (anti_s + mix_x * par_s);
    t.yy = 0.5 * (anti_s - mix_x * par_s);
    t.zz = 0.5 * (par_c - anti_c);
    t.z = mix_z * par_s;
    return t;
}

struct ScaledBonds {
    std::array<CellTraces, 3> cells;  // μ = 2, 0, -2
    double shift;
};

ScaledBonds scaled_bonds(const ModelParams& p, double beta) {
    std::array<SectorExponents, 3> e{};
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kBonds.size(); ++k) {
        e[k] = sector_exponents(p, beta, kBonds[k]);
        shift = std::max(shift, e[k].max_exponent());
    }
    ScaledBonds out{};
    out.shift = shift;
    for (std::size_t k = 0; k < kBonds.size(); ++k) out.cells[k] = cell_traces(p, e[k], shift);
    return out;
}

struct DominantMode {
    double lambda;  // scaled eigenvalue
    double p_up;    // v_+^2
    double p_down;  // v_-^2
    double cross;   // v_+ v_-
};

DominantMode dominant_mode(double w_up, double w_mid, double w_down) {
    const double d = 0.5 * (w_up - w_down);
    const double r = std::hypot(d, w_mid);
    DominantMode m{};
    m.lambda = 0.5 * (w_up + w_down) + r;
    if (r == 0.0) {
        m.p_up = m.p_down = m.cross = 0.5;
        return m;
    }
    // Stable forms of (1 ± d/r)/2.
    if (d >= 0.0) {
        m.p_up = (r + d) / (2.0 * r);
        m.p_down = w_mid * w_mid / (2.0 * r * (r + d));
    } else {
        m.p_down = (r - d) / (2.0 * r);
        m.p_up = w_mid * w_mid / (2.0 * r * (r - d));
    }
    m.cross = w_mid / (2.0 * r);
    return m;
}

CorrelationSet corrected_correlators(const ModelParams& p, double beta) {
    const auto b = scaled_bonds(p, beta);
    const auto& [up, mid, down] = b.cells;
    const auto m = dominant_mode(up.weight, mid.weight, down.weight);
    auto average = [&](double CellTraces::*field) {
        return (m.p_up * up.*field + 2.0 * m.cross * mid.*field + m.p_down * down.*field) /
               m.lambda;
    };
    return {average(&CellTraces::xx), average(&CellTraces::yy), average(&CellTraces::zz),
            average(&CellTraces::z)};
}

CorrelationSet single_bond_correlators(const ModelParams& p, double beta) {
    // Closed forms built from the μ = 1 bond alone, with an e^{-β(2h+Jz)/4}
    // factor on the xx first term and the un-halved λ+. The finite chain
    // rules them out; they stay available for comparison.
    const double shift = std::log(2.0) + log_lambda_plus(p, ThermalPoint::from_beta(beta));
    const double d1 = delta(p, 1.0);
    const double a = beta * p.h / 2.0;
    const double mix_x = d1 > 0.0 ? p.j * p.gamma / (4.0 * d1) : 0.0;
    const double mix_z = d1 > 0.0 ? (p.j0 + p.h) / d1 : 0.0;

    CorrelationSet c;
    c.xx = 0.5 * sinh_shifted(a - beta * (2.0 * p.h + p.jz) / 4.0, beta * p.j / 2.0, shift) +
           mix_x * sinh_shifted(a + beta * p.jz / 4.0, beta * d1, shift);
    c.yy = 0.5 * sinh_shifted(a - beta * p.jz / 4.0, beta * p.j / 2.0, shift) -
           mix_x * sinh_shifted(a + beta * p.jz / 4.0, beta * d1, shift);
    c.zz = 0.5 * (cosh_shifted(a + beta * p.jz / 4.0, beta * p.j / 2.0, shift) -
                  cosh_shifted(a - beta * p.jz / 4.0, beta * d1, shift));
    c.z = mix_z * sinh_shifted(beta * (2.0 * p.h + p.jz) / 4.0, beta * d1, shift);
    return c;
}

}  // namespace

ThermalPoint::ThermalPoint(double t) : t_(t), beta_(1.0 / t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("temperature must be positive and finite, got " +
                                    std::to_string(t));
}

ThermalPoint ThermalPoint::from_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite, got " +
                                    std::to_string(beta));
    return ThermalPoint(1.0 / beta, beta);
}

bool CorrelationSet::within_bounds(double tol) const {
    return std::abs(xx) <= 0.25 + tol && std::abs(yy) <= 0.25 + tol &&
           std::abs(zz) <= 0.25 + tol && std::abs(z) <= 0.5 + tol;
}

std::array<double, 4> DimerDensityMatrix::eigenvalues() const {
    auto block = [](double a, double d, double off) {
        const double mean = 0.5 * (a + d);
        const double rad = std::hypot(0.5 * (a - d), off);
        return std::array<double, 2>{mean - rad, mean + rad};
    };
    const auto outer = block(r11, r44, r14);
    const auto inner = block(r22, r33, r23);
    std::array<double, 4> ev{outer[0], outer[1], inner[0], inner[1]};
    std::sort(ev.begin(), ev.end());
    return ev;
}

double delta(const ModelParams& p, double mu) {
    return std::hypot(p.h + mu * p.j0, 0.5 * p.j * p.gamma);
}

double log_omega(const ModelParams& p, const ThermalPoint& tp, double mu) {
    const auto e = sector_exponents(p, tp.beta(), mu);
    const double shift = e.max_exponent();
    return shift + std::log(2.0 * (cosh_shifted(e.anti, e.anti_arg, shift) +
                                   cosh_shifted(e.par, e.par_arg, shift)));
}

double omega(const ModelParams& p, const ThermalPoint& tp, double mu) {
    return std::exp(log_omega(p, tp, mu));
}

double log_lambda_plus(const ModelParams& p, const ThermalPoint& tp) {
    const auto b = scaled_bonds(p, tp.beta());
    const auto m = dominant_mode(b.cells[0].weight, b.cells[1].weight, b.cells[2].weight);
    return b.shift + std::log(m.lambda);
}

double lambda_plus(const ModelParams& p, const ThermalPoint& tp) {
    return std::exp(log_lambda_plus(p, tp));
}

double lambda_plus_trace_form(const ModelParams& p, const ThermalPoint& tp) {
    return 2.0 * lambda_plus(p, tp);
}

double subleading_ratio(const ModelParams& p, const ThermalPoint& tp) {
    const double l2 = log_omega(p, tp, 2.0), l0 = log_omega(p, tp, 0.0), lm = log_omega(p, tp, -2.0);
    const double m = std::max({l2, l0, lm});
    const double a = std::exp(l2 - m), b = std::exp(l0 - m), d = std::exp(lm - m);
    const double half_diff = 0.5 * (a - d);
    const double top = 0.5 * (a + d) + std::sqrt(half_diff * half_diff + b * b);
    // λ- = det / λ+ avoids the cancellation in (a+d)/2 - sqrt(...).
    return std::abs(std::exp(l2 + lm - 2.0 * m) - std::exp(2.0 * (l0 - m))) / (top * top);
}

CorrelationSet correlators(const ModelParams& p, const ThermalPoint& tp, Formula formula) {
    return formula == Formula::corrected ? corrected_correlators(p, tp.beta())
                                         : single_bond_correlators(p, tp.beta());
}

AssembledDimer dimer_density_matrix(const CorrelationSet& c) {
    AssembledDimer out;
    auto& r = out.rho;
    r.r11 = 0.25 + c.zz + c.z;
    r.r22 = 0.25 - c.zz;
    r.r33 = 0.25 - c.zz;
    r.r44 = 0.25 + c.zz - c.z;
    r.r14 = c.xx - c.yy;
    r.r23 = c.xx + c.yy;
    out.min_eigenvalue = r.min_eigenvalue();
    out.psd = out.min_eigenvalue >= -kPsdTolerance;
    return out;
}

AssembledDimer thermal_state(const ModelParams& p, const ThermalPoint& tp) {
    return dimer_density_matrix(correlators(p, tp));
}

}  // namespace tqc
