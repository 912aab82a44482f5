#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

#include "tqc/model.hpp"
#include "tqc/oracle.hpp"

namespace testing {

inline tqc::DimerDensityMatrix bell_psi_plus() {
    tqc::DimerDensityMatrix r;
    r.r11 = r.r44 = 0.0;
    r.r22 = r.r33 = r.r23 = 0.5;
    r.r14 = 0.0;
    return r;
}

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit(rng);
}

struct Point {
    tqc::ModelParams p;
    double t;
};

inline Point random_point(std::mt19937_64& rng, double t_lo = 0.05, double t_hi = 20.0) {
    Point x;
    x.t = std::exp(uniform(rng, std::log(t_lo), std::log(t_hi)));
    x.p = {1.0, uniform(rng, -1.5, 1.5), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0),
           uniform(rng, -3.0, 3.0)};
    return x;
}

// Tr exp(-β H) of one cell with the given nodal spins, by Padé exponential.
inline double cell_weight(const tqc::ModelParams& p, double beta, double s, double s_next) {
    const Eigen::Matrix4d h = tqc::oracle::cell_hamiltonian(
        p, s, s_next, tqc::oracle::HeisenbergConvention::spin_half);
    const Eigen::Matrix4d e = (-beta * h).exp();
    return e.trace();
}

}  // namespace testing
