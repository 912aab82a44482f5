#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "helpers.hpp"
#include "tqc/model.hpp"
#include "tqc/oracle.hpp"

using namespace tqc;
using doctest::Approx;

TEST_CASE("thermal point") {
    const ThermalPoint tp(0.5);
    CHECK(tp.beta() * tp.t() == 1.0);
    CHECK(ThermalPoint::from_beta(4.0).t() == 0.25);
    CHECK_THROWS_AS(ThermalPoint(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ThermalPoint(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(ThermalPoint(std::numeric_limits<double>::infinity()), std::invalid_argument);
    CHECK_THROWS_AS(ThermalPoint(std::nan("")), std::invalid_argument);
}

TEST_CASE("delta") {
    CHECK(delta({1.0, 0.0, 0.0, 0.0, 0.5}, 1.0) == Approx(0.5).epsilon(1e-15));
    CHECK(delta({1.0, 0.95, 0.0, 0.0, 0.27}, 1.0) ==
          Approx(std::sqrt(0.27 * 0.27 + 0.95 * 0.95 / 4.0)).epsilon(1e-15));
    CHECK(delta({1.0, 0.5, 0.0, -0.3, 0.3}, 1.0) == Approx(0.25).epsilon(1e-15));
}

TEST_CASE("cell weights against matrix exponentials") {
    const ModelParams p{1.0, 0.95, 0.0, 0.0, 0.27};
    // μ = 2 means both nodes up, μ = -2 both down, μ = 0 one of each.
    CHECK(omega(p, ThermalPoint(1.0), 2.0) == Approx(testing::cell_weight(p, 1.0, 1, 1)).epsilon(1e-12));

    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto x = testing::random_point(rng, 0.1, 10.0);
        const double beta = 1.0 / x.t;
        for (auto [mu, s, s2] : {std::tuple{2.0, 1.0, 1.0}, {0.0, 1.0, -1.0}, {-2.0, -1.0, -1.0}}) {
            const double w = testing::cell_weight(x.p, beta, s, s2);
            CHECK(omega(x.p, ThermalPoint(x.t), mu) == Approx(w).epsilon(1e-10));
        }
    }
}

TEST_CASE("infinite temperature limits") {
    const ModelParams p{1.0, 0.6, 0.3, 0.3, 0.35};
    const auto tp = ThermalPoint::from_beta(1e-14);
    for (double mu : {2.0, 0.0, -2.0}) CHECK(omega(p, tp, mu) == Approx(4.0).epsilon(1e-10));
    CHECK(lambda_plus(p, tp) == Approx(8.0).epsilon(1e-10));
    CHECK(lambda_plus_trace_form(p, tp) == Approx(16.0).epsilon(1e-10));
    const auto c = correlators(p, tp);
    CHECK(std::abs(c.xx) < 1e-12);
    CHECK(std::abs(c.yy) < 1e-12);
    CHECK(std::abs(c.zz) < 1e-12);
    CHECK(std::abs(c.z) < 1e-12);
    const auto rho = thermal_state(p, tp).rho;
    for (double d : {rho.r11, rho.r22, rho.r33, rho.r44}) CHECK(d == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("dominant eigenvalue of the transfer matrix") {
    const ModelParams p{1.0, 0.6, 0.3, 0.3, 0.35};
    const double beta = 2.0;
    Eigen::Matrix2d w;
    w << testing::cell_weight(p, beta, 1, 1), testing::cell_weight(p, beta, 1, -1),
        testing::cell_weight(p, beta, -1, 1), testing::cell_weight(p, beta, -1, -1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(w);
    CHECK(lambda_plus(p, ThermalPoint(0.5)) == Approx(es.eigenvalues()(1)).epsilon(1e-12));
    CHECK(subleading_ratio(p, ThermalPoint(0.5)) ==
          Approx(std::abs(es.eigenvalues()(0)) / es.eigenvalues()(1)).epsilon(1e-10));

    // h = J0 = 0: ω(2) = ω(-2) and λ+ = ω(2) + ω(0).
    const ModelParams s{1.0, 0.6, 0.3, 0.0, 0.0};
    const ThermalPoint tp(0.7);
    CHECK(omega(s, tp, 2.0) == Approx(omega(s, tp, -2.0)).epsilon(1e-14));
    CHECK(lambda_plus(s, tp) == Approx(omega(s, tp, 2.0) + omega(s, tp, 0.0)).epsilon(1e-14));
}

TEST_CASE("log domain survives very low temperature") {
    const ModelParams p{1.0, 0.95, 2.0, -2.0, 3.0};
    const ThermalPoint tp(1e-4);
    CHECK(std::isfinite(log_lambda_plus(p, tp)));
    CHECK(std::isinf(lambda_plus(p, tp)));
    const auto c = correlators(p, tp);
    CHECK(c.within_bounds());
    CHECK(thermal_state(p, tp).psd);
    CHECK(correlators(p, tp, Formula::single_bond).within_bounds(1.0));
}

TEST_CASE("xx equals yy without anisotropy and field") {
    const auto c = correlators({1.0, 0.0, 0.4, 0.0, 0.0}, ThermalPoint(0.6));
    CHECK(c.xx == Approx(c.yy).epsilon(1e-14));
}

TEST_CASE("density matrix assembly") {
    const auto zero = dimer_density_matrix({});
    CHECK(zero.psd);
    for (double d : {zero.rho.r11, zero.rho.r22, zero.rho.r33, zero.rho.r44}) CHECK(d == 0.25);

    const auto bell = dimer_density_matrix({0.25, 0.25, -0.25, 0.0});
    CHECK(bell.rho.r11 == Approx(0.0));
    CHECK(bell.rho.r44 == Approx(0.0));
    CHECK(bell.rho.r22 == Approx(0.5));
    CHECK(bell.rho.r33 == Approx(0.5));
    CHECK(bell.rho.r23 == Approx(0.5));
    CHECK(bell.rho.r14 == Approx(0.0));
    CHECK(bell.psd);

    // Inconsistent correlators are flagged, not hidden.
    const auto bad = dimer_density_matrix({0.25, 0.25, 0.25, 0.0});
    CHECK_FALSE(bad.psd);
    CHECK(bad.min_eigenvalue < -kPsdTolerance);
}

TEST_CASE("closed-form eigenvalues match a dense solver") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto x = testing::random_point(rng);
        const auto rho = thermal_state(x.p, ThermalPoint(x.t)).rho;
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        m.diagonal() << rho.r11, rho.r22, rho.r33, rho.r44;
        m(0, 3) = m(3, 0) = rho.r14;
        m(1, 2) = m(2, 1) = rho.r23;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
        const auto ev = rho.eigenvalues();
        for (int k = 0; k < 4; ++k) CHECK(ev[k] == Approx(es.eigenvalues()(k)).epsilon(1e-12));
    }
}

TEST_CASE("random states are valid") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 2000; ++i) {
        const auto x = testing::random_point(rng);
        const auto c = correlators(x.p, ThermalPoint(x.t));
        CHECK(c.within_bounds());
        const auto s = dimer_density_matrix(c);
        CHECK(s.psd);
        CHECK(s.rho.trace() == Approx(1.0).epsilon(1e-12));
        CHECK(s.rho.r22 == s.rho.r33);
    }
}

TEST_CASE("symmetry under gamma and field reversal") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto x = testing::random_point(rng, 0.1, 5.0);
        const ThermalPoint tp(x.t);
        const auto c = correlators(x.p, tp);
        auto g = x.p;
        g.gamma = -g.gamma;
        const auto cg = correlators(g, tp);
        // A quarter turn about z swaps the x and y couplings.
        CHECK(cg.xx == Approx(c.yy).epsilon(1e-10));
        CHECK(cg.yy == Approx(c.xx).epsilon(1e-10));
        CHECK(cg.zz == Approx(c.zz).epsilon(1e-10));
        CHECK(cg.z == Approx(c.z).epsilon(1e-10));
        auto f = x.p;
        f.h = -f.h;
        const auto cf = correlators(f, tp);
        CHECK(cf.zz == Approx(c.zz).epsilon(1e-10));
        CHECK(cf.z == Approx(-c.z).epsilon(1e-10));
        CHECK(std::abs(cf.xx - c.xx) + std::abs(cf.yy - c.yy) < 1e-10);
    }
}

TEST_CASE("closed form matches the finite chain in the fig2a regime") {
    // Along the J0 sweep the ring and the infinite chain may differ by terms
    // of order (λ-/λ+)^N; where that bound is tiny they must agree to 1e-6.
    const int n = 14;
    int tight = 0;
    for (double j0 = -2.0; j0 <= 2.0001; j0 += 0.25) {
        const ModelParams p{1.0, 0.95, 0.0, j0, 0.27};
        const ThermalPoint tp(0.2);
        const auto chain = oracle::finite_chain_correlators({n, p, tp});
        const auto closed = correlators(p, tp);
        const double dev = std::max({std::abs(chain.xx - closed.xx), std::abs(chain.yy - closed.yy),
                                     std::abs(chain.zz - closed.zz), std::abs(chain.z - closed.z)});
        const double bound = std::pow(subleading_ratio(p, tp), n);
        CHECK(dev <= 1e-6 + 4.0 * bound);
        if (bound < 1e-9) {
            CHECK(dev <= 1e-6);
            ++tight;
        }
    }
    CHECK(tight > 0);
}

TEST_CASE("dimer matrix matches the finite-chain partial trace") {
    const ModelParams p{1.0, 0.95, 0.0, 0.5, 0.27};
    const ThermalPoint tp(1.0);
    REQUIRE(std::pow(subleading_ratio(p, tp), 14) < 1e-8);
    const Eigen::Matrix4d chain = oracle::finite_chain_density_matrix({14, p, tp});
    const auto rho = thermal_state(p, tp).rho;
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.diagonal() << rho.r11, rho.r22, rho.r33, rho.r44;
    m(0, 3) = m(3, 0) = rho.r14;
    m(1, 2) = m(2, 1) = rho.r23;
    CHECK((chain - m).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("single-bond forms disagree with the chain") {
    const ModelParams p{1.0, 0.5, 0.3, -0.3, 0.5};
    const ThermalPoint tp(1.0);
    const auto chain = oracle::finite_chain_correlators({14, p, tp});
    const auto lit = correlators(p, tp, Formula::single_bond);
    const auto fixed = correlators(p, tp);
    CHECK(std::abs(lit.xx - chain.xx) + std::abs(lit.z - chain.z) > 1e-3);
    CHECK(std::abs(fixed.xx - chain.xx) + std::abs(fixed.z - chain.z) < 1e-8);
}
