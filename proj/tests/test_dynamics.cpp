#include <gtest/gtest.h>

#include <boost/numeric/odeint.hpp>

#include "oracles.hpp"
#include "wgqed/dynamics.hpp"

using namespace wgqed;

namespace {

ArrayConfig four() { return ArrayConfig::periodic(4, 0.1, kHardCore); }

// dP2 = -2a P2, dP1_mu = 2a D_mu P2 - 2b_mu P1_mu, dn = 2a P2 + sum 2 b_mu P1_mu
std::vector<std::vector<double>> integrate_kinetics(const CascadeTrace& tr, const std::vector<double>& times) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;
    const std::size_t m = tr.gamma10.size();
    const double a = tr.gamma21;
    State x(m + 2, 0.0);
    x[0] = 1.0;
    auto rhs = [&](const State& s, State& ds, double) {
        ds[0] = -2.0 * a * s[0];
        ds[m + 1] = 2.0 * a * s[0];
        for (std::size_t mu = 0; mu < m; ++mu) {
            ds[mu + 1] = 2.0 * a * tr.branching[mu] * s[0] - 2.0 * tr.gamma10[mu] * s[mu + 1];
            ds[m + 1] += 2.0 * tr.gamma10[mu] * s[mu + 1];
        }
    };
    std::vector<State> out;
    auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), 1e-3,
                            [&](const State& s, double) { out.push_back(s); });
    return out;
}

}  // namespace

TEST(Cascade, ClosedFormMatchesAdaptiveIntegration) {
    const auto cfg = four();
    const auto singles = single_modes(cfg);
    const auto times = linspace(0.0, 50.0, 201);
    for (const auto& mode : double_modes(cfg)) {
        const auto tr = cascade(mode, singles, cfg, times);
        const auto ref = integrate_kinetics(tr, times);
        ASSERT_EQ(ref.size(), times.size());
        for (std::size_t k = 0; k < times.size(); ++k) {
            EXPECT_NEAR(tr.p2[k], ref[k][0], 1e-6);
            for (std::size_t mu = 0; mu < singles.size(); ++mu) EXPECT_NEAR(tr.p1[mu][k], ref[k][mu + 1], 1e-6);
            EXPECT_NEAR(tr.photons[k], ref[k].back(), 1e-6);
        }
    }
}

TEST(Cascade, TwoPhotonPopulationIsExponential) {
    const auto cfg = four();
    const auto singles = single_modes(cfg);
    const auto times = default_time_grid();
    for (const auto& mode : double_modes(cfg)) {
        const auto tr = cascade(mode, singles, cfg, times);
        for (std::size_t k = 0; k < times.size(); k += 50)
            EXPECT_NEAR(tr.p2[k], std::exp(-2.0 * mode.gamma21 * times[k]), 1e-15);
    }
}

TEST(Cascade, PopulationsBoundedAndCountMonotone) {
    oracle::Rng rng(41);
    for (int trial = 0; trial < 6; ++trial) {
        const auto cfg = ArrayConfig::periodic(rng.integer(3, 6), rng.uniform(0.05, 0.5), kHardCore);
        const auto singles = single_modes(cfg);
        for (const auto& mode : double_modes(cfg)) {
            const auto tr = cascade(mode, singles, cfg, logspace(1e-3, 1e5, 300));
            double dsum = 0.0;
            for (double d : tr.branching) dsum += d;
            for (std::size_t k = 0; k < tr.t.size(); ++k) {
                EXPECT_GE(tr.p2[k], 0.0);
                EXPECT_LE(tr.p2[k], 1.0 + 1e-9);
                for (const auto& p1 : tr.p1) {
                    EXPECT_GE(p1[k], -1e-15);
                    EXPECT_LE(p1[k], 1.0 + 1e-9);
                }
                // the count is bounded by its limit 1 + sum D rather than by 2
                EXPECT_LE(tr.photons[k], 1.0 + dsum + 1e-9);
                if (k > 0) EXPECT_GE(tr.photons[k], tr.photons[k - 1] - 1e-12);
            }
            EXPECT_NEAR(tr.photons.back(), tr.photons_limit, 1e-6);
        }
    }
}

TEST(Cascade, DegenerateRateBranchIsContinuous) {
    for (double t : {0.0, 0.3, 4.0, 50.0}) {
        const double exact = dynamics_detail::rate_difference_kernel(0.7, 0.7, t);
        EXPECT_NEAR(exact, 2.0 * t * std::exp(-1.4 * t), 1e-15);
        EXPECT_NEAR(dynamics_detail::rate_difference_kernel(0.7, 0.7 + 1e-9, t), exact, 1e-8);
        EXPECT_NEAR(dynamics_detail::rate_difference_kernel(0.7, 0.7 - 1e-9, t), exact, 1e-8);
    }
}

TEST(Cascade, RejectsDarkModeAndBadGrid) {
    const auto cfg = four();
    const auto singles = single_modes(cfg);
    auto mode = double_modes(cfg)[0];
    EXPECT_THROW(cascade(mode, singles, cfg, {1.0, 0.5}), ConfigError);
    EXPECT_THROW(cascade(mode, singles, cfg, {-1.0}), ConfigError);
    mode.gamma21 = 0.0;
    EXPECT_THROW(cascade(mode, singles, cfg, {0.0, 1.0}), ConfigError);
}

TEST(Cascade, SuperradiantModeEmitsFirst) {
    const auto cfg = four();
    const auto singles = single_modes(cfg);
    const auto times = logspace(1e-3, 1e5, 2001);
    double t_super = 0.0;
    std::vector<double> others;
    for (const auto& mode : double_modes(cfg)) {
        const double t = time_to_photons(cascade(mode, singles, cfg, times), 1.9);
        ASSERT_TRUE(std::isfinite(t));
        if (mode.label == ModeClass::superradiant) t_super = t;
        else others.push_back(t);
    }
    for (double t : others) EXPECT_LT(t_super, t);
}

TEST(Reflection, ResonantSingleQubitAndPassivity) {
    EXPECT_NEAR(std::abs(reflection_coefficient(ArrayConfig::periodic(1, 0.0), 0.0) + 1.0), 0.0, 1e-15);
    oracle::Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const auto cfg = ArrayConfig::periodic(rng.integer(1, 10), rng.uniform(0, 3));
        for (double w : linspace(-4, 4, 161)) EXPECT_LE(std::abs(reflection_coefficient(cfg, w)), 1.0 + 1e-9);
        EXPECT_LT(std::abs(reflection_coefficient(cfg, 100.0 * (trial % 2 ? 1 : -1))), 0.02 * cfg.n_qubits);
    }
    EXPECT_LT(std::abs(reflection_coefficient(ArrayConfig::periodic(1, 0.0), 100.0)), 0.02);
}

TEST(Correlation, SingleQubitBlockadeAndRelaxation) {
    const auto one = ArrayConfig::periodic(1, 0.0, 1e4);
    for (double eps : linspace(-2, 2, 9)) {
        const CorrelationFunction g(one, eps);
        EXPECT_LT(g(0.0), 1e-6) << eps;
        EXPECT_NEAR(g(1e3), 1.0, 1e-3);
    }
}

TEST(Correlation, ResidueMatchesQuadrature) {
    const auto cfg = ArrayConfig::periodic(4, 0.1, 1e4);
    for (double eps : {-0.235, 0.4}) {
        const CorrelationFunction g(cfg, eps);
        for (double t : {0.0, 1.0, 20.0}) EXPECT_NEAR(g(t), g.by_quadrature(t), 1e-5 * g(t) + 1e-7) << eps << " " << t;
    }
}

TEST(Correlation, NarrowFeaturesAtIntermediateTime) {
    const auto cfg = ArrayConfig::periodic(4, 0.1, 1e4);
    const auto eps = linspace(-0.5, 0.3, 401);
    const auto tr = g2_map(cfg, {0.0, 20.0}, eps, kDefaultDelta, 2);
    std::vector<double> late(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) late[i] = tr.g2[i][1];
    double narrowest = std::numeric_limits<double>::infinity();
    for (const auto& f : spectral_features(eps, late)) narrowest = std::min(narrowest, f.half_width);
    EXPECT_LT(narrowest, 0.1);
}

TEST(CorrelationMap, RowsAreNonNegativeAndRelax) {
    const auto cfg = ArrayConfig::periodic(3, 0.2, 1e4);
    std::vector<double> t = logspace(1e-2, 2e3, 60);
    t.insert(t.begin(), 0.0);
    const auto tr = g2_map(cfg, t, {-1.0, 0.0, 2.0}, kDefaultDelta, 1);
    for (std::size_t ie = 0; ie < tr.eps.size(); ++ie) {
        for (double v : tr.g2[ie]) EXPECT_GE(v, 0.0);
        EXPECT_LT(tr.tail_deviation[ie], 1e-3);
        EXPECT_GT(std::abs(tr.r1[ie] * tr.r2[ie]), 1e-12);
    }
    const auto tr2 = g2_map(cfg, t, {-1.0, 0.0, 2.0}, kDefaultDelta, 3);
    EXPECT_EQ(tr.g2, tr2.g2);
}

TEST(Correlation, SingleQubitEnvelopeIndependentOfEnergy) {
    // rows oscillate at the pair detuning but share the exp(-gamma0 t) envelope
    const auto one = ArrayConfig::periodic(1, 0.0, 1e4);
    auto envelope = [&](double eps) {
        const CorrelationFunction g(one, eps);
        double m = 0.0;
        for (double t = 4.0; t < 10.0; t += 0.01) m = std::max(m, std::abs(g(t) - 1.0) * std::exp(t));
        return m;
    };
    const double ref = envelope(0.0);
    for (double eps : {-3.0, -1.0, 2.0, 3.0}) EXPECT_NEAR(envelope(eps), ref, 0.05 * ref) << eps;
}

TEST(Correlation, LongLivedTailEnhancedNearPairResonance) {
    const auto cfg = ArrayConfig::periodic(4, 0.1, 1e4);
    auto tail = [&](double eps) {
        const CorrelationFunction g(cfg, eps);
        double m = 0.0;
        for (double t = 100.0; t < 400.0; t += 0.25) m = std::max(m, std::abs(g(t) - 1.0));
        return m;
    };
    const double far2 = tail(2.0), far6 = tail(6.0);
    EXPECT_LT(std::max(far2, far6), 2.0 * std::min(far2, far6));
    EXPECT_GT(tail(double_modes(cfg)[1].energy.real()), 5.0 * std::max(far2, far6));
}

TEST(Correlation, LongTimeDecaySetBySlowestSingleMode) {
    const auto cfg = ArrayConfig::periodic(4, 0.1, 1e4);
    double gmin = std::numeric_limits<double>::infinity();
    for (const auto& s : single_modes(cfg)) gmin = std::min(gmin, s.decay_rate);
    const CorrelationFunction g(cfg, 0.5);
    const double t1 = 10.0 / gmin, t2 = 20.0 / gmin;
    // average |g2 - 1| over a few oscillation periods at each end
    auto envelope = [&](double t0) {
        double s = 0.0;
        for (int k = 0; k < 200; ++k) s = std::max(s, std::abs(g(t0 + 0.1 * k) - 1.0));
        return s;
    };
    const double slope = std::log(envelope(t2) / envelope(t1)) / (t2 - t1);
    EXPECT_NEAR(slope, -gmin, 0.05 * gmin);
}

TEST(SpectralFeatures, LorentzianWidth) {
    const auto x = linspace(-1, 1, 2001);
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = 1.0 - 0.5 * 0.01 / (x[k] * x[k] + 0.01);
    const auto f = spectral_features(x, y);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_TRUE(f[0].dip);
    EXPECT_NEAR(f[0].center, 0.0, 1e-9);
    // half prominence of a Lorentzian on a finite window sits slightly beyond 0.1
    EXPECT_NEAR(f[0].half_width, 0.1, 0.01);
}
