#pragma once

// Time-domain observables: cascade emission of a double-excited mode and the
// smoothed photon-photon correlation function g2~(t, eps).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wgqed/errors.hpp"
#include "wgqed/linalg.hpp"
#include "wgqed/model.hpp"
#include "wgqed/parallel.hpp"
#include "wgqed/scattering.hpp"
#include "wgqed/spectrum.hpp"

namespace wgqed {

inline std::vector<double> logspace(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ConfigError("logspace: need 0 < lo < hi and count >= 2");
    std::vector<double> v = linspace(std::log10(lo), std::log10(hi), count);
    for (auto& x : v) x = std::pow(10.0, x);
    v.front() = lo;
    v.back() = hi;
    return v;
}

inline std::vector<double> default_time_grid() { return logspace(1e-2, 1e3, 501); }

struct CascadeTrace {
    std::vector<double> t;
    std::vector<double> p2;
    std::vector<std::vector<double>> p1;  // p1[mu][k]
    std::vector<double> gamma_tot;
    std::vector<double> photons;          // cumulative emitted photons n(t)
    double gamma21 = 0.0;
    std::vector<double> gamma10;
    std::vector<double> branching;        // raw D_{nu mu}
    double photons_limit = 0.0;           // n(infinity) = 1 + sum_mu D
};

namespace dynamics_detail {

// (exp(-2at) - exp(-2bt)) / (b - a), with the a == b limit 2t exp(-2at).
// Factoring out the slower exponential keeps it finite for either ordering.
inline double rate_difference_kernel(double a, double b, double t) {
    if (a == b) return 2.0 * t * std::exp(-2.0 * a * t);
    const double d = std::abs(b - a);
    return -std::exp(-2.0 * std::min(a, b) * t) * std::expm1(-2.0 * d * t) / d;
}

}  // namespace dynamics_detail

// Closed-form solution of
//   dP2/dt = -2 G21 P2,   dP1_mu/dt = 2 G21 D_mu P2 - 2 G10_mu P1_mu,
// with P2(0) = 1, P1(0) = 0. The photon count integrates
// G_tot = 2 G21 P2 + sum_mu 2 G10_mu P1_mu exactly:
//   n(t) = (1 + sum D)(1 - P2) - sum_mu P1_mu.
inline CascadeTrace cascade(const DoubleMode& mode, const std::vector<SingleMode>& singles,
                            const ArrayConfig& config, const std::vector<double>& t_grid) {
    if (!(mode.gamma21 > 0.0)) throw ConfigError("cascade: dark mode (Gamma21 = 0) has no cascade");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] >= 0.0) || !std::isfinite(t_grid[k])) throw ConfigError("cascade: times must be finite and >= 0");
        if (k > 0 && t_grid[k] < t_grid[k - 1]) throw ConfigError("cascade: time grid must be non-decreasing");
    }
    if (mode.d.size() != config.n_qubits) throw ConfigError("cascade: mode does not belong to this array");

    CascadeTrace tr;
    tr.t = t_grid;
    tr.gamma21 = mode.gamma21;
    tr.branching = branching_ratios(mode, singles);
    for (const auto& s : singles) tr.gamma10.push_back(s.decay_rate);
    double dsum = 0.0;
    for (double d : tr.branching) dsum += d;
    tr.photons_limit = 1.0 + dsum;

    const std::size_t nt = t_grid.size();
    tr.p2.resize(nt);
    tr.gamma_tot.resize(nt);
    tr.photons.resize(nt);
    tr.p1.assign(singles.size(), std::vector<double>(nt));
    const double a = mode.gamma21;
    for (std::size_t k = 0; k < nt; ++k) {
        const double t = t_grid[k];
        const double p2 = std::exp(-2.0 * a * t);
        double p1sum = 0.0;
        double rate = 2.0 * a * p2;
        for (std::size_t mu = 0; mu < singles.size(); ++mu) {
            const double b = tr.gamma10[mu];
            const double p1 = a * tr.branching[mu] * dynamics_detail::rate_difference_kernel(a, b, t);
            tr.p1[mu][k] = p1;
            p1sum += p1;
            rate += 2.0 * b * p1;
        }
        tr.p2[k] = p2;
        tr.gamma_tot[k] = rate;
        // 1 - P2 via expm1 keeps early times accurate
        tr.photons[k] = (1.0 + dsum) * -std::expm1(-2.0 * a * t) - p1sum;
    }
    return tr;
}

// First time at which n(t) reaches `level` on the trace grid (linear
// interpolation), or NaN if never reached.
inline double time_to_photons(const CascadeTrace& tr, double level) {
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        if (tr.photons[k] >= level) {
            if (k == 0) return tr.t[0];
            const double f = (level - tr.photons[k - 1]) / (tr.photons[k] - tr.photons[k - 1]);
            return tr.t[k - 1] + f * (tr.t[k] - tr.t[k - 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// r(omega) = -i gamma0 sum_ij G_ij(omega) exp(i x_i) exp(i x_j)
inline cplx reflection_coefficient(const ArrayConfig& config, double omega) {
    const ComplexVector e = config.phases(+1);
    return -I_unit * config.gamma0 * (e.transpose() * green(config, omega) * e)(0, 0);
}

inline constexpr double kDefaultDelta = 20.0;

// g2~ for incoming photons at eps +- delta. The frequency integral
// int dw/4pi exp(-i w t) M~(eps+w, eps-w) is evaluated once per eps as a
// residue expansion, so any number of times is cheap.
class CorrelationFunction {
public:
    CorrelationFunction(const ArrayConfig& config, double eps, double delta = kDefaultDelta,
                        QMethod method = QMethod::markovian_closed_form)
        : amp_(config, eps + delta, eps - delta, method),
          r1_(reflection_coefficient(config, eps + delta)),
          r2_(reflection_coefficient(config, eps - delta)) {
        if (!(std::abs(r1_ * r2_) > 1e-12))
            throw NumericalError("g2: reflection coefficients vanish, correlation undefined");
    }

    double operator()(double t) const { return value(amp_.fourier(t)); }
    double by_quadrature(double t) const { return value(amp_.fourier_quadrature(t)); }

    cplx r1() const noexcept { return r1_; }
    cplx r2() const noexcept { return r2_; }
    const PairAmplitude& amplitude() const noexcept { return amp_; }

private:
    double value(cplx f) const {
        const cplx rr = r1_ * r2_;
        return std::norm(rr + I_unit * f / (2.0 * kTwoPi)) / std::norm(rr);
    }

    PairAmplitude amp_;
    cplx r1_, r2_;
};

inline double g2_tilde(const ArrayConfig& config, double t, double eps, double delta = kDefaultDelta) {
    return CorrelationFunction(config, eps, delta)(t);
}

struct CorrelationTrace {
    std::vector<double> t;
    std::vector<double> eps;
    std::vector<std::vector<double>> g2;  // g2[ie][it]
    double delta = kDefaultDelta;
    std::vector<cplx> r1, r2;
    std::vector<double> tail_deviation;  // |g2(t_last) - 1| per eps row
};

inline CorrelationTrace g2_map(const ArrayConfig& config, const std::vector<double>& t_grid,
                               const std::vector<double>& eps_grid, double delta = kDefaultDelta,
                               unsigned jobs = 1) {
    if (t_grid.empty() || eps_grid.empty()) throw ConfigError("g2_map: empty grid");
    CorrelationTrace tr;
    tr.t = t_grid;
    tr.eps = eps_grid;
    tr.delta = delta;
    tr.g2.assign(eps_grid.size(), {});
    tr.r1.resize(eps_grid.size());
    tr.r2.resize(eps_grid.size());
    tr.tail_deviation.resize(eps_grid.size());
    parallel_for(eps_grid.size(), jobs, [&](std::size_t ie) {
        const CorrelationFunction g(config, eps_grid[ie], delta);
        std::vector<double> row(t_grid.size());
        for (std::size_t k = 0; k < t_grid.size(); ++k) row[k] = g(t_grid[k]);
        tr.r1[ie] = g.r1();
        tr.r2[ie] = g.r2();
        tr.tail_deviation[ie] = std::abs(row.back() - 1.0);
        tr.g2[ie] = std::move(row);
    });
    return tr;
}

struct SpectralFeature {
    double center = 0.0;
    double half_width = 0.0;  // half width at half prominence
    double prominence = 0.0;
    bool dip = false;
};

namespace dynamics_detail {

inline void find_peaks(const std::vector<double>& x, const std::vector<double>& y, bool dip,
                       double min_prominence, std::vector<SpectralFeature>& out) {
    const std::size_t n = y.size();
    auto v = [&](std::size_t k) { return dip ? -y[k] : y[k]; };
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(v(k) > v(k - 1) && v(k) >= v(k + 1))) continue;
        // Bases: lowest point before reaching higher ground (or the edge).
        std::size_t l = k;
        double lmin = v(k);
        while (l > 0 && v(l - 1) <= v(k)) {
            --l;
            lmin = std::min(lmin, v(l));
        }
        std::size_t r = k;
        double rmin = v(k);
        while (r + 1 < n && v(r + 1) <= v(k)) {
            ++r;
            rmin = std::min(rmin, v(r));
        }
        const double prom = v(k) - std::max(lmin, rmin);
        if (!(prom > min_prominence)) continue;
        const double level = v(k) - 0.5 * prom;
        std::size_t a = k;
        while (a > 0 && v(a) > level) --a;
        std::size_t b = k;
        while (b + 1 < n && v(b) > level) ++b;
        auto cross = [&](std::size_t lo, std::size_t hi) {
            const double f = (level - v(lo)) / (v(hi) - v(lo));
            return x[lo] + f * (x[hi] - x[lo]);
        };
        const double xl = v(a) <= level ? cross(a, a + 1) : x[a];
        const double xr = v(b) <= level ? cross(b, b - 1) : x[b];
        out.push_back({x[k], 0.5 * (xr - xl), prom, dip});
    }
}

}  // namespace dynamics_detail

// Peaks and dips of a sampled curve with their half widths at half
// prominence. Features below `min_relative_prominence` of the curve's range
// are ignored.
inline std::vector<SpectralFeature> spectral_features(const std::vector<double>& x, const std::vector<double>& y,
                                                      double min_relative_prominence = 1e-3) {
    if (x.size() != y.size()) throw ConfigError("spectral_features: size mismatch");
    std::vector<SpectralFeature> out;
    if (x.size() < 3) return out;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double floor = min_relative_prominence * (*hi - *lo);
    dynamics_detail::find_peaks(x, y, false, floor, out);
    dynamics_detail::find_peaks(x, y, true, floor, out);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.center < b.center; });
    return out;
}

}  // namespace wgqed
