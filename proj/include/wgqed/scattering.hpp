#pragma once

// Two-photon scattering: single-particle Green function and structure
// factors, the pair propagator Sigma, the interaction kernel Q, the amplitude
// M and the forward incoherent intensity.
//
// Conventions: frequencies are detunings from omega0 in units of gamma0, all
// propagation phases are evaluated at omega0, and the amplitude prefactor
// (c/L)^2 is set to 1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgqed/errors.hpp"
#include "wgqed/linalg.hpp"
#include "wgqed/model.hpp"
#include "wgqed/parallel.hpp"
#include "wgqed/quadrature.hpp"
#include "wgqed/spectrum.hpp"

namespace wgqed {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ScatteringUnits {
    static constexpr const char* amplitude = "M~ = M (L/c)^2, i.e. prefactor (c/L)^2 set to 1";
    static constexpr const char* frequency = "detuning from omega0 in units of gamma0";
    static constexpr const char* phases = "Markovian: exp(i omega z / c) evaluated at omega0";
};

// Settings shared by every frequency integral in this module.
struct IntegrationOptions {
    double window = 300.0;  // half-width around the pair energy, in gamma0
    double rel_tol = 1e-9;
    double abs_tol = 1e-30;
    std::size_t max_evaluations = 4'000'000;

    void validate() const {
        if (!(window > 0.0) || !std::isfinite(window)) throw ConfigError("integration window must be > 0");
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("integration tolerances must be > 0");
    }
};

// G(omega) = [omega - H1]^{-1}
inline ComplexMatrix green(const ArrayConfig& config, cplx omega) {
    if (!std::isfinite(omega.real()) || !std::isfinite(omega.imag()))
        throw ConfigError("green: frequency must be finite");
    const ComplexMatrix h = single_excitation_matrix(config);
    const auto n = h.rows();
    return solve(omega * ComplexMatrix::Identity(n, n) - h, ComplexMatrix::Identity(n, n));
}

// s_i^{+-}(omega) = sum_j G_ij(omega) exp(+-i x_j); + for incoming, - for outgoing photons.
inline ComplexVector structure_factor(const ArrayConfig& config, double omega, int direction) {
    if (direction != 1 && direction != -1) throw ConfigError("structure_factor: direction must be +1 or -1");
    return green(config, omega) * config.phases(direction);
}

// Spectral form of the single-particle propagator, H1 = V diag(l) V^{-1}.
// s^{+-}_i(w) = sum_mu R^{+-}_{i mu} / (w - l_mu). Falls back to dense solves
// when V is too ill-conditioned for the expansion to be trusted.
class SingleParticlePropagator {
public:
    explicit SingleParticlePropagator(const ArrayConfig& config, double max_condition = 1e8)
        : config_(config), h_(single_excitation_matrix(config)) {
        const auto dec = eig(h_);
        poles_ = dec.values;
        vectors_ = dec.vectors;
        Eigen::PartialPivLU<ComplexMatrix> lu(vectors_);
        const double rc = lu.rcond();
        spectral_ = rc > 1.0 / max_condition;
        if (spectral_) {
            inverse_ = lu.inverse();
            const ComplexVector wp = inverse_ * config.phases(+1);
            const ComplexVector wm = inverse_ * config.phases(-1);
            res_plus_ = vectors_ * wp.asDiagonal();
            res_minus_ = vectors_ * wm.asDiagonal();
        }
    }

    const ArrayConfig& config() const noexcept { return config_; }
    const ComplexVector& poles() const noexcept { return poles_; }
    const ComplexMatrix& eigenvectors() const noexcept { return vectors_; }
    const ComplexMatrix& inverse_eigenvectors() const noexcept { return inverse_; }
    bool spectral() const noexcept { return spectral_; }
    const ComplexMatrix& residues(int direction) const { return direction > 0 ? res_plus_ : res_minus_; }

    ComplexVector structure_factor(cplx omega, int direction) const {
        if (!spectral_) return green(config_, omega) * config_.phases(direction);
        const ComplexVector denom = (omega - poles_.array()).inverse().matrix();
        return residues(direction) * denom;
    }

    ComplexMatrix green_matrix(cplx omega) const {
        if (!spectral_) return green(config_, omega);
        const ComplexVector denom = (omega - poles_.array()).inverse().matrix();
        return vectors_ * denom.asDiagonal() * inverse_;
    }

private:
    ArrayConfig config_;
    ComplexMatrix h_;
    ComplexVector poles_;
    ComplexMatrix vectors_;
    ComplexMatrix inverse_;
    ComplexMatrix res_plus_;
    ComplexMatrix res_minus_;
    bool spectral_ = false;
};

enum class SigmaMethod { kronecker, eigen_expansion, quadrature };

inline std::string to_string(SigmaMethod m) {
    switch (m) {
        case SigmaMethod::kronecker: return "kronecker";
        case SigmaMethod::eigen_expansion: return "eigen_expansion";
        case SigmaMethod::quadrature: return "quadrature";
    }
    return "unknown";
}

namespace scattering_detail {

// Columns e_{jj} of the ordered-pair space.
inline ComplexMatrix diagonal_pair_columns(int n) {
    ComplexMatrix b = ComplexMatrix::Zero(static_cast<Eigen::Index>(n) * n, n);
    for (int j = 0; j < n; ++j) b(j * n + j, j) = 1.0;
    return b;
}

// X = (K - 2 eps)^{-1} B restricted to rows ii.
inline ComplexMatrix pair_resolvent_block(const ArrayConfig& config, cplx eps, bool with_interaction) {
    const int n = config.n_qubits;
    ComplexMatrix k = two_particle_operator(config, with_interaction);
    k.diagonal().array() -= 2.0 * eps;
    const ComplexMatrix x = solve(k, diagonal_pair_columns(n));
    ComplexMatrix out(n, n);
    for (int i = 0; i < n; ++i) out.row(i) = x.row(i * n + i);
    return out;
}

inline std::vector<cplx> pole_hints_for_pair(const ComplexVector& poles, double eps) {
    std::vector<cplx> hints;
    for (Eigen::Index k = 0; k < poles.size(); ++k) {
        hints.emplace_back(poles(k).real() - eps, poles(k).imag());
        hints.emplace_back(eps - poles(k).real(), poles(k).imag());
    }
    return hints;
}

}  // namespace scattering_detail

// Interaction-free pair propagator Sigma_ij(eps) = int G_ij(w) G_ij(2 eps - w) dw / 2pi
//   = i [(H (x) 1 + 1 (x) H - 2 eps)^{-1}]_{ii,jj}.
inline ComplexMatrix sigma(const ArrayConfig& config, double eps, SigmaMethod method = SigmaMethod::kronecker,
                           const IntegrationOptions& opts = {}) {
    config.validate();
    if (!std::isfinite(eps)) throw ConfigError("sigma: pair energy must be finite");
    const int n = config.n_qubits;
    switch (method) {
        case SigmaMethod::kronecker:
            return I_unit * scattering_detail::pair_resolvent_block(config, eps, false);
        case SigmaMethod::eigen_expansion: {
            SingleParticlePropagator prop(config);
            if (!prop.spectral()) throw NumericalError("sigma: eigenvectors too ill-conditioned for expansion");
            const auto& v = prop.eigenvectors();
            const auto& w = prop.inverse_eigenvectors();
            const auto& l = prop.poles();
            ComplexMatrix s = ComplexMatrix::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    cplx acc = 0.0;
                    for (int mu = 0; mu < n; ++mu)
                        for (int nu = 0; nu < n; ++nu)
                            acc += v(i, mu) * w(mu, j) * v(i, nu) * w(nu, j) / (l(mu) + l(nu) - 2.0 * eps);
                    s(i, j) = I_unit * acc;
                }
            return s;
        }
        case SigmaMethod::quadrature: {
            opts.validate();
            SingleParticlePropagator prop(config);
            QuadratureSpec spec;
            spec.lower = -opts.window;
            spec.upper = opts.window;
            spec.rel_tol = opts.rel_tol;
            spec.abs_tol = opts.abs_tol;
            spec.max_evaluations = opts.max_evaluations;
            spec.tail_model = true;
            spec.pole_hints = scattering_detail::pole_hints_for_pair(prop.poles(), eps);
            auto f = [&](double u) -> ComplexMatrix {
                return prop.green_matrix(eps + u).cwiseProduct(prop.green_matrix(eps - u));
            };
            return integrate(f, spec).value / kTwoPi;
        }
    }
    throw ConfigError("sigma: unknown method");
}

// i [(H (x) 1 + 1 (x) H + U - 2 eps)^{-1}]_{ii,jj}, the interaction-dressed block.
inline ComplexMatrix dressed_sigma(const ArrayConfig& config, double eps) {
    config.validate();
    if (config.hard_core()) throw ConfigError("dressed_sigma requires finite chi");
    return I_unit * scattering_detail::pair_resolvent_block(config, eps, true);
}

enum class QMethod { markovian_closed_form, quadrature, resonant_approx };

inline std::string to_string(QMethod m) {
    switch (m) {
        case QMethod::markovian_closed_form: return "markovian_closed_form";
        case QMethod::quadrature: return "quadrature";
        case QMethod::resonant_approx: return "resonant_approx";
    }
    return "unknown";
}

struct ScatteringKernel {
    double eps = 0.0;
    ComplexMatrix sigma;  // empty for the resonant approximation
    ComplexMatrix q;
    QMethod method = QMethod::markovian_closed_form;
};

// Q_ij = 2i gamma0^2 d_i conj(d_j) / (Re eps_nu - i gamma0 sum|d|^2 - eps)
inline ComplexMatrix q_resonant(const DoubleMode& mode, double eps, double gamma0 = 1.0) {
    const cplx denom(mode.energy.real() - eps, -gamma0 * mode.d.squaredNorm());
    return (2.0 * I_unit * gamma0 * gamma0 / denom) * (mode.d * mode.d.adjoint());
}

// Finite chi: Q = i chi [(2 eps - K0)(K0 + U - 2 eps)^{-1}]_{ii,jj}, which
// equals -i chi (1 - i chi Sigma)^{-1}. Hard core: Q = Sigma^{-1}.
inline ScatteringKernel q_matrix(const ArrayConfig& config, double eps,
                                 QMethod method = QMethod::markovian_closed_form,
                                 const IntegrationOptions& opts = {}) {
    config.validate();
    if (!std::isfinite(eps)) throw ConfigError("q_matrix: pair energy must be finite");
    const int n = config.n_qubits;
    ScatteringKernel k;
    k.eps = eps;
    k.method = method;
    if (method == QMethod::resonant_approx) {
        const auto modes = double_modes(config);
        if (modes.empty()) throw ConfigError("q_matrix: no double-excited modes for the resonant approximation");
        const auto best = std::min_element(modes.begin(), modes.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.energy.real() - eps) < std::abs(b.energy.real() - eps);
        });
        k.q = q_resonant(*best, eps, config.gamma0);
        return k;
    }
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    if (method == QMethod::markovian_closed_form) {
        k.sigma = sigma(config, eps, SigmaMethod::kronecker);
        if (config.hard_core()) {
            k.q = inverse(k.sigma);
        } else {
            // (2 eps - K0) X = -B + U X on the ii rows
            const ComplexMatrix x = scattering_detail::pair_resolvent_block(config, eps, true);
            k.q = I_unit * config.chi * (config.chi * x - id);
        }
        return k;
    }
    k.sigma = sigma(config, eps, SigmaMethod::quadrature, opts);
    if (config.hard_core()) {
        k.q = inverse(k.sigma);
    } else {
        k.q = -I_unit * config.chi * inverse(id - I_unit * config.chi * k.sigma);
    }
    return k;
}

// |-2 gamma0 Re Tr Q - |Tr Q|^2| / |Tr Q|^2
inline double optical_theorem_residual(const ComplexMatrix& q, double gamma0) {
    const cplx tr = q.trace();
    const double t2 = std::norm(tr);
    if (!(t2 > 0.0)) throw NumericalError("optical_theorem_residual: Tr Q vanishes");
    return std::abs(-2.0 * gamma0 * tr.real() - t2) / t2;
}

inline double optical_theorem_residual(const ArrayConfig& config, double eps,
                                       QMethod method = QMethod::markovian_closed_form) {
    return optical_theorem_residual(q_matrix(config, eps, method).q, config.gamma0);
}

// Two-photon amplitude for a fixed incoming pair (w1, w2), as a function of
// the outgoing frequency w1' on the energy shell w1' + w2' = w1 + w2:
//   M~ = -2i gamma0^2 sum_ij s-_i(w1') s-_i(w2') Q_ij(eps) s+_j(w1) s+_j(w2).
class PairAmplitude {
public:
    PairAmplitude(const ArrayConfig& config, double w1, double w2,
                  QMethod method = QMethod::markovian_closed_form, const IntegrationOptions& opts = {})
        : PairAmplitude(std::make_shared<SingleParticlePropagator>(config), w1, w2, method, opts) {}

    PairAmplitude(std::shared_ptr<const SingleParticlePropagator> prop, double w1, double w2,
                  QMethod method = QMethod::markovian_closed_form, const IntegrationOptions& opts = {})
        : prop_(std::move(prop)), w1_(w1), w2_(w2), opts_(opts) {
        if (!std::isfinite(w1) || !std::isfinite(w2)) throw ConfigError("pair amplitude: frequencies must be finite");
        const auto& config = prop_->config();
        eps_ = 0.5 * (w1 + w2);
        kernel_ = q_matrix(config, eps_, method, opts);
        const ComplexVector b =
            prop_->structure_factor(w1, +1).cwiseProduct(prop_->structure_factor(w2, +1));
        a_ = (-2.0 * I_unit * config.gamma0 * config.gamma0) * (kernel_.q * b);
        if (prop_->spectral()) {
            const auto& r = prop_->residues(-1);
            const auto& l = prop_->poles();
            const auto n = l.size();
            c_.resize(n, n);
            for (Eigen::Index m = 0; m < n; ++m)
                for (Eigen::Index k = 0; k < n; ++k)
                    c_(m, k) = (a_.array() * r.col(m).array() * r.col(k).array()).sum() /
                               (2.0 * eps_ - l(m) - l(k));
        }
    }

    double eps() const noexcept { return eps_; }
    double w1() const noexcept { return w1_; }
    double w2() const noexcept { return w2_; }
    const ScatteringKernel& kernel() const noexcept { return kernel_; }
    const SingleParticlePropagator& propagator() const noexcept { return *prop_; }
    // A_i = -2i gamma0^2 (Q (s+(w1) o s+(w2)))_i
    const ComplexVector& vertex() const noexcept { return a_; }
    // C_mn = sum_i A_i R-_im R-_in / (2 eps - l_m - l_n); empty without a spectral propagator.
    const ComplexMatrix& pole_coefficients() const noexcept { return c_; }

    // M~(w1', 2 eps - w1')
    cplx on_shell(double w1p) const {
        const ComplexVector s1 = prop_->structure_factor(w1p, -1);
        const ComplexVector s2 = prop_->structure_factor(2.0 * eps_ - w1p, -1);
        return (s1.array() * s2.array() * a_.array()).sum();
    }

    cplx operator()(double w1p, double w2p) const {
        if (std::abs(w1p + w2p - w1_ - w2_) > 1e-9 * prop_->config().gamma0)
            throw ConfigError("m_amplitude: outgoing pair violates energy conservation");
        const ComplexVector s1 = prop_->structure_factor(w1p, -1);
        const ComplexVector s2 = prop_->structure_factor(w2p, -1);
        return (s1.array() * s2.array() * a_.array()).sum();
    }

    // Resonances of the on-shell integrand in u = w1' - eps.
    std::vector<cplx> pole_hints() const {
        return scattering_detail::pole_hints_for_pair(prop_->poles(), eps_);
    }

    // I = 1/2 int |M~(w', 2 eps - w')|^2 dw'/2pi over eps +- window. The
    // integrand is even about eps, so the half window is integrated and doubled.
    double intensity() const {
        QuadratureSpec spec;
        spec.lower = 0.0;
        spec.upper = opts_.window;
        spec.rel_tol = opts_.rel_tol;
        spec.abs_tol = opts_.abs_tol;
        spec.max_evaluations = opts_.max_evaluations;
        spec.pole_hints = pole_hints();
        auto f = [&](double u) { return std::norm(on_shell(eps_ + u)); };
        return integrate(f, spec).value / kTwoPi;
    }

    // F(tau) = int dw exp(-i w tau) M~(eps + w, eps - w), even in tau. Exact
    // residue sum over the lower half plane.
    cplx fourier(double tau) const {
        if (!prop_->spectral()) return fourier_quadrature(tau);
        const double t = std::abs(tau);
        const auto& l = prop_->poles();
        cplx acc = 0.0;
        for (Eigen::Index m = 0; m < l.size(); ++m) {
            const cplx phase = std::exp(-I_unit * (l(m) - eps_) * t);
            acc += c_.row(m).sum() * phase;
        }
        return -I_unit * kTwoPi * acc;
    }

    // Same integral by pole-hinted quadrature over the window (cross-check path).
    cplx fourier_quadrature(double tau) const {
        QuadratureSpec spec;
        spec.lower = -opts_.window;
        spec.upper = opts_.window;
        spec.rel_tol = std::max(opts_.rel_tol, 1e-8);
        spec.abs_tol = std::max(opts_.abs_tol, 1e-12);
        spec.max_evaluations = opts_.max_evaluations;
        spec.pole_hints = pole_hints();
        spec.tail_model = tau == 0.0;
        auto f = [&](double u) { return std::exp(-I_unit * u * tau) * on_shell(eps_ + u); };
        return integrate(f, spec).value;
    }

private:
    std::shared_ptr<const SingleParticlePropagator> prop_;
    double w1_, w2_, eps_ = 0.0;
    IntegrationOptions opts_;
    ScatteringKernel kernel_;
    ComplexVector a_;
    ComplexMatrix c_;
};

inline cplx m_amplitude(const ArrayConfig& config, double w1p, double w2p, double w1, double w2,
                        QMethod method = QMethod::markovian_closed_form) {
    return PairAmplitude(config, w1, w2, method)(w1p, w2p);
}

inline double forward_intensity(const ArrayConfig& config, double w1, double w2,
                                const IntegrationOptions& opts = {},
                                QMethod method = QMethod::markovian_closed_form) {
    return PairAmplitude(config, w1, w2, method, opts).intensity();
}

struct Axis {
    std::string name;
    std::string unit;
    std::vector<double> values;
};

// Labeled 1D or 2D data. 2D payloads are row-major: index i0 * size1 + i1.
struct SpectrumGrid {
    std::string quantity;
    std::vector<Axis> axes;
    std::vector<double> values;
    std::string normalization = "none";
    double normalization_value = 1.0;

    std::size_t size() const {
        std::size_t s = 1;
        for (const auto& a : axes) s *= a.values.size();
        return s;
    }

    double at(std::size_t i0, std::size_t i1 = 0) const {
        return axes.size() == 1 ? values.at(i0) : values.at(i0 * axes[1].values.size() + i1);
    }
};

inline std::vector<double> linspace(double a, double b, std::size_t count) {
    if (count == 0) throw ConfigError("linspace: count must be >= 1");
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t k = 0; k < count; ++k)
        v[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1);
    v.back() = b;
    return v;
}

inline constexpr std::size_t kDefaultGridCap = 1'000'000;

struct IntensityRequest {
    IntegrationOptions integration;
    QMethod method = QMethod::markovian_closed_form;
    bool normalize = false;  // divide by the N=1 maximum over the identical grid
    unsigned jobs = 1;
    std::size_t grid_cap = kDefaultGridCap;
};

namespace scattering_detail {

inline void check_cap(std::size_t points, std::size_t cap) {
    if (points > cap)
        throw ConfigError("grid has " + std::to_string(points) + " points, above the cap of " + std::to_string(cap));
}

// Evaluates intensities at (config index, w1, w2) triples in parallel.
struct PointSpec {
    std::size_t config_index;
    double w1, w2;
};

inline std::vector<double> evaluate(const std::vector<ArrayConfig>& configs, const std::vector<PointSpec>& pts,
                                    const IntensityRequest& req) {
    std::vector<std::shared_ptr<const SingleParticlePropagator>> props;
    for (const auto& c : configs) props.push_back(std::make_shared<SingleParticlePropagator>(c));
    std::vector<double> out(pts.size());
    parallel_for(pts.size(), req.jobs, [&](std::size_t k) {
        const auto& p = pts[k];
        out[k] = PairAmplitude(props[p.config_index], p.w1, p.w2, req.method, req.integration).intensity();
    });
    return out;
}

inline void apply_normalization(SpectrumGrid& grid, const ArrayConfig& config, const std::vector<PointSpec>& pts,
                                const IntensityRequest& req) {
    if (!req.normalize) return;
    ArrayConfig single = config.with_n(1);
    std::vector<PointSpec> ref = pts;
    for (auto& p : ref) p.config_index = 0;
    const auto iref = evaluate({single}, ref, req);
    const double peak = *std::max_element(iref.begin(), iref.end());
    if (!(peak > 0.0)) throw NumericalError("normalization: single-qubit reference intensity vanishes");
    for (auto& v : grid.values) v /= peak;
    grid.normalization = "divided by the maximum single-qubit intensity over the same grid";
    grid.normalization_value = peak;
}

}  // namespace scattering_detail

// Cut at fixed w2 - w1 = delta_w along the pair energy eps: w1,2 = eps -+ delta_w/2.
inline SpectrumGrid intensity_cut(const ArrayConfig& config, const std::vector<double>& eps_values,
                                  double delta_w, const IntensityRequest& req = {}) {
    scattering_detail::check_cap(eps_values.size(), req.grid_cap);
    std::vector<scattering_detail::PointSpec> pts;
    for (double e : eps_values) pts.push_back({0, e - 0.5 * delta_w, e + 0.5 * delta_w});
    SpectrumGrid g;
    g.quantity = "forward_intensity";
    g.axes = {{"eps", "gamma0", eps_values}};
    g.values = scattering_detail::evaluate({config}, pts, req);
    scattering_detail::apply_normalization(g, config, pts, req);
    return g;
}

inline SpectrumGrid intensity_map_w1w2(const ArrayConfig& config, const std::vector<double>& w1_values,
                                       const std::vector<double>& w2_values, const IntensityRequest& req = {}) {
    scattering_detail::check_cap(w1_values.size() * w2_values.size(), req.grid_cap);
    std::vector<scattering_detail::PointSpec> pts;
    for (double a : w1_values)
        for (double b : w2_values) pts.push_back({0, a, b});
    SpectrumGrid g;
    g.quantity = "forward_intensity";
    g.axes = {{"w1", "gamma0", w1_values}, {"w2", "gamma0", w2_values}};
    g.values = scattering_detail::evaluate({config}, pts, req);
    scattering_detail::apply_normalization(g, config, pts, req);
    return g;
}

// (phi, eps) map at fixed w2 - w1 = delta_w.
inline SpectrumGrid intensity_map_phi_eps(const ArrayConfig& config, const std::vector<double>& phi_values,
                                          const std::vector<double>& eps_values, double delta_w,
                                          const IntensityRequest& req = {}) {
    scattering_detail::check_cap(phi_values.size() * eps_values.size(), req.grid_cap);
    if (config.positions) throw ConfigError("phi sweep requires a periodic array");
    std::vector<ArrayConfig> configs;
    for (double p : phi_values) configs.push_back(ArrayConfig::periodic(config.n_qubits, p, config.chi, config.gamma0));
    std::vector<scattering_detail::PointSpec> pts;
    for (std::size_t ip = 0; ip < phi_values.size(); ++ip)
        for (double e : eps_values) pts.push_back({ip, e - 0.5 * delta_w, e + 0.5 * delta_w});
    SpectrumGrid g;
    g.quantity = "forward_intensity";
    g.axes = {{"phi", "rad", phi_values}, {"eps", "gamma0", eps_values}};
    g.values = scattering_detail::evaluate(configs, pts, req);
    scattering_detail::apply_normalization(g, config, pts, req);
    return g;
}

struct SpatialGrid {
    double lower = 0.0;
    double upper = 50.0;
    std::size_t points = 201;
};

// |S(x,y)|^2 with S(x,y) = int M~(w', 2 eps - w') exp(i w' (x - y)) dw' (c = 1,
// lengths in c/gamma0). Up to a global phase S depends on |x - y| only.
inline SpectrumGrid spatial_wavefunction(const ArrayConfig& config, double w1, double w2,
                                         const SpatialGrid& xy = {}, QMethod method = QMethod::markovian_closed_form,
                                         unsigned jobs = 1) {
    if (!(xy.lower >= 0.0) || !(xy.upper > xy.lower) || xy.points < 2)
        throw ConfigError("spatial grid must satisfy 0 <= lower < upper with >= 2 points");
    scattering_detail::check_cap(xy.points * xy.points, kDefaultGridCap);
    const PairAmplitude amp(config, w1, w2, method);
    const auto xs = linspace(xy.lower, xy.upper, xy.points);
    // |x - y| takes values k * h on a uniform grid.
    const double h = xs[1] - xs[0];
    std::vector<double> lag(xy.points);
    parallel_for(xy.points, jobs, [&](std::size_t k) { lag[k] = std::norm(amp.fourier(h * static_cast<double>(k))); });
    SpectrumGrid g;
    g.quantity = "pair_density";
    g.axes = {{"x", "c/gamma0", xs}, {"y", "c/gamma0", xs}};
    g.values.resize(xy.points * xy.points);
    for (std::size_t i = 0; i < xy.points; ++i)
        for (std::size_t j = 0; j < xy.points; ++j)
            g.values[i * xy.points + j] = lag[i > j ? i - j : j - i];
    return g;
}

}  // namespace wgqed
