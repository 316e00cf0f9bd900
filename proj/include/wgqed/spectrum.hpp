#pragma once

// Eigenmodes of the 1-, 2- and M-excitation sectors, radiative transition
// amplitudes, classification of double-excited states, decay-rate threshold
// maps, the fermionic ansatz and branching ratios.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wgqed/errors.hpp"
#include "wgqed/linalg.hpp"
#include "wgqed/model.hpp"
#include "wgqed/parallel.hpp"

namespace wgqed {

struct SingleMode {
    cplx energy;              // detuning from omega0
    ComplexVector amplitudes; // c_j, unit norm
    double decay_rate = 0.0;  // Gamma10 = -Im energy
};

enum class ModeClass { superradiant, twilight, subradiant };

inline std::string to_string(ModeClass c) {
    switch (c) {
        case ModeClass::superradiant: return "superradiant";
        case ModeClass::twilight: return "twilight";
        case ModeClass::subradiant: return "subradiant";
    }
    return "unknown";
}

// Boundaries on S = sum_j |d_j|^2. At phi -> 0 the three families sit at
// S = 0 (subradiant), (N-2)/2 (twilight) and N-1 (superradiant); the defaults
// split those gaps.
struct ClassificationThresholds {
    double subradiant_fraction = 0.25;   // subradiant iff S < fraction * (N - 2)
    double superradiant_fraction = 0.5;  // superradiant iff S > fraction * N
    double coherence_ratio = 0.1;        // score only: |sum d|^2 < ratio * N * S

    void validate() const {
        if (!(subradiant_fraction > 0.0) || !(superradiant_fraction > 0.0) || !(coherence_ratio > 0.0))
            throw ConfigError("classification thresholds must be positive");
    }
};

struct DoubleMode {
    cplx energy;             // per-photon eigenvalue: total energy is 2 * energy
    ComplexMatrix psi;       // symmetric, unit Frobenius norm
    ComplexVector d;         // transition amplitudes
    double gamma21 = 0.0;    // gamma0 * sum |d_j|^2
    double sum_abs_d2 = 0.0;
    double abs_sum_d2 = 0.0;
    bool incoherent_remainder = false;  // |sum d|^2 < ratio * N * sum |d|^2
    ModeClass label = ModeClass::twilight;
};

inline std::vector<SingleMode> single_modes(const ArrayConfig& config) {
    const auto h = build_h1(config);
    const auto dec = eig(h.matrix);
    std::vector<SingleMode> out;
    for (Eigen::Index k = dec.values.size() - 1; k >= 0; --k)
        out.push_back({dec.values(k), dec.vectors.col(k), -dec.values(k).imag()});
    return out;
}

// d_j = sum_j' exp(i x_j') Psi_{j j'}
inline ComplexVector transition_amplitudes(const ComplexMatrix& psi, const ArrayConfig& config) {
    if (psi.rows() != config.n_qubits || psi.cols() != config.n_qubits)
        throw ConfigError("transition_amplitudes: Psi must be N x N");
    return psi * config.phases(+1);
}

// gamma0 * Re sum_{j,m,m'} Psi_jm conj(Psi_jm') exp(i |x_m - x_m'|)
inline double decay_rate_from_psi(const ComplexMatrix& psi, const ArrayConfig& config) {
    if (psi.rows() != config.n_qubits || psi.cols() != config.n_qubits)
        throw ConfigError("decay_rate_from_psi: Psi must be N x N");
    const int n = config.n_qubits;
    ComplexMatrix e(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) e(m, k) = std::polar(1.0, config.separation(m, k));
    return config.gamma0 * (psi * e * psi.adjoint()).trace().real();
}

inline ModeClass classify(const DoubleMode& mode, const ArrayConfig& config,
                          const ClassificationThresholds& t = {}) {
    const double n = config.n_qubits;
    if (mode.sum_abs_d2 < t.subradiant_fraction * (n - 2.0)) return ModeClass::subradiant;
    if (mode.sum_abs_d2 > t.superradiant_fraction * n) return ModeClass::superradiant;
    return ModeClass::twilight;
}

// All symmetric two-excitation modes, most subradiant first. For finite chi
// only the branch near 2*omega0 (|Re E_total| < chi/2) is returned; the
// doubly occupied branch near chi is excluded.
inline std::vector<DoubleMode> double_modes(const ArrayConfig& config,
                                            const ClassificationThresholds& thresholds = {}) {
    thresholds.validate();
    if (config.hard_core() && config.n_qubits < 2)
        throw ConfigError("double_modes: hard-core sector requires N >= 2");
    const auto h = build_h2(config);
    const auto dec = eig(h.matrix);
    std::vector<DoubleMode> out;
    for (Eigen::Index k = dec.values.size() - 1; k >= 0; --k) {
        const cplx total = dec.values(k);
        if (!config.hard_core() && !(std::abs(total.real()) < 0.5 * config.chi)) continue;
        DoubleMode m;
        m.energy = 0.5 * total;
        m.psi = pair_amplitudes(dec.vectors.col(k), h.basis, config.n_qubits);
        m.d = transition_amplitudes(m.psi, config);
        m.sum_abs_d2 = m.d.squaredNorm();
        m.abs_sum_d2 = std::norm(m.d.sum());
        m.gamma21 = config.gamma0 * m.sum_abs_d2;
        m.incoherent_remainder =
            m.abs_sum_d2 < thresholds.coherence_ratio * config.n_qubits * m.sum_abs_d2;
        m.label = classify(m, config, thresholds);
        out.push_back(std::move(m));
    }
    return out;
}

struct Census {
    int superradiant = 0;
    int twilight = 0;
    int subradiant = 0;
};

inline Census census(const std::vector<DoubleMode>& modes) {
    Census c;
    for (const auto& m : modes) {
        switch (m.label) {
            case ModeClass::superradiant: ++c.superradiant; break;
            case ModeClass::twilight: ++c.twilight; break;
            case ModeClass::subradiant: ++c.subradiant; break;
        }
    }
    return c;
}

// Eigenvalues (total energies) of the M-excitation sector, most subradiant last.
inline ComplexVector sector_energies(const ArrayConfig& config, int m) {
    return eig(build_hm(config, m).matrix).values;
}

inline constexpr double kMaxSectorDimension = 5000.0;

// Minimal per-excitation first-order decay rate min_nu (-Im E_nu)/M of the
// hard-core M-excitation sector.
inline double min_sector_rate(const ArrayConfig& config, int m) {
    if (binomial(config.n_qubits, m) > kMaxSectorDimension)
        throw ConfigError("sector dimension C(" + std::to_string(config.n_qubits) + "," +
                          std::to_string(m) + ") exceeds the guard of 5000");
    const ComplexVector e = sector_energies(config.with_hard_core(), m);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < e.size(); ++k) best = std::min(best, -e(k).imag() / m);
    if (best < -1e-10 * config.gamma0) throw NumericalError("sector has a gaining mode");
    return std::max(best, 0.0);
}

struct ThresholdMap {
    std::vector<int> n_values;
    std::vector<int> m_values;
    // rate[im][in]; NaN where M > N (undefined cell)
    std::vector<std::vector<double>> rate;
    double threshold = 0.0;  // phi^2 gamma0

    bool defined(std::size_t im, std::size_t in) const { return !std::isnan(rate[im][in]); }
    bool below(std::size_t im, std::size_t in) const {
        return defined(im, in) && rate[im][in] < threshold;
    }
    // Smallest N with a rate below threshold for the given M row, or -1.
    int boundary(std::size_t im) const {
        for (std::size_t in = 0; in < n_values.size(); ++in)
            if (below(im, in)) return n_values[in];
        return -1;
    }
};

inline ThresholdMap min_decay_map(const std::vector<int>& n_values, const std::vector<int>& m_values,
                                  const ArrayConfig& config, unsigned jobs = 1) {
    for (int n : n_values)
        if (n < 1) throw ConfigError("threshold map: N values must be >= 1");
    for (int m : m_values)
        if (m < 1) throw ConfigError("threshold map: M values must be >= 1");
    for (int n : n_values)
        for (int m : m_values)
            if (m <= n && binomial(n, m) > kMaxSectorDimension)
                throw ConfigError("threshold map: sector C(" + std::to_string(n) + "," +
                                  std::to_string(m) + ") exceeds the guard of 5000");
    ThresholdMap map;
    map.n_values = n_values;
    map.m_values = m_values;
    map.threshold = config.phi * config.phi * config.gamma0;
    map.rate.assign(m_values.size(),
                    std::vector<double>(n_values.size(), std::numeric_limits<double>::quiet_NaN()));
    const std::size_t cells = m_values.size() * n_values.size();
    parallel_for(cells, jobs, [&](std::size_t c) {
        const std::size_t im = c / n_values.size();
        const std::size_t in = c % n_values.size();
        const int m = m_values[im];
        const int n = n_values[in];
        if (m > n) return;
        map.rate[im][in] = min_sector_rate(config.with_n(n), m);
    });
    return map;
}

// Psi_{j1 j2} = sgn(j1 - j2)(a_j1 b_j2 - b_j1 a_j2), normalized.
inline ComplexMatrix fermionic_ansatz(const SingleMode& a, const SingleMode& b) {
    const auto n = a.amplitudes.size();
    if (b.amplitudes.size() != n) throw ConfigError("fermionic_ansatz: mode sizes differ");
    ComplexMatrix psi = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double sgn = i > j ? 1.0 : -1.0;
            psi(i, j) = sgn * (a.amplitudes(i) * b.amplitudes(j) - b.amplitudes(i) * a.amplitudes(j));
        }
    const double norm = psi.norm();
    if (!(norm > 1e-12)) throw ConfigError("fermionic_ansatz: modes are not distinct");
    return psi / norm;
}

// |<A|B>| / (|A| |B|) with the Frobenius inner product.
inline double overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("overlap: shape mismatch");
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw ConfigError("overlap: zero matrix");
    return std::abs((a.conjugate().cwiseProduct(b)).sum()) / (na * nb);
}

// Norm of the projection of A onto span(subspace), relative to |A|.
inline double subspace_overlap(const ComplexMatrix& a, const std::vector<ComplexMatrix>& subspace) {
    if (subspace.empty()) throw ConfigError("subspace_overlap: empty subspace");
    const Eigen::Index len = a.size();
    ComplexMatrix basis(len, static_cast<Eigen::Index>(subspace.size()));
    for (std::size_t k = 0; k < subspace.size(); ++k) {
        if (subspace[k].rows() != a.rows() || subspace[k].cols() != a.cols())
            throw ConfigError("subspace_overlap: shape mismatch");
        basis.col(static_cast<Eigen::Index>(k)) = subspace[k].reshaped();
    }
    Eigen::ColPivHouseholderQR<ComplexMatrix> qr(basis);
    const Eigen::Index rank = qr.rank();
    const ComplexMatrix q = ComplexMatrix(qr.householderQ()).leftCols(rank);
    const ComplexVector v = a.reshaped();
    if (!(v.norm() > 0.0)) throw ConfigError("subspace_overlap: zero matrix");
    return (q.adjoint() * v).norm() / v.norm();
}

// D_mu = |<d|c_mu>|^2 / sum_j |d_j|^2 for each single mode mu. The raw sum is
// reported; single modes are not orthogonal for phi > 0, so it differs from 1
// at O(phi).
inline std::vector<double> branching_ratios(const DoubleMode& mode, const std::vector<SingleMode>& singles) {
    const double s = mode.d.squaredNorm();
    if (!(s > 1e-28)) throw NumericalError("branching_ratios: mode is dark, branching undefined");
    std::vector<double> out;
    out.reserve(singles.size());
    for (const auto& mu : singles) {
        if (mu.amplitudes.size() != mode.d.size())
            throw ConfigError("branching_ratios: single modes belong to a different array");
        out.push_back(std::norm(mode.d.dot(mu.amplitudes)) / s);
    }
    return out;
}

struct N4Benchmarks {
    cplx eps1;                  // per-photon detunings of the two subradiant pairs
    cplx eps2;
    std::vector<cplx> single_dark;
    ComplexMatrix psi1;         // small-phi patterns of the subradiant pairs
    ComplexMatrix psi2;
};

// Leading-order (phi << 1) closed forms for N = 4, gamma0 = 1.
inline N4Benchmarks n4_asymptotics(double phi) {
    if (!(phi >= 0.0) || !(phi < 0.3)) throw ConfigError("n4_asymptotics: requires 0 <= phi < 0.3");
    const double p2 = phi * phi;
    N4Benchmarks b;
    b.eps1 = {-phi, -p2 / 2.0};
    b.eps2 = {-7.0 * phi / 3.0, -157.0 * p2 / 54.0};
    b.single_dark = {{-phi, -p2 / 4.0}, {-0.59 * phi, -0.025 * p2}, {-3.4 * phi, -5.0 * p2}};
    b.psi1.resize(4, 4);
    b.psi1 << 0, 0, 1, -1,
              0, 0, -1, 1,
              1, -1, 0, 0,
              -1, 1, 0, 0;
    b.psi1 *= std::sqrt(2.0) / 4.0;
    b.psi2.resize(4, 4);
    b.psi2 << 0, -2, 1, 1,
              -2, 0, 1, 1,
              1, 1, 0, -2,
              1, 1, -2, 0;
    b.psi2 *= std::sqrt(6.0) / 12.0;
    return b;
}

}  // namespace wgqed
