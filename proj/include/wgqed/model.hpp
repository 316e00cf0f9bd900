#pragma once

// Physical parameters of a qubit array in a waveguide and the effective
// non-Hermitian Hamiltonians of its 1-, 2- and M-excitation sectors.
//
// Energies are detunings from M*omega0 in units where gamma0 carries the
// scale; phases are Markovian (evaluated at omega0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgqed/errors.hpp"
#include "wgqed/linalg.hpp"

namespace wgqed {

inline constexpr double kHardCore = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultChi = 1e4;

struct ArrayConfig {
    int n_qubits = 1;
    double phi = 0.0;      // omega0 * spacing / c
    double chi = kDefaultChi;  // anharmonicity; kHardCore for two-level qubits
    double gamma0 = 1.0;
    std::optional<std::vector<double>> positions;  // omega0 z_j / c, overrides periodic placement

    static ArrayConfig periodic(int n, double phi, double chi = kDefaultChi, double gamma0 = 1.0) {
        ArrayConfig c;
        c.n_qubits = n;
        c.phi = phi;
        c.chi = chi;
        c.gamma0 = gamma0;
        c.validate();
        return c;
    }

    bool hard_core() const noexcept { return std::isinf(chi); }

    ArrayConfig with_hard_core() const {
        ArrayConfig c = *this;
        c.chi = kHardCore;
        return c;
    }

    ArrayConfig with_n(int n) const {
        ArrayConfig c = *this;
        c.n_qubits = n;
        c.positions.reset();
        return c;
    }

    void validate() const {
        if (n_qubits < 1) throw ConfigError("n_qubits must be >= 1");
        if (!(phi >= 0.0) || !std::isfinite(phi)) throw ConfigError("phi must be finite and >= 0");
        if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw ConfigError("gamma0 must be finite and > 0");
        if (!(chi > 0.0)) throw ConfigError("chi must be > 0 or infinite");
        if (positions) {
            if (static_cast<int>(positions->size()) != n_qubits)
                throw ConfigError("positions length must equal n_qubits");
            for (std::size_t j = 0; j < positions->size(); ++j) {
                if (!std::isfinite((*positions)[j])) throw ConfigError("positions must be finite");
                if (j > 0 && (*positions)[j] < (*positions)[j - 1])
                    throw ConfigError("positions must be non-decreasing");
            }
        }
    }

    // Dimensionless position omega0 z_j / c, z_1 = 0 for periodic arrays.
    double position(int j) const {
        return positions ? (*positions)[static_cast<std::size_t>(j)] : phi * j;
    }

    double separation(int i, int j) const { return std::abs(position(i) - position(j)); }

    // e^{sign * i x_j}; sign=+1 for incoming (forward) photons, -1 for outgoing.
    ComplexVector phases(int sign) const {
        ComplexVector e(n_qubits);
        for (int j = 0; j < n_qubits; ++j) e(j) = std::polar(1.0, sign * position(j));
        return e;
    }
};

enum class BasisMode { hard_core, soft_core };

// Symmetric (bosonic) basis of one excitation sector. States are sorted qubit
// tuples j1 <= j2 <= ... enumerated lexicographically.
class BasisDescriptor {
public:
    using State = std::vector<int>;

    static BasisDescriptor hard_core(int n, int m) {
        if (m < 1 || m > n) throw ConfigError("hard-core sector requires 1 <= m <= n");
        BasisDescriptor b(m, BasisMode::hard_core);
        State s(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) s[static_cast<std::size_t>(k)] = k;
        while (true) {
            b.add(s);
            int k = m - 1;
            while (k >= 0 && s[static_cast<std::size_t>(k)] == n - m + k) --k;
            if (k < 0) break;
            ++s[static_cast<std::size_t>(k)];
            for (int r = k + 1; r < m; ++r)
                s[static_cast<std::size_t>(r)] = s[static_cast<std::size_t>(r - 1)] + 1;
        }
        return b;
    }

    // Two excitations with double occupation allowed: N(N+1)/2 states.
    static BasisDescriptor soft_core_pairs(int n) {
        if (n < 1) throw ConfigError("soft-core pair basis requires n >= 1");
        BasisDescriptor b(2, BasisMode::soft_core);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) b.add({i, j});
        return b;
    }

    int sector() const noexcept { return sector_; }
    BasisMode mode() const noexcept { return mode_; }
    std::size_t dimension() const noexcept { return states_.size(); }
    const State& state(std::size_t row) const { return states_.at(row); }
    const std::vector<State>& states() const noexcept { return states_; }

    std::optional<std::size_t> index_of(const State& s) const {
        auto it = index_.find(s);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    BasisDescriptor(int m, BasisMode mode) : sector_(m), mode_(mode) {}

    void add(State s) {
        index_.emplace(s, states_.size());
        states_.push_back(std::move(s));
    }

    int sector_;
    BasisMode mode_;
    std::vector<State> states_;
    std::map<State, std::size_t> index_;
};

struct EffectiveHamiltonian {
    ComplexMatrix matrix;
    BasisDescriptor basis;
    ArrayConfig config;
};

// Binomial coefficient with saturation, used for basis-size guards.
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

// Single-excitation hopping matrix, detuning convention:
// H_ij = -i gamma0 exp(i |x_i - x_j|).
inline ComplexMatrix single_excitation_matrix(const ArrayConfig& config) {
    config.validate();
    const int n = config.n_qubits;
    ComplexMatrix h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            h(i, j) = -I_unit * config.gamma0 * std::polar(1.0, config.separation(i, j));
    return h;
}

inline EffectiveHamiltonian build_h1(const ArrayConfig& config) {
    return {single_excitation_matrix(config), BasisDescriptor::hard_core(config.n_qubits, 1), config};
}

namespace detail {

// Hard-core M-excitation matrix: one hop per differing excitation, diagonal
// accumulates one self term per excitation.
inline ComplexMatrix hard_core_sector(const ComplexMatrix& h1, const BasisDescriptor& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    const int n = static_cast<int>(h1.rows());
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    std::vector<char> occupied(static_cast<std::size_t>(n));
    for (std::size_t col = 0; col < basis.dimension(); ++col) {
        const auto& s = basis.state(col);
        std::fill(occupied.begin(), occupied.end(), 0);
        for (int q : s) occupied[static_cast<std::size_t>(q)] = 1;
        for (std::size_t p = 0; p < s.size(); ++p) {
            const int from = s[p];
            h(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col)) += h1(from, from);
            for (int to = 0; to < n; ++to) {
                if (occupied[static_cast<std::size_t>(to)]) continue;
                auto t = s;
                t[p] = to;
                std::sort(t.begin(), t.end());
                const auto row = basis.index_of(t);
                h(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) += h1(to, from);
            }
        }
    }
    return h;
}

// Soft-core two-excitation matrix on normalized bosonic states
// |ij> = b_i^+ b_j^+ |0> (i<j) and |jj> = (b_j^+)^2/sqrt2 |0>.
inline ComplexMatrix soft_core_pairs(const ComplexMatrix& h1, const BasisDescriptor& basis, double chi) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    const int n = static_cast<int>(h1.rows());
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    const double sqrt2 = std::sqrt(2.0);
    // Weight of a normalized state: 1 for i<j, 1/sqrt2 for doubly occupied.
    auto amp = [&](int a, int b) { return a == b ? 1.0 / sqrt2 : 1.0; };
    for (std::size_t col = 0; col < basis.dimension(); ++col) {
        const int a = basis.state(col)[0];
        const int b = basis.state(col)[1];
        // Unnormalized action of sum_kl H_kl b_k^+ b_l on b_a^+ b_b^+ |0>, then
        // re-expressed in the normalized basis.
        const double in = amp(a, b);
        for (int k = 0; k < n; ++k) {
            for (int hop = 0; hop < 2; ++hop) {
                const int moved = hop == 0 ? a : b;
                const int spectator = hop == 0 ? b : a;
                const int lo = std::min(k, spectator);
                const int hi = std::max(k, spectator);
                const auto row = *basis.index_of({lo, hi});
                // b_k^+ b_spectator^+ |0> = |lo hi> / amp(lo, hi)
                h(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) +=
                    in * h1(k, moved) / amp(lo, hi);
            }
        }
        if (a == b) h(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(col)) += chi;
    }
    return h;
}

}  // namespace detail

// Two-excitation sector H2 + U on the symmetric basis: soft-core with +chi on
// doubly occupied states for finite chi, hard-core (dimension N(N-1)/2) for
// infinite chi.
inline EffectiveHamiltonian build_h2(const ArrayConfig& config) {
    config.validate();
    const ComplexMatrix h1 = single_excitation_matrix(config);
    if (config.hard_core()) {
        if (config.n_qubits < 2) throw ConfigError("hard-core two-excitation sector requires N >= 2");
        auto basis = BasisDescriptor::hard_core(config.n_qubits, 2);
        ComplexMatrix h = detail::hard_core_sector(h1, basis);
        return {std::move(h), std::move(basis), config};
    }
    auto basis = BasisDescriptor::soft_core_pairs(config.n_qubits);
    ComplexMatrix h = detail::soft_core_pairs(h1, basis, config.chi);
    return {std::move(h), std::move(basis), config};
}

// M-excitation sector. Hard-core configs use the hard-core basis for every m;
// finite chi is supported for m <= 2 only.
inline EffectiveHamiltonian build_hm(const ArrayConfig& config, int m) {
    config.validate();
    if (m < 1) throw ConfigError("excitation count must be >= 1");
    if (m == 1) return build_h1(config);
    if (!config.hard_core()) {
        if (m == 2) return build_h2(config);
        throw ConfigError("finite-chi sectors are only provided for m <= 2");
    }
    if (m > config.n_qubits) throw ConfigError("hard-core sector requires m <= n_qubits");
    auto basis = BasisDescriptor::hard_core(config.n_qubits, m);
    ComplexMatrix h = detail::hard_core_sector(single_excitation_matrix(config), basis);
    return {std::move(h), std::move(basis), config};
}

// Full ordered-pair operator H (x) 1 + 1 (x) H (+ U when requested and chi is
// finite) on the N^2-dimensional space, row index i1*N + i2.
inline ComplexMatrix two_particle_operator(const ArrayConfig& config, bool with_interaction) {
    const ComplexMatrix h1 = single_excitation_matrix(config);
    const int n = config.n_qubits;
    const auto nn = static_cast<Eigen::Index>(n) * n;
    ComplexMatrix k = ComplexMatrix::Zero(nn, nn);
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int j = 0; j < n; ++j) {
                k(i1 * n + i2, j * n + i2) += h1(i1, j);
                k(i1 * n + i2, i1 * n + j) += h1(i2, j);
            }
    if (with_interaction) {
        if (config.hard_core()) throw ConfigError("interaction term requires finite chi");
        for (int i = 0; i < n; ++i) k(i * n + i, i * n + i) += config.chi;
    }
    return k;
}

// Dissipator D with H = Hermitian part - i D; for H1 this is gamma0 cos|x_i - x_j|.
inline ComplexMatrix dissipator(const ComplexMatrix& h) {
    return -(h - h.adjoint()) / (2.0 * I_unit);
}

// Symmetric amplitude matrix Psi_{j1 j2} (unit Frobenius norm when the basis
// vector is normalized) from a two-excitation basis vector.
inline ComplexMatrix pair_amplitudes(const ComplexVector& v, const BasisDescriptor& basis, int n) {
    if (basis.sector() != 2) throw ConfigError("pair_amplitudes requires a two-excitation basis");
    if (static_cast<std::size_t>(v.size()) != basis.dimension())
        throw ConfigError("pair_amplitudes: vector length does not match basis");
    ComplexMatrix psi = ComplexMatrix::Zero(n, n);
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t r = 0; r < basis.dimension(); ++r) {
        const int a = basis.state(r)[0];
        const int b = basis.state(r)[1];
        const auto idx = static_cast<Eigen::Index>(r);
        if (a == b) {
            psi(a, a) = v(idx);
        } else {
            psi(a, b) = v(idx) * s;
            psi(b, a) = v(idx) * s;
        }
    }
    return psi;
}

}  // namespace wgqed
