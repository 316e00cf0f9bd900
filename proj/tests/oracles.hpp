#pragma once

// Independent reference computations and seeded generators shared by the tests.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "wgqed/scattering.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }
    cplx gaussian_c() {
        std::normal_distribution<double> g;
        return {g(gen_), g(gen_)};
    }
    Mat matrix(Eigen::Index n, Eigen::Index m) {
        Mat a(n, m);
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index i = 0; i < n; ++i) a(i, j) = gaussian_c();
        return a;
    }
    Mat unitary(Eigen::Index n) {
        Eigen::HouseholderQR<Mat> qr(matrix(n, n));
        return qr.householderQ();
    }

private:
    std::mt19937_64 gen_;
};

// Characteristic polynomial by the Faddeev-LeVerrier recursion, roots by
// Durand-Kerner iteration followed by Newton polishing.
inline std::vector<cplx> char_poly(const Mat& a) {
    const auto n = a.rows();
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1);  // c[k] multiplies x^(n-k)
    c[0] = 1.0;
    Mat m = Mat::Zero(n, n);
    const Mat id = Mat::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + c[static_cast<std::size_t>(k - 1)] * id;
        c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
    }
    return c;
}

inline cplx poly_eval(const std::vector<cplx>& c, cplx x) {
    cplx v = 0.0;
    for (const auto& ck : c) v = v * x + ck;
    return v;
}

inline cplx poly_deriv(const std::vector<cplx>& c, cplx x) {
    const auto n = c.size() - 1;
    cplx v = 0.0;
    for (std::size_t k = 0; k < n; ++k) v = v * x + c[k] * static_cast<double>(n - k);
    return v;
}

inline std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
    const std::size_t n = c.size() - 1;
    double radius = 0.0;
    for (std::size_t k = 1; k <= n; ++k) radius = std::max(radius, std::pow(std::abs(c[k]), 1.0 / k));
    radius = 2.0 * radius + 1.0;
    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(radius, 0.4 + 2.0 * std::numbers::pi * k / n);
    for (int it = 0; it < 5000; ++it) {
        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cplx den = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) den *= z[k] - z[j];
            const cplx step = poly_eval(c, z[k]) / den;
            z[k] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change < 1e-15) break;
    }
    for (auto& r : z)
        for (int it = 0; it < 5; ++it) {
            const cplx d = poly_deriv(c, r);
            if (std::abs(d) < 1e-200) break;
            r -= poly_eval(c, r) / d;
        }
    return z;
}

// Largest distance from any element of `a` to its nearest element of `b`.
inline double multiset_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        double best = 1e300;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            if (used[k]) continue;
            const double d = std::abs(x - b[k]);
            if (d < best) {
                best = d;
                arg = k;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

// Symmetric ordered-pair isometry: basis state -> vector in C^{N^2}.
inline Mat pair_isometry(const wgqed::BasisDescriptor& basis, int n) {
    Mat p = Mat::Zero(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(basis.dimension()));
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t r = 0; r < basis.dimension(); ++r) {
        const int a = basis.state(r)[0];
        const int b = basis.state(r)[1];
        const auto col = static_cast<Eigen::Index>(r);
        if (a == b) {
            p(a * n + a, col) = 1.0;
        } else {
            p(a * n + b, col) = s;
            p(b * n + a, col) = s;
        }
    }
    return p;
}

// Exact forward intensity for a fixed pair by residues. The on-shell
// amplitude F(u) = M~(eps+u, eps-u) is a sum of simple poles
//   F(u) = sum_m a_m/(u - p_m) + sum_n b_n/(u - q_n),  p = l - eps, q = eps - l,
// and I = (1/2) int |F|^2 du / 2pi is evaluated pairwise by contour integration.
inline double residue_intensity(const wgqed::ArrayConfig& config, double w1, double w2) {
    const double eps = 0.5 * (w1 + w2);
    const Mat h = wgqed::single_excitation_matrix(config);
    Eigen::ComplexEigenSolver<Mat> es(h);
    const Vec lam = es.eigenvalues();
    const Mat v = es.eigenvectors();
    const Mat w = v.inverse();
    const int n = config.n_qubits;
    Vec ep(n), em(n);
    for (int j = 0; j < n; ++j) {
        ep(j) = std::polar(1.0, config.position(j));
        em(j) = std::conj(ep(j));
    }
    auto s_in = [&](double x) -> Vec { return (x * Mat::Identity(n, n) - h).inverse() * ep; };
    const Mat q = wgqed::q_matrix(config, eps).q;
    const Vec a = (-2.0 * cplx(0, 1) * config.gamma0 * config.gamma0) * (q * s_in(w1).cwiseProduct(s_in(w2)));
    const Mat r = v * (w * em).asDiagonal();
    std::vector<cplx> poles, coef;
    Mat c(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            c(m, k) = (a.array() * r.col(m).array() * r.col(k).array()).sum() / (2.0 * eps - lam(m) - lam(k));
    for (int m = 0; m < n; ++m) {
        poles.push_back(lam(m) - eps);
        coef.push_back(c.row(m).sum());
    }
    for (int k = 0; k < n; ++k) {
        poles.push_back(eps - lam(k));
        coef.push_back(-c.col(k).sum());
    }
    const cplx two_pi_i(0, 2.0 * std::numbers::pi);
    cplx total = 0.0;
    for (std::size_t i = 0; i < poles.size(); ++i)
        for (std::size_t j = 0; j < poles.size(); ++j) {
            const cplx u = poles[i];
            const cplx vv = std::conj(poles[j]);
            const cplx ab = coef[i] * std::conj(coef[j]);
            if (u.imag() > 0 && vv.imag() < 0) total += ab * two_pi_i / (u - vv);
            else if (vv.imag() > 0 && u.imag() < 0) total += ab * two_pi_i / (vv - u);
        }
    return 0.5 * total.real() / (2.0 * std::numbers::pi);
}

// Single-qubit closed forms, gamma0 = 1 and h = -i.
inline cplx n1_sigma(double eps) { return cplx(0, 1) / (2.0 * cplx(0, -1) - 2.0 * eps); }
inline cplx n1_q(double eps, double chi) {
    const cplx i(0, 1);
    return -i * chi / (1.0 - i * chi * n1_sigma(eps));
}

}  // namespace oracle
