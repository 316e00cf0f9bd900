#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature with resonance-aware
// breakpoints. Integrands return a complex scalar, a real scalar, or an Eigen
// dense vector/matrix of fixed shape.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wgqed/errors.hpp"

namespace wgqed {

struct QuadratureSpec {
    double lower = -1.0;
    double upper = 1.0;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    // Complex resonance positions. Re(pole) is always a breakpoint; further
    // breakpoints at Re(pole) +- |Im(pole)| * 4^k resolve the Lorentzian core.
    std::vector<std::complex<double>> pole_hints;
    // Adds the integral of C/(w - mid)^2 beyond each end, C matched to f there.
    bool tail_model = false;
    std::size_t max_evaluations = 4'000'000;

    void validate() const {
        if (!std::isfinite(lower) || !std::isfinite(upper) || !(upper > lower))
            throw ConfigError("quadrature: interval must be finite with upper > lower");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw ConfigError("quadrature: tolerances must be positive");
    }
};

template <class T>
struct QuadratureResult {
    T value;
    double error = 0.0;
    std::size_t evaluations = 0;
};

namespace quad_detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double magnitude(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return std::abs(v);
    } else if constexpr (std::is_same_v<T, std::complex<double>>) {
        return std::abs(v);
    } else {
        return v.norm();
    }
}

template <class T>
std::complex<double> summary(const T& v) {
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, std::complex<double>>) {
        return std::complex<double>(v);
    } else {
        return v.size() > 0 ? std::complex<double>(v(0)) : std::complex<double>{};
    }
}

template <class T>
T zero_like(const T& v) {
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, std::complex<double>>) {
        return T{};
    } else {
        return T::Zero(v.rows(), v.cols());
    }
}

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F, class T>
Segment<T> kronrod(F& f, double a, double b, std::size_t& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fc = f(c);
    T k = fc * kWgk[7];
    T g = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[static_cast<std::size_t>(j)];
        T f1 = f(c - dx);
        T f2 = f(c + dx);
        T s = f1 + f2;
        k = k + s * kWgk[static_cast<std::size_t>(j)];
        if (j % 2 == 1) g = g + s * kWg[static_cast<std::size_t>(j / 2)];
    }
    evals += 15;
    T kv = k * h;
    T gv = g * h;
    return {a, b, kv, magnitude<T>(kv - gv)};
}

inline std::vector<double> breakpoints(const QuadratureSpec& spec) {
    std::vector<double> pts = {spec.lower, spec.upper};
    const double span = spec.upper - spec.lower;
    for (const auto& p : spec.pole_hints) {
        const double x0 = p.real();
        const double w = std::abs(p.imag());
        if (!std::isfinite(x0)) continue;
        auto add = [&](double x) {
            if (x > spec.lower && x < spec.upper) pts.push_back(x);
        };
        add(x0);
        if (w > 0.0 && std::isfinite(w)) {
            for (double s = w; s < span; s *= 4.0) {
                add(x0 - s);
                add(x0 + s);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double x : pts) {
        if (out.empty() || x - out.back() > 1e-13 * std::max(1.0, std::abs(x))) out.push_back(x);
    }
    if (out.back() != spec.upper) out.back() = spec.upper;
    return out;
}

}  // namespace quad_detail

template <class F>
auto integrate(F&& f, const QuadratureSpec& spec)
    -> QuadratureResult<std::decay_t<decltype(f(0.0))>> {
    using T = std::decay_t<decltype(f(0.0))>;
    using quad_detail::Segment;
    spec.validate();

    std::size_t evals = 0;
    const auto pts = quad_detail::breakpoints(spec);
    std::priority_queue<Segment<T>> work;
    std::vector<Segment<T>> frozen;  // too narrow to split further
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        work.push(quad_detail::kronrod<F, T>(f, pts[k], pts[k + 1], evals));

    auto totals = [&]() {
        T v = quad_detail::zero_like(work.empty() ? frozen.front().value : work.top().value);
        double e = 0.0;
        auto accumulate = [&](const Segment<T>& s) {
            v = v + s.value;
            e += s.error;
        };
        auto copy = work;
        while (!copy.empty()) {
            accumulate(copy.top());
            copy.pop();
        }
        for (const auto& s : frozen) accumulate(s);
        return std::pair<T, double>(v, e);
    };

    auto [value, error] = totals();
    std::size_t since_resum = 0;
    while (!work.empty()) {
        const double target = std::max(spec.abs_tol, spec.rel_tol * quad_detail::magnitude<T>(value));
        if (error <= target) break;
        if (evals + 30 > spec.max_evaluations) break;
        Segment<T> s = work.top();
        work.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b) || (s.b - s.a) < 1e-14 * std::max(1.0, std::abs(mid))) {
            frozen.push_back(s);
            continue;
        }
        Segment<T> left = quad_detail::kronrod<F, T>(f, s.a, mid, evals);
        Segment<T> right = quad_detail::kronrod<F, T>(f, mid, s.b, evals);
        value = value - s.value + left.value + right.value;
        error = error - s.error + left.error + right.error;
        work.push(std::move(left));
        work.push(std::move(right));
        if (++since_resum == 200) {
            std::tie(value, error) = totals();
            since_resum = 0;
        }
    }
    std::tie(value, error) = totals();

    if (spec.tail_model) {
        const double mid = 0.5 * (spec.lower + spec.upper);
        const double half = 0.5 * (spec.upper - spec.lower);
        // integral_b^inf C/(w-mid)^2 dw = C/half with C = f(b) half^2
        value = value + (f(spec.upper) + f(spec.lower)) * half;
        evals += 2;
    }

    const double target = std::max(spec.abs_tol, spec.rel_tol * quad_detail::magnitude<T>(value));
    if (!(error <= target)) {
        throw QuadratureError("quadrature: tolerance not met within evaluation budget",
                              quad_detail::summary<T>(value), error);
    }
    return {value, error, evals};
}

}  // namespace wgqed
