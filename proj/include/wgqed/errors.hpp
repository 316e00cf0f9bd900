#pragma once

#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace wgqed {

namespace detail {
inline std::string sci(const char* label, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.3e)", label, v);
    return buf;
}
}  // namespace detail

// Invalid physical parameters, malformed inputs, requests outside a
// component's contract. The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical kernel could not deliver its accuracy contract. The CLI maps
// these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
public:
    SingularMatrixError(const std::string& what, double condition)
        : NumericalError(what + detail::sci(" (condition estimate ", condition)),
          condition_(condition) {}

    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, std::complex<double> best_estimate,
                    double achieved_error)
        : NumericalError(what + detail::sci(" (achieved error ", achieved_error)),
          best_estimate_(best_estimate),
          achieved_error_(achieved_error) {}

    std::complex<double> best_estimate() const noexcept { return best_estimate_; }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    std::complex<double> best_estimate_;
    double achieved_error_;
};

}  // namespace wgqed
