#ifndef WAVEKIN_COMMON_HPP
#define WAVEKIN_COMMON_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavekin {

// Positivity floor for frequencies entering the interaction-integral and
// collision machinery. Below it the oscillatory tails decay too slowly to
// certify a tolerance (a zero frequency removes one decay factor entirely).
inline constexpr double kOmegaFloor = 1e-6;

// Spatial dimension restricted to the supported set {1, 2, 3}.
class Dimension {
public:
    explicit Dimension(int d) : d_(d) {
        if (d < 1 || d > 3)
            throw std::invalid_argument("Dimension: supported set is {1,2,3}, got d=" + std::to_string(d));
    }
    int value() const { return d_; }
    friend bool operator==(Dimension a, Dimension b) { return a.d_ == b.d_; }

private:
    int d_;
};

// Thrown when inputs are outside an operation's documented domain.
class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when tail acceleration or an iterative scheme fails to certify the
// requested tolerance; carries partial-sum diagnostics in the message.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a requested accuracy target is unattainable for the inputs.
class accuracy_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a computation would exceed a configured resource budget.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw domain_error(std::string(what) + " must be finite");
}

} // namespace wavekin

#endif
