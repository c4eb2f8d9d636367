#ifndef WAVEKIN_PCHIP_HPP
#define WAVEKIN_PCHIP_HPP

#include <cstddef>
#include <vector>

namespace wavekin {

// Monotone piecewise-cubic Hermite interpolant. Node slopes come from
// 4th-order finite differences and are then run through a Fritsch-Carlson
// limiter, so the interpolant reproduces node values exactly, introduces no
// new extrema inside an interval (hence never undershoots below nonnegative
// data), and keeps O(h^4) accuracy on smooth monotone data. Evaluates to 0
// outside the node range.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;

    // Interval index such that x_[i] <= x < x_[i+1]; -1 outside the range.
    int interval(double x) const;

    // Hermite evaluation on a known interval with precomputed local
    // coordinate t in [0,1]; hot path for fixed quadrature stencils.
    double eval_on(int i, double t) const;

    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }
    const std::vector<double>& slopes() const { return m_; }
    std::size_t size() const { return x_.size(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

} // namespace wavekin

#endif
