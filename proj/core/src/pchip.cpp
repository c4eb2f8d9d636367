#include "wavekin/pchip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavekin {

namespace {

// Fornberg finite-difference weights for the first derivative at x0 from the
// given nodes (any spacing, any count >= 2).
std::vector<double> fd_weights_first(const std::vector<double>& x, double x0) {
    const int n = static_cast<int>(x.size()) - 1;
    std::vector<std::vector<double>> c(n + 1, std::vector<double>(2, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) w[j] = c[j][1];
    return w;
}

} // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 matching nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneCubic: abscissae must increase");

    m_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(n - 1, lo + 4);
        const std::size_t lo2 = hi >= 4 ? std::min(lo, hi - 4) : 0;
        std::vector<double> xs(x_.begin() + lo2, x_.begin() + hi + 1);
        const auto w = fd_weights_first(xs, x_[i]);
        double s = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) s += w[j] * y_[lo2 + j];
        m_[i] = s;
    }

    // Fritsch-Carlson limiting: zero slope at interior extrema, clamp to
    // 3x the smaller neighboring secant otherwise.
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const double dl = i > 0 ? delta[i - 1] : delta[0];
        const double dr = i + 1 < n ? delta[i] : delta[n - 2];
        if (dl * dr <= 0.0 && i > 0 && i + 1 < n) {
            m_[i] = 0.0;
            continue;
        }
        const double bound = 3.0 * std::min(std::fabs(dl), std::fabs(dr));
        const double sign = (dl + dr) >= 0.0 ? 1.0 : -1.0;
        if (m_[i] * sign < 0.0) m_[i] = 0.0;
        else if (std::fabs(m_[i]) > bound) m_[i] = sign * bound;
    }
}

int MonotoneCubic::interval(double x) const {
    if (x < x_.front() || x > x_.back()) return -1;
    if (x == x_.back()) return static_cast<int>(x_.size()) - 2;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<int>(it - x_.begin()) - 1;
}

double MonotoneCubic::eval_on(int i, double t) const {
    // Arranged so constant data reproduces exactly (h01 + h00 = 1 in exact
    // arithmetic but not in floating point).
    const double h = x_[i + 1] - x_[i];
    const double t2 = t * t;
    const double h01 = t2 * (3.0 - 2.0 * t);
    const double omt = 1.0 - t;
    return y_[i] + (y_[i + 1] - y_[i]) * h01 + h * t * omt * (omt * m_[i] - t * m_[i + 1]);
}

double MonotoneCubic::operator()(double x) const {
    const int i = interval(x);
    if (i < 0) return 0.0;
    const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return eval_on(i, t);
}

} // namespace wavekin
