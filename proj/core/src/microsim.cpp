#include "wavekin/microsim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "wavekin/parallel.hpp"
#include "wavekin/rng.hpp"
#include "wavekin/specfun.hpp"

namespace wavekin::microsim {

namespace {

std::mutex g_fftw_mutex; // FFTW planner is not thread-safe

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::uint64_t realization_seed(std::uint64_t seed, std::int64_t r) {
    CounterRng rng(seed, 0x7265616cULL + static_cast<std::uint64_t>(r));
    return rng.next_u64();
}

struct Lattice {
    const TorusModel* model;
    int n;

    std::size_t flat(int jx, int jy) const {
        return static_cast<std::size_t>(jx) * n + jy;
    }
};

} // namespace

TorusModel::TorusModel(Dimension d_, double L_, int n_modes_, double eps_)
    : d(d_), L(L_), n_modes(n_modes_), eps(eps_) {
    if (d.value() > 2) throw domain_error("TorusModel: d=3 lattices are out of scope");
    if (!(L > 0.0)) throw domain_error("TorusModel: L must be positive");
    if (!is_power_of_two(n_modes)) throw domain_error("TorusModel: n_modes must be a power of two");
    require_finite(eps, "TorusModel eps");
}

double TorusModel::gamma() const { return std::pow(L, -static_cast<double>(d.value())); }

std::size_t TorusModel::mode_count() const {
    std::size_t c = 1;
    for (int i = 0; i < d.value(); ++i) c *= n_modes;
    return c;
}

double TorusModel::omega_of(const int* m_signed) const {
    double acc = 0.0;
    for (int i = 0; i < d.value(); ++i) {
        const double k = 2.0 * M_PI * m_signed[i] / L;
        acc += k * k;
    }
    return acc;
}

double TorusModel::omega_dealias_max() const {
    const double k = 2.0 * M_PI * (n_modes / 3) / L;
    return d.value() * k * k;
}

namespace {

// Iterates all FFT indices, providing signed lattice coordinates and omega.
template <typename Fn>
void for_each_mode(const TorusModel& model, Fn&& fn) {
    const int n = model.n_modes;
    if (model.d.value() == 1) {
        for (int j = 0; j < n; ++j) {
            int m[1] = {model.signed_index(j)};
            fn(static_cast<std::size_t>(j), m);
        }
        return;
    }
    for (int jx = 0; jx < n; ++jx) {
        int m[2];
        m[0] = model.signed_index(jx);
        for (int jy = 0; jy < n; ++jy) {
            m[1] = model.signed_index(jy);
            fn(static_cast<std::size_t>(jx) * n + jy, m);
        }
    }
}

bool in_retained_band(const TorusModel& model, const int* m) {
    for (int i = 0; i < model.d.value(); ++i)
        if (std::abs(m[i]) >= model.n_modes / 2) return false;
    return true;
}

bool in_dealias_band(const TorusModel& model, const int* m) {
    for (int i = 0; i < model.d.value(); ++i)
        if (std::abs(m[i]) > model.n_modes / 3) return false;
    return true;
}

} // namespace

ModeField prepared_data(const TorusModel& model, const std::function<double(double)>& phi,
                        std::uint64_t seed) {
    ModeField field{model, std::vector<std::complex<double>>(model.mode_count()), 0.0};
    double phi_max = 0.0;
    double phi_edge = 0.0;
    const int edge = model.n_modes / 2 - 1;
    for_each_mode(model, [&](std::size_t idx, const int* m) {
        if (!in_retained_band(model, m)) {
            field.amps[idx] = 0.0;
            return;
        }
        const double value = phi(model.omega_of(m));
        require_finite(value, "prepared_data phi value");
        phi_max = std::max(phi_max, std::fabs(value));
        int max_axis = 0;
        for (int i = 0; i < model.d.value(); ++i) max_axis = std::max(max_axis, std::abs(m[i]));
        if (max_axis == edge) phi_edge = std::max(phi_edge, std::fabs(value));
        CounterRng rng(seed, idx);
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        field.amps[idx] = std::polar(std::fabs(value), theta);
    });
    if (phi_max > 0.0 && phi_edge > 1e-8 * phi_max)
        throw domain_error("prepared_data: phi is not negligible at the truncation edge (" +
                           std::to_string(phi_edge / phi_max) + " of max)");
    return field;
}

double mass(const ModeField& field) {
    long double acc = 0.0L;
    for (const auto& a : field.amps) acc += std::norm(a);
    return static_cast<double>(acc);
}

ModeField wick_shift(const ModeField& field, double t) {
    const double m = mass(field);
    const double phase = 2.0 * field.model.eps * field.model.gamma() * m * t;
    ModeField out = field;
    const std::complex<double> rot = std::polar(1.0, phase);
    for (auto& a : out.amps) a *= rot;
    return out;
}

ModeField evolve_nls(const ModeField& field, double t_final, double dt) {
    const TorusModel& model = field.model;
    if (!(t_final >= 0.0) || !(dt > 0.0)) throw domain_error("evolve_nls: bad time parameters");
    if (dt * model.omega_dealias_max() > 0.5 + 1e-12)
        throw domain_error("evolve_nls: dt does not resolve the fastest retained phase");
    const int n_steps = std::max(1, static_cast<int>(std::ceil(t_final / dt - 1e-9)));
    const double h = t_final / n_steps;

    const std::size_t count = model.mode_count();
    std::vector<std::complex<double>> amps = field.amps;
    std::vector<std::complex<double>> half_phase(count);
    std::vector<char> keep(count);
    for_each_mode(model, [&](std::size_t idx, const int* m) {
        keep[idx] = in_dealias_band(model, m) ? 1 : 0;
        half_phase[idx] = std::polar(1.0, -0.5 * h * model.omega_of(m));
        if (!keep[idx]) amps[idx] = 0.0;
    });

    const double mass0 = [&] {
        long double acc = 0.0L;
        for (const auto& a : amps) acc += std::norm(a);
        return static_cast<double>(acc);
    }();

    if (model.eps == 0.0) {
        for_each_mode(model, [&](std::size_t idx, const int* m) {
            if (keep[idx]) amps[idx] *= std::polar(1.0, -t_final * model.omega_of(m));
        });
        return ModeField{model, std::move(amps), field.time + t_final};
    }

    fftw_plan fwd = nullptr, bwd = nullptr;
    std::vector<std::complex<double>> buf(count);
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        auto* data = reinterpret_cast<fftw_complex*>(buf.data());
        if (model.d.value() == 1) {
            bwd = fftw_plan_dft_1d(model.n_modes, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
            fwd = fftw_plan_dft_1d(model.n_modes, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
        } else {
            bwd = fftw_plan_dft_2d(model.n_modes, model.n_modes, data, data, FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
            fwd = fftw_plan_dft_2d(model.n_modes, model.n_modes, data, data, FFTW_FORWARD,
                                   FFTW_ESTIMATE);
        }
    }

    const double nl_scale = model.eps * h * model.gamma(); // |u|^2 = gamma |c|^2
    const double inv_count = 1.0 / static_cast<double>(count);
    for (int step = 0; step < n_steps; ++step) {
        for (std::size_t i = 0; i < count; ++i) buf[i] = amps[i] * half_phase[i];
        fftw_execute(bwd);
        for (std::size_t i = 0; i < count; ++i)
            buf[i] *= std::polar(1.0, -nl_scale * std::norm(buf[i]));
        fftw_execute(fwd);
        for (std::size_t i = 0; i < count; ++i)
            amps[i] = keep[i] ? buf[i] * inv_count * half_phase[i] : 0.0;
    }

    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }

    long double acc = 0.0L;
    for (const auto& a : amps) acc += std::norm(a);
    const double drift = std::fabs(static_cast<double>(acc) - mass0);
    if (mass0 > 0.0 && drift > 1e-8 * mass0 * std::max(1.0, t_final))
        throw accuracy_error("evolve_nls: mass drift " + std::to_string(drift / mass0) +
                             " exceeds 1e-8; reduce dt");
    return ModeField{model, std::move(amps), field.time + t_final};
}

EnsembleSpectrum shell_average(const ModeField& field, const std::vector<double>& shell_edges) {
    if (shell_edges.size() < 2) throw domain_error("shell_average: need at least one shell");
    for (std::size_t i = 1; i < shell_edges.size(); ++i)
        if (!(shell_edges[i] > shell_edges[i - 1]))
            throw domain_error("shell_average: edges must increase");

    const std::size_t shells = shell_edges.size() - 1;
    EnsembleSpectrum spec;
    spec.shell_edges = shell_edges;
    spec.mean.assign(shells, 0.0);
    spec.stderr_.assign(shells, 0.0);
    spec.mode_count.assign(shells, 0);
    spec.realizations = 1;

    for_each_mode(field.model, [&](std::size_t idx, const int* m) {
        if (!in_retained_band(field.model, m)) return;
        const double w = field.model.omega_of(m);
        const auto it = std::upper_bound(shell_edges.begin(), shell_edges.end(), w);
        if (it == shell_edges.begin() || it == shell_edges.end()) return;
        const std::size_t s = static_cast<std::size_t>(it - shell_edges.begin()) - 1;
        spec.mean[s] += std::norm(field.amps[idx]);
        ++spec.mode_count[s];
    });
    for (std::size_t s = 0; s < shells; ++s) {
        if (spec.mode_count[s] > 0) spec.mean[s] /= spec.mode_count[s];
        else spec.mean[s] = std::numeric_limits<double>::quiet_NaN();
    }
    return spec;
}

EnsembleSpectrum merge_spectra(const EnsembleSpectrum& a, const EnsembleSpectrum& b) {
    if (a.shell_edges != b.shell_edges || a.mode_count != b.mode_count)
        throw domain_error("merge_spectra: incompatible shells");
    EnsembleSpectrum out = a;
    out.realizations = a.realizations + b.realizations;
    for (std::size_t s = 0; s < a.mean.size(); ++s) {
        if (a.mode_count[s] == 0) continue;
        const double na = static_cast<double>(a.realizations);
        const double nb = static_cast<double>(b.realizations);
        const double n = na + nb;
        const double delta = b.mean[s] - a.mean[s];
        out.mean[s] = a.mean[s] + delta * nb / n;
        const double m2a = a.stderr_[s] * a.stderr_[s] * na * std::max(0.0, na - 1.0);
        const double m2b = b.stderr_[s] * b.stderr_[s] * nb * std::max(0.0, nb - 1.0);
        const double m2 = m2a + m2b + delta * delta * na * nb / n;
        out.stderr_[s] = n > 1.5 ? std::sqrt(m2 / (n * (n - 1.0))) : 0.0;
    }
    return out;
}

std::vector<double> default_shell_edges(double omega_max, int count) {
    std::vector<double> edges(count + 1);
    for (int i = 0; i <= count; ++i) edges[i] = omega_max * i / count;
    edges[0] = 1e-9; // keep the zero mode out of the first shell
    return edges;
}

namespace {

double bonferroni_z(std::size_t cases) {
    if (cases <= 1) return 3.0;
    if (cases <= 8) return 3.6;
    if (cases <= 32) return 4.0;
    return 4.4;
}

} // namespace

PairingReport pairing_expectation_check(const TorusModel& model,
                                        const std::function<double(double)>& phi,
                                        int n_realizations, std::uint64_t seed) {
    if (n_realizations < 10000)
        throw domain_error("pairing_expectation_check: need >= 1e4 realizations");

    // Five reference modes with distinct frequencies and solid amplitudes.
    struct Mode {
        std::size_t idx;
        double abs_phi;
    };
    std::vector<Mode> picks;
    std::vector<double> used_omegas;
    for_each_mode(model, [&](std::size_t idx, const int* m) {
        if (!in_retained_band(model, m) || picks.size() >= 5) return;
        const double w = model.omega_of(m);
        if (w <= 0.0) return;
        for (double u : used_omegas)
            if (std::fabs(u - w) < 1e-9) return;
        const double p = std::fabs(phi(w));
        if (p < 0.2) return;
        picks.push_back({idx, p});
        used_omegas.push_back(w);
    });
    if (picks.size() < 5)
        throw domain_error("pairing_expectation_check: phi too narrow to pick 5 test modes");

    const std::size_t a = picks[0].idx, b = picks[1].idx, c = picks[2].idx, e = picks[3].idx;
    struct Case {
        std::string label;
        std::size_t q[4];
        bool paired;
    };
    const std::vector<Case> cases = {
        {"(a,a,b,b)", {a, a, b, b}, true},  {"(a,b,b,a)", {a, b, b, a}, true},
        {"(a,b,a,b)", {a, b, a, b}, false}, {"(a,b,c,e)", {a, b, c, e}, false},
        {"(a,a,a,b)", {a, a, a, b}, false}, {"(b,c,e,a)", {b, c, e, a}, false},
        {"(a,c,b,e)", {a, c, b, e}, false}, {"(c,a,e,b)", {c, a, e, b}, false},
    };

    PairingReport report;
    report.z_threshold = bonferroni_z(cases.size());
    report.all_pass = true;

    std::vector<std::complex<double>> sums(cases.size(), 0.0);
    std::vector<double> sq_re(cases.size(), 0.0), sq_im(cases.size(), 0.0);
    std::vector<std::size_t> all_modes = {a, b, c, e, picks[4].idx};
    for (int r = 0; r < n_realizations; ++r) {
        const std::uint64_t rs = realization_seed(seed, r);
        std::complex<double> amp[8]; // per reference mode
        for (std::size_t k = 0; k < all_modes.size(); ++k) {
            CounterRng rng(rs, all_modes[k]);
            const double theta = rng.uniform(0.0, 2.0 * M_PI);
            amp[k] = std::polar(1.0, theta); // modulus folded in afterwards
        }
        auto amp_of = [&](std::size_t idx) {
            for (std::size_t k = 0; k < all_modes.size(); ++k)
                if (all_modes[k] == idx) return amp[k];
            return std::complex<double>(0.0);
        };
        for (std::size_t k = 0; k < cases.size(); ++k) {
            const auto& q = cases[k].q;
            const std::complex<double> v = std::conj(amp_of(q[0])) * amp_of(q[1]) *
                                           std::conj(amp_of(q[2])) * amp_of(q[3]);
            sums[k] += v;
            sq_re[k] += v.real() * v.real();
            sq_im[k] += v.imag() * v.imag();
        }
    }

    auto modulus_of = [&](std::size_t idx) {
        for (const auto& p : picks)
            if (p.idx == idx) return p.abs_phi;
        return 0.0;
    };
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& q = cases[k].q;
        const double mods = modulus_of(q[0]) * modulus_of(q[1]) * modulus_of(q[2]) * modulus_of(q[3]);
        PairingCase out;
        out.label = cases[k].label;
        const std::complex<double> mean = sums[k] / static_cast<double>(n_realizations);
        out.mean = mean * mods;
        const double var_re = std::max(0.0, sq_re[k] / n_realizations - mean.real() * mean.real());
        const double var_im = std::max(0.0, sq_im[k] / n_realizations - mean.imag() * mean.imag());
        out.stderr_ = mods * std::sqrt((var_re + var_im) / n_realizations);
        out.expected = cases[k].paired ? mods : 0.0;
        const double dev = std::abs(out.mean - std::complex<double>(out.expected, 0.0));
        out.z = out.stderr_ > 0.0 ? dev / out.stderr_ : (dev < 1e-12 ? 0.0 : HUGE_VAL);
        out.pass = out.z <= report.z_threshold;
        report.all_pass = report.all_pass && out.pass;
        report.cases.push_back(out);
    }
    return report;
}

AngularPrediction broadened_angular_prediction(Dimension d, const std::function<double(double)>& rho,
                                               double omega, double t, bool gain_only,
                                               double omega_hi, std::int64_t samples,
                                               std::uint64_t seed) {
    if (!(t > 0.0) || !(omega_hi > 0.0)) throw domain_error("broadened_angular_prediction: bad inputs");
    const int dim = d.value();
    const double s_area = specfun::sphere_area(d);
    const double g_const = 0.5 * std::pow(2.0 * M_PI, -dim);
    const double r0 = rho(omega);
    const double a0 = std::sqrt(omega);

    const std::int64_t block = 65536;
    const std::int64_t blocks = (samples + block - 1) / block;
    std::vector<double> bsum(blocks, 0.0), bsq(blocks, 0.0);
    std::vector<std::int64_t> bn(blocks, 0);

    parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t bi) {
        CounterRng rng(seed, 0xb70ad000ULL + bi);
        const std::int64_t lo = static_cast<std::int64_t>(bi) * block;
        const std::int64_t n = std::min<std::int64_t>(block, samples - lo);
        double acc = 0.0, acc_sq = 0.0;
        double t1[3], t2[3];
        for (std::int64_t i = 0; i < n; ++i) {
            const double w1 = rng.uniform(0.0, omega_hi);
            const double w2 = rng.uniform(0.0, omega_hi);
            rng.unit_vector(dim, t1);
            rng.unit_vector(dim, t2);
            const double a1 = std::sqrt(w1), a2 = std::sqrt(w2);
            double w3 = 0.0;
            for (int c = 0; c < dim; ++c) {
                const double v = (c == 0 ? a0 : 0.0) - a1 * t1[c] + a2 * t2[c];
                w3 += v * v;
            }
            const double om = omega - w1 + w2 - w3;
            const double x = 0.5 * t * om;
            const double sinc = std::fabs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
            const double kt = t * t * sinc * sinc;
            const double p1 = rho(w1), p2 = rho(w2), p3 = rho(w3);
            const double f = gain_only ? p1 * p2 * p3
                                       : p1 * p2 * p3 - r0 * p2 * p3 + r0 * p1 * p3 - r0 * p1 * p2;
            const double g1 = g_const * std::pow(w1, 0.5 * dim - 1.0);
            const double g2 = g_const * std::pow(w2, 0.5 * dim - 1.0);
            const double val = g1 * g2 * f * kt;
            acc += val;
            acc_sq += val * val;
        }
        bsum[bi] = acc;
        bsq[bi] = acc_sq;
        bn[bi] = n;
    });

    double sum = 0.0, sum_sq = 0.0;
    std::int64_t n_total = 0;
    for (std::int64_t bi = 0; bi < blocks; ++bi) {
        sum += bsum[bi];
        sum_sq += bsq[bi];
        n_total += bn[bi];
    }
    const double mean = sum / n_total;
    const double var = std::max(0.0, sum_sq / n_total - mean * mean);
    const double scale = (2.0 * M_PI / t) * s_area * s_area * omega_hi * omega_hi;
    return {scale * mean, scale * std::sqrt(var / n_total)};
}

namespace {

struct OccupiedLattice {
    std::vector<int> mx, my;           // signed coordinates
    std::vector<double> omega;
    std::vector<double> modulus;       // |phi|
    std::vector<std::int32_t> lookup;  // (mx + N) * 2N + (my + N) -> index or -1
    int n;

    std::int32_t find(int x, int y) const {
        if (x < -n || x >= n || y < -n || y >= n) return -1;
        return lookup[static_cast<std::size_t>(x + n) * (2 * n) + (y + n)];
    }
};

OccupiedLattice build_occupied(const TorusModel& model, const std::function<double(double)>& phi) {
    OccupiedLattice occ;
    occ.n = model.n_modes;
    occ.lookup.assign(static_cast<std::size_t>(2 * occ.n) * (2 * occ.n), -1);
    double phi_max = 0.0;
    for_each_mode(model, [&](std::size_t, const int* m) {
        if (!in_retained_band(model, m)) return;
        phi_max = std::max(phi_max, std::fabs(phi(model.omega_of(m))));
    });
    for_each_mode(model, [&](std::size_t, const int* m) {
        if (!in_retained_band(model, m)) return;
        const double w = model.omega_of(m);
        const double p = std::fabs(phi(w));
        if (p <= 1e-10 * phi_max) return;
        const int x = m[0];
        const int y = model.d.value() == 2 ? m[1] : 0;
        occ.lookup[static_cast<std::size_t>(x + occ.n) * (2 * occ.n) + (y + occ.n)] =
            static_cast<std::int32_t>(occ.mx.size());
        occ.mx.push_back(x);
        occ.my.push_back(y);
        occ.omega.push_back(w);
        occ.modulus.push_back(p);
    });
    return occ;
}

} // namespace

FirstIterateReport first_iterate_variance(const TorusModel& model,
                                          const std::function<double(double)>& phi, double t,
                                          int n_realizations, std::uint64_t seed,
                                          const std::vector<double>& shell_edges,
                                          std::int64_t budget) {
    if (n_realizations < 1) throw domain_error("first_iterate_variance: need realizations");
    const OccupiedLattice occ = build_occupied(model, phi);
    const std::int64_t p = static_cast<std::int64_t>(occ.mx.size());
    const std::int64_t ops = p * p * p * n_realizations;
    if (ops > budget)
        throw resource_error("first_iterate_variance: quadruple enumeration needs " +
                             std::to_string(ops) + " ops, budget " + std::to_string(budget));

    const std::size_t shells = shell_edges.size() - 1;
    // Shell assignment of each occupied mode.
    std::vector<int> shell_of(p, -1);
    for (std::int64_t i = 0; i < p; ++i) {
        const auto it = std::upper_bound(shell_edges.begin(), shell_edges.end(), occ.omega[i]);
        if (it != shell_edges.begin() && it != shell_edges.end())
            shell_of[i] = static_cast<int>(it - shell_edges.begin()) - 1;
    }

    // Per-realization shell means of |B^1_n|^2, then moments over realizations.
    std::vector<std::vector<double>> shell_means(n_realizations,
                                                 std::vector<double>(shells, 0.0));
    parallel_for(static_cast<std::size_t>(n_realizations), [&](std::size_t r) {
        const std::uint64_t rs = realization_seed(seed, static_cast<std::int64_t>(r));
        std::vector<std::complex<double>> c(p);
        for (std::int64_t i = 0; i < p; ++i) {
            // Same per-mode stream the prepared-data sampler uses.
            const std::size_t jx = static_cast<std::size_t>((occ.mx[i] + occ.n) % occ.n);
            const std::size_t jy = static_cast<std::size_t>((occ.my[i] + occ.n) % occ.n);
            const std::size_t flat = model.d.value() == 1 ? jx : jx * occ.n + jy;
            CounterRng rng(rs, flat);
            c[i] = std::polar(occ.modulus[i], rng.uniform(0.0, 2.0 * M_PI));
        }
        std::vector<double> acc(shells, 0.0);
        std::vector<std::int64_t> cnt(shells, 0);
        for (std::int64_t nn = 0; nn < p; ++nn) {
            if (shell_of[nn] < 0) continue;
            std::complex<double> b1(0.0, 0.0);
            for (std::int64_t i1 = 0; i1 < p; ++i1) {
                if (i1 == nn) continue; // degenerate: (n, n2) = (n1, n3)
                const std::complex<double> c1 = c[i1];
                for (std::int64_t i2 = 0; i2 < p; ++i2) {
                    if (i2 == i1) continue; // degenerate: (n, n2) = (n3, n1)
                    const int x3 = occ.mx[nn] - occ.mx[i1] + occ.mx[i2];
                    const int y3 = occ.my[nn] - occ.my[i1] + occ.my[i2];
                    const std::int32_t i3 = occ.find(x3, y3);
                    if (i3 < 0) continue;
                    const double om = occ.omega[nn] - occ.omega[i1] + occ.omega[i2] - occ.omega[i3];
                    const double x = 0.5 * t * om;
                    const double sinc = std::fabs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
                    // int_0^t e^{is Omega} ds = t e^{i t Omega / 2} sinc(t Omega / 2)
                    const std::complex<double> kernel =
                        t * sinc * std::polar(1.0, x);
                    b1 += c1 * std::conj(c[i2]) * c[i3] * kernel;
                }
            }
            acc[shell_of[nn]] += std::norm(b1);
            ++cnt[shell_of[nn]];
        }
        for (std::size_t s = 0; s < shells; ++s)
            shell_means[r][s] = cnt[s] > 0 ? acc[s] / cnt[s] : 0.0;
    });

    FirstIterateReport report;
    const double pred_scale = t * std::pow(model.L, 2.0 * model.d.value()) / M_PI;
    for (std::size_t s = 0; s < shells; ++s) {
        double mean = 0.0, m2 = 0.0;
        for (int r = 0; r < n_realizations; ++r) {
            const double delta = shell_means[r][s] - mean;
            mean += delta / (r + 1);
            m2 += delta * (shell_means[r][s] - mean);
        }
        const double se =
            n_realizations > 1 ? std::sqrt(m2 / (n_realizations * (n_realizations - 1.0))) : 0.0;
        FirstIterateShell shell;
        shell.omega_center = 0.5 * (shell_edges[s] + shell_edges[s + 1]);
        shell.measured = mean;
        shell.stderr_ = se;
        const auto pred = broadened_angular_prediction(
            model.d, [&](double w) { const double v = phi(w); return v * v; },
            shell.omega_center, t, true, shell_edges.back() * 1.5, 1500000, seed ^ 0xfeedULL);
        shell.predicted = pred_scale * pred.value;
        shell.ratio = shell.predicted != 0.0 ? shell.measured / shell.predicted : 0.0;
        report.shells.push_back(shell);
    }
    return report;
}

DriftReport drift_experiment(const TorusModel& model, const std::function<double(double)>& phi,
                             double t_final, double dt, int n_realizations, std::uint64_t seed,
                             const std::vector<double>& shell_edges,
                             std::int64_t prediction_samples) {
    const std::size_t shells = shell_edges.size() - 1;
    std::vector<std::vector<double>> deltas(n_realizations, std::vector<double>(shells, 0.0));
    parallel_for(static_cast<std::size_t>(n_realizations), [&](std::size_t r) {
        const std::uint64_t rs = realization_seed(seed, static_cast<std::int64_t>(r));
        const ModeField f0 = prepared_data(model, phi, rs);
        const auto s0 = shell_average(f0, shell_edges);
        const ModeField ft = evolve_nls(f0, t_final, dt);
        const auto st = shell_average(ft, shell_edges);
        for (std::size_t s = 0; s < shells; ++s)
            deltas[r][s] = (s0.mode_count[s] > 0) ? st.mean[s] - s0.mean[s] : 0.0;
    });

    DriftReport report;
    for (std::size_t s = 0; s < shells; ++s) {
        double mean = 0.0, m2 = 0.0;
        for (int r = 0; r < n_realizations; ++r) {
            const double delta = deltas[r][s] - mean;
            mean += delta / (r + 1);
            m2 += delta * (deltas[r][s] - mean);
        }
        const double se =
            n_realizations > 1 ? std::sqrt(m2 / (n_realizations * (n_realizations - 1.0))) : 0.0;
        DriftShell shell;
        shell.omega_center = 0.5 * (shell_edges[s] + shell_edges[s + 1]);
        shell.measured = mean;
        shell.stderr_ = se;
        const auto pred = broadened_angular_prediction(
            model.d, [&](double w) { const double v = phi(w); return v * v; },
            shell.omega_center, t_final, false, shell_edges.back() * 1.5, prediction_samples,
            seed ^ 0xd21f7ULL);
        shell.predicted = model.eps * model.eps * t_final / M_PI * pred.value;
        shell.resolved = std::fabs(shell.predicted) > 3.0 * se && se > 0.0;
        shell.sign_match = shell.measured * shell.predicted > 0.0;
        if (shell.resolved) {
            ++report.resolved_count;
            if (shell.sign_match) ++report.sign_matches;
        }
        report.shells.push_back(shell);
    }
    return report;
}

} // namespace wavekin::microsim
