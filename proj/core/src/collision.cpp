#include "wavekin/collision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "wavekin/parallel.hpp"
#include "wavekin/quadrature.hpp"
#include "wavekin/specfun.hpp"

namespace wavekin::collision {

FrequencyGrid FrequencyGrid::uniform(double lo, double hi, int n) {
    FrequencyGrid g;
    g.spacing = Spacing::uniform;
    g.nodes.resize(n);
    for (int i = 0; i < n; ++i) g.nodes[i] = lo + (hi - lo) * i / (n - 1);
    g.nodes.back() = hi;
    g.validate();
    return g;
}

FrequencyGrid FrequencyGrid::log_uniform(double lo, double hi, int n) {
    FrequencyGrid g;
    g.spacing = Spacing::log_uniform;
    g.nodes.resize(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g.nodes[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
    g.nodes.front() = lo;
    g.nodes.back() = hi;
    g.validate();
    return g;
}

void FrequencyGrid::validate() const {
    if (nodes.size() < 2) throw domain_error("FrequencyGrid: need at least 2 nodes");
    if (nodes.front() < kOmegaFloor)
        throw domain_error("FrequencyGrid: nodes[0] must be >= the positivity floor 1e-6");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw domain_error("FrequencyGrid: nodes must strictly increase");
}

std::uint64_t FrequencyGrid::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    const int sp = spacing == Spacing::uniform ? 0 : 1;
    feed(&sp, sizeof sp);
    feed(nodes.data(), nodes.size() * sizeof(double));
    return h;
}

double grid_abscissa(const FrequencyGrid& grid, double omega) {
    return grid.spacing == Spacing::log_uniform ? std::log(omega) : omega;
}

MonotoneCubic make_interpolant(const FrequencyGrid& grid, const std::vector<double>& values) {
    if (grid.spacing == Spacing::log_uniform) {
        std::vector<double> xs(grid.nodes.size());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = std::log(grid.nodes[i]);
        return MonotoneCubic(std::move(xs), values);
    }
    return MonotoneCubic(grid.nodes, values);
}

SpectralDensity::SpectralDensity(FrequencyGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)), interp_() {
    grid_.validate();
    if (values_.size() != grid_.size())
        throw domain_error("SpectralDensity: value count does not match grid");
    for (double v : values_) {
        require_finite(v, "SpectralDensity value");
        if (v < 0.0) throw domain_error("SpectralDensity: values must be >= 0");
    }
    interp_ = make_interpolant(grid_, values_);
}

double resonance_modulus(const interaction::FrequencyQuad& quad) {
    return quad.w[0] - quad.w[1] + quad.w[2] - quad.w[3];
}

double f_term(double r0, double r1, double r2, double r3) {
    return r1 * r2 * r3 - r0 * r2 * r3 + r0 * r1 * r3 - r0 * r1 * r2;
}

double kstar_prefactor(Dimension d) {
    const double s = specfun::sphere_area(d);
    const double ratio = s / std::pow(2.0 * M_PI, d.value());
    return 0.5 * M_PI * M_PI * ratio * ratio * ratio;
}

double kernel_kstar(Dimension d, const interaction::FrequencyQuad& quad, double tol) {
    double interaction_value;
    if (d.value() == 3) interaction_value = interaction::interaction_integral_closed_d3(quad);
    else interaction_value = interaction::interaction_integral(d, quad, tol).value;
    const double expo = 0.5 * d.value() - 1.0;
    const double measure = expo == 0.0 ? 1.0 : std::pow(quad.w[1] * quad.w[2] * quad.w[3], expo);
    return kstar_prefactor(d) * measure * interaction_value;
}

namespace {

struct Domain {
    double floor;
    double cutoff;
};

Domain make_domain(const FrequencyGrid& grid, double requested_cutoff) {
    Domain dom;
    dom.floor = std::max(kOmegaFloor, grid.omega_min());
    dom.cutoff = requested_cutoff > 0.0 ? std::min(requested_cutoff, grid.omega_max())
                                        : grid.omega_max();
    if (dom.cutoff <= dom.floor) throw domain_error("collision domain is empty");
    return dom;
}

// One delta-resolved integration region: omega1 in [u_lo, u_hi] with the
// omega2 range linear in omega1 (lo = p + q*w1, hi = r + s*w1).
struct Region {
    double u_lo, u_hi;
    double lo_c0, lo_c1;
    double hi_c0, hi_c1;
};

// The w3 = omega - w1 + w2 constraints kink exactly at w1 = omega, giving two
// trapezoidal regions.
std::vector<Region> make_regions(double omega, const Domain& dom) {
    std::vector<Region> regions;
    {
        Region a;
        a.u_lo = std::max(dom.floor, omega - dom.cutoff + dom.floor);
        a.u_hi = std::min(omega, dom.cutoff);
        a.lo_c0 = dom.floor;
        a.lo_c1 = 0.0;
        a.hi_c0 = dom.cutoff - omega;
        a.hi_c1 = 1.0;
        if (a.u_hi > a.u_lo) regions.push_back(a);
    }
    {
        Region b;
        b.u_lo = std::max(omega, dom.floor);
        b.u_hi = dom.cutoff;
        b.lo_c0 = dom.floor - omega;
        b.lo_c1 = 1.0;
        b.hi_c0 = dom.cutoff;
        b.hi_c1 = 0.0;
        if (b.u_hi > b.u_lo) regions.push_back(b);
    }
    return regions;
}

// True when one of the eight signed wavenumber combinations
// sqrt(w0) +- sqrt(w1) +- sqrt(w2) +- sqrt(w3) changes sign across the panel
// corners; the interaction integral is only C^0 there.
bool panel_crosses_kink(double omega, const Region& reg, double u0, double u1, double v0, double v1) {
    double g[8][4];
    const double us[2] = {u0, u1};
    const double vs[2] = {v0, v1};
    int corner = 0;
    for (double u : us) {
        const double lo = reg.lo_c0 + reg.lo_c1 * u;
        const double hi = reg.hi_c0 + reg.hi_c1 * u;
        for (double v : vs) {
            const double w2 = lo + v * (hi - lo);
            const double w3 = std::max(omega - u + w2, 0.0);
            const double a0 = std::sqrt(omega), a1 = std::sqrt(u), a2 = std::sqrt(w2), a3 = std::sqrt(w3);
            for (int m = 0; m < 8; ++m) {
                const double s1 = (m & 1) ? -1.0 : 1.0;
                const double s2 = (m & 2) ? -1.0 : 1.0;
                const double s3 = (m & 4) ? -1.0 : 1.0;
                g[m][corner] = a0 + s1 * a1 + s2 * a2 + s3 * a3;
            }
            ++corner;
        }
    }
    for (int m = 0; m < 8; ++m) {
        const bool pos = g[m][0] > 0.0;
        for (int c = 1; c < 4; ++c)
            if ((g[m][c] > 0.0) != pos) return true;
    }
    return false;
}

int grid_interval(const std::vector<double>& x, double v) {
    if (v < x.front() || v > x.back()) return -1;
    if (v == x.back()) return static_cast<int>(x.size()) - 2;
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    return static_cast<int>(it - x.begin()) - 1;
}

double local_coordinate(const FrequencyGrid& grid, int interval, double w) {
    const double x = grid_abscissa(grid, w);
    const double x0 = grid_abscissa(grid, grid.nodes[interval]);
    const double x1 = grid_abscissa(grid, grid.nodes[interval + 1]);
    return (x - x0) / (x1 - x0);
}

struct PanelEmitter {
    Dimension d;
    const FrequencyGrid* grid;
    const Domain* dom;
    const KernelTableOptions* opts;
    double omega;
    std::vector<KernelTable::Point>* out;

    void emit_region(const Region& reg) const {
        const int p = opts->panels_per_dim;
        for (int i = 0; i < p; ++i) {
            const double u0 = reg.u_lo + (reg.u_hi - reg.u_lo) * i / p;
            const double u1 = reg.u_lo + (reg.u_hi - reg.u_lo) * (i + 1) / p;
            for (int j = 0; j < p; ++j) {
                emit_panel(reg, u0, u1, static_cast<double>(j) / p, (j + 1.0) / p, 0);
            }
        }
    }

    void emit_panel(const Region& reg, double u0, double u1, double v0, double v1, int depth) const {
        if (depth < opts->kink_refine_depth && panel_crosses_kink(omega, reg, u0, u1, v0, v1)) {
            const double um = 0.5 * (u0 + u1);
            const double vm = 0.5 * (v0 + v1);
            emit_panel(reg, u0, um, v0, vm, depth + 1);
            emit_panel(reg, u0, um, vm, v1, depth + 1);
            emit_panel(reg, um, u1, v0, vm, depth + 1);
            emit_panel(reg, um, u1, vm, v1, depth + 1);
            return;
        }
        const auto& rule = gauss_legendre(opts->gl_points);
        const double uc = 0.5 * (u0 + u1), uh = 0.5 * (u1 - u0);
        const double vc = 0.5 * (v0 + v1), vh = 0.5 * (v1 - v0);
        for (int i = 0; i < opts->gl_points; ++i) {
            const double w1 = uc + uh * rule.nodes[i];
            const double lo = reg.lo_c0 + reg.lo_c1 * w1;
            const double hi = reg.hi_c0 + reg.hi_c1 * w1;
            if (hi <= lo) continue;
            for (int j = 0; j < opts->gl_points; ++j) {
                const double v = vc + vh * rule.nodes[j];
                const double w2 = lo + v * (hi - lo);
                const double w3 = std::max(omega - w1 + w2, dom->floor);
                const double weight = rule.weights[i] * uh * rule.weights[j] * vh * (hi - lo);
                const double kk = kernel_kstar(d, {omega, w1, w2, w3}, opts->tol);
                KernelTable::Point pt;
                pt.wk = weight * kk;
                pt.i1 = grid_interval(grid->nodes, w1);
                pt.i2 = grid_interval(grid->nodes, w2);
                pt.i3 = grid_interval(grid->nodes, w3);
                pt.t1 = pt.i1 < 0 ? 0.0 : local_coordinate(*grid, pt.i1, w1);
                pt.t2 = pt.i2 < 0 ? 0.0 : local_coordinate(*grid, pt.i2, w2);
                pt.t3 = pt.i3 < 0 ? 0.0 : local_coordinate(*grid, pt.i3, w3);
                out->push_back(pt);
            }
        }
    }
};

} // namespace

namespace {

constexpr std::uint32_t kCacheMagic = 0x574b5431; // "WKT1"
constexpr std::uint32_t kCacheVersion = 1;

std::uint64_t options_hash(const KernelTableOptions& opts) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed64 = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    std::uint64_t bits;
    std::memcpy(&bits, &opts.tol, 8);
    feed64(bits);
    feed64(static_cast<std::uint64_t>(opts.panels_per_dim));
    feed64(static_cast<std::uint64_t>(opts.gl_points));
    feed64(static_cast<std::uint64_t>(opts.kink_refine_depth));
    std::memcpy(&bits, &opts.omega_cutoff, 8);
    feed64(bits);
    return h;
}

struct CacheHeader {
    std::uint32_t magic;
    std::uint32_t version;
    std::int32_t d;
    std::int32_t pad;
    double tol;
    std::uint64_t grid_hash;
    std::uint64_t opts_hash;
    double cutoff;
    std::uint64_t node_count;
};

} // namespace

KernelTable KernelTable::build(Dimension d, const FrequencyGrid& grid, const KernelTableOptions& opts) {
    grid.validate();
    const Domain dom = make_domain(grid, opts.omega_cutoff);

    KernelTable table;
    table.d_ = d.value();
    table.tol_ = opts.tol;
    table.cutoff_ = dom.cutoff;
    table.grid_hash_ = grid.hash();
    table.opts_hash_ = options_hash(opts);
    table.stencils_.resize(grid.size());

    parallel_for(grid.size(), [&](std::size_t n) {
        const double omega = grid.nodes[n];
        auto& stencil = table.stencils_[n];
        PanelEmitter emitter{d, &grid, &dom, &opts, omega, &stencil};
        for (const auto& reg : make_regions(omega, dom)) emitter.emit_region(reg);
    });
    return table;
}

std::size_t KernelTable::total_points() const {
    std::size_t n = 0;
    for (const auto& s : stencils_) n += s.size();
    return n;
}

void KernelTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw resource_error("KernelTable::save: cannot open " + path);
    CacheHeader hdr{};
    hdr.magic = kCacheMagic;
    hdr.version = kCacheVersion;
    hdr.d = d_;
    hdr.tol = tol_;
    hdr.grid_hash = grid_hash_;
    hdr.opts_hash = opts_hash_;
    hdr.cutoff = cutoff_;
    hdr.node_count = stencils_.size();
    out.write(reinterpret_cast<const char*>(&hdr), sizeof hdr);
    for (const auto& s : stencils_) {
        const std::uint64_t n = s.size();
        out.write(reinterpret_cast<const char*>(&n), sizeof n);
        out.write(reinterpret_cast<const char*>(s.data()),
                  static_cast<std::streamsize>(n * sizeof(Point)));
    }
    if (!out) throw resource_error("KernelTable::save: write failed for " + path);
}

std::optional<KernelTable> KernelTable::load(const std::string& path, Dimension d,
                                             const FrequencyGrid& grid,
                                             const KernelTableOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    CacheHeader hdr{};
    in.read(reinterpret_cast<char*>(&hdr), sizeof hdr);
    if (!in || hdr.magic != kCacheMagic || hdr.version != kCacheVersion) return std::nullopt;
    if (hdr.d != d.value() || hdr.tol != opts.tol || hdr.grid_hash != grid.hash() ||
        hdr.opts_hash != options_hash(opts)) return std::nullopt;
    const Domain dom = make_domain(grid, opts.omega_cutoff);
    if (hdr.cutoff != dom.cutoff || hdr.node_count != grid.size()) return std::nullopt;

    KernelTable table;
    table.d_ = hdr.d;
    table.tol_ = hdr.tol;
    table.cutoff_ = hdr.cutoff;
    table.grid_hash_ = hdr.grid_hash;
    table.opts_hash_ = hdr.opts_hash;
    table.stencils_.resize(hdr.node_count);
    for (auto& s : table.stencils_) {
        std::uint64_t n = 0;
        in.read(reinterpret_cast<char*>(&n), sizeof n);
        if (!in || n > (1ULL << 32)) return std::nullopt;
        s.resize(n);
        in.read(reinterpret_cast<char*>(s.data()), static_cast<std::streamsize>(n * sizeof(Point)));
        if (!in) return std::nullopt;
    }
    return table;
}

KernelTable KernelTable::load_or_build(Dimension d, const FrequencyGrid& grid,
                                       const KernelTableOptions& opts, const std::string& cache_dir) {
    std::string path;
    if (!cache_dir.empty()) {
        char name[128];
        std::snprintf(name, sizeof name, "kernel-d%d-%016llx-%016llx.wkt", d.value(),
                      static_cast<unsigned long long>(grid.hash()),
                      static_cast<unsigned long long>(options_hash(opts)));
        path = cache_dir + "/" + name;
        if (auto cached = load(path, d, grid, opts)) return std::move(*cached);
    }
    KernelTable table = build(d, grid, opts);
    if (!path.empty()) {
        try {
            table.save(path);
        } catch (const resource_error&) {
            // cache directory not writable; keep the in-memory table
        }
    }
    return table;
}

double collision_operator_unchecked(const MonotoneCubic& interp, double rho_at_node,
                                    std::size_t node_index, const KernelTable& table) {
    long double acc = 0.0L;
    for (const auto& pt : table.stencil(node_index)) {
        const double r1 = pt.i1 < 0 ? 0.0 : interp.eval_on(pt.i1, pt.t1);
        const double r2 = pt.i2 < 0 ? 0.0 : interp.eval_on(pt.i2, pt.t2);
        const double r3 = pt.i3 < 0 ? 0.0 : interp.eval_on(pt.i3, pt.t3);
        acc += static_cast<long double>(pt.wk) * f_term(rho_at_node, r1, r2, r3);
    }
    return static_cast<double>(acc);
}

double collision_operator(Dimension d, const SpectralDensity& rho, double omega,
                          const KernelTable& table) {
    if (d.value() != table.dimension())
        throw domain_error("collision_operator: table built for a different dimension");
    if (rho.grid().hash() != table.grid_hash())
        throw domain_error("collision_operator: table/grid mismatch");
    const auto& nodes = rho.grid().nodes;
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), omega - 1e-12 * (1.0 + std::fabs(omega)));
    if (it == nodes.end() || std::fabs(*it - omega) > 1e-12 * (1.0 + std::fabs(omega)))
        throw domain_error("collision_operator: omega is not a grid node");
    const std::size_t idx = static_cast<std::size_t>(it - nodes.begin());
    return collision_operator_unchecked(rho.interpolant(), rho.values()[idx], idx, table);
}

namespace {

double sinc(double x) {
    if (std::fabs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

} // namespace

double broadened_collision_operator(Dimension d, const SpectralDensity& rho, double omega,
                                    double t, const BroadenedOptions& opts) {
    if (t <= 0.0) throw domain_error("broadened_collision_operator: t must be > 0");
    const Domain dom = make_domain(rho.grid(), opts.omega_cutoff);
    if (omega < rho.grid().omega_min() || omega > rho.grid().omega_max())
        throw domain_error("broadened_collision_operator: omega outside grid range");

    const double r0 = rho(omega);
    const double lobe = 2.0 * M_PI / t;

    // Inner omega3 panel edges graded around the sinc^2 peak at w3* and
    // expanding geometrically beyond the resolved lobes.
    auto inner_integral = [&](double w1, double w2) {
        const double w3_star = omega - w1 + w2;
        std::vector<double> edges;
        edges.reserve(2 * opts.lobes + 64);
        auto push_side = [&](int dir) {
            double x = w3_star;
            int k = 0;
            while ((dir > 0 ? x < dom.cutoff : x > dom.floor)) {
                double next = w3_star + dir * lobe * (k + 1);
                if (k >= opts.lobes) {
                    const double width = lobe * std::pow(1.6, k - opts.lobes + 1);
                    next = x + dir * width;
                }
                x = next;
                ++k;
                edges.push_back(std::clamp(x, dom.floor, dom.cutoff));
                if (k > 4096) break;
            }
        };
        edges.push_back(std::clamp(w3_star, dom.floor, dom.cutoff));
        push_side(+1);
        push_side(-1);
        edges.push_back(dom.floor);
        edges.push_back(dom.cutoff);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end(),
                                [](double a, double b) { return std::fabs(a - b) < 1e-14; }),
                    edges.end());

        auto f3 = [&](double w3) {
            const double om = w3_star - w3; // resonance modulus
            const double delta_t = (t / (2.0 * M_PI)) * sinc(0.5 * t * om) * sinc(0.5 * t * om);
            const double r1 = rho(w1), r2 = rho(w2), r3 = rho(w3);
            const double f = opts.gain_only ? r1 * r2 * r3 : f_term(r0, r1, r2, r3);
            if (f == 0.0) return 0.0;
            const double kk = kernel_kstar(d, {omega, w1, w2, w3}, opts.tol);
            return kk * f * delta_t;
        };
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            if (edges[i + 1] - edges[i] < 1e-14) continue;
            const int pts = (edges[i + 1] - edges[i] > 2.5 * lobe) ? 16 : 8;
            acc += gl_integrate(f3, edges[i], edges[i + 1], pts);
        }
        return acc;
    };

    // Outer (w1, w2) quadrature with the same kink refinement as the sharp
    // table: the smooth kernel is only C^0 across the signed-wavenumber
    // combination surfaces, evaluated here at the sinc^2 peak w3 = w3*.
    auto square_crosses_kink = [&](double x0, double x1, double y0, double y1) {
        const double a0 = std::sqrt(omega);
        int first_pattern = -1;
        for (double w1 : {x0, x1})
            for (double w2 : {y0, y1}) {
                const double w3 = std::clamp(omega - w1 + w2, dom.floor, dom.cutoff);
                const double a1 = std::sqrt(w1), a2 = std::sqrt(w2), a3 = std::sqrt(w3);
                int pattern = 0;
                for (int m = 0; m < 8; ++m) {
                    const double s1 = (m & 1) ? -1.0 : 1.0;
                    const double s2 = (m & 2) ? -1.0 : 1.0;
                    const double s3 = (m & 4) ? -1.0 : 1.0;
                    if (a0 + s1 * a1 + s2 * a2 + s3 * a3 > 0.0) pattern |= 1 << m;
                }
                if (first_pattern < 0) first_pattern = pattern;
                else if (pattern != first_pattern) return true;
            }
        return false;
    };

    const auto& rule = gauss_legendre(opts.outer_gl);
    long double total = 0.0L;
    const std::function<void(double, double, double, double, int)> do_panel =
        [&](double x0, double x1, double y0, double y1, int depth) {
            if (depth < opts.kink_refine_depth && square_crosses_kink(x0, x1, y0, y1)) {
                const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
                do_panel(x0, xm, y0, ym, depth + 1);
                do_panel(x0, xm, ym, y1, depth + 1);
                do_panel(xm, x1, y0, ym, depth + 1);
                do_panel(xm, x1, ym, y1, depth + 1);
                return;
            }
            const double hx = 0.5 * (x1 - x0), hy = 0.5 * (y1 - y0);
            for (int i = 0; i < opts.outer_gl; ++i) {
                const double w1 = 0.5 * (x0 + x1) + hx * rule.nodes[i];
                for (int j = 0; j < opts.outer_gl; ++j) {
                    const double w2 = 0.5 * (y0 + y1) + hy * rule.nodes[j];
                    const double wgt = hx * hy * rule.weights[i] * rule.weights[j];
                    total += static_cast<long double>(wgt) * inner_integral(w1, w2);
                }
            }
        };

    const double span = (dom.cutoff - dom.floor) / opts.outer_panels;
    for (int pi = 0; pi < opts.outer_panels; ++pi)
        for (int pj = 0; pj < opts.outer_panels; ++pj)
            do_panel(dom.floor + pi * span, dom.floor + (pi + 1) * span,
                     dom.floor + pj * span, dom.floor + (pj + 1) * span, 0);
    return static_cast<double>(total);
}

} // namespace wavekin::collision
