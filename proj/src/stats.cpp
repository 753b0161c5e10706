#include "ellipsim/stats.hpp"

#include "ellipsim/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ellipsim {

HistGeometry HistGeometry::spatial(const Rect& domain, double h)
{
    if (!(h > 0.0)) {
        throw std::invalid_argument("histogram bin size must be positive");
    }
    auto const nx = std::llround(domain.width() / h);
    auto const ny = std::llround(domain.height() / h);
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("histogram needs at least one bin per axis");
    }
    return {domain, std::size_t(nx), std::size_t(ny)};
}

HistGeometry HistGeometry::angular(std::size_t nbins)
{
    if (nbins == 0) {
        throw std::invalid_argument("angular histogram needs at least one bin");
    }
    return {Rect{0.0, kTwoPi, 0.0, 0.0}, nbins, 0};
}

double HistGeometry::measure() const
{
    if (is_angular()) {
        return kTwoPi / double(nx);
    }
    return (domain.width() / double(nx)) * (domain.height() / double(ny));
}

double DensityHistogram::mass() const
{
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s * geom.measure();
}

namespace {

// bin of x in [lo, lo + n w); -1 / n signal outside
long bin_of(double x, double lo, double w, std::size_t n)
{
    double const f = std::floor((x - lo) / w);
    if (f < 0.0) {
        return -1;
    }
    if (f >= double(n)) {
        return long(n);
    }
    return long(f);
}

void accumulate(std::span<const ParticleState> particles, const HistGeometry& g, OutsidePolicy policy,
                std::vector<double>& counts, std::size_t& outside)
{
    if (g.is_angular()) {
        double const w = kTwoPi / double(g.nx);
        for (const auto& p : particles) {
            long b = bin_of(wrap_angle(p.theta), 0.0, w, g.nx);
            b = std::clamp(b, 0L, long(g.nx) - 1);
            counts[std::size_t(b)] += 1.0;
        }
        return;
    }
    double const wx = g.domain.width() / double(g.nx);
    double const wy = g.domain.height() / double(g.ny);
    for (const auto& p : particles) {
        long bx = bin_of(p.r.x, g.domain.xmin, wx, g.nx);
        long by = bin_of(p.r.y, g.domain.ymin, wy, g.ny);
        // the closed upper edge belongs to the last bin
        if (bx == long(g.nx) && p.r.x == g.domain.xmax) {
            bx = long(g.nx) - 1;
        }
        if (by == long(g.ny) && p.r.y == g.domain.ymax) {
            by = long(g.ny) - 1;
        }
        bool const out = bx < 0 || by < 0 || bx >= long(g.nx) || by >= long(g.ny);
        if (out) {
            ++outside;
            if (policy == OutsidePolicy::drop) {
                continue;
            }
            bx = std::clamp(bx, 0L, long(g.nx) - 1);
            by = std::clamp(by, 0L, long(g.ny) - 1);
        }
        counts[std::size_t(by) * g.nx + std::size_t(bx)] += 1.0;
    }
}

} // namespace

DensityHistogram histogram(std::span<const ParticleState> particles, const HistGeometry& geom, OutsidePolicy policy)
{
    DensityHistogram h{geom, std::vector<double>(geom.size(), 0.0), 0};
    accumulate(particles, geom, policy, h.values, h.outside);
    if (!particles.empty()) {
        double const norm = 1.0 / (double(particles.size()) * geom.measure());
        for (double& v : h.values) {
            v *= norm;
        }
    }
    return h;
}

DensityHistogram histogram(std::span<const std::vector<ParticleState>> stack, const HistGeometry& geom,
                           OutsidePolicy policy)
{
    DensityHistogram avg{geom, std::vector<double>(geom.size(), 0.0), 0};
    if (stack.empty()) {
        return avg;
    }
    for (const auto& run : stack) {
        DensityHistogram const h = histogram(std::span<const ParticleState>(run), geom, policy);
        for (std::size_t b = 0; b < h.values.size(); ++b) {
            avg.values[b] += h.values[b];
        }
        avg.outside += h.outside;
    }
    for (double& v : avg.values) {
        v /= double(stack.size());
    }
    return avg;
}

namespace {

// Transfer matrix T[i][j]: share of bin i that lands in bin j.
std::vector<double> smoothing_matrix(std::size_t n, double bin, double bandwidth, bool periodic)
{
    std::vector<double> T(n * n, 0.0);
    long const reach = long(std::floor(4.0 * bandwidth / bin));
    std::vector<double> w(std::size_t(2 * reach + 1));
    double total = 0.0;
    for (long d = -reach; d <= reach; ++d) {
        double const x = double(d) * bin / bandwidth;
        w[std::size_t(d + reach)] = std::exp(-0.5 * x * x);
        total += w[std::size_t(d + reach)];
    }
    for (double& v : w) {
        v /= total;
    }
    long const nn = long(n);
    for (long i = 0; i < nn; ++i) {
        for (long d = -reach; d <= reach; ++d) {
            long j = i + d;
            if (periodic) {
                j = ((j % nn) + nn) % nn;
            } else {
                // fold onto [0, n) by mirror images about the outer edges
                long const period = 2 * nn;
                j = ((j % period) + period) % period;
                if (j >= nn) {
                    j = period - 1 - j;
                }
            }
            T[std::size_t(i) * n + std::size_t(j)] += w[std::size_t(d + reach)];
        }
    }
    return T;
}

} // namespace

DensityHistogram smooth(const DensityHistogram& hist, double bandwidth)
{
    if (!(bandwidth > 0.0)) {
        throw std::invalid_argument("smoothing bandwidth must be positive");
    }
    const HistGeometry& g = hist.geom;
    DensityHistogram out = hist;
    if (g.is_angular()) {
        auto const T = smoothing_matrix(g.nx, kTwoPi / double(g.nx), bandwidth, true);
        std::fill(out.values.begin(), out.values.end(), 0.0);
        for (std::size_t i = 0; i < g.nx; ++i) {
            for (std::size_t j = 0; j < g.nx; ++j) {
                out.values[j] += T[i * g.nx + j] * hist.values[i];
            }
        }
        return out;
    }
    auto const Tx = smoothing_matrix(g.nx, g.domain.width() / double(g.nx), bandwidth, false);
    auto const Ty = smoothing_matrix(g.ny, g.domain.height() / double(g.ny), bandwidth, false);
    std::vector<double> tmp(g.size(), 0.0);
    for (std::size_t y = 0; y < g.ny; ++y) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            double const v = hist.values[y * g.nx + i];
            if (v == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < g.nx; ++j) {
                tmp[y * g.nx + j] += Tx[i * g.nx + j] * v;
            }
        }
    }
    std::fill(out.values.begin(), out.values.end(), 0.0);
    for (std::size_t i = 0; i < g.ny; ++i) {
        for (std::size_t j = 0; j < g.ny; ++j) {
            double const t = Ty[i * g.ny + j];
            if (t == 0.0) {
                continue;
            }
            for (std::size_t x = 0; x < g.nx; ++x) {
                out.values[j * g.nx + x] += t * tmp[i * g.nx + x];
            }
        }
    }
    return out;
}

DensityHistogram angular_distribution(std::span<const ParticleState> particles, std::size_t nbins)
{
    return histogram(particles, HistGeometry::angular(nbins));
}

DensityHistogram angular_distribution(std::span<const std::vector<ParticleState>> stack, std::size_t nbins)
{
    return histogram(stack, HistGeometry::angular(nbins));
}

DensityHistogram as_histogram(const HistGeometry& geom, std::vector<double> values)
{
    if (values.size() != geom.size()) {
        throw std::invalid_argument("as_histogram: value count does not match the geometry");
    }
    return {geom, std::move(values), 0};
}

double field_distance(const DensityHistogram& a, const DensityHistogram& b, Norm norm)
{
    if (!(a.geom == b.geom) || a.values.size() != b.values.size()) {
        throw std::invalid_argument("field_distance: geometries differ");
    }
    double const m = a.geom.measure();
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        double const d = std::abs(a.values[i] - b.values[i]);
        s += norm == Norm::L1 ? d : d * d;
    }
    s *= m;
    return norm == Norm::L1 ? s : std::sqrt(s);
}

std::size_t peak_bin(const DensityHistogram& h)
{
    return std::size_t(std::max_element(h.values.begin(), h.values.end()) - h.values.begin());
}

void write_histogram_csv(std::ostream& out, const DensityHistogram& h)
{
    if (h.geom.is_angular()) {
        CsvWriter w(out, {"itheta", "value"});
        for (std::size_t i = 0; i < h.values.size(); ++i) {
            w.row(i, h.values[i]);
        }
        return;
    }
    CsvWriter w(out, {"ix", "iy", "value"});
    for (std::size_t y = 0; y < h.geom.ny; ++y) {
        for (std::size_t x = 0; x < h.geom.nx; ++x) {
            w.row(x, y, h.values[y * h.geom.nx + x]);
        }
    }
}

void write_particles_csv(std::ostream& out, double t, std::span<const std::vector<ParticleState>> stack)
{
    CsvWriter w(out, {"t", "id", "x", "y", "vx", "vy", "theta", "omega"});
    for (std::size_t k = 0; k < stack.size(); ++k) {
        std::size_t const n = stack[k].size();
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = stack[k][i];
            w.row(t, k * n + i, p.r.x, p.r.y, p.v.x, p.v.y, p.theta, p.omega);
        }
    }
}

} // namespace ellipsim
