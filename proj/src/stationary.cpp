#include "ellipsim/stationary.hpp"

#include "ellipsim/csv.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace ellipsim {

namespace {

// exp(-V1 - V2 - K) normalized; conv may be null (no interaction)
std::vector<double> gibbs(const Lattice& lat, const ExternalPotentials& ext, const std::vector<double>* K,
                          double* Z_out)
{
    std::size_t const plane = lat.spatial_cells();
    std::vector<double> out(plane * lat.ntheta);
    double const measure = lat.h * lat.h * lat.k();
    // shift the exponent by its minimum so exp never overflows
    std::vector<double> e(out.size());
    double emin = INFINITY;
    for (std::size_t t = 0; t < lat.ntheta; ++t) {
        double const v2 = ext.V2(lat.theta(t));
        for (std::size_t j = 0; j < lat.ny; ++j) {
            for (std::size_t i = 0; i < lat.nx; ++i) {
                std::size_t const c = t * plane + j * lat.nx + i;
                double x = ext.V1(lat.center(i, j)) + v2;
                if (K) {
                    x += (*K)[c];
                }
                e[c] = x;
                emin = std::min(emin, x);
            }
        }
    }
    double Z = 0.0;
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c] = std::exp(-(e[c] - emin));
        Z += out[c];
    }
    Z *= measure;
    for (double& v : out) {
        v /= Z;
    }
    if (Z_out) {
        *Z_out = Z * std::exp(-emin);
    }
    return out;
}

std::unique_ptr<KernelConvolver> value_convolver(const Lattice& lat, const PotentialParams& potential, double m)
{
    if (potential.eps0 == 0.0) {
        return nullptr;
    }
    KernelTable const table = build_kernel_table(lat, potential, m, 1.0);
    return std::make_unique<KernelConvolver>(table, lat.nx, lat.ny,
                                             std::vector<KernelConvolver::Component>{KernelConvolver::value});
}

} // namespace

double l2_distance(const Lattice& lattice, std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("l2_distance: size mismatch");
    }
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        double const d = a[c] - b[c];
        s += d * d;
    }
    return std::sqrt(s * lattice.h * lattice.h * lattice.k());
}

std::vector<double> stationary_map(const Lattice& lattice, const ExternalPotentials& ext,
                                   const PotentialParams& potential, double m, std::span<const double> q, double* Z)
{
    auto const conv = value_convolver(lattice, potential, m);
    if (!conv) {
        return gibbs(lattice, ext, nullptr, Z);
    }
    std::vector<std::vector<double>> K;
    conv->apply(q, K);
    return gibbs(lattice, ext, &K[0], Z);
}

StationaryState solve_stationary_q(const Lattice& lattice, const ExternalPotentials& ext,
                                   const PotentialParams& potential, double m, const StationaryOptions& opt)
{
    if (lattice.ntheta == 0) {
        throw std::invalid_argument("stationary solve needs ntheta > 0");
    }
    StationaryState st;
    st.q = gibbs(lattice, ext, nullptr, &st.Z);
    auto const conv = value_convolver(lattice, potential, m);
    double const measure = lattice.h * lattice.h * lattice.k();
    std::vector<std::vector<double>> K;
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        std::vector<double> next;
        if (conv) {
            conv->apply(st.q, K);
            next = gibbs(lattice, ext, &K[0], &st.Z);
        } else {
            next = gibbs(lattice, ext, nullptr, &st.Z);
        }
        double change = 0.0;
        double mass = 0.0;
        for (std::size_t c = 0; c < next.size(); ++c) {
            double const v = (1.0 - opt.damping) * st.q[c] + opt.damping * next[c];
            double const d = v - st.q[c];
            change += d * d;
            st.q[c] = v;
            mass += v;
        }
        mass *= measure;
        for (double& v : st.q) {
            v /= mass;
        }
        st.iterations = it;
        st.residual = std::sqrt(change * measure);
        if (st.residual < opt.tolerance) {
            return st;
        }
    }
    throw ConvergenceError("stationary iteration did not converge after " + std::to_string(opt.max_iterations) +
                               " iterations, last change " + format_double(st.residual),
                           st.residual);
}

double fit_decay_rate(std::span<const double> times, std::span<const double> errors, std::optional<FitWindow> window)
{
    if (times.size() != errors.size()) {
        throw std::invalid_argument("fit_decay_rate: times and errors differ in length");
    }
    double t0 = times.empty() ? 0.0 : times.front();
    double t1 = INFINITY;
    if (window) {
        t0 = window->t_begin;
        t1 = window->t_end;
    } else if (!errors.empty()) {
        double const stop = 1e-3 * errors.front();
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (errors[i] < stop) {
                t1 = times[i];
                break;
            }
        }
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t0 || times[i] > t1 || !(errors[i] > 0.0)) {
            continue;
        }
        double const x = times[i];
        double const y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) {
        throw std::invalid_argument("fit_decay_rate: need at least 3 positive samples in the window");
    }
    double const nn = double(n);
    double const den = nn * sxx - sx * sx;
    if (den <= 0.0) {
        throw std::invalid_argument("fit_decay_rate: sample times are degenerate");
    }
    double const slope = (nn * sxy - sx * sy) / den;
    return std::max(0.0, -slope);
}

std::size_t count_local_maxima(std::span<const double> s)
{
    std::size_t n = 0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i] > s[i - 1] && s[i] > s[i + 1]) {
            ++n;
        }
    }
    return n;
}

bool is_oscillatory(std::span<const double> series) { return count_local_maxima(series) >= 2; }

void write_error_series_csv(std::ostream& out, std::span<const double> times, std::span<const double> errors)
{
    CsvWriter w(out, {"t", "l2_error"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        w.row(times[i], errors[i]);
    }
}

void write_decay_csv(std::ostream& out, std::span<const DecayRow> rows)
{
    CsvWriter w(out, {"A", "B", "lambda"});
    for (const auto& r : rows) {
        w.row(r.A, r.B, r.lambda);
    }
}

} // namespace ellipsim
