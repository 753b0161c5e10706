#include "ellipsim/kernel_table.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace ellipsim {

KernelTable build_kernel_table(double h, std::size_t ntheta, const PotentialParams& potential, double m, double I_c,
                               double measure, double period)
{
    if (!(h > 0.0) || ntheta == 0) {
        throw std::invalid_argument("kernel table: need h > 0 and ntheta >= 1");
    }
    if (!(period > 0.0)) {
        throw std::invalid_argument("kernel table: angular period must be positive");
    }
    KernelTable t;
    double const rc = cutoff_radius(potential);
    t.s = potential.eps0 > 0.0 ? std::size_t(std::ceil(rc / h)) : 0;
    t.ntheta = ntheta;
    t.h = h;
    t.period = period;
    t.k = period / double(ntheta);
    t.measure = measure;
    std::size_t const n = t.size();
    t.value.assign(n, 0.0);
    t.fx.assign(n, 0.0);
    t.fy.assign(n, 0.0);
    t.torque.assign(n, 0.0);
    if (potential.eps0 == 0.0) {
        return t;
    }
    double const wf = measure / m;
    double const wt = measure / I_c;
    long const s = long(t.s);
    for (long dj = -s; dj <= s; ++dj) {
        for (long di = -s; di <= s; ++di) {
            Vec2 const d{double(di) * h, double(dj) * h};
            if (norm(d) >= rc) {
                continue;
            }
            for (std::size_t a = 0; a < ntheta; ++a) {
                for (std::size_t b = 0; b < ntheta; ++b) {
                    PotentialEval const e = potential_eval({0.0, 0.0}, d, t.angle(a), t.angle(b), potential);
                    std::size_t const idx = t.index(di, dj, a, b);
                    t.value[idx] = e.value * wf;
                    t.fx[idx] = e.grad.grad_r.x * wf;
                    t.fy[idx] = e.grad.grad_r.y * wf;
                    t.torque[idx] = e.grad.dtheta * wt;
                }
            }
        }
    }
    return t;
}

KernelTable build_kernel_table(const Lattice& lattice, const PotentialParams& potential, double m, double I_c)
{
    return build_kernel_table(lattice.h, lattice.ntheta, potential, m, I_c, lattice.h * lattice.h * lattice.k());
}

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

// smallest n' >= n with no prime factor above 7
std::size_t fft_size(std::size_t n)
{
    for (std::size_t c = std::max<std::size_t>(n, 1);; ++c) {
        std::size_t r = c;
        for (std::size_t p : {2, 3, 5, 7}) {
            while (r % p == 0) {
                r /= p;
            }
        }
        if (r == 1) {
            return c;
        }
    }
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
        if (ptr == nullptr) {
            throw std::bad_alloc();
        }
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    void* ptr;
};

} // namespace

struct KernelConvolver::Impl {
    std::size_t nx = 0, ny = 0, ntheta = 0;
    std::size_t nfold = 0;
    bool fold = false;
    std::size_t px = 0, py = 0, pxc = 0;
    std::size_t spec_len = 0;
    // kernel spectra [component][t][tb][spec_len]
    std::vector<std::vector<std::complex<double>>> kernel;
    FftwBuffer real_buf;
    FftwBuffer spec_buf;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    Impl(std::size_t nx_, std::size_t ny_, std::size_t nt_, std::size_t s)
        : nx(nx_), ny(ny_), ntheta(nt_), nfold(nt_ % 2 == 0 ? nt_ / 2 : nt_), fold(nt_ % 2 == 0),
          px(fft_size(std::max(nx_ + s, 2 * s + 1))), py(fft_size(std::max(ny_ + s, 2 * s + 1))), pxc(px / 2 + 1),
          spec_len(py * pxc), real_buf(sizeof(double) * px * py), spec_buf(sizeof(fftw_complex) * spec_len)
    {
        std::lock_guard lock(planner_mutex());
        forward = fftw_plan_dft_r2c_2d(int(py), int(px), real(), spec(), FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_2d(int(py), int(px), spec(), real(), FFTW_ESTIMATE);
        if (forward == nullptr || backward == nullptr) {
            throw std::runtime_error("kernel convolver: FFTW planning failed");
        }
    }
    ~Impl()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }

    double* real() const { return static_cast<double*>(real_buf.ptr); }
    fftw_complex* spec() const { return static_cast<fftw_complex*>(spec_buf.ptr); }
    std::complex<double>* spec_c() const { return reinterpret_cast<std::complex<double>*>(spec_buf.ptr); }
};

KernelConvolver::KernelConvolver(const KernelTable& table, std::size_t nx, std::size_t ny,
                                 std::vector<Component> components)
    : impl_(std::make_unique<Impl>(nx, ny, table.ntheta, table.s)), components_(std::move(components))
{
    if (table.period != kTwoPi) {
        throw std::invalid_argument("kernel convolver needs a table over the full circle");
    }
    Impl& im = *impl_;
    long const s = long(table.s);
    im.kernel.resize(components_.size());
    for (std::size_t ci = 0; ci < components_.size(); ++ci) {
        const std::vector<double>& src = components_[ci] == value   ? table.value
                                         : components_[ci] == fx    ? table.fx
                                         : components_[ci] == fy    ? table.fy
                                                                    : table.torque;
        auto& dst = im.kernel[ci];
        dst.resize(im.nfold * im.nfold * im.spec_len);
        for (std::size_t t = 0; t < im.nfold; ++t) {
            for (std::size_t tb = 0; tb < im.nfold; ++tb) {
                std::fill_n(im.real(), im.px * im.py, 0.0);
                // flipped kernel K'(e) = K(-e) so that the product is a convolution
                for (long ey = -s; ey <= s; ++ey) {
                    for (long ex = -s; ex <= s; ++ex) {
                        std::size_t const ix = std::size_t((ex + long(im.px)) % long(im.px));
                        std::size_t const iy = std::size_t((ey + long(im.py)) % long(im.py));
                        im.real()[iy * im.px + ix] = src[table.index(-ex, -ey, t, tb)];
                    }
                }
                fftw_execute(im.forward);
                std::copy_n(im.spec_c(), im.spec_len, dst.data() + (t * im.nfold + tb) * im.spec_len);
            }
        }
    }
}

KernelConvolver::~KernelConvolver() = default;

void KernelConvolver::apply(std::span<const double> density, std::vector<std::vector<double>>& out) const
{
    const Impl& im = *impl_;
    std::size_t const plane = im.nx * im.ny;
    if (density.size() != plane * im.ntheta) {
        throw std::invalid_argument("kernel convolver: density size does not match the lattice");
    }
    // forward transforms of the (folded) density slices
    std::vector<std::complex<double>> dspec(im.nfold * im.spec_len);
    for (std::size_t tb = 0; tb < im.nfold; ++tb) {
        std::fill_n(im.real(), im.px * im.py, 0.0);
        for (std::size_t j = 0; j < im.ny; ++j) {
            for (std::size_t i = 0; i < im.nx; ++i) {
                double v = density[tb * plane + j * im.nx + i];
                if (im.fold) {
                    v += density[(tb + im.nfold) * plane + j * im.nx + i];
                }
                im.real()[j * im.px + i] = v;
            }
        }
        fftw_execute(im.forward);
        std::copy_n(im.spec_c(), im.spec_len, dspec.data() + tb * im.spec_len);
    }

    out.resize(components_.size());
    double const norm = 1.0 / double(im.px * im.py);
    for (std::size_t ci = 0; ci < components_.size(); ++ci) {
        auto& o = out[ci];
        o.assign(plane * im.ntheta, 0.0);
        for (std::size_t t = 0; t < im.nfold; ++t) {
            std::complex<double>* acc = im.spec_c();
            std::fill_n(acc, im.spec_len, std::complex<double>{});
            for (std::size_t tb = 0; tb < im.nfold; ++tb) {
                const std::complex<double>* k = im.kernel[ci].data() + (t * im.nfold + tb) * im.spec_len;
                const std::complex<double>* d = dspec.data() + tb * im.spec_len;
                for (std::size_t n = 0; n < im.spec_len; ++n) {
                    acc[n] += k[n] * d[n];
                }
            }
            fftw_execute(im.backward);
            for (std::size_t j = 0; j < im.ny; ++j) {
                for (std::size_t i = 0; i < im.nx; ++i) {
                    double const v = im.real()[j * im.px + i] * norm;
                    o[t * plane + j * im.nx + i] = v;
                    if (im.fold) {
                        o[(t + im.nfold) * plane + j * im.nx + i] = v;
                    }
                }
            }
        }
    }
}

} // namespace ellipsim
