#include "ellipsim/flowfield.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ellipsim {

namespace {

FlowSample with_rot(Vec2 u, Mat2 jac)
{
    return {u, jac, jac.yx - jac.xy};
}

void validate(const flow::Gridded& g)
{
    if (g.nx < 2 || g.ny < 2) {
        throw std::invalid_argument("gridded flow: need at least 2x2 nodes");
    }
    if (!(g.dx > 0.0) || !(g.dy > 0.0)) {
        throw std::invalid_argument("gridded flow: spacing must be positive");
    }
    if (g.u1.size() != g.nx * g.ny || g.u2.size() != g.nx * g.ny) {
        throw std::invalid_argument("gridded flow: expected " + std::to_string(g.nx * g.ny) + " nodes");
    }
}

} // namespace

FlowField::FlowField(Kind kind) : kind_(std::move(kind))
{
    auto const* g = std::get_if<flow::Gridded>(&kind_);
    if (g == nullptr) {
        return;
    }
    validate(*g);
    // central differences, one-sided on the outer nodes
    node_jac_.resize(g->nx * g->ny);
    auto at = [&](const std::vector<double>& a, std::size_t i, std::size_t j) { return a[j * g->nx + i]; };
    for (std::size_t j = 0; j < g->ny; ++j) {
        std::size_t const jm = j == 0 ? 0 : j - 1;
        std::size_t const jp = j + 1 == g->ny ? j : j + 1;
        for (std::size_t i = 0; i < g->nx; ++i) {
            std::size_t const im = i == 0 ? 0 : i - 1;
            std::size_t const ip = i + 1 == g->nx ? i : i + 1;
            double const hx = double(ip - im) * g->dx;
            double const hy = double(jp - jm) * g->dy;
            Mat2& m = node_jac_[j * g->nx + i];
            m.xx = (at(g->u1, ip, j) - at(g->u1, im, j)) / hx;
            m.xy = (at(g->u1, i, jp) - at(g->u1, i, jm)) / hy;
            m.yx = (at(g->u2, ip, j) - at(g->u2, im, j)) / hx;
            m.yy = (at(g->u2, i, jp) - at(g->u2, i, jm)) / hy;
        }
    }
}

FlowSample FlowField::eval(const Vec2& r) const
{
    struct Visitor {
        const FlowField& self;
        const Vec2& r;
        FlowSample operator()(const flow::TopBottom&) const { return with_rot({-r.x, r.y}, {-1.0, 0.0, 0.0, 1.0}); }
        FlowSample operator()(const flow::Rotational&) const { return with_rot({r.y, -r.x}, {0.0, 1.0, -1.0, 0.0}); }
        FlowSample operator()(const flow::Uniform& f) const { return with_rot(f.c, {}); }
        FlowSample operator()(const flow::Gridded& g) const { return self.eval_grid(g, r); }
    };
    return std::visit(Visitor{*this, r}, kind_);
}

FlowSample FlowField::eval_grid(const flow::Gridded& g, const Vec2& r) const
{
    // clamp into the node box, then locate the cell
    double const fx = std::clamp((r.x - g.x0) / g.dx, 0.0, double(g.nx - 1));
    double const fy = std::clamp((r.y - g.y0) / g.dy, 0.0, double(g.ny - 1));
    std::size_t const i = std::min(std::size_t(fx), g.nx - 2);
    std::size_t const j = std::min(std::size_t(fy), g.ny - 2);
    double const tx = fx - double(i);
    double const ty = fy - double(j);
    double const w00 = (1 - tx) * (1 - ty);
    double const w10 = tx * (1 - ty);
    double const w01 = (1 - tx) * ty;
    double const w11 = tx * ty;
    std::size_t const n00 = j * g.nx + i;
    std::size_t const n10 = n00 + 1;
    std::size_t const n01 = n00 + g.nx;
    std::size_t const n11 = n01 + 1;

    auto lerp = [&](const std::vector<double>& a) {
        return w00 * a[n00] + w10 * a[n10] + w01 * a[n01] + w11 * a[n11];
    };
    Mat2 jac = w00 * node_jac_[n00];
    jac += w10 * node_jac_[n10];
    jac += w01 * node_jac_[n01];
    jac += w11 * node_jac_[n11];
    return with_rot({lerp(g.u1), lerp(g.u2)}, jac);
}

double jeffery_g(double theta, const FlowSample& sample, double lambda_shape)
{
    const Mat2& j = sample.jac;
    double const exx = j.xx;
    double const eyy = j.yy;
    double const exy = 0.5 * (j.xy + j.yx);
    double const c = std::cos(theta);
    double const s = std::sin(theta);
    // (-s, c) E (c, s)^T
    double const strain = -s * (exx * c + exy * s) + c * (exy * c + eyy * s);
    return 0.5 * sample.rot + lambda_shape * strain;
}

namespace {

bool parse_double(std::string_view tok, double& out)
{
    // strtod handles the full decimal and exponent grammar; from_chars for
    // doubles is not available on every toolchain we build with
    std::string const s(tok);
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && !s.empty();
}

std::vector<std::string> split_ws(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        out.push_back(tok);
    }
    return out;
}

} // namespace

FlowField load_grid_field(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header 'nx ny x0 y0 dx dy'");
    }
    ++lineno;
    auto const head = split_ws(line);
    if (head.size() != 6) {
        throw ParseError(lineno, "header must have 6 fields 'nx ny x0 y0 dx dy'");
    }
    flow::Gridded g;
    {
        auto parse_size = [&](const std::string& tok, std::size_t& out) {
            auto const res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
                throw ParseError(lineno, "bad node count '" + tok + "'");
            }
        };
        parse_size(head[0], g.nx);
        parse_size(head[1], g.ny);
        double* dst[4] = {&g.x0, &g.y0, &g.dx, &g.dy};
        for (int k = 0; k < 4; ++k) {
            if (!parse_double(head[2 + k], *dst[k]) || !std::isfinite(*dst[k])) {
                throw ParseError(lineno, "bad header value '" + head[2 + k] + "'");
            }
        }
        if (g.nx < 2 || g.ny < 2) {
            throw ParseError(lineno, "need at least 2x2 nodes");
        }
        if (!(g.dx > 0.0) || !(g.dy > 0.0)) {
            throw ParseError(lineno, "spacing must be positive");
        }
    }
    std::size_t const expected = g.nx * g.ny;
    g.u1.reserve(expected);
    g.u2.reserve(expected);
    while (std::getline(in, line)) {
        ++lineno;
        auto const tok = split_ws(line);
        if (tok.empty()) {
            continue;
        }
        if (tok.size() != 2) {
            throw ParseError(lineno, "expected 2 values 'u1 u2'");
        }
        double a = 0.0, b = 0.0;
        if (!parse_double(tok[0], a) || !parse_double(tok[1], b)) {
            throw ParseError(lineno, "not a number");
        }
        if (!std::isfinite(a) || !std::isfinite(b)) {
            throw ParseError(lineno, "non-finite velocity");
        }
        if (g.u1.size() == expected) {
            throw ParseError(lineno, "expected " + std::to_string(expected) + " rows, found more");
        }
        g.u1.push_back(a);
        g.u2.push_back(b);
    }
    if (g.u1.size() != expected) {
        throw ParseError(lineno, "expected " + std::to_string(expected) + " rows, found " +
                                     std::to_string(g.u1.size()));
    }
    return FlowField(std::move(g));
}

FlowField load_grid_field_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open flow field file '" + path + "'");
    }
    return load_grid_field(in);
}

void write_grid_field(std::ostream& out, const flow::Gridded& g)
{
    auto const old = out.precision(std::numeric_limits<double>::max_digits10);
    out << g.nx << ' ' << g.ny << ' ' << g.x0 << ' ' << g.y0 << ' ' << g.dx << ' ' << g.dy << '\n';
    for (std::size_t n = 0; n < g.nx * g.ny; ++n) {
        out << g.u1[n] << ' ' << g.u2[n] << '\n';
    }
    out.precision(old);
}

flow::Gridded cavity_standin(std::size_t nodes)
{
    if (nodes < 2) {
        throw std::invalid_argument("cavity field needs at least 2 nodes per side");
    }
    double const h = 1.0 / double(nodes - 1);
    double const tail = std::exp(-12.5);
    // the parabola cancels the gaussian's slope at x = 0 and 1, so no flux leaves through the side walls
    double const b = -50.0 * tail;
    return sample_grid(nodes, nodes, 0.0, 0.0, h, h, [&](const Vec2& p) {
        double const e = std::exp(-(p.x - 0.5) * (p.x - 0.5) / 0.02);
        double const G = e - tail - b * ((p.x - 0.5) * (p.x - 0.5) - 0.25);
        double const dG = -(p.x - 0.5) / 0.01 * e - 2.0 * b * (p.x - 0.5);
        double const Y = p.y * p.y * (p.y - 1.0);
        double const dY = 3.0 * p.y * p.y - 2.0 * p.y;
        return Vec2{G * dY, -dG * Y};
    });
}

} // namespace ellipsim
