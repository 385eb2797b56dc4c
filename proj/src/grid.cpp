#include "pbl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace pbl {

std::string to_string(const StretchLaw& law) {
    std::ostringstream os;
    switch (law.kind) {
        case StretchKind::uniform: return "uniform";
        case StretchKind::geometric: os << "geometric(" << law.param << ")"; break;
        case StretchKind::tanh: os << "tanh(" << law.param << ")"; break;
    }
    return os.str();
}

StretchLaw parse_stretch(const std::string& text) {
    if (text == "uniform") return StretchLaw::uniform();
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("bad stretch law: " + text);
    std::string head = text.substr(0, open);
    double p = std::stod(text.substr(open + 1, close - open - 1));
    if (head == "geometric") return StretchLaw::geometric(p);
    if (head == "tanh") return StretchLaw::tanh(p);
    throw std::invalid_argument("bad stretch law: " + text);
}

std::string to_string(Frame f) {
    switch (f) {
        case Frame::physical_y: return "physical_y";
        case Frame::von_mises_eta: return "von_mises_eta";
        case Frame::euler_Y: return "euler_Y";
    }
    return "?";
}

Frame parse_frame(const std::string& s) {
    if (s == "physical_y") return Frame::physical_y;
    if (s == "von_mises_eta") return Frame::von_mises_eta;
    if (s == "euler_Y") return Frame::euler_Y;
    throw std::invalid_argument("bad frame: " + s);
}

namespace {

void validate_axis(const std::vector<double>& v, double origin, const char* what) {
    if (v.size() < 8) throw std::invalid_argument(std::string(what) + ": fewer than 8 nodes");
    if (v.front() != origin)
        throw std::invalid_argument(std::string(what) + ": first node must equal the origin");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]) || !std::isfinite(v[i]))
            throw std::invalid_argument(std::string(what) + ": nodes not strictly increasing");
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    v.back() = b;
    return v;
}

}  // namespace

GridPtr make_grid(double x_max, int nx, double y_max, int ny, StretchLaw law, int stencil_order) {
    if (stencil_order != 2 && stencil_order != 4)
        throw std::invalid_argument("stencil_order must be 2 or 4");
    if (nx < 8 || ny < 8) throw std::invalid_argument("node counts must be >= 8");
    if (!(x_max >= 10.0)) throw std::invalid_argument("x_max must be >= 10");
    if (!(y_max > 0.0)) throw std::invalid_argument("y_max must be positive");

    auto g = std::make_shared<Grid>();
    g->stretch = law;
    g->stencil_order = stencil_order;
    switch (law.kind) {
        case StretchKind::uniform:
            g->x = linspace(1.0, x_max, nx);
            g->y = linspace(0.0, y_max, ny);
            break;
        case StretchKind::geometric: {
            double r = law.param;
            if (!(r > 1.0 && r <= 1.2)) throw std::invalid_argument("geometric ratio must lie in (1, 1.2]");
            double dy0 = y_max * (r - 1.0) / (std::pow(r, ny - 1) - 1.0);
            g->y.resize(ny);
            for (int j = 0; j < ny; ++j) g->y[j] = dy0 * (std::pow(r, j) - 1.0) / (r - 1.0);
            g->y.back() = y_max;
            break;
        }
        case StretchKind::tanh: {
            double b = law.param;
            if (!(b > 0.0)) throw std::invalid_argument("tanh beta must be positive");
            g->y.resize(ny);
            for (int j = 0; j < ny; ++j) {
                double s = 1.0 - double(j) / (ny - 1);
                g->y[j] = y_max * (1.0 - std::tanh(b * s) / std::tanh(b));
            }
            g->y.front() = 0.0;
            g->y.back() = y_max;
            auto in_layer = std::count_if(g->y.begin(), g->y.end(), [](double v) { return v <= 5.0; });
            if (4 * in_layer < ny)
                throw std::invalid_argument("tanh stretching puts fewer than 25% of nodes in [0, 5]");
            break;
        }
    }
    if (law.kind != StretchKind::uniform) {
        g->x.resize(nx);
        for (int i = 0; i < nx; ++i) g->x[i] = std::pow(x_max, double(i) / (nx - 1));
        g->x.front() = 1.0;
        g->x.back() = x_max;
    }
    validate_axis(g->x, 1.0, "x");
    validate_axis(g->y, 0.0, "y");
    return g;
}

GridPtr grid_from_nodes(std::vector<double> x, std::vector<double> y, StretchLaw law, int stencil_order) {
    if (stencil_order != 2 && stencil_order != 4)
        throw std::invalid_argument("stencil_order must be 2 or 4");
    validate_axis(x, 1.0, "x");
    validate_axis(y, 0.0, "y");
    auto g = std::make_shared<Grid>();
    g->x = std::move(x);
    g->y = std::move(y);
    g->stretch = law;
    g->stencil_order = stencil_order;
    return g;
}

GridPtr subsample(const GridPtr& g, int stride) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < g->nx(); i += stride) x.push_back(g->x[i]);
    for (std::size_t j = 0; j < g->ny(); j += stride) y.push_back(g->y[j]);
    return grid_from_nodes(std::move(x), std::move(y), g->stretch, g->stencil_order);
}

Field2D::Field2D(GridPtr g, Frame f, std::string n, double fill)
    : grid(std::move(g)), frame(f), name(std::move(n)) {
    nx_ = grid->nx();
    ny_ = grid->ny();
    values.assign(nx_ * ny_, fill);
}

double Field2D::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Field2D::column_max_abs(std::size_t i) const {
    double m = 0.0;
    for (double v : column(i)) m = std::max(m, std::abs(v));
    return m;
}

void Field2D::require_finite() const {
    for (std::size_t k = 0; k < values.size(); ++k)
        if (!std::isfinite(values[k])) {
            std::ostringstream os;
            os << "non-finite value in field '" << name << "' at (" << k / ny_ << ", " << k % ny_ << ")";
            throw std::runtime_error(os.str());
        }
}

Field2D Field2D::renamed(std::string n) const {
    Field2D r = *this;
    r.name = std::move(n);
    return r;
}

namespace {

void same_shape(const Field2D& a, const Field2D& b) {
    if (a.nx() != b.nx() || a.ny() != b.ny())
        throw std::invalid_argument("field shapes differ: " + a.name + " vs " + b.name);
}

template <class Op>
Field2D zip(const Field2D& a, const Field2D& b, Op op) {
    same_shape(a, b);
    Field2D r(a.grid, a.frame, a.name);
    for (std::size_t k = 0; k < r.values.size(); ++k) r.values[k] = op(a.values[k], b.values[k]);
    return r;
}

}  // namespace

Field2D operator+(const Field2D& a, const Field2D& b) { return zip(a, b, std::plus<>{}); }
Field2D operator-(const Field2D& a, const Field2D& b) { return zip(a, b, std::minus<>{}); }
Field2D operator*(const Field2D& a, const Field2D& b) { return zip(a, b, std::multiplies<>{}); }

Field2D operator*(double c, const Field2D& a) {
    Field2D r = a;
    for (double& v : r.values) v *= c;
    return r;
}

Field2D& operator+=(Field2D& a, const Field2D& b) {
    same_shape(a, b);
    for (std::size_t k = 0; k < a.values.size(); ++k) a.values[k] += b.values[k];
    return a;
}

Field2D map_field(const Field2D& a, const std::function<double(double, double, double)>& f,
                  std::string name) {
    Field2D r(a.grid, a.frame, name.empty() ? a.name : std::move(name));
    for (std::size_t i = 0; i < a.nx(); ++i)
        for (std::size_t j = 0; j < a.ny(); ++j) r(i, j) = f(a.x(i), a.y(j), a(i, j));
    return r;
}

Field2D sample_field(const GridPtr& g, Frame frame, std::string name,
                     const std::function<double(double, double)>& f) {
    Field2D r(g, frame, std::move(name));
    for (std::size_t i = 0; i < g->nx(); ++i)
        for (std::size_t j = 0; j < g->ny(); ++j) r(i, j) = f(g->x[i], g->y[j]);
    return r;
}

Field2D restrict_field(const Field2D& a, const GridPtr& coarse, int stride) {
    Field2D r(coarse, a.frame, a.name);
    for (std::size_t i = 0; i < coarse->nx(); ++i)
        for (std::size_t j = 0; j < coarse->ny(); ++j) r(i, j) = a(i * stride, j * stride);
    return r;
}

std::vector<double> fd_weights(double x0, std::span<const double> z, int k) {
    // Fornberg (1988), generation of finite-difference weights on arbitrary nodes.
    const int n = int(z.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
    double c1 = 1.0, c4 = z[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, k);
        double c2 = 1.0;
        double c5 = c4;
        c4 = z[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int m = mn; m >= 1; --m)
                    c[i][m] = c1 * (m * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int m = mn; m >= 1; --m) c[j][m] = (c4 * c[j][m] - m * c[j][m - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][k];
    return w;
}

Stencil make_stencil(std::span<const double> nodes, int k, int order) {
    if (k < 1 || k > 3) throw std::invalid_argument("derivative order must be 1..3");
    const std::size_t n = nodes.size();
    const std::size_t centered = 2 * ((k + 1) / 2) - 1 + order;
    const std::size_t half = centered / 2;
    const std::size_t sided = std::min<std::size_t>(k + order, n);
    Stencil s;
    s.start.resize(n);
    s.size.resize(n);
    s.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t st, sz;
        if (i >= half && i + half < n) {
            st = i - half;
            sz = centered;
        } else {
            sz = sided;
            st = (i < half) ? 0 : n - sz;
        }
        s.start[i] = st;
        s.size[i] = sz;
        s.w[i] = fd_weights(nodes[i], nodes.subspan(st, sz), k);
    }
    return s;
}

std::vector<double> diff_line(std::span<const double> nodes, std::span<const double> f, int k, int order) {
    Stencil s = make_stencil(nodes, k, order);
    std::vector<double> d(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double acc = 0.0;
        for (std::size_t l = 0; l < s.size[i]; ++l) acc += s.w[i][l] * f[s.start[i] + l];
        d[i] = acc;
    }
    return d;
}

Field2D diff(const Field2D& f, Axis axis, int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("diff: k must be in 1..3");
    const Grid& g = *f.grid;
    Field2D r(f.grid, f.frame, f.name + (axis == Axis::x ? "_x" : "_y") + std::to_string(k));
    if (axis == Axis::y) {
        Stencil s = make_stencil(g.y, k, g.stencil_order);
        for (std::size_t i = 0; i < f.nx(); ++i) {
            auto col = f.column(i);
            auto out = r.column(i);
            for (std::size_t j = 0; j < f.ny(); ++j) {
                double acc = 0.0;
                for (std::size_t l = 0; l < s.size[j]; ++l) acc += s.w[j][l] * col[s.start[j] + l];
                out[j] = acc;
            }
        }
    } else {
        Stencil s = make_stencil(g.x, k, g.stencil_order);
        for (std::size_t i = 0; i < f.nx(); ++i)
            for (std::size_t l = 0; l < s.size[i]; ++l) {
                double w = s.w[i][l];
                std::size_t src = s.start[i] + l;
                for (std::size_t j = 0; j < f.ny(); ++j) r(i, j) += w * f(src, j);
            }
    }
    r.warnings = f.warnings;
    return r;
}

double quad_line(std::span<const double> t, std::span<const double> f, int order) {
    const std::size_t n = t.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    if (order != 4 || n < 3) {
        for (std::size_t i = 0; i + 1 < n; ++i) s += 0.5 * (t[i + 1] - t[i]) * (f[i] + f[i + 1]);
        return s;
    }
    // Composite Simpson for irregular spacing, with the usual single-interval
    // correction when the interval count is odd.
    std::size_t intervals = n - 1;
    std::size_t i = 0;
    for (; i + 2 < n && i + 2 <= intervals - (intervals % 2); i += 2) {
        double h0 = t[i + 1] - t[i], h1 = t[i + 2] - t[i + 1];
        double hs = h0 + h1;
        s += hs / 6.0 *
             ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
    }
    if (intervals % 2 == 1) {
        std::size_t m = n - 1;
        double h0 = t[m - 1] - t[m - 2], h1 = t[m] - t[m - 1];
        double alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        double beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        double eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        s += alpha * f[m] + beta * f[m - 1] - eta * f[m - 2];
    }
    return s;
}

double quad_y(const Field2D& f, std::size_t ix, const std::function<double(double)>& weight) {
    const auto& y = f.grid->y;
    std::vector<double> g(f.ny());
    auto col = f.column(ix);
    for (std::size_t j = 0; j < f.ny(); ++j) g[j] = col[j] * weight(y[j]);
    return quad_line(y, g, f.grid->stencil_order);
}

Stencil interval_weights(std::span<const double> t, int order) {
    const std::size_t n = t.size();
    Stencil s;
    s.start.resize(n - 1);
    s.size.resize(n - 1);
    s.w.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (order != 4 || n < 4) {
            double h = t[i + 1] - t[i];
            s.start[i] = i;
            s.size[i] = 2;
            s.w[i] = {0.5 * h, 0.5 * h};
            continue;
        }
        // integrate the cubic through four neighbouring nodes over [t_i, t_{i+1}]
        std::size_t st = (i == 0) ? 0 : std::min(i - 1, n - 4);
        double a = t[i], b = t[i + 1];
        Eigen::Matrix4d V;
        Eigen::Vector4d mom;
        for (int p = 0; p < 4; ++p) {
            for (int l = 0; l < 4; ++l) V(p, l) = std::pow(t[st + l] - a, p);
            mom(p) = std::pow(b - a, p + 1) / (p + 1);
        }
        Eigen::Vector4d w = V.colPivHouseholderQr().solve(mom);
        s.start[i] = st;
        s.size[i] = 4;
        s.w[i] = {w(0), w(1), w(2), w(3)};
    }
    return s;
}

namespace {

std::string tail_warning(const char* axis, const std::string& name, double edge, double peak) {
    std::ostringstream os;
    os << "tail_tol exceeded in " << axis << " for '" << name << "': edge " << edge << " vs max " << peak;
    return os.str();
}

}  // namespace

Field2D cumulative_tail_x(const Field2D& f, double tail_tol) {
    const Grid& g = *f.grid;
    Stencil s = interval_weights(g.x, g.stencil_order);
    Field2D r(f.grid, f.frame, "tail_x(" + f.name + ")");
    r.warnings = f.warnings;
    for (std::size_t i = f.nx() - 1; i-- > 0;)
        for (std::size_t j = 0; j < f.ny(); ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < s.size[i]; ++l) acc += s.w[i][l] * f(s.start[i] + l, j);
            r(i, j) = r(i + 1, j) + acc;
        }
    double peak = f.max_abs();
    double edge = f.column_max_abs(f.nx() - 1);
    if (edge > tail_tol * peak) r.warnings.push_back(tail_warning("x", f.name, edge, peak));
    return r;
}

Field2D cumulative_tail_y(const Field2D& f, double tail_tol) {
    const Grid& g = *f.grid;
    Stencil s = interval_weights(g.y, g.stencil_order);
    Field2D r(f.grid, f.frame, "tail_y(" + f.name + ")");
    r.warnings = f.warnings;
    double peak = f.max_abs();
    double edge = 0.0;
    for (std::size_t i = 0; i < f.nx(); ++i) {
        auto col = f.column(i);
        auto out = r.column(i);
        out[f.ny() - 1] = 0.0;
        for (std::size_t j = f.ny() - 1; j-- > 0;) {
            double acc = 0.0;
            for (std::size_t l = 0; l < s.size[j]; ++l) acc += s.w[j][l] * col[s.start[j] + l];
            out[j] = out[j + 1] + acc;
        }
        edge = std::max(edge, std::abs(col[f.ny() - 1]));
    }
    if (edge > tail_tol * peak) r.warnings.push_back(tail_warning("y", f.name, edge, peak));
    return r;
}

Field2D cumulative_y(const Field2D& f) {
    const Grid& g = *f.grid;
    Stencil s = interval_weights(g.y, g.stencil_order);
    Field2D r(f.grid, f.frame, "int_y(" + f.name + ")");
    r.warnings = f.warnings;
    for (std::size_t i = 0; i < f.nx(); ++i) {
        auto col = f.column(i);
        auto out = r.column(i);
        out[0] = 0.0;
        for (std::size_t j = 0; j + 1 < f.ny(); ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < s.size[j]; ++l) acc += s.w[j][l] * col[s.start[j] + l];
            out[j + 1] = out[j] + acc;
        }
    }
    return r;
}

}  // namespace pbl
