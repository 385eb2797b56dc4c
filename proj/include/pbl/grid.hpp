#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pbl {

enum class StretchKind { uniform, geometric, tanh };

struct StretchLaw {
    StretchKind kind = StretchKind::geometric;
    double param = 1.03;  // ratio for geometric, beta for tanh

    static StretchLaw uniform() { return {StretchKind::uniform, 0.0}; }
    static StretchLaw geometric(double ratio) { return {StretchKind::geometric, ratio}; }
    static StretchLaw tanh(double beta) { return {StretchKind::tanh, beta}; }
};

std::string to_string(const StretchLaw& law);
StretchLaw parse_stretch(const std::string& text);

/// Tensor-product mesh on [1, x_max] x [0, y_max].
///
/// Under non-uniform stretch laws the x nodes are log-uniform (dx proportional
/// to x), which is what the parabolic marchers want; the law itself shapes y.
struct Grid {
    std::vector<double> x;
    std::vector<double> y;
    StretchLaw stretch;
    int stencil_order = 2;

    std::size_t nx() const { return x.size(); }
    std::size_t ny() const { return y.size(); }
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(double x_max, int nx, double y_max, int ny, StretchLaw law, int stencil_order);

/// Grid with explicit nodes; validates the same invariants as make_grid except
/// the node-generation rules.
GridPtr grid_from_nodes(std::vector<double> x, std::vector<double> y, StretchLaw law,
                        int stencil_order);

/// Every `stride`-th node in both directions (the two-grid companion).
GridPtr subsample(const GridPtr& g, int stride);

enum class Frame { physical_y, von_mises_eta, euler_Y };
std::string to_string(Frame f);
Frame parse_frame(const std::string& s);

class Field2D {
public:
    Field2D() = default;
    Field2D(GridPtr g, Frame f, std::string name, double fill = 0.0);

    double& operator()(std::size_t i, std::size_t j) { return values[i * ny_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * ny_ + j]; }

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double x(std::size_t i) const { return grid->x[i]; }
    double y(std::size_t j) const { return grid->y[j]; }

    std::span<double> column(std::size_t i) { return {values.data() + i * ny_, ny_}; }
    std::span<const double> column(std::size_t i) const { return {values.data() + i * ny_, ny_}; }

    double max_abs() const;
    double column_max_abs(std::size_t i) const;
    void require_finite() const;
    Field2D renamed(std::string n) const;

    GridPtr grid;
    Frame frame = Frame::physical_y;
    std::string name;
    std::vector<double> values;
    std::vector<std::string> warnings;

private:
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
};

Field2D operator+(const Field2D& a, const Field2D& b);
Field2D operator-(const Field2D& a, const Field2D& b);
Field2D operator*(const Field2D& a, const Field2D& b);
Field2D operator*(double c, const Field2D& a);
Field2D& operator+=(Field2D& a, const Field2D& b);

/// Apply f(x, y, value) nodewise.
Field2D map_field(const Field2D& a, const std::function<double(double, double, double)>& f,
                  std::string name = {});
Field2D sample_field(const GridPtr& g, Frame frame, std::string name,
                     const std::function<double(double, double)>& f);
Field2D restrict_field(const Field2D& a, const GridPtr& coarse, int stride);

enum class Axis { x, y };

/// Fornberg weights for the k-th derivative at x0 over the given nodes.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int k);

/// Derivative stencil for every node of a 1-D node set.
struct Stencil {
    std::vector<std::size_t> start;
    std::vector<std::size_t> size;
    std::vector<std::vector<double>> w;
};
Stencil make_stencil(std::span<const double> nodes, int k, int order);

Field2D diff(const Field2D& f, Axis axis, int k);
std::vector<double> diff_line(std::span<const double> nodes, std::span<const double> f, int k,
                              int order);

double quad_line(std::span<const double> nodes, std::span<const double> f, int order);
double quad_y(const Field2D& f, std::size_t ix, const std::function<double(double)>& weight);

/// Per-interval integration weights; integral over [t_i, t_{i+1}] is
/// sum_l w[i][l] * f[start[i] + l].
Stencil interval_weights(std::span<const double> nodes, int order);

/// F(x, y) = integral from x to x_max; F(x_max, .) = 0.
Field2D cumulative_tail_x(const Field2D& f, double tail_tol);
/// F(x, y) = integral from y to y_max.
Field2D cumulative_tail_y(const Field2D& f, double tail_tol);
/// F(x, y) = integral from 0 to y.
Field2D cumulative_y(const Field2D& f);

}  // namespace pbl
