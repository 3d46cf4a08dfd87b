#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracperron {

// Exceptions thrown by the core. The C API maps them onto fp_status codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct SizeError : Error {
    using Error::Error;
};
struct EllipticityError : Error {
    using Error::Error;
};
struct GridMismatchError : Error {
    using Error::Error;
};
struct InfeasibleError : Error {
    using Error::Error;
};
struct ResolutionError : Error {
    using Error::Error;
};

using Point = std::array<double, 2>;  // second coordinate unused when dim == 1

// Kernel parameters: exponents s, p, the ellipticity constant and an optional
// radial profile kappa(r). The profile must stay within
// [lambda^-1, lambda] * r^-(n+sp) at every sampled radius.
struct FracParams {
    double s = 0.5;
    double p = 2.0;
    double lambda = 1.0;
    std::function<double(double)> kernel;  // empty => standard kernel r^-(n+sp)

    bool standard() const { return !kernel; }
    void validate() const;
};

// Uniform lattice of cell centers over an axis-aligned box. Node ordering is
// row-major with x fastest and is relied on by every sweep and report.
class Grid {
public:
    static constexpr std::int64_t kDefaultMaxNodes = 1 << 18;

    Grid(int dim, const std::array<double, 2>& xrange, const std::array<double, 2>& yrange,
         double h, std::int64_t max_nodes = kDefaultMaxNodes);

    int dim() const { return dim_; }
    double h() const { return h_; }
    double cell_measure() const { return dim_ == 1 ? h_ : h_ * h_; }
    int count(int axis) const { return counts_[axis]; }
    int size() const { return static_cast<int>(coords_.size()); }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }

    Point coord(int i) const { return coords_[i]; }
    const std::vector<Point>& coords() const { return coords_; }

    // Largest distance from x to the box, and distance from x to the box boundary.
    double max_dist_to_box(const Point& x) const;

    bool same_layout(const Grid& other) const;

private:
    int dim_;
    double h_;
    std::array<double, 2> lo_{};
    std::array<double, 2> hi_{};
    std::array<int, 2> counts_{1, 1};
    std::vector<Point> coords_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(int dim, const std::array<double, 2>& xrange,
                   const std::array<double, 2>& yrange, double h,
                   std::int64_t max_nodes = Grid::kDefaultMaxNodes);

enum class SetRole { Domain, Compact, Ball, Exceptional };

// Boolean mask over a grid's nodes.
struct NodeSet {
    GridPtr grid;
    std::vector<std::uint8_t> mask;
    SetRole role = SetRole::Domain;

    NodeSet() = default;
    NodeSet(GridPtr g, SetRole r);

    bool contains(int i) const { return mask[i] != 0; }
    void add(int i) { mask[i] = 1; }
    void remove(int i) { mask[i] = 0; }
    int count() const;
    bool empty() const { return count() == 0; }
    bool subset_of(const NodeSet& other) const;
    std::vector<int> indices() const;
};

// One value per node plus the constant the function takes outside the box.
struct Field {
    GridPtr grid;
    std::vector<double> values;
    double far_value = 0.0;

    Field() = default;
    Field(GridPtr g, double fill, double far);

    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }
    void check_finite() const;
};

void require_same_grid(const GridPtr& a, const GridPtr& b);

// Integral of the kernel over the complement of the grid's box, seen from x.
// Radial closed form for the standard kernel, quadrature otherwise.
double far_field_integral(const Grid& grid, const Point& x, const FracParams& params);

// Symmetric pairwise quadrature weights W_ij ~ int_ci int_cj k dx dy plus the
// per-node far-field coefficients c_far_i = |cell| * int_{box^c} k(x_i,y) dy.
// Both carry length^(n-sp) after cell-measure absorption.
class WeightMatrix {
public:
    WeightMatrix(GridPtr grid, const FracParams& params);

    // Transfer weights assembled on a geometrically similar grid whose lengths
    // differ by length_factor (standard kernel homogeneity).
    WeightMatrix(GridPtr grid, const WeightMatrix& canonical, double length_factor);

    double w(int i, int j) const { return w_[static_cast<std::size_t>(i) * n_ + j]; }
    double c_far(int i) const { return c_far_[i]; }
    double row_sum(int i) const { return row_sum_[i]; }
    const GridPtr& grid() const { return grid_; }
    const FracParams& params() const { return params_; }
    bool standard_kernel() const { return params_.standard(); }
    int size() const { return n_; }

    const double* row(int i) const { return w_.data() + static_cast<std::size_t>(i) * n_; }

    // Exact homogeneity of the standard kernel: all lengths scaled by t
    // multiply every weight by t^(n-sp).
    void scale_lengths(double factor);

private:
    GridPtr grid_;
    FracParams params_;
    int n_;
    std::vector<double> w_;
    std::vector<double> c_far_;
    std::vector<double> row_sum_;
};

using WeightsPtr = std::shared_ptr<const WeightMatrix>;

WeightsPtr assemble_weights(GridPtr grid, const FracParams& params);

}  // namespace fracperron
