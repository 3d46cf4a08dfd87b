#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fracperron {

void FracParams::validate() const {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("params: s must lie in (0,1)");
    if (!(p > 1.0)) throw ConfigError("params: p must be > 1");
    if (!(lambda >= 1.0)) throw ConfigError("params: lambda must be >= 1");
}

Grid::Grid(int dim, const std::array<double, 2>& xrange, const std::array<double, 2>& yrange,
           double h, std::int64_t max_nodes)
    : dim_(dim), h_(h) {
    if (dim != 1 && dim != 2) throw ConfigError("grid: dim must be 1 or 2");
    if (!(h > 0.0)) throw SizeError("grid: h must be positive");
    std::array<std::array<double, 2>, 2> ranges{xrange, yrange};
    std::int64_t total = 1;
    for (int a = 0; a < dim; ++a) {
        const double side = ranges[a][1] - ranges[a][0];
        if (!(side > 0.0)) throw SizeError("grid: degenerate box");
        const double cells = side / h;
        const auto rounded = static_cast<std::int64_t>(std::llround(cells));
        if (rounded < 1 || std::abs(cells - static_cast<double>(rounded)) > 1e-3 * cells)
            throw SizeError("grid: h does not divide the box side (0.1% rounding)");
        counts_[a] = static_cast<int>(rounded);
        lo_[a] = ranges[a][0];
        // Snap the upper edge so cells tile the box exactly.
        hi_[a] = ranges[a][0] + static_cast<double>(rounded) * h;
        total *= rounded;
    }
    if (total > max_nodes) throw SizeError("grid: node count above configured limit");
    coords_.reserve(static_cast<std::size_t>(total));
    if (dim_ == 1) {
        for (int i = 0; i < counts_[0]; ++i)
            coords_.push_back({lo_[0] + (i + 0.5) * h_, 0.0});
    } else {
        for (int iy = 0; iy < counts_[1]; ++iy)
            for (int ix = 0; ix < counts_[0]; ++ix)
                coords_.push_back({lo_[0] + (ix + 0.5) * h_, lo_[1] + (iy + 0.5) * h_});
    }
}

double Grid::max_dist_to_box(const Point& x) const {
    double best = 0.0;
    const double cx[2] = {lo_[0], hi_[0]};
    const double cy[2] = {dim_ == 2 ? lo_[1] : 0.0, dim_ == 2 ? hi_[1] : 0.0};
    for (double a : cx)
        for (double b : cy) {
            const double dx = a - x[0];
            const double dy = dim_ == 2 ? b - x[1] : 0.0;
            best = std::max(best, std::hypot(dx, dy));
        }
    return best;
}

bool Grid::same_layout(const Grid& other) const {
    if (dim_ != other.dim_ || counts_ != other.counts_) return false;
    const double scale = std::max({1.0, std::abs(h_), std::abs(lo_[0]), std::abs(hi_[0])});
    auto close = [scale](double a, double b) { return std::abs(a - b) <= 1e-12 * scale; };
    if (!close(h_, other.h_)) return false;
    for (int a = 0; a < dim_; ++a)
        if (!close(lo_[a], other.lo_[a]) || !close(hi_[a], other.hi_[a])) return false;
    return true;
}

GridPtr build_grid(int dim, const std::array<double, 2>& xrange,
                   const std::array<double, 2>& yrange, double h, std::int64_t max_nodes) {
    return std::make_shared<Grid>(dim, xrange, yrange, h, max_nodes);
}

NodeSet::NodeSet(GridPtr g, SetRole r) : grid(std::move(g)), role(r) {
    mask.assign(grid->size(), 0);
}

int NodeSet::count() const {
    return static_cast<int>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

bool NodeSet::subset_of(const NodeSet& other) const {
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i] && !other.mask[i]) return false;
    return true;
}

std::vector<int> NodeSet::indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(static_cast<int>(i));
    return out;
}

Field::Field(GridPtr g, double fill, double far) : grid(std::move(g)), far_value(far) {
    values.assign(grid->size(), fill);
}

void Field::check_finite() const {
    if (!std::isfinite(far_value)) throw ConfigError("field: far_value not finite");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("field: values must be finite");
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
    if (a.get() == b.get()) return;
    if (!a || !b || !a->same_layout(*b)) throw GridMismatchError("grid mismatch");
}

namespace {

// kappa(r) with the ellipticity bounds enforced at every sample.
class KernelEval {
public:
    KernelEval(const FracParams& params, int dim)
        : params_(params), exponent_(dim + params.s * params.p) {}

    double operator()(double r) const {
        const double standard = std::pow(r, -exponent_);
        if (params_.standard()) return standard;
        const double v = params_.kernel(r);
        const double lo = standard / params_.lambda;
        const double hi = standard * params_.lambda;
        if (!(v >= lo * (1.0 - 1e-9)) || !(v <= hi * (1.0 + 1e-9)))
            throw EllipticityError("custom kernel violates ellipticity bounds at r=" +
                                   std::to_string(r));
        return v;
    }

    double exponent() const { return exponent_; }

private:
    const FracParams& params_;
    double exponent_;
};

// int_R^inf kappa(r) r^(n-1) dr by dyadic panels with Gauss-Legendre nodes.
// The kernel bounds make each octave's contribution decay like 2^(-sp).
double tail_integral(const KernelEval& kernel, double R, int dim) {
    static constexpr double gx[8] = {-0.9602898564975362, -0.7966664774136267,
                                     -0.5255324099163290, -0.1834346424956498,
                                     0.1834346424956498,  0.5255324099163290,
                                     0.7966664774136267,  0.9602898564975362};
    static constexpr double gw[8] = {0.1012285362903763, 0.2223810344533745,
                                     0.3137066458778873, 0.3626837833783620,
                                     0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};
    double total = 0.0;
    double a = R;
    for (int octave = 0; octave < 2000; ++octave) {
        const double b = 2.0 * a;
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double panel = 0.0;
        for (int q = 0; q < 8; ++q) {
            const double r = mid + half * gx[q];
            panel += gw[q] * kernel(r) * (dim == 2 ? r : 1.0);
        }
        panel *= half;
        total += panel;
        if (panel < 1e-14 * total && octave > 2) break;
        a = b;
    }
    return total;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Distance from x (inside the box) to the box boundary along direction theta.
double ray_exit_distance(const Grid& grid, const Point& x, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double t = std::numeric_limits<double>::infinity();
    if (c > 1e-15) t = std::min(t, (grid.hi(0) - x[0]) / c);
    if (c < -1e-15) t = std::min(t, (grid.lo(0) - x[0]) / c);
    if (s > 1e-15) t = std::min(t, (grid.hi(1) - x[1]) / s);
    if (s < -1e-15) t = std::min(t, (grid.lo(1) - x[1]) / s);
    return t;
}

}  // namespace

double far_field_integral(const Grid& grid, const Point& x, const FracParams& params) {
    const double sp = params.s * params.p;
    const KernelEval kernel(params, grid.dim());
    if (grid.dim() == 1) {
        const double a = x[0] - grid.lo(0);
        const double b = grid.hi(0) - x[0];
        if (!(a > 0.0 && b > 0.0)) throw ConfigError("far integral: point outside the box");
        if (params.standard()) return (std::pow(a, -sp) + std::pow(b, -sp)) / sp;
        return tail_integral(kernel, a, 1) + tail_integral(kernel, b, 1);
    }
    // Polar decomposition around x; the box is star-shaped from any interior point.
    auto integrand = [&](double theta) {
        const double R = ray_exit_distance(grid, x, theta);
        if (params.standard()) return std::pow(R, -sp) / sp;
        return tail_integral(kernel, R, 2);
    };
    const double pi = std::acos(-1.0);
    // Split at the axis quadrants; adaptive refinement handles the corner kinks.
    double total = 0.0;
    for (int q = 0; q < 4; ++q)
        total += integrate(integrand, q * pi / 2.0, (q + 1) * pi / 2.0, 1e-12);
    return total;
}

namespace {

// Tensor Gauss rule with two points per axis per cell.
struct CellQuadrature {
    std::vector<Point> points;  // offsets from the cell center
    std::vector<double> weights;

    CellQuadrature(int dim, double h) {
        const double off = h / (2.0 * std::sqrt(3.0));
        const double w1 = h / 2.0;
        if (dim == 1) {
            points = {{-off, 0.0}, {off, 0.0}};
            weights = {w1, w1};
        } else {
            for (double ox : {-off, off})
                for (double oy : {-off, off}) {
                    points.push_back({ox, oy});
                    weights.push_back(w1 * w1);
                }
        }
    }
};

}  // namespace

WeightMatrix::WeightMatrix(GridPtr grid, const FracParams& params)
    : grid_(std::move(grid)), params_(params), n_(grid_->size()) {
    params_.validate();
    const int dim = grid_->dim();
    const double h = grid_->h();
    const double measure = grid_->cell_measure();
    const KernelEval kernel(params_, dim);
    const CellQuadrature quad(dim, h);
    const double near_cut = 2.0 * h * (1.0 + 1e-12);

    w_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    const auto& xs = grid_->coords();
    for (int i = 0; i < n_; ++i) {
        for (int j = i + 1; j < n_; ++j) {
            const double dx = xs[i][0] - xs[j][0];
            const double dy = xs[i][1] - xs[j][1];
            const double dist = std::hypot(dx, dy);
            double wij;
            if (dist <= near_cut) {
                // Near-diagonal: 2-point tensor Gauss per cell keeps the
                // quadrature clear of the |x-y| singularity.
                double acc = 0.0;
                for (std::size_t a = 0; a < quad.points.size(); ++a)
                    for (std::size_t b = 0; b < quad.points.size(); ++b) {
                        const double rx = dx + quad.points[a][0] - quad.points[b][0];
                        const double ry = dy + quad.points[a][1] - quad.points[b][1];
                        acc += quad.weights[a] * quad.weights[b] * kernel(std::hypot(rx, ry));
                    }
                wij = acc;
            } else {
                // Midpoint rule; error is O(h^2/d^2) out here.
                wij = measure * measure * kernel(dist);
            }
            w_[static_cast<std::size_t>(i) * n_ + j] = wij;
            w_[static_cast<std::size_t>(j) * n_ + i] = wij;
        }
    }

    c_far_.resize(n_);
    for (int i = 0; i < n_; ++i)
        c_far_[i] = measure * far_field_integral(*grid_, xs[i], params_);

    row_sum_.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        const double* ri = row(i);
        double acc = 0.0, comp = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double y = ri[j] - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        row_sum_[i] = acc;
    }
}

void WeightMatrix::scale_lengths(double factor) {
    const double mult = std::pow(factor, grid_->dim() - params_.s * params_.p);
    for (auto& v : w_) v *= mult;
    for (auto& v : c_far_) v *= mult;
    for (auto& v : row_sum_) v *= mult;
}

WeightMatrix::WeightMatrix(GridPtr grid, const WeightMatrix& canonical, double length_factor)
    : grid_(std::move(grid)),
      params_(canonical.params_),
      n_(canonical.n_),
      w_(canonical.w_),
      c_far_(canonical.c_far_),
      row_sum_(canonical.row_sum_) {
    if (grid_->size() != n_ || grid_->dim() != canonical.grid_->dim())
        throw GridMismatchError("scaled weights: layout mismatch");
    scale_lengths(length_factor);
}

WeightsPtr assemble_weights(GridPtr grid, const FracParams& params) {
    return std::make_shared<WeightMatrix>(std::move(grid), params);
}

}  // namespace fracperron
