#include "shape.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

namespace fracperron {

namespace {

double point_tol(const Point& x) {
    return 1e-12 * std::max({1.0, std::abs(x[0]), std::abs(x[1])});
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct AllShape final : Shape {
    bool value;
    explicit AllShape(bool v) : value(v) {}
    bool contains(const Point&, int) const override { return value; }
    std::string spec() const override { return value ? "all" : "empty"; }
};

struct BallShape final : Shape {
    Point center;
    double radius;
    bool closed;
    BallShape(Point c, double r, bool cl) : center(c), radius(r), closed(cl) {}
    bool contains(const Point& x, int dim) const override {
        const double dx = x[0] - center[0];
        const double dy = dim == 2 ? x[1] - center[1] : 0.0;
        const double d = std::hypot(dx, dy);
        return closed ? d <= radius + point_tol(x) : d < radius;
    }
    std::string spec() const override {
        return (closed ? std::string("cball(") : std::string("ball(")) + fmt(center[0]) + "," +
               fmt(center[1]) + "," + fmt(radius) + ")";
    }
};

struct RectShape final : Shape {
    Point lo, hi;
    RectShape(Point l, Point h) : lo(l), hi(h) {}
    bool contains(const Point& x, int dim) const override {
        const double tol = point_tol(x);
        for (int a = 0; a < dim; ++a)
            if (x[a] < lo[a] - tol || x[a] > hi[a] + tol) return false;
        return true;
    }
    std::string spec() const override {
        return "rect(" + fmt(lo[0]) + "," + fmt(lo[1]) + "," + fmt(hi[0]) + "," + fmt(hi[1]) + ")";
    }
};

struct PunctureShape final : Shape {
    Point pt;
    explicit PunctureShape(Point p) : pt(p) {}
    bool contains(const Point& x, int dim) const override {
        const double tol = point_tol(x);
        if (std::abs(x[0] - pt[0]) > tol) return false;
        return dim == 1 || std::abs(x[1] - pt[1]) <= tol;
    }
    std::string spec() const override { return "puncture(" + fmt(pt[0]) + "," + fmt(pt[1]) + ")"; }
};

struct SlitShape final : Shape {
    Point a, b;
    SlitShape(Point a_, Point b_) : a(a_), b(b_) {}
    bool contains(const Point& x, int dim) const override {
        if (dim != 2) return false;
        const double tol = point_tol(x);
        const double ux = b[0] - a[0], uy = b[1] - a[1];
        const double len2 = ux * ux + uy * uy;
        if (len2 == 0.0) return std::abs(x[0] - a[0]) <= tol && std::abs(x[1] - a[1]) <= tol;
        const double t = ((x[0] - a[0]) * ux + (x[1] - a[1]) * uy) / len2;
        if (t < -tol || t > 1.0 + tol) return false;
        const double px = a[0] + t * ux, py = a[1] + t * uy;
        return std::abs(x[0] - px) <= tol && std::abs(x[1] - py) <= tol;
    }
    std::string spec() const override {
        return "slit(" + fmt(a[0]) + "," + fmt(a[1]) + "," + fmt(b[0]) + "," + fmt(b[1]) + ")";
    }
};

struct UnionShape final : Shape {
    std::vector<ShapePtr> parts;
    bool contains(const Point& x, int dim) const override {
        for (const auto& s : parts)
            if (s->contains(x, dim)) return true;
        return false;
    }
    std::string spec() const override {
        std::string out = "union(";
        for (std::size_t i = 0; i < parts.size(); ++i)
            out += (i ? "," : "") + parts[i]->spec();
        return out + ")";
    }
};

struct InterShape final : Shape {
    std::vector<ShapePtr> parts;
    bool contains(const Point& x, int dim) const override {
        for (const auto& s : parts)
            if (!s->contains(x, dim)) return false;
        return true;
    }
    std::string spec() const override {
        std::string out = "inter(";
        for (std::size_t i = 0; i < parts.size(); ++i)
            out += (i ? "," : "") + parts[i]->spec();
        return out + ")";
    }
};

struct DiffShape final : Shape {
    ShapePtr base, removed;
    bool contains(const Point& x, int dim) const override {
        return base->contains(x, dim) && !removed->contains(x, dim);
    }
    std::string spec() const override {
        return "diff(" + base->spec() + "," + removed->spec() + ")";
    }
};

struct ComplementShape final : Shape {
    ShapePtr inner;
    bool contains(const Point& x, int dim) const override { return !inner->contains(x, dim); }
    std::string spec() const override { return "complement(" + inner->spec() + ")"; }
};

class ShapeParser {
public:
    ShapeParser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    ShapePtr parse() {
        ShapePtr s = parse_shape();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return s;
    }

private:
    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("shape spec error at position " + std::to_string(pos_) + ": " + what +
                          " in \"" + text_ + "\"");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (start == pos_) fail("expected a shape name");
        return text_.substr(start, pos_ - start);
    }

    double number() {
        skip_ws();
        std::size_t consumed = 0;
        double v = 0.0;
        try {
            v = std::stod(text_.substr(pos_), &consumed);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos_ += consumed;
        return v;
    }

    std::vector<double> number_list() {
        std::vector<double> out;
        out.push_back(number());
        while (eat(',')) out.push_back(number());
        return out;
    }

    Point take_point(std::vector<double>& nums, std::size_t& at) {
        if (at + dim_ > nums.size()) fail("not enough coordinates for dim");
        Point p{nums[at], 0.0};
        if (dim_ == 2) p[1] = nums[at + 1];
        at += dim_;
        return p;
    }

    ShapePtr parse_shape() {
        const std::string name = ident();
        if (name == "all") return std::make_shared<AllShape>(true);
        if (name == "empty") return std::make_shared<AllShape>(false);
        expect('(');
        if (name == "union" || name == "inter") {
            std::vector<ShapePtr> parts;
            parts.push_back(parse_shape());
            while (eat(',')) parts.push_back(parse_shape());
            expect(')');
            if (name == "union") {
                auto s = std::make_shared<UnionShape>();
                s->parts = std::move(parts);
                return s;
            }
            auto s = std::make_shared<InterShape>();
            s->parts = std::move(parts);
            return s;
        }
        if (name == "diff") {
            auto s = std::make_shared<DiffShape>();
            s->base = parse_shape();
            expect(',');
            s->removed = parse_shape();
            expect(')');
            return s;
        }
        if (name == "complement") {
            auto s = std::make_shared<ComplementShape>();
            s->inner = parse_shape();
            expect(')');
            return s;
        }
        // leaf shapes: a comma-separated list of numbers
        std::vector<double> nums = number_list();
        expect(')');
        std::size_t at = 0;
        if (name == "ball" || name == "cball") {
            const Point c = take_point(nums, at);
            if (at + 1 != nums.size()) fail("ball expects center coordinates and a radius");
            const double r = nums[at];
            if (!(r >= 0.0)) fail("ball radius must be nonnegative");
            return std::make_shared<BallShape>(c, r, name == "cball");
        }
        if (name == "rect") {
            const Point lo = take_point(nums, at);
            const Point hi = take_point(nums, at);
            if (at != nums.size()) fail("rect expects lo and hi corner coordinates");
            for (int a = 0; a < dim_; ++a)
                if (!(lo[a] <= hi[a])) fail("rect corners out of order");
            return std::make_shared<RectShape>(lo, hi);
        }
        if (name == "puncture") {
            const Point p = take_point(nums, at);
            if (at != nums.size()) fail("puncture expects point coordinates");
            return std::make_shared<PunctureShape>(p);
        }
        if (name == "slit") {
            if (dim_ != 2) fail("slit requires dim 2");
            const Point a = take_point(nums, at);
            const Point b = take_point(nums, at);
            if (at != nums.size()) fail("slit expects two endpoints");
            return std::make_shared<SlitShape>(a, b);
        }
        fail("unknown shape \"" + name + "\"");
    }
};

}  // namespace

ShapePtr parse_shape(const std::string& spec, int dim) {
    if (dim != 1 && dim != 2) throw ConfigError("shape: dim must be 1 or 2");
    return ShapeParser(spec, dim).parse();
}

NodeSet rasterize(const Shape& shape, GridPtr grid, SetRole role) {
    NodeSet set(grid, role);
    const int dim = grid->dim();
    for (int i = 0; i < grid->size(); ++i)
        if (shape.contains(grid->coord(i), dim)) set.add(i);
    return set;
}

NodeSet rasterize(const std::string& spec, GridPtr grid, SetRole role) {
    const auto shape = parse_shape(spec, grid->dim());
    return rasterize(*shape, std::move(grid), role);
}

}  // namespace fracperron
