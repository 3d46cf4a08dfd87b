#pragma once

#include <memory>
#include <string>

#include "model.hpp"

namespace fracperron {

// Geometric predicate parsed from the shape-spec grammar:
//
//   shape := "all" | "empty"
//          | "ball(cx[,cy],r)"        open ball
//          | "cball(cx[,cy],r)"       closed ball
//          | "rect(lox[,loy],hix[,hiy])"   closed box
//          | "puncture(px[,py])"      single point
//          | "slit(ax,ay,bx,by)"      segment (dim 2)
//          | "union(s,s,...)" | "inter(s,s,...)"
//          | "diff(s,s)" | "complement(s)"
//
// Zero-measure shapes (puncture, slit) hit a node only when its cell center
// lies on them exactly (1e-12 relative tolerance).
class Shape {
public:
    virtual ~Shape() = default;
    virtual bool contains(const Point& x, int dim) const = 0;
    virtual std::string spec() const = 0;
};

using ShapePtr = std::shared_ptr<const Shape>;

// Throws ConfigError with the offending position on bad input.
ShapePtr parse_shape(const std::string& spec, int dim);

NodeSet rasterize(const Shape& shape, GridPtr grid, SetRole role = SetRole::Domain);
NodeSet rasterize(const std::string& spec, GridPtr grid, SetRole role = SetRole::Domain);

}  // namespace fracperron
