#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

namespace fracperron {

namespace {

struct EvalError : ConfigError {
    using ConfigError::ConfigError;
};

[[noreturn]] void eval_fail(std::size_t pos, const std::string& what) {
    throw EvalError("expression eval error at position " + std::to_string(pos) + ": " + what);
}

struct Num final : Expr {
    double v;
    explicit Num(double x) : v(x) {}
    double eval(const Point&, int) const override { return v; }
};

struct Var final : Expr {
    int axis;
    std::size_t pos;
    Var(int a, std::size_t p) : axis(a), pos(p) {}
    double eval(const Point& at, int dim) const override {
        if (axis >= dim) eval_fail(pos, "variable 'y' is not available in dim 1");
        return at[axis];
    }
};

struct Unary final : Expr {
    ExprPtr inner;
    double eval(const Point& at, int dim) const override { return -inner->eval(at, dim); }
};

struct Binary final : Expr {
    char op;
    std::size_t pos;
    ExprPtr lhs, rhs;
    double eval(const Point& at, int dim) const override {
        const double a = lhs->eval(at, dim);
        const double b = rhs->eval(at, dim);
        double out = 0.0;
        switch (op) {
            case '+': out = a + b; break;
            case '-': out = a - b; break;
            case '*': out = a * b; break;
            case '/':
                if (b == 0.0) eval_fail(pos, "division by zero");
                out = a / b;
                break;
            case '^': out = std::pow(a, b); break;
        }
        if (!std::isfinite(out)) eval_fail(pos, "non-finite result");
        return out;
    }
};

struct Call final : Expr {
    std::string name;
    std::size_t pos;
    std::vector<ExprPtr> args;
    double eval(const Point& at, int dim) const override {
        std::vector<double> v(args.size());
        for (std::size_t i = 0; i < args.size(); ++i) v[i] = args[i]->eval(at, dim);
        double out = 0.0;
        if (name == "min")
            out = std::min(v[0], v[1]);
        else if (name == "max")
            out = std::max(v[0], v[1]);
        else if (name == "abs")
            out = std::abs(v[0]);
        else if (name == "sqrt") {
            if (v[0] < 0.0) eval_fail(pos, "sqrt of a negative value");
            out = std::sqrt(v[0]);
        } else if (name == "pow")
            out = std::pow(v[0], v[1]);
        else if (name == "hypot")
            out = std::hypot(v[0], v[1]);
        else if (name == "exp")
            out = std::exp(v[0]);
        else if (name == "log") {
            if (v[0] <= 0.0) eval_fail(pos, "log of a nonpositive value");
            out = std::log(v[0]);
        }
        if (!std::isfinite(out)) eval_fail(pos, "non-finite result");
        return out;
    }
};

int arity(const std::string& name) {
    if (name == "abs" || name == "sqrt" || name == "exp" || name == "log") return 1;
    if (name == "min" || name == "max" || name == "pow" || name == "hypot") return 2;
    return -1;
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    ExprPtr parse() {
        ExprPtr e = expression();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return e;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression parse error at position " + std::to_string(pos_) + ": " +
                          what + " in \"" + text_ + "\"");
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

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ExprPtr expression() {
        ExprPtr lhs = term();
        while (true) {
            const std::size_t at = pos_;
            if (eat('+') || eat('-')) {
                auto node = std::make_shared<Binary>();
                node->op = text_[pos_ - 1];
                node->pos = at;
                node->lhs = lhs;
                node->rhs = term();
                lhs = node;
            } else {
                return lhs;
            }
        }
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (true) {
            const std::size_t at = pos_;
            if (eat('*') || eat('/')) {
                auto node = std::make_shared<Binary>();
                node->op = text_[pos_ - 1];
                node->pos = at;
                node->lhs = lhs;
                node->rhs = factor();
                lhs = node;
            } else {
                return lhs;
            }
        }
    }

    ExprPtr factor() {
        ExprPtr base = unary();
        const std::size_t at = pos_;
        if (eat('^')) {
            auto node = std::make_shared<Binary>();
            node->op = '^';
            node->pos = at;
            node->lhs = base;
            node->rhs = factor();  // right associative
            return node;
        }
        return base;
    }

    ExprPtr unary() {
        if (eat('-')) {
            auto node = std::make_shared<Unary>();
            node->inner = unary();
            return node;
        }
        return primary();
    }

    ExprPtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t consumed = 0;
            double v = 0.0;
            try {
                v = std::stod(text_.substr(pos_), &consumed);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += consumed;
            return std::make_shared<Num>(v);
        }
        if (c == '(') {
            ++pos_;
            ExprPtr e = expression();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            if (peek() == '(') {
                const int n = arity(name);
                if (n < 0) fail("unknown function \"" + name + "\"");
                eat('(');
                auto call = std::make_shared<Call>();
                call->name = name;
                call->pos = start;
                call->args.push_back(expression());
                while (eat(',')) call->args.push_back(expression());
                if (!eat(')')) fail("expected ')'");
                if (static_cast<int>(call->args.size()) != n)
                    fail("function \"" + name + "\" expects " + std::to_string(n) + " arguments");
                return call;
            }
            // "r" aliases the first coordinate; kernel profiles use it
            if (name == "x" || name == "r") return std::make_shared<Var>(0, start);
            if (name == "y") return std::make_shared<Var>(1, start);
            if (name == "pi") return std::make_shared<Num>(std::acos(-1.0));
            fail("unknown identifier \"" + name + "\"");
        }
        fail("unexpected character");
    }
};

}  // namespace

ExprPtr parse_expr(const std::string& text) { return Parser(text).parse(); }

double expr_eval(const std::string& text, const Point& at, int dim) {
    return parse_expr(text)->eval(at, dim);
}

Field eval_field(const Expr& expr, GridPtr grid, double far_value) {
    Field f(grid, 0.0, far_value);
    for (int i = 0; i < grid->size(); ++i) f.values[i] = expr.eval(grid->coord(i), grid->dim());
    f.check_finite();
    return f;
}

}  // namespace fracperron
