#include "speclab/expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace speclab {
namespace {

struct Node {
    virtual ~Node() = default;
    virtual double eval(double x, double y) const = 0;
};

using NodePtr = std::shared_ptr<Node>;

struct Constant : Node {
    double v;
    explicit Constant(double c) : v(c) {}
    double eval(double, double) const override { return v; }
};

struct Variable : Node {
    char which;
    explicit Variable(char w) : which(w) {}
    double eval(double x, double y) const override { return which == 'x' ? x : y; }
};

struct Unary : Node {
    double (*fn)(double);
    NodePtr arg;
    Unary(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
    double eval(double x, double y) const override { return fn(arg->eval(x, y)); }
};

struct Binary : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(double x, double y) const override {
        double a = lhs->eval(x, y);
        double b = rhs->eval(x, y);
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
        }
    }
};

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return e;
    }

  private:
    const std::string& s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("expression: " + what + " at position " +
                                    std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr e = term();
        for (;;) {
            if (accept('+')) e = std::make_shared<Binary>('+', e, term());
            else if (accept('-')) e = std::make_shared<Binary>('-', e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = factor();
        for (;;) {
            if (accept('*')) e = std::make_shared<Binary>('*', e, factor());
            else if (accept('/')) e = std::make_shared<Binary>('/', e, factor());
            else return e;
        }
    }

    // Unary minus binds looser than '^', so -x^2 means -(x^2).
    NodePtr factor() {
        if (accept('-'))
            return std::make_shared<Binary>('-', std::make_shared<Constant>(0.0), factor());
        if (accept('+')) return factor();
        NodePtr base = atom();
        if (accept('^')) return std::make_shared<Binary>('^', base, factor());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return word();
        if (accept('(')) {
            NodePtr e = expression();
            if (!accept(')')) fail("missing ')'");
            return e;
        }
        fail("unexpected character");
    }

    NodePtr number() {
        size_t end = 0;
        double v;
        try {
            v = std::stod(s_.substr(pos_), &end);
        } catch (const std::exception&) {
            fail("bad number");
        }
        pos_ += end;
        return std::make_shared<Constant>(v);
    }

    NodePtr word() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string w = s_.substr(start, pos_ - start);
        if (w == "pi") return std::make_shared<Constant>(std::numbers::pi);
        if (w == "x") return std::make_shared<Variable>('x');
        if (w == "y") return std::make_shared<Variable>('y');
        static const std::pair<const char*, double (*)(double)> fns[] = {
            {"sin", std::sin},   {"cos", std::cos}, {"tan", std::tan},
            {"tanh", std::tanh}, {"exp", std::exp}, {"log", std::log},
            {"abs", std::fabs},  {"sqrt", std::sqrt},
        };
        for (const auto& [name, fn] : fns) {
            if (w == name) {
                if (!accept('(')) fail("expected '(' after function name");
                NodePtr arg = expression();
                if (!accept(')')) fail("missing ')'");
                return std::make_shared<Unary>(fn, arg);
            }
        }
        fail("unknown identifier '" + w + "'");
    }
};

}  // namespace

std::function<double(double, double)> parse_expression(const std::string& text) {
    NodePtr root = Parser(text).parse();
    return [root](double x, double y) { return root->eval(x, y); };
}

double eval_expression(const std::string& text, double x, double y) {
    return parse_expression(text)(x, y);
}

}  // namespace speclab
