#include "chronoscale/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "chronoscale/calculus.hpp"
#include "chronoscale/error.hpp"

namespace chronoscale::expr {

Env Env::forcing(std::size_t n) {
    return Env{{"s"}, {{"x", n}, {"z", n}}};
}

Env Env::kernel(std::size_t n) {
    return Env{{"s", "t"}, {{"y", n}}};
}

bool Node::same_structure(const Node& other) const {
    if (kind != other.kind || children.size() != other.children.size()) return false;
    switch (kind) {
        case Kind::Number:
            if (number != other.number) return false;
            break;
        case Kind::Constant:
        case Kind::Scalar:
            if (name != other.name) return false;
            break;
        case Kind::Indexed:
            if (name != other.name || index != other.index) return false;
            break;
        case Kind::Call:
            if (func != other.func) return false;
            break;
        default:
            break;
    }
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (!children[i].same_structure(other.children[i])) return false;
    }
    return true;
}

namespace {

struct FuncInfo {
    const char* name;
    Func func;
    int min_args;
    int max_args;  // -1: variadic
};

constexpr FuncInfo kFuncs[] = {
    {"sin", Func::Sin, 1, 1},   {"cos", Func::Cos, 1, 1},   {"tan", Func::Tan, 1, 1},
    {"exp", Func::Exp, 1, 1},   {"log", Func::Log, 1, 1},   {"abs", Func::Abs, 1, 1},
    {"sqrt", Func::Sqrt, 1, 1}, {"min", Func::Min, 2, -1},  {"max", Func::Max, 2, -1},
    {"eominus", Func::EOminus, 2, 2},
};

const FuncInfo* find_func(std::string_view name) {
    for (const auto& f : kFuncs) {
        if (name == f.name) return &f;
    }
    return nullptr;
}

const char* func_name(Func f) {
    for (const auto& info : kFuncs) {
        if (info.func == f) return info.name;
    }
    return "?";
}

class Parser {
public:
    Parser(std::string_view src, const Env& env) : src_(src), env_(env) {}

    Node parse_all() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError(pos_, "empty expression");
        Node n = parse_expr();
        skip_ws();
        if (pos_ < src_.size()) throw SyntaxError(pos_, "unexpected character '" + std::string(1, src_[pos_]) + "'");
        return n;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
            ++pos_;
        }
    }

    // Accepts ASCII '-' and U+2212 MINUS SIGN.
    bool take_minus() {
        if (pos_ < src_.size() && src_[pos_] == '-') {
            ++pos_;
            return true;
        }
        if (src_.substr(pos_, 3) == "\xE2\x88\x92") {
            pos_ += 3;
            return true;
        }
        return false;
    }

    bool peek_minus() const {
        return (pos_ < src_.size() && src_[pos_] == '-') || src_.substr(pos_, 3) == "\xE2\x88\x92";
    }

    bool take(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!take(c)) throw SyntaxError(pos_, std::string("expected '") + c + "'");
    }

    static Node binary(Kind k, Node lhs, Node rhs, std::size_t offset) {
        Node n;
        n.kind = k;
        n.offset = offset;
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }

    Node parse_expr() {
        Node lhs = parse_term();
        for (;;) {
            skip_ws();
            const auto at = pos_;
            if (take('+')) {
                lhs = binary(Kind::Add, std::move(lhs), parse_term(), at);
            } else if (take_minus()) {
                lhs = binary(Kind::Sub, std::move(lhs), parse_term(), at);
            } else {
                return lhs;
            }
        }
    }

    Node parse_term() {
        Node lhs = parse_unary();
        for (;;) {
            skip_ws();
            const auto at = pos_;
            if (take('*')) {
                lhs = binary(Kind::Mul, std::move(lhs), parse_unary(), at);
            } else if (take('/')) {
                lhs = binary(Kind::Div, std::move(lhs), parse_unary(), at);
            } else {
                return lhs;
            }
        }
    }

    Node parse_unary() {
        skip_ws();
        const auto at = pos_;
        if (take_minus()) {
            Node n;
            n.kind = Kind::Neg;
            n.offset = at;
            n.children.push_back(parse_unary());
            return n;
        }
        return parse_power();
    }

    Node parse_power() {
        Node base = parse_atom();
        skip_ws();
        const auto at = pos_;
        if (take('^')) return binary(Kind::Pow, std::move(base), parse_unary(), at);
        return base;
    }

    Node parse_number() {
        const auto start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            auto p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        Node n;
        n.kind = Kind::Number;
        n.offset = start;
        const auto text = src_.substr(start, pos_ - start);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n.number);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw SyntaxError(start, "malformed number '" + std::string(text) + "'");
        }
        return n;
    }

    std::string parse_name() {
        const auto start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    Node parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError(pos_, "unexpected end of input");
        const char c = src_[pos_];
        const auto at = pos_;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            Node inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::string name = parse_name();
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '(') return parse_call(name, at);
            if (pos_ < src_.size() && src_[pos_] == '[') return parse_indexed(name, at);
            return resolve_name(name, at);
        }
        if (peek_minus()) throw SyntaxError(pos_, "unexpected '-'");
        throw SyntaxError(pos_, "unexpected character '" + std::string(1, c) + "'");
    }

    Node parse_call(const std::string& name, std::size_t at) {
        const FuncInfo* info = find_func(name);
        if (!info) throw Error(ErrorCode::UnknownFunction, "'" + name + "' at offset " + std::to_string(at));
        ++pos_;  // '('
        Node n;
        n.kind = Kind::Call;
        n.name = name;
        n.func = info->func;
        n.offset = at;
        n.children.push_back(parse_expr());
        while (take(',')) n.children.push_back(parse_expr());
        expect(')');
        const auto argc = static_cast<int>(n.children.size());
        if (argc < info->min_args || (info->max_args >= 0 && argc > info->max_args)) {
            throw SyntaxError(at, "wrong number of arguments to '" + name + "'");
        }
        return n;
    }

    Node parse_indexed(const std::string& name, std::size_t at) {
        ++pos_;  // '['
        skip_ws();
        const auto start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (start == pos_) throw SyntaxError(pos_, "expected integer index");
        std::size_t index = 0;
        std::from_chars(src_.data() + start, src_.data() + pos_, index);
        expect(']');
        for (std::size_t slot = 0; slot < env_.vectors.size(); ++slot) {
            if (env_.vectors[slot].name == name) {
                if (index >= env_.vectors[slot].dim) {
                    throw Error(ErrorCode::IndexOutOfRange,
                                name + "[" + std::to_string(index) + "] at offset " + std::to_string(at) +
                                    " exceeds dimension " + std::to_string(env_.vectors[slot].dim));
                }
                Node n;
                n.kind = Kind::Indexed;
                n.name = name;
                n.slot = slot;
                n.index = index;
                n.offset = at;
                return n;
            }
        }
        throw Error(ErrorCode::UnknownVariable, "'" + name + "' at offset " + std::to_string(at));
    }

    Node resolve_name(const std::string& name, std::size_t at) {
        Node n;
        n.offset = at;
        n.name = name;
        for (std::size_t slot = 0; slot < env_.scalars.size(); ++slot) {
            if (env_.scalars[slot] == name) {
                n.kind = Kind::Scalar;
                n.slot = slot;
                return n;
            }
        }
        if (name == "pi" || name == "e") {
            n.kind = Kind::Constant;
            n.number = name == "pi" ? std::numbers::pi : std::numbers::e;
            return n;
        }
        throw Error(ErrorCode::UnknownVariable, "'" + name + "' at offset " + std::to_string(at));
    }

    std::string_view src_;
    const Env& env_;
    std::size_t pos_ = 0;
};

[[noreturn]] void domain_fail(const Node& n, const std::string& what) {
    throw DomainError(n.offset, what + " in '" + to_string(n) + "'");
}

double eval_node(const Node& n, const Bindings& b) {
    switch (n.kind) {
        case Kind::Number:
        case Kind::Constant:
            return n.number;
        case Kind::Scalar:
            return b.scalars[n.slot];
        case Kind::Indexed:
            return b.vectors[n.slot][n.index];
        case Kind::Neg:
            return -eval_node(n.children[0], b);
        case Kind::Add:
            return eval_node(n.children[0], b) + eval_node(n.children[1], b);
        case Kind::Sub:
            return eval_node(n.children[0], b) - eval_node(n.children[1], b);
        case Kind::Mul:
            return eval_node(n.children[0], b) * eval_node(n.children[1], b);
        case Kind::Div: {
            const double num = eval_node(n.children[0], b);
            const double den = eval_node(n.children[1], b);
            if (den == 0.0) domain_fail(n, "division by zero");
            return num / den;
        }
        case Kind::Pow: {
            const double base = eval_node(n.children[0], b);
            const double ex = eval_node(n.children[1], b);
            const double r = std::pow(base, ex);
            if (std::isnan(r) && !std::isnan(base) && !std::isnan(ex)) domain_fail(n, "invalid power");
            if (base == 0.0 && ex < 0.0) domain_fail(n, "zero to a negative power");
            return r;
        }
        case Kind::Call:
            break;
    }

    const double a = eval_node(n.children[0], b);
    switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tan: return std::tan(a);
        case Func::Exp: return std::exp(a);
        case Func::Log:
            if (!(a > 0.0)) domain_fail(n, "log of non-positive value");
            return std::log(a);
        case Func::Abs: return std::abs(a);
        case Func::Sqrt:
            if (a < 0.0) domain_fail(n, "sqrt of negative value");
            return std::sqrt(a);
        case Func::Min: {
            double r = a;
            for (std::size_t i = 1; i < n.children.size(); ++i) r = std::min(r, eval_node(n.children[i], b));
            return r;
        }
        case Func::Max: {
            double r = a;
            for (std::size_t i = 1; i < n.children.size(); ++i) r = std::max(r, eval_node(n.children[i], b));
            return r;
        }
        case Func::EOminus: {
            if (!b.timescale || !b.timescale->ts) domain_fail(n, "eominus needs a time scale context");
            const double t = eval_node(n.children[1], b);
            if (!(a > 0.0)) domain_fail(n, "eominus requires alpha > 0");
            try {
                return exp_ominus(a, t, b.timescale->origin, *b.timescale->ts);
            } catch (const Error& err) {
                domain_fail(n, err.what());
            }
        }
    }
    return 0.0;
}

// Binding strength used by the printer: larger binds tighter.
int precedence(const Node& n) {
    switch (n.kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string wrap(const Node& n, bool parens) {
    return parens ? "(" + to_string(n) + ")" : to_string(n);
}

}  // namespace

std::string to_string(const Node& n) {
    switch (n.kind) {
        case Kind::Number: return format_number(n.number);
        case Kind::Constant:
        case Kind::Scalar: return n.name;
        case Kind::Indexed: return n.name + "[" + std::to_string(n.index) + "]";
        case Kind::Neg: return "-" + wrap(n.children[0], precedence(n.children[0]) < 3);
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div: {
            const int p = precedence(n);
            const char* op = n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - " : n.kind == Kind::Mul ? "*" : "/";
            return wrap(n.children[0], precedence(n.children[0]) < p) + op +
                   wrap(n.children[1], precedence(n.children[1]) <= p);
        }
        case Kind::Pow:
            return wrap(n.children[0], precedence(n.children[0]) < 5) + "^" +
                   wrap(n.children[1], precedence(n.children[1]) < 3);
        case Kind::Call: {
            std::string out = std::string(func_name(n.func)) + "(";
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) out += ", ";
                out += to_string(n.children[i]);
            }
            return out + ")";
        }
    }
    return "";
}

Expr parse(std::string_view src, const Env& env) {
    if (env.scalars.size() > kMaxSlots || env.vectors.size() > kMaxSlots) {
        throw Error(ErrorCode::BadParams, "too many variable slots");
    }
    Parser p(src, env);
    Expr e;
    e.root_ = p.parse_all();
    e.source_ = std::string(src);
    return e;
}

double Expr::eval(const Bindings& b) const {
    return eval_node(root_, b);
}

std::string Expr::to_string() const {
    return expr::to_string(root_);
}

VectorExpr VectorExpr::parse(const std::vector<std::string>& sources, const Env& env) {
    std::vector<Expr> comps;
    comps.reserve(sources.size());
    for (const auto& s : sources) comps.push_back(expr::parse(s, env));
    return VectorExpr(std::move(comps));
}

void VectorExpr::eval(const Bindings& b, std::span<double> out) const {
    for (std::size_t i = 0; i < components_.size(); ++i) out[i] = components_[i].eval(b);
}

std::vector<std::string> VectorExpr::sources() const {
    std::vector<std::string> out;
    for (const auto& c : components_) out.push_back(c.source().empty() ? c.to_string() : c.source());
    return out;
}

}  // namespace chronoscale::expr
