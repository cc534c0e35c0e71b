#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chronoscale {
class TimeScale;
}

namespace chronoscale::expr {

/// Dialect tag for the expression language.
inline constexpr const char* kDialect = "exprv1";

/// Variable declarations for one expression slot. Scalars are bare names
/// (s, t); vectors are indexed (x[0]) and carry their dimension.
struct Env {
    struct VectorDecl {
        std::string name;
        std::size_t dim = 0;
    };
    std::vector<std::string> scalars;
    std::vector<VectorDecl> vectors;

    /// F(s, x, z) with state dimension n.
    static Env forcing(std::size_t n);
    /// H(s, t, y) with state dimension n.
    static Env kernel(std::size_t n);
};

inline constexpr std::size_t kMaxSlots = 4;

/// Time scale context for the eominus(alpha, t) intrinsic, which evaluates
/// e_{⊖alpha}(t, origin) on the bound time scale.
struct TimeScaleContext {
    const TimeScale* ts = nullptr;
    double origin = 0.0;
};

struct Bindings {
    std::array<double, kMaxSlots> scalars{};
    std::array<std::span<const double>, kMaxSlots> vectors{};
    const TimeScaleContext* timescale = nullptr;
};

enum class Kind { Number, Constant, Scalar, Indexed, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Tan, Exp, Log, Abs, Sqrt, Min, Max, EOminus };

struct Node {
    Kind kind = Kind::Number;
    double number = 0.0;     // Number and Constant
    std::string name;        // Constant, Scalar, Indexed, Call
    std::size_t slot = 0;    // Scalar / Indexed binding slot
    std::size_t index = 0;   // Indexed component
    Func func = Func::Sin;
    std::vector<Node> children;
    std::size_t offset = 0;  // byte offset in the source

    bool same_structure(const Node& other) const;
};

/// Parsed, validated, immutable expression.
class Expr {
public:
    Expr() = default;

    const Node& root() const noexcept { return root_; }
    const std::string& source() const noexcept { return source_; }

    double eval(const Bindings& b) const;
    std::string to_string() const;
    bool same_structure(const Expr& other) const { return root_.same_structure(other.root_); }

    /// Builds an expression from an already-validated tree (used by tests
    /// and generators).
    static Expr from_tree(Node root) {
        Expr e;
        e.root_ = std::move(root);
        return e;
    }

private:
    friend Expr parse(std::string_view src, const Env& env);
    Node root_;
    std::string source_;
};

/// Grammar (precedence ^ > unary − > * / > + −, '^' right-associative):
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?
///   atom  := number | name | name '[' int ']' | name '(' expr (',' expr)* ')' | '(' expr ')'
Expr parse(std::string_view src, const Env& env);

std::string to_string(const Node& node);

/// Component list; all components share one Env.
class VectorExpr {
public:
    VectorExpr() = default;
    VectorExpr(std::vector<Expr> components) : components_(std::move(components)) {}

    static VectorExpr parse(const std::vector<std::string>& sources, const Env& env);

    std::size_t size() const noexcept { return components_.size(); }
    const Expr& operator[](std::size_t i) const noexcept { return components_[i]; }
    const std::vector<Expr>& components() const noexcept { return components_; }

    void eval(const Bindings& b, std::span<double> out) const;
    std::vector<std::string> sources() const;

private:
    std::vector<Expr> components_;
};

}  // namespace chronoscale::expr
