#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "chronoscale/expr.hpp"

// Random expression trees over Env::forcing(2) for round-trip tests.
namespace expr_testing {

using namespace chronoscale::expr;

inline Node leaf(std::mt19937_64& rng) {
    Node n;
    switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
        case 0:
            n.kind = Kind::Scalar;
            n.name = "s";
            break;
        case 1:
            n.kind = Kind::Indexed;
            n.name = std::uniform_int_distribution<int>(0, 1)(rng) ? "x" : "z";
            n.slot = n.name == "x" ? 0 : 1;
            n.index = std::uniform_int_distribution<std::size_t>(0, 1)(rng);
            break;
        case 2:
            n.kind = Kind::Constant;
            n.name = "pi";
            n.number = std::numbers::pi;
            break;
        default:
            n.kind = Kind::Number;
            // Mix of integers, short decimals and values needing exponents.
            switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
                case 0: n.number = std::uniform_int_distribution<int>(0, 9)(rng); break;
                case 1: n.number = std::uniform_real_distribution<double>(0.0, 10.0)(rng); break;
                default: n.number = std::ldexp(std::uniform_real_distribution<double>(1.0, 2.0)(rng),
                                               std::uniform_int_distribution<int>(-60, 60)(rng));
            }
    }
    return n;
}

inline Node random_tree(std::mt19937_64& rng, int depth) {
    if (depth == 0 || std::uniform_int_distribution<int>(0, 3)(rng) == 0) return leaf(rng);
    Node n;
    const int pick = std::uniform_int_distribution<int>(0, 8)(rng);
    static constexpr Kind binaries[] = {Kind::Add, Kind::Sub, Kind::Mul, Kind::Div, Kind::Pow};
    if (pick < 5) {
        n.kind = binaries[pick];
        n.children = {random_tree(rng, depth - 1), random_tree(rng, depth - 1)};
    } else if (pick < 7) {
        n.kind = Kind::Neg;
        n.children = {random_tree(rng, depth - 1)};
    } else {
        n.kind = Kind::Call;
        static constexpr Func funcs[] = {Func::Sin, Func::Cos, Func::Exp, Func::Abs, Func::Min, Func::Max};
        n.func = funcs[std::uniform_int_distribution<int>(0, 5)(rng)];
        const int args = (n.func == Func::Min || n.func == Func::Max) ? 2 + (pick == 8) : 1;
        for (int i = 0; i < args; ++i) n.children.push_back(random_tree(rng, depth - 1));
    }
    return n;
}

inline std::string fully_parenthesized(const Node& n) {
    switch (n.kind) {
        case Kind::Number: return "(" + to_string(n) + ")";
        case Kind::Constant:
        case Kind::Scalar:
        case Kind::Indexed: return to_string(n);
        case Kind::Neg: return "(-" + fully_parenthesized(n.children[0]) + ")";
        case Kind::Add: return "(" + fully_parenthesized(n.children[0]) + "+" + fully_parenthesized(n.children[1]) + ")";
        case Kind::Sub: return "(" + fully_parenthesized(n.children[0]) + "-" + fully_parenthesized(n.children[1]) + ")";
        case Kind::Mul: return "(" + fully_parenthesized(n.children[0]) + "*" + fully_parenthesized(n.children[1]) + ")";
        case Kind::Div: return "(" + fully_parenthesized(n.children[0]) + "/" + fully_parenthesized(n.children[1]) + ")";
        case Kind::Pow: return "(" + fully_parenthesized(n.children[0]) + "^" + fully_parenthesized(n.children[1]) + ")";
        case Kind::Call: {
            std::string name = to_string(n);
            name = name.substr(0, name.find('('));
            std::string out = name + "(";
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (i) out += ",";
                out += fully_parenthesized(n.children[i]);
            }
            return out + ")";
        }
    }
    return "";
}

}  // namespace expr_testing
