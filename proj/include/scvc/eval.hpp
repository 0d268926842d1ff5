#pragma once

#include <map>
#include <string>
#include <variant>

#include "scvc/expr.hpp"

namespace scvc {

/// Ground value: integer or state-enumeration element.
using Value = std::variant<long long, std::string>;
using Valuation = std::map<std::string, Value>;

namespace detail {

using EvalResult = std::variant<long long, bool, std::string>;

inline EvalResult evalExprImpl(const ExprPtr& e, const Valuation& v);

inline long long evalInt(const ExprPtr& e, const Valuation& v) {
    auto r = evalExprImpl(e, v);
    if (const auto* i = std::get_if<long long>(&r)) return *i;
    throw Error("expected integer value during evaluation");
}

inline bool evalBoolFrom(const EvalResult& r) {
    if (const auto* b = std::get_if<bool>(&r)) return *b;
    throw Error("expected boolean value during evaluation");
}

inline EvalResult evalExprImpl(const ExprPtr& e, const Valuation& v) {
    struct V {
        const Valuation& env;
        EvalResult operator()(const Expr::IntLit& x) const { return x.value; }
        EvalResult operator()(const Expr::BoolLit& x) const { return x.value; }
        EvalResult operator()(const Expr::StateLit& x) const { return x.state; }
        EvalResult operator()(const Expr::InState&) const {
            throw Error("unresolved in(...) atom during evaluation");
        }
        EvalResult operator()(const Expr::VarRef& x) const {
            auto it = env.find(x.name);
            if (it == env.end()) throw Error("unbound variable " + x.name);
            if (const auto* i = std::get_if<long long>(&it->second)) return *i;
            return std::get<std::string>(it->second);
        }
        EvalResult operator()(const Expr::Unary& x) const {
            if (x.op == UnOp::Neg) return -evalInt(x.operand, env);
            return !evalBoolFrom(evalExprImpl(x.operand, env));
        }
        EvalResult operator()(const Expr::Binary& x) const {
            if (x.op == BinOp::And) {
                return evalBoolFrom(evalExprImpl(x.lhs, env)) &&
                       evalBoolFrom(evalExprImpl(x.rhs, env));
            }
            if (x.op == BinOp::Or) {
                return evalBoolFrom(evalExprImpl(x.lhs, env)) ||
                       evalBoolFrom(evalExprImpl(x.rhs, env));
            }
            if (x.op == BinOp::Imp) {
                return !evalBoolFrom(evalExprImpl(x.lhs, env)) ||
                       evalBoolFrom(evalExprImpl(x.rhs, env));
            }
            if (x.op == BinOp::Eq || x.op == BinOp::Ne) {
                auto l = evalExprImpl(x.lhs, env);
                auto r = evalExprImpl(x.rhs, env);
                bool eq;
                if (l.index() != r.index()) throw Error("type mismatch in equality");
                if (const auto* li = std::get_if<long long>(&l)) {
                    eq = *li == std::get<long long>(r);
                } else if (const auto* ls = std::get_if<std::string>(&l)) {
                    eq = *ls == std::get<std::string>(r);
                } else {
                    eq = std::get<bool>(l) == std::get<bool>(r);
                }
                return x.op == BinOp::Eq ? eq : !eq;
            }
            long long a = evalInt(x.lhs, env);
            long long b = evalInt(x.rhs, env);
            switch (x.op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Lt: return a < b;
                case BinOp::Le: return a <= b;
                case BinOp::Gt: return a > b;
                case BinOp::Ge: return a >= b;
                default: throw Error("unreachable operator");
            }
        }
        EvalResult operator()(const Expr::ExactlyOne& x) const {
            int holds = 0;
            for (const auto& i : x.items)
                if (evalBoolFrom(evalExprImpl(i, env))) ++holds;
            return holds == 1;
        }
    };
    return std::visit(V{v}, e->node());
}

}  // namespace detail

/// Evaluates a boolean formula under a ground valuation. All free variables
/// must be bound; `in(...)` atoms must have been lowered first.
inline bool evalFormula(const ExprPtr& e, const Valuation& v) {
    return detail::evalBoolFrom(detail::evalExprImpl(e, v));
}

/// Evaluates an integer expression under a ground valuation.
inline long long evalIntExpr(const ExprPtr& e, const Valuation& v) {
    return detail::evalInt(e, v);
}

}  // namespace scvc
