#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "scvc/diagnostics.hpp"

namespace scvc {

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Imp };

inline bool isArith(BinOp op) { return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul; }
inline bool isCompare(BinOp op) {
    switch (op) {
        case BinOp::Eq: case BinOp::Ne: case BinOp::Lt:
        case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return true;
        default: return false;
    }
}
inline bool isConnective(BinOp op) { return op == BinOp::And || op == BinOp::Or || op == BinOp::Imp; }

/// Expression language: linear integer arithmetic, booleans, state tests.
///
/// Two kinds of state atoms exist. `InState` is the surface-level test
/// written in models as `in(S)`; it is rewritten to an equation on the
/// parent XOR's state variable before any formula is discharged.
/// `StateLit` is the enumeration literal naming a state, appearing on the
/// right-hand side of such equations and in state-variable assignments.
class Expr {
public:
    struct IntLit { long long value = 0; };
    struct BoolLit { bool value = false; };
    struct VarRef { std::string name; };
    struct StateLit { std::string state; };
    struct InState { std::string state; };
    struct Unary { UnOp op; ExprPtr operand; };
    struct Binary { BinOp op; ExprPtr lhs, rhs; };
    struct ExactlyOne { std::vector<ExprPtr> items; };  // n-ary: exactly one holds

    using Node = std::variant<IntLit, BoolLit, VarRef, StateLit, InState, Unary, Binary, ExactlyOne>;

    explicit Expr(Node n) : node_(std::move(n)) {}

    const Node& node() const { return node_; }

    template <class T>
    const T* as() const { return std::get_if<T>(&node_); }

    bool isBoolLit(bool v) const {
        const auto* b = as<BoolLit>();
        return b && b->value == v;
    }

private:
    Node node_;
};

namespace ex {

inline ExprPtr lit(long long v) { return std::make_shared<Expr>(Expr::IntLit{v}); }
inline ExprPtr boolean(bool v) { return std::make_shared<Expr>(Expr::BoolLit{v}); }
inline ExprPtr truth() { return boolean(true); }
inline ExprPtr var(std::string name) { return std::make_shared<Expr>(Expr::VarRef{std::move(name)}); }
inline ExprPtr stateLit(std::string s) { return std::make_shared<Expr>(Expr::StateLit{std::move(s)}); }
inline ExprPtr inState(std::string s) { return std::make_shared<Expr>(Expr::InState{std::move(s)}); }

inline ExprPtr unary(UnOp op, ExprPtr e) {
    if (op == UnOp::Not) {
        if (const auto* b = e->as<Expr::BoolLit>()) return boolean(!b->value);
    }
    if (op == UnOp::Neg) {
        if (const auto* i = e->as<Expr::IntLit>()) return lit(-i->value);
    }
    return std::make_shared<Expr>(Expr::Unary{op, std::move(e)});
}

inline ExprPtr notE(ExprPtr e) { return unary(UnOp::Not, std::move(e)); }
inline ExprPtr neg(ExprPtr e) { return unary(UnOp::Neg, std::move(e)); }

/// Binary node with light constant folding. Equations between two state
/// literals collapse to a truth value, and `true` units of ∧/⇒ vanish, so
/// substituted formulas come out readable (e.g. U = U ∧ x > 6 becomes x > 6).
inline ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b) {
    if (op == BinOp::Eq || op == BinOp::Ne) {
        const auto* sa = a->as<Expr::StateLit>();
        const auto* sb = b->as<Expr::StateLit>();
        if (sa && sb) {
            bool eq = sa->state == sb->state;
            return boolean(op == BinOp::Eq ? eq : !eq);
        }
    }
    if (op == BinOp::And) {
        if (a->isBoolLit(true)) return b;
        if (b->isBoolLit(true)) return a;
        if (a->isBoolLit(false) || b->isBoolLit(false)) return boolean(false);
    }
    if (op == BinOp::Or) {
        if (a->isBoolLit(false)) return b;
        if (b->isBoolLit(false)) return a;
        if (a->isBoolLit(true) || b->isBoolLit(true)) return boolean(true);
    }
    if (op == BinOp::Imp) {
        if (a->isBoolLit(true)) return b;
        if (a->isBoolLit(false)) return boolean(true);
        if (b->isBoolLit(true)) return boolean(true);
    }
    return std::make_shared<Expr>(Expr::Binary{op, std::move(a), std::move(b)});
}

inline ExprPtr add(ExprPtr a, ExprPtr b) { return binary(BinOp::Add, std::move(a), std::move(b)); }
inline ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(BinOp::Sub, std::move(a), std::move(b)); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(BinOp::Mul, std::move(a), std::move(b)); }
inline ExprPtr eq(ExprPtr a, ExprPtr b) { return binary(BinOp::Eq, std::move(a), std::move(b)); }
inline ExprPtr ne(ExprPtr a, ExprPtr b) { return binary(BinOp::Ne, std::move(a), std::move(b)); }
inline ExprPtr lt(ExprPtr a, ExprPtr b) { return binary(BinOp::Lt, std::move(a), std::move(b)); }
inline ExprPtr le(ExprPtr a, ExprPtr b) { return binary(BinOp::Le, std::move(a), std::move(b)); }
inline ExprPtr gt(ExprPtr a, ExprPtr b) { return binary(BinOp::Gt, std::move(a), std::move(b)); }
inline ExprPtr ge(ExprPtr a, ExprPtr b) { return binary(BinOp::Ge, std::move(a), std::move(b)); }
inline ExprPtr conj(ExprPtr a, ExprPtr b) { return binary(BinOp::And, std::move(a), std::move(b)); }
inline ExprPtr disj(ExprPtr a, ExprPtr b) { return binary(BinOp::Or, std::move(a), std::move(b)); }
inline ExprPtr implies(ExprPtr a, ExprPtr b) { return binary(BinOp::Imp, std::move(a), std::move(b)); }

inline ExprPtr conjAll(const std::vector<ExprPtr>& es) {
    ExprPtr acc = truth();
    for (const auto& e : es) acc = conj(acc, e);
    return acc;
}

/// Exactly-one-holds over the argument list. A single argument collapses
/// to that argument; an empty list has no witness and is false.
inline ExprPtr exactlyOne(std::vector<ExprPtr> items) {
    if (items.empty()) return boolean(false);
    if (items.size() == 1) return items.front();
    return std::make_shared<Expr>(Expr::ExactlyOne{std::move(items)});
}

}  // namespace ex

// ---------------------------------------------------------------------------
// Structural comparison

inline int compare(const ExprPtr& a, const ExprPtr& b);

inline int compareVec(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (int c = compare(a[i], b[i])) return c;
    return 0;
}

/// Total order on expressions; 0 iff structurally equal.
inline int compare(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return 0;
    const auto& na = a->node();
    const auto& nb = b->node();
    if (na.index() != nb.index()) return na.index() < nb.index() ? -1 : 1;
    struct Cmp {
        const Expr::Node& other;
        int operator()(const Expr::IntLit& x) const {
            const auto& y = std::get<Expr::IntLit>(other);
            return x.value == y.value ? 0 : (x.value < y.value ? -1 : 1);
        }
        int operator()(const Expr::BoolLit& x) const {
            const auto& y = std::get<Expr::BoolLit>(other);
            return x.value == y.value ? 0 : (x.value < y.value ? -1 : 1);
        }
        int operator()(const Expr::VarRef& x) const {
            return std::get<Expr::VarRef>(other).name.compare(x.name) * -1;
        }
        int operator()(const Expr::StateLit& x) const {
            return std::get<Expr::StateLit>(other).state.compare(x.state) * -1;
        }
        int operator()(const Expr::InState& x) const {
            return std::get<Expr::InState>(other).state.compare(x.state) * -1;
        }
        int operator()(const Expr::Unary& x) const {
            const auto& y = std::get<Expr::Unary>(other);
            if (x.op != y.op) return x.op < y.op ? -1 : 1;
            return compare(x.operand, y.operand);
        }
        int operator()(const Expr::Binary& x) const {
            const auto& y = std::get<Expr::Binary>(other);
            if (x.op != y.op) return x.op < y.op ? -1 : 1;
            if (int c = compare(x.lhs, y.lhs)) return c;
            return compare(x.rhs, y.rhs);
        }
        int operator()(const Expr::ExactlyOne& x) const {
            return compareVec(x.items, std::get<Expr::ExactlyOne>(other).items);
        }
    };
    return std::visit(Cmp{nb}, na);
}

inline bool equal(const ExprPtr& a, const ExprPtr& b) { return compare(a, b) == 0; }

// ---------------------------------------------------------------------------
// Traversals

/// Simultaneous substitution of variables by expressions. Rebuilds through
/// the smart constructors, so introduced tautologies simplify away.
inline ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& subst) {
    using namespace ex;
    struct Sub {
        const std::map<std::string, ExprPtr>& s;
        const ExprPtr& self;
        ExprPtr operator()(const Expr::IntLit&) const { return self; }
        ExprPtr operator()(const Expr::BoolLit&) const { return self; }
        ExprPtr operator()(const Expr::StateLit&) const { return self; }
        ExprPtr operator()(const Expr::InState&) const { return self; }
        ExprPtr operator()(const Expr::VarRef& v) const {
            auto it = s.find(v.name);
            return it == s.end() ? self : it->second;
        }
        ExprPtr operator()(const Expr::Unary& u) const {
            return unary(u.op, substitute(u.operand, s));
        }
        ExprPtr operator()(const Expr::Binary& b) const {
            return binary(b.op, substitute(b.lhs, s), substitute(b.rhs, s));
        }
        ExprPtr operator()(const Expr::ExactlyOne& x) const {
            std::vector<ExprPtr> items;
            items.reserve(x.items.size());
            for (const auto& i : x.items) items.push_back(substitute(i, s));
            return exactlyOne(std::move(items));
        }
    };
    if (subst.empty()) return e;
    return std::visit(Sub{subst, e}, e->node());
}

inline void collectFreeVars(const ExprPtr& e, std::set<std::string>& out) {
    if (const auto* v = e->as<Expr::VarRef>()) {
        out.insert(v->name);
    } else if (const auto* u = e->as<Expr::Unary>()) {
        collectFreeVars(u->operand, out);
    } else if (const auto* b = e->as<Expr::Binary>()) {
        collectFreeVars(b->lhs, out);
        collectFreeVars(b->rhs, out);
    } else if (const auto* x = e->as<Expr::ExactlyOne>()) {
        for (const auto& i : x->items) collectFreeVars(i, out);
    }
}

inline std::set<std::string> freeVars(const ExprPtr& e) {
    std::set<std::string> out;
    collectFreeVars(e, out);
    return out;
}

/// Flattens nested conjunctions into a leaf list; used by tests and by the
/// associativity-insensitive formula comparison.
inline void conjuncts(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (const auto* b = e->as<Expr::Binary>(); b && b->op == BinOp::And) {
        conjuncts(b->lhs, out);
        conjuncts(b->rhs, out);
        return;
    }
    out.push_back(e);
}

inline std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
    std::vector<ExprPtr> out;
    conjuncts(e, out);
    return out;
}

/// Equality modulo associativity of ∧ at every level of the tree.
inline bool equalModuloAssoc(const ExprPtr& a, const ExprPtr& b);

inline bool equalConjLists(std::vector<ExprPtr> xs, std::vector<ExprPtr> ys) {
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!equalModuloAssoc(xs[i], ys[i])) return false;
    return true;
}

inline bool equalModuloAssoc(const ExprPtr& a, const ExprPtr& b) {
    const auto* ba = a->as<Expr::Binary>();
    const auto* bb = b->as<Expr::Binary>();
    if (ba && bb && ba->op == BinOp::And && bb->op == BinOp::And)
        return equalConjLists(conjuncts(a), conjuncts(b));
    if (ba && bb && ba->op == bb->op)
        return equalModuloAssoc(ba->lhs, bb->lhs) && equalModuloAssoc(ba->rhs, bb->rhs);
    if (ba || bb) return false;
    if (const auto* ua = a->as<Expr::Unary>()) {
        const auto* ub = b->as<Expr::Unary>();
        return ub && ua->op == ub->op && equalModuloAssoc(ua->operand, ub->operand);
    }
    if (const auto* xa = a->as<Expr::ExactlyOne>()) {
        const auto* xb = b->as<Expr::ExactlyOne>();
        if (!xb || xa->items.size() != xb->items.size()) return false;
        for (std::size_t i = 0; i < xa->items.size(); ++i)
            if (!equalModuloAssoc(xa->items[i], xb->items[i])) return false;
        return true;
    }
    return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Printing

enum class PrintStyle { Unicode, Ascii };

namespace detail {

inline int precedence(const ExprPtr& e) {
    if (const auto* b = e->as<Expr::Binary>()) {
        switch (b->op) {
            case BinOp::Imp: return 1;
            case BinOp::Or: return 2;
            case BinOp::And: return 3;
            case BinOp::Add: case BinOp::Sub: return 5;
            case BinOp::Mul: return 6;
            default: return 4;  // comparisons
        }
    }
    if (e->as<Expr::Unary>()) return 7;
    return 8;  // atoms, ExactlyOne (printed function-style)
}

inline const char* opToken(BinOp op, PrintStyle st) {
    const bool u = st == PrintStyle::Unicode;
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Eq: return "=";
        case BinOp::Ne: return u ? "≠" : "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return u ? "≤" : "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return u ? "≥" : ">=";
        case BinOp::And: return u ? "∧" : "&&";
        case BinOp::Or: return u ? "∨" : "||";
        case BinOp::Imp: return u ? "⇒" : "=>";
    }
    return "?";
}

inline void printExpr(std::string& out, const ExprPtr& e, PrintStyle st);

inline void printChild(std::string& out, const ExprPtr& child, int parentPrec, bool tight, PrintStyle st) {
    int cp = precedence(child);
    // Connective children at the same level keep parentheses: the nesting of
    // ∧-trees mirrors the state hierarchy and is part of the printed shape.
    bool parens = tight ? cp <= parentPrec : cp < parentPrec;
    if (parens) out += "(";
    printExpr(out, child, st);
    if (parens) out += ")";
}

inline void printExpr(std::string& out, const ExprPtr& e, PrintStyle st) {
    struct Pr {
        std::string& out;
        PrintStyle st;
        void operator()(const Expr::IntLit& x) const { out += std::to_string(x.value); }
        void operator()(const Expr::BoolLit& x) const { out += x.value ? "true" : "false"; }
        void operator()(const Expr::VarRef& x) const { out += x.name; }
        void operator()(const Expr::StateLit& x) const { out += x.state; }
        void operator()(const Expr::InState& x) const { out += "in(" + x.state + ")"; }
        void operator()(const Expr::Unary& x) const {
            out += x.op == UnOp::Not ? (st == PrintStyle::Unicode ? "¬" : "!") : "-";
            printChild(out, x.operand, 7, false, st);
        }
        void operator()(const Expr::Binary& x) const {
            int prec = 4;
            switch (x.op) {
                case BinOp::Imp: prec = 1; break;
                case BinOp::Or: prec = 2; break;
                case BinOp::And: prec = 3; break;
                case BinOp::Add: case BinOp::Sub: prec = 5; break;
                case BinOp::Mul: prec = 6; break;
                default: break;
            }
            bool conn = isConnective(x.op);
            printChild(out, x.lhs, prec, conn, st);
            out += " ";
            out += opToken(x.op, st);
            out += " ";
            printChild(out, x.rhs, prec, conn || x.op == BinOp::Sub, st);
        }
        void operator()(const Expr::ExactlyOne& x) const {
            out += st == PrintStyle::Unicode ? "⊗(" : "exactlyOne(";
            bool first = true;
            for (const auto& i : x.items) {
                if (!first) out += ", ";
                first = false;
                printExpr(out, i, st);
            }
            out += ")";
        }
    };
    std::visit(Pr{out, st}, e->node());
}

}  // namespace detail

inline std::string printExpr(const ExprPtr& e, PrintStyle st = PrintStyle::Unicode) {
    std::string out;
    detail::printExpr(out, e, st);
    return out;
}

}  // namespace scvc
