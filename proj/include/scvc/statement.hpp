#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "scvc/expr.hpp"

namespace scvc {

class Statement;
using StmtPtr = std::shared_ptr<const Statement>;

/// Guard-branch condition: residence test for a state, or a plain predicate.
class Condition {
public:
    struct StateTest { std::string state; };
    struct Predicate { ExprPtr expr; };
    using Node = std::variant<StateTest, Predicate>;

    explicit Condition(Node n) : node_(std::move(n)) {}
    const Node& node() const { return node_; }

    template <class T>
    const T* as() const { return std::get_if<T>(&node_); }

private:
    Node node_;
};

inline Condition condStateTest(std::string s) { return Condition(Condition::StateTest{std::move(s)}); }
inline Condition condPredicate(ExprPtr e) { return Condition(Condition::Predicate{std::move(e)}); }

/// Guarded-command statement language for transition actions and the code
/// generated per event.
class Statement {
public:
    struct StateAssign { std::string state; };
    struct Assignment { std::string lhs; ExprPtr rhs; };
    struct Bcast { std::string event; };
    struct Guard { std::vector<std::pair<Condition, StmtPtr>> branches; };  // nonempty
    struct Par { std::vector<StmtPtr> stmts; };
    struct Seq { std::vector<StmtPtr> stmts; };
    struct Skip {};

    using Node = std::variant<StateAssign, Assignment, Bcast, Guard, Par, Seq, Skip>;

    explicit Statement(Node n) : node_(std::move(n)) {}
    const Node& node() const { return node_; }

    template <class T>
    const T* as() const { return std::get_if<T>(&node_); }

    bool isSkip() const { return std::holds_alternative<Skip>(node_); }

private:
    Node node_;
};

namespace st {

inline StmtPtr skip() {
    static const StmtPtr s = std::make_shared<Statement>(Statement::Skip{});
    return s;
}
inline StmtPtr stateAssign(std::string state) {
    return std::make_shared<Statement>(Statement::StateAssign{std::move(state)});
}
inline StmtPtr assign(std::string lhs, ExprPtr rhs) {
    return std::make_shared<Statement>(Statement::Assignment{std::move(lhs), std::move(rhs)});
}
inline StmtPtr bcast(std::string event) {
    return std::make_shared<Statement>(Statement::Bcast{std::move(event)});
}
inline StmtPtr guard(std::vector<std::pair<Condition, StmtPtr>> branches) {
    if (branches.empty()) throw Error("Guard requires at least one branch");
    return std::make_shared<Statement>(Statement::Guard{std::move(branches)});
}
inline StmtPtr par(std::vector<StmtPtr> stmts) {
    return std::make_shared<Statement>(Statement::Par{std::move(stmts)});
}
inline StmtPtr seq(std::vector<StmtPtr> stmts) {
    return std::make_shared<Statement>(Statement::Seq{std::move(stmts)});
}

}  // namespace st

// ---------------------------------------------------------------------------
// Structural comparison

inline int compare(const StmtPtr& a, const StmtPtr& b);

inline int compare(const Condition& a, const Condition& b) {
    if (a.node().index() != b.node().index())
        return a.node().index() < b.node().index() ? -1 : 1;
    if (const auto* sa = a.as<Condition::StateTest>())
        return sa->state.compare(b.as<Condition::StateTest>()->state);
    return compare(a.as<Condition::Predicate>()->expr, b.as<Condition::Predicate>()->expr);
}

inline int compareStmtVec(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (int c = compare(a[i], b[i])) return c;
    return 0;
}

inline int compare(const StmtPtr& a, const StmtPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->node().index() != b->node().index())
        return a->node().index() < b->node().index() ? -1 : 1;
    struct Cmp {
        const Statement& other;
        int operator()(const Statement::StateAssign& x) const {
            return x.state.compare(other.as<Statement::StateAssign>()->state);
        }
        int operator()(const Statement::Assignment& x) const {
            const auto* y = other.as<Statement::Assignment>();
            if (int c = x.lhs.compare(y->lhs)) return c;
            return compare(x.rhs, y->rhs);
        }
        int operator()(const Statement::Bcast& x) const {
            return x.event.compare(other.as<Statement::Bcast>()->event);
        }
        int operator()(const Statement::Guard& x) const {
            const auto* y = other.as<Statement::Guard>();
            if (x.branches.size() != y->branches.size())
                return x.branches.size() < y->branches.size() ? -1 : 1;
            for (std::size_t i = 0; i < x.branches.size(); ++i) {
                if (int c = compare(x.branches[i].first, y->branches[i].first)) return c;
                if (int c = compare(x.branches[i].second, y->branches[i].second)) return c;
            }
            return 0;
        }
        int operator()(const Statement::Par& x) const {
            return compareStmtVec(x.stmts, other.as<Statement::Par>()->stmts);
        }
        int operator()(const Statement::Seq& x) const {
            return compareStmtVec(x.stmts, other.as<Statement::Seq>()->stmts);
        }
        int operator()(const Statement::Skip&) const { return 0; }
    };
    return std::visit(Cmp{*b}, a->node());
}

inline bool equal(const StmtPtr& a, const StmtPtr& b) { return compare(a, b) == 0; }

// ---------------------------------------------------------------------------
// Normalization

/// Canonical form for composed actions: nested Par-in-Par and Seq-in-Seq are
/// flattened, Skip elements dropped, and singleton wrappers unwrapped. Every
/// tuple composition runs its result through this, which keeps actions from
/// accumulating wrapper noise and makes structural tuple comparison usable.
inline StmtPtr normalizeStmt(const StmtPtr& s);

namespace detail {

template <class Kind>
inline StmtPtr normalizeComposite(const std::vector<StmtPtr>& stmts,
                                  StmtPtr (*make)(std::vector<StmtPtr>)) {
    std::vector<StmtPtr> flat;
    for (const auto& el : stmts) {
        StmtPtr n = normalizeStmt(el);
        if (n->isSkip()) continue;
        if (const auto* inner = n->as<Kind>()) {
            flat.insert(flat.end(), inner->stmts.begin(), inner->stmts.end());
        } else {
            flat.push_back(std::move(n));
        }
    }
    if (flat.empty()) return st::skip();
    if (flat.size() == 1) return flat.front();
    return make(std::move(flat));
}

}  // namespace detail

inline StmtPtr normalizeStmt(const StmtPtr& s) {
    if (const auto* p = s->as<Statement::Par>())
        return detail::normalizeComposite<Statement::Par>(p->stmts, &st::par);
    if (const auto* q = s->as<Statement::Seq>())
        return detail::normalizeComposite<Statement::Seq>(q->stmts, &st::seq);
    if (const auto* g = s->as<Statement::Guard>()) {
        std::vector<std::pair<Condition, StmtPtr>> branches;
        branches.reserve(g->branches.size());
        for (const auto& [c, body] : g->branches) branches.emplace_back(c, normalizeStmt(body));
        return st::guard(std::move(branches));
    }
    return s;
}

}  // namespace scvc
