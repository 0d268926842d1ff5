#pragma once

#include <set>
#include <string>
#include <vector>

#include "scvc/invariants.hpp"

namespace scvc {

/// The unit of verification: (source states, guard, action, target states).
/// `provenance` carries document indexes of the transitions that contributed
/// to the tuple; it rides along through composition and is ignored by
/// comparison.
struct VTuple {
    std::set<std::string> sources;
    ExprPtr guard = ex::truth();
    StmtPtr action = st::skip();
    std::set<std::string> targets;
    std::set<std::size_t> provenance;

    /// Trivial tuples assert nothing: no state change and no effect.
    bool trivial() const { return action->isSkip() && targets.empty(); }
};

inline int compare(const VTuple& a, const VTuple& b) {
    if (a.sources != b.sources) return a.sources < b.sources ? -1 : 1;
    if (int c = compare(a.guard, b.guard)) return c;
    if (int c = compare(a.action, b.action)) return c;
    if (a.targets != b.targets) return a.targets < b.targets ? -1 : 1;
    return 0;
}

inline bool operator==(const VTuple& a, const VTuple& b) { return compare(a, b) == 0; }

using TupleSet = std::vector<VTuple>;  // kept sorted and deduplicated

/// Sorts and deduplicates; provenance of structurally equal tuples merges.
inline void normalizeSet(TupleSet& ts) {
    std::sort(ts.begin(), ts.end(), [](const VTuple& a, const VTuple& b) {
        return compare(a, b) < 0;
    });
    TupleSet out;
    for (auto& t : ts) {
        if (!out.empty() && out.back() == t) {
            out.back().provenance.insert(t.provenance.begin(), t.provenance.end());
        } else {
            out.push_back(std::move(t));
        }
    }
    ts = std::move(out);
}

inline TupleSet setUnion(const TupleSet& a, const TupleSet& b) {
    TupleSet out = a;
    out.insert(out.end(), b.begin(), b.end());
    normalizeSet(out);
    return out;
}

// ---------------------------------------------------------------------------
// Printing

inline std::string printStateSet(const StatechartModel& m, const std::set<std::string>& ss) {
    std::string out = "{";
    bool first = true;
    for (const auto& s : m.docSorted(ss)) {
        if (!first) out += ",";
        first = false;
        out += s;
    }
    return out + "}";
}

/// Statement rendering for tuple dumps: state assignments print as writes to
/// the owning XOR's variable, mirroring the generated target code.
inline std::string printStmt(const StatechartModel& m, const StateVarEncoding& enc,
                             const StmtPtr& s) {
    if (s->isSkip()) return "skip";
    if (const auto* a = s->as<Statement::Assignment>())
        return a->lhs + " := " + printExpr(a->rhs, PrintStyle::Ascii);
    if (const auto* sa = s->as<Statement::StateAssign>()) {
        auto v = enc.parentVarOf(m, sa->state);
        if (v) return *v + " := " + sa->state;
        return "enter " + sa->state;
    }
    if (const auto* b = s->as<Statement::Bcast>()) return "broadcast " + b->event;
    if (const auto* p = s->as<Statement::Par>()) {
        std::string out;
        for (std::size_t i = 0; i < p->stmts.size(); ++i) {
            if (i) out += " || ";
            bool wrap = p->stmts[i]->as<Statement::Seq>() != nullptr;
            out += wrap ? "(" + printStmt(m, enc, p->stmts[i]) + ")" : printStmt(m, enc, p->stmts[i]);
        }
        return out;
    }
    if (const auto* q = s->as<Statement::Seq>()) {
        std::string out;
        for (std::size_t i = 0; i < q->stmts.size(); ++i) {
            if (i) out += "; ";
            bool wrap = q->stmts[i]->as<Statement::Par>() != nullptr;
            out += wrap ? "(" + printStmt(m, enc, q->stmts[i]) + ")" : printStmt(m, enc, q->stmts[i]);
        }
        return out;
    }
    if (const auto* g = s->as<Statement::Guard>()) {
        std::string out = "if ";
        bool first = true;
        for (const auto& [c, body] : g->branches) {
            if (!first) out += " [] ";
            first = false;
            if (const auto* t = c.as<Condition::StateTest>()) {
                auto v = enc.parentVarOf(m, t->state);
                out += v ? *v + " = " + t->state : "in(" + t->state + ")";
            } else {
                out += printExpr(c.as<Condition::Predicate>()->expr, PrintStyle::Ascii);
            }
            out += " -> " + printStmt(m, enc, body);
        }
        return out + " fi";
    }
    return "?";
}

/// One-line debug form, one tuple per line in dumps.
inline std::string dumpTuple(const StatechartModel& m, const StateVarEncoding& enc,
                             const VTuple& t) {
    return "sources " + printStateSet(m, t.sources) + " | guard " +
           printExpr(t.guard, PrintStyle::Ascii) + " | action " + printStmt(m, enc, t.action) +
           " | targets " + printStateSet(m, t.targets);
}

}  // namespace scvc
