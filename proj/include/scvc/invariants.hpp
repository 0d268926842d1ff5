#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scvc/model.hpp"

namespace scvc {

/// Per-XOR state variable: its name and the enumeration of direct children
/// the variable ranges over.
struct XorVar {
    std::string xorId;
    std::string var;
    std::vector<std::string> values;  // child ids in declaration order
};

/// Assignment of one variable to every XOR state, in document order. The
/// implicit root maps to `root`; other XOR states map to the lowercased state
/// name, with a numeric suffix on collision.
class StateVarEncoding {
public:
    const std::vector<XorVar>& entries() const { return entries_; }
    const Diagnostics& warnings() const { return warnings_; }

    bool hasVar(const std::string& xorId) const { return byState_.count(xorId) > 0; }

    const std::string& varFor(const std::string& xorId) const {
        auto it = byState_.find(xorId);
        if (it == byState_.end()) throw Error("no state variable for " + xorId);
        return entries_[it->second].var;
    }

    const XorVar* findByVar(const std::string& var) const {
        auto it = byVar_.find(var);
        return it == byVar_.end() ? nullptr : &entries_[it->second];
    }

    /// Variable of the XOR owning `s`, or nullopt when the parent is an AND
    /// region boundary (membership is implied) or `s` is the root.
    std::optional<std::string> parentVarOf(const StatechartModel& m, const std::string& s) const {
        auto p = m.parentOf(s);
        if (!p) return std::nullopt;
        if (!m.state(*p).isXor()) return std::nullopt;
        return varFor(*p);
    }

    friend StateVarEncoding encodeStateVars(const StatechartModel& m);

private:
    void add(XorVar xv) {
        byState_[xv.xorId] = entries_.size();
        byVar_[xv.var] = entries_.size();
        entries_.push_back(std::move(xv));
    }

    std::vector<XorVar> entries_;
    std::map<std::string, std::size_t> byState_;
    std::map<std::string, std::size_t> byVar_;
    Diagnostics warnings_;
};

inline StateVarEncoding encodeStateVars(const StatechartModel& m) {
    StateVarEncoding enc;
    std::set<std::string> used(m.variables().begin(), m.variables().end());
    for (const auto& id : m.docOrder()) {
        const State& s = m.state(id);
        if (!s.isXor()) continue;
        std::string base;
        if (id == kRootId) {
            base = kRootId;
        } else {
            base = id;
            std::transform(base.begin(), base.end(), base.begin(),
                           [](unsigned char c) { return std::tolower(c); });
        }
        std::string name = base;
        for (int n = 2; used.count(name); ++n) name = base + std::to_string(n);
        if (name != base)
            enc.warnings_.push_back(
                warningDiag("state variable for " + id + " renamed to " + name + " (collision)"));
        used.insert(name);
        enc.add(XorVar{id, name, m.childrenOf(id)});
    }
    return enc;
}

// ---------------------------------------------------------------------------
// Invariant algebra

/// Test for residence in `s`: an equation on the parent XOR's variable, or
/// `true` when residence is implied (AND regions, the root itself).
inline ExprPtr stateTest(const StatechartModel& m, const StateVarEncoding& enc,
                         const std::string& s) {
    m.state(s);
    auto v = enc.parentVarOf(m, s);
    if (!v) return ex::truth();
    return ex::eq(ex::var(*v), ex::stateLit(s));
}

/// State invariant: residence test conjoined with the designer's invariant.
inline ExprPtr si(const StatechartModel& m, const StateVarEncoding& enc, const std::string& s) {
    return ex::conj(stateTest(m, enc, s), m.state(s).invariant);
}

/// Child invariant: what residence in `s` implies about the subtree below it.
/// XOR children contribute exactly-one of their child invariants, AND regions
/// contribute all of them.
inline ExprPtr ci(const StatechartModel& m, const StateVarEncoding& enc, const std::string& s) {
    const State& node = m.state(s);
    ExprPtr base = si(m, enc, s);
    if (node.isBasic()) return base;
    std::vector<ExprPtr> childCis;
    childCis.reserve(node.children.size());
    for (const auto& c : node.children) childCis.push_back(ci(m, enc, c.id));
    if (node.isXor()) return ex::conj(base, ex::exactlyOne(std::move(childCis)));
    ExprPtr all = childCis.front();
    for (std::size_t i = 1; i < childCis.size(); ++i) all = ex::conj(all, childCis[i]);
    return ex::conj(base, all);
}

/// Accumulated invariant: si of every strict ancestor (outermost first)
/// conjoined with ci of the state itself.
inline ExprPtr ai(const StatechartModel& m, const StateVarEncoding& enc, const std::string& s) {
    auto up = m.ancestorsOf(s);
    ExprPtr acc = ex::truth();
    for (auto it = up.rbegin(); it != up.rend(); ++it) acc = ex::conj(acc, si(m, enc, *it));
    return ex::conj(acc, ci(m, enc, s));
}

/// Reflexive-transitive parent closure of a state set.
inline std::set<std::string> cl(const StatechartModel& m, const std::set<std::string>& ss) {
    std::set<std::string> out;
    for (const auto& s : ss) {
        out.insert(s);
        for (const auto& a : m.ancestorsOf(s)) out.insert(a);
    }
    return out;
}

/// Set accumulated invariant over a configuration fragment. For each state in
/// the closure: si when the state is basic, si when the closure already names
/// a child of the state (the child's own entry carries the rest), ci when the
/// closure stops there and the whole subtree invariant is implied.
inline ExprPtr sai(const StatechartModel& m, const StateVarEncoding& enc,
                   const std::set<std::string>& ss) {
    std::set<std::string> closed = cl(m, ss);
    ExprPtr acc = ex::truth();
    for (const auto& id : m.docOrder()) {
        if (!closed.count(id)) continue;
        const State& s = m.state(id);
        bool childInClosure = false;
        for (const auto& c : s.children) childInClosure |= closed.count(c.id) > 0;
        ExprPtr part = (s.isBasic() || childInClosure) ? si(m, enc, id) : ci(m, enc, id);
        acc = ex::conj(acc, part);
    }
    return acc;
}

/// Residence in `s` as a closed test: the per-level equations along the whole
/// ancestor path. A state variable is only meaningful while its parent chain
/// is active (exited regions keep stale values), so a bare stateTest would be
/// too weak here.
inline ExprPtr residenceTest(const StatechartModel& m, const StateVarEncoding& enc,
                             const std::string& s) {
    auto up = m.ancestorsOf(s);
    ExprPtr acc = ex::truth();
    for (auto it = up.rbegin(); it != up.rend(); ++it) acc = ex::conj(acc, stateTest(m, enc, *it));
    return ex::conj(acc, stateTest(m, enc, s));
}

/// Rewrites surface-level `in(S)` atoms into state-variable equations.
inline ExprPtr lowerStateTests(const StatechartModel& m, const StateVarEncoding& enc,
                               const ExprPtr& e) {
    using namespace ex;
    if (const auto* i = e->as<Expr::InState>()) return residenceTest(m, enc, i->state);
    if (const auto* u = e->as<Expr::Unary>())
        return unary(u->op, lowerStateTests(m, enc, u->operand));
    if (const auto* b = e->as<Expr::Binary>())
        return binary(b->op, lowerStateTests(m, enc, b->lhs), lowerStateTests(m, enc, b->rhs));
    if (const auto* x = e->as<Expr::ExactlyOne>()) {
        std::vector<ExprPtr> items;
        items.reserve(x->items.size());
        for (const auto& i : x->items) items.push_back(lowerStateTests(m, enc, i));
        return exactlyOne(std::move(items));
    }
    return e;
}

}  // namespace scvc
