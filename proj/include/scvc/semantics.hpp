#pragma once

#include <string>
#include <vector>

#include "scvc/vcgen.hpp"

namespace scvc {

struct SpontaneousCycleError : Error {
    std::vector<std::string> states;
    explicit SpontaneousCycleError(std::vector<std::string> ss)
        : Error("spontaneous transitions form a cycle through " + ss.back()), states(std::move(ss)) {}
};

/// Restriction of a state tree to one event: the shape is untouched, every
/// XOR keeps only transitions triggered by `e` or spontaneously.
inline State resStateEvent(const std::string& e, const State& s) {
    State out = s;
    out.children.clear();
    out.children.reserve(s.children.size());
    for (const auto& c : s.children) out.children.push_back(resStateEvent(e, c));
    if (s.isXor()) {
        out.transitions.clear();
        for (const auto& t : s.transitions)
            if (t.event == e || t.spontaneous()) out.transitions.push_back(t);
    }
    return out;
}

namespace detail {

/// Entry tuple for the state itself. Only children of an XOR write a state
/// variable; for AND regions and the root there is nothing to record, which
/// keeps region names out of action code and target sets.
inline TupleSet selfEntryTuple(const StatechartModel& m, const std::string& id) {
    auto p = m.parentOf(id);
    if (p && m.state(*p).isXor()) {
        VTuple t;
        t.action = st::stateAssign(id);
        t.targets.insert(id);
        return {t};
    }
    return {VTuple{}};
}

}  // namespace detail

/// Tuple entering the default configuration of `s`: own state assignment
/// first, then regions or the initial child. Always a singleton set.
inline TupleSet initialize(const StatechartModel& m, const State& s) {
    std::vector<TupleSet> factors;
    factors.push_back(detail::selfEntryTuple(m, s.id));
    if (s.isAnd()) {
        for (const auto& r : s.children) factors.push_back(initialize(m, r));
    } else if (s.isXor()) {
        for (const auto& c : s.children)
            if (c.id == s.init) factors.push_back(initialize(m, c));
    }
    return parProd(factors);
}

/// Enumeration of the possible configurations strictly below `s`, as
/// source-only tuples. One tuple per choice of active child in every nested
/// XOR; AND regions multiply out.
inline TupleSet configEnum(const StatechartModel& m, const State& s) {
    if (s.isBasic()) return {VTuple{}};
    if (s.isAnd()) {
        std::vector<TupleSet> factors;
        factors.reserve(s.children.size());
        for (const auto& r : s.children) factors.push_back(configEnum(m, r));
        return parProd(factors);
    }
    TupleSet out;
    for (const auto& c : s.children) {
        VTuple here;
        here.sources.insert(c.id);
        TupleSet joined = parProd({{here}, configEnum(m, c)});
        out.insert(out.end(), joined.begin(), joined.end());
    }
    normalizeSet(out);
    return out;
}

inline TupleSet getSpon(const StatechartModel& m, const State& xorState, const State& s,
                        std::vector<std::string> visited);

/// Firing tuples for the non-spontaneous transitions leaving `child` within
/// its owning (event-restricted) XOR. Each transition composes with the
/// spontaneous continuation from its target.
inline TupleSet getNext(const StatechartModel& m, const State& xorState, const State& child) {
    TupleSet out;
    for (const auto& t : xorState.transitions) {
        if (t.spontaneous() || t.source != child.id) continue;
        VTuple head;
        head.sources.insert(child.id);
        head.guard = t.guard;
        head.action = t.action;
        head.provenance.insert(t.index);
        const State* target = nullptr;
        for (const auto& c : xorState.children)
            if (c.id == t.target) target = &c;
        if (!target) throw Error("transition target " + t.target + " is not a sibling");
        TupleSet fired = parProd({{std::move(head)}, getSpon(m, xorState, *target, {})});
        out.insert(out.end(), fired.begin(), fired.end());
    }
    normalizeSet(out);
    return out;
}

/// Spontaneous continuation after arriving at `s`: either one of the
/// ε-transitions out of `s` fires (recursively), or none is enabled and the
/// default configuration of `s` is entered.
inline TupleSet getSpon(const StatechartModel& m, const State& xorState, const State& s,
                        std::vector<std::string> visited) {
    if (std::find(visited.begin(), visited.end(), s.id) != visited.end()) {
        visited.push_back(s.id);
        throw SpontaneousCycleError(std::move(visited));
    }
    visited.push_back(s.id);
    TupleSet out;
    ExprPtr noneEnabled = ex::truth();
    for (const auto& t : xorState.transitions) {
        if (!t.spontaneous() || t.source != s.id) continue;
        noneEnabled = ex::conj(noneEnabled, ex::notE(t.guard));
        VTuple head;
        head.guard = t.guard;
        head.action = t.action;
        head.provenance.insert(t.index);
        const State* target = nullptr;
        for (const auto& c : xorState.children)
            if (c.id == t.target) target = &c;
        if (!target) throw Error("transition target " + t.target + " is not a sibling");
        TupleSet chained = parProd({{std::move(head)}, getSpon(m, xorState, *target, visited)});
        out.insert(out.end(), chained.begin(), chained.end());
    }
    VTuple stay;
    stay.guard = noneEnabled;
    TupleSet settled = parProd({{std::move(stay)}, initialize(m, s)});
    out.insert(out.end(), settled.begin(), settled.end());
    normalizeSet(out);
    return out;
}

namespace detail {

/// Drops tuples whose source set names two distinct children of one XOR;
/// such a configuration cannot occur.
inline TupleSet pruneInconsistent(const StatechartModel& m, TupleSet ts) {
    TupleSet out;
    for (auto& t : ts) {
        std::map<std::string, int> perXor;
        bool ok = true;
        for (const auto& s : t.sources) {
            auto p = m.parentOf(s);
            if (p && m.state(*p).isXor() && ++perXor[*p] > 1) ok = false;
        }
        if (ok) out.push_back(std::move(t));
    }
    return out;
}

}  // namespace detail

/// Verification tuples of an event-restricted state tree.
///
/// Basic states only witness residence. AND states multiply their regions,
/// which is where same-event transitions in concurrent regions combine. An
/// XOR state contributes, per child: the child's outgoing transitions joined
/// with the enumeration of its inner configuration, plus a stay case in which
/// no transition at this level fires and the child's own subtree tuples
/// (inner firings included) carry through.
inline TupleSet stateToTuples(const StatechartModel& m, const State& s) {
    if (s.isBasic()) {
        VTuple t;
        t.sources.insert(s.id);
        return {t};
    }
    if (s.isAnd()) {
        std::vector<TupleSet> factors;
        factors.reserve(s.children.size());
        for (const auto& r : s.children) factors.push_back(stateToTuples(m, r));
        return detail::pruneInconsistent(m, parProd(factors));
    }
    TupleSet firing;
    std::vector<ExprPtr> firingGuards;
    for (const auto& c : s.children) {
        TupleSet next = getNext(m, s, c);
        for (const auto& t : next) firingGuards.push_back(t.guard);
        TupleSet joined = parProd({next, configEnum(m, c)});
        firing.insert(firing.end(), joined.begin(), joined.end());
    }
    ExprPtr stayGuard = ex::truth();
    for (const auto& g : firingGuards) stayGuard = ex::conj(stayGuard, ex::notE(g));
    TupleSet stays;
    for (const auto& c : s.children) {
        VTuple gate;
        gate.guard = stayGuard;
        VTuple self;
        self.sources.insert(c.id);
        TupleSet joined = parProd({{gate}, {self}, stateToTuples(m, c)});
        stays.insert(stays.end(), joined.begin(), joined.end());
    }
    TupleSet out = std::move(firing);
    out.insert(out.end(), stays.begin(), stays.end());
    normalizeSet(out);
    return detail::pruneInconsistent(m, std::move(out));
}

/// Per-event verification tuples for the whole model; feeds broadcast
/// elimination and discharge.
inline EventTupleMap eventVtupleMap(const StatechartModel& m) {
    EventTupleMap out;
    for (const auto& e : m.events()) {
        State restricted = resStateEvent(e, m.root());
        out[e] = stateToTuples(m, restricted);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Guarded-command builder (cross-check path)
//
// Reconstructs, per event, the nested dispatch code a statechart-to-code
// translator would emit: test the source configuration level by level, then
// the user guard, then run the user action in parallel with the target
// entry assignments. Tuple translation of this code must agree with
// stateToTuples on firing tuples.

namespace detail {

inline StmtPtr buildXorDispatch(const StatechartModel& m, const State& s, const std::string& e);

/// Entry assignments performed when a transition lands on `target`.
inline std::vector<StmtPtr> enterElements(const StatechartModel& m, const State& target) {
    TupleSet init = initialize(m, target);
    const StmtPtr& a = init.front().action;
    if (const auto* p = a->as<Statement::Par>()) return p->stmts;
    if (a->isSkip()) return {};
    return {a};
}

/// Code for the subtree of `c` when no transition leaves `c` itself.
inline StmtPtr buildDescend(const StatechartModel& m, const State& c, const std::string& e) {
    if (c.isBasic()) return st::skip();
    if (c.isAnd()) {
        std::vector<StmtPtr> regions;
        for (const auto& r : c.children) regions.push_back(buildXorDispatch(m, r, e));
        return normalizeStmt(st::par(std::move(regions)));
    }
    return buildXorDispatch(m, c, e);
}

/// Wraps `body` in guards enumerating the full configuration below `c`.
inline StmtPtr wrapConfig(const StatechartModel& m, const State& c, const StmtPtr& body) {
    if (c.isBasic()) return body;
    if (c.isAnd()) {
        StmtPtr acc = body;
        for (auto it = c.children.rbegin(); it != c.children.rend(); ++it)
            acc = wrapConfig(m, *it, acc);
        return acc;
    }
    std::vector<std::pair<Condition, StmtPtr>> branches;
    for (const auto& cc : c.children)
        branches.emplace_back(condStateTest(cc.id), wrapConfig(m, cc, body));
    return st::guard(std::move(branches));
}

inline StmtPtr buildXorDispatch(const StatechartModel& m, const State& s, const std::string& e) {
    std::vector<std::pair<Condition, StmtPtr>> branches;
    for (const auto& c : s.children) {
        std::vector<std::pair<Condition, StmtPtr>> fires;
        for (const auto& t : s.transitions) {
            if (t.spontaneous() || t.source != c.id || t.event != e) continue;
            const State& target = m.state(t.target);
            std::vector<StmtPtr> effect{t.action};
            for (auto& el : enterElements(m, target)) effect.push_back(el);
            fires.emplace_back(condPredicate(t.guard), normalizeStmt(st::par(std::move(effect))));
        }
        StmtPtr body;
        if (!fires.empty()) {
            // Transitions at this level win; the inner configuration is
            // pinned down before the user guard is consulted.
            body = wrapConfig(m, c, st::guard(std::move(fires)));
        } else {
            body = buildDescend(m, c, e);
        }
        if (!body->isSkip()) branches.emplace_back(condStateTest(c.id), std::move(body));
    }
    if (branches.empty()) return st::skip();
    return st::guard(std::move(branches));
}

}  // namespace detail

/// Nested guarded-command operation for event `e` over the whole model.
inline StmtPtr buildEventCode(const StatechartModel& m, const std::string& e) {
    return detail::buildXorDispatch(m, m.root(), e);
}

/// Event-code map for every declared event (cross-check pipeline input).
inline EventCode buildEventCodeMap(const StatechartModel& m) {
    EventCode out;
    for (const auto& e : m.events()) out[e] = buildEventCode(m, e);
    return out;
}

}  // namespace scvc
