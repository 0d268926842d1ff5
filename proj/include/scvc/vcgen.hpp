#pragma once

#include <map>
#include <string>
#include <vector>

#include "scvc/vtuple.hpp"

namespace scvc {

using EventTupleMap = std::map<std::string, TupleSet>;
using EventSequence = std::vector<std::pair<std::string, TupleSet>>;

struct CyclicBroadcastError : Error {
    std::vector<std::string> cycle;
    explicit CyclicBroadcastError(std::vector<std::string> c)
        : Error("circular broadcasting: " + join(c)), cycle(std::move(c)) {}

    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& e : v) {
            if (!out.empty()) out += " -> ";
            out += e;
        }
        return out;
    }
};

struct UnknownEventError : Error {
    explicit UnknownEventError(const std::string& e) : Error("unknown broadcast event " + e) {}
};

// ---------------------------------------------------------------------------
// Tuple composition

/// Condition of a guarded branch as a tuple: state tests become source-set
/// membership, predicates become guard conjuncts.
inline VTuple c2tuple(const Condition& c) {
    VTuple t;
    if (const auto* s = c.as<Condition::StateTest>()) {
        t.sources.insert(s->state);
    } else {
        t.guard = c.as<Condition::Predicate>()->expr;
    }
    return t;
}

namespace detail {

template <class MakeComposite>
inline VTuple concatWith(const std::vector<VTuple>& ts, MakeComposite make) {
    VTuple out;
    std::vector<StmtPtr> actions;
    actions.reserve(ts.size());
    for (const auto& t : ts) {
        out.sources.insert(t.sources.begin(), t.sources.end());
        out.guard = ex::conj(out.guard, t.guard);
        out.targets.insert(t.targets.begin(), t.targets.end());
        out.provenance.insert(t.provenance.begin(), t.provenance.end());
        actions.push_back(t.action);
    }
    out.action = normalizeStmt(make(std::move(actions)));
    return out;
}

template <class Concat>
inline TupleSet prodWith(const std::vector<TupleSet>& tss, Concat concat) {
    if (tss.empty()) return {};
    if (tss.size() == 1) return tss.front();
    TupleSet out;
    std::vector<std::size_t> pick(tss.size(), 0);
    for (;;) {
        std::vector<VTuple> row;
        row.reserve(tss.size());
        for (std::size_t i = 0; i < tss.size(); ++i) {
            if (tss[i].empty()) return {};  // product with empty factor is empty
            row.push_back(tss[i][pick[i]]);
        }
        out.push_back(concat(row));
        std::size_t i = tss.size();
        while (i > 0) {
            --i;
            if (++pick[i] < tss[i].size()) break;
            pick[i] = 0;
            if (i == 0) {
                normalizeSet(out);
                return out;
            }
        }
    }
}

}  // namespace detail

/// Parallel composition of a tuple row: unions of sources/targets, conjoined
/// guards, actions under Par.
inline VTuple concat1(const std::vector<VTuple>& ts) {
    return detail::concatWith(ts, &st::par);
}

/// Sequential composition; as concat1 with the actions under Seq.
inline VTuple concat2(const std::vector<VTuple>& ts) {
    return detail::concatWith(ts, &st::seq);
}

/// Cartesian product of tuple sets composed with concat1. A singleton list
/// passes through untouched; an empty list has no product.
inline TupleSet parProd(const std::vector<TupleSet>& tss) {
    return detail::prodWith(tss, &concat1);
}

inline TupleSet seqProd(const std::vector<TupleSet>& tss) {
    return detail::prodWith(tss, &concat2);
}

// ---------------------------------------------------------------------------
// Statement-to-tuple translation

/// Maps a statement to its local verification tuples. Guards fan out per
/// branch (the disabled case changes nothing and induces no proof
/// obligation); Par/Seq compose their element translations.
inline TupleSet stmtToTuples(const StmtPtr& s) {
    struct V {
        TupleSet operator()(const Statement::StateAssign& x) const {
            VTuple t;
            t.action = st::stateAssign(x.state);
            t.targets.insert(x.state);
            return {t};
        }
        TupleSet operator()(const Statement::Assignment& x) const {
            VTuple t;
            t.action = st::assign(x.lhs, x.rhs);
            return {t};
        }
        TupleSet operator()(const Statement::Bcast& x) const {
            VTuple t;
            t.action = st::bcast(x.event);
            return {t};
        }
        TupleSet operator()(const Statement::Guard& g) const {
            TupleSet out;
            for (const auto& [c, body] : g.branches) {
                TupleSet branch = parProd({{c2tuple(c)}, stmtToTuples(body)});
                out.insert(out.end(), branch.begin(), branch.end());
            }
            normalizeSet(out);
            return out;
        }
        TupleSet operator()(const Statement::Par& p) const {
            std::vector<TupleSet> parts;
            parts.reserve(p.stmts.size());
            for (const auto& el : p.stmts) parts.push_back(stmtToTuples(el));
            return parProd(parts);
        }
        TupleSet operator()(const Statement::Seq& q) const {
            std::vector<TupleSet> parts;
            parts.reserve(q.stmts.size());
            for (const auto& el : q.stmts) parts.push_back(stmtToTuples(el));
            return seqProd(parts);
        }
        TupleSet operator()(const Statement::Skip&) const { return {VTuple{}}; }
    };
    return std::visit(V{}, s->node());
}

using EventCode = std::map<std::string, StmtPtr>;

/// Pointwise tuple translation of per-event code.
inline EventTupleMap vtupleMap(const EventCode& ec) {
    EventTupleMap out;
    for (const auto& [e, code] : ec) out[e] = stmtToTuples(code);
    return out;
}

// ---------------------------------------------------------------------------
// Broadcast elimination

inline bool isBcast(const StmtPtr& s) { return s->as<Statement::Bcast>() != nullptr; }

/// Every event broadcast anywhere inside the statement.
inline std::set<std::string> collectBcast(const StmtPtr& s) {
    std::set<std::string> out;
    struct V {
        std::set<std::string>& out;
        void operator()(const Statement::Bcast& b) const { out.insert(b.event); }
        void operator()(const Statement::Guard& g) const {
            for (const auto& [c, body] : g.branches) merge(body);
        }
        void operator()(const Statement::Par& p) const {
            for (const auto& el : p.stmts) merge(el);
        }
        void operator()(const Statement::Seq& q) const {
            for (const auto& el : q.stmts) merge(el);
        }
        template <class T>
        void operator()(const T&) const {}
        void merge(const StmtPtr& s) const {
            auto inner = collectBcast(s);
            out.insert(inner.begin(), inner.end());
        }
    };
    std::visit(V{out}, s->node());
    return out;
}

/// Removes broadcasting: a broadcast by itself becomes Skip, broadcast
/// elements of compositions are dropped, guard branches that only broadcast
/// disappear.
inline StmtPtr filterBcast(const StmtPtr& s) {
    struct V {
        const StmtPtr& self;
        StmtPtr operator()(const Statement::Bcast&) const { return st::skip(); }
        StmtPtr operator()(const Statement::Guard& g) const {
            std::vector<std::pair<Condition, StmtPtr>> branches;
            for (const auto& [c, body] : g.branches)
                if (!isBcast(body)) branches.emplace_back(c, filterBcast(body));
            if (branches.empty()) return st::skip();
            return st::guard(std::move(branches));
        }
        StmtPtr operator()(const Statement::Par& p) const {
            return rebuild(p.stmts, &st::par);
        }
        StmtPtr operator()(const Statement::Seq& q) const {
            return rebuild(q.stmts, &st::seq);
        }
        template <class T>
        StmtPtr operator()(const T&) const { return self; }

        static StmtPtr rebuild(const std::vector<StmtPtr>& stmts,
                               StmtPtr (*make)(std::vector<StmtPtr>)) {
            std::vector<StmtPtr> kept;
            for (const auto& el : stmts)
                if (!isBcast(el)) kept.push_back(filterBcast(el));
            return normalizeStmt(make(std::move(kept)));
        }
    };
    return std::visit(V{s}, s->node());
}

inline std::set<std::string> broadcastDeps(const TupleSet& ts) {
    std::set<std::string> out;
    for (const auto& t : ts) {
        auto bs = collectBcast(t.action);
        out.insert(bs.begin(), bs.end());
    }
    return out;
}

/// Orders events so that every broadcast target precedes its broadcaster.
/// Ties break lexicographically; a dependency cycle is an error.
inline EventSequence topoSortEvents(const EventTupleMap& m) {
    std::map<std::string, std::set<std::string>> deps;
    for (const auto& [e, ts] : m) {
        deps[e] = {};
        for (const auto& d : broadcastDeps(ts))
            if (m.count(d)) deps[e].insert(d);  // unknown targets surface later, in expansion
    }
    EventSequence out;
    std::set<std::string> emitted;
    std::set<std::string> pending;
    for (const auto& [e, _] : m) pending.insert(e);
    while (!pending.empty()) {
        std::string pick;
        for (const auto& e : pending) {
            bool ready = true;
            for (const auto& d : deps[e]) ready &= emitted.count(d) > 0;
            if (ready) {
                pick = e;
                break;
            }
        }
        if (pick.empty()) {
            // Walk the remaining dependency graph to report one cycle.
            std::vector<std::string> path;
            std::set<std::string> onPath;
            std::string cur = *pending.begin();
            while (!onPath.count(cur)) {
                onPath.insert(cur);
                path.push_back(cur);
                for (const auto& d : deps[cur])
                    if (pending.count(d)) {
                        cur = d;
                        break;
                    }
            }
            std::vector<std::string> cycle(std::find(path.begin(), path.end(), cur), path.end());
            cycle.push_back(cur);
            throw CyclicBroadcastError(std::move(cycle));
        }
        out.emplace_back(pick, m.at(pick));
        emitted.insert(pick);
        pending.erase(pick);
    }
    return out;
}

/// Expands the broadcasts of one tuple against the already-expanded prefix:
/// the filtered tuple composes in parallel with the tuple sets of every event
/// it broadcasts.
inline TupleSet vtupleNoBcast(const VTuple& v, const EventSequence& tspre) {
    std::set<std::string> bs = collectBcast(v.action);
    if (bs.empty()) return {v};
    std::vector<TupleSet> factors;
    VTuple filtered = v;
    filtered.action = filterBcast(v.action);
    factors.push_back({std::move(filtered)});
    std::set<std::string> found;
    for (const auto& [e, ts] : tspre) {
        if (bs.count(e)) {
            factors.push_back(ts);
            found.insert(e);
        }
    }
    for (const auto& b : bs)
        if (!found.count(b)) throw UnknownEventError(b);
    return parProd(factors);
}

inline TupleSet vtupleSetNoBcast(const TupleSet& vs, const EventSequence& tspre) {
    TupleSet out;
    for (const auto& v : vs) {
        TupleSet ex = vtupleNoBcast(v, tspre);
        out.insert(out.end(), ex.begin(), ex.end());
    }
    normalizeSet(out);
    return out;
}

/// Left-to-right broadcast elimination over a topologically sorted sequence.
/// Afterwards no action anywhere contains a broadcast node.
inline EventSequence vseqNoBcast(const EventSequence& tss) {
    EventSequence tspre;
    for (const auto& [e, ts] : tss) tspre.emplace_back(e, vtupleSetNoBcast(ts, tspre));
    return tspre;
}

}  // namespace scvc
