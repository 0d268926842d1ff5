#pragma once

#include <map>
#include <string>

#include "scvc/invariants.hpp"

namespace scvc {

struct WriteConflictError : Error {
    std::string variable;
    explicit WriteConflictError(const std::string& v)
        : Error("parallel branches both assign " + v), variable(v) {}
};

struct UnsupportedNodeError : Error {
    explicit UnsupportedNodeError(const std::string& what)
        : Error("statement node not supported by wp: " + what) {}
};

namespace detail {

/// The parallel-assignment map a straight-line statement denotes: every
/// right-hand side refers to the statement's pre-state. Sequencing composes
/// by substitution; parallel composition requires disjoint write sets.
inline std::map<std::string, ExprPtr> effectOf(const StatechartModel& m,
                                               const StateVarEncoding& enc, const StmtPtr& s) {
    std::map<std::string, ExprPtr> eff;
    if (s->isSkip()) return eff;
    if (const auto* a = s->as<Statement::Assignment>()) {
        eff[a->lhs] = a->rhs;
        return eff;
    }
    if (const auto* sa = s->as<Statement::StateAssign>()) {
        if (auto v = enc.parentVarOf(m, sa->state)) eff[*v] = ex::stateLit(sa->state);
        return eff;  // no variable exists for AND regions; nothing to record
    }
    if (const auto* q = s->as<Statement::Seq>()) {
        for (const auto& el : q->stmts) {
            auto step = effectOf(m, enc, el);
            const auto pre = eff;  // step right-hand sides read the pre-step state
            for (auto& [x, rhs] : step) eff[x] = substitute(rhs, pre);
        }
        return eff;
    }
    if (const auto* p = s->as<Statement::Par>()) {
        for (const auto& el : p->stmts) {
            auto branch = effectOf(m, enc, el);
            for (auto& [x, rhs] : branch) {
                if (eff.count(x)) throw WriteConflictError(x);
                eff[x] = rhs;
            }
        }
        return eff;
    }
    throw UnsupportedNodeError(s->as<Statement::Bcast>() ? "Bcast" : "Guard");
}

}  // namespace detail

/// Weakest precondition of a broadcast-free, guard-free statement. Parallel
/// composition is simultaneous assignment; overlapping writes are rejected.
inline ExprPtr wp(const StatechartModel& m, const StateVarEncoding& enc, const StmtPtr& s,
                  const ExprPtr& post) {
    if (s->isSkip()) return post;
    if (const auto* a = s->as<Statement::Assignment>())
        return substitute(post, {{a->lhs, a->rhs}});
    if (const auto* sa = s->as<Statement::StateAssign>()) {
        auto v = enc.parentVarOf(m, sa->state);
        if (!v) return post;
        return substitute(post, {{*v, ex::stateLit(sa->state)}});
    }
    if (const auto* q = s->as<Statement::Seq>()) {
        ExprPtr acc = post;
        for (auto it = q->stmts.rbegin(); it != q->stmts.rend(); ++it)
            acc = wp(m, enc, *it, acc);
        return acc;
    }
    if (s->as<Statement::Par>()) return substitute(post, detail::effectOf(m, enc, s));
    throw UnsupportedNodeError(s->as<Statement::Bcast>() ? "Bcast" : "Guard");
}

}  // namespace scvc
