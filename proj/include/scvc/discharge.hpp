#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scvc/semantics.hpp"
#include "scvc/smt.hpp"
#include "scvc/wp.hpp"

namespace scvc {

/// Closed formula for one tuple, with provenance back to the transitions
/// that produced it.
struct VerificationCondition {
    std::string id;     // "<event>_<index>"
    std::string event;
    VTuple tuple;
    ExprPtr formula;    // sai(sources) ∧ guard ⇒ wp(action, sai(targets)), lowered
    std::vector<std::string> provenance;
};

inline std::vector<std::string> describeProvenance(const StatechartModel& m, const VTuple& t) {
    std::vector<std::string> out;
    auto all = m.allTransitions();
    for (std::size_t idx : t.provenance) {
        if (idx >= all.size()) continue;
        const Transition& tr = *all[idx];
        out.push_back((tr.spontaneous() ? std::string("always") : "on " + tr.event) + " from " +
                      tr.source + " to " + tr.target);
    }
    return out;
}

/// Hoare-triple reading of a tuple as one implication: assumed invariants of
/// the source configuration plus the guard entail the target configuration's
/// invariants after the action.
inline VerificationCondition tupleToVC(const StatechartModel& m, const StateVarEncoding& enc,
                                       const std::string& event, std::size_t index,
                                       const VTuple& t) {
    VerificationCondition vc;
    vc.id = event + "_" + std::to_string(index);
    vc.event = event;
    vc.tuple = t;
    vc.provenance = describeProvenance(m, t);
    ExprPtr pre = ex::conj(lowerStateTests(m, enc, sai(m, enc, t.sources)),
                           lowerStateTests(m, enc, t.guard));
    ExprPtr post = lowerStateTests(m, enc, sai(m, enc, t.targets));
    vc.formula = ex::implies(pre, wp(m, enc, t.action, post));
    return vc;
}

// ---------------------------------------------------------------------------
// Bounded finite-domain oracle

struct OracleVerdict {
    enum Kind { ValidWithinBound, Falsified, CapExceeded } kind = ValidWithinBound;
    Valuation counterexample;      // present when falsified
    unsigned long long examined = 0;
};

/// Exhaustive evaluation over every valuation with integers in [-bound, bound]
/// and state variables over their enumerations. Scan order is ascending per
/// variable, state variables (document order) outermost, then declared
/// integers, rightmost fastest; the first falsifying valuation is reported.
inline OracleVerdict boundedOracle(const StatechartModel& m, const StateVarEncoding& enc,
                                   const ExprPtr& formula, long long bound,
                                   unsigned long long cap = 4'000'000ULL) {
    if (bound < 1) throw Error("oracle bound must be >= 1");
    std::set<std::string> free = freeVars(formula);
    struct Axis {
        std::string var;
        std::vector<Value> values;
    };
    std::vector<Axis> axes;
    for (const auto& xv : enc.entries()) {
        if (!free.count(xv.var)) continue;
        Axis a{xv.var, {}};
        for (const auto& s : xv.values) a.values.emplace_back(s);
        axes.push_back(std::move(a));
    }
    for (const auto& v : m.variables()) {
        if (!free.count(v)) continue;
        Axis a{v, {}};
        for (long long x = -bound; x <= bound; ++x) a.values.emplace_back(x);
        axes.push_back(std::move(a));
    }
    for (const auto& v : free) {
        bool known = false;
        for (const auto& a : axes) known |= a.var == v;
        if (!known) throw Error("free variable " + v + " has no finite domain");
    }

    unsigned long long total = 1;
    for (const auto& a : axes) {
        total *= static_cast<unsigned long long>(a.values.size());
        if (total > cap) {
            OracleVerdict over;
            over.kind = OracleVerdict::CapExceeded;
            return over;
        }
    }

    OracleVerdict out;
    std::vector<std::size_t> pick(axes.size(), 0);
    Valuation env;
    for (;;) {
        for (std::size_t i = 0; i < axes.size(); ++i) env[axes[i].var] = axes[i].values[pick[i]];
        ++out.examined;
        if (!evalFormula(formula, env)) {
            out.kind = OracleVerdict::Falsified;
            out.counterexample = env;
            return out;
        }
        std::size_t i = axes.size();
        for (;;) {
            if (i == 0) return out;  // exhausted: valid within bound
            --i;
            if (++pick[i] < axes[i].values.size()) break;
            pick[i] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Batch discharge

enum class VcStatus { Valid, Invalid, Unknown, Failed };

inline const char* statusName(VcStatus s) {
    switch (s) {
        case VcStatus::Valid: return "valid";
        case VcStatus::Invalid: return "invalid";
        case VcStatus::Unknown: return "unknown";
        case VcStatus::Failed: return "error";
    }
    return "?";
}

struct VcResult {
    VerificationCondition vc;
    VcStatus status = VcStatus::Unknown;
    Valuation counterexample;
    std::string note;
    double millis = 0;
};

struct VerificationReport {
    std::string model;
    std::string solverIdentity;  // command template, empty when oracle-only
    std::vector<VcResult> vcs;
    double totalMillis = 0;

    bool allValid() const {
        for (const auto& r : vcs)
            if (r.status != VcStatus::Valid) return false;
        return true;
    }
    bool anyInvalid() const {
        for (const auto& r : vcs)
            if (r.status == VcStatus::Invalid) return true;
        return false;
    }
    bool anyFailed() const {
        for (const auto& r : vcs)
            if (r.status == VcStatus::Failed) return true;
        return false;
    }
    bool anyUnknown() const {
        for (const auto& r : vcs)
            if (r.status == VcStatus::Unknown) return true;
        return false;
    }
};

enum class TuplePath { Semantics, EventCode };

struct DischargeOptions {
    TuplePath path = TuplePath::Semantics;
    bool useOracle = false;
    long long bound = 200;
    unsigned long long cap = 4'000'000ULL;
    std::string solverCmd;   // empty: no external solver
    std::string outDir;      // when set, scripts are kept as <outdir>/<id>.smt2
    bool emitInitVc = false;
};

/// Generates the final (broadcast-free) tuple sequence for a model.
inline EventSequence tuplePipeline(const StatechartModel& m, TuplePath path) {
    EventTupleMap raw = path == TuplePath::Semantics ? eventVtupleMap(m)
                                                     : vtupleMap(buildEventCodeMap(m));
    return vseqNoBcast(topoSortEvents(raw));
}

namespace detail {

inline Valuation completeValuation(const StatechartModel& m, const StateVarEncoding& enc,
                                   const ExprPtr& formula, Valuation v) {
    // Solvers omit unconstrained symbols; fill defaults so direct evaluation
    // of the counterexample is possible.
    for (const auto& var : freeVars(formula)) {
        if (v.count(var)) continue;
        if (const auto* xv = enc.findByVar(var)) {
            v[var] = xv->values.front();
        } else {
            v[var] = 0LL;
        }
    }
    return v;
}

inline void dischargeOne(const StatechartModel& m, const StateVarEncoding& enc,
                         const DischargeOptions& opts, VcResult& r) {
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<VcStatus> solverStatus;
    if (!opts.solverCmd.empty()) {
        try {
            std::string script = emitSmt(m, enc, r.vc.formula, "vc " + r.vc.id);
            std::string keep;
            if (!opts.outDir.empty())
                keep = (std::filesystem::path(opts.outDir) / (r.vc.id + ".smt2")).string();
            SolverVerdict sv = runSolver(script, opts.solverCmd, keep);
            switch (sv.answer) {
                case SolverAnswer::Unsat:
                    solverStatus = VcStatus::Valid;
                    break;
                case SolverAnswer::Sat: {
                    solverStatus = VcStatus::Invalid;
                    Valuation cx = completeValuation(m, enc, r.vc.formula, sv.model);
                    if (evalFormula(r.vc.formula, cx)) {
                        r.note = "solver model does not falsify the formula";
                        solverStatus = VcStatus::Failed;
                    } else {
                        r.counterexample = std::move(cx);
                    }
                    break;
                }
                case SolverAnswer::Unknown:
                    solverStatus = VcStatus::Unknown;
                    r.note = "solver answered unknown";
                    break;
            }
        } catch (const Error& e) {
            solverStatus = VcStatus::Failed;
            r.note = e.what();
        }
    }
    std::optional<VcStatus> oracleStatus;
    if (opts.useOracle) {
        OracleVerdict ov = boundedOracle(m, enc, r.vc.formula, opts.bound, opts.cap);
        switch (ov.kind) {
            case OracleVerdict::ValidWithinBound:
                oracleStatus = VcStatus::Valid;
                break;
            case OracleVerdict::Falsified:
                oracleStatus = VcStatus::Invalid;
                if (r.counterexample.empty()) r.counterexample = ov.counterexample;
                break;
            case OracleVerdict::CapExceeded:
                oracleStatus = VcStatus::Unknown;
                r.note = "oracle valuation cap exceeded";
                break;
        }
    }
    if (solverStatus && oracleStatus &&
        ((*solverStatus == VcStatus::Valid && *oracleStatus == VcStatus::Invalid) ||
         (*solverStatus == VcStatus::Invalid && *oracleStatus == VcStatus::Valid))) {
        r.status = VcStatus::Failed;
        r.note = "solver and oracle disagree";
    } else if (solverStatus && *solverStatus != VcStatus::Unknown) {
        r.status = *solverStatus;
    } else if (oracleStatus) {
        r.status = *oracleStatus;
    } else if (solverStatus) {
        r.status = *solverStatus;
    } else {
        r.status = VcStatus::Unknown;
        r.note = "no discharge method configured";
    }
    r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                   .count();
}

}  // namespace detail

/// Runs the whole pipeline and discharges every VC; per-VC failures are
/// recorded, never fatal for the batch.
inline VerificationReport dischargeAll(const StatechartModel& m, const DischargeOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    StateVarEncoding enc = encodeStateVars(m);
    VerificationReport report;
    report.model = m.name();
    report.solverIdentity = opts.solverCmd;
    if (!opts.outDir.empty()) std::filesystem::create_directories(opts.outDir);
    EventSequence seq = tuplePipeline(m, opts.path);
    if (opts.emitInitVc) {
        TupleSet init = initialize(m, m.root());
        VcResult r;
        r.vc = tupleToVC(m, enc, "@init", 0, init.front());
        detail::dischargeOne(m, enc, opts, r);
        report.vcs.push_back(std::move(r));
    }
    for (const auto& [event, tuples] : seq) {
        std::size_t index = 0;
        for (const auto& t : tuples) {
            VcResult r;
            try {
                r.vc = tupleToVC(m, enc, event, index, t);
                detail::dischargeOne(m, enc, opts, r);
            } catch (const Error& e) {
                r.vc.id = event + "_" + std::to_string(index);
                r.vc.event = event;
                r.vc.tuple = t;
                r.status = VcStatus::Failed;
                r.note = e.what();
            }
            report.vcs.push_back(std::move(r));
            ++index;
        }
    }
    report.totalMillis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization

inline nlohmann::json valuationToJson(const Valuation& v) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [var, val] : v) {
        if (const auto* i = std::get_if<long long>(&val)) {
            out[var] = *i;
        } else {
            out[var] = std::get<std::string>(val);
        }
    }
    return out;
}

inline nlohmann::json reportToJson(const StatechartModel& m, const VerificationReport& rep) {
    nlohmann::json vcs = nlohmann::json::array();
    for (const auto& r : rep.vcs) {
        nlohmann::json j{
            {"id", r.vc.id},
            {"event", r.vc.event},
            {"sources", m.docSorted(r.vc.tuple.sources)},
            {"targets", m.docSorted(r.vc.tuple.targets)},
            {"guard", printExpr(r.vc.tuple.guard, PrintStyle::Ascii)},
            {"status", statusName(r.status)},
        };
        if (r.status == VcStatus::Invalid) j["counterexample"] = valuationToJson(r.counterexample);
        if (!r.note.empty()) j["note"] = r.note;
        if (!r.vc.provenance.empty()) j["transitions"] = r.vc.provenance;
        vcs.push_back(std::move(j));
    }
    return nlohmann::json{{"model", rep.model}, {"vcs", std::move(vcs)}};
}

}  // namespace scvc
