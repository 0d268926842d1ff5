#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scvc/statement.hpp"

namespace scvc {

inline constexpr const char* kRootId = "root";
inline constexpr const char* kEpsilon = "";  // trigger of spontaneous transitions

struct Transition {
    std::string source;
    std::string event;  // kEpsilon for spontaneous transitions
    ExprPtr guard;      // never null
    StmtPtr action;     // never null
    std::string target;
    std::size_t index = 0;  // document-order id, assigned by the model builder
    SourceLoc loc;

    bool spontaneous() const { return event.empty(); }
};

enum class StateKind { Basic, Xor, And };

/// One node of the statechart hierarchy. Children are XOR children or AND
/// regions in declaration order; `init` and `transitions` are meaningful for
/// XOR states only.
struct State {
    StateKind kind = StateKind::Basic;
    std::string id;
    ExprPtr invariant;  // designer invariant; never null (defaults to true)
    std::vector<State> children;
    std::string init;
    std::vector<Transition> transitions;
    SourceLoc loc;

    bool isBasic() const { return kind == StateKind::Basic; }
    bool isXor() const { return kind == StateKind::Xor; }
    bool isAnd() const { return kind == StateKind::And; }
};

/// Immutable statechart: an implicit root XOR wraps the declared top-level
/// states, so the whole model is one `State` tree plus variable declarations.
/// All name-based lookups go through indexes built once at construction.
class StatechartModel {
public:
    StatechartModel() = default;

    /// Builds the model and its indexes. Duplicate state names are reported
    /// through `diags`; the first occurrence wins in the index so downstream
    /// checks can still run.
    static StatechartModel build(std::string name, std::string initId,
                                 std::vector<std::string> vars, std::vector<State> topStates,
                                 std::vector<Transition> topTransitions, Diagnostics& diags) {
        StatechartModel m;
        m.name_ = std::move(name);
        State root;
        root.kind = StateKind::Xor;
        root.id = kRootId;
        root.invariant = ex::truth();
        root.children = std::move(topStates);
        root.init = std::move(initId);
        root.transitions = std::move(topTransitions);
        std::size_t nextIndex = 0;
        numberTransitions(root, nextIndex);
        m.root_ = std::make_shared<State>(std::move(root));
        m.vars_ = std::move(vars);
        m.varSet_.insert(m.vars_.begin(), m.vars_.end());
        m.index(*m.root_, "", diags);
        return m;
    }

    const std::string& name() const { return name_; }
    const State& root() const { return *root_; }
    const std::vector<std::string>& variables() const { return vars_; }
    bool isVariable(const std::string& v) const { return varSet_.count(v) > 0; }

    /// Declared events: every non-spontaneous trigger in the model, sorted.
    const std::vector<std::string>& events() const { return events_; }
    bool isEvent(const std::string& e) const {
        return std::find(events_.begin(), events_.end(), e) != events_.end();
    }

    bool exists(const std::string& id) const { return byId_.count(id) > 0; }

    const State& state(const std::string& id) const {
        auto it = byId_.find(id);
        if (it == byId_.end()) throw Error("unknown state id: " + id);
        return *it->second;
    }

    /// Parent id, or nullopt for the root.
    std::optional<std::string> parentOf(const std::string& id) const {
        state(id);  // existence check
        auto it = parent_.find(id);
        if (it == parent_.end() || it->second.empty()) return std::nullopt;
        return it->second;
    }

    /// Direct children in declaration order; empty for Basic states.
    std::vector<std::string> childrenOf(const std::string& id) const {
        const State& s = state(id);
        std::vector<std::string> out;
        out.reserve(s.children.size());
        for (const auto& c : s.children) out.push_back(c.id);
        return out;
    }

    /// Strict ancestors, nearest first, ending with the implicit root.
    std::vector<std::string> ancestorsOf(const std::string& id) const {
        state(id);
        std::vector<std::string> out;
        auto cur = parent_.find(id);
        while (cur != parent_.end() && !cur->second.empty()) {
            out.push_back(cur->second);
            cur = parent_.find(cur->second);
        }
        return out;
    }

    /// Position in preorder document traversal; total over all states.
    std::size_t docIndex(const std::string& id) const {
        auto it = docIndex_.find(id);
        if (it == docIndex_.end()) throw Error("unknown state id: " + id);
        return it->second;
    }

    const std::vector<std::string>& docOrder() const { return docOrder_; }

    /// Sorts a state set into document order (used by all set printing).
    std::vector<std::string> docSorted(const std::set<std::string>& ids) const {
        std::vector<std::string> v(ids.begin(), ids.end());
        std::sort(v.begin(), v.end(), [this](const std::string& a, const std::string& b) {
            return docIndex(a) < docIndex(b);
        });
        return v;
    }

    /// All transitions in document order (indexes match Transition::index).
    std::vector<const Transition*> allTransitions() const {
        std::vector<const Transition*> out;
        collectTransitions(*root_, out);
        return out;
    }

private:
    static void numberTransitions(State& s, std::size_t& next) {
        for (auto& t : s.transitions) t.index = next++;
        for (auto& c : s.children) numberTransitions(c, next);
    }

    static void collectTransitions(const State& s, std::vector<const Transition*>& out) {
        for (const auto& t : s.transitions) out.push_back(&t);
        for (const auto& c : s.children) collectTransitions(c, out);
    }

    void index(const State& s, const std::string& parent, Diagnostics& diags) {
        if (byId_.count(s.id)) {
            diags.push_back(errorDiag("duplicate state name " + s.id, s.loc));
        } else {
            byId_[s.id] = &s;
            parent_[s.id] = parent;
            docIndex_[s.id] = docOrder_.size();
            docOrder_.push_back(s.id);
        }
        for (const auto& t : s.transitions)
            if (!t.spontaneous()) eventSet_.insert(t.event);
        for (const auto& c : s.children) index(c, s.id, diags);
        if (&s == root_.get()) events_.assign(eventSet_.begin(), eventSet_.end());
    }

    std::string name_;
    std::shared_ptr<const State> root_;
    std::vector<std::string> vars_;
    std::set<std::string> varSet_;
    std::vector<std::string> events_;
    std::set<std::string> eventSet_;
    std::map<std::string, const State*> byId_;
    std::map<std::string, std::string> parent_;
    std::map<std::string, std::size_t> docIndex_;
    std::vector<std::string> docOrder_;
};

/// Direct children of `s` (regions of an AND, children of an XOR).
inline std::set<std::string> children(const StatechartModel& m, const std::string& s) {
    auto v = m.childrenOf(s);
    return {v.begin(), v.end()};
}

/// Strict ancestors of `s` up to and including the implicit root.
inline std::set<std::string> ancestors(const StatechartModel& m, const std::string& s) {
    auto v = m.ancestorsOf(s);
    return {v.begin(), v.end()};
}

}  // namespace scvc
