#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "scvc/eval.hpp"
#include "scvc/invariants.hpp"

namespace scvc {

struct SolverSpawnError : Error {
    explicit SolverSpawnError(const std::string& msg) : Error("solver spawn failed: " + msg) {}
};

struct SolverOutputParseError : Error {
    std::string raw;
    explicit SolverOutputParseError(const std::string& msg, std::string rawOutput)
        : Error("unparsable solver output: " + msg), raw(std::move(rawOutput)) {}
};

enum class SolverAnswer { Unsat, Sat, Unknown };

struct SolverVerdict {
    SolverAnswer answer = SolverAnswer::Unknown;
    Valuation model;  // populated on sat
    std::string raw;
};

// ---------------------------------------------------------------------------
// SMT-LIB v2 emission

namespace detail {

inline void exprToSmt(std::string& out, const ExprPtr& e) {
    struct V {
        std::string& out;
        void operator()(const Expr::IntLit& x) const {
            if (x.value < 0) {
                out += "(- " + std::to_string(-x.value) + ")";
            } else {
                out += std::to_string(x.value);
            }
        }
        void operator()(const Expr::BoolLit& x) const { out += x.value ? "true" : "false"; }
        void operator()(const Expr::VarRef& x) const { out += x.name; }
        void operator()(const Expr::StateLit& x) const { out += x.state; }
        void operator()(const Expr::InState&) const {
            throw Error("in(...) atom reached the SMT emitter unlowered");
        }
        void operator()(const Expr::Unary& x) const {
            out += x.op == UnOp::Neg ? "(- " : "(not ";
            exprToSmt(out, x.operand);
            out += ")";
        }
        void operator()(const Expr::Binary& x) const {
            const char* op = nullptr;
            switch (x.op) {
                case BinOp::Add: op = "+"; break;
                case BinOp::Sub: op = "-"; break;
                case BinOp::Mul: op = "*"; break;
                case BinOp::Eq: op = "="; break;
                case BinOp::Lt: op = "<"; break;
                case BinOp::Le: op = "<="; break;
                case BinOp::Gt: op = ">"; break;
                case BinOp::Ge: op = ">="; break;
                case BinOp::And: op = "and"; break;
                case BinOp::Or: op = "or"; break;
                case BinOp::Imp: op = "=>"; break;
                case BinOp::Ne:
                    out += "(not (= ";
                    exprToSmt(out, x.lhs);
                    out += " ";
                    exprToSmt(out, x.rhs);
                    out += "))";
                    return;
            }
            out += "(";
            out += op;
            out += " ";
            exprToSmt(out, x.lhs);
            out += " ";
            exprToSmt(out, x.rhs);
            out += ")";
        }
        void operator()(const Expr::ExactlyOne& x) const {
            // expanded: one witness true, all others false
            out += "(or";
            for (std::size_t i = 0; i < x.items.size(); ++i) {
                out += " (and";
                for (std::size_t j = 0; j < x.items.size(); ++j) {
                    out += " ";
                    if (j != i) out += "(not ";
                    exprToSmt(out, x.items[j]);
                    if (j != i) out += ")";
                }
                out += ")";
            }
            out += ")";
        }
    };
    std::visit(V{out}, e->node());
}

}  // namespace detail

inline std::string exprToSmt(const ExprPtr& e) {
    std::string out;
    detail::exprToSmt(out, e);
    return out;
}

/// One self-contained script per formula: enumerated sorts for the state
/// variables, integer constants for the declared variables, and the negated
/// formula. `unsat` therefore means the formula is valid.
inline std::string emitSmt(const StatechartModel& m, const StateVarEncoding& enc,
                           const ExprPtr& formula, const std::string& comment = "") {
    std::string out;
    if (!comment.empty()) out += "; " + comment + "\n";
    out += "(set-logic ALL)\n";
    for (const auto& xv : enc.entries()) {
        out += "(declare-datatype St_" + xv.var + " (";
        for (std::size_t i = 0; i < xv.values.size(); ++i) {
            if (i) out += " ";
            out += "(" + xv.values[i] + ")";
        }
        out += "))\n";
    }
    for (const auto& xv : enc.entries())
        out += "(declare-const " + xv.var + " St_" + xv.var + ")\n";
    for (const auto& v : m.variables()) out += "(declare-const " + v + " Int)\n";
    out += "(assert (not " + exprToSmt(formula) + "))\n";
    out += "(check-sat)\n(get-model)\n";
    return out;
}

// ---------------------------------------------------------------------------
// External solver driver

namespace detail {

struct SExpr {
    std::string atom;              // empty for lists
    std::vector<SExpr> items;
    bool isList() const { return atom.empty(); }
};

inline std::vector<std::string> sexprTokens(const std::string& text) {
    std::vector<std::string> toks;
    std::string cur;
    for (char c : text) {
        if (c == '(' || c == ')') {
            if (!cur.empty()) toks.push_back(std::exchange(cur, {}));
            toks.push_back(std::string(1, c));
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) toks.push_back(std::exchange(cur, {}));
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) toks.push_back(cur);
    return toks;
}

inline SExpr parseSExpr(const std::vector<std::string>& toks, std::size_t& i) {
    if (toks[i] == "(") {
        SExpr list;
        ++i;
        while (i < toks.size() && toks[i] != ")") list.items.push_back(parseSExpr(toks, i));
        if (i >= toks.size()) throw Error("unbalanced solver output");
        ++i;
        return list;
    }
    SExpr atom;
    atom.atom = toks[i++];
    if (atom.atom.empty()) atom.atom = " ";  // keep atoms nonempty
    return atom;
}

inline std::optional<Value> sexprValue(const SExpr& v) {
    if (!v.isList()) {
        const std::string& a = v.atom;
        if (!a.empty() && (std::isdigit(static_cast<unsigned char>(a[0])) ||
                           (a[0] == '-' && a.size() > 1)))
            return Value{std::stoll(a)};
        return Value{a};
    }
    // (- 5)
    if (v.items.size() == 2 && !v.items[0].isList() && v.items[0].atom == "-" &&
        !v.items[1].isList())
        return Value{-std::stoll(v.items[1].atom)};
    return std::nullopt;
}

inline void collectDefineFuns(const SExpr& e, Valuation& out) {
    if (!e.isList()) return;
    if (e.items.size() == 5 && !e.items[0].isList() && e.items[0].atom == "define-fun" &&
        !e.items[1].isList() && e.items[2].isList() && e.items[2].items.empty()) {
        if (auto val = sexprValue(e.items[4])) out[e.items[1].atom] = *val;
        return;
    }
    for (const auto& i : e.items) collectDefineFuns(i, out);
}

}  // namespace detail

/// Extracts a counterexample valuation from an SMT-LIB model (the
/// `(define-fun x () T v)` entries following `sat`).
inline Valuation parseSolverModel(const std::string& text) {
    auto toks = detail::sexprTokens(text);
    Valuation out;
    std::size_t i = 0;
    while (i < toks.size()) {
        detail::SExpr e = detail::parseSExpr(toks, i);
        detail::collectDefineFuns(e, out);
    }
    return out;
}

/// Writes the script to a file and runs the solver command template (with
/// `{file}` substituted) through the shell. The first output line must be
/// sat/unsat/unknown.
inline SolverVerdict runSolver(const std::string& script, const std::string& cmdTemplate,
                               const std::string& scratchPath = "") {
    std::string path = scratchPath;
    if (path.empty()) {
        char tmpl[] = "/tmp/scvc_XXXXXX.smt2";
        int fd = ::mkstemps(tmpl, 5);
        if (fd < 0) throw SolverSpawnError("cannot create scratch file");
        ::close(fd);
        path = tmpl;
    }
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw SolverSpawnError("cannot write " + path);
        f << script;
    }
    std::string cmd = cmdTemplate;
    const std::string ph = "{file}";
    if (auto pos = cmd.find(ph); pos != std::string::npos) {
        cmd.replace(pos, ph.size(), path);
    } else {
        cmd += " " + path;
    }
    cmd += " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw SolverSpawnError("popen failed for: " + cmd);
    std::string raw;
    char buf[4096];
    std::size_t n;
    while ((n = ::fread(buf, 1, sizeof buf, pipe)) > 0) raw.append(buf, n);
    int rc = ::pclose(pipe);
    if (scratchPath.empty()) ::remove(path.c_str());
    int exitCode = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    if (exitCode == 127 || exitCode == 126)
        throw SolverSpawnError("command not found or not executable: " + cmdTemplate);

    SolverVerdict v;
    v.raw = raw;
    std::size_t eol = raw.find('\n');
    std::string first = raw.substr(0, eol);
    while (!first.empty() && (first.back() == '\r' || first.back() == ' ')) first.pop_back();
    if (first == "unsat") {
        v.answer = SolverAnswer::Unsat;
    } else if (first == "sat") {
        v.answer = SolverAnswer::Sat;
        v.model = parseSolverModel(eol == std::string::npos ? "" : raw.substr(eol + 1));
    } else if (first == "unknown" || first == "timeout") {
        v.answer = SolverAnswer::Unknown;
    } else {
        throw SolverOutputParseError("first line is '" + first + "'", raw);
    }
    return v;
}

}  // namespace scvc
