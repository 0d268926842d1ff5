#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scvc/model.hpp"

namespace scvc {

/// Thrown by the standalone expression/statement parsers; parseModel converts
/// it into a located diagnostic instead of letting it escape.
struct ParseError : Error {
    SourceLoc loc;
    ParseError(const std::string& msg, SourceLoc l)
        : Error(msg + " at " + l.str()), loc(l) {}
};

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

struct Token {
    enum Kind { Ident, Number, Str, Sym, End };
    Kind kind = End;
    std::string text;
    SourceLoc loc;
};

class Lexer {
public:
    Lexer(std::string_view src, SourceLoc base = {1, 1}) : src_(src), line_(base.line), col_(base.column) {
        if (line_ == 0) line_ = 1;
        if (col_ == 0) col_ = 1;
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            Token t = next();
            bool end = t.kind == Token::End;
            out.push_back(std::move(t));
            if (end) return out;
        }
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    bool match(std::string_view s) {
        if (src_.substr(pos_).substr(0, s.size()) != s) return false;
        for (std::size_t i = 0; i < s.size(); ++i) advance();
        return true;
    }

    void skipTrivia() {
        for (;;) {
            char c = peek();
            if (c == '#') {
                while (peek() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                return;
            }
        }
    }

    Token next() {
        skipTrivia();
        SourceLoc loc{line_, col_};
        if (pos_ >= src_.size()) return {Token::End, "", loc};
        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') id += advance();
            return {Token::Ident, std::move(id), loc};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (std::isdigit(static_cast<unsigned char>(peek()))) num += advance();
            return {Token::Number, std::move(num), loc};
        }
        if (c == '"') {
            advance();
            std::string s;
            while (peek() && peek() != '"' && peek() != '\n') s += advance();
            if (peek() != '"') throw ParseError("unterminated string literal", loc);
            advance();
            return {Token::Str, std::move(s), loc};
        }
        // Unicode operator aliases, normalized to their ASCII spellings.
        static const std::pair<std::string_view, std::string_view> unicodeOps[] = {
            {"∧", "&&"}, {"∨", "||"}, {"¬", "!"},  {"≤", "<="},
            {"≥", ">="}, {"≠", "!="}, {"⇒", "=>"}, {"×", "*"},
            {"−", "-"},
        };
        for (const auto& [u, a] : unicodeOps)
            if (match(u)) return {Token::Sym, std::string(a), loc};
        static const std::string_view twoChar[] = {":=", "==", "!=", "/=", "<=", ">=", "&&", "||", "=>"};
        for (auto s : twoChar)
            if (match(s)) return {Token::Sym, std::string(s == "==" ? "=" : (s == "/=" ? "!=" : s)), loc};
        static const std::string_view oneChar = "{}():;,+-*=<>!";
        if (oneChar.find(c) != std::string_view::npos) {
            advance();
            return {Token::Sym, std::string(1, c), loc};
        }
        throw ParseError(std::string("unexpected character '") + c + "'", loc);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_;
    int col_;
};

// ---------------------------------------------------------------------------
// Token stream

class Cursor {
public:
    explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek() const { return toks_[i_]; }
    bool atEnd() const { return peek().kind == Token::End; }

    Token take() { return toks_[atEnd() ? i_ : i_++]; }

    bool isSym(std::string_view s) const {
        return peek().kind == Token::Sym && peek().text == s;
    }
    bool isIdent(std::string_view s) const {
        return peek().kind == Token::Ident && peek().text == s;
    }

    bool eatSym(std::string_view s) {
        if (!isSym(s)) return false;
        take();
        return true;
    }
    bool eatIdent(std::string_view s) {
        if (!isIdent(s)) return false;
        take();
        return true;
    }

    void expectSym(std::string_view s) {
        if (!eatSym(s)) throw ParseError("expected '" + std::string(s) + "'", peek().loc);
    }
    void expectKeyword(std::string_view s) {
        if (!eatIdent(s)) throw ParseError("expected '" + std::string(s) + "'", peek().loc);
    }

    std::string expectIdent(const char* what) {
        if (peek().kind != Token::Ident)
            throw ParseError(std::string("expected ") + what, peek().loc);
        return take().text;
    }

    std::string expectString(const char* what) {
        if (peek().kind != Token::Str)
            throw ParseError(std::string("expected quoted ") + what, peek().loc);
        return take().text;
    }

private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Expression grammar
//
//   implies := or ("=>" implies)?          right-associative
//   or      := and ("||" and)*
//   and     := cmp ("&&" cmp)*
//   cmp     := arith (relop arith)?
//   arith   := term (("+"|"-") term)*
//   term    := factor ("*" factor)*
//   factor  := INT | "true" | "false" | IDENT | "in" "(" IDENT ")"
//            | "-" factor | "!" factor | "(" implies ")"

inline ExprPtr parseImplies(Cursor& c);

inline ExprPtr parseFactor(Cursor& c) {
    const Token& t = c.peek();
    if (t.kind == Token::Number) {
        long long v = std::stoll(c.take().text);
        return ex::lit(v);
    }
    if (t.kind == Token::Ident) {
        if (c.eatIdent("true")) return ex::boolean(true);
        if (c.eatIdent("false")) return ex::boolean(false);
        if (c.eatIdent("not")) return ex::notE(parseFactor(c));
        if (t.text == "in") {
            c.take();
            c.expectSym("(");
            std::string s = c.expectIdent("state name");
            c.expectSym(")");
            return ex::inState(s);
        }
        return ex::var(c.take().text);
    }
    if (c.eatSym("-")) return ex::neg(parseFactor(c));
    if (c.eatSym("!")) return ex::notE(parseFactor(c));
    if (c.eatSym("(")) {
        ExprPtr e = parseImplies(c);
        c.expectSym(")");
        return e;
    }
    throw ParseError("expected expression", t.loc);
}

inline ExprPtr parseTerm(Cursor& c) {
    ExprPtr e = parseFactor(c);
    while (c.eatSym("*")) e = ex::mul(e, parseFactor(c));
    return e;
}

inline ExprPtr parseArith(Cursor& c) {
    ExprPtr e = parseTerm(c);
    for (;;) {
        if (c.eatSym("+")) e = ex::add(e, parseTerm(c));
        else if (c.eatSym("-")) e = ex::sub(e, parseTerm(c));
        else return e;
    }
}

inline ExprPtr parseCmp(Cursor& c) {
    ExprPtr e = parseArith(c);
    static const std::pair<std::string_view, BinOp> rel[] = {
        {"=", BinOp::Eq}, {"!=", BinOp::Ne}, {"<=", BinOp::Le},
        {">=", BinOp::Ge}, {"<", BinOp::Lt}, {">", BinOp::Gt},
    };
    for (const auto& [sym, op] : rel)
        if (c.eatSym(sym)) return ex::binary(op, e, parseArith(c));
    return e;
}

inline ExprPtr parseAnd(Cursor& c) {
    ExprPtr e = parseCmp(c);
    while (c.eatSym("&&") || c.isIdent("and")) {
        if (c.isIdent("and")) c.take();
        e = ex::conj(e, parseCmp(c));
    }
    return e;
}

inline ExprPtr parseOr(Cursor& c) {
    ExprPtr e = parseAnd(c);
    while (c.eatSym("||") || c.isIdent("or")) {
        if (c.isIdent("or")) c.take();
        e = ex::disj(e, parseAnd(c));
    }
    return e;
}

inline ExprPtr parseImplies(Cursor& c) {
    ExprPtr e = parseOr(c);
    if (c.eatSym("=>")) return ex::implies(e, parseImplies(c));
    return e;
}

}  // namespace detail

/// Parses a single expression. Throws ParseError on malformed input.
inline ExprPtr parseExpression(std::string_view text, SourceLoc base = {1, 1}) {
    detail::Cursor c(detail::Lexer(text, base).run());
    ExprPtr e = detail::parseImplies(c);
    if (!c.atEnd()) throw ParseError("trailing input after expression", c.peek().loc);
    return e;
}

namespace detail {

// stmt := ID ":=" expr | "broadcast" ID | "skip"
inline StmtPtr parseSimpleStmt(Cursor& c) {
    if (c.eatIdent("skip")) return st::skip();
    if (c.eatIdent("broadcast")) return st::bcast(c.expectIdent("event name"));
    std::string lhs = c.expectIdent("assignment target");
    c.expectSym(":=");
    return st::assign(std::move(lhs), parseImplies(c));
}

inline StmtPtr parseStmtList(Cursor& c) {
    std::vector<StmtPtr> stmts;
    stmts.push_back(parseSimpleStmt(c));
    while (c.eatSym(";")) stmts.push_back(parseSimpleStmt(c));
    if (stmts.size() == 1) return stmts.front();
    return st::seq(std::move(stmts));
}

}  // namespace detail

/// Parses `;`-separated simple statements ("x := x + 10", "broadcast F", "skip").
inline StmtPtr parseStatementText(std::string_view text, SourceLoc base = {1, 1}) {
    detail::Cursor c(detail::Lexer(text, base).run());
    StmtPtr s = detail::parseStmtList(c);
    if (!c.atEnd()) throw ParseError("trailing input after statement", c.peek().loc);
    return s;
}

// ---------------------------------------------------------------------------
// Model grammar

namespace detail {

class ModelParser {
public:
    explicit ModelParser(Cursor& c) : c_(c) {}

    void run(std::string& name, std::string& init, std::vector<std::string>& vars,
             std::vector<State>& states, std::vector<Transition>& transitions) {
        c_.expectKeyword("statechart");
        name = c_.expectIdent("statechart name");
        c_.expectKeyword("init");
        init = c_.expectIdent("initial state name");
        while (c_.isIdent("var")) {
            c_.take();
            vars.push_back(c_.expectIdent("variable name"));
            c_.expectSym(":");
            c_.expectKeyword("int");
        }
        while (c_.isIdent("state")) states.push_back(parseStateDecl());
        while (c_.isIdent("on") || c_.isIdent("always")) transitions.push_back(parseTransition());
        if (!c_.atEnd()) throw ParseError("unexpected input", c_.peek().loc);
    }

private:
    // Guard/invariant strings re-enter the expression grammar at the string's
    // own source position, so diagnostics land inside the original file.
    ExprPtr parseEmbeddedExpr() {
        SourceLoc loc = c_.peek().loc;
        std::string text = c_.expectString("expression");
        SourceLoc base{loc.line, loc.column + 1};
        return parseExpression(text, base);
    }

    State parseStateDecl() {
        c_.expectKeyword("state");
        return parseStateBody(false);
    }

    State parseRegionDecl() {
        c_.expectKeyword("region");
        State s = parseStateBody(true);
        return s;
    }

    State parseStateBody(bool isRegion) {
        State s;
        s.loc = c_.peek().loc;
        s.id = c_.expectIdent("state name");
        if (c_.eatIdent("basic")) {
            s.kind = StateKind::Basic;
        } else if (c_.eatIdent("xor")) {
            s.kind = StateKind::Xor;
        } else if (c_.eatIdent("and")) {
            s.kind = StateKind::And;
        } else {
            throw ParseError("expected state kind (basic, xor, and)", c_.peek().loc);
        }
        if (isRegion && s.kind != StateKind::Xor)
            throw ParseError("regions must be xor states", s.loc);
        s.invariant = c_.eatIdent("inv") ? parseEmbeddedExpr() : ex::truth();
        if (c_.isSym("{")) {
            if (s.kind == StateKind::Basic)
                throw ParseError("basic state " + s.id + " cannot have a block", c_.peek().loc);
            parseBlock(s);
        } else if (s.kind != StateKind::Basic) {
            throw ParseError("composite state " + s.id + " requires a block", c_.peek().loc);
        }
        return s;
    }

    void parseBlock(State& s) {
        c_.expectSym("{");
        if (c_.eatIdent("init")) {
            if (s.kind != StateKind::Xor)
                throw ParseError("init clause is only valid in xor states", c_.peek().loc);
            s.init = c_.expectIdent("initial state name");
        }
        for (;;) {
            if (c_.isIdent("state")) {
                if (s.kind == StateKind::And)
                    throw ParseError("children of an and state must be regions", c_.peek().loc);
                s.children.push_back(parseStateDecl());
            } else if (c_.isIdent("region")) {
                if (s.kind != StateKind::And)
                    throw ParseError("regions may only appear in and states", c_.peek().loc);
                s.children.push_back(parseRegionDecl());
            } else if (c_.isIdent("on") || c_.isIdent("always")) {
                if (s.kind != StateKind::Xor)
                    throw ParseError("transitions may only appear in xor states", c_.peek().loc);
                s.transitions.push_back(parseTransition());
            } else {
                break;
            }
        }
        c_.expectSym("}");
    }

    Transition parseTransition() {
        Transition t;
        t.loc = c_.peek().loc;
        if (c_.eatIdent("always")) {
            t.event = kEpsilon;
        } else {
            c_.expectKeyword("on");
            t.event = c_.expectIdent("event name");
        }
        c_.expectKeyword("from");
        t.source = c_.expectIdent("source state");
        c_.expectKeyword("to");
        t.target = c_.expectIdent("target state");
        t.guard = c_.eatIdent("when") ? parseEmbeddedExpr() : ex::truth();
        if (c_.eatIdent("do")) {
            c_.expectSym("{");
            t.action = parseStmtList(c_);
            c_.expectSym("}");
        } else {
            t.action = st::skip();
        }
        return t;
    }

    Cursor& c_;
};

}  // namespace detail

struct ParseResult {
    std::optional<StatechartModel> model;
    Diagnostics diagnostics;

    bool ok() const { return model.has_value() && !hasErrors(diagnostics); }
};

// ---------------------------------------------------------------------------
// Well-formedness

namespace detail {

enum class Ty { Int, Bool, Bad };

class TypeChecker {
public:
    TypeChecker(const StatechartModel& m, Diagnostics& diags) : m_(m), diags_(diags) {}

    void requireBool(const ExprPtr& e, SourceLoc loc, const std::string& what) {
        Ty t = typeOf(e, loc);
        if (t == Ty::Int) diags_.push_back(errorDiag(what + " must be boolean", loc));
    }

    void checkStatement(const StmtPtr& s, SourceLoc loc) {
        if (const auto* a = s->as<Statement::Assignment>()) {
            if (!m_.isVariable(a->lhs))
                diags_.push_back(errorDiag("assignment to undeclared variable " + a->lhs, loc));
            Ty t = typeOf(a->rhs, loc);
            if (t == Ty::Bool)
                diags_.push_back(errorDiag("assigned expression must be integer", loc));
        } else if (const auto* b = s->as<Statement::Bcast>()) {
            if (!m_.isEvent(b->event))
                diags_.push_back(errorDiag("unknown event " + b->event, loc));
        } else if (const auto* q = s->as<Statement::Seq>()) {
            for (const auto& el : q->stmts) checkStatement(el, loc);
        } else if (const auto* p = s->as<Statement::Par>()) {
            for (const auto& el : p->stmts) checkStatement(el, loc);
        } else if (const auto* g = s->as<Statement::Guard>()) {
            for (const auto& [c, body] : g->branches) {
                if (const auto* pred = c.as<Condition::Predicate>())
                    requireBool(pred->expr, loc, "guard condition");
                checkStatement(body, loc);
            }
        }
    }

    Ty typeOf(const ExprPtr& e, SourceLoc loc) {
        if (e->as<Expr::IntLit>()) return Ty::Int;
        if (e->as<Expr::BoolLit>()) return Ty::Bool;
        if (const auto* v = e->as<Expr::VarRef>()) {
            if (!m_.isVariable(v->name)) {
                diags_.push_back(errorDiag("undeclared variable " + v->name, loc));
                return Ty::Bad;
            }
            return Ty::Int;
        }
        if (e->as<Expr::StateLit>()) return Ty::Bad;  // never user-written
        if (const auto* i = e->as<Expr::InState>()) {
            if (!m_.exists(i->state))
                diags_.push_back(errorDiag("state test names unknown state " + i->state, loc));
            return Ty::Bool;
        }
        if (const auto* u = e->as<Expr::Unary>()) {
            Ty t = typeOf(u->operand, loc);
            Ty want = u->op == UnOp::Neg ? Ty::Int : Ty::Bool;
            if (t != want && t != Ty::Bad) {
                diags_.push_back(errorDiag("operand has wrong type", loc));
                return Ty::Bad;
            }
            return want;
        }
        if (const auto* b = e->as<Expr::Binary>()) {
            Ty lt = typeOf(b->lhs, loc);
            Ty rt = typeOf(b->rhs, loc);
            Ty want = isConnective(b->op) ? Ty::Bool : Ty::Int;
            for (Ty t : {lt, rt})
                if (t != want && t != Ty::Bad)
                    diags_.push_back(errorDiag("operand has wrong type", loc));
            return isArith(b->op) ? Ty::Int : Ty::Bool;
        }
        if (const auto* x = e->as<Expr::ExactlyOne>()) {
            for (const auto& i : x->items)
                if (typeOf(i, loc) == Ty::Int)
                    diags_.push_back(errorDiag("operand has wrong type", loc));
            return Ty::Bool;
        }
        return Ty::Bad;
    }

private:
    const StatechartModel& m_;
    Diagnostics& diags_;
};

inline void checkStateTree(const StatechartModel& m, const State& s, TypeChecker& tc,
                           Diagnostics& diags) {
    if (!s.isBasic() && s.children.empty())
        diags.push_back(errorDiag("composite state " + s.id + " has no children", s.loc));
    if (s.isXor()) {
        if (s.init.empty()) {
            diags.push_back(errorDiag("xor state " + s.id + " has no init clause", s.loc));
        } else {
            bool found = false;
            for (const auto& c : s.children) found |= c.id == s.init;
            if (!found)
                diags.push_back(errorDiag("init " + s.init + " is not a direct child of " + s.id, s.loc));
        }
    }
    if (s.id != kRootId) tc.requireBool(s.invariant, s.loc, "invariant of " + s.id);
    for (const auto& t : s.transitions) {
        for (const std::string& end : {t.source, t.target}) {
            bool sibling = false;
            for (const auto& c : s.children) sibling |= c.id == end;
            if (!sibling)
                diags.push_back(errorDiag("transition endpoint " + end + " is not a direct child of " +
                                          s.id, t.loc));
        }
        tc.requireBool(t.guard, t.loc, "transition guard");
        tc.checkStatement(t.action, t.loc);
    }
    for (const auto& c : s.children) checkStateTree(m, c, tc, diags);
}

}  // namespace detail

/// Semantic checks on a structurally built model: arities, init targets,
/// sibling transitions, declarations, typing, broadcast targets.
inline Diagnostics checkWellFormed(const StatechartModel& m) {
    Diagnostics diags;
    std::set<std::string> seenVars;
    for (const auto& v : m.variables()) {
        if (!seenVars.insert(v).second)
            diags.push_back(errorDiag("duplicate variable " + v));
        if (m.exists(v))
            diags.push_back(errorDiag("variable " + v + " collides with a state name"));
    }
    detail::TypeChecker tc(m, diags);
    detail::checkStateTree(m, m.root(), tc, diags);
    return diags;
}

/// Full front end: lex, parse, build, and check. The model is present only
/// when no error diagnostics were produced.
inline ParseResult parseModel(std::string_view text) {
    ParseResult res;
    std::string name, init;
    std::vector<std::string> vars;
    std::vector<State> states;
    std::vector<Transition> transitions;
    try {
        detail::Cursor c(detail::Lexer(text).run());
        detail::ModelParser(c).run(name, init, vars, states, transitions);
    } catch (const ParseError& e) {
        res.diagnostics.push_back(errorDiag(e.what(), e.loc));
        return res;
    }
    Diagnostics diags;
    StatechartModel m = StatechartModel::build(std::move(name), std::move(init), std::move(vars),
                                               std::move(states), std::move(transitions), diags);
    Diagnostics wf = checkWellFormed(m);
    diags.insert(diags.end(), wf.begin(), wf.end());
    res.diagnostics = std::move(diags);
    if (!hasErrors(res.diagnostics)) res.model = std::move(m);
    return res;
}

// ---------------------------------------------------------------------------
// Pretty-printing (canonical DSL emission; parse ∘ prettyPrint is stable)

namespace detail {

inline void printStmtDsl(std::string& out, const StmtPtr& s) {
    if (s->isSkip()) {
        out += "skip";
    } else if (const auto* a = s->as<Statement::Assignment>()) {
        out += a->lhs + " := " + printExpr(a->rhs, PrintStyle::Ascii);
    } else if (const auto* b = s->as<Statement::Bcast>()) {
        out += "broadcast " + b->event;
    } else if (const auto* q = s->as<Statement::Seq>()) {
        bool first = true;
        for (const auto& el : q->stmts) {
            if (!first) out += "; ";
            first = false;
            printStmtDsl(out, el);
        }
    } else {
        throw Error("statement has no DSL spelling");
    }
}

inline void printTransitionDsl(std::string& out, const Transition& t, int indent) {
    out.append(indent, ' ');
    out += t.spontaneous() ? "always" : "on " + t.event;
    out += " from " + t.source + " to " + t.target;
    if (!t.guard->isBoolLit(true))
        out += " when \"" + printExpr(t.guard, PrintStyle::Ascii) + "\"";
    if (!t.action->isSkip()) {
        out += " do { ";
        printStmtDsl(out, t.action);
        out += " }";
    }
    out += "\n";
}

inline void printStateDsl(std::string& out, const State& s, int indent, bool asRegion) {
    out.append(indent, ' ');
    out += asRegion ? "region " : "state ";
    out += s.id + " ";
    switch (s.kind) {
        case StateKind::Basic: out += "basic"; break;
        case StateKind::Xor: out += "xor"; break;
        case StateKind::And: out += "and"; break;
    }
    if (!s.invariant->isBoolLit(true))
        out += " inv \"" + printExpr(s.invariant, PrintStyle::Ascii) + "\"";
    if (s.isBasic()) {
        out += "\n";
        return;
    }
    out += " {\n";
    if (s.isXor() && !s.init.empty()) {
        out.append(indent + 2, ' ');
        out += "init " + s.init + "\n";
    }
    for (const auto& c : s.children) printStateDsl(out, c, indent + 2, s.isAnd());
    for (const auto& t : s.transitions) printTransitionDsl(out, t, indent + 2);
    out.append(indent, ' ');
    out += "}\n";
}

}  // namespace detail

inline std::string prettyPrint(const StatechartModel& m) {
    std::string out = "statechart " + m.name() + "\n";
    out += "init " + m.root().init + "\n";
    for (const auto& v : m.variables()) out += "var " + v + " : int\n";
    for (const auto& s : m.root().children) detail::printStateDsl(out, s, 0, false);
    for (const auto& t : m.root().transitions) detail::printTransitionDsl(out, t, 0);
    return out;
}

}  // namespace scvc
