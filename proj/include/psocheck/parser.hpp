#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "psocheck/assertion.hpp"
#include "psocheck/ast.hpp"

namespace psocheck {

namespace detail {

struct Token {
    enum class Kind { Ident, Number, Symbol, Newline, End };
    Kind kind = Kind::End;
    std::string text;
    long value = 0;
    int line = 1, col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    bool at_symbol(const std::string& s) const {
        return tok_.kind == Token::Kind::Symbol && tok_.text == s;
    }
    bool at_ident(const std::string& s) const {
        return tok_.kind == Token::Kind::Ident && tok_.text == s;
    }
    bool eat_symbol(const std::string& s) {
        if (!at_symbol(s)) return false;
        advance();
        return true;
    }
    bool eat_ident(const std::string& s) {
        if (!at_ident(s)) return false;
        advance();
        return true;
    }
    void expect_symbol(const std::string& s) {
        if (!eat_symbol(s)) fail("expected '" + s + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(tok_.line, tok_.col, msg + " (got '" + describe(tok_) + "')");
    }
    void skip_newlines() {
        while (tok_.kind == Token::Kind::Newline) advance();
    }

  private:
    static std::string describe(const Token& t) {
        switch (t.kind) {
        case Token::Kind::End: return "end of file";
        case Token::Kind::Newline: return "end of line";
        default: return t.text;
        }
    }

    void advance() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++pos_;
                ++col_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_.kind = Token::Kind::End;
            tok_.text.clear();
            return;
        }
        char c = src_[pos_];
        if (c == '\n') {
            tok_ = {Token::Kind::Newline, "\\n", 0, line_, col_};
            ++pos_;
            ++line_;
            col_ = 1;
            return;
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
                ++pos_;
            tok_ = {Token::Kind::Ident, src_.substr(start, pos_ - start), 0, line_, col_};
            col_ += (int)tok_.text.size();
            return;
        }
        if (std::isdigit((unsigned char)c)) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) ++pos_;
            tok_ = {Token::Kind::Number, src_.substr(start, pos_ - start), 0, line_, col_};
            tok_.value = std::stol(tok_.text);
            col_ += (int)tok_.text.size();
            return;
        }
        static const char* two[] = {":=", "!=", "==", "->", ".."};
        for (const char* s : two) {
            if (src_.compare(pos_, 2, s) == 0) {
                tok_ = {Token::Kind::Symbol, s, 0, line_, col_};
                pos_ += 2;
                col_ += 2;
                return;
            }
        }
        tok_ = {Token::Kind::Symbol, std::string(1, c), 0, line_, col_};
        ++pos_;
        ++col_;
    }

    std::string src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

inline bool is_keyword(const std::string& s) {
    static const char* kw[] = {"skip", "fnc",  "if",    "then", "else", "while",
                               "do",   "true", "false", "in",   "max"};
    for (const char* k : kw)
        if (s == k) return true;
    return false;
}

/// Recursive-descent parser over one token stream. Registers are declared on
/// first use inside a thread body and owned by that thread; everywhere else an
/// unknown identifier is an error.
class ProgramParser {
  public:
    ProgramParser(const std::string& src, Signature presel = {})
        : lex_(src) {
        prog_.sig = std::move(presel);
    }

    Lexer& lex() { return lex_; }
    Program& prog() { return prog_; }
    void set_thread(int t) { current_thread_ = t; }

    // --- headers ---

    void parse_header() {
        lex_.skip_newlines();
        if (lex_.eat_ident("name")) {
            lex_.expect_symbol(":");
            std::string name;
            while (lex_.peek().kind != Token::Kind::Newline &&
                   lex_.peek().kind != Token::Kind::End)
                name += lex_.take().text;
            prog_.name = name;
            lex_.skip_newlines();
        }
        if (!lex_.eat_ident("vals")) lex_.fail("expected 'vals:'");
        lex_.expect_symbol(":");
        if (lex_.peek().kind != Token::Kind::Number) lex_.fail("expected a number");
        prog_.sig.dom.lo = (Val)lex_.take().value;
        lex_.expect_symbol("..");
        if (lex_.peek().kind != Token::Kind::Number) lex_.fail("expected a number");
        prog_.sig.dom.hi = (Val)lex_.take().value;
        if (prog_.sig.dom.lo > prog_.sig.dom.hi) lex_.fail("empty value domain");
        if (!prog_.sig.dom.contains(0))
            lex_.fail("value domain must contain 0, the initial value");
        lex_.skip_newlines();

        if (!lex_.eat_ident("globals")) lex_.fail("expected 'globals:'");
        lex_.expect_symbol(":");
        while (lex_.peek().kind == Token::Kind::Ident) {
            std::string g = lex_.take().text;
            if (is_keyword(g)) lex_.fail("'" + g + "' is reserved");
            if (prog_.sig.global_id(g) >= 0) lex_.fail("duplicate global '" + g + "'");
            prog_.sig.globals.push_back(g);
        }
        lex_.skip_newlines();
    }

    /// 'thread N:' introducing the next contiguous thread id; false when the
    /// token stream is not at a thread header.
    bool parse_thread_header() {
        lex_.skip_newlines();
        if (!lex_.at_ident("thread")) return false;
        lex_.take();
        if (lex_.peek().kind != Token::Kind::Number) lex_.fail("expected a thread number");
        int tid = (int)lex_.take().value;
        if (tid != declared_threads_ + 1)
            lex_.fail("thread ids must be contiguous starting at 1 (expected thread " +
                      std::to_string(declared_threads_ + 1) + ")");
        lex_.expect_symbol(":");
        ++declared_threads_;
        if (prog_.sig.nthreads < declared_threads_) prog_.sig.nthreads = declared_threads_;
        current_thread_ = tid - 1;
        return true;
    }

    // --- identifiers ---

    int global_id(const std::string& name) const { return prog_.sig.global_id(name); }

    int register_id(const std::string& name, bool may_declare) {
        int id = prog_.sig.register_id(name);
        if (id >= 0) {
            // Inside a thread body, registers are that thread's own namespace.
            if (may_declare && current_thread_ >= 0 &&
                prog_.sig.reg_owner[id] != current_thread_)
                lex_.fail("register '" + name + "' already used by thread " +
                          std::to_string(prog_.sig.reg_owner[id] + 1));
            return id;
        }
        if (!may_declare || current_thread_ < 0)
            lex_.fail("undeclared identifier '" + name + "'");
        prog_.sig.registers.push_back(name);
        prog_.sig.reg_owner.push_back(current_thread_);
        return (int)prog_.sig.registers.size() - 1;
    }

    Val number() {
        bool neg = lex_.eat_symbol("-");
        if (lex_.peek().kind != Token::Kind::Number) lex_.fail("expected a number");
        Val v = (Val)lex_.take().value;
        return neg ? -v : v;
    }

    Val domain_literal() {
        auto tok = lex_.peek();
        Val v = number();
        if (!prog_.sig.dom.contains(v))
            throw ParseError(tok.line, tok.col,
                             "value " + std::to_string(v) + " outside the declared domain " +
                                 std::to_string(prog_.sig.dom.lo) + ".." +
                                 std::to_string(prog_.sig.dom.hi));
        return v;
    }

    // --- expressions over registers ---

    ExprPtr parse_factor(bool may_declare) {
        if (lex_.peek().kind == Token::Kind::Number || lex_.at_symbol("-"))
            return Expr::literal(domain_literal());
        if (lex_.eat_symbol("(")) {
            auto e = parse_expr(may_declare);
            lex_.expect_symbol(")");
            return e;
        }
        if (lex_.peek().kind == Token::Kind::Ident && !is_keyword(lex_.peek().text)) {
            std::string name = lex_.take().text;
            if (global_id(name) >= 0)
                lex_.fail("global '" + name + "' cannot appear inside an expression");
            return Expr::regref(register_id(name, may_declare));
        }
        lex_.fail("expected an expression");
    }

    ExprPtr parse_term(bool may_declare) {
        auto e = parse_factor(may_declare);
        while (lex_.at_symbol("*")) {
            lex_.take();
            e = Expr::binary(Expr::Kind::Mul, e, parse_factor(may_declare));
        }
        return e;
    }

    ExprPtr parse_expr(bool may_declare) {
        auto e = parse_term(may_declare);
        while (lex_.at_symbol("+") || lex_.at_symbol("-")) {
            auto k = lex_.take().text == "+" ? Expr::Kind::Add : Expr::Kind::Sub;
            e = Expr::binary(k, e, parse_term(may_declare));
        }
        return e;
    }

    // --- boolean expressions ---

    BoolExprPtr parse_bool_atom(bool may_declare) {
        if (lex_.eat_ident("true")) return BoolExpr::constant(true);
        if (lex_.eat_ident("false")) return BoolExpr::constant(false);
        if (lex_.eat_symbol("!")) return BoolExpr::negate(parse_bool_atom(may_declare));
        if (lex_.eat_symbol("(")) {
            auto b = parse_bool(may_declare);
            lex_.expect_symbol(")");
            return b;
        }
        auto l = parse_expr(may_declare);
        if (lex_.eat_ident("in")) return BoolExpr::in_set(l, parse_value_set());
        BoolExpr::CmpOp op;
        if (lex_.eat_symbol("=") || lex_.eat_symbol("=="))
            op = BoolExpr::CmpOp::Eq;
        else if (lex_.eat_symbol("!="))
            op = BoolExpr::CmpOp::Ne;
        else
            lex_.fail("expected a comparison");
        return BoolExpr::cmp(op, l, parse_expr(may_declare));
    }

    std::vector<Val> parse_value_set() {
        lex_.expect_symbol("{");
        std::vector<Val> vs;
        if (!lex_.at_symbol("}")) {
            vs.push_back(domain_literal());
            while (lex_.eat_symbol(",")) vs.push_back(domain_literal());
        }
        lex_.expect_symbol("}");
        return vs;
    }

    BoolExprPtr parse_bool_and(bool may_declare) {
        auto b = parse_bool_atom(may_declare);
        while (lex_.eat_symbol("&"))
            b = BoolExpr::binary(BoolExpr::Kind::And, b, parse_bool_atom(may_declare));
        return b;
    }

    BoolExprPtr parse_bool_or(bool may_declare) {
        auto b = parse_bool_and(may_declare);
        while (lex_.eat_symbol("|"))
            b = BoolExpr::binary(BoolExpr::Kind::Or, b, parse_bool_and(may_declare));
        return b;
    }

    BoolExprPtr parse_bool(bool may_declare) {
        auto b = parse_bool_or(may_declare);
        if (lex_.eat_symbol("->"))
            return BoolExpr::binary(BoolExpr::Kind::Implies, b, parse_bool(may_declare));
        return b;
    }

    // --- statements ---

    CommandPtr parse_block() {
        lex_.expect_symbol("{");
        auto body = parse_stmt_seq();
        lex_.skip_newlines();
        lex_.expect_symbol("}");
        return body;
    }

    CommandPtr parse_stmt() {
        lex_.skip_newlines();
        if (lex_.eat_ident("skip")) return Command::skip();
        if (lex_.eat_ident("fnc")) return Command::fence();
        if (lex_.eat_ident("if")) {
            auto cond = parse_bool(true);
            if (!lex_.eat_ident("then")) lex_.fail("expected 'then'");
            lex_.skip_newlines();
            auto then_branch = parse_block();
            lex_.skip_newlines();
            if (!lex_.eat_ident("else")) lex_.fail("expected 'else'");
            lex_.skip_newlines();
            auto else_branch = parse_block();
            return Command::if_then_else(cond, then_branch, else_branch);
        }
        if (lex_.eat_ident("while")) {
            auto cond = parse_bool(true);
            if (!lex_.eat_ident("do")) lex_.fail("expected 'do'");
            lex_.skip_newlines();
            return Command::while_do(cond, parse_block());
        }
        if (lex_.peek().kind != Token::Kind::Ident || is_keyword(lex_.peek().text))
            lex_.fail("expected a statement");
        std::string name = lex_.take().text;
        lex_.expect_symbol(":=");
        int g = global_id(name);
        if (g >= 0) return Command::write_global(g, parse_expr(true));
        int r = register_id(name, true);
        if (lex_.peek().kind == Token::Kind::Ident && !is_keyword(lex_.peek().text)) {
            int src = global_id(lex_.peek().text);
            if (src >= 0) {
                lex_.take();
                if ((lex_.peek().kind == Token::Kind::Ident && !is_keyword(lex_.peek().text)) ||
                    lex_.at_symbol("+") || lex_.at_symbol("*") || lex_.at_symbol("-"))
                    lex_.fail("global '" + prog_.sig.globals[src] +
                              "' cannot appear inside an expression");
                return Command::read_global(r, src);
            }
        }
        return Command::assign_reg(r, parse_expr(true));
    }

    bool at_section_end() {
        lex_.skip_newlines();
        return lex_.peek().kind == Token::Kind::End || lex_.at_symbol("}") ||
               lex_.at_symbol("{") || lex_.at_ident("thread") || lex_.at_ident("post") ||
               lex_.at_ident("final") || lex_.at_ident("init");
    }

    CommandPtr parse_stmt_seq() {
        std::vector<CommandPtr> stmts;
        lex_.skip_newlines();
        while (!at_section_end()) {
            stmts.push_back(parse_stmt());
            lex_.skip_newlines();
            lex_.eat_symbol(";");  // ';' separates statements; optional after blocks
            lex_.skip_newlines();
        }
        return seq_of(stmts);
    }

    // --- assertions ---

    int parse_thread_ref() {
        lex_.expect_symbol("@");
        if (lex_.peek().kind != Token::Kind::Number) lex_.fail("expected a thread id after '@'");
        auto tok = lex_.take();
        int t = (int)tok.value;
        if (t < 1 || t > prog_.sig.nthreads)
            throw ParseError(tok.line, tok.col, "thread id out of range");
        return t - 1;
    }

    int parse_global_name() {
        if (lex_.peek().kind != Token::Kind::Ident) lex_.fail("expected a global variable");
        auto tok = lex_.take();
        int g = global_id(tok.text);
        if (g < 0) throw ParseError(tok.line, tok.col, "undeclared global '" + tok.text + "'");
        return g;
    }

    AssertionPtr parse_assert_atom() {
        lex_.skip_newlines();
        if (lex_.eat_ident("true")) return Assertion::constant(true);
        if (lex_.eat_ident("false")) return Assertion::constant(false);
        if (lex_.eat_symbol("!")) return Assertion::negate(parse_assert_atom());
        if (lex_.eat_symbol("(")) {
            auto a = parse_assertion();
            lex_.expect_symbol(")");
            return a;
        }
        if (lex_.eat_ident("max")) {
            lex_.expect_symbol("(");
            int g = parse_global_name();
            lex_.expect_symbol(")");
            return Assertion::max_view(g, parse_thread_ref());
        }
        if (lex_.eat_symbol("<")) {
            int y = parse_global_name();
            lex_.expect_symbol("=");
            Val u = domain_literal();
            lex_.expect_symbol(">");
            lex_.expect_symbol("[");
            int x = parse_global_name();
            lex_.expect_symbol("=");
            Val v = domain_literal();
            lex_.expect_symbol("]");
            return Assertion::cond_obs(y, u, x, v, parse_thread_ref());
        }
        if (lex_.eat_symbol("[")) {
            int x = parse_global_name();
            bool impossible = false, definite = false;
            if (lex_.eat_symbol("!="))
                impossible = true;
            else if (lex_.eat_symbol("=="))
                definite = true;
            else
                lex_.expect_symbol("=");
            Val v = domain_literal();
            lex_.expect_symbol("]");
            int t = parse_thread_ref();
            if (impossible) return Assertion::impossible(x, v, t);
            if (definite) return Assertion::definite(x, v, t);
            return Assertion::synced(x, v, t);
        }
        auto l = parse_expr(false);
        if (lex_.eat_ident("in")) return Assertion::reg_pred(BoolExpr::in_set(l, parse_value_set()));
        BoolExpr::CmpOp op;
        if (lex_.eat_symbol("=") || lex_.eat_symbol("=="))
            op = BoolExpr::CmpOp::Eq;
        else if (lex_.eat_symbol("!="))
            op = BoolExpr::CmpOp::Ne;
        else
            lex_.fail("expected a comparison in register predicate");
        return Assertion::reg_pred(BoolExpr::cmp(op, l, parse_expr(false)));
    }

    AssertionPtr parse_assert_and() {
        auto a = parse_assert_atom();
        while (lex_.eat_symbol("&")) a = Assertion::conj(a, parse_assert_atom());
        return a;
    }

    AssertionPtr parse_assertion() {
        auto a = parse_assert_and();
        while (lex_.eat_symbol("|")) a = Assertion::disj(a, parse_assert_and());
        return a;
    }

    /// Skip one balanced { ... } block without interpreting its contents.
    void skip_braced_block() {
        lex_.expect_symbol("{");
        int depth = 1;
        while (depth > 0) {
            if (lex_.peek().kind == Token::Kind::End) lex_.fail("unterminated '{'");
            if (lex_.at_symbol("{")) ++depth;
            if (lex_.at_symbol("}")) --depth;
            lex_.take();
        }
    }

    /// Skip to end of line.
    void skip_line() {
        while (lex_.peek().kind != Token::Kind::Newline && lex_.peek().kind != Token::Kind::End)
            lex_.take();
    }

  private:
    Lexer lex_;
    Program prog_;
    int current_thread_ = -1;
    int declared_threads_ = 0;
};

} // namespace detail

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

inline Program parse_litmus(const std::string& text) {
    detail::ProgramParser pp(text);
    auto& lex = pp.lex();
    pp.parse_header();
    while (pp.parse_thread_header()) {
        pp.prog().threads.push_back(pp.parse_stmt_seq());
    }
    if (pp.prog().sig.nthreads == 0) lex.fail("expected at least one 'thread N:' section");
    pp.set_thread(-1);
    pp.prog().post = BoolExpr::constant(true);
    lex.skip_newlines();
    if (lex.eat_ident("post")) {
        lex.expect_symbol(":");
        pp.prog().post = pp.parse_bool(false);
        lex.skip_newlines();
    }
    if (lex.peek().kind != detail::Token::Kind::End) lex.fail("unexpected trailing text");
    return pp.prog();
}

inline AssertionPtr parse_assertion(const std::string& text, const Program& p) {
    detail::ProgramParser pp(text, p.sig);
    auto a = pp.parse_assertion();
    if (pp.lex().peek().kind != detail::Token::Kind::End)
        pp.lex().fail("unexpected trailing text after assertion");
    return a;
}

/// A proof outline: a straight-line program annotated with an assertion around
/// every atomic statement, plus whole-program init and final assertions.
struct ProofOutline {
    Program program;
    std::vector<std::vector<CommandPtr>> atoms;      // per thread
    std::vector<std::vector<AssertionPtr>> asserts;  // per thread; atoms[t].size()+1 entries
    AssertionPtr init_assert;
    AssertionPtr final_assert;
};

/// Two passes: the first collects the signature (register declarations live in
/// statement positions), the second parses assertions against it. This lets an
/// assertion mention a register that is only assigned further down.
inline ProofOutline parse_outline(const std::string& text) {
    auto parse_pass = [&](bool collect, Signature sig) {
        detail::ProgramParser pp(text, std::move(sig));
        auto& lex = pp.lex();
        ProofOutline out;
        pp.parse_header();
        lex.skip_newlines();
        if (lex.at_ident("init")) lex.fail("'init:' comes after the thread sections");
        while (pp.parse_thread_header()) {
            out.atoms.emplace_back();
            out.asserts.emplace_back();
            auto& atoms = out.atoms.back();
            auto& asserts = out.asserts.back();
            lex.skip_newlines();
            if (!lex.at_symbol("{"))
                lex.fail("proof outline threads start with a '{ assertion }'");
            while (true) {
                if (collect) {
                    asserts.push_back(Assertion::constant(true));
                    pp.skip_braced_block();
                } else {
                    lex.expect_symbol("{");
                    asserts.push_back(pp.parse_assertion());
                    lex.skip_newlines();
                    lex.expect_symbol("}");
                }
                if (pp.at_section_end()) break;
                auto stmt = pp.parse_stmt();
                if (stmt->kind == Command::Kind::If || stmt->kind == Command::Kind::While)
                    lex.fail("proof outlines support atomic statements only");
                atoms.push_back(stmt);
                lex.skip_newlines();
                lex.eat_symbol(";");
                lex.skip_newlines();
                if (!lex.at_symbol("{")) lex.fail("expected a '{ assertion }' after the statement");
            }
            out.program.threads.push_back(seq_of(atoms));
        }
        if (out.atoms.empty()) lex.fail("expected at least one 'thread N:' section");
        pp.set_thread(-1);
        out.init_assert = Assertion::constant(true);
        out.final_assert = Assertion::constant(true);
        out.program.post = BoolExpr::constant(true);
        lex.skip_newlines();
        while (lex.peek().kind != detail::Token::Kind::End) {
            if (lex.eat_ident("init")) {
                lex.expect_symbol(":");
                if (collect)
                    pp.skip_line();
                else
                    out.init_assert = pp.parse_assertion();
            } else if (lex.eat_ident("final")) {
                lex.expect_symbol(":");
                if (collect)
                    pp.skip_line();
                else
                    out.final_assert = pp.parse_assertion();
            } else if (lex.eat_ident("post")) {
                lex.expect_symbol(":");
                if (collect)
                    pp.skip_line();
                else
                    out.program.post = pp.parse_bool(false);
            } else {
                lex.fail("expected 'init:', 'final:' or 'post:'");
            }
            lex.skip_newlines();
        }
        out.program.sig = pp.prog().sig;
        out.program.name = pp.prog().name;
        return out;
    };

    ProofOutline first = parse_pass(true, {});
    // Carry only what the second pass cannot rediscover in order: the full
    // register table and the final thread count (forward references in
    // assertions need both).
    Signature pre;
    pre.registers = first.program.sig.registers;
    pre.reg_owner = first.program.sig.reg_owner;
    pre.nthreads = first.program.sig.nthreads;
    return parse_pass(false, std::move(pre));
}

} // namespace psocheck
