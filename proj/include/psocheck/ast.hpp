#pragma once

#include <algorithm>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "psocheck/util.hpp"

namespace psocheck {

using Val = int;

/// Contiguous finite range of values; every program declares one and it must contain 0,
/// the initial value of all variables.
struct ValueDomain {
    Val lo = 0;
    Val hi = 1;

    bool contains(Val v) const { return v >= lo && v <= hi; }
    int size() const { return hi - lo + 1; }
    std::vector<Val> values() const {
        std::vector<Val> out;
        for (Val v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    bool operator==(const ValueDomain&) const = default;
};

// ---------------------------------------------------------------------------
// Expressions over registers and literals. Globals never appear here; reading
// a global is its own command form.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Literal, Reg, Add, Sub, Mul };
    Kind kind;
    Val lit = 0;
    int reg = -1;
    ExprPtr lhs, rhs;

    static ExprPtr literal(Val v) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Literal;
        e->lit = v;
        return e;
    }
    static ExprPtr regref(int r) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Reg;
        e->reg = r;
        return e;
    }
    static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->lhs = std::move(a);
        e->rhs = std::move(b);
        return e;
    }
};

struct BoolExpr;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
    enum class Kind { True, False, Cmp, In, Not, And, Or, Implies };
    enum class CmpOp { Eq, Ne };

    Kind kind;
    CmpOp op = CmpOp::Eq;
    ExprPtr lhs, rhs;          // Cmp; In uses lhs only
    std::vector<Val> set;      // In
    BoolExprPtr a, b;          // Not uses a; And/Or/Implies use both

    static BoolExprPtr constant(bool v) {
        auto e = std::make_shared<BoolExpr>();
        e->kind = v ? Kind::True : Kind::False;
        return e;
    }
    static BoolExprPtr cmp(CmpOp op, ExprPtr l, ExprPtr r) {
        auto e = std::make_shared<BoolExpr>();
        e->kind = Kind::Cmp;
        e->op = op;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        return e;
    }
    static BoolExprPtr in_set(ExprPtr l, std::vector<Val> vs) {
        auto e = std::make_shared<BoolExpr>();
        e->kind = Kind::In;
        e->lhs = std::move(l);
        e->set = std::move(vs);
        return e;
    }
    static BoolExprPtr negate(BoolExprPtr x) {
        auto e = std::make_shared<BoolExpr>();
        e->kind = Kind::Not;
        e->a = std::move(x);
        return e;
    }
    static BoolExprPtr binary(Kind k, BoolExprPtr x, BoolExprPtr y) {
        auto e = std::make_shared<BoolExpr>();
        e->kind = k;
        e->a = std::move(x);
        e->b = std::move(y);
        return e;
    }
};

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

struct Command {
    enum class Kind { Skip, Fence, AssignReg, ReadGlobal, WriteGlobal, Seq, If, While };

    Kind kind;
    int reg = -1;      // AssignReg, ReadGlobal
    int global = -1;   // ReadGlobal, WriteGlobal
    ExprPtr expr;      // AssignReg, WriteGlobal
    BoolExprPtr cond;  // If, While
    CommandPtr left;   // Seq head, If then-branch, While body
    CommandPtr right;  // Seq tail, If else-branch

    static CommandPtr skip() {
        static CommandPtr s = make(Kind::Skip);
        return s;
    }
    static CommandPtr fence() { return make(Kind::Fence); }
    static CommandPtr assign_reg(int r, ExprPtr e) {
        auto c = make(Kind::AssignReg);
        c->reg = r;
        c->expr = std::move(e);
        return c;
    }
    static CommandPtr read_global(int r, int x) {
        auto c = make(Kind::ReadGlobal);
        c->reg = r;
        c->global = x;
        return c;
    }
    static CommandPtr write_global(int x, ExprPtr e) {
        auto c = make(Kind::WriteGlobal);
        c->global = x;
        c->expr = std::move(e);
        return c;
    }
    static CommandPtr seq(CommandPtr a, CommandPtr b) {
        auto c = make(Kind::Seq);
        c->left = std::move(a);
        c->right = std::move(b);
        return c;
    }
    static CommandPtr if_then_else(BoolExprPtr b, CommandPtr t, CommandPtr e) {
        auto c = make(Kind::If);
        c->cond = std::move(b);
        c->left = std::move(t);
        c->right = std::move(e);
        return c;
    }
    static CommandPtr while_do(BoolExprPtr b, CommandPtr body) {
        auto c = make(Kind::While);
        c->cond = std::move(b);
        c->left = std::move(body);
        return c;
    }

  private:
    static std::shared_ptr<Command> make(Kind k) {
        auto c = std::make_shared<Command>();
        c->kind = k;
        return c;
    }
};

/// Fold a statement list into a right-nested Seq chain; empty list is skip.
inline CommandPtr seq_of(const std::vector<CommandPtr>& stmts) {
    if (stmts.empty()) return Command::skip();
    CommandPtr acc = stmts.back();
    for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it)
        acc = Command::seq(*it, acc);
    return acc;
}

// ---------------------------------------------------------------------------
// Program signature and programs
// ---------------------------------------------------------------------------

/// The vocabulary a program (or a synthetic universe) is built over: thread count,
/// global variables, registers with owning thread, and the value domain.
struct Signature {
    int nthreads = 0;
    std::vector<std::string> globals;
    std::vector<std::string> registers;
    std::vector<int> reg_owner;  // thread index per register
    ValueDomain dom;

    int nglobals() const { return (int)globals.size(); }
    int nregisters() const { return (int)registers.size(); }
    int buffer_count() const { return nthreads * nglobals(); }
    int buf_index(int t, int x) const { return t * nglobals() + x; }

    int global_id(const std::string& name) const {
        auto it = std::find(globals.begin(), globals.end(), name);
        return it == globals.end() ? -1 : (int)(it - globals.begin());
    }
    int register_id(const std::string& name) const {
        auto it = std::find(registers.begin(), registers.end(), name);
        return it == registers.end() ? -1 : (int)(it - registers.begin());
    }
};

struct Program {
    std::string name;
    Signature sig;
    std::vector<CommandPtr> threads;  // index = thread id - 1
    BoolExprPtr post;                 // over registers; never null (defaults to true)
};

/// One valuation of all registers (register names are globally unique, so a single
/// flat vector covers every thread's local state).
using RegFile = std::vector<Val>;

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

inline Val eval_expr(const Expr& e, const RegFile& regs) {
    switch (e.kind) {
    case Expr::Kind::Literal: return e.lit;
    case Expr::Kind::Reg:
        if (e.reg < 0 || e.reg >= (int)regs.size())
            throw SemanticsError("unbound register in expression");
        return regs[e.reg];
    case Expr::Kind::Add: return eval_expr(*e.lhs, regs) + eval_expr(*e.rhs, regs);
    case Expr::Kind::Sub: return eval_expr(*e.lhs, regs) - eval_expr(*e.rhs, regs);
    case Expr::Kind::Mul: return eval_expr(*e.lhs, regs) * eval_expr(*e.rhs, regs);
    }
    throw SemanticsError("bad expression node");
}

inline bool eval_bool(const BoolExpr& b, const RegFile& regs) {
    switch (b.kind) {
    case BoolExpr::Kind::True: return true;
    case BoolExpr::Kind::False: return false;
    case BoolExpr::Kind::Cmp: {
        Val l = eval_expr(*b.lhs, regs), r = eval_expr(*b.rhs, regs);
        return b.op == BoolExpr::CmpOp::Eq ? l == r : l != r;
    }
    case BoolExpr::Kind::In: {
        Val l = eval_expr(*b.lhs, regs);
        return std::find(b.set.begin(), b.set.end(), l) != b.set.end();
    }
    case BoolExpr::Kind::Not: return !eval_bool(*b.a, regs);
    case BoolExpr::Kind::And: return eval_bool(*b.a, regs) && eval_bool(*b.b, regs);
    case BoolExpr::Kind::Or: return eval_bool(*b.a, regs) || eval_bool(*b.b, regs);
    case BoolExpr::Kind::Implies: return !eval_bool(*b.a, regs) || eval_bool(*b.b, regs);
    }
    throw SemanticsError("bad boolean expression node");
}

// ---------------------------------------------------------------------------
// Structural equality / hashing / ordering for commands (program residues are
// compared structurally during exploration)
// ---------------------------------------------------------------------------

inline bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Expr::Kind::Literal: return a.lit == b.lit;
    case Expr::Kind::Reg: return a.reg == b.reg;
    default: return expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
    }
}

inline bool bool_expr_equal(const BoolExpr& a, const BoolExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False: return true;
    case BoolExpr::Kind::Cmp:
        return a.op == b.op && expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
    case BoolExpr::Kind::In: return expr_equal(*a.lhs, *b.lhs) && a.set == b.set;
    case BoolExpr::Kind::Not: return bool_expr_equal(*a.a, *b.a);
    default: return bool_expr_equal(*a.a, *b.a) && bool_expr_equal(*a.b, *b.b);
    }
}

inline bool command_equal(const Command& a, const Command& b) {
    if (&a == &b) return true;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Command::Kind::Skip:
    case Command::Kind::Fence: return true;
    case Command::Kind::AssignReg: return a.reg == b.reg && expr_equal(*a.expr, *b.expr);
    case Command::Kind::ReadGlobal: return a.reg == b.reg && a.global == b.global;
    case Command::Kind::WriteGlobal: return a.global == b.global && expr_equal(*a.expr, *b.expr);
    case Command::Kind::Seq: return command_equal(*a.left, *b.left) && command_equal(*a.right, *b.right);
    case Command::Kind::If:
        return bool_expr_equal(*a.cond, *b.cond) && command_equal(*a.left, *b.left) &&
               command_equal(*a.right, *b.right);
    case Command::Kind::While:
        return bool_expr_equal(*a.cond, *b.cond) && command_equal(*a.left, *b.left);
    }
    return false;
}

inline std::size_t command_hash(const Command& c) {
    std::size_t h = static_cast<std::size_t>(c.kind) * 1099511628211ull;
    switch (c.kind) {
    case Command::Kind::Skip:
    case Command::Kind::Fence: break;
    case Command::Kind::AssignReg:
        hash_combine(h, (std::size_t)c.reg);
        break;
    case Command::Kind::ReadGlobal:
        hash_combine(h, (std::size_t)c.reg);
        hash_combine(h, (std::size_t)c.global);
        break;
    case Command::Kind::WriteGlobal:
        hash_combine(h, (std::size_t)c.global);
        break;
    case Command::Kind::Seq:
    case Command::Kind::If:
        hash_combine(h, command_hash(*c.left));
        hash_combine(h, command_hash(*c.right));
        break;
    case Command::Kind::While:
        hash_combine(h, command_hash(*c.left));
        break;
    }
    return h;
}

/// AST size; strictly decreases along every non-Read-branching local step of a
/// loop-free command, which is the termination measure the tests probe.
inline int command_size(const Command& c) {
    switch (c.kind) {
    case Command::Kind::Skip: return 1;
    case Command::Kind::Fence:
    case Command::Kind::AssignReg:
    case Command::Kind::ReadGlobal:
    case Command::Kind::WriteGlobal: return 2;
    case Command::Kind::Seq:
    case Command::Kind::If: return 1 + command_size(*c.left) + command_size(*c.right);
    case Command::Kind::While: return 2 + command_size(*c.left);
    }
    return 1;
}

// ---------------------------------------------------------------------------
// Printing (litmus concrete syntax; parse . print . parse is the identity)
// ---------------------------------------------------------------------------

inline std::string to_string(const Expr& e, const Signature& sig) {
    switch (e.kind) {
    case Expr::Kind::Literal: return std::to_string(e.lit);
    case Expr::Kind::Reg: return sig.registers[e.reg];
    case Expr::Kind::Add: return "(" + to_string(*e.lhs, sig) + " + " + to_string(*e.rhs, sig) + ")";
    case Expr::Kind::Sub: return "(" + to_string(*e.lhs, sig) + " - " + to_string(*e.rhs, sig) + ")";
    case Expr::Kind::Mul: return "(" + to_string(*e.lhs, sig) + " * " + to_string(*e.rhs, sig) + ")";
    }
    return "?";
}

inline std::string to_string(const BoolExpr& b, const Signature& sig) {
    switch (b.kind) {
    case BoolExpr::Kind::True: return "true";
    case BoolExpr::Kind::False: return "false";
    case BoolExpr::Kind::Cmp:
        return to_string(*b.lhs, sig) + (b.op == BoolExpr::CmpOp::Eq ? " = " : " != ") +
               to_string(*b.rhs, sig);
    case BoolExpr::Kind::In: {
        std::string s = to_string(*b.lhs, sig) + " in {";
        for (std::size_t i = 0; i < b.set.size(); ++i)
            s += (i ? ", " : "") + std::to_string(b.set[i]);
        return s + "}";
    }
    case BoolExpr::Kind::Not: return "!(" + to_string(*b.a, sig) + ")";
    case BoolExpr::Kind::And: return "(" + to_string(*b.a, sig) + " & " + to_string(*b.b, sig) + ")";
    case BoolExpr::Kind::Or: return "(" + to_string(*b.a, sig) + " | " + to_string(*b.b, sig) + ")";
    case BoolExpr::Kind::Implies:
        return "(" + to_string(*b.a, sig) + " -> " + to_string(*b.b, sig) + ")";
    }
    return "?";
}

namespace detail {

inline void print_command(std::ostream& os, const Command& c, const Signature& sig,
                          const std::string& indent) {
    switch (c.kind) {
    case Command::Kind::Skip: os << indent << "skip;\n"; break;
    case Command::Kind::Fence: os << indent << "fnc;\n"; break;
    case Command::Kind::AssignReg:
        os << indent << sig.registers[c.reg] << " := " << to_string(*c.expr, sig) << ";\n";
        break;
    case Command::Kind::ReadGlobal:
        os << indent << sig.registers[c.reg] << " := " << sig.globals[c.global] << ";\n";
        break;
    case Command::Kind::WriteGlobal:
        os << indent << sig.globals[c.global] << " := " << to_string(*c.expr, sig) << ";\n";
        break;
    case Command::Kind::Seq:
        print_command(os, *c.left, sig, indent);
        print_command(os, *c.right, sig, indent);
        break;
    case Command::Kind::If:
        os << indent << "if " << to_string(*c.cond, sig) << " then {\n";
        print_command(os, *c.left, sig, indent + "  ");
        os << indent << "} else {\n";
        print_command(os, *c.right, sig, indent + "  ");
        os << indent << "}\n";
        break;
    case Command::Kind::While:
        os << indent << "while " << to_string(*c.cond, sig) << " do {\n";
        print_command(os, *c.left, sig, indent + "  ");
        os << indent << "}\n";
        break;
    }
}

} // namespace detail

inline std::string to_string(const Program& p) {
    std::ostringstream os;
    if (!p.name.empty()) os << "name: " << p.name << "\n";
    os << "vals: " << p.sig.dom.lo << ".." << p.sig.dom.hi << "\n";
    os << "globals:";
    for (const auto& g : p.sig.globals) os << " " << g;
    os << "\n";
    for (int t = 0; t < p.sig.nthreads; ++t) {
        os << "thread " << (t + 1) << ":\n";
        detail::print_command(os, *p.threads[t], p.sig, "  ");
    }
    os << "post: " << to_string(*p.post, p.sig) << "\n";
    return os.str();
}

} // namespace psocheck
