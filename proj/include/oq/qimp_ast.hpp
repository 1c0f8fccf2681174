#pragma once

// AST for the imperative oracle language: typed C/Q-mode declarations,
// single-operator and compound assignments, classical control flow, and
// history inversion. Surface programs may use nested expressions; the
// checker elaborates them into three-address statements before the
// interpreter or compiler run.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "oq/common.hpp"

namespace oq::qimp {

enum class Base : uint8_t { Nat, Fixedp, Bool };
enum class Mode : uint8_t { C, Q };

const char* base_name(Base b);
const char* mode_name(Mode m);

struct Type {
    Base base = Base::Nat;
    Mode mode = Mode::C;
    uint32_t array_len = 0;  // 0 = scalar
    bool operator==(const Type&) const = default;
};

std::string type_name(const Type& t);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Lvalue: a scalar variable or an array element with a C-mode index.
struct Lval {
    std::string var;
    ExprPtr index;  // null for scalars
};

enum class Ex : uint8_t { Num, Fix, BoolLit, Load, Bin, Call };

enum class Bop : uint8_t {
    Add, Sub, Mul, Div, Mod, Xor,
    Lt, Le, Gt, Ge, Eq, Ne,
    RotL, RotR,  // statement-level only (l <<<= k)
};

const char* bop_name(Bop op);

struct Expr {
    Ex kind = Ex::Num;
    int line = 0;
    uval num = 0;        // Num: raw integer; BoolLit: 0/1
    std::string text;    // Fix: decimal literal, e.g. "0.1666" or "-0.5"
    Lval lv;             // Load
    Bop op = Bop::Add;   // Bin
    ExprPtr a, b;
    std::string callee;  // Call (user function or builtin pow/even/odd/frac)
    std::vector<ExprPtr> args;
};

ExprPtr make_num(uval v, int line = 0);
ExprPtr make_fix(std::string text, int line = 0);
ExprPtr make_bool(bool v, int line = 0);
ExprPtr make_load(Lval lv, int line = 0);
ExprPtr make_bin(Bop op, ExprPtr a, ExprPtr b, int line = 0);
ExprPtr make_call(std::string callee, std::vector<ExprPtr> args, int line = 0);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;
using Block = std::vector<StmtPtr>;

enum class St : uint8_t { Decl, Assign, OpAssign, If, For, Inv, Ret };

struct Stmt {
    St kind = St::Decl;
    int line = 0;
    // Decl: `mode base name[len] = init;` (init optional)
    Type type;
    std::string name;
    ExprPtr init;
    // Assign `lv = rhs` / OpAssign `lv op= rhs` (op in Add/Sub/Xor/RotL/RotR)
    Lval lv;
    Bop op = Bop::Add;
    ExprPtr rhs;
    // If
    ExprPtr cond;
    Block then_body, else_body;
    // For: `for (C nat name = init; name cmp bound; name step_op= step)`
    Bop cmp = Bop::Lt;
    ExprPtr bound;
    Bop step_op = Bop::Add;
    ExprPtr step;
    // Ret: `return rhs;` (rhs may be null for a bare return)
};

StmtPtr make_decl(Type t, std::string name, ExprPtr init, int line = 0);
StmtPtr make_assign(Lval lv, ExprPtr rhs, int line = 0);
StmtPtr make_op_assign(Lval lv, Bop op, ExprPtr rhs, int line = 0);
StmtPtr make_if(ExprPtr cond, Block then_body, Block else_body, int line = 0);
StmtPtr make_for(std::string var, ExprPtr init, Bop cmp, ExprPtr bound,
                 Bop step_op, ExprPtr step, Block body, int line = 0);
StmtPtr make_inv(Lval lv, int line = 0);
StmtPtr make_ret(ExprPtr rhs, int line = 0);

struct FunDef {
    std::string name;
    std::vector<std::pair<Type, std::string>> params;  // C-mode scalars only
    Block body;
    int line = 0;
};

struct Global {
    Type type;
    std::string name;
    ExprPtr init;  // C-mode only; Q globals start at 0 / circuit input
    int line = 0;
};

// A program: globals then functions; the last function is the entry point.
struct Program {
    std::vector<Global> globals;
    std::vector<FunDef> funs;
};

// Error with a source location, raised by the parser, checker, and
// compiler. The interpreter reports run-time problems as a value instead.
struct qimp_error : std::runtime_error {
    std::string rule;  // typing/inv rule or "syntax"
    int line;
    qimp_error(std::string r, const std::string& msg, int l)
        : std::runtime_error(l > 0 ? "line " + std::to_string(l) + ": " + msg
                                   : msg),
          rule(std::move(r)),
          line(l) {}
};

}  // namespace oq::qimp
