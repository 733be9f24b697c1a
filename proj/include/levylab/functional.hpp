// SPDX-License-Identifier: Apache-2.0
//
// A small expression language for path functionals Y = F(X). Primitives are
// count(A) and sumjumps(A, g) over named box sets, the terminal value X_T,
// constants, and a closed operator set (+ - * / pow min max clamp exp lnplus
// indicator). The reader set of a functional is syntactic, which is what the
// conservative F_A-measurability certificate is built on.
//
// Grammar: docs/grammar.md (EBNF). Pretty-print and parse are mutually
// inverse on ASTs.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "levylab/model.hpp"
#include "levylab/simulate.hpp"

namespace levylab {

enum class BinOp { Add, Sub, Mul, Div, Pow, Min, Max };

// the fixed g-library for sumjumps(A, g)
enum class JumpFn { X, X2, TX, AbsX, Log1pAbsX };

const char* jump_fn_name(JumpFn fn);
std::optional<JumpFn> jump_fn_from_name(std::string_view name);
double apply_jump_fn(JumpFn fn, double t, double x);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct SourceSpan {
    int line = 0;    // 1-based; 0 for programmatically built nodes
    int column = 0;
};

struct Expr {
    struct Const {
        double value;
    };
    struct Count {
        std::string box;
    };
    struct SumJumps {
        std::string box;
        JumpFn fn;
    };
    struct Terminal {};  // X_T
    struct Neg {
        ExprPtr e;
    };
    struct Bin {
        BinOp op;
        ExprPtr lhs, rhs;
    };
    struct Clamp {
        ExprPtr e, lo, hi;
    };
    struct Exp {
        ExprPtr e;
    };
    struct LnPlus {
        ExprPtr e;
    };
    struct Indicator {  // 1{e > threshold}
        ExprPtr e, threshold;
    };

    using Node = std::variant<Const, Count, SumJumps, Terminal, Neg, Bin,
                              Clamp, Exp, LnPlus, Indicator>;

    Node node;
    SourceSpan span;
};

// Programmatic AST builders (used by estimators that derive functionals,
// e.g. the K-functional split Y 1{count <= c}).
namespace ast {
ExprPtr constant(double v);
ExprPtr count(std::string box);
ExprPtr sumjumps(std::string box, JumpFn fn);
ExprPtr terminal();
ExprPtr neg(ExprPtr e);
ExprPtr bin(BinOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr clamp(ExprPtr e, ExprPtr lo, ExprPtr hi);
ExprPtr exp(ExprPtr e);
ExprPtr lnplus(ExprPtr e);
ExprPtr indicator(ExprPtr e, ExprPtr threshold);
}  // namespace ast

// Parsed (or built) functional plus its syntactic reader set.
class Functional {
  public:
    explicit Functional(ExprPtr root);

    const ExprPtr& root() const { return root_; }
    // referenced box names, sorted, unique
    const std::vector<std::string>& boxes_read() const { return boxes_; }
    bool uses_terminal_value() const { return uses_terminal_; }

  private:
    ExprPtr root_;
    std::vector<std::string> boxes_;
    bool uses_terminal_ = false;
};

Functional parse_functional(std::string_view source);

// Canonical form; parse(to_string(f)) reproduces the AST.
std::string to_string(const Functional& f);
std::string to_string(const ExprPtr& e);

bool ast_equal(const ExprPtr& a, const ExprPtr& b);

using BoxEnv = std::map<std::string, BoxSet>;

double evaluate(const Functional& f, const JumpModel& model,
                const BoxEnv& boxes, const JumpPath& path);

struct MeasurabilityReport {
    std::vector<std::string> boxes;  // referenced box names
    bool uses_terminal_value = false;
    bool certified = false;
    // offenders: boxes not contained in A; "X_T" when the terminal value is
    // read and A does not cover [0,T) x supp(nu)
    std::vector<std::string> offending;
};

// Conservative static certificate: certified iff every referenced box is
// geometrically contained in A and any terminal-value read is covered by A
// over the whole horizon and nu-support. (The drift part of X_T is
// deterministic, so it never breaks measurability.)
MeasurabilityReport measurability(const Functional& f, const JumpModel& model,
                                  const BoxEnv& boxes, const BoxSet& a);

// If f reads the path only through count(box) of at most one box (and that
// box is `box_name` when one is read), return phi with f = phi(count(box)).
std::optional<std::function<double(std::int64_t)>> as_count_function(
    const Functional& f, const std::string& box_name);

}  // namespace levylab
