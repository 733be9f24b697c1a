// SPDX-License-Identifier: Apache-2.0
#include "levylab/functional.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "levylab/errors.hpp"

namespace levylab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

// ---------------------------------------------------------------------------
// g-library
// ---------------------------------------------------------------------------

const char* jump_fn_name(JumpFn fn) {
    switch (fn) {
        case JumpFn::X: return "x";
        case JumpFn::X2: return "x2";
        case JumpFn::TX: return "tx";
        case JumpFn::AbsX: return "absx";
        case JumpFn::Log1pAbsX: return "log1pabsx";
    }
    return "?";
}

std::optional<JumpFn> jump_fn_from_name(std::string_view name) {
    if (name == "x") return JumpFn::X;
    if (name == "x2") return JumpFn::X2;
    if (name == "tx") return JumpFn::TX;
    if (name == "absx") return JumpFn::AbsX;
    if (name == "log1pabsx") return JumpFn::Log1pAbsX;
    return std::nullopt;
}

double apply_jump_fn(JumpFn fn, double t, double x) {
    switch (fn) {
        case JumpFn::X: return x;
        case JumpFn::X2: return x * x;
        case JumpFn::TX: return t * x;
        case JumpFn::AbsX: return std::abs(x);
        case JumpFn::Log1pAbsX: return std::log1p(std::abs(x));
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// AST builders
// ---------------------------------------------------------------------------

namespace ast {

namespace {
ExprPtr make(Expr::Node node, SourceSpan span = {}) {
    auto e = std::make_shared<Expr>();
    e->node = std::move(node);
    e->span = span;
    return e;
}
}  // namespace

ExprPtr constant(double v) { return make(Expr::Const{v}); }
ExprPtr count(std::string box) { return make(Expr::Count{std::move(box)}); }
ExprPtr sumjumps(std::string box, JumpFn fn) {
    return make(Expr::SumJumps{std::move(box), fn});
}
ExprPtr terminal() { return make(Expr::Terminal{}); }
ExprPtr neg(ExprPtr e) { return make(Expr::Neg{std::move(e)}); }
ExprPtr bin(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    return make(Expr::Bin{op, std::move(lhs), std::move(rhs)});
}
ExprPtr clamp(ExprPtr e, ExprPtr lo, ExprPtr hi) {
    return make(Expr::Clamp{std::move(e), std::move(lo), std::move(hi)});
}
ExprPtr exp(ExprPtr e) { return make(Expr::Exp{std::move(e)}); }
ExprPtr lnplus(ExprPtr e) { return make(Expr::LnPlus{std::move(e)}); }
ExprPtr indicator(ExprPtr e, ExprPtr threshold) {
    return make(Expr::Indicator{std::move(e), std::move(threshold)});
}

}  // namespace ast

// ---------------------------------------------------------------------------
// Functional: reader-set extraction
// ---------------------------------------------------------------------------

namespace {

void collect_reads(const ExprPtr& e, std::set<std::string>& boxes,
                   bool& terminal) {
    std::visit(
        overloaded{
            [&](const Expr::Const&) {},
            [&](const Expr::Count& n) { boxes.insert(n.box); },
            [&](const Expr::SumJumps& n) { boxes.insert(n.box); },
            [&](const Expr::Terminal&) { terminal = true; },
            [&](const Expr::Neg& n) { collect_reads(n.e, boxes, terminal); },
            [&](const Expr::Bin& n) {
                collect_reads(n.lhs, boxes, terminal);
                collect_reads(n.rhs, boxes, terminal);
            },
            [&](const Expr::Clamp& n) {
                collect_reads(n.e, boxes, terminal);
                collect_reads(n.lo, boxes, terminal);
                collect_reads(n.hi, boxes, terminal);
            },
            [&](const Expr::Exp& n) { collect_reads(n.e, boxes, terminal); },
            [&](const Expr::LnPlus& n) {
                collect_reads(n.e, boxes, terminal);
            },
            [&](const Expr::Indicator& n) {
                collect_reads(n.e, boxes, terminal);
                collect_reads(n.threshold, boxes, terminal);
            },
        },
        e->node);
}

}  // namespace

Functional::Functional(ExprPtr root) : root_(std::move(root)) {
    if (!root_) throw Error("functional must have a root expression");
    std::set<std::string> boxes;
    collect_reads(root_, boxes, uses_terminal_);
    boxes_.assign(boxes.begin(), boxes.end());
}

// ---------------------------------------------------------------------------
// Parser (recursive descent)
// ---------------------------------------------------------------------------

namespace {

enum class TokKind { Number, Ident, Punct, End };

struct Token {
    TokKind kind;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
        tok_.line = line_;
        tok_.column = col_;
        if (pos_ >= src_.size()) {
            tok_ = Token{TokKind::End, "", 0.0, line_, col_};
            return;
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            lex_number();
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_')) {
                ++pos_;
                ++col_;
            }
            tok_.kind = TokKind::Ident;
            tok_.text = std::string(src_.substr(start, pos_ - start));
        } else {
            tok_.kind = TokKind::Punct;
            tok_.text = std::string(1, c);
            ++pos_;
            ++col_;
        }
    }

    void lex_number() {
        std::size_t start = pos_;
        auto digits = [&]() {
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() &&
                std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                digits();
            } else {
                pos_ = mark;  // bare 'e' belongs to the next token
            }
        }
        std::string text(src_.substr(start, pos_ - start));
        col_ += static_cast<int>(pos_ - start);
        tok_.kind = TokKind::Number;
        tok_.text = text;
        tok_.number = std::stod(text);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_{};
};

class Parser {
  public:
    explicit Parser(std::string_view src) : lex_(src) {}

    ExprPtr parse() {
        ExprPtr e = expr();
        const Token& t = lex_.peek();
        if (t.kind != TokKind::End)
            fail("unexpected trailing input '" + t.text + "'", t);
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& msg, const Token& t) {
        throw ParseError(msg, t.line, t.column);
    }

    Token expect_punct(const std::string& p) {
        const Token& t = lex_.peek();
        if (t.kind != TokKind::Punct || t.text != p)
            fail("expected '" + p + "'", t);
        return lex_.take();
    }

    ExprPtr make(Expr::Node node, const Token& at) {
        auto e = std::make_shared<Expr>();
        e->node = std::move(node);
        e->span = SourceSpan{at.line, at.column};
        return e;
    }

    bool peek_punct(const std::string& p) {
        const Token& t = lex_.peek();
        return t.kind == TokKind::Punct && t.text == p;
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        while (peek_punct("+") || peek_punct("-")) {
            Token op = lex_.take();
            ExprPtr rhs = term();
            lhs = make(Expr::Bin{op.text == "+" ? BinOp::Add : BinOp::Sub,
                                 lhs, rhs},
                       op);
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (peek_punct("*") || peek_punct("/")) {
            Token op = lex_.take();
            ExprPtr rhs = factor();
            lhs = make(Expr::Bin{op.text == "*" ? BinOp::Mul : BinOp::Div,
                                 lhs, rhs},
                       op);
        }
        return lhs;
    }

    ExprPtr factor() {
        if (peek_punct("-")) {
            Token op = lex_.take();
            ExprPtr inner = factor();
            // fold a negated literal so print/parse stay mutually inverse
            if (auto* c = std::get_if<Expr::Const>(&inner->node))
                return make(Expr::Const{-c->value}, op);
            return make(Expr::Neg{inner}, op);
        }
        return primary();
    }

    std::string box_argument() {
        const Token& t = lex_.peek();
        if (t.kind != TokKind::Ident) fail("expected box name", t);
        return lex_.take().text;
    }

    ExprPtr primary() {
        const Token& t = lex_.peek();
        if (t.kind == TokKind::Number) {
            Token n = lex_.take();
            return make(Expr::Const{n.number}, n);
        }
        if (t.kind == TokKind::Punct && t.text == "(") {
            lex_.take();
            ExprPtr e = expr();
            expect_punct(")");
            return e;
        }
        if (t.kind != TokKind::Ident)
            fail(t.kind == TokKind::End ? "unexpected end of input"
                                        : "unexpected token '" + t.text + "'",
                 t);
        Token name = lex_.take();
        if (name.text == "X_T") return make(Expr::Terminal{}, name);
        if (name.text == "count") {
            expect_punct("(");
            std::string box = box_argument();
            expect_punct(")");
            return make(Expr::Count{box}, name);
        }
        if (name.text == "sumjumps") {
            expect_punct("(");
            std::string box = box_argument();
            expect_punct(",");
            const Token& g = lex_.peek();
            if (g.kind != TokKind::Ident) fail("expected jump function", g);
            auto fn = jump_fn_from_name(g.text);
            if (!fn)
                fail("unknown jump function '" + g.text +
                         "' (expected x, x2, tx, absx, log1pabsx)",
                     g);
            lex_.take();
            expect_punct(")");
            return make(Expr::SumJumps{box, *fn}, name);
        }
        if (name.text == "pow" || name.text == "min" || name.text == "max") {
            expect_punct("(");
            ExprPtr a = expr();
            expect_punct(",");
            ExprPtr b = expr();
            expect_punct(")");
            BinOp op = name.text == "pow" ? BinOp::Pow
                       : name.text == "min" ? BinOp::Min
                                            : BinOp::Max;
            return make(Expr::Bin{op, a, b}, name);
        }
        if (name.text == "clamp") {
            expect_punct("(");
            ExprPtr e = expr();
            expect_punct(",");
            ExprPtr lo = expr();
            expect_punct(",");
            ExprPtr hi = expr();
            expect_punct(")");
            return make(Expr::Clamp{e, lo, hi}, name);
        }
        if (name.text == "exp" || name.text == "lnplus") {
            expect_punct("(");
            ExprPtr e = expr();
            expect_punct(")");
            if (name.text == "exp") return make(Expr::Exp{e}, name);
            return make(Expr::LnPlus{e}, name);
        }
        if (name.text == "indicator") {
            expect_punct("(");
            ExprPtr e = expr();
            expect_punct(">");
            ExprPtr c = expr();
            expect_punct(")");
            return make(Expr::Indicator{e, c}, name);
        }
        fail("unknown identifier '" + name.text + "'", name);
    }

    Lexer lex_;
};

}  // namespace

Functional parse_functional(std::string_view source) {
    Parser parser(source);
    return Functional(parser.parse());
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

namespace {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print_expr(const ExprPtr& e, int parent_prec, std::string& out);

void print_binary(const Expr::Bin& b, int parent_prec, std::string& out) {
    const char* fn = nullptr;
    switch (b.op) {
        case BinOp::Pow: fn = "pow"; break;
        case BinOp::Min: fn = "min"; break;
        case BinOp::Max: fn = "max"; break;
        default: break;
    }
    if (fn) {
        out += fn;
        out += '(';
        print_expr(b.lhs, 0, out);
        out += ", ";
        print_expr(b.rhs, 0, out);
        out += ')';
        return;
    }
    int prec = (b.op == BinOp::Add || b.op == BinOp::Sub) ? 1 : 2;
    bool parens = prec < parent_prec;
    if (parens) out += '(';
    print_expr(b.lhs, prec, out);
    switch (b.op) {
        case BinOp::Add: out += " + "; break;
        case BinOp::Sub: out += " - "; break;
        case BinOp::Mul: out += " * "; break;
        case BinOp::Div: out += " / "; break;
        default: break;
    }
    print_expr(b.rhs, prec + 1, out);
    if (parens) out += ')';
}

void print_expr(const ExprPtr& e, int parent_prec, std::string& out) {
    std::visit(
        overloaded{
            [&](const Expr::Const& n) {
                if (n.value < 0.0 && parent_prec > 0) {
                    out += '(';
                    out += format_number(n.value);
                    out += ')';
                } else {
                    out += format_number(n.value);
                }
            },
            [&](const Expr::Count& n) { out += "count(" + n.box + ")"; },
            [&](const Expr::SumJumps& n) {
                out += "sumjumps(" + n.box + ", ";
                out += jump_fn_name(n.fn);
                out += ')';
            },
            [&](const Expr::Terminal&) { out += "X_T"; },
            [&](const Expr::Neg& n) {
                bool parens = parent_prec > 3;
                if (parens) out += '(';
                out += '-';
                print_expr(n.e, 3, out);
                if (parens) out += ')';
            },
            [&](const Expr::Bin& n) { print_binary(n, parent_prec, out); },
            [&](const Expr::Clamp& n) {
                out += "clamp(";
                print_expr(n.e, 0, out);
                out += ", ";
                print_expr(n.lo, 0, out);
                out += ", ";
                print_expr(n.hi, 0, out);
                out += ')';
            },
            [&](const Expr::Exp& n) {
                out += "exp(";
                print_expr(n.e, 0, out);
                out += ')';
            },
            [&](const Expr::LnPlus& n) {
                out += "lnplus(";
                print_expr(n.e, 0, out);
                out += ')';
            },
            [&](const Expr::Indicator& n) {
                out += "indicator(";
                print_expr(n.e, 0, out);
                out += " > ";
                print_expr(n.threshold, 0, out);
                out += ')';
            },
        },
        e->node);
}

}  // namespace

std::string to_string(const ExprPtr& e) {
    std::string out;
    print_expr(e, 0, out);
    return out;
}

std::string to_string(const Functional& f) { return to_string(f.root()); }

bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const Expr::Const& n) {
                return n.value == std::get<Expr::Const>(b->node).value;
            },
            [&](const Expr::Count& n) {
                return n.box == std::get<Expr::Count>(b->node).box;
            },
            [&](const Expr::SumJumps& n) {
                const auto& o = std::get<Expr::SumJumps>(b->node);
                return n.box == o.box && n.fn == o.fn;
            },
            [&](const Expr::Terminal&) { return true; },
            [&](const Expr::Neg& n) {
                return ast_equal(n.e, std::get<Expr::Neg>(b->node).e);
            },
            [&](const Expr::Bin& n) {
                const auto& o = std::get<Expr::Bin>(b->node);
                return n.op == o.op && ast_equal(n.lhs, o.lhs) &&
                       ast_equal(n.rhs, o.rhs);
            },
            [&](const Expr::Clamp& n) {
                const auto& o = std::get<Expr::Clamp>(b->node);
                return ast_equal(n.e, o.e) && ast_equal(n.lo, o.lo) &&
                       ast_equal(n.hi, o.hi);
            },
            [&](const Expr::Exp& n) {
                return ast_equal(n.e, std::get<Expr::Exp>(b->node).e);
            },
            [&](const Expr::LnPlus& n) {
                return ast_equal(n.e, std::get<Expr::LnPlus>(b->node).e);
            },
            [&](const Expr::Indicator& n) {
                const auto& o = std::get<Expr::Indicator>(b->node);
                return ast_equal(n.e, o.e) &&
                       ast_equal(n.threshold, o.threshold);
            },
        },
        a->node);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

// Primitive provider; the path evaluator and the phi(count) evaluator differ
// only here.
struct EvalSource {
    std::function<double(const std::string&)> count;
    std::function<double(const std::string&, JumpFn)> sumjumps;
    std::function<double()> terminal;
};

double check_finite(double v, const char* what, const SourceSpan& span) {
    if (!std::isfinite(v)) {
        std::string where =
            span.line > 0 ? " (line " + std::to_string(span.line) +
                                ", column " + std::to_string(span.column) + ")"
                          : "";
        throw EvalError(std::string("non-finite result in ") + what + where);
    }
    return v;
}

double eval_node(const ExprPtr& e, const EvalSource& src) {
    return std::visit(
        overloaded{
            [&](const Expr::Const& n) { return n.value; },
            [&](const Expr::Count& n) { return src.count(n.box); },
            [&](const Expr::SumJumps& n) { return src.sumjumps(n.box, n.fn); },
            [&](const Expr::Terminal&) { return src.terminal(); },
            [&](const Expr::Neg& n) { return -eval_node(n.e, src); },
            [&](const Expr::Bin& n) {
                double a = eval_node(n.lhs, src);
                double b = eval_node(n.rhs, src);
                switch (n.op) {
                    case BinOp::Add:
                        return check_finite(a + b, "+", e->span);
                    case BinOp::Sub:
                        return check_finite(a - b, "-", e->span);
                    case BinOp::Mul:
                        return check_finite(a * b, "*", e->span);
                    case BinOp::Div:
                        if (b == 0.0) {
                            SourceSpan s = e->span;
                            std::string where =
                                s.line > 0
                                    ? " at line " + std::to_string(s.line) +
                                          ", column " + std::to_string(s.column)
                                    : "";
                            throw EvalError("division by zero" + where);
                        }
                        return check_finite(a / b, "/", e->span);
                    case BinOp::Pow:
                        return check_finite(std::pow(a, b), "pow", e->span);
                    case BinOp::Min: return std::min(a, b);
                    case BinOp::Max: return std::max(a, b);
                }
                return 0.0;
            },
            [&](const Expr::Clamp& n) {
                double v = eval_node(n.e, src);
                double lo = eval_node(n.lo, src);
                double hi = eval_node(n.hi, src);
                if (lo > hi) throw EvalError("clamp bounds out of order");
                return std::min(std::max(v, lo), hi);
            },
            [&](const Expr::Exp& n) {
                return check_finite(std::exp(eval_node(n.e, src)), "exp",
                                    e->span);
            },
            [&](const Expr::LnPlus& n) {
                double v = eval_node(n.e, src);
                return v > 1.0 ? std::log(v) : 0.0;
            },
            [&](const Expr::Indicator& n) {
                return eval_node(n.e, src) > eval_node(n.threshold, src)
                           ? 1.0
                           : 0.0;
            },
        },
        e->node);
}

}  // namespace

double evaluate(const Functional& f, const JumpModel& model,
                const BoxEnv& boxes, const JumpPath& path) {
    auto box_of = [&boxes](const std::string& name) -> const BoxSet& {
        auto it = boxes.find(name);
        if (it == boxes.end())
            throw Error("unbound box name '" + name + "'");
        return it->second;
    };
    EvalSource src;
    src.count = [&](const std::string& name) {
        return static_cast<double>(count_in(path, box_of(name)));
    };
    src.sumjumps = [&](const std::string& name, JumpFn fn) {
        const BoxSet& box = box_of(name);
        double sum = 0.0;
        for (const Jump& j : path.jumps())
            if (box.contains(j.t, j.x)) sum += apply_jump_fn(fn, j.t, j.x);
        return sum;
    };
    src.terminal = [&]() { return terminal_value(model, path); };
    return eval_node(f.root(), src);
}

MeasurabilityReport measurability(const Functional& f, const JumpModel& model,
                                  const BoxEnv& boxes, const BoxSet& a) {
    MeasurabilityReport report;
    report.boxes = f.boxes_read();
    report.uses_terminal_value = f.uses_terminal_value();
    for (const std::string& name : report.boxes) {
        auto it = boxes.find(name);
        if (it == boxes.end())
            throw Error("unbound box name '" + name + "'");
        if (!BoxSet::subset(it->second, a)) report.offending.push_back(name);
    }
    if (report.uses_terminal_value && !covers_support(model, a))
        report.offending.push_back("X_T");
    report.certified = report.offending.empty();
    return report;
}

std::optional<std::function<double(std::int64_t)>> as_count_function(
    const Functional& f, const std::string& box_name) {
    if (f.uses_terminal_value()) return std::nullopt;
    for (const std::string& box : f.boxes_read())
        if (box != box_name) return std::nullopt;
    // reject sumjumps even over the right box: its value is not a function
    // of the count alone
    bool has_sumjumps = false;
    std::function<void(const ExprPtr&)> scan = [&](const ExprPtr& e) {
        std::visit(overloaded{
                       [&](const Expr::SumJumps&) { has_sumjumps = true; },
                       [&](const Expr::Neg& n) { scan(n.e); },
                       [&](const Expr::Bin& n) {
                           scan(n.lhs);
                           scan(n.rhs);
                       },
                       [&](const Expr::Clamp& n) {
                           scan(n.e);
                           scan(n.lo);
                           scan(n.hi);
                       },
                       [&](const Expr::Exp& n) { scan(n.e); },
                       [&](const Expr::LnPlus& n) { scan(n.e); },
                       [&](const Expr::Indicator& n) {
                           scan(n.e);
                           scan(n.threshold);
                       },
                       [](const auto&) {},
                   },
                   e->node);
    };
    scan(f.root());
    if (has_sumjumps) return std::nullopt;

    ExprPtr root = f.root();
    return [root](std::int64_t n) {
        EvalSource src;
        src.count = [n](const std::string&) {
            return static_cast<double>(n);
        };
        src.sumjumps = [](const std::string&, JumpFn) -> double {
            throw Error("count-function evaluation reached sumjumps");
        };
        src.terminal = []() -> double {
            throw Error("count-function evaluation reached X_T");
        };
        return eval_node(root, src);
    };
}

}  // namespace levylab
