#include "kpzlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/core.h>

#include "kpzlab/grid.hpp"

namespace kpzlab {

struct Expression::Node {
    enum class Op { Const, Var, Neg, Abs, Exp, Add, Sub, Mul, Pow };
    Op op = Op::Const;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;

    double eval(double x) const
    {
        switch (op) {
        case Op::Const: return value;
        case Op::Var: return x;
        case Op::Neg: return -lhs->eval(x);
        case Op::Abs: return std::abs(lhs->eval(x));
        case Op::Exp: return std::exp(lhs->eval(x));
        case Op::Add: return lhs->eval(x) + rhs->eval(x);
        case Op::Sub: return lhs->eval(x) - rhs->eval(x);
        case Op::Mul: return lhs->eval(x) * rhs->eval(x);
        case Op::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0)
{
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->value = value;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse_all()
    {
        auto e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw InputError(fmt::format("expression '{}': {} at offset {}", s_, why, pos_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(std::string_view tok)
    {
        skip();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(std::string_view(&c, 1))) fail(fmt::format("expected '{}'", c));
    }

    NodePtr expr()
    {
        auto lhs = term();
        for (;;) {
            if (accept("+")) {
                lhs = make(Op::Add, lhs, term());
            } else if (accept("-")) {
                lhs = make(Op::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term()
    {
        auto lhs = unary();
        while (accept("*")) lhs = make(Op::Mul, lhs, unary());
        return lhs;
    }

    NodePtr unary()
    {
        if (accept("-")) return make(Op::Neg, unary());
        return power();
    }

    NodePtr power()
    {
        auto base = primary();
        if (accept("^")) return make(Op::Pow, base, unary());
        return base;
    }

    NodePtr primary()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (accept("(")) {
            auto e = expr();
            expect(')');
            return e;
        }
        // Inside |...| the closing bar is consumed by the caller, so a bar seen
        // here always opens a new absolute value.
        if (s_[pos_] == '|') {
            ++pos_;
            auto e = expr();
            expect('|');
            return make(Op::Abs, e);
        }
        if (accept("abs")) {
            expect('(');
            auto e = expr();
            expect(')');
            return make(Op::Abs, e);
        }
        if (accept("exp")) {
            expect('(');
            auto e = expr();
            expect(')');
            return make(Op::Exp, e);
        }
        if (accept("inf")) return make(Op::Const, nullptr, nullptr, std::numeric_limits<double>::infinity());
        if (accept("x")) return make(Op::Var);
        return number();
    }

    NodePtr number()
    {
        skip();
        const char* first = s_.data() + pos_;
        const char* last = s_.data() + s_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) fail("expected a number, 'x' or a function");
        pos_ += static_cast<std::size_t>(ptr - first);
        return make(Op::Const, nullptr, nullptr, v);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text)
{
    Expression e;
    e.text_ = std::string(text);
    e.root_ = Parser(e.text_).parse_all();
    return e;
}

double Expression::operator()(double x) const { return root_->eval(x); }

SampleTable::SampleTable(std::vector<double> xs, std::vector<double> fs)
    : xs_(std::move(xs)), fs_(std::move(fs))
{
    if (xs_.size() != fs_.size() || xs_.size() < 2) {
        throw InputError("sample table: need at least two (x, f) rows");
    }
    for (std::size_t k = 1; k < xs_.size(); ++k) {
        if (!(xs_[k] > xs_[k - 1])) {
            throw InputError(fmt::format("sample table: x not strictly increasing at row {}", k));
        }
    }
    for (std::size_t k = 0; k < fs_.size(); ++k) {
        if (std::isnan(fs_[k]) || fs_[k] == std::numeric_limits<double>::infinity()) {
            throw InputError(fmt::format("sample table: invalid f value at row {}", k));
        }
    }
}

SampleTable SampleTable::from_csv_text(std::string_view text)
{
    std::vector<double> xs;
    std::vector<double> fs;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw InputError(fmt::format("sample table: line {} has no comma", lineno));
        }
        auto parse = [&](std::string field, double& out) {
            field.erase(0, field.find_first_not_of(" \t\r"));
            field.erase(field.find_last_not_of(" \t\r") + 1);
            if (field == "-inf") {
                out = -std::numeric_limits<double>::infinity();
                return true;
            }
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
            return ec == std::errc() && ptr == field.data() + field.size();
        };
        double x = 0.0;
        double f = 0.0;
        const bool ok = parse(line.substr(0, comma), x) && parse(line.substr(comma + 1), f);
        if (!ok) {
            if (xs.empty()) continue;  // header row
            throw InputError(fmt::format("sample table: cannot parse line {}", lineno));
        }
        xs.push_back(x);
        fs.push_back(f);
    }
    return SampleTable(std::move(xs), std::move(fs));
}

SampleTable SampleTable::from_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("sample table: cannot open '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return from_csv_text(buf.str());
}

double SampleTable::operator()(double x) const
{
    if (x < xs_.front() || x > xs_.back()) {
        throw InputError(fmt::format("sample table: x = {} outside [{}, {}]", x, xs_.front(), xs_.back()));
    }
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
    if (hi >= xs_.size()) return fs_.back();
    const std::size_t lo = hi - 1;
    if (std::isinf(fs_[lo]) || std::isinf(fs_[hi])) {
        // -inf propagates to the whole cell except the finite endpoint itself.
        if (x == xs_[lo] && !std::isinf(fs_[lo])) return fs_[lo];
        return -std::numeric_limits<double>::infinity();
    }
    const double w = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return (1.0 - w) * fs_[lo] + w * fs_[hi];
}

}  // namespace kpzlab
