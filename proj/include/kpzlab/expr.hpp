#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace kpzlab {

/**
 * Closed-form function of one variable x.
 *
 * Grammar (whitespace-insensitive):
 *   expr    := term (('+' | '-') term)*
 *   term    := unary ('*' unary)*
 *   unary   := '-' unary | power
 *   power   := primary ('^' unary)?
 *   primary := number | 'inf' | 'x' | '|' expr '|' | 'abs(' expr ')'
 *            | 'exp(' expr ')' | '(' expr ')'
 *
 * "-inf" denotes the constant minus infinity (zero mass after exp).
 */
class Expression {
public:
    static Expression parse(std::string_view text);

    double operator()(double x) const;
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

/// Piecewise-linear function through (x_k, f_k) samples with increasing x_k.
/// Evaluation outside [x_front, x_back] throws InputError.
class SampleTable {
public:
    SampleTable(std::vector<double> xs, std::vector<double> fs);

    /// Two-column CSV (x, f); blank lines and lines starting with '#' are
    /// skipped, as is a non-numeric header row.
    static SampleTable from_csv_text(std::string_view text);
    static SampleTable from_csv_file(const std::string& path);

    double operator()(double x) const;
    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }
    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& fs() const { return fs_; }

private:
    std::vector<double> xs_;
    std::vector<double> fs_;
};

}  // namespace kpzlab
