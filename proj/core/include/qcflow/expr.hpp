#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qcflow/types.hpp"

namespace qcflow {

/// Parsed scalar expression over variables x1..xn, constants and the
/// operators + - * / ^ plus the functions log, exp, sqrt, abs, sin, cos,
/// min, max.  Immutable after parsing; print() round-trips through parse().
class ScalarExpression {
public:
    /// Throws ParseError on syntax errors; `n` bounds the variable indices.
    static ScalarExpression parse(std::string_view text, int n);

    double eval(std::span<const double> x) const;
    std::string print() const;
    int dimension() const { return n_; }

    struct Node;

private:
    ScalarExpression(std::shared_ptr<const Node> root, int n)
        : root_(std::move(root)), n_(n) {}
    std::shared_ptr<const Node> root_;
    int n_ = 0;
};

/// Splits "expr; expr; ..." on top-level semicolons and parses each
/// component.  Throws ParseError if the component count differs from n.
std::vector<ScalarExpression> parse_field_exprs(std::string_view text, int n);

}  // namespace qcflow
