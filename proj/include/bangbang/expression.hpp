#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "bangbang/errors.hpp"

namespace bangbang {

/// Arithmetic over constants, the coordinates x and y, sin, cos, +, -, *,
/// unary minus, and parentheses. Just enough to state targets, weights, and
/// bounds in a config file without an expression-library dependency.
class Expression {
public:
    static Expression parse(std::string_view text);

    double eval(double x, double y) const;

    /// True when the expression mentions the named coordinate.
    bool uses_y() const;

    /// The source text the expression was parsed from.
    const std::string& text() const { return text_; }

    struct Node;

private:
    Expression(std::shared_ptr<const Node> root, std::string text);

    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace bangbang
