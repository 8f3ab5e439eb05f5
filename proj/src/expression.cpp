#include "bangbang/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace bangbang {

struct Expression::Node {
    enum class Op { constant, var_x, var_y, add, sub, mul, neg, sin, cos };
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = v;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            skip_space();
            if (consume('+'))
                left = make(Node::Op::add, left, term());
            else if (consume('-'))
                left = make(Node::Op::sub, left, term());
            else
                return left;
        }
    }

    NodePtr term() {
        NodePtr left = factor();
        for (;;) {
            skip_space();
            if (consume('*'))
                left = make(Node::Op::mul, left, factor());
            else
                return left;
        }
    }

    NodePtr factor() {
        skip_space();
        if (consume('-')) return make(Node::Op::neg, factor());
        if (consume('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                    text_[pos_] == '.'))
            return number();
        if (match_word("sin")) {
            expect('(');
            NodePtr e = expr();
            expect(')');
            return make(Node::Op::sin, e);
        }
        if (match_word("cos")) {
            expect('(');
            NodePtr e = expr();
            expect(')');
            return make(Node::Op::cos, e);
        }
        if (match_word("x")) return make(Node::Op::var_x);
        if (match_word("y")) return make(Node::Op::var_y);
        fail("expected a number, x, y, sin, cos, or '('");
        return nullptr;
    }

    NodePtr number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{}) fail("malformed number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return make(Node::Op::constant, nullptr, nullptr, v);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_space();
        if (!consume(c)) fail(std::string("expected '") + c + "'");
    }

    bool match_word(std::string_view w) {
        skip_space();
        if (text_.substr(pos_, w.size()) != w) return false;
        const std::size_t after = pos_ + w.size();
        if (after < text_.size() && std::isalnum(static_cast<unsigned char>(text_[after])))
            return false;
        pos_ = after;
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ConfigError("expression error at position " + std::to_string(pos_ + 1) + ": " + msg +
                          " in \"" + std::string(text_) + "\"");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double eval_node(const Node& n, double x, double y) {
    switch (n.op) {
    case Node::Op::constant: return n.value;
    case Node::Op::var_x: return x;
    case Node::Op::var_y: return y;
    case Node::Op::add: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
    case Node::Op::sub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
    case Node::Op::mul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
    case Node::Op::neg: return -eval_node(*n.a, x, y);
    case Node::Op::sin: return std::sin(eval_node(*n.a, x, y));
    case Node::Op::cos: return std::cos(eval_node(*n.a, x, y));
    }
    return 0.0;
}

bool node_uses_y(const Node& n) {
    if (n.op == Node::Op::var_y) return true;
    if (n.a && node_uses_y(*n.a)) return true;
    if (n.b && node_uses_y(*n.b)) return true;
    return false;
}

} // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expression Expression::parse(std::string_view text) {
    Parser p(text);
    return Expression(p.run(), std::string(text));
}

double Expression::eval(double x, double y) const { return eval_node(*root_, x, y); }

bool Expression::uses_y() const { return node_uses_y(*root_); }

} // namespace bangbang
