#pragma once

#include "grs/types.hpp"

#include <cctype>
#include <span>

namespace grs {

/// Compiled closed-form expression over named coordinates. The grammar covers
/// what metric entries and toy dynamics need:
///
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := ('-' | '+') unary | power
///   power  := primary ('^' unary)?          right-associative
///   primary:= number | 'pi' | variable | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
///
/// Unary minus binds looser than '^', so -x^2 is -(x^2).
class Expr {
public:
    static Expr parse(const std::string& text, const std::vector<std::string>& variables) {
        Parser parser(text, variables);
        Expr e;
        e.nodes_ = parser.run();
        e.text_ = text;
        return e;
    }

    double eval(std::span<const double> values) const {
        std::vector<double> stack;
        stack.reserve(nodes_.size());
        for (const Node& node : nodes_) {
            switch (node.op) {
                case Op::Const:
                    stack.push_back(node.value);
                    break;
                case Op::Var:
                    if (node.index >= static_cast<int>(values.size())) {
                        throw ConfigError("Expr: not enough coordinate values supplied");
                    }
                    stack.push_back(values[static_cast<std::size_t>(node.index)]);
                    break;
                case Op::Neg:
                    stack.back() = -stack.back();
                    break;
                case Op::Sin:
                    stack.back() = std::sin(stack.back());
                    break;
                case Op::Cos:
                    stack.back() = std::cos(stack.back());
                    break;
                default: {
                    const double b = stack.back();
                    stack.pop_back();
                    double& a = stack.back();
                    if (node.op == Op::Add) a += b;
                    else if (node.op == Op::Sub) a -= b;
                    else if (node.op == Op::Mul) a *= b;
                    else if (node.op == Op::Div) a /= b;
                    else a = std::pow(a, b);
                }
            }
        }
        return stack.back();
    }

    const std::string& text() const { return text_; }

private:
    enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos };

    struct Node {
        Op op;
        double value = 0.0;
        int index = -1;
    };

    // Recursive-descent parse straight into postfix order.
    class Parser {
    public:
        Parser(const std::string& text, const std::vector<std::string>& variables)
            : text_(text), variables_(variables) {}

        std::vector<Node> run() {
            parse_expr();
            skip_ws();
            if (pos_ != text_.size()) fail("unexpected trailing input");
            return std::move(out_);
        }

    private:
        void parse_expr() {
            parse_term();
            for (;;) {
                skip_ws();
                if (consume('+')) {
                    parse_term();
                    out_.push_back({Op::Add});
                } else if (consume('-')) {
                    parse_term();
                    out_.push_back({Op::Sub});
                } else {
                    return;
                }
            }
        }

        void parse_term() {
            parse_unary();
            for (;;) {
                skip_ws();
                if (consume('*')) {
                    parse_unary();
                    out_.push_back({Op::Mul});
                } else if (consume('/')) {
                    parse_unary();
                    out_.push_back({Op::Div});
                } else {
                    return;
                }
            }
        }

        void parse_unary() {
            skip_ws();
            if (consume('-')) {
                parse_unary();
                out_.push_back({Op::Neg});
                return;
            }
            if (consume('+')) {
                parse_unary();
                return;
            }
            parse_power();
        }

        void parse_power() {
            parse_primary();
            skip_ws();
            if (consume('^')) {
                parse_unary();
                out_.push_back({Op::Pow});
            }
        }

        void parse_primary() {
            skip_ws();
            if (pos_ >= text_.size()) fail("unexpected end of expression");
            const char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                parse_number();
                return;
            }
            if (consume('(')) {
                parse_expr();
                expect(')');
                return;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                const std::string name = parse_identifier();
                if (name == "pi") {
                    out_.push_back({Op::Const, M_PI});
                    return;
                }
                if (name == "sin" || name == "cos") {
                    skip_ws();
                    expect('(');
                    parse_expr();
                    expect(')');
                    out_.push_back({name == "sin" ? Op::Sin : Op::Cos});
                    return;
                }
                for (std::size_t i = 0; i < variables_.size(); ++i) {
                    if (variables_[i] == name) {
                        Node node{Op::Var};
                        node.index = static_cast<int>(i);
                        out_.push_back(node);
                        return;
                    }
                }
                fail("unknown identifier '" + name + "'");
            }
            fail(std::string("unexpected character '") + c + "'");
        }

        void parse_number() {
            std::size_t consumed = 0;
            double value = 0.0;
            try {
                value = std::stod(text_.substr(pos_), &consumed);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += consumed;
            out_.push_back({Op::Const, value});
        }

        std::string parse_identifier() {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            return text_.substr(start, pos_ - start);
        }

        void skip_ws() {
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
            skip_ws();
            if (!consume(c)) fail(std::string("expected '") + c + "'");
        }

        [[noreturn]] void fail(const std::string& why) {
            throw ConfigError("expression '" + text_ + "' at position " + std::to_string(pos_) +
                              ": " + why);
        }

        const std::string& text_;
        const std::vector<std::string>& variables_;
        std::size_t pos_ = 0;
        std::vector<Node> out_;
    };

    std::vector<Node> nodes_;
    std::string text_;
};

}  // namespace grs
