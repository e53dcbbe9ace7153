#include "qcflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace qcflow {

namespace {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Func };

const char* const kFuncNames[] = {"log", "exp", "sqrt", "abs",
                                  "sin", "cos", "min",  "max"};

int func_arity(int f) { return f >= 6 ? 2 : 1; }

int func_index(std::string_view name) {
    for (int i = 0; i < 8; ++i)
        if (name == kFuncNames[i]) return i;
    return -1;
}

}  // namespace

struct ScalarExpression::Node {
    Kind kind;
    double value = 0.0;  // Const
    int index = 0;       // Var (0-based) or function id
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ScalarExpression::Node>;
using Node = ScalarExpression::Node;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

// Recursive-descent parser for the grammar
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := base ("^" base)?
//   base   := number | "x"digits | func "(" expr ("," expr)* ")"
//           | "(" expr ")" | "-" base
class Parser {
public:
    Parser(std::string_view text, int n) : text_(text), n_(n) {}

    NodePtr parse_full() {
        auto e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view text_;
    int n_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make(Kind::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = make(Kind::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            if (accept('*'))
                lhs = make(Kind::Mul, lhs, parse_factor());
            else if (accept('/'))
                lhs = make(Kind::Div, lhs, parse_factor());
            else
                return lhs;
        }
    }

    NodePtr parse_factor() {
        auto base = parse_base();
        if (accept('^')) return make(Kind::Pow, base, parse_base());
        return base;
    }

    NodePtr parse_base() {
        skip_ws();
        if (pos_ >= text_.size())
            throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return make(Kind::Neg, parse_base());
        }
        if (c == '(') {
            ++pos_;
            auto e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '.'))
            ++pos_;
        // optional exponent
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = save;  // 'e' belonged to an identifier context; reject
            }
        }
        double v;
        try {
            v = std::stod(std::string(text_.substr(start, pos_ - start)));
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
        auto n = std::make_shared<Node>();
        n->kind = Kind::Const;
        n->value = v;
        return n;
    }

    NodePtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_]))))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (name.size() >= 2 && name[0] == 'x' &&
            std::isdigit(static_cast<unsigned char>(name[1]))) {
            int idx = 0;
            for (std::size_t i = 1; i < name.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(name[i])))
                    throw ParseError("malformed variable '" + name + "'", start);
                idx = idx * 10 + (name[i] - '0');
            }
            if (idx < 1 || idx > n_)
                throw ParseError("variable '" + name + "' out of range for dimension " +
                                     std::to_string(n_),
                                 start);
            auto node = std::make_shared<Node>();
            node->kind = Kind::Var;
            node->index = idx - 1;
            return node;
        }
        int f = func_index(name);
        if (f < 0) throw ParseError("unknown identifier '" + name + "'", start);
        expect('(');
        auto a = parse_expr();
        NodePtr b;
        if (func_arity(f) == 2) {
            expect(',');
            b = parse_expr();
        }
        expect(')');
        auto node = make(Kind::Func, a, b);
        // make() default-initializes index; set the function id explicitly
        const_cast<Node*>(node.get())->index = f;
        return node;
    }
};

double eval_node(const Node& n, std::span<const double> x) {
    switch (n.kind) {
        case Kind::Const: return n.value;
        case Kind::Var: return x[static_cast<std::size_t>(n.index)];
        case Kind::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case Kind::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
        case Kind::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case Kind::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
        case Kind::Pow: return std::pow(eval_node(*n.a, x), eval_node(*n.b, x));
        case Kind::Neg: return -eval_node(*n.a, x);
        case Kind::Func: {
            double a = eval_node(*n.a, x);
            switch (n.index) {
                case 0: return std::log(a);
                case 1: return std::exp(a);
                case 2: return std::sqrt(a);
                case 3: return std::abs(a);
                case 4: return std::sin(a);
                case 5: return std::cos(a);
                case 6: return std::min(a, eval_node(*n.b, x));
                case 7: return std::max(a, eval_node(*n.b, x));
            }
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void print_node(const Node& n, std::ostringstream& out) {
    // Fully parenthesized; re-parsing yields an equivalent tree.
    switch (n.kind) {
        case Kind::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            std::string s = tmp.str();
            if (n.value < 0)
                out << "(" << s << ")";  // printed via Neg path below normally
            else
                out << s;
            break;
        }
        case Kind::Var: out << "x" << (n.index + 1); break;
        case Kind::Add: out << "("; print_node(*n.a, out); out << "+"; print_node(*n.b, out); out << ")"; break;
        case Kind::Sub: out << "("; print_node(*n.a, out); out << "-"; print_node(*n.b, out); out << ")"; break;
        case Kind::Mul: out << "("; print_node(*n.a, out); out << "*"; print_node(*n.b, out); out << ")"; break;
        case Kind::Div: out << "("; print_node(*n.a, out); out << "/"; print_node(*n.b, out); out << ")"; break;
        case Kind::Pow: out << "("; print_node(*n.a, out); out << "^"; print_node(*n.b, out); out << ")"; break;
        case Kind::Neg: out << "(-"; print_node(*n.a, out); out << ")"; break;
        case Kind::Func:
            out << kFuncNames[n.index] << "(";
            print_node(*n.a, out);
            if (n.b) { out << ","; print_node(*n.b, out); }
            out << ")";
            break;
    }
}

}  // namespace

ScalarExpression ScalarExpression::parse(std::string_view text, int n) {
    if (n < 1) throw ParseError("dimension must be >= 1", 0);
    Parser p(text, n);
    return ScalarExpression(p.parse_full(), n);
}

double ScalarExpression::eval(std::span<const double> x) const {
    return eval_node(*root_, x);
}

std::string ScalarExpression::print() const {
    std::ostringstream out;
    print_node(*root_, out);
    return out.str();
}

std::vector<ScalarExpression> parse_field_exprs(std::string_view text, int n) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '(') ++depth;
        else if (text[i] == ')') --depth;
        else if (text[i] == ';' && depth == 0) {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(text.substr(start));
    if (static_cast<int>(parts.size()) != n)
        throw ParseError("field has " + std::to_string(parts.size()) +
                             " components, expected " + std::to_string(n),
                         0);
    std::vector<ScalarExpression> exprs;
    exprs.reserve(parts.size());
    std::size_t offset = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        try {
            exprs.push_back(ScalarExpression::parse(parts[k], n));
        } catch (const ParseError& e) {
            throw ParseError(std::string("component ") + std::to_string(k + 1) +
                                 ": " + e.what(),
                             offset + e.pos);
        }
        offset += parts[k].size() + 1;
    }
    return exprs;
}

}  // namespace qcflow
