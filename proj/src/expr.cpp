#include "expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <utility>

#include "error.hpp"

namespace lyapnet {

namespace {

enum class TokKind { number, variable, ident, plus, minus, star, slash, caret, lparen, rparen, separator, end };

struct Token {
    TokKind kind;
    double number = 0.0;
    int var_index = 0;      // 1-based as written
    std::string ident;
    int line = 1;
    int col = 1;
};

[[noreturn]] void parse_fail(const Token& at, const std::string& what) {
    raise(ErrorCode::parse, "parse error at line " + std::to_string(at.line) + ", column " +
                                std::to_string(at.col) + ": " + what);
}

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            Token t = next();
            out.push_back(t);
            if (t.kind == TokKind::end) break;
        }
        return out;
    }

private:
    Token next() {
        skip_blanks();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = TokKind::end;
            return t;
        }
        const char c = src_[pos_];
        if (c == '\n' || c == ';') {
            t.kind = TokKind::separator;
            advance();
            return t;
        }
        // U+2212 (minus sign) is accepted as '-'
        if (c == '\xE2' && src_.compare(pos_, 3, "\xE2\x88\x92") == 0) {
            t.kind = TokKind::minus;
            advance();
            advance();
            advance();
            return t;
        }
        switch (c) {
            case '+': t.kind = TokKind::plus; advance(); return t;
            case '-': t.kind = TokKind::minus; advance(); return t;
            case '*': t.kind = TokKind::star; advance(); return t;
            case '/': t.kind = TokKind::slash; advance(); return t;
            case '^': t.kind = TokKind::caret; advance(); return t;
            case '(': t.kind = TokKind::lparen; advance(); return t;
            case ')': t.kind = TokKind::rparen; advance(); return t;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return lex_number(t);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return lex_word(t);
        }
        parse_fail(t, std::string("unexpected character '") + c + "'");
    }

    Token lex_number(Token t) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            advance();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
            } else {
                // not an exponent after all (e.g. "2*exp(x1)" never reaches
                // here, but "2e" alone would); rewind
                pos_ = mark;
            }
        }
        const std::string text = src_.substr(start, pos_ - start);
        if (text == ".") parse_fail(t, "malformed number");
        char* endp = nullptr;
        t.number = std::strtod(text.c_str(), &endp);
        if (endp != text.c_str() + text.size()) parse_fail(t, "malformed number '" + text + "'");
        t.kind = TokKind::number;
        return t;
    }

    Token lex_word(Token t) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            advance();
        }
        const std::string word = src_.substr(start, pos_ - start);
        if (word.size() >= 2 && (word[0] == 'x' || word[0] == 'X')) {
            bool digits = true;
            for (std::size_t i = 1; i < word.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(word[i]))) digits = false;
            }
            if (digits) {
                t.kind = TokKind::variable;
                int idx = 0;
                auto [p, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), idx);
                t.var_index = (ec == std::errc() && p == word.data() + word.size()) ? idx : -1;
                return t;
            }
        }
        t.kind = TokKind::ident;
        t.ident = word;
        return t;
    }

    void skip_blanks() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (pos_ < src_.size() && src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

ExprPtr make_node(Expr node) { return std::make_shared<const Expr>(std::move(node)); }

ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs) {
    Expr e;
    e.kind = kind;
    e.lhs = std::move(lhs);
    e.rhs = std::move(rhs);
    return make_node(std::move(e));
}

class Parser {
public:
    Parser(std::vector<Token> tokens, int n) : tokens_(std::move(tokens)), n_(n) {}

    std::vector<ExprPtr> components() {
        std::vector<ExprPtr> out;
        skip_separators();
        while (peek().kind != TokKind::end) {
            out.push_back(expression());
            const Token& t = peek();
            if (t.kind == TokKind::separator) {
                skip_separators();
            } else if (t.kind != TokKind::end) {
                parse_fail(t, "expected end of expression");
            }
        }
        return out;
    }

    ExprPtr single() {
        skip_separators();
        ExprPtr e = expression();
        skip_separators();
        if (peek().kind != TokKind::end) parse_fail(peek(), "trailing input after expression");
        return e;
    }

private:
    ExprPtr expression() {
        ExprPtr lhs = term();
        while (true) {
            const Token& t = peek();
            if (t.kind == TokKind::plus || t.kind == TokKind::minus) {
                ++pos_;
                lhs = make_binary(t.kind == TokKind::plus ? ExprKind::add : ExprKind::sub,
                                  std::move(lhs), term());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (true) {
            const Token& t = peek();
            if (t.kind == TokKind::star || t.kind == TokKind::slash) {
                ++pos_;
                lhs = make_binary(t.kind == TokKind::star ? ExprKind::mul : ExprKind::div,
                                  std::move(lhs), factor());
            } else {
                return lhs;
            }
        }
    }

    // factor handles unary minus; '^' binds tighter and is right-associative.
    ExprPtr factor() {
        const Token& t = peek();
        if (t.kind == TokKind::minus) {
            ++pos_;
            Expr e;
            e.kind = ExprKind::neg;
            e.lhs = factor();
            return make_node(std::move(e));
        }
        ExprPtr base = atom();
        if (peek().kind == TokKind::caret) {
            ++pos_;
            return make_binary(ExprKind::pow, std::move(base), factor());
        }
        return base;
    }

    ExprPtr atom() {
        const Token& t = peek();
        switch (t.kind) {
            case TokKind::number: {
                ++pos_;
                Expr e;
                e.kind = ExprKind::constant;
                e.value = t.number;
                return make_node(std::move(e));
            }
            case TokKind::variable: {
                ++pos_;
                if (t.var_index < 1 || t.var_index > n_) {
                    raise(ErrorCode::unknown_variable,
                          "unknown variable x" + std::to_string(t.var_index) + " at line " +
                              std::to_string(t.line) + ", column " + std::to_string(t.col) +
                              " (dimension is " + std::to_string(n_) + ")");
                }
                Expr e;
                e.kind = ExprKind::variable;
                e.var_index = t.var_index - 1;
                return make_node(std::move(e));
            }
            case TokKind::ident: {
                ++pos_;
                CallFn fn;
                if (t.ident == "sin") fn = CallFn::sin;
                else if (t.ident == "cos") fn = CallFn::cos;
                else if (t.ident == "exp") fn = CallFn::exp;
                else if (t.ident == "ln") fn = CallFn::ln;
                else if (t.ident == "abs") fn = CallFn::abs;
                else parse_fail(t, "unknown function '" + t.ident + "'");
                expect(TokKind::lparen, "expected '(' after function name");
                ExprPtr arg = expression();
                expect(TokKind::rparen, "expected ')'");
                Expr e;
                e.kind = ExprKind::call;
                e.fn = fn;
                e.lhs = std::move(arg);
                return make_node(std::move(e));
            }
            case TokKind::lparen: {
                ++pos_;
                ExprPtr e = expression();
                expect(TokKind::rparen, "expected ')'");
                return e;
            }
            default:
                parse_fail(t, "expected a number, variable, function, or '('");
        }
    }

    void expect(TokKind kind, const std::string& what) {
        if (peek().kind != kind) parse_fail(peek(), what);
        ++pos_;
    }

    const Token& peek() const { return tokens_[pos_]; }

    void skip_separators() {
        while (peek().kind == TokKind::separator) ++pos_;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int n_;
};

// Exact for small integral exponents (repeated multiplication); this also
// keeps negative bases well-defined for integer powers.
double eval_pow(double base, double exponent) {
    const double r = std::round(exponent);
    if (r == exponent && std::abs(r) <= 32.0) {
        const int e = static_cast<int>(r);
        const int mag = e < 0 ? -e : e;
        double acc = 1.0;
        for (int i = 0; i < mag; ++i) acc *= base;
        return e < 0 ? 1.0 / acc : acc;
    }
    return std::pow(base, exponent);
}

int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::add:
        case ExprKind::sub: return 1;
        case ExprKind::mul:
        case ExprKind::div: return 2;
        case ExprKind::neg: return 3;
        case ExprKind::pow: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

void print_rec(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        print_rec(child, out);
        out += ')';
    } else {
        print_rec(child, out);
    }
}

void print_rec(const Expr& e, std::string& out) {
    switch (e.kind) {
        case ExprKind::constant:
            out += format_number(e.value);
            break;
        case ExprKind::variable:
            out += 'x';
            out += std::to_string(e.var_index + 1);
            break;
        case ExprKind::neg:
            out += '-';
            print_child(*e.lhs, 3, out);
            break;
        case ExprKind::add:
        case ExprKind::sub:
            print_child(*e.lhs, 1, out);
            out += e.kind == ExprKind::add ? " + " : " - ";
            print_child(*e.rhs, 2, out);
            break;
        case ExprKind::mul:
        case ExprKind::div:
            print_child(*e.lhs, 2, out);
            out += e.kind == ExprKind::mul ? "*" : "/";
            print_child(*e.rhs, 3, out);
            break;
        case ExprKind::pow:
            print_child(*e.lhs, 5, out);
            out += '^';
            print_child(*e.rhs, 3, out);
            break;
        case ExprKind::call:
            switch (e.fn) {
                case CallFn::sin: out += "sin"; break;
                case CallFn::cos: out += "cos"; break;
                case CallFn::exp: out += "exp"; break;
                case CallFn::ln: out += "ln"; break;
                case CallFn::abs: out += "abs"; break;
            }
            out += '(';
            print_rec(*e.lhs, out);
            out += ')';
            break;
    }
}

}  // namespace

ExprPtr parse_expression(const std::string& source, int n) {
    Parser parser(Lexer(source).run(), n);
    return parser.single();
}

std::vector<ExprPtr> parse_components(const std::string& source, int n) {
    Parser parser(Lexer(source).run(), n);
    std::vector<ExprPtr> comps = parser.components();
    if (static_cast<int>(comps.size()) != n) {
        raise(ErrorCode::arity, "expected " + std::to_string(n) + " component expressions, got " +
                                    std::to_string(comps.size()));
    }
    return comps;
}

double eval_expr(const Expr& e, std::span<const double> x) {
    switch (e.kind) {
        case ExprKind::constant: return e.value;
        case ExprKind::variable: return x[static_cast<std::size_t>(e.var_index)];
        case ExprKind::neg: return -eval_expr(*e.lhs, x);
        case ExprKind::add: return eval_expr(*e.lhs, x) + eval_expr(*e.rhs, x);
        case ExprKind::sub: return eval_expr(*e.lhs, x) - eval_expr(*e.rhs, x);
        case ExprKind::mul: return eval_expr(*e.lhs, x) * eval_expr(*e.rhs, x);
        case ExprKind::div: return eval_expr(*e.lhs, x) / eval_expr(*e.rhs, x);
        case ExprKind::pow: return eval_pow(eval_expr(*e.lhs, x), eval_expr(*e.rhs, x));
        case ExprKind::call: {
            const double v = eval_expr(*e.lhs, x);
            switch (e.fn) {
                case CallFn::sin: return std::sin(v);
                case CallFn::cos: return std::cos(v);
                case CallFn::exp: return std::exp(v);
                case CallFn::ln: return std::log(v);
                case CallFn::abs: return std::abs(v);
            }
            return 0.0;
        }
    }
    return 0.0;
}

std::string pretty_print(const Expr& e) {
    std::string out;
    print_rec(e, out);
    return out;
}

}  // namespace lyapnet
