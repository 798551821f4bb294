#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "fixsynth/program.hpp"

namespace fixsynth {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        size_t j = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.kind = Tok::Ident;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() &&
                                                                      std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            t.kind = Tok::Number;
        } else if (std::string_view("()[],;=+-*/").find(c) != std::string_view::npos) {
            j = i + 1;
            t.kind = Tok::Punct;
        } else {
            throw ParseError(ErrorCode::ParseError, std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = std::string(src.substr(i, j - i));
        advance(j - i);
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

bool is_reserved(const std::string& s) {
    return s == "input" || s == "state" || s == "const" || s == "output" || s == "in" || s == "sin" ||
           s == "cos" || s == "recip";
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    Program run() {
        while (peek().kind != Tok::End) statement();
        if (prog_.outputs().empty()) {
            throw ParseError(ErrorCode::EmptyOutputs, "program declares no outputs", peek().line, peek().col);
        }
        return std::move(prog_);
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg, ErrorCode code = ErrorCode::ParseError) {
        throw ParseError(code, msg, t.line, t.col);
    }

    bool is_punct(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }

    void expect(const char* p) {
        if (!is_punct(p)) fail(peek(), std::string("expected '") + p + "'" + found());
        ++pos_;
    }

    std::string found() const {
        if (peek().kind == Tok::End) return " but reached end of input";
        return " but found '" + peek().text + "'";
    }

    std::string name() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) fail(t, "expected identifier" + found());
        if (is_reserved(t.text)) fail(t, "'" + t.text + "' is a reserved word");
        ++pos_;
        return t.text;
    }

    void declare(const Token& at, const std::string& n) {
        if (prog_.find(n)) fail(at, "duplicate definition of '" + n + "'", ErrorCode::DuplicateDefinition);
    }

    double number() {
        const Token& t = peek();
        if (t.kind != Tok::Number) fail(t, "expected number" + found());
        double v = 0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) fail(t, "malformed number '" + t.text + "'");
        ++pos_;
        return v;
    }

    double signed_number() {
        if (is_punct("-")) {
            ++pos_;
            return -number();
        }
        if (is_punct("+")) ++pos_;
        return number();
    }

    void statement() {
        const Token& head = peek();
        if (head.kind != Tok::Ident) fail(head, "expected statement" + found());
        if (head.text == "input" || head.text == "state") {
            ++pos_;
            const Token& at = peek();
            const std::string n = name();
            declare(at, n);
            if (peek().kind != Tok::Ident || peek().text != "in") fail(peek(), "expected 'in'" + found());
            ++pos_;
            bool lo_closed = false;
            if (is_punct("[")) {
                lo_closed = true;
            } else if (!is_punct("(")) {
                fail(peek(), "expected '[' or '('" + found());
            }
            const Token& itv = take();
            const double lo = signed_number();
            expect(",");
            const double hi = signed_number();
            bool hi_closed = false;
            if (is_punct("]")) {
                hi_closed = true;
            } else if (!is_punct(")")) {
                fail(peek(), "expected ']' or ')'" + found());
            }
            ++pos_;
            try {
                prog_.add_input(n, Interval::make(lo, hi, lo_closed, hi_closed), head.text == "state");
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                fail(itv, e.what());
            }
        } else if (head.text == "const") {
            ++pos_;
            const Token& at = peek();
            const std::string n = name();
            declare(at, n);
            expect("=");
            prog_.add_const(n, signed_number());
        } else if (head.text == "output") {
            ++pos_;
            const Token& at = peek();
            const std::string n = name();
            if (!prog_.find(n)) fail(at, "unknown output '" + n + "'", ErrorCode::UnknownIdentifier);
            try {
                prog_.add_output(n);
            } catch (const Error& e) {
                fail(at, e.what(), e.code());
            }
        } else {
            const Token& at = peek();
            const std::string n = name();
            declare(at, n);
            expect("=");
            ExprPtr e = expr();
            prog_.add_def(n, std::move(e));
        }
        expect(";");
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        while (is_punct("+") || is_punct("-")) {
            const BinaryOp op = take().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            lhs = Expr::binary(op, lhs, term());
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = unary();
        while (is_punct("*") || is_punct("/")) {
            const BinaryOp op = take().text == "*" ? BinaryOp::Mul : BinaryOp::Div;
            lhs = Expr::binary(op, lhs, unary());
        }
        return lhs;
    }

    ExprPtr unary() {
        if (is_punct("-")) {
            ++pos_;
            // a literal directly after '-' is a negative constant
            if (peek().kind == Tok::Number) return Expr::constant(-number());
            return Expr::unary(UnaryOp::Neg, unary());
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = peek();
        if (t.kind == Tok::Number) return Expr::constant(number());
        if (is_punct("(")) {
            ++pos_;
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        if (t.kind != Tok::Ident) fail(t, "expected expression" + found());
        if (t.text == "sin" || t.text == "cos" || t.text == "recip") {
            ++pos_;
            const UnaryOp op = t.text == "sin" ? UnaryOp::Sin : t.text == "cos" ? UnaryOp::Cos : UnaryOp::Recip;
            expect("(");
            ExprPtr e = expr();
            expect(")");
            return Expr::unary(op, e);
        }
        if (is_reserved(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
        const auto idx = prog_.find(t.text);
        if (!idx) fail(t, "'" + t.text + "' used before definition", ErrorCode::UseBeforeDef);
        ++pos_;
        return Expr::reference(*idx);
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    Program prog_;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).run(); }

}  // namespace fixsynth
