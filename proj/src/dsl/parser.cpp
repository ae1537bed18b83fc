#include "arn/dsl/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <vector>

namespace arn::dsl {

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Eq, Arrow, End };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    void advance() {
        if (pos < src.size() && src[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos < src.size()) {
            char c = src[pos];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            int l = line, co = col;
            if (c == '(' && pos + 1 < src.size() && src[pos + 1] == '*') {
                // SML comment (* ... *), possibly nested
                advance();
                advance();
                int depth = 1;
                while (pos + 1 < src.size() && depth > 0) {
                    if (src[pos] == '(' && src[pos + 1] == '*') {
                        ++depth;
                        advance();
                        advance();
                    } else if (src[pos] == '*' && src[pos + 1] == ')') {
                        --depth;
                        advance();
                        advance();
                    } else {
                        advance();
                    }
                }
                if (depth > 0) throw ParseError("unterminated comment", l, co);
                continue;
            }
            if (c == '(') {
                out.push_back({Tok::LParen, "(", l, co});
                advance();
            } else if (c == ')') {
                out.push_back({Tok::RParen, ")", l, co});
                advance();
            } else if (c == ',') {
                out.push_back({Tok::Comma, ",", l, co});
                advance();
            } else if (c == '=') {
                advance();
                if (pos < src.size() && src[pos] == '>') {
                    advance();
                    out.push_back({Tok::Arrow, "=>", l, co});
                } else {
                    out.push_back({Tok::Eq, "=", l, co});
                }
            } else if (c == '+' || c == '*' || c == '/' || c == '-') {
                out.push_back({Tok::Ident, std::string(1, c), l, co});
                advance();
            } else if (c == '~' || std::isdigit(static_cast<unsigned char>(c))) {
                std::string num;
                if (c == '~') {
                    num += '~';
                    advance();
                    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
                        throw ParseError("`~` must start a numeric literal", l, co);
                }
                auto digits = [&] {
                    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                        num += src[pos];
                        advance();
                    }
                };
                digits();
                if (pos < src.size() && src[pos] == '.') {
                    num += '.';
                    advance();
                    digits();
                }
                if (pos < src.size() && (src[pos] == 'E' || src[pos] == 'e')) {
                    num += 'E';
                    advance();
                    if (pos < src.size() && src[pos] == '~') {
                        num += '~';
                        advance();
                    }
                    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
                        throw ParseError("malformed exponent", line, col);
                    digits();
                }
                out.push_back({Tok::Number, num, l, co});
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (pos < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
                    id += src[pos];
                    advance();
                }
                out.push_back({Tok::Ident, id, l, co});
            } else {
                throw ParseError(std::string("unexpected character `") + c + "`", l, co);
            }
        }
        out.push_back({Tok::End, "<eof>", line, col});
        return out;
    }
};

double literal_value(const std::string& lexeme, int line, int col) {
    std::string s;
    s.reserve(lexeme.size());
    for (char c : lexeme) s += (c == '~') ? '-' : c;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (!end || *end != '\0') throw ParseError("bad numeric literal `" + lexeme + "`", line, col);
    return v;
}

bool is_keyword(const std::string& s) {
    static const std::set<std::string> kw = {"fun", "case", "of", "let", "in", "end",
                                            "cons", "bias", "+", "-", "*", "/"};
    return kw.count(s) > 0;
}

struct Parser {
    std::vector<Token> toks;
    size_t pos = 0;
    std::vector<std::string> scope;    // bound value variables (scalar or list)
    std::vector<std::string> fnScope;  // let-bound function names

    const Token& cur() const { return toks[pos]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + ", got `" + cur().text + "`", cur().line, cur().col);
    }

    bool at_ident(const char* s) const { return cur().kind == Tok::Ident && cur().text == s; }

    Token eat(Tok k, const char* what) {
        if (cur().kind != k) fail(std::string("expected ") + what);
        return toks[pos++];
    }

    Token eat_ident(const char* s) {
        if (!at_ident(s)) fail(std::string("expected `") + s + "`");
        return toks[pos++];
    }

    bool in_scope(const std::string& name) const {
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (*it == name) return true;
        return false;
    }

    bool is_fn(const std::string& name) const {
        for (auto it = fnScope.rbegin(); it != fnScope.rend(); ++it)
            if (*it == name) return true;
        return false;
    }

    static int act_of(const std::string& s, ActFn& fn) {
        if (s == "tanh") fn = ActFn::Tanh;
        else if (s == "relu") fn = ActFn::Relu;
        else if (s == "srelu") fn = ActFn::Srelu;
        else if (s == "sigmoid") fn = ActFn::Sigmoid;
        else return 0;
        return 1;
    }

    static int lc_of(const std::string& s, int line, int col) {
        if (s.size() < 3 || s.compare(0, 2, "lc") != 0) return -1;
        for (size_t i = 2; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
        int idx = std::atoi(s.c_str() + 2);
        if (idx > 4) throw ParseError("weight mapping index out of range in `" + s + "`", line, col);
        return idx;
    }

    NeuronProgram parse_program() {
        NeuronProgram p;
        if (at_ident("fun")) {
            ++pos;
            p.name = eat(Tok::Ident, "function name").text;
            eat(Tok::LParen, "`(`");
            const auto& expected = param_names();
            for (size_t i = 0; i < expected.size(); ++i) {
                Token t = eat(Tok::Ident, "parameter name");
                if (t.text != expected[i])
                    throw ParseError("expected parameter `" + expected[i] + "`, got `" + t.text + "`",
                                     t.line, t.col);
                if (i + 1 < expected.size()) eat(Tok::Comma, "`,`");
            }
            eat(Tok::RParen, "`)`");
            eat(Tok::Eq, "`=`");
        }
        for (const auto& name : param_names()) scope.push_back(name);
        p.body = parse_expr();
        if (cur().kind != Tok::End) fail("trailing input after program body");
        return p;
    }

    ExprPtr parse_expr() { return parse_additive(); }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at_ident("+") || at_ident("-")) {
            BinOp op = at_ident("+") ? BinOp::Add : BinOp::Sub;
            Token t = toks[pos++];
            ExprPtr rhs = parse_multiplicative();
            lhs = make_expr(Bin{op, lhs, rhs}, t.line, t.col);
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_application();
        while (at_ident("*") || at_ident("/")) {
            BinOp op = at_ident("*") ? BinOp::Mul : BinOp::Div;
            Token t = toks[pos++];
            ExprPtr rhs = parse_application();
            lhs = make_expr(Bin{op, lhs, rhs}, t.line, t.col);
        }
        return lhs;
    }

    bool starts_atom() const {
        switch (cur().kind) {
            case Tok::Number:
            case Tok::LParen:
                return true;
            case Tok::Ident:
                return !is_keyword(cur().text) || cur().text == "cons" || cur().text == "bias" ||
                       cur().text == "case" || cur().text == "let";
            default:
                return false;
        }
    }

    // Function application by juxtaposition: `tanh S0`, `lc0 InputsLC`,
    // `g 0.1`. Only known callables apply; binds tighter than `*`.
    ExprPtr parse_application() {
        if (cur().kind == Tok::Ident && !is_keyword(cur().text)) {
            const Token t = cur();
            ActFn fn;
            int lc = lc_of(t.text, t.line, t.col);
            if (act_of(t.text, fn)) {
                ++pos;
                if (!starts_atom()) fail("expected argument to `" + t.text + "`");
                return make_expr(Act{fn, parse_atom()}, t.line, t.col);
            }
            if (lc >= 0) {
                ++pos;
                if (!starts_atom()) fail("expected argument to `" + t.text + "`");
                return make_expr(LinCombApply{lc, parse_atom()}, t.line, t.col);
            }
            if (is_fn(t.text)) {
                ++pos;
                if (!starts_atom()) fail("expected argument to `" + t.text + "`");
                return make_expr(Apply{t.text, parse_atom()}, t.line, t.col);
            }
        }
        return parse_atom();
    }

    ExprPtr parse_atom() {
        const Token t = cur();
        switch (t.kind) {
            case Tok::Number: {
                ++pos;
                return make_expr(RealConst{literal_value(t.text, t.line, t.col), t.text}, t.line,
                                 t.col);
            }
            case Tok::LParen: {
                ++pos;
                std::vector<ExprPtr> elems;
                elems.push_back(parse_expr());
                while (cur().kind == Tok::Comma) {
                    ++pos;
                    elems.push_back(parse_expr());
                }
                eat(Tok::RParen, "`)`");
                if (elems.size() == 1) return elems[0];
                return make_expr(Tuple{std::move(elems)}, t.line, t.col);
            }
            case Tok::Ident: {
                if (t.text == "case") return parse_case();
                if (t.text == "let") return parse_let();
                if (t.text == "bias") {
                    ++pos;
                    return make_expr(BiasEnd{}, t.line, t.col);
                }
                if (t.text == "cons") {
                    ++pos;
                    eat(Tok::LParen, "`(`");
                    ExprPtr head = parse_expr();
                    eat(Tok::Comma, "`,`");
                    ExprPtr tail = parse_expr();
                    eat(Tok::RParen, "`)`");
                    return make_expr(Cons{head, tail}, t.line, t.col);
                }
                if (is_keyword(t.text)) fail("unexpected keyword");
                ActFn fn;
                if (act_of(t.text, fn) || lc_of(t.text, t.line, t.col) >= 0 || is_fn(t.text))
                    return parse_application();
                if (!in_scope(t.text))
                    throw ParseError("unknown identifier `" + t.text + "`", t.line, t.col);
                ++pos;
                return make_expr(Var{t.text}, t.line, t.col);
            }
            default:
                fail("expected expression");
        }
    }

    ExprPtr parse_case() {
        Token t = eat_ident("case");
        ExprPtr scrutinee = parse_expr();
        eat_ident("of");
        std::vector<std::string> pattern;
        if (cur().kind == Tok::LParen) {
            ++pos;
            pattern.push_back(eat(Tok::Ident, "pattern variable").text);
            while (cur().kind == Tok::Comma) {
                ++pos;
                pattern.push_back(eat(Tok::Ident, "pattern variable").text);
            }
            eat(Tok::RParen, "`)`");
            for (size_t i = 0; i < pattern.size(); ++i)
                for (size_t j = i + 1; j < pattern.size(); ++j)
                    if (pattern[i] == pattern[j])
                        throw ParseError("duplicate pattern variable `" + pattern[i] + "`", t.line,
                                         t.col);
        } else {
            pattern.push_back(eat(Tok::Ident, "pattern variable").text);
        }
        eat(Tok::Arrow, "`=>`");
        for (auto& v : pattern) scope.push_back(v);
        ExprPtr body = parse_expr();
        scope.resize(scope.size() - pattern.size());
        return make_expr(Case{scrutinee, std::move(pattern), body}, t.line, t.col);
    }

    ExprPtr parse_let() {
        Token t = eat_ident("let");
        eat_ident("fun");
        std::string name = eat(Tok::Ident, "function name").text;
        Token param = eat(Tok::Ident, "parameter name");
        if (cur().kind == Tok::Ident && !is_keyword(cur().text))
            throw ParseError("functions take exactly one parameter", cur().line, cur().col);
        eat(Tok::Eq, "`=`");
        scope.push_back(param.text);
        ExprPtr fnBody = parse_expr();
        scope.pop_back();
        eat_ident("in");
        fnScope.push_back(name);
        ExprPtr body = parse_expr();
        fnScope.pop_back();
        eat_ident("end");
        return make_expr(LetFun{name, param.text, fnBody, body}, t.line, t.col);
    }
};

}  // namespace

NeuronProgram parse(const std::string& source) {
    Lexer lex(source);
    Parser parser{lex.run()};
    return parser.parse_program();
}

std::string format_real(double v) {
    bool neg = std::signbit(v) && v != 0.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", neg ? -v : v);
    std::string s(buf);
    std::string mantissa = s, exponent;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mantissa = s.substr(0, e);
        int ev = std::atoi(s.c_str() + e + 1);
        exponent = "E";
        if (ev < 0) {
            exponent += '~';
            ev = -ev;
        }
        exponent += std::to_string(ev);
    }
    if (mantissa.find('.') == std::string::npos) mantissa += ".0";
    return (neg ? "~" : "") + mantissa + exponent;
}

std::string format_real_c(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace arn::dsl
