#pragma once

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/discretization.hpp"

namespace fraclab::expr {

/// One additive term of the potential grammar:
///   constants, c*r^k, c*step(r-a), summed.
struct Term {
    enum class Kind { constant, power, step };
    Kind kind = Kind::constant;
    double coef = 0.0;
    int exponent = 0;   // for power
    double offset = 0.0;  // for step(r - offset)
};

struct PotentialExpr {
    std::vector<Term> terms;
    std::string source;

    double eval(double r) const {
        double acc = 0.0;
        for (const auto& t : terms) {
            switch (t.kind) {
                case Term::Kind::constant: acc += t.coef; break;
                case Term::Kind::power: acc += t.coef * std::pow(r, t.exponent); break;
                case Term::Kind::step: acc += t.coef * (r >= t.offset ? 1.0 : 0.0); break;
            }
        }
        return acc;
    }

    /// Structural certificate: nondecreasing iff every increasing atom enters
    /// with a nonnegative coefficient (constants are unrestricted).
    bool monotone_certified() const {
        for (const auto& t : terms) {
            if (t.kind == Term::Kind::constant) continue;
            if (t.coef < 0.0) return false;
        }
        return true;
    }

    std::vector<double> breakpoints() const {
        std::vector<double> b;
        for (const auto& t : terms)
            if (t.kind == Term::Kind::step && t.offset > 0.0 && t.offset < 1.0)
                b.push_back(t.offset);
        std::sort(b.begin(), b.end());
        return b;
    }

    disc::PotentialProfile to_profile() const {
        disc::PotentialProfile V;
        auto self = *this;
        V.eval = [self](double r) { return self.eval(r); };
        V.monotone_nondecreasing = monotone_certified();
        V.bounded = true;
        V.breakpoints = breakpoints();
        return V;
    }
};

namespace detail {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!consume(c))
            throw std::invalid_argument("potential expression: expected '" + std::string(1, c) +
                                        "' at position " + std::to_string(pos) + " in \"" + text +
                                        "\"");
    }
    double number() {
        skip_ws();
        std::size_t len = 0;
        double v = 0.0;
        try {
            v = std::stod(text.substr(pos), &len);
        } catch (const std::exception&) {
            throw std::invalid_argument("potential expression: expected a number at position " +
                                        std::to_string(pos) + " in \"" + text + "\"");
        }
        pos += len;
        return v;
    }
    bool match_word(const std::string& w) {
        skip_ws();
        if (text.compare(pos, w.size(), w) == 0) {
            pos += w.size();
            return true;
        }
        return false;
    }
};

inline Term parse_atom(Cursor& c, double coef) {
    Term t;
    t.coef = coef;
    if (c.match_word("step")) {
        c.expect('(');
        if (!c.match_word("r"))
            throw std::invalid_argument("potential expression: step argument must be r - a");
        c.expect('-');
        t.kind = Term::Kind::step;
        t.offset = c.number();
        c.expect(')');
        return t;
    }
    if (c.match_word("r")) {
        t.kind = Term::Kind::power;
        t.exponent = 1;
        if (c.consume('^')) {
            const double e = c.number();
            if (e != std::floor(e) || e < 1.0 || e > 40.0)
                throw std::invalid_argument(
                    "potential expression: exponent must be a small positive integer");
            t.exponent = static_cast<int>(e);
        }
        return t;
    }
    throw std::invalid_argument("potential expression: expected r, r^k or step(r-a) at position " +
                                std::to_string(c.pos));
}

inline Term parse_term(Cursor& c) {
    const char nxt = c.peek();
    if (nxt == 'r' || nxt == 's') return parse_atom(c, 1.0);
    const double v = c.number();
    if (c.consume('*')) return parse_atom(c, v);
    Term t;
    t.kind = Term::Kind::constant;
    t.coef = v;
    return t;
}

}  // namespace detail

/// Parses the CLI potential grammar: sums of constants, c*r^k and
/// c*step(r-a); '-' between terms negates the following coefficient.
inline PotentialExpr parse_potential(const std::string& text) {
    detail::Cursor c{text};
    PotentialExpr e;
    e.source = text;
    if (c.eof()) throw std::invalid_argument("potential expression: empty input");
    double sign = 1.0;
    if (c.consume('-')) sign = -1.0;
    for (;;) {
        Term t = detail::parse_term(c);
        t.coef *= sign;
        e.terms.push_back(t);
        if (c.eof()) break;
        if (c.consume('+')) sign = 1.0;
        else if (c.consume('-')) sign = -1.0;
        else
            throw std::invalid_argument("potential expression: unexpected input at position " +
                                        std::to_string(c.pos) + " in \"" + text + "\"");
        if (c.eof())
            throw std::invalid_argument("potential expression: dangling operator in \"" + text +
                                        "\"");
    }
    return e;
}

}  // namespace fraclab::expr
