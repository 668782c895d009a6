#include "cimm/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <system_error>
#include <vector>

#include "cimm/error.hpp"

namespace cimm {

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Dot, Star, Plus, Minus, Meet, Join, Bar, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t pos;
  double number = 0.0;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        ++i;
      }
      out.push_back({Tok::Ident, src.substr(start, i - start), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i < src.size() && src[i] == '.' && i + 1 < src.size() &&
          std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        ++i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      Token t{Tok::Number, src.substr(start, i - start), start};
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
        throw ParseError("malformed number '" + std::string(t.text) + "'", start);
      }
      out.push_back(t);
      continue;
    }
    auto single = [&](Tok k) {
      out.push_back({k, src.substr(start, 1), start});
      ++i;
    };
    switch (c) {
      case '(': single(Tok::LParen); break;
      case ')': single(Tok::RParen); break;
      case ',': single(Tok::Comma); break;
      case '.': single(Tok::Dot); break;
      case '*': single(Tok::Star); break;
      case '+': single(Tok::Plus); break;
      case '-': single(Tok::Minus); break;
      case '|': single(Tok::Bar); break;
      case '/':
        if (i + 1 < src.size() && src[i + 1] == '\\') {
          out.push_back({Tok::Meet, src.substr(start, 2), start});
          i += 2;
          break;
        }
        throw ParseError("expected '/\\'", start);
      case '\\':
        if (i + 1 < src.size() && src[i + 1] == '/') {
          out.push_back({Tok::Join, src.substr(start, 2), start});
          i += 2;
          break;
        }
        throw ParseError("expected '\\/'", start);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
  }
  out.push_back({Tok::End, {}, src.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, const Signature& sig) : toks_(lex(src)), sig_(sig) {}

  Formula parse() {
    Formula f = additive();
    if (peek().kind != Tok::End) fail("unexpected '" + std::string(peek().text) + "'");
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }

  Formula additive() {
    Formula lhs = lattice();
    for (;;) {
      if (accept(Tok::Plus)) {
        lhs = Formula::sum(std::move(lhs), lattice());
      } else if (accept(Tok::Minus)) {
        lhs = difference(std::move(lhs), lattice());
      } else {
        return lhs;
      }
    }
  }

  Formula lattice() {
    Formula lhs = unary();
    for (;;) {
      if (accept(Tok::Meet)) {
        lhs = Formula::meet(std::move(lhs), unary());
      } else if (accept(Tok::Join)) {
        lhs = join(std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  std::string bound_variable() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || !is_identifier(t.text)) fail("expected a variable");
    if (sig_.declares(t.text)) fail("'" + std::string(t.text) + "' is a declared symbol, not a variable");
    ++pos_;
    return std::string(t.text);
  }

  Formula scaled(double r) {
    if (accept(Tok::Star)) return Formula::scale(r, unary());
    return Formula::scale(r, Formula::one());
  }

  Formula unary() {
    const Token& t = peek();
    if (t.kind == Tok::Ident && (t.text == "sup" || t.text == "int" || t.text == "inf")) {
      const std::string_view kw = t.text;
      ++pos_;
      std::string var = bound_variable();
      expect(Tok::Dot, "'.' after quantified variable");
      Formula body = additive();
      if (kw == "sup") return Formula::sup(std::move(var), std::move(body));
      if (kw == "int") return Formula::integral(std::move(var), std::move(body));
      return infimum(std::move(var), std::move(body));
    }
    if (t.kind == Tok::Minus) {
      ++pos_;
      if (peek().kind == Tok::Number) return scaled(-next().number);
      return negate(unary());
    }
    if (t.kind == Tok::Number) {
      const double r = next().number;
      if (peek().kind != Tok::Star && r == 1.0) return Formula::one();
      return scaled(r);
    }
    return primary();
  }

  Formula primary() {
    const Token& t = peek();
    if (accept(Tok::LParen)) {
      Formula f = additive();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (accept(Tok::Bar)) {
      Formula f = additive();
      expect(Tok::Bar, "closing '|'");
      return absolute(std::move(f));
    }
    if (t.kind == Tok::Ident) {
      const std::string name(t.text);
      const std::size_t at = t.pos;
      ++pos_;
      if (peek().kind != Tok::LParen) {
        throw ParseError("expected '(' after relation '" + name + "'", peek().pos);
      }
      if (!sig_.find_relation(name)) {
        if (sig_.declares(name)) throw SignatureError("'" + name + "' is not a relation symbol");
        throw SignatureError("undeclared relation '" + name + "' at offset " + std::to_string(at));
      }
      return Formula::atomic(sig_, name, arguments());
    }
    if (t.kind == Tok::End) fail("unexpected end of input");
    fail("unexpected '" + std::string(t.text) + "'");
  }

  std::vector<Term> arguments() {
    expect(Tok::LParen, "'('");
    std::vector<Term> args;
    args.push_back(term());
    while (accept(Tok::Comma)) args.push_back(term());
    expect(Tok::RParen, "')'");
    return args;
  }

  Term term() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || !is_identifier(t.text)) fail("expected a term");
    const std::string name(t.text);
    ++pos_;
    if (peek().kind == Tok::LParen) {
      if (!sig_.find_function(name)) {
        if (sig_.declares(name)) throw SignatureError("'" + name + "' is not a function symbol");
        throw SignatureError("undeclared function '" + name + "'");
      }
      return Term::apply(sig_, name, arguments());
    }
    if (sig_.find_constant(name)) return Term::constant(sig_, name);
    if (sig_.declares(name)) {
      throw SignatureError("symbol '" + name + "' used without arguments");
    }
    return Term::variable(name);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature& sig_;
};

// Binding levels used by the printer.
enum Level { kSum = 1, kMeet = 2, kUnary = 3, kAtom = 4 };

int level_of(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Sum: return kSum;
    case Formula::Kind::Meet: return kMeet;
    case Formula::Kind::Scale:
    case Formula::Kind::Sup:
    case Formula::Kind::Integral: return kUnary;
    default: return kAtom;
  }
}

bool ends_with_quantifier(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Sup:
    case Formula::Kind::Integral: return true;
    case Formula::Kind::Scale:
    case Formula::Kind::Sum:
    case Formula::Kind::Meet: return ends_with_quantifier(f.children().back());
    default: return false;
  }
}

// `tail` is true when nothing follows `f` inside the current parenthesized
// context, so a trailing quantifier cannot swallow later text.
void print(const Formula& f, int min_level, bool tail, std::string& out) {
  const bool parens = level_of(f) < min_level || (!tail && ends_with_quantifier(f));
  if (parens) {
    out += '(';
    tail = true;
  }
  switch (f.kind()) {
    case Formula::Kind::One:
      out += '1';
      break;
    case Formula::Kind::Atomic:
      out += f.relation_name();
      out += '(';
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        if (i) out += ", ";
        out += print_term(f.args()[i]);
      }
      out += ')';
      break;
    case Formula::Kind::Scale:
      out += format_real(f.scalar());
      out += '*';
      print(f.children()[0], kUnary, tail, out);
      break;
    case Formula::Kind::Sum:
    case Formula::Kind::Meet: {
      const int lvl = level_of(f);
      print(f.children()[0], lvl, false, out);
      out += f.kind() == Formula::Kind::Sum ? " + " : " /\\ ";
      print(f.children()[1], lvl + 1, tail, out);
      break;
    }
    case Formula::Kind::Sup:
    case Formula::Kind::Integral:
      out += f.kind() == Formula::Kind::Sup ? "sup " : "int ";
      out += f.variable();
      out += " . ";
      print(f.children()[0], kSum, true, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

Formula parse_formula(std::string_view text, const Signature& sig) {
  return Parser(text, sig).parse();
}

Formula desugar(std::string_view text, const Signature& sig) { return parse_formula(text, sig); }

std::string print_term(const Term& t) {
  if (t.kind() != Term::Kind::Apply) return t.name();
  std::string out = t.name() + "(";
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i) out += ", ";
    out += print_term(t.args()[i]);
  }
  return out + ")";
}

std::string print_formula(const Formula& f) {
  std::string out;
  print(f, kSum, true, out);
  return out;
}

std::string format_real(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace cimm
