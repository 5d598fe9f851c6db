#include "disambig/minifn/parser.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>

namespace disambig::minifn {

namespace {

std::string format_loc_message(SourceLoc loc, const std::string& message) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " +
         message;
}

}  // namespace

ParseError::ParseError(SourceLoc loc, const std::string& message)
    : std::runtime_error(format_loc_message(loc, message)),
      loc_(loc),
      detail_(message) {}

namespace {

enum class Tok {
  End,
  Ident,
  IntLit,
  FloatLit,
  StrLit,
  // keywords
  KwFn,
  KwLet,
  KwIf,
  KwElse,
  KwWhile,
  KwFor,
  KwIn,
  KwReturn,
  KwRaise,
  KwTrue,
  KwFalse,
  KwAnd,
  KwOr,
  KwNot,
  KwNan,
  KwInf,
  // punctuation
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Semi,
  Arrow,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  EqEq,
  NotEq,
  Lt,
  Le,
  Gt,
  Ge,
  Assign,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End:
      return "end of input";
    case Tok::Ident:
      return "identifier '" + t.text + "'";
    case Tok::IntLit:
    case Tok::FloatLit:
      return "number '" + t.text + "'";
    case Tok::StrLit:
      return "string literal";
    default:
      return "'" + t.text + "'";
  }
}

std::optional<Tok> keyword(std::string_view word) {
  static constexpr std::pair<std::string_view, Tok> kTable[] = {
      {"fn", Tok::KwFn},         {"let", Tok::KwLet},
      {"if", Tok::KwIf},         {"else", Tok::KwElse},
      {"while", Tok::KwWhile},   {"for", Tok::KwFor},
      {"in", Tok::KwIn},         {"return", Tok::KwReturn},
      {"raise", Tok::KwRaise},   {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},   {"and", Tok::KwAnd},
      {"or", Tok::KwOr},         {"not", Tok::KwNot},
      {"nan", Tok::KwNan},       {"inf", Tok::KwInf},
  };
  for (const auto& [w, t] : kTable) {
    if (w == word) return t;
  }
  return std::nullopt;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.loc = loc();
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = keyword(t.text).value_or(Tok::Ident);
      } else if (is_digit(c)) {
        lex_number(t);
      } else if (c == '"') {
        lex_string(t);
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  SourceLoc loc() const { return {line_, col_}; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool starts_with(std::string_view s) const {
    return src_.substr(pos_, s.size()) == s;
  }

  void skip_trivia() {
    for (;;) {
      while (pos_ < src_.size() &&
             (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
              src_[pos_] == '\r')) {
        advance();
      }
      if (pos_ >= src_.size()) return;
      if (src_[pos_] == '#' || starts_with("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      if (starts_with("\"\"\"")) {
        // Doc block: skipped like a comment.
        SourceLoc start = loc();
        for (int i = 0; i < 3; ++i) advance();
        while (pos_ < src_.size() && !starts_with("\"\"\"")) advance();
        if (pos_ >= src_.size()) {
          throw ParseError(start, "unterminated doc block");
        }
        for (int i = 0; i < 3; ++i) advance();
        continue;
      }
      return;
    }
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    bool is_float = false;
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
      is_float = true;
      advance();
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = col_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        advance();
      }
      if (pos_ < src_.size() && is_digit(src_[pos_])) {
        is_float = true;
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      } else {
        pos_ = save;
        col_ = save_col;
      }
    }
    if (pos_ < src_.size() && is_ident_char(src_[pos_])) {
      throw ParseError(loc(), "malformed number literal");
    }
    t.kind = is_float ? Tok::FloatLit : Tok::IntLit;
    t.text = std::string(src_.substr(start, pos_ - start));
  }

  void lex_string(Token& t) {
    SourceLoc start = loc();
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw ParseError(start, "unterminated string literal");
      }
      char c = src_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) {
          throw ParseError(start, "unterminated string literal");
        }
        char e = src_[pos_];
        switch (e) {
          case 'n':
            out += '\n';
            break;
          case 't':
            out += '\t';
            break;
          case '"':
            out += '"';
            break;
          case '\\':
            out += '\\';
            break;
          default:
            throw ParseError(loc(), std::string("unknown escape '\\") + e + "'");
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    t.kind = Tok::StrLit;
    t.text = std::move(out);
  }

  void lex_punct(Token& t) {
    static constexpr std::pair<std::string_view, Tok> kTwo[] = {
        {"->", Tok::Arrow}, {"==", Tok::EqEq}, {"!=", Tok::NotEq},
        {"<=", Tok::Le},    {">=", Tok::Ge},
    };
    for (const auto& [p, k] : kTwo) {
      if (starts_with(p)) {
        t.kind = k;
        t.text = std::string(p);
        advance();
        advance();
        return;
      }
    }
    static constexpr std::pair<char, Tok> kOne[] = {
        {'(', Tok::LParen},   {')', Tok::RParen},   {'{', Tok::LBrace},
        {'}', Tok::RBrace},   {'[', Tok::LBracket}, {']', Tok::RBracket},
        {',', Tok::Comma},    {':', Tok::Colon},    {';', Tok::Semi},
        {'+', Tok::Plus},     {'-', Tok::Minus},    {'*', Tok::Star},
        {'/', Tok::Slash},    {'%', Tok::Percent},  {'<', Tok::Lt},
        {'>', Tok::Gt},       {'=', Tok::Assign},
    };
    char c = src_[pos_];
    for (const auto& [ch, k] : kOne) {
      if (c == ch) {
        t.kind = k;
        t.text = std::string(1, c);
        advance();
        return;
      }
    }
    throw ParseError(loc(), std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  FunctionDef function() {
    FunctionDef def;
    def.loc = peek().loc;
    expect(Tok::KwFn, "'fn'");
    Signature sig = signature_after_fn();
    def.name = std::move(sig.name);
    def.params = std::move(sig.params);
    def.return_type = std::move(sig.return_type);
    def.body = block();
    expect(Tok::End, "end of input after function body");
    return def;
  }

  Signature signature_only() {
    expect(Tok::KwFn, "'fn'");
    Signature sig = signature_after_fn();
    expect(Tok::End, "end of input after signature");
    return sig;
  }

  Type type_only() {
    Type t = type();
    expect(Tok::End, "end of input after type");
    return t;
  }

  std::vector<Expr> expr_list_only() {
    std::vector<Expr> out;
    if (peek().kind == Tok::End) return out;
    out.push_back(expr());
    while (accept(Tok::Comma)) out.push_back(expr());
    expect(Tok::End, "end of input");
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  Token next() {
    Token t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }

  Token expect(Tok k, const std::string& what) {
    if (peek().kind != k) {
      throw ParseError(peek().loc,
                       "expected " + what + ", found " + describe(peek()));
    }
    return next();
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        throw ParseError(p.peek().loc, "nesting too deep");
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  Signature signature_after_fn() {
    Signature sig;
    sig.name = expect(Tok::Ident, "function name").text;
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      do {
        Param p;
        Token name = expect(Tok::Ident, "parameter name");
        p.name = name.text;
        expect(Tok::Colon, "':' after parameter name");
        p.type = type();
        for (const auto& existing : sig.params) {
          if (existing.name == p.name) {
            throw ParseError(name.loc, "duplicate parameter '" + p.name + "'");
          }
        }
        sig.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    sig.return_type = type();
    return sig;
  }

  Type type() {
    DepthGuard guard(*this);
    Token t = expect(Tok::Ident, "type name");
    if (t.text == "Int") return Type::Int();
    if (t.text == "Float") return Type::Float();
    if (t.text == "Bool") return Type::Bool();
    if (t.text == "Str") return Type::Str();
    if (t.text == "List") {
      expect(Tok::LBracket, "'[' after List");
      Type elem = type();
      expect(Tok::RBracket, "']'");
      return Type::List(std::move(elem));
    }
    throw ParseError(t.loc, "unknown type '" + t.text + "'");
  }

  Block block() {
    DepthGuard guard(*this);
    expect(Tok::LBrace, "'{'");
    Block out;
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) {
        throw ParseError(peek().loc, "expected '}', found end of input");
      }
      out.push_back(statement());
    }
    next();
    return out;
  }

  Stmt statement() {
    Stmt s;
    s.loc = peek().loc;
    switch (peek().kind) {
      case Tok::KwLet: {
        next();
        s.kind = Stmt::Kind::Let;
        s.name = expect(Tok::Ident, "variable name").text;
        if (accept(Tok::Colon)) s.annotation = type();
        expect(Tok::Assign, "'='");
        s.expr = expr();
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::KwIf:
        return if_statement();
      case Tok::KwWhile:
        next();
        s.kind = Stmt::Kind::While;
        s.expr = expr();
        s.body = block();
        return s;
      case Tok::KwFor:
        next();
        s.kind = Stmt::Kind::For;
        s.name = expect(Tok::Ident, "loop variable").text;
        expect(Tok::KwIn, "'in'");
        s.expr = expr();
        s.body = block();
        return s;
      case Tok::KwReturn:
        next();
        s.kind = Stmt::Kind::Return;
        s.expr = expr();
        expect(Tok::Semi, "';'");
        return s;
      case Tok::KwRaise:
        next();
        s.kind = Stmt::Kind::Raise;
        expect(Tok::LParen, "'(' after raise");
        s.expr = expr();
        expect(Tok::RParen, "')'");
        expect(Tok::Semi, "';'");
        return s;
      case Tok::Ident:
        if (peek(1).kind == Tok::Assign) {
          s.kind = Stmt::Kind::Assign;
          s.name = next().text;
          next();
          s.expr = expr();
          expect(Tok::Semi, "';'");
          return s;
        }
        [[fallthrough]];
      default:
        throw ParseError(peek().loc,
                         "expected a statement, found " + describe(peek()));
    }
  }

  Stmt if_statement() {
    DepthGuard guard(*this);
    Stmt s;
    s.loc = peek().loc;
    expect(Tok::KwIf, "'if'");
    s.kind = Stmt::Kind::If;
    s.expr = expr();
    s.body = block();
    if (accept(Tok::KwElse)) {
      if (peek().kind == Tok::KwIf) {
        s.else_body.push_back(if_statement());
      } else {
        s.else_body = block();
      }
    }
    return s;
  }

  Expr expr() {
    DepthGuard guard(*this);
    return or_expr();
  }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (peek().kind == Tok::KwOr) {
      SourceLoc loc = next().loc;
      lhs = Expr::binary(BinaryOp::Or, std::move(lhs), and_expr(), loc);
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (peek().kind == Tok::KwAnd) {
      SourceLoc loc = next().loc;
      lhs = Expr::binary(BinaryOp::And, std::move(lhs), not_expr(), loc);
    }
    return lhs;
  }

  Expr not_expr() {
    if (peek().kind == Tok::KwNot) {
      DepthGuard guard(*this);
      SourceLoc loc = next().loc;
      return Expr::unary(UnaryOp::Not, not_expr(), loc);
    }
    return comparison();
  }

  static std::optional<BinaryOp> comparison_op(Tok k) {
    switch (k) {
      case Tok::EqEq:
        return BinaryOp::Eq;
      case Tok::NotEq:
        return BinaryOp::Ne;
      case Tok::Lt:
        return BinaryOp::Lt;
      case Tok::Le:
        return BinaryOp::Le;
      case Tok::Gt:
        return BinaryOp::Gt;
      case Tok::Ge:
        return BinaryOp::Ge;
      default:
        return std::nullopt;
    }
  }

  Expr comparison() {
    Expr lhs = additive();
    if (auto op = comparison_op(peek().kind)) {
      SourceLoc loc = next().loc;
      lhs = Expr::binary(*op, std::move(lhs), additive(), loc);
      if (comparison_op(peek().kind)) {
        throw ParseError(peek().loc, "comparisons cannot be chained");
      }
    }
    return lhs;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    for (;;) {
      BinaryOp op;
      if (peek().kind == Tok::Plus) {
        op = BinaryOp::Add;
      } else if (peek().kind == Tok::Minus) {
        op = BinaryOp::Sub;
      } else {
        return lhs;
      }
      SourceLoc loc = next().loc;
      lhs = Expr::binary(op, std::move(lhs), multiplicative(), loc);
    }
  }

  Expr multiplicative() {
    Expr lhs = unary();
    for (;;) {
      BinaryOp op;
      if (peek().kind == Tok::Star) {
        op = BinaryOp::Mul;
      } else if (peek().kind == Tok::Slash) {
        op = BinaryOp::Div;
      } else if (peek().kind == Tok::Percent) {
        op = BinaryOp::Mod;
      } else {
        return lhs;
      }
      SourceLoc loc = next().loc;
      lhs = Expr::binary(op, std::move(lhs), unary(), loc);
    }
  }

  static bool is_numeric_literal(Tok k) {
    return k == Tok::IntLit || k == Tok::FloatLit || k == Tok::KwNan ||
           k == Tok::KwInf;
  }

  Expr unary() {
    DepthGuard guard(*this);
    if (peek().kind == Tok::Minus) {
      SourceLoc loc = next().loc;
      if (is_numeric_literal(peek().kind)) {
        // A minus directly before a numeric literal is part of the literal.
        Expr lit = numeric_literal(true);
        lit.loc = loc;
        return postfix(std::move(lit));
      }
      return Expr::unary(UnaryOp::Neg, unary(), loc);
    }
    return postfix(primary());
  }

  Expr postfix(Expr base) {
    while (peek().kind == Tok::LBracket) {
      SourceLoc loc = next().loc;
      Expr idx = expr();
      expect(Tok::RBracket, "']'");
      Expr e;
      e.kind = Expr::Kind::Index;
      e.loc = loc;
      e.operands.push_back(std::move(base));
      e.operands.push_back(std::move(idx));
      base = std::move(e);
    }
    return base;
  }

  Expr numeric_literal(bool negative) {
    Token t = next();
    switch (t.kind) {
      case Tok::IntLit: {
        std::uint64_t mag = 0;
        auto [p, ec] =
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
        constexpr std::uint64_t kLimit =
            static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
        if (ec != std::errc() || mag > kLimit + (negative ? 1 : 0)) {
          throw ParseError(t.loc, "integer literal out of range");
        }
        std::int64_t v = negative
                             ? (mag == kLimit + 1
                                    ? std::numeric_limits<std::int64_t>::min()
                                    : -static_cast<std::int64_t>(mag))
                             : static_cast<std::int64_t>(mag);
        return Expr::int_lit(v, t.loc);
      }
      case Tok::FloatLit: {
        double v = std::strtod(t.text.c_str(), nullptr);
        return Expr::float_lit(negative ? -v : v, t.loc);
      }
      case Tok::KwNan:
        return Expr::float_lit(std::numeric_limits<double>::quiet_NaN(), t.loc);
      case Tok::KwInf: {
        double inf = std::numeric_limits<double>::infinity();
        return Expr::float_lit(negative ? -inf : inf, t.loc);
      }
      default:
        throw ParseError(t.loc, "expected a number, found " + describe(t));
    }
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::IntLit:
      case Tok::FloatLit:
      case Tok::KwNan:
      case Tok::KwInf:
        return numeric_literal(false);
      case Tok::KwTrue:
        return Expr::bool_lit(true, next().loc);
      case Tok::KwFalse:
        return Expr::bool_lit(false, next().loc);
      case Tok::StrLit: {
        Token s = next();
        return Expr::str_lit(s.text, s.loc);
      }
      case Tok::LParen: {
        next();
        Expr inner = expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBracket: {
        Expr e;
        e.kind = Expr::Kind::ListLit;
        e.loc = next().loc;
        if (peek().kind != Tok::RBracket) {
          do {
            e.operands.push_back(expr());
          } while (accept(Tok::Comma));
        }
        expect(Tok::RBracket, "']'");
        return e;
      }
      case Tok::Ident: {
        Token name = next();
        if (peek().kind != Tok::LParen) return Expr::var(name.text, name.loc);
        Expr call;
        call.kind = Expr::Kind::Call;
        call.loc = name.loc;
        if (name.text == "len") {
          call.builtin = Builtin::Len;
        } else if (name.text == "abs") {
          call.builtin = Builtin::Abs;
        } else if (name.text == "is_nan") {
          call.builtin = Builtin::IsNan;
        } else {
          throw ParseError(name.loc, "unknown function '" + name.text + "'");
        }
        next();
        call.operands.push_back(expr());
        expect(Tok::RParen, "')' (builtins take one argument)");
        return call;
      }
      default:
        throw ParseError(t.loc, "expected an expression, found " + describe(t));
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

Value literal_value(const Expr& e, const Type& type) {
  auto fail = [&](const std::string& why) -> Value {
    throw ParseError(e.loc, why + " (expected " + type.to_string() + ")");
  };
  switch (type.kind()) {
    case TypeKind::Int:
      if (e.kind == Expr::Kind::IntLit) return Value::Int(e.int_value);
      return fail("expected an Int literal");
    case TypeKind::Float:
      if (e.kind == Expr::Kind::FloatLit) return Value::Float(e.float_value);
      if (e.kind == Expr::Kind::IntLit) {
        return Value::Float(static_cast<double>(e.int_value));
      }
      return fail("expected a Float literal");
    case TypeKind::Bool:
      if (e.kind == Expr::Kind::BoolLit) return Value::Bool(e.bool_value);
      return fail("expected a Bool literal");
    case TypeKind::Str:
      if (e.kind == Expr::Kind::StrLit) return Value::Str(e.text);
      return fail("expected a Str literal");
    case TypeKind::List: {
      if (e.kind != Expr::Kind::ListLit) return fail("expected a list literal");
      std::vector<Value> items;
      items.reserve(e.operands.size());
      for (const auto& op : e.operands) {
        items.push_back(literal_value(op, type.elem()));
      }
      return Value::List(type.elem(), std::move(items));
    }
  }
  return fail("unsupported type");
}

}  // namespace

FunctionDef parse(std::string_view source) {
  return Parser(Lexer(source).run()).function();
}

Signature parse_signature(std::string_view text) {
  return Parser(Lexer(text).run()).signature_only();
}

Type parse_type(std::string_view text) {
  return Parser(Lexer(text).run()).type_only();
}

std::vector<Value> parse_values(std::string_view text,
                                const std::vector<Type>& types) {
  std::vector<Expr> exprs = Parser(Lexer(text).run()).expr_list_only();
  if (exprs.size() != types.size()) {
    throw ParseError(SourceLoc{1, 1},
                     "expected " + std::to_string(types.size()) +
                         " values, found " + std::to_string(exprs.size()));
  }
  std::vector<Value> out;
  out.reserve(exprs.size());
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    out.push_back(literal_value(exprs[i], types[i]));
  }
  return out;
}

Value parse_value(std::string_view text, const Type& type) {
  return parse_values(text, {type}).front();
}

}  // namespace disambig::minifn
