#include "polyshare/parser.hpp"

#include <cctype>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

namespace polyshare::ir {

namespace {

struct Token {
  enum Type { Ident, Number, Punct, End } type;
  std::string text;
  int line, col;
};

class Lexer {
public:
  explicit Lexer(const std::string &src) : src_(src) { advance(); }

  const Token &peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void error(const std::string &msg, const Token &at) const {
    std::ostringstream os;
    os << "parse error at line " << at.line << ", column " << at.col << ": "
       << msg;
    fail(ErrorKind::Parse, os.str());
  }

private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          ++pos_;
        continue;
      }
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
        continue;
      }
      break;
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Token::End, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        ++pos_;
      tok_ = {Token::Ident, src_.substr(start, pos_ - start), line_, col_};
      col_ += static_cast<int>(tok_.text.size());
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
      tok_ = {Token::Number, src_.substr(start, pos_ - start), line_, col_};
      col_ += static_cast<int>(tok_.text.size());
      return;
    }
    // multi-char puncts, longest first
    static const char *puncts[] = {"<=", ">=", "<-", "..", "<", ">", "=",
                                   "[",  "]",  "{",  "}",  "(", ")", ":",
                                   ";",  ",",  "+",  "-",  "*"};
    for (const char *p : puncts) {
      size_t len = std::strlen(p);
      if (src_.compare(pos_, len, p) == 0) {
        tok_ = {Token::Punct, p, line_, col_};
        pos_ += len;
        col_ += static_cast<int>(len);
        return;
      }
    }
    tok_ = {Token::Punct, std::string(1, c), line_, col_};
    error("unexpected character '" + tok_.text + "'", tok_);
  }

  const std::string &src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
public:
  explicit Parser(const std::string &src) : lex_(src) {}

  Program run() {
    // declarations
    while (lex_.peek().type == Token::Ident &&
           (lex_.peek().text == "param" || lex_.peek().text == "array")) {
      if (lex_.peek().text == "param")
        parseParamDecl();
      else
        parseArrayDecl();
    }
    prog_.paramSpace = poly::VarSpace::make({}, prog_.params);
    for (auto &a : pendingArrays_)
      prog_.arrays.push_back(resolveArray(a));
    // nests
    size_t rootIndex = 0;
    while (lex_.peek().type != Token::End)
      parseNestOrStmt(rootIndex++);
    prog_.finalize();
    return std::move(prog_);
  }

private:
  struct RawAffine {
    std::map<std::string, Int> coeffs;
    Int constant = 0;
    Token at;
  };
  struct RawArray {
    std::string name;
    std::vector<RawAffine> dims;
    Int blockBytes;
  };
  struct LoopFrame {
    std::string var;
    RawAffine lo, hi;
    size_t nextChild = 0;
  };

  Token expect(Token::Type type, const std::string &what) {
    if (lex_.peek().type != type)
      lex_.error("expected " + what, lex_.peek());
    return lex_.next();
  }

  void expectPunct(const std::string &p) {
    if (lex_.peek().type != Token::Punct || lex_.peek().text != p)
      lex_.error("expected '" + p + "'", lex_.peek());
    lex_.next();
  }

  bool atPunct(const std::string &p) {
    return lex_.peek().type == Token::Punct && lex_.peek().text == p;
  }
  bool atIdent(const std::string &kw) {
    return lex_.peek().type == Token::Ident && lex_.peek().text == kw;
  }

  void parseParamDecl() {
    lex_.next(); // param
    while (lex_.peek().type == Token::Ident)
      prog_.params.push_back(lex_.next().text);
    expectPunct(";");
    check(!prog_.params.empty(), ErrorKind::Parse, "empty param declaration");
  }

  void parseArrayDecl() {
    lex_.next(); // array
    RawArray arr;
    arr.name = expect(Token::Ident, "array name").text;
    while (atPunct("[")) {
      lex_.next();
      arr.dims.push_back(parseAffine());
      expectPunct("]");
    }
    if (arr.dims.empty())
      lex_.error("array needs at least one dimension", lex_.peek());
    if (!atIdent("block"))
      lex_.error("expected 'block'", lex_.peek());
    lex_.next();
    Token n = expect(Token::Number, "block size");
    arr.blockBytes = Int(n.text);
    expectPunct(";");
    pendingArrays_.push_back(std::move(arr));
  }

  ArrayDecl resolveArray(const RawArray &raw) {
    ArrayDecl d;
    d.name = raw.name;
    d.blockBytes = raw.blockBytes;
    for (const auto &dim : raw.dims)
      d.gridDims.push_back(toExpr(dim, prog_.paramSpace));
    return d;
  }

  // affine := term (("+"|"-") term)*
  // term   := INT ("*" IDENT)? | IDENT ("*" INT)? | "-" term | "(" affine ")"
  RawAffine parseAffine() {
    RawAffine acc;
    acc.at = lex_.peek();
    parseTerm(acc, 1);
    while (atPunct("+") || atPunct("-")) {
      int sign = lex_.next().text == "+" ? 1 : -1;
      parseTerm(acc, sign);
    }
    return acc;
  }

  void parseTerm(RawAffine &acc, int sign) {
    if (atPunct("-")) {
      lex_.next();
      parseTerm(acc, -sign);
      return;
    }
    if (atPunct("(")) {
      lex_.next();
      RawAffine inner = parseAffine();
      expectPunct(")");
      for (auto &[k, v] : inner.coeffs)
        acc.coeffs[k] += sign * v;
      acc.constant += sign * inner.constant;
      return;
    }
    if (lex_.peek().type == Token::Number) {
      Int value(lex_.next().text);
      if (atPunct("*")) {
        lex_.next();
        Token id = expect(Token::Ident, "variable after '*'");
        acc.coeffs[id.text] += sign * value;
      } else {
        acc.constant += sign * value;
      }
      return;
    }
    if (lex_.peek().type == Token::Ident) {
      Token id = lex_.next();
      Int value = 1;
      if (atPunct("*")) {
        lex_.next();
        if (lex_.peek().type == Token::Ident)
          lex_.error("non-affine expression: product of two variables",
                     lex_.peek());
        Token n = expect(Token::Number, "integer after '*'");
        value = Int(n.text);
      }
      acc.coeffs[id.text] += sign * value;
      return;
    }
    lex_.error("expected affine term", lex_.peek());
  }

  AffineExpr toExpr(const RawAffine &raw, const SpacePtr &space) {
    AffineExpr e(space);
    e.setConstant(raw.constant);
    for (const auto &[name, coeff] : raw.coeffs) {
      if (!space->has(name))
        lex_.error("unknown variable '" + name +
                       "' (not a parameter or enclosing loop variable)",
                   raw.at);
      e.setCoeff(space->indexOf(name), coeff);
    }
    return e;
  }

  void parseNestOrStmt(size_t childIndex) {
    if (atIdent("for")) {
      parseNest(childIndex);
      return;
    }
    parseStmt(childIndex);
  }

  void parseNest(size_t childIndex) {
    lex_.next(); // for
    LoopFrame frame;
    Token var = expect(Token::Ident, "loop variable");
    frame.var = var.text;
    for (const auto &f : loops_)
      if (f.var == frame.var)
        lex_.error("loop variable '" + frame.var + "' shadows an outer loop",
                   var);
    for (const auto &p : prog_.params)
      if (p == frame.var)
        lex_.error("loop variable '" + frame.var + "' shadows a parameter",
                   var);
    if (!atIdent("in"))
      lex_.error("expected 'in'", lex_.peek());
    lex_.next();
    frame.lo = parseAffine();
    expectPunct("..");
    frame.hi = parseAffine();
    expectPunct("{");
    pathPrefix_.push_back(childIndex);
    loops_.push_back(frame);
    size_t next = 0;
    while (!atPunct("}"))
      parseNestOrStmt(next++);
    lex_.next(); // }
    loops_.pop_back();
    pathPrefix_.pop_back();
  }

  SpacePtr currentSpace() const {
    std::vector<std::string> vars;
    for (const auto &f : loops_)
      vars.push_back(f.var);
    return poly::VarSpace::make(vars, prog_.params);
  }

  void parseStmt(size_t childIndex) {
    Token label = expect(Token::Ident, "statement label");
    expectPunct(":");
    if (loops_.empty())
      lex_.error("statements must appear inside a loop nest", label);

    Statement s;
    s.label = label.text;
    for (const auto &f : loops_)
      s.loopVars.push_back(f.var);
    s.space = currentSpace();
    s.textualPath.assign(pathPrefix_.begin(), pathPrefix_.end());
    s.textualPath.push_back(childIndex);

    poly::ConvexPolyhedron dom(s.space);
    for (size_t l = 0; l < loops_.size(); ++l) {
      AffineExpr v = AffineExpr::var(s.space, loops_[l].var);
      AffineExpr lo = toExpr(loops_[l].lo, s.space);
      AffineExpr hi = toExpr(loops_[l].hi, s.space);
      dom.addRelation(v, ">=", lo);
      dom.addRelation(v, "<", hi);
      s.loopBounds.push_back({lo, hi});
    }
    s.domain = PolySet::piece(dom);

    std::vector<Access> reads;
    std::optional<Access> write;
    if (atIdent("write")) {
      lex_.next();
      Access w = parseAccess(s);
      w.kind = AccessKind::Write;
      w.guard = s.domain;
      write = std::move(w);
    } else if (atIdent("nowrite")) {
      lex_.next();
    } else {
      lex_.error("expected 'write' or 'nowrite'", lex_.peek());
    }
    expectPunct("<-");
    while (true) {
      Access r = parseAccess(s);
      r.kind = AccessKind::Read;
      poly::ConvexPolyhedron g = dom;
      if (atIdent("when")) {
        lex_.next();
        parseRel(g, s.space);
        while (atIdent("and")) {
          lex_.next();
          parseRel(g, s.space);
        }
      }
      r.guard = PolySet::piece(std::move(g));
      reads.push_back(std::move(r));
      if (atPunct(","))
        lex_.next();
      else
        break;
    }
    expectPunct(";");

    size_t stmtIndex = prog_.statements.size();
    prog_.statements.push_back(std::move(s));
    if (write) {
      write->stmt = stmtIndex;
      prog_.accesses.push_back(std::move(*write));
    }
    // Reads with an identical subscript tuple are one access; merge guards.
    for (auto &r : reads) {
      r.stmt = stmtIndex;
      bool merged = false;
      for (auto &prev : prog_.accesses) {
        if (prev.stmt == stmtIndex && prev.kind == AccessKind::Read &&
            prev.array == r.array && prev.phi == r.phi) {
          prev.guard = prev.guard.unionWith(r.guard);
          merged = true;
          break;
        }
      }
      if (!merged)
        prog_.accesses.push_back(std::move(r));
    }
  }

  Access parseAccess(const Statement &s) {
    Access a;
    Token arr = expect(Token::Ident, "array name");
    a.array = arr.text;
    while (atPunct("[")) {
      lex_.next();
      a.phi.push_back(toExpr(parseAffine(), s.space));
      expectPunct("]");
    }
    if (a.phi.empty())
      lex_.error("access needs at least one subscript", arr);
    return a;
  }

  void parseRel(poly::ConvexPolyhedron &into, const SpacePtr &space) {
    AffineExpr lhs = toExpr(parseAffine(), space);
    Token op = lex_.peek();
    std::string rel;
    if (op.type == Token::Punct &&
        (op.text == "<" || op.text == "<=" || op.text == "=" ||
         op.text == ">=" || op.text == ">")) {
      rel = lex_.next().text;
    } else if (op.type == Token::Punct && op.text == "<-") {
      // "<-" here is "<" followed by a negative literal/term
      lex_.next();
      rel = "<";
      RawAffine rhsRaw = parseAffineNegatedHead();
      into.addRelation(lhs, rel, toExpr(rhsRaw, space));
      return;
    } else {
      lex_.error("expected comparison operator", op);
    }
    AffineExpr rhs = toExpr(parseAffine(), space);
    into.addRelation(lhs, rel, rhs);
  }

  // After splitting "<-", parse an affine expression whose first term is
  // negated (the '-' consumed as part of the arrow).
  RawAffine parseAffineNegatedHead() {
    RawAffine acc;
    acc.at = lex_.peek();
    parseTerm(acc, -1);
    while (atPunct("+") || atPunct("-")) {
      int sign = lex_.next().text == "+" ? 1 : -1;
      parseTerm(acc, sign);
    }
    return acc;
  }

  Lexer lex_;
  Program prog_;
  std::vector<RawArray> pendingArrays_;
  std::vector<LoopFrame> loops_;
  std::vector<size_t> pathPrefix_;
};

} // namespace

Program parse(const std::string &text) { return Parser(text).run(); }

} // namespace polyshare::ir
