#include "chevdioph/eqn.hpp"

#include <cctype>
#include <map>

namespace chevdioph {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Shared cursor over the source text: whitespace and '#' comments are
// insignificant everywhere, and every failure carries a 1-based position.
struct Cursor {
  const std::string& s;
  size_t pos = 0;

  void locate(size_t at, int& line, int& col) const {
    line = 1;
    col = 1;
    for (size_t i = 0; i < at && i < s.size(); ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  }
  [[noreturn]] void fail_at(size_t at, const std::string& what) const {
    int line, col;
    locate(at, line, col);
    throw SyntaxError(what, line, col);
  }
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos, what); }
  [[noreturn]] void unknown_at(size_t at, const std::string& name) const {
    int line, col;
    locate(at, line, col);
    throw UnknownSymbol(name, line, col);
  }

  void skip() {
    while (pos < s.size()) {
      char c = s[pos];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else if (c == '#') {
        while (pos < s.size() && s[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }
  bool eof() {
    skip();
    return pos >= s.size();
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const std::string& what) {
    if (!eat(c)) fail(what);
  }
  // Reads an identifier, or returns "" without consuming anything.
  std::string ident() {
    skip();
    if (pos >= s.size() || !ident_start(s[pos])) return "";
    size_t start = pos;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    return s.substr(start, pos - start);
  }
  bool keyword(const std::string& kw) {
    skip();
    size_t save = pos;
    std::string id = ident();
    if (id == kw) return true;
    pos = save;
    return false;
  }
  long long integer(const std::string& what) {
    skip();
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    size_t digits = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == digits) fail(what);
    try {
      return std::stoll(s.substr(start, pos - start));
    } catch (const std::exception&) {
      fail_at(start, "integer literal out of range");
    }
  }
};

// Declarations must precede equations, matching the line order of the
// grammar; both parsers share this statement loop.
template <typename DeclFn, typename EqFn>
void statements(Cursor& c, DeclFn&& declare, EqFn&& equation) {
  bool sawEq = false;
  while (!c.eof()) {
    size_t at = c.pos;
    if (c.keyword("var")) {
      if (sawEq) c.fail_at(at, "variable declarations must precede equations");
      while (true) {
        c.skip();
        size_t vat = c.pos;
        std::string name = c.ident();
        if (name.empty()) c.fail("expected a variable name");
        declare(name, vat);
        if (c.eat(',')) continue;
        c.expect(';', "expected ',' or ';' after a variable name");
        break;
      }
      continue;
    }
    if (c.keyword("eq")) {
      sawEq = true;
      equation();
      if (!c.eat(';') && !c.eof()) c.fail("expected ';' after the equation");
      continue;
    }
    c.fail("expected 'var' or 'eq'");
  }
}

// --- ring expressions -------------------------------------------------------

struct RingExprParser {
  Cursor& c;
  const std::vector<std::string>& vars;
  const std::map<std::string, size_t>& index;

  Poly expr() {
    bool neg = false;
    if (c.eat('-'))
      neg = true;
    else
      c.eat('+');
    Poly acc = term();
    if (neg) acc = -acc;
    while (true) {
      if (c.eat('+')) {
        acc = acc + term();
      } else if (c.eat('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }
  Poly term() {
    Poly eacc = factor();
    while (c.eat('*')) eacc = eacc * factor();
    return eacc;
  }
  Poly factor() {
    Poly base = primary();
    if (c.eat('^')) {
      size_t at = c.pos;
      long long e = c.integer("expected an integer exponent");
      if (e < 0) c.fail_at(at, "negative exponents are not polynomial");
      Poly acc = Poly::constant(vars.size(), 1);
      for (long long i = 0; i < e; ++i) acc = acc * base;
      return acc;
    }
    return base;
  }
  Poly primary() {
    c.skip();
    if (c.pos >= c.s.size()) c.fail("unexpected end of expression");
    char ch = c.s[c.pos];
    if (ch == '(') {
      ++c.pos;
      Poly inner = expr();
      c.expect(')', "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      long long v = c.integer("expected an integer");
      return Poly::constant(vars.size(), v);
    }
    size_t at = c.pos;
    std::string name = c.ident();
    if (name.empty()) c.fail("expected an integer, a variable, or '('");
    auto it = index.find(name);
    if (it == index.end()) c.unknown_at(at, name);
    return Poly::variable(vars.size(), it->second);
  }
};

// --- group words ------------------------------------------------------------

struct GroupWordParser {
  Cursor& c;
  const GroupContext* ctx;
  const std::map<std::string, size_t>& index;

  static bool starts_factor(char ch) {
    return ident_start(ch) || ch == '(' || ch == '[' || ch == '1';
  }

  GWord word() {
    GWord out = factor();
    while (true) {
      char ch = c.peek();
      if (ch == '*') {
        ++c.pos;
        out *= factor();
      } else if (starts_factor(ch)) {
        out *= factor();  // juxtaposition
      } else {
        return out;
      }
    }
  }
  GWord factor() {
    GWord base = primary();
    if (c.eat('^')) {
      long long e = c.integer("expected an integer exponent");
      if (e < 0) {
        base = base.inversed();
        e = -e;
      }
      GWord out;
      for (long long i = 0; i < e; ++i) out *= base;
      return out;
    }
    return base;
  }
  GWord primary() {
    c.skip();
    if (c.pos >= c.s.size()) c.fail("unexpected end of word");
    char ch = c.s[c.pos];
    if (ch == '(') {
      ++c.pos;
      GWord inner = word();
      c.expect(')', "expected ')'");
      return inner;
    }
    if (ch == '[') {
      ++c.pos;
      GWord a = word();
      c.expect(',', "expected ',' inside the commutator");
      GWord b = word();
      c.expect(']', "expected ']' closing the commutator");
      return GWord::commutator(a, b);
    }
    if (ch == '1') {
      ++c.pos;
      return GWord{};
    }
    size_t at = c.pos;
    std::string name = c.ident();
    if (name.empty()) c.fail("expected a variable, a generator letter, '[', '(' or 1");
    // A generator letter is x, w or h followed immediately by '('.
    if ((name == "x" || name == "w" || name == "h") && c.pos < c.s.size() &&
        c.s[c.pos] == '(') {
      return atom(name[0], at);
    }
    auto it = index.find(name);
    if (it != index.end()) return GWord::var(name);
    if (name == "e") return GWord{};  // identity literal
    c.unknown_at(at, name);
  }
  GWord atom(char kind, size_t at) {
    ++c.pos;  // '('
    size_t start = c.pos;
    int depth = 0;
    while (c.pos < c.s.size() && (depth > 0 || c.s[c.pos] != ';')) {
      if (c.s[c.pos] == '[') ++depth;
      if (c.s[c.pos] == ']') --depth;
      ++c.pos;
    }
    if (c.pos >= c.s.size()) c.fail_at(at, "expected ';' separating root and parameter");
    std::string rootTxt = c.s.substr(start, c.pos - start);
    ++c.pos;
    start = c.pos;
    depth = 0;
    while (c.pos < c.s.size() && (depth > 0 || c.s[c.pos] != ')')) {
      if (c.s[c.pos] == '[') ++depth;
      if (c.s[c.pos] == ']') --depth;
      ++c.pos;
    }
    if (c.pos >= c.s.size()) c.fail_at(at, "expected ')' closing the generator");
    std::string paramTxt = c.s.substr(start, c.pos - start);
    ++c.pos;
    try {
      int root = ctx->rs().parse_root(rootTxt);
      RElem t = ctx->ring().parse_literal(paramTxt);
      ctx->eval_word({WordAtom{kind, root, t, false}});  // resolvable in the context
      return GWord::atom(kind, root, t);
    } catch (const std::exception& e) {
      c.fail_at(at, e.what());
    }
  }
};

// Scans up to the statement-terminating ';'.  Ring specs may themselves
// contain semicolons inside parentheses (GF(2^2;f=[1,1,1])), so only a
// depth-0 semicolon terminates.
std::string take_until_semicolon(Cursor& c, const std::string& what) {
  c.skip();
  size_t start = c.pos;
  int depth = 0;
  while (c.pos < c.s.size()) {
    char ch = c.s[c.pos];
    if (ch == '(' || ch == '[') ++depth;
    if (ch == ')' || ch == ']') --depth;
    if ((ch == ';' && depth == 0) || ch == '\n' || ch == '#') break;
    ++c.pos;
  }
  if (c.pos >= c.s.size() || c.s[c.pos] != ';') c.fail_at(start, what);
  std::string out = c.s.substr(start, c.pos - start);
  ++c.pos;
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
    out.pop_back();
  return out;
}

}  // namespace

RingSystem parse_ring_system(const std::string& text) {
  Cursor c{text};
  if (!c.keyword("ring")) c.fail("expected the header 'ring <spec>;'");
  size_t specAt = c.pos;
  std::string spec = take_until_semicolon(c, "expected ';' after the ring spec");
  RingSystem out;
  try {
    out.ringSpec = ring_parse_spec(spec)->spec_string();
  } catch (const std::exception& e) {
    c.fail_at(specAt, e.what());
  }

  std::map<std::string, size_t> index;
  statements(
      c,
      [&](const std::string& name, size_t at) {
        if (index.count(name)) c.fail_at(at, "duplicate variable '" + name + "'");
        index[name] = out.vars.size();
        out.vars.push_back(name);
      },
      [&]() {
        RingExprParser p{c, out.vars, index};
        Poly lhs = p.expr();
        c.expect('=', "expected '=' in the equation");
        Poly rhs = p.expr();
        out.polys.push_back(lhs - rhs);
      });
  return out;
}

GroupSystem parse_group_system(const std::string& text) {
  Cursor c{text};
  if (!c.keyword("group"))
    c.fail("expected the header 'group <system> <rep> <ringspec>;'");
  size_t specAt = c.pos;
  std::string spec = take_until_semicolon(c, "expected ';' after the group spec");
  std::vector<std::string> toks;
  {
    std::string cur;
    for (char ch : spec) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        if (!cur.empty()) toks.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) toks.push_back(cur);
  }
  if (toks.size() != 3)
    c.fail_at(specAt, "expected '<system> <rep> <ringspec>' in the group header");

  GroupSystem out;
  const GroupContext* ctx = nullptr;
  try {
    ctx = GroupContext::get(toks[0], toks[1], toks[2]);
  } catch (const std::exception& e) {
    c.fail_at(specAt, e.what());
  }
  // Canonical stamp, independent of how the header spelled the triple.
  out.system = std::string(1, ctx->rs().family()) + std::to_string(ctx->rs().rank());
  out.rep = rep_name(ctx->rep().kind());
  out.ringSpec = ctx->ring().spec_string();

  std::map<std::string, size_t> index;
  statements(
      c,
      [&](const std::string& name, size_t at) {
        if (index.count(name)) c.fail_at(at, "duplicate variable '" + name + "'");
        index[name] = out.vars.size();
        out.vars.push_back(name);
      },
      [&]() {
        GroupWordParser p{c, ctx, index};
        GWord lhs = p.word();
        c.expect('=', "expected '=' in the equation");
        GWord rhs = p.word();
        // Canonical form: lhs * rhs^-1 equated to the identity.
        if (!rhs.syms.empty()) lhs *= rhs.inversed();
        out.equations.push_back(std::move(lhs));
      });
  return out;
}

std::string print_ring_system(const RingSystem& rs) {
  std::string out = "ring " + rs.ringSpec + ";\n";
  if (!rs.vars.empty()) {
    out += "var ";
    for (size_t i = 0; i < rs.vars.size(); ++i) {
      if (i) out += ", ";
      out += rs.vars[i];
    }
    out += ";\n";
  }
  for (const Poly& p : rs.polys) out += "eq " + p.to_string(rs.vars) + " = 0;\n";
  return out;
}

std::string print_group_system(const GroupSystem& gs) {
  const GroupContext* ctx = gs.context();
  std::string out = "group " + gs.system + " " + gs.rep + " " + gs.ringSpec + ";\n";
  if (!gs.vars.empty()) {
    out += "var ";
    for (size_t i = 0; i < gs.vars.size(); ++i) {
      if (i) out += ", ";
      out += gs.vars[i];
    }
    out += ";\n";
  }
  for (const GWord& w : gs.equations) out += "eq " + print_gword(ctx, w) + " = 1;\n";
  return out;
}

RElem eval_poly(const Ring& R, const Poly& p, const std::vector<RElem>& vals) {
  if (p.nvars() != vals.size())
    throw std::invalid_argument("polynomial arity does not match the assignment");
  RElem acc = R.zero();
  for (const PolyTerm& t : p.terms()) {
    RElem m = R.from_int(t.coeff);
    for (size_t i = 0; i < vals.size(); ++i) {
      for (uint32_t e = 0; e < t.exps[i]; ++e) m = R.mul(m, vals[i]);
    }
    acc = R.add(acc, m);
  }
  return acc;
}

}  // namespace chevdioph
