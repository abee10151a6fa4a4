#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "chevdioph/dioph.hpp"
#include "chevdioph/poly.hpp"
#include "chevdioph/rings.hpp"

namespace chevdioph {

// Parse failure with a 1-based source position.
struct SyntaxError : std::runtime_error {
  int line = 0;
  int col = 0;
  SyntaxError(const std::string& what, int line_, int col_)
      : std::runtime_error("line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ": " + what),
        line(line_),
        col(col_) {}
};

// An identifier that is neither a declared variable nor a generator form.
struct UnknownSymbol : std::runtime_error {
  std::string symbol;
  UnknownSymbol(const std::string& name, int line_, int col_)
      : std::runtime_error("line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ": unknown symbol '" + name + "'"),
        symbol(name) {}
};

// A finite system of polynomial equations over a ring: each polynomial has
// integer coefficients in the declared variables and is equated to zero.
struct RingSystem {
  std::string ringSpec;            // canonical ring spec string
  std::vector<std::string> vars;   // declaration order
  std::vector<Poly> polys;         // nvars() == vars.size(); each == 0
  const Ring* ring() const { return ring_parse_spec(ringSpec); }
};

// A finite system of word equations over a group context: words over the
// declared variables and constant generator letters, equated to identity.
struct GroupSystem {
  std::string system, rep, ringSpec;  // canonical context stamp
  std::vector<std::string> vars;      // declaration order
  std::vector<GWord> equations;       // each == identity
  const GroupContext* context() const { return GroupContext::get(system, rep, ringSpec); }
};

// Grammar (line oriented, '#' starts a comment):
//   ring <spec>;            or  group <system> <rep> <ringspec>;
//   var <name>[, <name>]*;          (zero or more declaration lines)
//   eq <expr> = <expr>;             (zero or more equations)
// Ring expressions use integers, variables, + - * ^ and parentheses.
// Group expressions use variables, x/w/h(<root>;<param>) letters,
// commutator sugar [a,b], parentheses, integer powers (v^-1), products by
// '*' or juxtaposition, and 1 or e for the identity.
RingSystem parse_ring_system(const std::string& text);
GroupSystem parse_group_system(const std::string& text);

// Canonical printers: parse(print(s)) reproduces s exactly, and
// print(parse(text)) is the canonical form of text.
std::string print_ring_system(const RingSystem& rs);
std::string print_group_system(const GroupSystem& gs);

// Substitute ring values for all variables (declaration order).
RElem eval_poly(const Ring& R, const Poly& p, const std::vector<RElem>& vals);

}  // namespace chevdioph
