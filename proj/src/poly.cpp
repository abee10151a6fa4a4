#include "chevdioph/poly.hpp"

#include <algorithm>
#include <stdexcept>

#include "chevdioph/checked.hpp"

namespace chevdioph {

int Poly::total_degree(const PolyTerm& t) {
  int d = 0;
  for (auto e : t.exps) d += static_cast<int>(e);
  return d;
}

bool gradedlex_less(const PolyTerm& a, const PolyTerm& b) {
  int da = Poly::total_degree(a), db = Poly::total_degree(b);
  if (da != db) return da < db;
  return a.exps < b.exps;
}

Poly Poly::constant(size_t nvars, long long c) {
  Poly p(nvars);
  if (c != 0) p.terms_.push_back({std::vector<uint32_t>(nvars, 0), c});
  return p;
}

Poly Poly::variable(size_t nvars, size_t idx) {
  if (idx >= nvars) throw std::runtime_error("poly variable index out of range");
  Poly p(nvars);
  std::vector<uint32_t> e(nvars, 0);
  e[idx] = 1;
  p.terms_.push_back({e, 1});
  return p;
}

long long Poly::constant_value() const {
  if (terms_.empty()) return 0;
  if (terms_.size() != 1 || total_degree(terms_[0]) != 0)
    throw std::runtime_error("poly is not constant");
  return terms_[0].coeff;
}

int Poly::degree() const {
  if (terms_.empty()) return -1;
  return total_degree(terms_.front());  // descending order: front is max
}

void Poly::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const PolyTerm& a, const PolyTerm& b) { return gradedlex_less(b, a); });
  std::vector<PolyTerm> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().exps == t.exps)
      out.back().coeff = checked_add(out.back().coeff, t.coeff);
    else
      out.push_back(t);
    if (!out.empty() && out.back().coeff == 0) out.pop_back();
  }
  terms_ = std::move(out);
}

void Poly::add_term(const std::vector<uint32_t>& exps, long long c) {
  if (exps.size() != nvars_) throw std::runtime_error("poly term arity mismatch");
  terms_.push_back({exps, c});
  normalize();
}

Poly Poly::operator+(const Poly& o) const {
  if (nvars_ != o.nvars_) throw std::runtime_error("poly arity mismatch");
  Poly r(nvars_);
  r.terms_ = terms_;
  r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
  r.normalize();
  return r;
}

Poly Poly::operator-() const {
  Poly r(nvars_);
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff = checked_sub(0, t.coeff);
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  if (nvars_ != o.nvars_) throw std::runtime_error("poly arity mismatch");
  Poly r(nvars_);
  r.terms_.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      PolyTerm t;
      t.exps.resize(nvars_);
      for (size_t i = 0; i < nvars_; ++i) t.exps[i] = a.exps[i] + b.exps[i];
      t.coeff = checked_mul(a.coeff, b.coeff);
      r.terms_.push_back(std::move(t));
    }
  r.normalize();
  return r;
}

Poly Poly::scaled(long long c) const {
  Poly r(nvars_);
  if (c == 0) return r;
  r.terms_ = terms_;
  for (auto& t : r.terms_) t.coeff = checked_mul(t.coeff, c);
  return r;
}

long long Poly::eval_ll(const std::vector<long long>& vals) const {
  if (vals.size() != nvars_) throw std::runtime_error("poly eval arity mismatch");
  long long acc = 0;
  for (const auto& t : terms_) {
    long long m = t.coeff;
    for (size_t i = 0; i < nvars_; ++i)
      for (uint32_t k = 0; k < t.exps[i]; ++k) m = checked_mul(m, vals[i]);
    acc = checked_add(acc, m);
  }
  return acc;
}

long long Poly::coeff_of(const std::vector<uint32_t>& exps) const {
  for (const auto& t : terms_)
    if (t.exps == exps) return t.coeff;
  return 0;
}

std::string Poly::to_string(const std::vector<std::string>& varnames) const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& t : terms_) {
    long long c = t.coeff;
    if (first) {
      if (c < 0) s += "-";
    } else {
      s += (c < 0) ? " - " : " + ";
    }
    first = false;
    long long ac = c < 0 ? -c : c;
    std::string mono;
    for (size_t i = 0; i < nvars_; ++i) {
      if (t.exps[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += varnames.at(i);
      if (t.exps[i] > 1) mono += "^" + std::to_string(t.exps[i]);
    }
    if (mono.empty()) {
      s += std::to_string(ac);
    } else {
      if (ac != 1) s += std::to_string(ac) + "*";
      s += mono;
    }
  }
  return s;
}

}  // namespace chevdioph
