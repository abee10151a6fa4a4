#include "chevdioph/rootsys.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "chevdioph/checked.hpp"

namespace chevdioph {

namespace {

using Vec = std::vector<long long>;

long long dot(const Vec& a, const Vec& b) {
  long long s = 0;
  for (size_t i = 0; i < a.size(); ++i) s = checked_add(s, checked_mul(a[i], b[i]));
  return s;
}

Vec unit(int dim, int i, long long c) {
  Vec v(dim, 0);
  v[i] = c;
  return v;
}

Vec add_vec(const Vec& a, const Vec& b) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[i] = a[i] + b[i];
  return v;
}

// Exact rational solve of S c = target where the columns of S are the
// simple roots; dimensions are at most 9 so plain fraction elimination is
// fine.  Returns the (unique) solution; throws if inconsistent.
std::vector<std::pair<long long, long long>> solve_simple_coords(
    const std::vector<Vec>& simples, const Vec& target) {
  size_t rows = target.size(), cols = simples.size();
  // augmented matrix of fractions (num, den)
  std::vector<std::vector<std::pair<long long, long long>>> m(
      rows, std::vector<std::pair<long long, long long>>(cols + 1));
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) m[r][c] = {simples[c][r], 1};
    m[r][cols] = {target[r], 1};
  }
  auto norm = [](std::pair<long long, long long>& f) {
    if (f.second < 0) { f.second = -f.second; f.first = -f.first; }
    long long g = gcd_ll(f.first, f.second);
    if (g > 1) { f.first /= g; f.second /= g; }
  };
  auto fsub = [&](std::pair<long long, long long> a, std::pair<long long, long long> b,
                  std::pair<long long, long long> k) {
    // a - b*k
    std::pair<long long, long long> bk{checked_mul(b.first, k.first), checked_mul(b.second, k.second)};
    std::pair<long long, long long> r{
        checked_sub(checked_mul(a.first, bk.second), checked_mul(bk.first, a.second)),
        checked_mul(a.second, bk.second)};
    norm(r);
    return r;
  };
  size_t lead = 0;
  std::vector<int> pivot_row(cols, -1);
  for (size_t c = 0; c < cols && lead < rows; ++c) {
    size_t pr = lead;
    while (pr < rows && m[pr][c].first == 0) ++pr;
    if (pr == rows) continue;
    std::swap(m[pr], m[lead]);
    // scale row to pivot 1
    auto piv = m[lead][c];
    for (size_t cc = 0; cc <= cols; ++cc) {
      auto& f = m[lead][cc];
      f = {checked_mul(f.first, piv.second), checked_mul(f.second, piv.first)};
      norm(f);
    }
    for (size_t r = 0; r < rows; ++r) {
      if (r == lead || m[r][c].first == 0) continue;
      auto k = m[r][c];
      for (size_t cc = 0; cc <= cols; ++cc) m[r][cc] = fsub(m[r][cc], m[lead][cc], k);
    }
    pivot_row[c] = static_cast<int>(lead);
    ++lead;
  }
  // consistency: zero rows must have zero rhs
  for (size_t r = lead; r < rows; ++r)
    if (m[r][cols].first != 0) throw std::runtime_error("root not in simple-root span");
  std::vector<std::pair<long long, long long>> sol(cols, {0, 1});
  for (size_t c = 0; c < cols; ++c)
    if (pivot_row[c] >= 0) sol[c] = m[pivot_row[c]][cols];
  return sol;
}

std::mutex g_rs_mutex;

}  // namespace

RootSystem::RootSystem(char family, int rank) : family_(family), rank_(rank) {
  auto bad = [&]() {
    throw illegal_rank_error(std::string("illegal type ") + family + std::to_string(rank));
  };
  if (rank < 1 || rank > 8) bad();
  std::vector<Vec> roots, simples;
  switch (family) {
    case 'A': {
      dim_ = rank + 1;
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          if (i != j) roots.push_back(add_vec(unit(dim_, i, 2), unit(dim_, j, -2)));
      for (int i = 0; i < rank; ++i)
        simples.push_back(add_vec(unit(dim_, i, 2), unit(dim_, i + 1, -2)));
      break;
    }
    case 'B': {
      if (rank < 2) bad();
      dim_ = rank;
      for (int i = 0; i < rank; ++i)
        for (long long s : {2LL, -2LL}) roots.push_back(unit(dim_, i, s));
      for (int i = 0; i < rank; ++i)
        for (int j = i + 1; j < rank; ++j)
          for (long long si : {2LL, -2LL})
            for (long long sj : {2LL, -2LL})
              roots.push_back(add_vec(unit(dim_, i, si), unit(dim_, j, sj)));
      for (int i = 0; i + 1 < rank; ++i)
        simples.push_back(add_vec(unit(dim_, i, 2), unit(dim_, i + 1, -2)));
      simples.push_back(unit(dim_, rank - 1, 2));
      break;
    }
    case 'C': {
      if (rank < 2) bad();
      dim_ = rank;
      for (int i = 0; i < rank; ++i)
        for (long long s : {4LL, -4LL}) roots.push_back(unit(dim_, i, s));
      for (int i = 0; i < rank; ++i)
        for (int j = i + 1; j < rank; ++j)
          for (long long si : {2LL, -2LL})
            for (long long sj : {2LL, -2LL})
              roots.push_back(add_vec(unit(dim_, i, si), unit(dim_, j, sj)));
      for (int i = 0; i + 1 < rank; ++i)
        simples.push_back(add_vec(unit(dim_, i, 2), unit(dim_, i + 1, -2)));
      simples.push_back(unit(dim_, rank - 1, 4));
      break;
    }
    case 'D': {
      if (rank < 4) bad();
      dim_ = rank;
      for (int i = 0; i < rank; ++i)
        for (int j = i + 1; j < rank; ++j)
          for (long long si : {2LL, -2LL})
            for (long long sj : {2LL, -2LL})
              roots.push_back(add_vec(unit(dim_, i, si), unit(dim_, j, sj)));
      for (int i = 0; i + 1 < rank; ++i)
        simples.push_back(add_vec(unit(dim_, i, 2), unit(dim_, i + 1, -2)));
      simples.push_back(add_vec(unit(dim_, rank - 2, 2), unit(dim_, rank - 1, 2)));
      break;
    }
    case 'G': {
      if (rank != 2) bad();
      dim_ = 3;
      // short: e_i - e_j; long: 2e_i - e_j - e_k (doubled below)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (i != j) roots.push_back(add_vec(unit(dim_, i, 2), unit(dim_, j, -2)));
      for (int i = 0; i < 3; ++i) {
        Vec v(3, -2);
        v[i] = 4;
        roots.push_back(v);
        Vec w(3, 2);
        w[i] = -4;
        roots.push_back(w);
      }
      simples.push_back(add_vec(unit(dim_, 0, 2), unit(dim_, 1, -2)));  // short
      Vec a2(3, 2);
      a2[0] = -4;
      simples.push_back(a2);  // long: -2e1+e2+e3
      break;
    }
    case 'F': {
      if (rank != 4) bad();
      dim_ = 4;
      for (int i = 0; i < 4; ++i)
        for (long long s : {2LL, -2LL}) roots.push_back(unit(dim_, i, s));
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          for (long long si : {2LL, -2LL})
            for (long long sj : {2LL, -2LL})
              roots.push_back(add_vec(unit(dim_, i, si), unit(dim_, j, sj)));
      for (int mask = 0; mask < 16; ++mask) {
        Vec v(4);
        for (int i = 0; i < 4; ++i) v[i] = (mask >> i) & 1 ? -1 : 1;
        roots.push_back(v);
      }
      simples.push_back(add_vec(unit(dim_, 1, 2), unit(dim_, 2, -2)));  // e2-e3
      simples.push_back(add_vec(unit(dim_, 2, 2), unit(dim_, 3, -2)));  // e3-e4
      simples.push_back(unit(dim_, 3, 2));                              // e4
      simples.push_back({1, -1, -1, -1});                               // (e1-e2-e3-e4)/2
      break;
    }
    case 'E': {
      if (rank < 6 || rank > 8) bad();
      dim_ = 8;
      std::vector<Vec> all;
      for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
          for (long long si : {2LL, -2LL})
            for (long long sj : {2LL, -2LL})
              all.push_back(add_vec(unit(dim_, i, si), unit(dim_, j, sj)));
      for (int mask = 0; mask < 256; ++mask) {
        if (__builtin_popcount(mask) % 2) continue;  // even number of minus signs
        Vec v(8);
        for (int i = 0; i < 8; ++i) v[i] = (mask >> i) & 1 ? -1 : 1;
        all.push_back(v);
      }
      std::vector<Vec> e8_simples = {
          {1, -1, -1, -1, -1, -1, -1, 1},
          {2, 2, 0, 0, 0, 0, 0, 0},
          {-2, 2, 0, 0, 0, 0, 0, 0},
          {0, -2, 2, 0, 0, 0, 0, 0},
          {0, 0, -2, 2, 0, 0, 0, 0},
          {0, 0, 0, -2, 2, 0, 0, 0},
          {0, 0, 0, 0, -2, 2, 0, 0},
          {0, 0, 0, 0, 0, -2, 2, 0},
      };
      if (rank == 8) {
        roots = all;
        simples = e8_simples;
      } else {
        // E6/E7 = the E8 roots supported on the first `rank` simples.
        simples.assign(e8_simples.begin(), e8_simples.begin() + rank);
        for (const auto& r : all) {
          try {
            auto sol = solve_simple_coords(e8_simples, r);
            bool ok = true;
            for (int c = rank; c < 8; ++c)
              if (sol[c].first != 0) ok = false;
            if (ok) roots.push_back(r);
          } catch (...) {
          }
        }
      }
      break;
    }
    default:
      bad();
  }
  build_roots(std::move(roots), std::move(simples));
}

void RootSystem::build_roots(std::vector<Vec> roots, std::vector<Vec> simples) {
  struct Entry {
    Vec coords;
    std::vector<long long> simple;
    int height;
  };
  std::vector<Entry> pos;
  for (auto& r : roots) {
    auto sol = solve_simple_coords(simples, r);
    std::vector<long long> coef(sol.size());
    long long h = 0;
    for (size_t i = 0; i < sol.size(); ++i) {
      if (sol[i].second != 1)
        throw std::runtime_error("non-integral simple-root expansion (bad realization)");
      coef[i] = sol[i].first;
      h += sol[i].first;
    }
    if (h == 0) throw std::runtime_error("zero-height root (bad realization)");
    if (h > 0) pos.push_back({r, coef, static_cast<int>(h)});
  }
  std::sort(pos.begin(), pos.end(), [](const Entry& a, const Entry& b) {
    if (a.height != b.height) return a.height < b.height;
    return a.coords < b.coords;
  });
  npos_ = static_cast<int>(pos.size());
  roots_.clear();
  for (auto& e : pos) {
    roots_.push_back(e.coords);
    heights_.push_back(e.height);
    simple_coords_.push_back(e.simple);
  }
  for (auto& e : pos) {
    Vec nv(e.coords.size());
    std::vector<long long> nc(e.simple.size());
    for (size_t i = 0; i < nv.size(); ++i) nv[i] = -e.coords[i];
    for (size_t i = 0; i < nc.size(); ++i) nc[i] = -e.simple[i];
    roots_.push_back(nv);
    heights_.push_back(-e.height);
    simple_coords_.push_back(nc);
  }
  for (size_t i = 0; i < roots_.size(); ++i) index_[roots_[i]] = static_cast<int>(i);
  simples_.assign(rank_, -1);
  for (int i = 0; i < npos_; ++i) {
    if (heights_[i] != 1) continue;
    for (int s = 0; s < rank_; ++s)
      if (simple_coords_[i][s] == 1) simples_[s] = i;
  }
  for (int s = 0; s < rank_; ++s)
    if (simples_[s] < 0) throw std::runtime_error("missing simple root (bad realization)");
  int best = 0;
  for (int i = 1; i < npos_; ++i)
    if (heights_[i] > heights_[best]) best = i;
  highest_ = best;
}

bool RootSystem::is_simple(int idx) const {
  return idx < npos_ && heights_[idx] == 1;
}

long long RootSystem::length_sq(int idx) const { return dot(roots_.at(idx), roots_.at(idx)); }

int RootSystem::pairing(int a, int b) const {
  long long num = checked_mul(2, dot(roots_.at(a), roots_.at(b)));
  long long den = dot(roots_.at(b), roots_.at(b));
  return static_cast<int>(checked_div_exact(num, den, "Cartan pairing"));
}

int RootSystem::reflect(int a, int b) const {
  int c = pairing(a, b);
  Vec v = roots_.at(a);
  const Vec& rb = roots_.at(b);
  for (size_t i = 0; i < v.size(); ++i) v[i] -= c * rb[i];
  auto it = index_.find(v);
  if (it == index_.end()) throw std::runtime_error("reflection left the root system (bug)");
  return it->second;
}

int RootSystem::sum_index(int a, int b) const {
  Vec v = roots_.at(a);
  const Vec& rb = roots_.at(b);
  bool zero = true;
  for (size_t i = 0; i < v.size(); ++i) {
    v[i] += rb[i];
    if (v[i] != 0) zero = false;
  }
  if (zero) return -2;
  auto it = index_.find(v);
  return it == index_.end() ? -1 : it->second;
}

int RootSystem::index_of_coords(const Vec& v) const {
  auto it = index_.find(v);
  return it == index_.end() ? -1 : it->second;
}

int RootSystem::chain_down(int a, int b) const {
  // largest k >= 0 with b - k a still a root
  Vec v = roots_.at(b);
  const Vec& ra = roots_.at(a);
  int k = 0;
  while (true) {
    for (size_t i = 0; i < v.size(); ++i) v[i] -= ra[i];
    if (index_.find(v) == index_.end()) return k;
    ++k;
    if (k > 4) throw std::runtime_error("root chain too long (bug)");
  }
}

std::string RootSystem::root_name(int idx) const {
  for (int s = 0; s < rank_; ++s)
    if (simples_[s] == idx) return "a" + std::to_string(s + 1);
  for (int s = 0; s < rank_; ++s)
    if (negate(simples_[s]) == idx) return "-a" + std::to_string(s + 1);
  const Vec& v = roots_.at(idx);
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if (v[i] % 2 == 0)
      out += std::to_string(v[i] / 2);
    else
      out += std::to_string(v[i]) + "/2";
  }
  return out + "]";
}

int RootSystem::parse_root(const std::string& raw) const {
  std::string s;
  for (char c : raw)
    if (!isspace(static_cast<unsigned char>(c))) s += c;
  bool negated = false;
  if (!s.empty() && s[0] == '-' && s.size() > 1 && s[1] == 'a') {
    negated = true;
    s = s.substr(1);
  }
  if (!s.empty() && s[0] == 'a') {
    int i = std::stoi(s.substr(1));
    if (i < 1 || i > rank_) throw std::runtime_error("no simple root " + raw);
    int idx = simples_[i - 1];
    return negated ? negate(idx) : idx;
  }
  if (!s.empty() && s.front() == '[' && s.back() == ']') {
    Vec v;
    std::string body = s.substr(1, s.size() - 2);
    std::string tok;
    size_t start = 0;
    while (start <= body.size()) {
      auto comma = body.find(',', start);
      tok = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      long long num = 0, den = 1;
      auto slash = tok.find('/');
      if (slash != std::string::npos) {
        num = std::stoll(tok.substr(0, slash));
        den = std::stoll(tok.substr(slash + 1));
      } else {
        num = std::stoll(tok);
      }
      // entries are undoubled; internal storage is doubled
      if ((2 * num) % den != 0) throw std::runtime_error("bad root coordinate " + tok);
      v.push_back(2 * num / den);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (static_cast<int>(v.size()) != dim_)
      throw std::runtime_error("root vector has wrong dimension for this system");
    int idx = index_of_coords(v);
    if (idx < 0) throw std::runtime_error(raw + " is not a root of this system");
    return idx;
  }
  throw std::runtime_error("cannot parse root name: " + raw);
}

WeylGroup::WeylGroup(const RootSystem& rs, size_t cap) : rs_(&rs) {
  int n = rs.num_roots();
  std::vector<std::vector<int>> simple_perm;
  for (int s = 0; s < rs.rank(); ++s) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = rs.reflect(i, rs.simple_root(s));
    simple_perm.push_back(std::move(p));
  }
  std::vector<int> id(n);
  std::iota(id.begin(), id.end(), 0);
  elements_.push_back({id, {}});
  index_[id] = 0;
  std::deque<size_t> queue{0};
  while (!queue.empty()) {
    size_t cur = queue.front();
    queue.pop_front();
    for (int s = 0; s < rs.rank(); ++s) {
      // right multiplication w * s_alpha: apply s first, then w
      std::vector<int> np = compose(elements_[cur].perm, simple_perm[s]);
      if (index_.count(np)) continue;
      if (elements_.size() >= cap)
        throw cap_exceeded_error("Weyl group larger than cap " + std::to_string(cap));
      std::vector<int> w = elements_[cur].word;
      w.push_back(s);
      index_[np] = static_cast<int>(elements_.size());
      elements_.push_back({std::move(np), std::move(w)});
      queue.push_back(elements_.size() - 1);
    }
  }
  longest_ = 0;
  for (size_t i = 0; i < elements_.size(); ++i)
    if (elements_[i].word.size() > elements_[longest_].word.size()) longest_ = static_cast<int>(i);
}

std::vector<int> WeylGroup::compose(const std::vector<int>& u, const std::vector<int>& v) {
  std::vector<int> r(u.size());
  for (size_t i = 0; i < u.size(); ++i) r[i] = u[v[i]];
  return r;
}

int WeylGroup::find(const std::vector<int>& perm) const {
  auto it = index_.find(perm);
  return it == index_.end() ? -1 : it->second;
}

const RootSystem* root_system(char family, int rank) {
  static std::mutex mx;
  static std::map<std::pair<char, int>, std::unique_ptr<RootSystem>> cache;
  std::lock_guard<std::mutex> lk(mx);
  auto key = std::make_pair(family, rank);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<RootSystem>(family, rank)).first;
  return it->second.get();
}

const RootSystem* root_system(const std::string& name) {
  if (name.size() < 2) throw illegal_rank_error("bad root system name: " + name);
  char fam = static_cast<char>(toupper(static_cast<unsigned char>(name[0])));
  int rank;
  try {
    rank = std::stoi(name.substr(1));
  } catch (...) {
    throw illegal_rank_error("bad root system name: " + name);
  }
  return root_system(fam, rank);
}

const WeylGroup* weyl_group(const RootSystem* rs, size_t cap) {
  static std::mutex mx;
  static std::map<const RootSystem*, std::unique_ptr<WeylGroup>> cache;
  std::lock_guard<std::mutex> lk(mx);
  auto it = cache.find(rs);
  if (it == cache.end())
    it = cache.emplace(rs, std::make_unique<WeylGroup>(*rs, cap)).first;
  return it->second.get();
}

}  // namespace chevdioph
