// Sparse linear combinations over ParamScalar keyed by an integer basis label.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scr/scalar.hpp"

namespace scr {

using BasisKey = std::vector<int32_t>;
using Vec = std::map<BasisKey, ParamScalar>;

inline void add_to(Vec& v, const BasisKey& k, const ParamScalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = v.try_emplace(k, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) v.erase(it);
  }
}

inline void axpy(Vec& y, const ParamScalar& a, const Vec& x) {
  if (a.is_zero()) return;
  for (const auto& [k, c] : x) add_to(y, k, a * c);
}

inline Vec scaled(const Vec& x, const ParamScalar& a) {
  Vec y;
  axpy(y, a, x);
  return y;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec y = a;
  axpy(y, ParamScalar(-1), b);
  return y;
}

inline Vec basis_vec(const BasisKey& k) { return Vec{{k, ParamScalar(1)}}; }

inline std::string key_str(const BasisKey& k) {
  std::string s = "[";
  for (size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
  return s + "]";
}

}  // namespace scr
