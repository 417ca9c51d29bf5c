#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "ipbt/environment.hpp"
#include "ipbt/io.hpp"

namespace ipbt::testing {

inline std::string data_path(const std::string& name) {
  return std::string(IPBT_DATA_DIR) + "/" + name + ".json";
}

inline Environment load(const std::string& name) { return io::load_environment(data_path(name)); }

inline Rational R(const char* text) { return Rational::parse(text); }

inline RationalVector V(std::initializer_list<const char*> items) {
  RationalVector v;
  for (const char* s : items) v.push_back(R(s));
  return v;
}

inline RationalMatrix M(std::initializer_list<std::initializer_list<const char*>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.begin()->size());
  RationalMatrix m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (const char* s : row) m(i, j++) = R(s);
    ++i;
  }
  return m;
}

inline Allocation A(const Environment& env, RationalMatrix q, RationalMatrix t) {
  return Allocation::make(env, std::move(q), std::move(t));
}

}  // namespace ipbt::testing
