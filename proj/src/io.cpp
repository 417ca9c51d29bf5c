#include "ipbt/io.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "ipbt/errors.hpp"

namespace ipbt::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw InputError("ParseError", what); }

RationalVector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where + " must be an array");
  RationalVector v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    v.push_back(rational_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return v;
}

RationalMatrix matrix_from_json(const Json& j, int rows, int cols, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    parse_error(where + " must have " + std::to_string(rows) + " rows");
  }
  RationalMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto row = vector_from_json(j[r], where + "[" + std::to_string(r) + "]");
    if (static_cast<int>(row.size()) != cols) {
      parse_error(where + " row " + std::to_string(r + 1) + " must have " +
                  std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

int size_from_json(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    parse_error(std::string(key) + " must be an integer");
  }
  return j[key].get<int>();
}

}  // namespace

Json to_json(const Rational& r) {
  if (r.fits_int64()) return Json(r.to_int64());
  return Json(r.str());
}

Json to_json(const RationalVector& v) {
  Json j = Json::array();
  for (const auto& r : v) j.push_back(to_json(r));
  return j;
}

Json to_json(const RationalMatrix& m) {
  Json j = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    j.push_back(std::move(row));
  }
  return j;
}

Json to_json(const Allocation& g) { return Json{{"q", to_json(g.q())}, {"t", to_json(g.t())}}; }

Json to_json(const Environment& env) {
  return Json{{"x_size", env.x_size()}, {"y_size", env.y_size()},
              {"p1", to_json(env.p1())},   {"p2", to_json(env.p2())},
              {"v11", to_json(env.v11())}, {"v12", to_json(env.v12())},
              {"v21", to_json(env.v21())}, {"v22", to_json(env.v22())}};
}

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const std::invalid_argument&) {
      parse_error(where + ": not a rational: " + j.get<std::string>());
    }
  }
  parse_error(where + " must be an integer or a \"num/den\" string");
}

EnvironmentData environment_data_from_json(const Json& j) {
  if (!j.is_object()) parse_error("environment must be a JSON object");
  EnvironmentData d;
  d.x_size = size_from_json(j, "x_size");
  d.y_size = size_from_json(j, "y_size");
  for (const char* key : {"p1", "p2", "v11", "v12", "v21", "v22"}) {
    if (!j.contains(key)) parse_error(std::string("missing field ") + key);
  }
  d.p1 = vector_from_json(j["p1"], "p1");
  d.p2 = vector_from_json(j["p2"], "p2");
  d.v11 = vector_from_json(j["v11"], "v11");
  d.v12 = vector_from_json(j["v12"], "v12");
  d.v21 = vector_from_json(j["v21"], "v21");
  d.v22 = vector_from_json(j["v22"], "v22");
  return d;
}

Environment environment_from_json(const Json& j) {
  return Environment::build(environment_data_from_json(j));
}

Allocation allocation_from_json(const Environment& env, const Json& j) {
  if (!j.is_object() || !j.contains("q") || !j.contains("t")) {
    parse_error("allocation must be an object with q and t");
  }
  return Allocation::make(env, matrix_from_json(j["q"], env.x_size(), env.y_size(), "q"),
                          matrix_from_json(j["t"], env.x_size(), env.y_size(), "t"));
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    parse_error(path + ": " + e.what());
  }
}

Environment load_environment(const std::string& path) {
  return environment_from_json(read_json_file(path));
}

Allocation load_allocation(const Environment& env, const std::string& path) {
  return allocation_from_json(env, read_json_file(path));
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

std::string environment_digest(const Environment& env) {
  const std::string text = to_json(env).dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw VerificationError("Digest", "SHA-256 failed");
  }
  std::ostringstream hex;
  hex << std::hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.width(2);
    hex.fill('0');
    hex << static_cast<int>(md[i]);
  }
  return hex.str();
}

}  // namespace ipbt::io
