#pragma once

/**
 * @file io.hpp
 * @brief Coefficient files, inline coefficient lists and fixed-precision
 * number formatting for CSV/JSON output.
 *
 * Coefficient file layout:
 *
 *     { "offset": -1, "coeffs": [[-0.5, 0.0], [1.0, 0.0]] }
 *
 * Extra top-level keys are ignored on input, so inversion results (which add
 * "side", "truncation_len" and "tail_bound") load back as plain elements.
 */

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shiftop/wiener.hpp"

namespace shiftop {

/// Input that cannot be turned into a valid element; message says where.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g, with "inf", "-inf" and "nan" spelled out.
inline std::string format_number(double x, int digits = 17) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline nlohmann::json to_json(const WienerElement& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (Complex c : f.coeffs()) coeffs.push_back({c.real(), c.imag()});
  return {{"offset", f.offset()}, {"coeffs", std::move(coeffs)}};
}

inline WienerElement wiener_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("top level: expected an object");
  if (!j.contains("offset") || !j["offset"].is_number_integer()) {
    throw InputError("field 'offset': expected an integer");
  }
  if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].empty()) {
    throw InputError("field 'coeffs': expected a nonempty array");
  }
  std::vector<Complex> c;
  const auto& arr = j["coeffs"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
        !e[1].is_number()) {
      throw InputError("field 'coeffs[" + std::to_string(i) +
                       "]': expected a [re, im] pair of numbers");
    }
    c.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return WienerElement(std::move(c), j["offset"].get<int>());
}

/// Parses coefficient JSON text; syntax errors report line and column.
inline WienerElement parse_wiener_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte ? e.byte - 1 : 0,
                                                  text.size());
    const auto before = text.substr(0, pos);
    const auto line = std::count(before.begin(), before.end(), '\n') + 1;
    const auto nl = before.rfind('\n');
    const auto col = pos - (nl == std::string_view::npos ? 0 : nl + 1) + 1;
    throw InputError("line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": malformed JSON");
  }
  return wiener_from_json(j);
}

inline WienerElement load_wiener_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open coefficient file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_wiener_json(ss.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// "1,-2,0.5" -> 1 - 2z + 0.5z^2.
inline WienerElement parse_inline_coeffs(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  for (int field = 0;; ++field) {
    const std::size_t comma = text.find(',', start);
    std::string token(text.substr(start, comma == std::string_view::npos
                                             ? std::string_view::npos
                                             : comma - start));
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size() || errno == ERANGE ||
        !std::isfinite(v)) {
      throw InputError("--coeffs field " + std::to_string(field) +
                       ": cannot parse '" + token + "' as a real number");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return WienerElement::from_real(values);
}

}  // namespace shiftop
