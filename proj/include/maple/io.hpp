#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "maple/augmentation.hpp"
#include "maple/extraction.hpp"
#include "maple/problem.hpp"

namespace maple {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scalars

// Exact rational from "p/q", a decimal like "-1.25e3", or an integer.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  auto bad = [&]() -> Rational { fail(ErrorKind::SchemaError, "not a number: '" + s + "'"); };
  if (s.empty()) return bad();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational r;
    try {
      r = Rational(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
      return bad();
    }
    if (r.get_den() == 0) return bad();
    r.canonicalize();
    return r;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long exponent = 0;
  bool seen_digit = false;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    digits += s[pos++];
    seen_digit = true;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      digits += s[pos++];
      --exponent;
      seen_digit = true;
    }
  }
  if (!seen_digit) return bad();
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    long e = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos + (s[pos] == '+' ? 1 : 0),
                                     s.data() + s.size(), e);
    if (ec != std::errc() || ptr != s.data() + s.size()) return bad();
    exponent += e;
    pos = s.size();
  }
  if (pos != s.size()) return bad();
  Integer num(digits);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational r = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
  r.canonicalize();
  return negative ? -r : r;
}

inline std::string shortest_decimal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline Rational rational_from_json(const json& j, std::string_view field) {
  if (j.is_number_integer()) return Rational(Integer(j.dump()));
  if (j.is_number_float()) return parse_rational(shortest_decimal(j.get<double>()));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  fail(ErrorKind::SchemaError, std::string(field) + ": expected a number");
}

inline json rational_to_json(const Rational& r) {
  if (r.get_den() == 1 && IntegerMatrix::fits_int64(r.get_num()))
    return json(static_cast<std::int64_t>(r.get_num().get_si()));
  return json(r.get_str());
}

// ---------------------------------------------------------------------------
// Instance JSON

namespace detail {

inline const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    fail(ErrorKind::SchemaError, std::string("missing field '") + key + "'");
  return obj.at(key);
}

inline std::int64_t integer_value(const json& j, std::string_view what) {
  if (!j.is_number_integer())
    fail(ErrorKind::SchemaError, std::string(what) + ": expected an integer");
  return j.get<std::int64_t>();
}

inline IntVector int_vector(const json& j, std::string_view what) {
  if (!j.is_array()) fail(ErrorKind::SchemaError, std::string(what) + ": expected an array");
  IntVector out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(integer_value(v, what));
  return out;
}

inline std::vector<IntVector> int_rows(const json& j, std::string_view what) {
  if (!j.is_array()) fail(ErrorKind::SchemaError, std::string(what) + ": expected an array");
  std::vector<IntVector> out;
  for (const auto& row : j) out.push_back(int_vector(row, what));
  return out;
}

inline std::vector<Rational> rational_vector(const json& j, std::string_view what) {
  if (!j.is_array()) fail(ErrorKind::SchemaError, std::string(what) + ": expected an array");
  std::vector<Rational> out;
  for (const auto& v : j) out.push_back(rational_from_json(v, what));
  return out;
}

inline Objective parse_objective(const json& j) {
  const json& type = field(j, "type");
  if (!type.is_string()) fail(ErrorKind::SchemaError, "objective.type: expected a string");
  if (type == "quadratic") {
    QuadraticObjective q;
    const json& rows = field(j, "Q");
    if (!rows.is_array()) fail(ErrorKind::SchemaError, "objective.Q: expected an array");
    for (const auto& row : rows) q.Q.push_back(rational_vector(row, "objective.Q"));
    q.c = rational_vector(field(j, "c"), "objective.c");
    q.c0 = j.contains("c0") ? rational_from_json(j.at("c0"), "objective.c0") : Rational(0);
    q.refresh_cache();
    return q;
  }
  if (type == "separable") {
    SeparableObjective s;
    const json& terms = field(j, "terms");
    if (!terms.is_array()) fail(ErrorKind::SchemaError, "objective.terms: expected an array");
    for (const auto& t : terms)
      s.terms.push_back(Polynomial{rational_vector(field(t, "poly"), "objective.terms.poly")});
    return s;
  }
  fail(ErrorKind::SchemaError, "objective.type must be 'quadratic' or 'separable'");
}

inline json objective_to_json(const Objective& obj) {
  if (const auto* q = std::get_if<QuadraticObjective>(&obj)) {
    json rows = json::array();
    for (const auto& row : q->Q) {
      json r = json::array();
      for (const auto& v : row) r.push_back(rational_to_json(v));
      rows.push_back(std::move(r));
    }
    json c = json::array();
    for (const auto& v : q->c) c.push_back(rational_to_json(v));
    return {{"type", "quadratic"}, {"Q", rows}, {"c", c}, {"c0", rational_to_json(q->c0)}};
  }
  json terms = json::array();
  for (const auto& t : std::get<SeparableObjective>(obj).terms) {
    json poly = json::array();
    for (const auto& v : t.coeffs) poly.push_back(rational_to_json(v));
    terms.push_back({{"poly", poly}});
  }
  return {{"type", "separable"}, {"terms", terms}};
}

}  // namespace detail

inline Problem parse_instance_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::SchemaError, "instance must be a JSON object");
  Problem p;
  p.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "";
  const auto n = detail::integer_value(detail::field(j, "n"), "n");
  const auto m = detail::integer_value(detail::field(j, "m"), "m");
  const auto rows = detail::int_rows(detail::field(j, "A"), "A");
  if (n < 1 || m < 1) fail(ErrorKind::DimensionError, "n and m must be positive");
  if (rows.size() != static_cast<std::size_t>(m))
    fail(ErrorKind::DimensionError, "A has " + std::to_string(rows.size()) + " rows, m = " +
                                        std::to_string(m));
  for (const auto& r : rows)
    if (r.size() != static_cast<std::size_t>(n))
      fail(ErrorKind::DimensionError, "A row length differs from n = " + std::to_string(n));
  p.A = IntegerMatrix::from_rows(rows);
  p.b = detail::int_vector(detail::field(j, "b"), "b");
  p.l = detail::int_vector(detail::field(j, "l"), "l");
  p.u = detail::int_vector(detail::field(j, "u"), "u");
  p.objective = detail::parse_objective(detail::field(j, "objective"));
  validate(p);
  return p;
}

inline json instance_to_json(const Problem& p) {
  json a = json::array();
  for (std::size_t i = 0; i < p.m(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < p.n(); ++j) row.push_back(to_int64(p.A(i, j)));
    a.push_back(std::move(row));
  }
  return {{"name", p.name}, {"n", p.n()},   {"m", p.m()}, {"A", a},
          {"b", p.b},       {"l", p.l},     {"u", p.u},   {"objective", detail::objective_to_json(p.objective)}};
}

inline std::string write_instance_json(const Problem& p) { return instance_to_json(p).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Pool JSON

inline std::string write_pool(const DirectionPool& pool) {
  json dirs = json::array();
  for (const auto& g : pool.directions) dirs.push_back(g);
  json j{{"n", pool.n},
         {"m", pool.m},
         {"box", {{"lo", pool.box.lo}, {"hi", pool.box.hi}}},
         {"directions", dirs}};
  return j.dump() + "\n";
}

inline DirectionPool parse_pool(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  DirectionPool pool;
  pool.n = static_cast<std::size_t>(detail::integer_value(detail::field(j, "n"), "n"));
  pool.m = static_cast<std::size_t>(detail::integer_value(detail::field(j, "m"), "m"));
  const json& box = detail::field(j, "box");
  pool.box.lo = detail::int_vector(detail::field(box, "lo"), "box.lo");
  pool.box.hi = detail::int_vector(detail::field(box, "hi"), "box.hi");
  if (pool.box.lo.size() != pool.n || pool.box.hi.size() != pool.n)
    fail(ErrorKind::DimensionError, "pool box length differs from n");
  for (const auto& g : detail::int_rows(detail::field(j, "directions"), "directions")) {
    if (g.size() != pool.n) fail(ErrorKind::DimensionError, "pool direction length differs from n");
    pool.insert(g);
  }
  return pool;
}

// Sets the pool box to M for the given bounds and drops members outside it.
// Pools are reused across instances sharing A, whose bounds may differ.
inline DirectionPool restrict_pool(const DirectionPool& pool, std::span<const std::int64_t> l,
                                   std::span<const std::int64_t> u) {
  DirectionPool out{pool.n, pool.m, Box::difference_box(l, u), {}};
  for (const auto& g : pool.directions) out.insert(g);
  return out;
}

// ---------------------------------------------------------------------------
// Report JSON

inline std::string status_name(SolveStatus s) {
  return s == SolveStatus::Ok ? "ok" : "no_feasible_found";
}

inline json solution_to_json(const Solution& s) { return {{"x", s.x}, {"objective", s.objective}}; }

inline Solution solution_from_json(const json& j) {
  const json& obj = detail::field(j, "objective");
  if (!obj.is_number()) fail(ErrorKind::SchemaError, "objective: expected a number");
  return Solution{detail::int_vector(detail::field(j, "x"), "x"), obj.get<double>()};
}

// Canonical JSON: keys in sorted order, finals in report order (maple_solve
// sorts them by x), timings in milliseconds.
inline std::string write_report(const SolveReport& r) {
  json finals = json::array();
  for (const auto& s : r.all_finals) finals.push_back(solution_to_json(s));
  json timings = json::object();
  for (const auto& [k, v] : r.timings_ms) timings[k] = v;
  json j{{"status", status_name(r.status)},
         {"best", r.best ? solution_to_json(*r.best) : json(nullptr)},
         {"all_finals", finals},
         {"trajectory_lengths", r.trajectory_lengths},
         {"pool_size", r.pool_size},
         {"timings_ms", timings}};
  return j.dump(2) + "\n";
}

inline SolveReport parse_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  SolveReport r;
  const std::string status = detail::field(j, "status").get<std::string>();
  if (status == "ok") {
    r.status = SolveStatus::Ok;
  } else if (status == "no_feasible_found") {
    r.status = SolveStatus::NoFeasibleFound;
  } else {
    fail(ErrorKind::SchemaError, "unknown status '" + status + "'");
  }
  const json& best = detail::field(j, "best");
  if (!best.is_null()) r.best = solution_from_json(best);
  for (const auto& s : detail::field(j, "all_finals")) r.all_finals.push_back(solution_from_json(s));
  for (const auto& t : detail::field(j, "trajectory_lengths"))
    r.trajectory_lengths.push_back(t.get<std::size_t>());
  r.pool_size = detail::field(j, "pool_size").get<std::size_t>();
  for (const auto& [k, v] : detail::field(j, "timings_ms").items()) r.timings_ms[k] = v.get<double>();
  return r;
}

// ---------------------------------------------------------------------------
// QPLIB

namespace detail {

// Token reader over QPLIB text: one logical record per line, anything after
// '#' or '%' ignored, blank lines skipped.
class QplibReader {
 public:
  explicit QplibReader(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (auto c = line.find_first_of("#%"); c != std::string::npos) line.erase(c);
      std::istringstream ls(line);
      std::vector<std::string> toks;
      for (std::string t; ls >> t;) toks.push_back(t);
      if (!toks.empty()) lines_.push_back(std::move(toks));
    }
  }

  const std::vector<std::string>& next(std::size_t min_tokens, std::string_view what) {
    if (pos_ >= lines_.size())
      fail(ErrorKind::SchemaError, "QPLIB: unexpected end of file reading " + std::string(what));
    const auto& l = lines_[pos_++];
    if (l.size() < min_tokens)
      fail(ErrorKind::SchemaError, "QPLIB: malformed line for " + std::string(what));
    return l;
  }

  std::string word(std::string_view what) { return next(1, what)[0]; }

  std::int64_t count(std::string_view what) {
    const auto& t = next(1, what)[0];
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || v < 0)
      fail(ErrorKind::SchemaError, "QPLIB: bad count for " + std::string(what) + ": " + t);
    return v;
  }

  Rational number(std::string_view what) { return parse_rational(next(1, what)[0]); }

  std::size_t index(const std::string& tok, std::size_t limit, std::string_view what) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || v < 1 || static_cast<std::size_t>(v) > limit)
      fail(ErrorKind::SchemaError, "QPLIB: index out of range in " + std::string(what) + ": " + tok);
    return static_cast<std::size_t>(v - 1);
  }

  // "default value, count, then count lines of (index, value)".
  std::vector<Rational> defaulted_vector(std::size_t size, std::string_view what) {
    std::vector<Rational> out(size, number(what));
    const auto k = count(what);
    for (std::int64_t e = 0; e < k; ++e) {
      const auto& l = next(2, what);
      out[index(l[0], size, what)] = parse_rational(l[1]);
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> lines_;
  std::size_t pos_ = 0;
};

inline std::int64_t integral(const Rational& r, std::string_view what) {
  if (r.get_den() != 1)
    fail(ErrorKind::UnsupportedFeature, std::string(what) + " is not integral: " + r.get_str());
  return to_int64(r.get_num());
}

}  // namespace detail

// Imports a QPLIB instance that fits min 1/2 x'Qx + c'x + c0, Ax = b,
// l <= x <= u, x integer. Anything else is rejected with UnsupportedFeature.
inline Problem import_qplib(std::string_view text) {
  detail::QplibReader in(text);
  Problem p;
  p.name = in.word("name");
  const std::string type = in.word("problem type");
  if (type.size() != 3) fail(ErrorKind::SchemaError, "QPLIB: problem type must have 3 letters");
  const char obj_type = type[0];
  const char var_type = type[1];
  const char con_type = type[2];
  if (var_type == 'C' || var_type == 'M')
    fail(ErrorKind::UnsupportedFeature, "QPLIB: continuous variables (type " + type + ")");
  if (con_type == 'N' || con_type == 'B')
    fail(ErrorKind::UnsupportedFeature, "QPLIB: no linear equality constraints (type " + type + ")");
  if (con_type != 'L')
    fail(ErrorKind::UnsupportedFeature, "QPLIB: quadratic constraints (type " + type + ")");

  std::string sense = in.word("objective sense");
  std::transform(sense.begin(), sense.end(), sense.begin(), ::tolower);
  if (sense != "minimize" && sense != "maximize")
    fail(ErrorKind::SchemaError, "QPLIB: unknown objective sense '" + sense + "'");
  const auto n = static_cast<std::size_t>(in.count("number of variables"));
  const auto m = static_cast<std::size_t>(in.count("number of constraints"));
  if (n == 0 || m == 0) fail(ErrorKind::DimensionError, "QPLIB: empty instance");

  QuadraticObjective q;
  q.Q.assign(n, std::vector<Rational>(n));
  if (obj_type != 'L') {
    const auto nnz = in.count("objective quadratic entries");
    for (std::int64_t e = 0; e < nnz; ++e) {
      const auto& l = in.next(3, "objective quadratic entry");
      const auto i = in.index(l[0], n, "objective quadratic entry");
      const auto j = in.index(l[1], n, "objective quadratic entry");
      const Rational v = parse_rational(l[2]);
      q.Q[i][j] = v;
      q.Q[j][i] = v;
    }
  }
  q.c = in.defaulted_vector(n, "objective linear coefficients");
  q.c0 = in.number("objective constant");

  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(n));
  const auto nnz = in.count("constraint linear entries");
  for (std::int64_t e = 0; e < nnz; ++e) {
    const auto& l = in.next(3, "constraint linear entry");
    a[in.index(l[0], m, "constraint entry")][in.index(l[1], n, "constraint entry")] =
        parse_rational(l[2]);
  }

  const Rational infinity = abs(in.number("infinity value"));
  const auto lhs = in.defaulted_vector(m, "constraint lower bounds");
  const auto rhs = in.defaulted_vector(m, "constraint upper bounds");

  std::vector<Rational> lo(n, Rational(0));
  std::vector<Rational> hi(n, Rational(1));
  if (var_type != 'B') {
    lo = in.defaulted_vector(n, "variable lower bounds");
    hi = in.defaulted_vector(n, "variable upper bounds");
  }
  if (var_type == 'G') {
    const auto types = in.defaulted_vector(n, "variable types");
    for (std::size_t j = 0; j < n; ++j) {
      if (types[j] == 0)
        fail(ErrorKind::UnsupportedFeature, "QPLIB: continuous variable " + std::to_string(j + 1));
      if (types[j] == 2) {
        if (lo[j] < 0) lo[j] = 0;
        if (hi[j] > 1) hi[j] = 1;
      }
    }
  }
  // Starting points and names follow; they carry nothing the model needs.

  for (std::size_t k = 0; k < m; ++k) {
    if (lhs[k] != rhs[k] || abs(lhs[k]) >= infinity)
      fail(ErrorKind::UnsupportedFeature,
           "QPLIB: inequality row " + std::to_string(k + 1) + " (" + lhs[k].get_str() + " <= . <= " +
               rhs[k].get_str() + ")");
  }
  for (std::size_t j = 0; j < n; ++j)
    if (abs(lo[j]) >= infinity || abs(hi[j]) >= infinity)
      fail(ErrorKind::UnsupportedFeature, "QPLIB: unbounded variable " + std::to_string(j + 1));

  std::vector<IntVector> rows(m, IntVector(n));
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < n; ++j)
      rows[k][j] = detail::integral(a[k][j], "QPLIB: constraint coefficient");
  p.A = IntegerMatrix::from_rows(rows);
  for (std::size_t k = 0; k < m; ++k) p.b.push_back(detail::integral(rhs[k], "QPLIB: right-hand side"));
  for (std::size_t j = 0; j < n; ++j) {
    // Integer variables: round bounds inward.
    Integer l_ceil, u_floor;
    mpz_cdiv_q(l_ceil.get_mpz_t(), lo[j].get_num_mpz_t(), lo[j].get_den_mpz_t());
    mpz_fdiv_q(u_floor.get_mpz_t(), hi[j].get_num_mpz_t(), hi[j].get_den_mpz_t());
    p.l.push_back(to_int64(l_ceil));
    p.u.push_back(to_int64(u_floor));
  }
  if (sense == "maximize") {
    for (auto& row : q.Q)
      for (auto& v : row) v = -v;
    for (auto& v : q.c) v = -v;
    q.c0 = -q.c0;
    p.name += " (maximize; objective negated)";
  }
  q.refresh_cache();
  p.objective = std::move(q);
  validate(p);
  return p;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

// Loads a native JSON instance, or a QPLIB file when the extension is .qplib.
inline Problem load_problem(const std::string& path) {
  const std::string text = read_file(path);
  if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".qplib") == 0) return import_qplib(text);
  return parse_instance_json(text);
}

}  // namespace maple
