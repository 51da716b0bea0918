#include <gtest/gtest.h>

#include <random>

#include "maple/maple.hpp"
#include "test_support.hpp"

using namespace maple;
namespace mt = maple::testing;

namespace {

const char* kMinimal = R"({
  "name": "sum4", "n": 2, "m": 1,
  "A": [[1, 1]], "b": [4], "l": [0, 0], "u": [3, 3],
  "objective": {"type": "quadratic", "Q": [[2, 0], [0, 2]], "c": [-4, -4], "c0": 8}
})";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

std::string with(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

// Small QPLIB file in the documented ASCII layout.
std::string qplib(const std::string& type, const std::string& sense, const std::string& lhs_default,
                  const std::string& types_block = "") {
  return "TINY\n" + type + "\n" + sense +
         "\n"
         "3 # variables\n"
         "1 # constraints\n"
         "2 # objective quadratic nonzeros\n"
         "1 1 2\n"
         "3 2 1\n"
         "0 # default linear coefficient\n"
         "1 # non-default\n"
         "2 -3\n"
         "1.5 # constant\n"
         "3 # constraint nonzeros\n"
         "1 1 1\n"
         "1 2 1\n"
         "1 3 2\n"
         "1e30 # infinity\n" +
         lhs_default +
         " # default lhs\n"
         "0\n"
         "4 # default rhs\n"
         "0\n"
         "0 # default lower\n"
         "0\n"
         "3 # default upper\n"
         "1\n"
         "3 2\n" +
         types_block +
         "0 # starting x default\n"
         "0\n";
}

}  // namespace

TEST(EvalObjective, Examples) {
  const Objective q = mt::quadratic({{2, 0}, {0, 2}}, {0, 0});
  EXPECT_EQ(eval_objective(q, std::vector<std::int64_t>{1, 2}), 5.0);
  const Objective constant = mt::quadratic({{0, 0}, {0, 0}}, {0, 0}, 7);
  EXPECT_EQ(eval_objective(constant, std::vector<std::int64_t>{-9, 4}), 7.0);
  SeparableObjective s;
  s.terms = {Polynomial{{4, -4, 1}}, Polynomial{{4, -4, 1}}};
  EXPECT_EQ(eval_objective(Objective{s}, std::vector<std::int64_t>{3, 1}), 2.0);
  EXPECT_THROW(eval_objective(q, std::vector<std::int64_t>{1}), Error);
}

TEST(EvalObjective, ExactRationalAgreesWithDouble) {
  QuadraticObjective q;
  q.Q = {{Rational(1, 3), Rational(1, 2)}, {Rational(1, 2), Rational(-2, 7)}};
  q.c = {Rational(5, 4), Rational(-1, 9)};
  q.c0 = Rational(1, 10);
  q.refresh_cache();
  const Objective obj = q;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const std::vector<std::int64_t> x{mt::uniform_int(rng, -20, 20), mt::uniform_int(rng, -20, 20)};
    const double xd[2] = {static_cast<double>(x[0]), static_cast<double>(x[1])};
    const double exact = eval_objective_exact(obj, x).get_d();
    EXPECT_NEAR(eval_objective(obj, std::span<const double>(xd, 2)), exact, 1e-9 * std::max(1.0, std::abs(exact)));
    EXPECT_EQ(eval_objective(obj, x), exact);
  }
}

TEST(ParseInstance, Minimal) {
  const Problem p = parse_instance_json(kMinimal);
  EXPECT_EQ(p.name, "sum4");
  EXPECT_EQ(p.A, (IntegerMatrix{{1, 1}}));
  EXPECT_EQ(p.b, (IntVector{4}));
  EXPECT_EQ(p.l, (IntVector{0, 0}));
  EXPECT_EQ(p.u, (IntVector{3, 3}));
  EXPECT_EQ(eval_objective(p.objective, std::vector<std::int64_t>{2, 2}), 0.0);
}

TEST(ParseInstance, Errors) {
  const std::string base = kMinimal;
  EXPECT_EQ(kind_of([&] { parse_instance_json(with(base, R"("u": [3, 3])", R"("u": [3, -1])")); }),
            ErrorKind::BoundsError);
  const std::string dup = with(with(with(base, R"("m": 1)", R"("m": 2)"), "[[1, 1]]", "[[1, 1], [2, 2]]"),
                               R"("b": [4])", R"("b": [4, 8])");
  EXPECT_EQ(kind_of([&] { parse_instance_json(dup); }), ErrorKind::RankError);
  EXPECT_EQ(kind_of([&] { parse_instance_json(with(base, R"("b": [4], )", "")); }), ErrorKind::SchemaError);
  EXPECT_EQ(kind_of([&] { parse_instance_json(with(base, R"("b": [4])", R"("b": "four")")); }),
            ErrorKind::SchemaError);
  EXPECT_EQ(kind_of([&] { parse_instance_json(with(base, R"("n": 2)", R"("n": 3)")); }),
            ErrorKind::DimensionError);
  EXPECT_EQ(kind_of([&] { parse_instance_json(with(base, R"("l": [0, 0])", R"("l": [0])")); }),
            ErrorKind::DimensionError);
  EXPECT_EQ(kind_of([&] { parse_instance_json("{not json"); }), ErrorKind::SchemaError);
  EXPECT_EQ(kind_of([&] { parse_instance_json(with(base, R"("quadratic")", R"("cubic")")); }),
            ErrorKind::SchemaError);
}

TEST(ParseInstance, RejectsNonConvexSeparableTerm) {
  const std::string concave = with(kMinimal, R"({"type": "quadratic", "Q": [[2, 0], [0, 2]], "c": [-4, -4], "c0": 8})",
                                   R"({"type": "separable", "terms": [{"poly": [0, 0, -1]}, {"poly": [0, 0, 1]}]})");
  EXPECT_EQ(kind_of([&] { parse_instance_json(concave); }), ErrorKind::SchemaError);
}

TEST(ParseInstance, RationalEntries) {
  const Problem p = parse_instance_json(with(kMinimal, R"("c0": 8)", R"("c0": "1/3")"));
  EXPECT_EQ(eval_objective_exact(p.objective, std::vector<std::int64_t>{2, 2}), Rational(-23, 3));
  EXPECT_EQ(parse_rational("-2.25"), Rational(-9, 4));
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("1e2"), Rational(100));
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("abc"), Error);
}

TEST(ParseInstance, SymmetrizesQ) {
  const Problem p = parse_instance_json(with(kMinimal, "[[2, 0], [0, 2]]", "[[2, 1], [0, 2]]"));
  const auto& q = std::get<QuadraticObjective>(p.objective);
  EXPECT_EQ(q.Q[0][1], Rational(1, 2));
  EXPECT_EQ(q.Q[1][0], Rational(1, 2));
}

TEST(ParseInstance, WriteRoundTrip) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + rng() % 5;
    const std::size_t m = 1 + rng() % (n - 1);
    Objective obj = t % 2 ? Objective{mt::random_separable(rng, n, 0, 3)}
                          : Objective{mt::quadratic(std::vector<std::vector<long>>(n, std::vector<long>(n, t)),
                                                    std::vector<long>(n, -t), t)};
    const Problem p = mt::random_feasible_problem(rng, m, n, -4, 4, -2, 3, obj);
    const std::string text = write_instance_json(p);
    const Problem back = parse_instance_json(text);
    EXPECT_EQ(write_instance_json(back), text);
    EXPECT_EQ(back.A, p.A);
    EXPECT_EQ(back.b, p.b);
    EXPECT_EQ(back.l, p.l);
    EXPECT_EQ(back.u, p.u);
    for (const auto& x : mt::naive_feasible_points(p))
      ASSERT_EQ(eval_objective_exact(back.objective, x), eval_objective_exact(p.objective, x));
  }
}

TEST(ImportQplib, SmallIntegerInstance) {
  const Problem p = import_qplib(qplib("QIL", "minimize", "4"));
  EXPECT_EQ(p.name, "TINY");
  EXPECT_EQ(p.n(), 3u);
  EXPECT_EQ(p.m(), 1u);
  EXPECT_EQ(p.A, (IntegerMatrix{{1, 1, 2}}));
  EXPECT_EQ(p.b, (IntVector{4}));
  EXPECT_EQ(p.l, (IntVector{0, 0, 0}));
  EXPECT_EQ(p.u, (IntVector{3, 3, 2}));
  // x1^2 + x2 x3 - 3 x2 + 1.5
  EXPECT_EQ(eval_objective_exact(p.objective, std::vector<std::int64_t>{1, 1, 1}), Rational(1, 2));
  EXPECT_EQ(eval_objective_exact(p.objective, std::vector<std::int64_t>{2, 2, 0}), Rational(-1, 2));
}

TEST(ImportQplib, GeneralVariableTypes) {
  const Problem p = import_qplib(qplib("QGL", "minimize", "4", "1 # default type integer\n1\n3 2\n"));
  EXPECT_EQ(p.u, (IntVector{3, 3, 1}));
  EXPECT_EQ(kind_of([&] { import_qplib(qplib("QGL", "minimize", "4", "1\n1\n2 0\n")); }),
            ErrorKind::UnsupportedFeature);
}

TEST(ImportQplib, MaximizeIsNegated) {
  const Problem p = import_qplib(qplib("QIL", "maximize", "4"));
  EXPECT_NE(p.name.find("maximize"), std::string::npos);
  EXPECT_EQ(eval_objective_exact(p.objective, std::vector<std::int64_t>{1, 1, 1}), Rational(-1, 2));
}

TEST(ImportQplib, Rejections) {
  try {
    import_qplib(qplib("QIL", "minimize", "-1e30"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedFeature);
    EXPECT_NE(std::string(e.what()).find("inequality"), std::string::npos);
  }
  try {
    import_qplib(qplib("QCL", "minimize", "4"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnsupportedFeature);
    EXPECT_NE(std::string(e.what()).find("continuous"), std::string::npos);
  }
  EXPECT_EQ(kind_of([&] { import_qplib(qplib("QIQ", "minimize", "4")); }), ErrorKind::UnsupportedFeature);
  EXPECT_EQ(kind_of([&] { import_qplib("TINY\nQIL\n"); }), ErrorKind::SchemaError);
}

TEST(WriteReport, CanonicalAndRoundTrip) {
  SolveReport r;
  r.status = SolveStatus::Ok;
  r.best = Solution{{2, 2}, 0.0};
  r.all_finals = {{{1, 3}, 2.0}, {{2, 2}, 0.0}};
  r.trajectory_lengths = {1, 0};
  r.pool_size = 6;
  r.timings_ms = {{"augmentation", 1.25}, {"extraction", 10.5}, {"feasibility", 0.1}};
  const std::string text = write_report(r);
  EXPECT_EQ(write_report(r), text);
  const SolveReport copy = r;
  EXPECT_EQ(write_report(copy), text);
  EXPECT_EQ(parse_report(text), r);
  // Keys appear in sorted order.
  EXPECT_LT(text.find("\"all_finals\""), text.find("\"best\""));
  EXPECT_LT(text.find("\"pool_size\""), text.find("\"status\""));
}

TEST(WriteReport, NoFeasibleFound) {
  SolveReport r;
  r.status = SolveStatus::NoFeasibleFound;
  const std::string text = write_report(r);
  EXPECT_NE(text.find("\"status\": \"no_feasible_found\""), std::string::npos);
  EXPECT_NE(text.find("\"best\": null"), std::string::npos);
  EXPECT_EQ(parse_report(text), r);
}

TEST(Pool, RoundTripAndRestrict) {
  DirectionPool pool{2, 1, Box{{-3, -3}, {3, 3}}, {}};
  for (std::int64_t k = 1; k <= 3; ++k) pool.insert({k, -k});
  const std::string text = write_pool(pool);
  const auto back = parse_pool(text);
  EXPECT_EQ(back.directions, pool.directions);
  EXPECT_EQ(back.box.lo, pool.box.lo);
  EXPECT_EQ(write_pool(back), text);
  const auto small = restrict_pool(back, IntVector{0, 0}, IntVector{2, 2});
  EXPECT_EQ(small.directions, (DirectionSet{{-2, 2}, {-1, 1}, {1, -1}, {2, -2}}));
  EXPECT_THROW(parse_pool(R"({"n": 2, "m": 1, "box": {"lo": [0], "hi": [1, 1]}, "directions": []})"), Error);
}
