#include <doctest.h>

#include "statbridge/errors.hpp"
#include "statbridge/guest/parser.hpp"

using namespace statbridge::guest;
using statbridge::error;

TEST_CASE("completeness tri-state") {
  CHECK(check_complete("S = 0") == Completeness::complete);
  CHECK(check_complete("for i in 1:10") == Completeness::incomplete);
  CHECK(check_complete("end") == Completeness::invalid);
  CHECK(check_complete("for i in 1:10\n  S += i\nend") == Completeness::complete);
  CHECK(check_complete("f(1, 2") == Completeness::incomplete);
  CHECK(check_complete("x[1") == Completeness::incomplete);
  CHECK(check_complete("\"an open string") == Completeness::incomplete);
  CHECK(check_complete("(]") == Completeness::invalid);
  CHECK(check_complete("x)") == Completeness::invalid);
  CHECK(check_complete("function f(a)\n  a\n") == Completeness::incomplete);
  CHECK(check_complete("function f(a)\n  a\nend") == Completeness::complete);
  // Balanced but unsupported block keywords parse-fail into `invalid`.
  CHECK(check_complete("if x\nend") == Completeness::invalid);
  CHECK(check_complete("while x\nend") == Completeness::invalid);
  CHECK(check_complete("begin\nend") == Completeness::invalid);
  CHECK(check_complete("x + ") == Completeness::invalid);
  CHECK(check_complete("1 +") == Completeness::invalid);
}

TEST_CASE("multi-line accumulation mirrors the continuation prompt") {
  std::string buffer = "reg(auto, term(price) + term(headroom),";
  CHECK(check_complete(buffer) == Completeness::incomplete);
  buffer += "\ncluster(turn))";
  CHECK(check_complete(buffer) == Completeness::complete);
}

TEST_CASE("suppression flag rides the final statement") {
  auto ast = parse("x = 1;");
  REQUIRE(ast->kind == NodeKind::Block);
  REQUIRE(ast->kids.size() == 1);
  CHECK(ast->kids[0]->kind == NodeKind::Assign);
  CHECK(ast->kids[0]->suppress);

  auto ast2 = parse("x = 1; y = 2");
  REQUIRE(ast2->kids.size() == 2);
  CHECK_FALSE(ast2->kids[1]->suppress);

  auto ast3 = parse("x = 1;\n");
  CHECK(ast3->kids[0]->suppress);
}

TEST_CASE("structure of the quadratic-form subscript expression") {
  auto ast = parse("X[i,j] * Q[j,k]");
  CHECK(dump(*ast) ==
        "(block (binop * (index (id X) (id i) (id j)) (index (id Q) (id j) (id k))))");
}

TEST_CASE("mask indexing over field access") {
  auto ast = parse("df.bmi[df.race .== r]");
  CHECK(dump(*ast) ==
        "(block (index (field bmi (id df)) (binop .== (field race (id df)) (id r))))");
}

TEST_CASE("broadcast call and string concat") {
  auto ast = parse("\"x\" .* string.(1:10)");
  CHECK(dump(*ast) ==
        "(block (binop .* (str \"x\") (call string dotted (range (int 1) (int 10)))))");
}

TEST_CASE("compound and dotted assignment operators") {
  CHECK(dump(*parse("S += i")) == "(block (assign += (id S) (id i)))");
  CHECK(dump(*parse("v ./= 2")) == "(block (assign /= dotted (id v) (int 2)))");
  CHECK(dump(*parse("retval[i] += x")) ==
        "(block (assign += (index (id retval) (id i)) (id x)))");
}

TEST_CASE("destructuring assignment") {
  CHECK(dump(*parse("N, M = size(X)")) ==
        "(block (assign (targets (id N) (id M)) (call size (id X))))");
}

TEST_CASE("function definition with nested loops parses") {
  const std::string src =
      "function XQX(Q, X)\n"
      "  N, M = size(X);\n"
      "  retval = zeros(N);\n"
      "  for i in 1:N\n"
      "    for j in 1:M\n"
      "      for k in 1:M\n"
      "        retval[i] += X[i,j] * Q[j,k] * X[i,k]\n"
      "      end\n"
      "    end\n"
      "  end;\n"
      "  return retval\n"
      "end";
  CHECK(check_complete(src) == Completeness::complete);
  auto ast = parse(src);
  REQUIRE(ast->kids.size() == 1);
  CHECK(ast->kids[0]->kind == NodeKind::FunctionDef);
  CHECK(ast->kids[0]->name == "XQX");
  CHECK(ast->kids[0]->strs == std::vector<std::string>{"Q", "X"});
}

TEST_CASE("single-line for with semicolons") {
  auto ast = parse("for i in 1:10; S += i; end");
  REQUIRE(ast->kids.size() == 1);
  CHECK(ast->kids[0]->kind == NodeKind::For);
}

TEST_CASE("literals, tuples, vectors, comments") {
  CHECK(dump(*parse("(74, 5)")) == "(block (call tuple (int 74) (int 5)))");
  CHECK(dump(*parse("[true, false]")) == "(block (vec (true) (false)))");
  CHECK(dump(*parse("x = 1  # trailing comment")) == "(block (assign (id x) (int 1)))");
  CHECK(dump(*parse("missing")) == "(block (missing))");
  CHECK(dump(*parse("nothing")) == "(block (nothing))");
  CHECK(dump(*parse("-2.5e3")) == "(block (unary - (float 2500.000000)))");
  CHECK(dump(*parse("\"a\\\"b\"")) == "(block (str \"a\"b\"))");
}

TEST_CASE("precedence: range binds tighter than comparison, looser than plus") {
  CHECK(dump(*parse("1:n+1")) == "(block (range (int 1) (binop + (id n) (int 1))))");
  CHECK(dump(*parse("x .== 1:3")) ==
        "(block (binop .== (id x) (range (int 1) (int 3))))");
}

TEST_CASE("syntax errors carry positions") {
  CHECK_THROWS_WITH_AS(parse("x = "), doctest::Contains("syntax error at"), error);
  CHECK_THROWS_WITH_AS(parse("1 + * 2"), doctest::Contains("syntax error"), error);
  CHECK_THROWS_WITH_AS(parse("if x\nend"), doctest::Contains("unsupported construct"), error);
  CHECK_THROWS_WITH_AS(parse("end"), doctest::Contains("unmatched 'end'"), error);
  CHECK_THROWS_WITH_AS(parse("3(4)"), doctest::Contains("only named functions"), error);
}
