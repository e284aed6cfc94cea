#include "doctest.h"

#include "oracles.hpp"
#include "polyshare/parser.hpp"

using namespace polyshare;
using namespace polyshare::ir;

namespace fixtures {

const char *example1 = R"(
# matrix addition followed by matrix multiplication
param n1 n2 n3;
array A[n1][n2] block 1;
array B[n1][n2] block 1;
array C[n1][n2] block 1;
array D[n2][n3] block 1;
array E[n1][n3] block 1;

for i in 0 .. n1 {
  for k in 0 .. n2 {
    s1: write C[i][k] <- A[i][k], B[i][k];
  }
}
for i in 0 .. n1 {
  for j in 0 .. n3 {
    for k in 0 .. n2 {
      s2: write E[i][j] <- C[i][k], D[k][j], E[i][j] when k >= 1;
    }
  }
}
)";

const char *oppositeDir = R"(
param n;
array A[n] block 1;
array B[n] block 1;
array C[n] block 1;

for i in 0 .. n {
  s1: write A[i] <- B[i];
  s2: write C[i] <- A[n-1-i];
}
)";

} // namespace fixtures

TEST_CASE("parse: Example 1 structure and iteration domain") {
  Program p = parse(fixtures::example1);
  REQUIRE(p.statements.size() == 2);
  CHECK(p.dBar == 3);
  CHECK(p.statements[0].label == "s1");
  CHECK(p.statements[0].depth() == 2);
  CHECK(p.statements[1].depth() == 3);
  REQUIRE(p.accesses.size() == 7);

  auto pts = p.statements[0].domain.enumerate({{"n1", 2}, {"n2", 3}, {"n3", 1}});
  CHECK(pts.size() == 6);

  // the guarded self-read of E exists and fires only for k >= 1
  const Access *selfRead = nullptr;
  for (const auto &a : p.accesses)
    if (a.id == "s2RE")
      selfRead = &a;
  REQUIRE(selfRead != nullptr);
  auto guardPts =
      selfRead->guard.enumerate({{"n1", 1}, {"n2", 3}, {"n3", 1}});
  CHECK(guardPts.size() == 2); // k in {1, 2}
}

TEST_CASE("parse: declarations only gives zero statements") {
  Program p = parse("param n;\narray A[n] block 4;\n");
  CHECK(p.statements.empty());
  CHECK(p.arrays.size() == 1);
  CHECK(p.arrays[0].blockBytes == 4);
}

TEST_CASE("parse: errors carry positions and diagnostics") {
  CHECK_THROWS_WITH_AS(parse("param n;\nfor i in 0 .. n {\n  s1: write Q[i] <- Q[i];\n}\n"),
                       doctest::Contains("undeclared array"), Error);
  CHECK_THROWS_WITH_AS(parse("param n;\narray A[n] block 1;\nfor i in 0 .. n {\n  s1: write A[i*i] <- A[i];\n}\n"),
                       doctest::Contains("non-affine"), Error);
  CHECK_THROWS_WITH_AS(
      parse("param n;\narray A[n] block 1;\nfor i in 0 .. n {\n  s1: write "
            "A[i] <- A[i];\n  s1: write A[i] <- A[i];\n}\n"),
      doctest::Contains("duplicate statement label"), Error);
}

TEST_CASE("finalize: a second write access is rejected") {
  Program p = parse("param n;\narray A[n] block 1;\nfor i in 0 .. n {\n  s1: "
                    "write A[i] <- A[i];\n}\n");
  Access extra = p.accesses[0]; // duplicate the write
  p.accesses.push_back(extra);
  CHECK_THROWS_WITH_AS(p.finalize(),
                       doctest::Contains("only one write access"), Error);
}

TEST_CASE("identical read tuples merge into one access") {
  Program p = parse("param n;\narray A[n] block 1;\narray B[n] block 1;\nfor "
                    "i in 0 .. n {\n  s1: write B[i] <- A[i], A[i];\n}\n");
  size_t reads = 0;
  for (const auto &a : p.accesses)
    if (a.kind == AccessKind::Read)
      ++reads;
  CHECK(reads == 1);
}

TEST_CASE("original order: Example 1 runs all of s1 before s2") {
  Program p = parse(fixtures::example1);
  Schedule order = originalOrder(p);
  std::map<std::string, Int> binding{{"n1", 2}, {"n2", 2}, {"n3", 2}};
  auto s1pts = p.statements[0].domain.enumerate(binding);
  auto s2pts = p.statements[1].domain.enumerate(binding);
  auto fullPoint = [&](const Statement &s, const poly::Point &iter) {
    poly::Point full(s.space->numCols(), 0);
    for (size_t i = 0; i < iter.size(); ++i)
      full[i] = iter[i];
    for (size_t i = s.depth(); i < s.space->numCols(); ++i)
      full[i] = binding.at(s.space->name(i));
    return full;
  };
  for (auto &a : s1pts)
    for (auto &b : s2pts) {
      auto ta = order.timeOf(0, fullPoint(p.statements[0], a));
      auto tb = order.timeOf(1, fullPoint(p.statements[1], b));
      CHECK(oracle::cmpTime(ta, tb) < 0);
    }
}

TEST_CASE("original order: same-body statements interleave by position") {
  Program p = parse(fixtures::oppositeDir);
  Schedule order = originalOrder(p);
  std::map<std::string, Int> binding{{"n", 3}};
  // (i=0, s2) precedes (i=1, s1)
  poly::Point x0{0, 3}, x1{1, 3};
  CHECK(oracle::cmpTime(order.timeOf(1, x0), order.timeOf(0, x1)) < 0);
  // and within one iteration s1 precedes s2
  CHECK(oracle::cmpTime(order.timeOf(0, x0), order.timeOf(1, x0)) < 0);
}

TEST_CASE("original order is a strict total order on instances") {
  for (const char *src : {fixtures::example1, fixtures::oppositeDir}) {
    Program p = parse(src);
    Schedule order = originalOrder(p);
    std::map<std::string, Int> binding{
        {"n", 3}, {"n1", 2}, {"n2", 2}, {"n3", 2}};
    std::vector<std::vector<Int>> times;
    for (const auto &s : p.statements) {
      std::map<std::string, Int> b;
      for (size_t i = s.depth(); i < s.space->numCols(); ++i)
        b[s.space->name(i)] = binding.at(s.space->name(i));
      for (auto &pt : s.domain.enumerate(b)) {
        poly::Point full = pt;
        for (size_t i = s.depth(); i < s.space->numCols(); ++i)
          full.push_back(binding.at(s.space->name(i)));
        times.push_back(order.timeOf(s.index, full));
      }
    }
    for (size_t i = 0; i < times.size(); ++i)
      for (size_t j = i + 1; j < times.size(); ++j)
        CHECK(oracle::cmpTime(times[i], times[j]) != 0);
  }
}

TEST_CASE("parse(print(p)) reproduces the program structurally") {
  for (const char *src : {fixtures::example1, fixtures::oppositeDir}) {
    Program p = parse(src);
    Program q = parse(print(p));
    REQUIRE(p.statements.size() == q.statements.size());
    REQUIRE(p.accesses.size() == q.accesses.size());
    CHECK(p.params == q.params);
    for (size_t i = 0; i < p.statements.size(); ++i) {
      CHECK(p.statements[i].label == q.statements[i].label);
      CHECK(p.statements[i].textualPath == q.statements[i].textualPath);
      CHECK(p.statements[i].loopVars == q.statements[i].loopVars);
    }
    for (size_t i = 0; i < p.accesses.size(); ++i) {
      CHECK(p.accesses[i].id == q.accesses[i].id);
      CHECK(p.accesses[i].phi == q.accesses[i].phi);
      // guards agree pointwise under a binding
      std::map<std::string, Int> binding{
          {"n", 3}, {"n1", 2}, {"n2", 2}, {"n3", 2}};
      std::map<std::string, Int> b;
      const auto &sp = p.accesses[i].guard.space();
      for (size_t c = sp->numIter(); c < sp->numCols(); ++c)
        b[sp->name(c)] = binding.at(sp->name(c));
      CHECK(p.accesses[i].guard.enumerate(b) ==
            q.accesses[i].guard.enumerate(b));
    }
  }
}
