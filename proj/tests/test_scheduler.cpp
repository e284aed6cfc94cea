#include "doctest.h"

#include "fixtures_inline.hpp"
#include "oracles.hpp"
#include "polyshare/parser.hpp"
#include "polyshare/scheduler.hpp"

#include <functional>

using namespace polyshare;
using namespace polyshare::sched;

namespace {

struct Pipeline {
  ir::Program program;
  analysis::ProgramRelations relations;
  Scheduler scheduler;

  explicit Pipeline(const char *src)
      : program(ir::parse(src)), relations(analysis::analyze(program)),
        scheduler(program, relations) {}
};

} // namespace

TEST_CASE("enumRow: spec cases and rank-feasibility oracle") {
  CHECK(enumRow(3, 3, 1, 0) == std::vector<int>{1});
  CHECK(enumRow(3, 2, 1, 0) == std::vector<int>{0, 1});
  CHECK(enumRow(3, 2, 3, 2) == std::vector<int>{0});

  // oracle: the enumeration tree must emit exactly the 0/1 sequences whose
  // total equals the statement depth
  for (size_t dBar = 1; dBar <= 4; ++dBar) {
    for (size_t ds = 1; ds <= dBar; ++ds) {
      std::set<std::vector<int>> emitted;
      std::function<void(size_t, size_t, std::vector<int>)> walk =
          [&](size_t j, size_t k, std::vector<int> prefix) {
            if (j > dBar) {
              emitted.insert(prefix);
              return;
            }
            for (int l : enumRow(dBar, ds, j, k)) {
              auto next = prefix;
              next.push_back(l);
              walk(j + 1, k + l, next);
            }
          };
      walk(1, 0, {});
      std::set<std::vector<int>> expect;
      for (size_t mask = 0; mask < (size_t(1) << dBar); ++mask) {
        std::vector<int> seq;
        size_t sum = 0;
        for (size_t b = 0; b < dBar; ++b) {
          int l = (mask >> b) & 1;
          seq.push_back(l);
          sum += l;
        }
        if (sum == ds)
          expect.insert(seq);
      }
      CHECK(emitted == expect);
    }
  }
}

TEST_CASE("findSchedule: empty set always has a legal schedule") {
  Pipeline pl(fixture::example1);
  auto plan = pl.scheduler.findSchedule({});
  REQUIRE(plan.has_value());
  std::map<std::string, Int> binding{{"n1", 2}, {"n2", 3}, {"n3", 2}};
  ir::Schedule original = ir::originalOrder(pl.program);
  CHECK(oracle::scheduleInjective(pl.program, plan->schedule, binding));
  CHECK(oracle::dependencesRespected(pl.program, original, plan->schedule,
                                     binding));
}

TEST_CASE("findSchedule: the triple set of Example 1") {
  Pipeline pl(fixture::example1);
  std::vector<std::string> triple{"s1WC->s2RC", "s2WE->s2RE", "s2WE->s2WE"};
  auto plan = pl.scheduler.findSchedule(triple);
  REQUIRE(plan.has_value());

  std::map<std::string, Int> binding{{"n1", 2}, {"n2", 3}, {"n3", 2}};
  ir::Schedule original = ir::originalOrder(pl.program);
  CHECK(oracle::scheduleInjective(pl.program, plan->schedule, binding));
  CHECK(oracle::dependencesRespected(pl.program, original, plan->schedule,
                                     binding));
  for (const auto &id : triple) {
    const auto *rel = pl.relations.byId(id);
    CHECK(oracle::realizationPattern(pl.program, plan->schedule, rel->source,
                                     rel->target,
                                     pl.relations.reducedExtents.at(id),
                                     binding));
  }
  // the merged loop orders s1 before s2 by the trailing constants
  CHECK(plan->schedule.byStmt.at(0).constant <
        plan->schedule.byStmt.at(1).constant);
}

TEST_CASE("findSchedule: incompatible self opportunities yield none") {
  Pipeline pl(fixture::example1);
  CHECK_FALSE(
      pl.scheduler.findSchedule({"s2WE->s2RE", "s2RC->s2RC"}).has_value());
}

TEST_CASE("apriori: Example 1 family contains the empty set and the triple") {
  Pipeline pl(fixture::example1);
  auto plans = pl.scheduler.aprioriSearch();
  REQUIRE(!plans.empty());
  CHECK(plans.front().realized.empty());

  std::set<std::vector<std::string>> family;
  for (const auto &p : plans)
    family.insert(p.realized);
  CHECK(family.count({"s1WC->s2RC", "s2WE->s2RE", "s2WE->s2WE"}) == 1);

  // downward closure
  for (const auto &s : family) {
    for (size_t skip = 0; skip < s.size(); ++skip) {
      std::vector<std::string> sub;
      for (size_t i = 0; i < s.size(); ++i)
        if (i != skip)
          sub.push_back(s[i]);
      CHECK(family.count(sub) == 1);
    }
  }

  // no returned set contains a known-infeasible pair
  for (const auto &s : family) {
    bool hasA = std::count(s.begin(), s.end(), "s2WE->s2RE") != 0;
    bool hasB = std::count(s.begin(), s.end(), "s2RC->s2RC") != 0;
    CHECK_FALSE((hasA && hasB));
  }
}

TEST_CASE("apriori: legality and realization across the whole family") {
  Pipeline pl(fixture::example1);
  auto plans = pl.scheduler.aprioriSearch();
  ir::Schedule original = ir::originalOrder(pl.program);
  std::map<std::string, Int> binding{{"n1", 2}, {"n2", 2}, {"n3", 2}};
  for (const auto &plan : plans) {
    CHECK(oracle::scheduleInjective(pl.program, plan.schedule, binding));
    CHECK(oracle::dependencesRespected(pl.program, original, plan.schedule,
                                       binding));
    for (const auto &id : plan.realized) {
      const auto *rel = pl.relations.byId(id);
      CHECK(oracle::realizationPattern(pl.program, plan.schedule, rel->source,
                                       rel->target,
                                       pl.relations.reducedExtents.at(id),
                                       binding));
    }
  }
}

TEST_CASE("apriori: determinism") {
  Pipeline pl(fixture::example1);
  auto a = pl.scheduler.aprioriSearch();
  auto b = pl.scheduler.aprioriSearch();
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].realized == b[i].realized);
    for (const auto &[stmt, ss] : a[i].schedule.byStmt) {
      const auto &tt = b[i].schedule.byStmt.at(stmt);
      CHECK(ss.constant == tt.constant);
      REQUIRE(ss.rows.size() == tt.rows.size());
      for (size_t r = 0; r < ss.rows.size(); ++r)
        CHECK(ss.rows[r] == tt.rows[r]);
    }
  }
}

TEST_CASE("apriori: two matmuls include the A-sharing merged plan") {
  Pipeline pl(fixture::twoMatmul);
  auto plans = pl.scheduler.aprioriSearch();
  std::set<std::vector<std::string>> family;
  for (const auto &p : plans)
    family.insert(p.realized);
  CHECK(family.count({"s1RA->s2RA", "s1WC->s1RC", "s1WC->s1WC", "s2WE->s2RE",
                      "s2WE->s2WE"}) == 1);

  ir::Schedule original = ir::originalOrder(pl.program);
  std::map<std::string, Int> binding{
      {"n1", 2}, {"n2", 2}, {"n3", 2}, {"n4", 2}};
  for (const auto &plan : plans) {
    CHECK(oracle::scheduleInjective(pl.program, plan.schedule, binding));
    CHECK(oracle::dependencesRespected(pl.program, original, plan.schedule,
                                       binding));
  }
}

TEST_CASE("constants: single statement gets constant zero") {
  Pipeline pl(fixture::tripleRead);
  auto plan = pl.scheduler.findSchedule({});
  REQUIRE(plan.has_value());
  CHECK(plan->schedule.byStmt.at(0).constant == 0);
}
