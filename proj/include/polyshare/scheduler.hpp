#pragma once

#include "polyshare/analysis.hpp"
#include "polyshare/farkas.hpp"

#include <optional>

namespace polyshare::sched {

/// A candidate plan: the exact set of sharing opportunities the schedule is
/// committed to exploit (sorted relation ids) plus the schedule itself.
/// Downstream stages exploit only this set, even when the schedule happens
/// to enable more.
struct PlanCandidate {
  std::vector<std::string> realized;
  ir::Schedule schedule;
};

/// Row-independence enumeration with the rank-feasibility guard: {0} once
/// the statement's rank is saturated, {1} when the remaining rows are all
/// needed to reach rank d_s, {} when the rank can no longer be reached, and
/// {0, 1} otherwise, trying dependent first.
std::vector<int> enumRow(size_t dBar, size_t ds, size_t rowIndex,
                         size_t independentSoFar);

/// The search core. Precomputes the Farkas-linearized constraint polyhedra
/// per relation (weak/strict for dependences over their pruned extents,
/// equal/consecutive for opportunities over their reduced extents) once,
/// then answers FindSchedule queries by intersecting them depth by depth.
class Scheduler {
public:
  Scheduler(const ir::Program &p, const analysis::ProgramRelations &rels,
            Int coefficientBound = 3);

  const poly::SpacePtr &coeffSpace() const { return coeffSpace_; }
  const Int &coefficientBound() const { return bound_; }

  /// Schedule-row coefficient variable for one column of a statement's
  /// extended iteration vector ("#c" marks the constant column).
  static std::string coeffVar(const std::string &stmtLabel,
                              const std::string &column);

  /// FindSchedule: a legal schedule realizing exactly the opportunity set
  /// `q` (relation ids) while satisfying every dependence, or nullopt.
  std::optional<PlanCandidate>
  findSchedule(const std::vector<std::string> &q) const;

  /// Apriori-like level-wise enumeration of feasible opportunity sets.
  /// The result includes the empty set (the unmodified original order) and
  /// is downward closed; deterministic order: by level, then by sorted id
  /// list.
  std::vector<PlanCandidate> aprioriSearch() const;

private:
  struct RelationConstraints {
    poly::PolySet weak;   // dependences: difference >= 0 per depth
    poly::PolySet strict; // dependences: difference >= 1
    poly::PolySet equal;  // opportunities: difference == 0 (reduced extent)
    poly::PolySet consecutive; // self opportunities at the deepest dim:
                               // == 1, or the +-1 union for R->R

    RelationConstraints()
        : weak(nullptr), strict(nullptr), equal(nullptr),
          consecutive(nullptr) {}
  };

  poly::RowDiffBuilder diffBuilder(const analysis::SharingRelation &rel,
                                   const poly::PolySet &extent) const;
  poly::PolySet statementRowConstraint(
      const ir::Statement &s, const std::vector<std::vector<Int>> &priorRows,
      bool independent) const;
  std::optional<ir::Schedule>
  assignConstants(const std::vector<std::string> &q,
                  const std::vector<const analysis::SharingRelation *>
                      &residualDeps,
                  std::map<size_t, ir::StatementSchedule> rows) const;

  const ir::Program &program_;
  const analysis::ProgramRelations &relations_;
  Int bound_;
  poly::SpacePtr coeffSpace_;
  std::map<std::string, RelationConstraints> table_;
  std::vector<const analysis::SharingRelation *> dependences_;
};

} // namespace polyshare::sched
