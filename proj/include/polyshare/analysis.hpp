#pragma once

#include "polyshare/ir.hpp"

#include <optional>

namespace polyshare::analysis {

enum class Multiplicity { OneOne, OneMany, ManyOne, ManyMany };

std::string multiplicityName(Multiplicity m);

/// A classified co-access: an ordered pair of accesses to the same array
/// with a nonempty extent polyhedron over the product space
/// (source vars, primed target vars, params). Kind R->W makes a dependence
/// only, R->R an opportunity only, W->R and W->W both.
struct SharingRelation {
  size_t source = 0; // access indices into Program::accesses
  size_t target = 0;
  std::string id; // "s1WC->s2RC"
  ir::AccessKind sourceKind = ir::AccessKind::Read;
  ir::AccessKind targetKind = ir::AccessKind::Read;
  bool dependence = false;
  bool opportunity = false;
  bool self = false; // same statement on both sides
  poly::PolySet extent;
  std::optional<Multiplicity> multiplicity; // opportunities, pre-reduction

  SharingRelation() : extent(nullptr) {}

  std::string kindString() const;
};

/// Product space of a co-access pair: source statement variables as-is,
/// target variables suffixed with a prime, shared parameters.
struct PairSpace {
  poly::SpacePtr space;
  std::map<std::string, std::string> targetRename;
};

PairSpace makePairSpace(const ir::Program &p, size_t srcStmt, size_t tgtStmt,
                        const std::string &suffix = "'");

/// All ordered pairs of accesses to the same array, including self pairs.
/// (Reads with identical tuples were merged at parse time.)
std::vector<std::pair<size_t, size_t>> coAccesses(const ir::Program &p);

/// The extent polyhedron of a co-access under the original order: instance
/// pairs with equal block subscripts, both guards satisfied, and strict
/// original-order precedence (expanded into a union over depths). The
/// implicit parameter context (params >= 1) is conjoined.
poly::PolySet extent(const ir::Program &p, const ir::Schedule &order,
                     size_t srcAcc, size_t tgtAcc);

/// Classification per Definitions 2-3; nullopt when the extent is empty.
std::optional<SharingRelation> classify(const ir::Program &p,
                                        const ir::Schedule &order,
                                        size_t srcAcc, size_t tgtAcc);

/// No-write-in-between: remove every pair separated by an intermediate
/// write to the same block. Ordering is access-phase refined (within one
/// instance reads execute before the write), so a same-instance write does
/// interfere with a preceding read. Applies to dependences (as redundancy
/// elimination) and to opportunities alike.
poly::PolySet pruneNoWriteInBetween(const ir::Program &p,
                                    const ir::Schedule &order,
                                    const SharingRelation &rel);

/// Symbolic multiplicity of an extent: which sides are functionally
/// determined (decided by rational emptiness of a doubled-relation test).
Multiplicity classifyMultiplicity(const ir::Program &p,
                                  const SharingRelation &rel);

/// Reduce an opportunity to one-one form: nearest-in-time pinning for the
/// "many" side (one-many/many-one), rank-preserving offset pairing of free
/// variables first for many-many. The result is a subset of the input
/// extent.
poly::PolySet reduceMultiplicity(const ir::Program &p,
                                 const ir::Schedule &order,
                                 const SharingRelation &rel,
                                 Multiplicity mult);

/// The preprocessed relation tables the optimizer consumes.
struct ProgramRelations {
  std::vector<SharingRelation> relations; // post-pruning, original extents
  std::map<std::string, poly::PolySet> reducedExtents; // opportunities only

  std::vector<const SharingRelation *> dependences() const;
  std::vector<const SharingRelation *> opportunities() const;
  const SharingRelation *byId(const std::string &id) const;
};

/// Full preprocessing pipeline: enumerate co-accesses, build extents,
/// classify, prune, classify multiplicity, reduce opportunities.
ProgramRelations analyze(const ir::Program &p);

} // namespace polyshare::analysis
