#pragma once

#include "polyshare/space.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyshare::poly {

/// A convex parametric integer polyhedron: a conjunction of affine
/// equalities (expr = 0) and inequalities (expr >= 0) over one VarSpace.
///
/// Strict inequalities are never stored; construct a < b as a <= b - 1
/// (integer variables). Emptiness is decided over the rationals by
/// Fourier-Motzkin elimination; membership of an integer point is decided
/// by direct evaluation.
class ConvexPolyhedron {
public:
  explicit ConvexPolyhedron(SpacePtr space) : space_(std::move(space)) {}

  static ConvexPolyhedron universe(SpacePtr space) {
    return ConvexPolyhedron(std::move(space));
  }

  const SpacePtr &space() const { return space_; }
  const std::vector<AffineExpr> &equalities() const { return eqs_; }
  const std::vector<AffineExpr> &inequalities() const { return ineqs_; }

  /// Add expr = 0.
  void addEquality(AffineExpr e);
  /// Add expr >= 0.
  void addInequality(AffineExpr e);
  /// Add lhs <rel> rhs with rel in {"<", "<=", "=", ">=", ">"}; strict
  /// relations are integer-normalized on the spot.
  void addRelation(const AffineExpr &lhs, const std::string &rel,
                   const AffineExpr &rhs);

  void append(const ConvexPolyhedron &other);

  bool containsPoint(const Point &p) const;

  /// True iff no rational point satisfies the constraints.
  bool isEmpty() const;

  /// True iff a constraint with all-zero coefficients is contradictory;
  /// cheap syntactic pre-test (normalization catches these on insertion).
  bool triviallyEmpty() const { return triviallyEmpty_; }

  /// Fourier-Motzkin projection: eliminate the given columns. The columns
  /// remain in the space with zero coefficients everywhere. Exact over the
  /// rationals.
  ConvexPolyhedron eliminate(const std::vector<size_t> &cols) const;

  /// Fold a parameter binding into the constraints (bound columns get zero
  /// coefficients). Missing names in `binding` are left symbolic.
  ConvexPolyhedron substituted(const std::map<std::string, Int> &binding) const;

  /// Rebuild over another space, mapping columns by (optionally renamed)
  /// name.
  ConvexPolyhedron mappedTo(const SpacePtr &target,
                            const std::map<std::string, std::string> &rename = {}) const;

  /// Promote inequalities that hold with equality over the whole piece.
  ConvexPolyhedron withImpliedEqualities() const;

  /// Rational bounds of one column implied by this piece alone (all other
  /// columns eliminated first). Returns {lower, upper}; absent optional
  /// means unbounded in that direction.
  std::pair<std::optional<Rat>, std::optional<Rat>> bounds(size_t col) const;

  /// Deterministic textual dump, one constraint per line
  /// ("expr = 0" lines first, then "expr >= 0" lines).
  std::string dump() const;

  /// Canonical identity string of the normalized constraint system; equal
  /// keys imply equal sets of constraints.
  std::string canonicalKey() const;

private:
  friend class PolySet;
  SpacePtr space_;
  std::vector<AffineExpr> eqs_;
  std::vector<AffineExpr> ineqs_;
  bool triviallyEmpty_ = false;

  bool insertNormalized(AffineExpr e, bool isEq);
};

/// A finite union of convex polyhedra over a common space. A point is a
/// member iff it lies in at least one piece; the empty union denotes the
/// empty set. Pieces are not kept disjoint.
class PolySet {
public:
  explicit PolySet(SpacePtr space) : space_(std::move(space)) {}
  PolySet(SpacePtr space, std::vector<ConvexPolyhedron> pieces);

  static PolySet universe(SpacePtr space) {
    PolySet s(space);
    s.pieces_.push_back(ConvexPolyhedron::universe(space));
    return s;
  }
  static PolySet empty(SpacePtr space) { return PolySet(std::move(space)); }
  static PolySet piece(ConvexPolyhedron p) {
    PolySet s(p.space());
    if (!p.triviallyEmpty())
      s.pieces_.push_back(std::move(p));
    return s;
  }

  const SpacePtr &space() const { return space_; }
  const std::vector<ConvexPolyhedron> &pieces() const { return pieces_; }

  void addPiece(ConvexPolyhedron p);

  bool containsPoint(const Point &p) const;
  bool isEmpty() const;

  PolySet intersect(const PolySet &other) const;
  PolySet unionWith(const PolySet &other) const;
  /// Pointwise set difference. The complement of a convex piece is the
  /// union over its negated constraints, each negation integer-normalized
  /// (e.g. not(e >= 0) becomes -e - 1 >= 0).
  PolySet subtract(const PolySet &other) const;

  PolySet substituted(const std::map<std::string, Int> &binding) const;
  PolySet mappedTo(const SpacePtr &target,
                   const std::map<std::string, std::string> &rename = {}) const;
  PolySet eliminate(const std::vector<size_t> &cols) const;

  /// Drop rationally-empty pieces.
  PolySet pruneEmptyPieces() const;

  /// Exact, duplicate-free, lexicographically sorted integer points of the
  /// iteration variables under a full parameter binding. Every iteration
  /// variable must be bounded after substitution, else an Eval error.
  std::vector<Point> enumerate(const std::map<std::string, Int> &binding) const;

  std::string dump() const;

private:
  SpacePtr space_;
  std::vector<ConvexPolyhedron> pieces_;
};

} // namespace polyshare::poly
