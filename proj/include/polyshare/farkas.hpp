#pragma once

#include "polyshare/polyhedron.hpp"

#include <optional>

namespace polyshare::poly {

/// An affine form over a point space whose per-column coefficients (and
/// constant) are themselves affine expressions over a space of unknown
/// schedule coefficients. This is the "theta * x" shape that the affine
/// form of the Farkas lemma linearizes.
class BilinearForm {
public:
  BilinearForm(SpacePtr pointSpace, SpacePtr coeffSpace);

  const SpacePtr &pointSpace() const { return pointSpace_; }
  const SpacePtr &coeffSpace() const { return coeffSpace_; }
  const std::vector<AffineExpr> &pointCoeffs() const { return pointCoeffs_; }
  const AffineExpr &constTerm() const { return constTerm_; }

  /// coefficient(pointCol) += sign * coeffVar
  void addVarTerm(size_t pointCol, const std::string &coeffVar, int sign);
  /// constant term += sign * coeffVar
  void addConstVar(const std::string &coeffVar, int sign);
  /// constant term += c
  void addConstInt(const Int &c);

  /// Plug concrete coefficient values in; result is affine over the point
  /// space. Used by tests and by the scheduler once a row is sampled.
  AffineExpr instantiate(const std::map<std::string, Int> &coeffValues) const;

private:
  SpacePtr pointSpace_;
  SpacePtr coeffSpace_;
  std::vector<AffineExpr> pointCoeffs_;
  AffineExpr constTerm_;
};

/// Affine form of the Farkas lemma: the exact set of coefficient vectors
/// for which form(x) >= 0 for every x in `domain`. The nonnegative
/// multipliers lambda_0..lambda_p (and free multipliers for equalities) are
/// internal temporaries, eliminated by Fourier-Motzkin before returning.
/// The domain must be nonempty (usage error otherwise).
ConvexPolyhedron farkasLinearize(const BilinearForm &form,
                                 const ConvexPolyhedron &domain);

/// Row-difference constraint modes at one schedule depth.
enum class LexMode {
  Strict, // difference >= 1 at this depth (integer form of "> 0")
  Weak,   // difference >= 0
  Equal,  // difference == 0
  Delta,  // difference == delta (a concrete integer)
};

/// Describes the schedule-row value difference
///     theta_target(x') - theta_source(x)
/// over an extent polyhedron in the product space: which coefficient-space
/// unknown multiplies each extent column, and which unknowns form the
/// constant term. For a self relation the two rows share unknowns, so
/// parameter and constant terms cancel automatically.
class RowDiffBuilder {
public:
  RowDiffBuilder(PolySet extent, SpacePtr coeffSpace);

  const PolySet &extent() const { return extent_; }
  const SpacePtr &coeffSpace() const { return coeffSpace_; }

  void addVarTerm(const std::string &extentVar, const std::string &coeffVar,
                  int sign);
  void addConstVar(const std::string &coeffVar, int sign);

  /// Constraints on the row coefficients so that for all pairs in the
  /// extent the difference satisfies `mode` (with `delta` for LexMode::Delta).
  /// Empty extents are a usage error (the Farkas lemma needs nonempty P).
  PolySet constraints(LexMode mode, const Int &delta = 0) const;

private:
  BilinearForm makeForm(const Int &extraConst, bool negated) const;

  PolySet extent_;
  SpacePtr coeffSpace_;
  std::vector<std::pair<size_t, std::pair<std::string, int>>> varTerms_;
  std::vector<std::pair<std::string, int>> constTerms_;
};

/// The member integer vector of `set` with all entries in [-B, B] that
/// minimizes the sum of absolute values, ties broken lexicographically
/// smallest; nullopt when no member lies in the box. B >= 1 required.
std::optional<std::vector<Int>> samplePoint(const PolySet &set, const Int &B);

} // namespace polyshare::poly
