#pragma once

#include "polyshare/error.hpp"
#include "polyshare/numeric.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace polyshare::poly {

/// A variable space: an ordered list of iteration variables followed by an
/// ordered list of parameters, plus the implicit constant column. Every
/// AffineExpr and ConvexPolyhedron references exactly one VarSpace. Names
/// must be unique across both lists.
class VarSpace {
public:
  VarSpace(std::vector<std::string> iterVars, std::vector<std::string> params);

  static std::shared_ptr<const VarSpace>
  make(std::vector<std::string> iterVars, std::vector<std::string> params) {
    return std::make_shared<const VarSpace>(std::move(iterVars),
                                            std::move(params));
  }

  size_t numIter() const { return numIter_; }
  size_t numParams() const { return names_.size() - numIter_; }
  size_t numCols() const { return names_.size(); }

  const std::string &name(size_t col) const { return names_[col]; }
  const std::vector<std::string> &names() const { return names_; }
  bool isIter(size_t col) const { return col < numIter_; }
  bool isParam(size_t col) const { return col >= numIter_; }

  bool has(const std::string &name) const { return index_.count(name) != 0; }
  size_t indexOf(const std::string &name) const;

  bool sameAs(const VarSpace &other) const { return names_ == other.names_; }

private:
  std::vector<std::string> names_; // iter vars first, then params
  size_t numIter_;
  std::map<std::string, size_t> index_;
};

using SpacePtr = std::shared_ptr<const VarSpace>;

/// Point with one exact integer per space column (iter vars and params).
using Point = std::vector<Int>;

/// An integer affine expression over a VarSpace: sum of coeff*var plus a
/// constant. Evaluation at an integer point is exact.
class AffineExpr {
public:
  explicit AffineExpr(SpacePtr space)
      : space_(std::move(space)), coeffs_(space_->numCols(), 0), constant_(0) {}
  AffineExpr(SpacePtr space, std::vector<Int> coeffs, Int constant);

  static AffineExpr constant(SpacePtr space, Int c) {
    AffineExpr e(std::move(space));
    e.constant_ = std::move(c);
    return e;
  }
  static AffineExpr var(SpacePtr space, const std::string &name, Int coeff = 1) {
    AffineExpr e(space);
    e.coeffs_[space->indexOf(name)] = std::move(coeff);
    return e;
  }

  const SpacePtr &space() const { return space_; }
  const Int &coeff(size_t col) const { return coeffs_[col]; }
  const Int &coeffOf(const std::string &name) const {
    return coeffs_[space_->indexOf(name)];
  }
  void setCoeff(size_t col, Int v) { coeffs_[col] = std::move(v); }
  const Int &constant() const { return constant_; }
  void setConstant(Int v) { constant_ = std::move(v); }

  bool isConstant() const;
  bool isZero() const { return isConstant() && constant_ == 0; }

  AffineExpr operator+(const AffineExpr &o) const;
  AffineExpr operator-(const AffineExpr &o) const;
  AffineExpr operator-() const;
  AffineExpr operator*(const Int &k) const;
  AffineExpr &operator+=(const AffineExpr &o);
  AffineExpr &operator-=(const AffineExpr &o);

  bool operator==(const AffineExpr &o) const {
    return coeffs_ == o.coeffs_ && constant_ == o.constant_;
  }

  Int eval(const Point &point) const;

  /// Fold `value` in for column `col` (the coefficient becomes zero and the
  /// constant absorbs coeff*value).
  void substitute(size_t col, const Int &value);

  /// Rebuild this expression over `target`, matching columns by name. Every
  /// column with a nonzero coefficient must exist in the target space.
  AffineExpr mappedTo(const SpacePtr &target,
                      const std::map<std::string, std::string> &rename = {}) const;

  /// Divide all coefficients and the constant by their content gcd.
  void reduceContent();

  /// Content gcd of coefficients only (not the constant); 0 if all zero.
  Int coeffGcd() const;

  std::string str() const;

private:
  SpacePtr space_;
  std::vector<Int> coeffs_;
  Int constant_;
};

} // namespace polyshare::poly
