#include "polyshare/space.hpp"

#include <sstream>

namespace polyshare::poly {

VarSpace::VarSpace(std::vector<std::string> iterVars,
                   std::vector<std::string> params)
    : names_(std::move(iterVars)), numIter_(names_.size()) {
  names_.insert(names_.end(), params.begin(), params.end());
  for (size_t i = 0; i < names_.size(); ++i) {
    auto [it, inserted] = index_.emplace(names_[i], i);
    check(inserted, ErrorKind::Usage,
          "duplicate variable name in space: " + names_[i]);
  }
}

size_t VarSpace::indexOf(const std::string &name) const {
  auto it = index_.find(name);
  check(it != index_.end(), ErrorKind::Usage,
        "unknown variable in space: " + name);
  return it->second;
}

AffineExpr::AffineExpr(SpacePtr space, std::vector<Int> coeffs, Int constant)
    : space_(std::move(space)), coeffs_(std::move(coeffs)),
      constant_(std::move(constant)) {
  check(coeffs_.size() == space_->numCols(), ErrorKind::Usage,
        "coefficient vector does not match space arity");
}

bool AffineExpr::isConstant() const {
  for (const Int &c : coeffs_)
    if (c != 0)
      return false;
  return true;
}

AffineExpr AffineExpr::operator+(const AffineExpr &o) const {
  AffineExpr r = *this;
  r += o;
  return r;
}

AffineExpr AffineExpr::operator-(const AffineExpr &o) const {
  AffineExpr r = *this;
  r -= o;
  return r;
}

AffineExpr AffineExpr::operator-() const {
  AffineExpr r = *this;
  for (Int &c : r.coeffs_)
    c = -c;
  r.constant_ = -r.constant_;
  return r;
}

AffineExpr AffineExpr::operator*(const Int &k) const {
  AffineExpr r = *this;
  for (Int &c : r.coeffs_)
    c *= k;
  r.constant_ *= k;
  return r;
}

AffineExpr &AffineExpr::operator+=(const AffineExpr &o) {
  check(space_->sameAs(*o.space_), ErrorKind::Usage,
        "affine arithmetic across different spaces");
  for (size_t i = 0; i < coeffs_.size(); ++i)
    coeffs_[i] += o.coeffs_[i];
  constant_ += o.constant_;
  return *this;
}

AffineExpr &AffineExpr::operator-=(const AffineExpr &o) {
  check(space_->sameAs(*o.space_), ErrorKind::Usage,
        "affine arithmetic across different spaces");
  for (size_t i = 0; i < coeffs_.size(); ++i)
    coeffs_[i] -= o.coeffs_[i];
  constant_ -= o.constant_;
  return *this;
}

Int AffineExpr::eval(const Point &point) const {
  check(point.size() == coeffs_.size(), ErrorKind::Usage,
        "point arity does not match space");
  Int acc = constant_;
  for (size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0)
      acc += coeffs_[i] * point[i];
  return acc;
}

void AffineExpr::substitute(size_t col, const Int &value) {
  if (coeffs_[col] != 0) {
    constant_ += coeffs_[col] * value;
    coeffs_[col] = 0;
  }
}

AffineExpr AffineExpr::mappedTo(
    const SpacePtr &target,
    const std::map<std::string, std::string> &rename) const {
  AffineExpr out(target);
  out.constant_ = constant_;
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0)
      continue;
    const std::string &orig = space_->name(i);
    auto it = rename.find(orig);
    const std::string &name = it == rename.end() ? orig : it->second;
    out.coeffs_[target->indexOf(name)] += coeffs_[i];
  }
  return out;
}

void AffineExpr::reduceContent() {
  Int g = 0;
  for (const Int &c : coeffs_)
    g = gcdInt(g, c);
  g = gcdInt(g, constant_);
  if (g > 1) {
    for (Int &c : coeffs_)
      c /= g;
    constant_ /= g;
  }
}

Int AffineExpr::coeffGcd() const {
  Int g = 0;
  for (const Int &c : coeffs_)
    g = gcdInt(g, c);
  return g;
}

std::string AffineExpr::str() const {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    const Int &c = coeffs_[i];
    if (c == 0)
      continue;
    if (first) {
      if (c == -1)
        os << "-";
      else if (c != 1)
        os << c.str() << "*";
    } else {
      os << (c > 0 ? " + " : " - ");
      Int a = absInt(c);
      if (a != 1)
        os << a.str() << "*";
    }
    os << space_->name(i);
    first = false;
  }
  if (first) {
    os << constant_.str();
  } else if (constant_ != 0) {
    os << (constant_ > 0 ? " + " : " - ") << absInt(constant_).str();
  }
  return os.str();
}

} // namespace polyshare::poly
