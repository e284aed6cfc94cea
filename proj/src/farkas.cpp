#include "polyshare/farkas.hpp"

#include <algorithm>

namespace polyshare::poly {

BilinearForm::BilinearForm(SpacePtr pointSpace, SpacePtr coeffSpace)
    : pointSpace_(std::move(pointSpace)), coeffSpace_(std::move(coeffSpace)),
      constTerm_(coeffSpace_) {
  pointCoeffs_.assign(pointSpace_->numCols(), AffineExpr(coeffSpace_));
}

void BilinearForm::addVarTerm(size_t pointCol, const std::string &coeffVar,
                              int sign) {
  pointCoeffs_[pointCol] += AffineExpr::var(coeffSpace_, coeffVar, sign);
}

void BilinearForm::addConstVar(const std::string &coeffVar, int sign) {
  constTerm_ += AffineExpr::var(coeffSpace_, coeffVar, sign);
}

void BilinearForm::addConstInt(const Int &c) {
  constTerm_.setConstant(constTerm_.constant() + c);
}

AffineExpr
BilinearForm::instantiate(const std::map<std::string, Int> &coeffValues) const {
  Point cp(coeffSpace_->numCols(), 0);
  for (const auto &[name, v] : coeffValues)
    cp[coeffSpace_->indexOf(name)] = v;
  AffineExpr out(pointSpace_);
  for (size_t i = 0; i < pointCoeffs_.size(); ++i)
    out.setCoeff(i, pointCoeffs_[i].eval(cp));
  out.setConstant(constTerm_.eval(cp));
  return out;
}

ConvexPolyhedron farkasLinearize(const BilinearForm &form,
                                 const ConvexPolyhedron &domain) {
  check(domain.space()->sameAs(*form.pointSpace()), ErrorKind::Usage,
        "farkasLinearize: domain space does not match form");
  check(!domain.isEmpty(), ErrorKind::Usage,
        "farkasLinearize: empty domain (the lemma requires nonempty P)");

  const auto &ineqs = domain.inequalities();
  const auto &eqs = domain.equalities();
  const SpacePtr &coeffSpace = form.coeffSpace();

  // Combined space: the unknown coefficients plus one nonnegative
  // multiplier per inequality (and lambda_0), one free multiplier per
  // equality.
  std::vector<std::string> names = coeffSpace->names();
  const size_t nCoeff = names.size();
  names.push_back("lam#0");
  for (size_t k = 0; k < ineqs.size(); ++k)
    names.push_back("lam#" + std::to_string(k + 1));
  for (size_t j = 0; j < eqs.size(); ++j)
    names.push_back("mu#" + std::to_string(j));
  SpacePtr combined = VarSpace::make(names, {});

  auto lam = [&](size_t k) { return nCoeff + 1 + k; }; // k-th inequality
  const size_t lam0 = nCoeff;
  auto mu = [&](size_t j) { return nCoeff + 1 + ineqs.size() + j; };

  ConvexPolyhedron sys(combined);

  // Coefficient matching, one equation per point-space column:
  //   form_coeff(v) - sum_k lam_k * a_k[v] - sum_j mu_j * e_j[v] = 0
  for (size_t v = 0; v < form.pointSpace()->numCols(); ++v) {
    AffineExpr eq = form.pointCoeffs()[v].mappedTo(combined);
    for (size_t k = 0; k < ineqs.size(); ++k)
      eq.setCoeff(lam(k), eq.coeff(lam(k)) - ineqs[k].coeff(v));
    for (size_t j = 0; j < eqs.size(); ++j)
      eq.setCoeff(mu(j), eq.coeff(mu(j)) - eqs[j].coeff(v));
    sys.addEquality(std::move(eq));
  }
  // Constant matching:
  //   form_const - lam_0 - sum_k lam_k * b_k - sum_j mu_j * b_j = 0
  {
    AffineExpr eq = form.constTerm().mappedTo(combined);
    eq.setCoeff(lam0, eq.coeff(lam0) - 1);
    for (size_t k = 0; k < ineqs.size(); ++k)
      eq.setCoeff(lam(k), eq.coeff(lam(k)) - ineqs[k].constant());
    for (size_t j = 0; j < eqs.size(); ++j)
      eq.setCoeff(mu(j), eq.coeff(mu(j)) - eqs[j].constant());
    sys.addEquality(std::move(eq));
  }
  // Nonnegativity of the inequality multipliers.
  sys.addInequality(AffineExpr::var(combined, "lam#0"));
  for (size_t k = 0; k < ineqs.size(); ++k)
    sys.addInequality(
        AffineExpr::var(combined, "lam#" + std::to_string(k + 1)));

  // Eliminate every multiplier.
  std::vector<size_t> cols;
  for (size_t c = nCoeff; c < combined->numCols(); ++c)
    cols.push_back(c);
  ConvexPolyhedron reduced = sys.eliminate(cols);
  if (reduced.triviallyEmpty()) {
    ConvexPolyhedron out(coeffSpace);
    out.addInequality(AffineExpr::constant(coeffSpace, -1));
    return out;
  }
  return reduced.mappedTo(coeffSpace);
}

RowDiffBuilder::RowDiffBuilder(PolySet extent, SpacePtr coeffSpace)
    : extent_(std::move(extent)), coeffSpace_(std::move(coeffSpace)) {}

void RowDiffBuilder::addVarTerm(const std::string &extentVar,
                                const std::string &coeffVar, int sign) {
  varTerms_.push_back(
      {extent_.space()->indexOf(extentVar), {coeffVar, sign}});
}

void RowDiffBuilder::addConstVar(const std::string &coeffVar, int sign) {
  constTerms_.push_back({coeffVar, sign});
}

BilinearForm RowDiffBuilder::makeForm(const Int &extraConst,
                                      bool negated) const {
  BilinearForm f(extent_.space(), coeffSpace_);
  const int flip = negated ? -1 : 1;
  for (const auto &[col, term] : varTerms_)
    f.addVarTerm(col, term.first, term.second * flip);
  for (const auto &[name, sign] : constTerms_)
    f.addConstVar(name, sign * flip);
  f.addConstInt(extraConst);
  return f;
}

PolySet RowDiffBuilder::constraints(LexMode mode, const Int &delta) const {
  check(!extent_.pieces().empty(), ErrorKind::Usage,
        "lex order constraints over an empty extent");
  PolySet out = PolySet::universe(coeffSpace_);
  for (const auto &piece : extent_.pieces()) {
    switch (mode) {
    case LexMode::Strict: // diff - 1 >= 0
      out = out.intersect(
          PolySet::piece(farkasLinearize(makeForm(-1, false), piece)));
      break;
    case LexMode::Weak: // diff >= 0
      out = out.intersect(
          PolySet::piece(farkasLinearize(makeForm(0, false), piece)));
      break;
    case LexMode::Equal:
    case LexMode::Delta: {
      const Int d = mode == LexMode::Equal ? Int(0) : delta;
      // diff - d >= 0 and d - diff >= 0
      out = out.intersect(
          PolySet::piece(farkasLinearize(makeForm(-d, false), piece)));
      out = out.intersect(
          PolySet::piece(farkasLinearize(makeForm(d, true), piece)));
      break;
    }
    }
  }
  return out;
}

namespace {

struct Sampler {
  const PolySet &set;
  Int bound;
  size_t n;

  // Rational feasibility of: first `fixed` vars pinned to `values`, every
  // later var confined to [-m, m] with m = min(bound, remaining budget).
  bool feasible(const std::vector<Int> &values, size_t fixed,
                const Int &remaining) const {
    Int m = remaining < bound ? remaining : bound;
    for (const auto &piece : set.pieces()) {
      ConvexPolyhedron p = piece;
      for (size_t i = 0; i < fixed; ++i) {
        AffineExpr e = AffineExpr::var(p.space(), p.space()->name(i));
        e.setConstant(-values[i]);
        p.addEquality(std::move(e));
      }
      for (size_t i = fixed; i < n; ++i) {
        AffineExpr v = AffineExpr::var(p.space(), p.space()->name(i));
        AffineExpr up = -v;
        up.setConstant(m);
        p.addInequality(std::move(up)); // v <= m
        v.setConstant(m);
        p.addInequality(std::move(v)); // v >= -m
      }
      if (!p.triviallyEmpty() && !p.isEmpty())
        return true;
    }
    return false;
  }

  bool search(std::vector<Int> &values, size_t idx, const Int &remaining) {
    if (idx == n) {
      Point p(values);
      return set.containsPoint(p);
    }
    Int m = remaining < bound ? remaining : bound;
    for (Int v = -m; v <= m; ++v) {
      values[idx] = v;
      Int rest = remaining - absInt(v);
      if (feasible(values, idx + 1, rest) && search(values, idx + 1, rest))
        return true;
    }
    return false;
  }
};

} // namespace

std::optional<std::vector<Int>> samplePoint(const PolySet &set, const Int &B) {
  check(B >= 1, ErrorKind::Usage, "samplePoint: bound must be >= 1");
  Sampler s{set, B, set.space()->numCols()};
  std::vector<Int> values(s.n, 0);
  if (!s.feasible(values, 0, B * Int(s.n)))
    return std::nullopt;
  Int maxBudget = B * Int(s.n);
  for (Int budget = 0; budget <= maxBudget; ++budget) {
    if (s.search(values, 0, budget))
      return values;
  }
  return std::nullopt;
}

} // namespace polyshare::poly
