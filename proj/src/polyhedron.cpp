#include "polyshare/polyhedron.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace polyshare::poly {

namespace {

// Normalize a constraint in place. Returns:
//   0 = keep, 1 = trivially true (drop), -1 = trivially false.
int normalizeConstraint(AffineExpr &e, bool isEq) {
  if (e.isConstant()) {
    if (isEq)
      return e.constant() == 0 ? 1 : -1;
    return e.constant() >= 0 ? 1 : -1;
  }
  // Divide by the gcd of everything including the constant; this is safe
  // over the rationals (no integer tightening here).
  e.reduceContent();
  if (isEq) {
    // Sign-normalize: first nonzero coefficient positive.
    for (size_t i = 0; i < e.space()->numCols(); ++i) {
      if (e.coeff(i) == 0)
        continue;
      if (e.coeff(i) < 0)
        e = -e;
      break;
    }
  }
  return 0;
}

struct FMSystem {
  std::vector<AffineExpr> eqs;
  std::vector<AffineExpr> ineqs;
  bool infeasible = false;

  void add(AffineExpr e, bool isEq) {
    int v = normalizeConstraint(e, isEq);
    if (v == -1)
      infeasible = true;
    else if (v == 0)
      (isEq ? eqs : ineqs).push_back(std::move(e));
  }

  void dedup() {
    auto key = [](const AffineExpr &e) {
      std::string k;
      for (size_t i = 0; i < e.space()->numCols(); ++i) {
        k += e.coeff(i).str();
        k += ',';
      }
      k += e.constant().str();
      return k;
    };
    auto uniq = [&](std::vector<AffineExpr> &v) {
      std::set<std::string> seen;
      std::vector<AffineExpr> out;
      for (auto &e : v)
        if (seen.insert(key(e)).second)
          out.push_back(std::move(e));
      v = std::move(out);
    };
    uniq(eqs);
    uniq(ineqs);
  }

  // Eliminate one column exactly (rationals). Prefers substitution through
  // an equality; falls back to Fourier-Motzkin pairing on inequalities.
  void eliminate(size_t col) {
    if (infeasible)
      return;
    // Find the equality with the smallest |coeff| at col, if any.
    int eqIdx = -1;
    Int best;
    for (size_t i = 0; i < eqs.size(); ++i) {
      const Int &c = eqs[i].coeff(col);
      if (c == 0)
        continue;
      if (eqIdx < 0 || absInt(c) < best) {
        eqIdx = static_cast<int>(i);
        best = absInt(c);
      }
    }
    if (eqIdx >= 0) {
      AffineExpr pivot = eqs[eqIdx];
      eqs.erase(eqs.begin() + eqIdx);
      const Int c = pivot.coeff(col);
      const Int ac = absInt(c);
      auto substInto = [&](std::vector<AffineExpr> &v, bool isEq) {
        std::vector<AffineExpr> out;
        for (auto &f : v) {
          const Int d = f.coeff(col);
          AffineExpr g = d == 0 ? std::move(f)
                                : f * ac - pivot * (d * (c > 0 ? 1 : -1));
          int r = normalizeConstraint(g, isEq);
          if (r == -1)
            infeasible = true;
          else if (r == 0)
            out.push_back(std::move(g));
        }
        v = std::move(out);
      };
      substInto(eqs, true);
      substInto(ineqs, false);
      dedup();
      return;
    }
    // Fourier-Motzkin on inequalities.
    std::vector<AffineExpr> pos, neg, rest;
    for (auto &f : ineqs) {
      const Int &c = f.coeff(col);
      if (c > 0)
        pos.push_back(std::move(f));
      else if (c < 0)
        neg.push_back(std::move(f));
      else
        rest.push_back(std::move(f));
    }
    ineqs = std::move(rest);
    for (const auto &p : pos) {
      for (const auto &n : neg) {
        // p: a*v + e >= 0 (a>0), n: -b*v + f >= 0 (b>0)
        // combine: b*e + a*f >= 0
        AffineExpr g = p * (-n.coeff(col)) + n * p.coeff(col);
        int r = normalizeConstraint(g, false);
        if (r == -1) {
          infeasible = true;
          return;
        }
        if (r == 0)
          ineqs.push_back(std::move(g));
      }
    }
    dedup();
  }

  // Next column to eliminate among `cols`: cheapest first (equalities are
  // free; otherwise minimize the pos*neg product).
  static size_t pickNext(const FMSystem &sys, std::vector<size_t> &cols) {
    size_t bestI = 0;
    long bestCost = -1;
    for (size_t i = 0; i < cols.size(); ++i) {
      size_t col = cols[i];
      bool inEq = false;
      long p = 0, n = 0;
      for (const auto &e : sys.eqs)
        if (e.coeff(col) != 0) {
          inEq = true;
          break;
        }
      long cost;
      if (inEq) {
        cost = 0;
      } else {
        for (const auto &f : sys.ineqs) {
          if (f.coeff(col) > 0)
            ++p;
          else if (f.coeff(col) < 0)
            ++n;
        }
        cost = p * n + 1;
      }
      if (bestCost < 0 || cost < bestCost) {
        bestCost = cost;
        bestI = i;
      }
      if (cost == 0)
        break;
    }
    size_t col = cols[bestI];
    cols.erase(cols.begin() + bestI);
    return col;
  }
};

FMSystem toSystem(const ConvexPolyhedron &p) {
  FMSystem sys;
  sys.infeasible = p.triviallyEmpty();
  for (const auto &e : p.equalities())
    sys.add(e, true);
  for (const auto &e : p.inequalities())
    sys.add(e, false);
  return sys;
}

} // namespace

bool ConvexPolyhedron::insertNormalized(AffineExpr e, bool isEq) {
  int v = normalizeConstraint(e, isEq);
  if (v == -1) {
    triviallyEmpty_ = true;
    return false;
  }
  if (v == 1)
    return false;
  (isEq ? eqs_ : ineqs_).push_back(std::move(e));
  return true;
}

void ConvexPolyhedron::addEquality(AffineExpr e) {
  check(e.space()->sameAs(*space_), ErrorKind::Usage,
        "constraint space mismatch");
  insertNormalized(std::move(e), true);
}

void ConvexPolyhedron::addInequality(AffineExpr e) {
  check(e.space()->sameAs(*space_), ErrorKind::Usage,
        "constraint space mismatch");
  insertNormalized(std::move(e), false);
}

void ConvexPolyhedron::addRelation(const AffineExpr &lhs,
                                   const std::string &rel,
                                   const AffineExpr &rhs) {
  if (rel == "=") {
    addEquality(lhs - rhs);
  } else if (rel == "<=") {
    addInequality(rhs - lhs);
  } else if (rel == ">=") {
    addInequality(lhs - rhs);
  } else if (rel == "<") { // a < b  ~>  b - a - 1 >= 0
    AffineExpr e = rhs - lhs;
    e.setConstant(e.constant() - 1);
    addInequality(std::move(e));
  } else if (rel == ">") {
    AffineExpr e = lhs - rhs;
    e.setConstant(e.constant() - 1);
    addInequality(std::move(e));
  } else {
    fail(ErrorKind::Usage, "unknown relation: " + rel);
  }
}

void ConvexPolyhedron::append(const ConvexPolyhedron &other) {
  check(other.space_->sameAs(*space_), ErrorKind::Usage,
        "cannot combine polyhedra over different spaces");
  if (other.triviallyEmpty_)
    triviallyEmpty_ = true;
  for (const auto &e : other.eqs_)
    insertNormalized(e, true);
  for (const auto &e : other.ineqs_)
    insertNormalized(e, false);
}

bool ConvexPolyhedron::containsPoint(const Point &p) const {
  if (triviallyEmpty_)
    return false;
  for (const auto &e : eqs_)
    if (e.eval(p) != 0)
      return false;
  for (const auto &e : ineqs_)
    if (e.eval(p) < 0)
      return false;
  return true;
}

bool ConvexPolyhedron::isEmpty() const {
  if (triviallyEmpty_)
    return true;
  FMSystem sys = toSystem(*this);
  std::vector<size_t> cols;
  for (size_t i = 0; i < space_->numCols(); ++i)
    cols.push_back(i);
  while (!cols.empty() && !sys.infeasible) {
    size_t col = FMSystem::pickNext(sys, cols);
    sys.eliminate(col);
  }
  return sys.infeasible;
}

ConvexPolyhedron
ConvexPolyhedron::eliminate(const std::vector<size_t> &colsIn) const {
  FMSystem sys = toSystem(*this);
  std::vector<size_t> cols = colsIn;
  while (!cols.empty() && !sys.infeasible) {
    size_t col = FMSystem::pickNext(sys, cols);
    sys.eliminate(col);
  }
  ConvexPolyhedron out(space_);
  if (sys.infeasible) {
    out.triviallyEmpty_ = true;
    return out;
  }
  out.eqs_ = std::move(sys.eqs);
  out.ineqs_ = std::move(sys.ineqs);
  return out;
}

ConvexPolyhedron ConvexPolyhedron::substituted(
    const std::map<std::string, Int> &binding) const {
  ConvexPolyhedron out(space_);
  out.triviallyEmpty_ = triviallyEmpty_;
  auto apply = [&](const AffineExpr &in, bool isEq) {
    AffineExpr e = in;
    for (const auto &[name, value] : binding)
      if (space_->has(name))
        e.substitute(space_->indexOf(name), value);
    out.insertNormalized(std::move(e), isEq);
  };
  for (const auto &e : eqs_)
    apply(e, true);
  for (const auto &e : ineqs_)
    apply(e, false);
  return out;
}

ConvexPolyhedron ConvexPolyhedron::mappedTo(
    const SpacePtr &target,
    const std::map<std::string, std::string> &rename) const {
  ConvexPolyhedron out(target);
  out.triviallyEmpty_ = triviallyEmpty_;
  for (const auto &e : eqs_)
    out.insertNormalized(e.mappedTo(target, rename), true);
  for (const auto &e : ineqs_)
    out.insertNormalized(e.mappedTo(target, rename), false);
  return out;
}

ConvexPolyhedron ConvexPolyhedron::withImpliedEqualities() const {
  ConvexPolyhedron out(space_);
  out.triviallyEmpty_ = triviallyEmpty_;
  out.eqs_ = eqs_;
  for (size_t i = 0; i < ineqs_.size(); ++i) {
    // e >= 0 is an implied equality iff this piece has no point with e >= 1.
    ConvexPolyhedron probe = *this;
    AffineExpr strict = ineqs_[i];
    strict.setConstant(strict.constant() - 1);
    probe.insertNormalized(std::move(strict), false);
    if (probe.isEmpty())
      out.insertNormalized(ineqs_[i], true);
    else
      out.insertNormalized(ineqs_[i], false);
  }
  return out;
}

std::pair<std::optional<Rat>, std::optional<Rat>>
ConvexPolyhedron::bounds(size_t col) const {
  std::vector<size_t> others;
  for (size_t i = 0; i < space_->numCols(); ++i)
    if (i != col)
      others.push_back(i);
  ConvexPolyhedron proj = eliminate(others);
  std::optional<Rat> lo, hi;
  auto tighten = [&](const AffineExpr &e, bool isEq) {
    const Int &a = e.coeff(col);
    if (a == 0)
      return;
    Rat v = Rat(-e.constant()) / Rat(a);
    if (a > 0 || isEq)
      if (!lo || v > *lo)
        lo = v;
    if (a < 0 || isEq)
      if (!hi || v < *hi)
        hi = v;
  };
  for (const auto &e : proj.equalities())
    tighten(e, true);
  for (const auto &e : proj.inequalities())
    tighten(e, false);
  return {lo, hi};
}

std::string ConvexPolyhedron::dump() const {
  std::ostringstream os;
  if (triviallyEmpty_) {
    os << "false\n";
    return os.str();
  }
  std::vector<std::string> lines;
  for (const auto &e : eqs_)
    lines.push_back(e.str() + " = 0");
  std::sort(lines.begin(), lines.end());
  std::vector<std::string> ineqLines;
  for (const auto &e : ineqs_)
    ineqLines.push_back(e.str() + " >= 0");
  std::sort(ineqLines.begin(), ineqLines.end());
  lines.insert(lines.end(), ineqLines.begin(), ineqLines.end());
  for (const auto &l : lines)
    os << l << "\n";
  return os.str();
}

std::string ConvexPolyhedron::canonicalKey() const {
  if (triviallyEmpty_)
    return "<empty>";
  std::vector<std::string> keys;
  auto key = [](const AffineExpr &e, char tag) {
    std::string k(1, tag);
    for (size_t i = 0; i < e.space()->numCols(); ++i) {
      k += e.coeff(i).str();
      k += ',';
    }
    k += e.constant().str();
    return k;
  };
  for (const auto &e : eqs_)
    keys.push_back(key(e, 'E'));
  for (const auto &e : ineqs_)
    keys.push_back(key(e, 'I'));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::string out;
  for (const auto &k : keys) {
    out += k;
    out += ';';
  }
  return out;
}

PolySet::PolySet(SpacePtr space, std::vector<ConvexPolyhedron> pieces)
    : space_(std::move(space)) {
  for (auto &p : pieces)
    addPiece(std::move(p));
}

void PolySet::addPiece(ConvexPolyhedron p) {
  check(p.space()->sameAs(*space_), ErrorKind::Usage,
        "piece space does not match set space");
  if (!p.triviallyEmpty())
    pieces_.push_back(std::move(p));
}

bool PolySet::containsPoint(const Point &p) const {
  for (const auto &piece : pieces_)
    if (piece.containsPoint(p))
      return true;
  return false;
}

bool PolySet::isEmpty() const {
  for (const auto &piece : pieces_)
    if (!piece.isEmpty())
      return false;
  return true;
}

PolySet PolySet::intersect(const PolySet &other) const {
  check(other.space_->sameAs(*space_), ErrorKind::Usage,
        "intersect: operands over different spaces");
  PolySet out(space_);
  std::set<std::string> seen;
  for (const auto &a : pieces_) {
    for (const auto &b : other.pieces_) {
      ConvexPolyhedron c = a;
      c.append(b);
      if (c.triviallyEmpty() || !seen.insert(c.canonicalKey()).second)
        continue;
      if (!c.isEmpty())
        out.pieces_.push_back(std::move(c));
    }
  }
  return out;
}

PolySet PolySet::unionWith(const PolySet &other) const {
  check(other.space_->sameAs(*space_), ErrorKind::Usage,
        "union: operands over different spaces");
  PolySet out = *this;
  for (const auto &b : other.pieces_)
    out.pieces_.push_back(b);
  return out;
}

PolySet PolySet::subtract(const PolySet &other) const {
  check(other.space_->sameAs(*space_), ErrorKind::Usage,
        "subtract: operands over different spaces");
  std::vector<ConvexPolyhedron> current = pieces_;
  for (const auto &b : other.pieces_) {
    // Complement of b as negated-constraint pieces.
    std::vector<AffineExpr> negs;
    for (const auto &e : b.inequalities()) {
      AffineExpr n = -e;
      n.setConstant(n.constant() - 1);
      negs.push_back(std::move(n));
    }
    for (const auto &e : b.equalities()) {
      AffineExpr up = e;
      up.setConstant(up.constant() - 1);
      negs.push_back(std::move(up));
      AffineExpr dn = -e;
      dn.setConstant(dn.constant() - 1);
      negs.push_back(std::move(dn));
    }
    std::vector<ConvexPolyhedron> next;
    for (const auto &a : current) {
      for (const auto &neg : negs) {
        ConvexPolyhedron c = a;
        c.addInequality(neg);
        if (!c.triviallyEmpty() && !c.isEmpty())
          next.push_back(std::move(c));
      }
    }
    current = std::move(next);
    if (current.empty())
      break;
  }
  PolySet out(space_);
  out.pieces_ = std::move(current);
  return out;
}

PolySet PolySet::substituted(const std::map<std::string, Int> &binding) const {
  PolySet out(space_);
  for (const auto &p : pieces_)
    out.addPiece(p.substituted(binding));
  return out;
}

PolySet PolySet::mappedTo(const SpacePtr &target,
                          const std::map<std::string, std::string> &rename) const {
  PolySet out(target);
  for (const auto &p : pieces_)
    out.addPiece(p.mappedTo(target, rename));
  return out;
}

PolySet PolySet::eliminate(const std::vector<size_t> &cols) const {
  PolySet out(space_);
  for (const auto &p : pieces_)
    out.addPiece(p.eliminate(cols));
  return out;
}

PolySet PolySet::pruneEmptyPieces() const {
  PolySet out(space_);
  for (const auto &p : pieces_)
    if (!p.isEmpty())
      out.pieces_.push_back(p);
  return out;
}

std::vector<Point>
PolySet::enumerate(const std::map<std::string, Int> &binding) const {
  for (size_t i = space_->numIter(); i < space_->numCols(); ++i)
    check(binding.count(space_->name(i)) != 0, ErrorKind::Eval,
          "enumerate: missing binding for parameter " + space_->name(i));
  std::set<Point> points;
  const size_t n = space_->numIter();
  for (const auto &rawPiece : pieces_) {
    ConvexPolyhedron piece = rawPiece.substituted(binding);
    if (piece.triviallyEmpty() || piece.isEmpty())
      continue;
    // Bounding box per iteration variable; error on an unbounded direction.
    std::vector<Int> lo(n), hi(n);
    bool emptyBox = false;
    for (size_t v = 0; v < n && !emptyBox; ++v) {
      auto [l, h] = piece.bounds(v);
      check(l.has_value() && h.has_value(), ErrorKind::Eval,
            "enumerate: variable " + space_->name(v) +
                " is unbounded after substitution");
      lo[v] = ceilDiv(boost::multiprecision::numerator(*l),
                      boost::multiprecision::denominator(*l));
      hi[v] = floorDiv(boost::multiprecision::numerator(*h),
                       boost::multiprecision::denominator(*h));
      if (lo[v] > hi[v])
        emptyBox = true;
    }
    if (emptyBox)
      continue;
    // Scan the box, testing exact integer membership per point.
    Point p(space_->numCols(), 0);
    for (size_t i = space_->numIter(); i < space_->numCols(); ++i)
      p[i] = binding.at(space_->name(i));
    std::vector<Int> cur = lo;
    while (true) {
      for (size_t v = 0; v < n; ++v)
        p[v] = cur[v];
      if (piece.containsPoint(p))
        points.insert(Point(p.begin(), p.begin() + n));
      // advance odometer (last var fastest)
      size_t v = n;
      while (v > 0) {
        --v;
        if (cur[v] < hi[v]) {
          ++cur[v];
          for (size_t w = v + 1; w < n; ++w)
            cur[w] = lo[w];
          break;
        }
        if (v == 0) {
          v = n + 1;
          break;
        }
      }
      if (v == n + 1 || n == 0)
        break;
    }
  }
  return std::vector<Point>(points.begin(), points.end());
}

std::string PolySet::dump() const {
  std::ostringstream os;
  if (pieces_.empty()) {
    os << "{ }\n";
    return os.str();
  }
  for (size_t i = 0; i < pieces_.size(); ++i) {
    os << "piece " << i << ":\n";
    std::istringstream in(pieces_[i].dump());
    std::string line;
    while (std::getline(in, line))
      os << "  " << line << "\n";
  }
  return os.str();
}

} // namespace polyshare::poly
