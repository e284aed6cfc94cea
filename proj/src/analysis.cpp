#include "polyshare/analysis.hpp"

#include <algorithm>
#include <sstream>

namespace polyshare::analysis {

using ir::Access;
using ir::AccessKind;
using ir::Program;
using ir::Schedule;
using ir::Statement;
using poly::AffineExpr;
using poly::ConvexPolyhedron;
using poly::PolySet;
using poly::SpacePtr;

std::string multiplicityName(Multiplicity m) {
  switch (m) {
  case Multiplicity::OneOne:
    return "one-one";
  case Multiplicity::OneMany:
    return "one-many";
  case Multiplicity::ManyOne:
    return "many-one";
  case Multiplicity::ManyMany:
    return "many-many";
  }
  return "?";
}

std::string SharingRelation::kindString() const {
  std::string s(1, ir::accessKindChar(sourceKind));
  s += "->";
  s += ir::accessKindChar(targetKind);
  return s;
}

PairSpace makePairSpace(const Program &p, size_t srcStmt, size_t tgtStmt,
                        const std::string &suffix) {
  const Statement &s = p.statement(srcStmt);
  const Statement &t = p.statement(tgtStmt);
  std::vector<std::string> vars = s.loopVars;
  PairSpace out;
  for (const auto &v : t.loopVars) {
    out.targetRename[v] = v + suffix;
    vars.push_back(v + suffix);
  }
  out.space = poly::VarSpace::make(vars, p.params);
  return out;
}

std::vector<std::pair<size_t, size_t>> coAccesses(const Program &p) {
  std::vector<std::pair<size_t, size_t>> out;
  for (size_t a = 0; a < p.accesses.size(); ++a)
    for (size_t b = 0; b < p.accesses.size(); ++b)
      if (p.accesses[a].array == p.accesses[b].array)
        out.push_back({a, b});
  return out;
}

namespace {

// Full order-row list of one statement: schedule rows then the constant.
std::vector<AffineExpr> orderRows(const Schedule &order, const Statement &s) {
  const auto &ss = order.byStmt.at(s.index);
  std::vector<AffineExpr> rows = ss.rows;
  rows.push_back(AffineExpr::constant(s.space, ss.constant));
  return rows;
}

// Order rows refined with the access phase: within one instance reads
// execute before the write.
std::vector<AffineExpr> phasedOrderRows(const Schedule &order,
                                        const Statement &s,
                                        AccessKind kind) {
  auto rows = orderRows(order, s);
  rows.push_back(AffineExpr::constant(
      s.space, kind == AccessKind::Write ? 1 : 0));
  return rows;
}

// Constraint fragments for "timeA < timeB" as a union over depths, with
// both row lists already mapped into a common space.
std::vector<ConvexPolyhedron>
lexStrictPieces(const SpacePtr &space, const std::vector<AffineExpr> &rowsA,
                const std::vector<AffineExpr> &rowsB) {
  check(rowsA.size() == rowsB.size(), ErrorKind::Usage,
        "lexStrictPieces: row count mismatch");
  std::vector<ConvexPolyhedron> out;
  for (size_t r = 0; r < rowsA.size(); ++r) {
    ConvexPolyhedron piece(space);
    for (size_t q = 0; q < r; ++q)
      piece.addEquality(rowsA[q] - rowsB[q]);
    AffineExpr strict = rowsB[r] - rowsA[r];
    strict.setConstant(strict.constant() - 1);
    piece.addInequality(std::move(strict)); // rowsB[r] >= rowsA[r] + 1
    if (!piece.triviallyEmpty())
      out.push_back(std::move(piece));
  }
  return out;
}

// Guard intersected with its statement domain (a guard is a subset of the
// domain for parsed programs; JSON input may need the conjunction).
PolySet effectiveGuard(const Program &p, const Access &a) {
  return a.guard.intersect(p.statement(a.stmt).domain);
}

} // namespace

PolySet extent(const Program &p, const Schedule &order, size_t srcAcc,
               size_t tgtAcc) {
  const Access &src = p.accesses[srcAcc];
  const Access &tgt = p.accesses[tgtAcc];
  check(src.array == tgt.array, ErrorKind::Usage,
        "extent: accesses to different arrays");
  PairSpace ps = makePairSpace(p, src.stmt, tgt.stmt);
  const Statement &ss = p.statement(src.stmt);
  const Statement &ts = p.statement(tgt.stmt);

  ConvexPolyhedron base(ps.space);
  // equal block subscripts
  for (size_t r = 0; r < src.phi.size(); ++r)
    base.addEquality(src.phi[r].mappedTo(ps.space) -
                     tgt.phi[r].mappedTo(ps.space, ps.targetRename));
  p.addParamPositivity(base);

  auto srcRows = orderRows(order, ss);
  auto tgtRows = orderRows(order, ts);
  std::vector<AffineExpr> rowsA, rowsB;
  for (const auto &r : srcRows)
    rowsA.push_back(r.mappedTo(ps.space));
  for (const auto &r : tgtRows)
    rowsB.push_back(r.mappedTo(ps.space, ps.targetRename));

  PolySet result(ps.space);
  const PolySet srcGuard = effectiveGuard(p, src);
  const PolySet tgtGuard = effectiveGuard(p, tgt);
  for (const auto &gs : srcGuard.pieces()) {
    for (const auto &gt : tgtGuard.pieces()) {
      ConvexPolyhedron guarded = base;
      guarded.append(gs.mappedTo(ps.space));
      guarded.append(gt.mappedTo(ps.space, ps.targetRename));
      if (guarded.triviallyEmpty())
        continue;
      for (const auto &lex : lexStrictPieces(ps.space, rowsA, rowsB)) {
        ConvexPolyhedron piece = guarded;
        piece.append(lex);
        if (!piece.triviallyEmpty())
          result.addPiece(std::move(piece));
      }
    }
  }
  return result.pruneEmptyPieces();
}

std::optional<SharingRelation> classify(const Program &p,
                                        const Schedule &order, size_t srcAcc,
                                        size_t tgtAcc) {
  PolySet ext = extent(p, order, srcAcc, tgtAcc);
  if (ext.isEmpty())
    return std::nullopt;
  const Access &src = p.accesses[srcAcc];
  const Access &tgt = p.accesses[tgtAcc];
  SharingRelation rel;
  rel.source = srcAcc;
  rel.target = tgtAcc;
  rel.id = src.id + "->" + tgt.id;
  rel.sourceKind = src.kind;
  rel.targetKind = tgt.kind;
  rel.self = src.stmt == tgt.stmt;
  rel.extent = std::move(ext);
  const bool srcW = src.kind == AccessKind::Write;
  const bool tgtW = tgt.kind == AccessKind::Write;
  rel.dependence = srcW || tgtW;
  rel.opportunity = srcW || !tgtW; // W->R, W->W, R->R
  return rel;
}

PolySet pruneNoWriteInBetween(const Program &p, const Schedule &order,
                              const SharingRelation &rel) {
  const Access &src = p.accesses[rel.source];
  const Access &tgt = p.accesses[rel.target];
  PairSpace ps = makePairSpace(p, src.stmt, tgt.stmt);
  PolySet current = rel.extent;

  for (const auto &w : p.accesses) {
    if (w.kind != AccessKind::Write || w.array != src.array)
      continue;
    if (current.isEmpty())
      break;
    const Statement &ws = p.statement(w.stmt);
    // Triple space: product space plus the interferer's variables.
    std::vector<std::string> vars(ps.space->names().begin(),
                                  ps.space->names().begin() +
                                      ps.space->numIter());
    std::map<std::string, std::string> wRename;
    for (const auto &v : ws.loopVars) {
      wRename[v] = v + "''";
      vars.push_back(v + "''");
    }
    SpacePtr tri = poly::VarSpace::make(vars, p.params);

    ConvexPolyhedron wBase(tri);
    // the interferer writes the pair's shared block
    for (size_t r = 0; r < w.phi.size(); ++r)
      wBase.addEquality(w.phi[r].mappedTo(tri, wRename) -
                        src.phi[r].mappedTo(tri));
    p.addParamPositivity(wBase);

    auto mapRows = [&](const std::vector<AffineExpr> &rows,
                       const std::map<std::string, std::string> &ren) {
      std::vector<AffineExpr> out;
      for (const auto &r : rows)
        out.push_back(r.mappedTo(tri, ren));
      return out;
    };
    auto srcRows =
        mapRows(phasedOrderRows(order, p.statement(src.stmt), src.kind), {});
    auto tgtRows = mapRows(phasedOrderRows(order, p.statement(tgt.stmt),
                                           tgt.kind),
                           ps.targetRename);
    auto wRows = mapRows(phasedOrderRows(order, ws, w.kind), wRename);

    std::vector<size_t> wCols;
    for (const auto &v : ws.loopVars)
      wCols.push_back(tri->indexOf(v + "''"));

    PolySet between(ps.space);
    const PolySet wGuard = effectiveGuard(p, w);
    for (const auto &wg : wGuard.pieces()) {
      ConvexPolyhedron guarded = wBase;
      guarded.append(wg.mappedTo(tri, wRename));
      if (guarded.triviallyEmpty())
        continue;
      for (const auto &afterSrc : lexStrictPieces(tri, srcRows, wRows)) {
        for (const auto &beforeTgt : lexStrictPieces(tri, wRows, tgtRows)) {
          ConvexPolyhedron piece = guarded;
          piece.append(afterSrc);
          piece.append(beforeTgt);
          if (piece.triviallyEmpty() || piece.isEmpty())
            continue;
          ConvexPolyhedron proj = piece.eliminate(wCols);
          if (!proj.triviallyEmpty())
            between.addPiece(proj.mappedTo(ps.space));
        }
      }
    }
    if (!between.pieces().empty())
      current = current.subtract(between);
  }
  return current.pruneEmptyPieces();
}

namespace {

// Union fragment expressing v != w over two named columns.
std::vector<ConvexPolyhedron> notEqualPieces(const SpacePtr &space,
                                             const std::string &a,
                                             const std::string &b) {
  std::vector<ConvexPolyhedron> out;
  for (int dir = 0; dir < 2; ++dir) {
    ConvexPolyhedron piece(space);
    AffineExpr d = dir == 0
                       ? AffineExpr::var(space, a) - AffineExpr::var(space, b)
                       : AffineExpr::var(space, b) - AffineExpr::var(space, a);
    d.setConstant(d.constant() - 1);
    piece.addInequality(std::move(d)); // a - b >= 1 (resp. b - a >= 1)
    out.push_back(std::move(piece));
  }
  return out;
}

// Does the extent functionally determine the duplicated side? With
// `doubleTarget`, tests whether two pairs sharing a source can have
// different targets (returns true when they cannot, i.e. source-functional).
bool functionalSide(const Program &p, const SharingRelation &rel,
                    bool doubleTarget) {
  const Access &src = p.accesses[rel.source];
  const Access &tgt = p.accesses[rel.target];
  const Statement &ss = p.statement(src.stmt);
  const Statement &ts = p.statement(tgt.stmt);
  PairSpace ps = makePairSpace(p, src.stmt, tgt.stmt);

  // Extend the product space with a double-primed copy of the duplicated
  // side's variables.
  const Statement &dup = doubleTarget ? ts : ss;
  std::vector<std::string> vars(ps.space->names().begin(),
                                ps.space->names().begin() +
                                    ps.space->numIter());
  std::map<std::string, std::string> dupRename;
  for (const auto &v : dup.loopVars) {
    std::string orig = doubleTarget ? ps.targetRename.at(v) : v;
    dupRename[orig] = v + "''";
    vars.push_back(v + "''");
  }
  SpacePtr tri = poly::VarSpace::make(vars, p.params);

  std::vector<ConvexPolyhedron> diffs;
  for (const auto &v : dup.loopVars) {
    std::string orig = doubleTarget ? ps.targetRename.at(v) : v;
    for (auto &piece : notEqualPieces(tri, orig, v + "''"))
      diffs.push_back(std::move(piece));
  }

  for (const auto &e1 : rel.extent.pieces()) {
    for (const auto &e2 : rel.extent.pieces()) {
      ConvexPolyhedron both = e1.mappedTo(tri);
      both.append(e2.mappedTo(tri, dupRename));
      if (both.triviallyEmpty())
        continue;
      for (const auto &d : diffs) {
        ConvexPolyhedron probe = both;
        probe.append(d);
        if (!probe.triviallyEmpty() && !probe.isEmpty())
          return false; // two distinct images for one pre-image
      }
    }
  }
  return true;
}

} // namespace

Multiplicity classifyMultiplicity(const Program &p,
                                  const SharingRelation &rel) {
  bool srcFunctional = functionalSide(p, rel, /*doubleTarget=*/true);
  bool tgtFunctional = functionalSide(p, rel, /*doubleTarget=*/false);
  if (srcFunctional && tgtFunctional)
    return Multiplicity::OneOne;
  if (srcFunctional)
    return Multiplicity::ManyOne; // many sources, one target each
  if (tgtFunctional)
    return Multiplicity::OneMany; // one source fans out to many targets
  return Multiplicity::ManyMany;
}

namespace {

// Free variables of one relation side within a single piece: loop vars (in
// nesting order) that can differ between two members sharing the other
// side. Decided rationally, like the multiplicity test.
std::vector<std::string> freeSideVars(const Program &p,
                                      const SharingRelation &rel,
                                      const ConvexPolyhedron &piece,
                                      bool targetSide) {
  const Access &src = p.accesses[rel.source];
  const Access &tgt = p.accesses[rel.target];
  const Statement &dup =
      p.statement(targetSide ? tgt.stmt : src.stmt);
  PairSpace ps = makePairSpace(p, src.stmt, tgt.stmt);

  std::vector<std::string> vars(ps.space->names().begin(),
                                ps.space->names().begin() +
                                    ps.space->numIter());
  std::map<std::string, std::string> dupRename;
  for (const auto &v : dup.loopVars) {
    std::string orig = targetSide ? ps.targetRename.at(v) : v;
    dupRename[orig] = v + "''";
    vars.push_back(v + "''");
  }
  SpacePtr tri = poly::VarSpace::make(vars, p.params);

  std::vector<std::string> out;
  for (const auto &v : dup.loopVars) {
    std::string orig = targetSide ? ps.targetRename.at(v) : v;
    ConvexPolyhedron both = piece.mappedTo(tri);
    both.append(piece.mappedTo(tri, dupRename));
    bool canDiffer = false;
    for (auto &d : notEqualPieces(tri, orig, v + "''")) {
      ConvexPolyhedron probe = both;
      probe.append(d);
      if (!probe.triviallyEmpty() && !probe.isEmpty()) {
        canDiffer = true;
        break;
      }
    }
    if (canDiffer)
      out.push_back(orig); // name in the product space
  }
  return out;
}

// Columns of one side in the product space.
std::vector<size_t> sideCols(const Program &p, const SharingRelation &rel,
                             const SpacePtr &space, bool targetSide) {
  const Access &src = p.accesses[rel.source];
  const Access &tgt = p.accesses[rel.target];
  PairSpace ps = makePairSpace(p, src.stmt, tgt.stmt);
  const Statement &side = p.statement(targetSide ? tgt.stmt : src.stmt);
  std::vector<size_t> cols;
  for (const auto &v : side.loopVars)
    cols.push_back(
        space->indexOf(targetSide ? ps.targetRename.at(v) : v));
  return cols;
}

// Projection of a piece onto the "one" side (eliminate the many side).
ConvexPolyhedron projectAway(const ConvexPolyhedron &piece,
                             const std::vector<size_t> &cols) {
  return piece.eliminate(cols);
}

// Pin one free variable of the many side to its nearest admissible bound.
// `minimize` pins to the lower bound (earliest instance), else the upper.
// A pin is accepted only if it preserves the projection onto the opposite
// side (no "one"-side instance loses its pair).
ConvexPolyhedron pinVar(const Program &p, const SharingRelation &rel,
                        ConvexPolyhedron piece, const std::string &var,
                        const std::vector<std::string> &otherFree,
                        bool minimize, bool manyIsTarget) {
  const SpacePtr &space = piece.space();
  size_t vcol = space->indexOf(var);
  std::vector<size_t> otherCols;
  for (const auto &o : otherFree)
    otherCols.push_back(space->indexOf(o));
  ConvexPolyhedron proj = piece.eliminate(otherCols);

  std::vector<AffineExpr> candidates;
  for (const auto &e : proj.inequalities()) {
    const Int &c = e.coeff(vcol);
    if ((minimize && c > 0) || (!minimize && c < 0))
      candidates.push_back(e);
  }
  check(!candidates.empty(), ErrorKind::Eval,
        "multiplicity reduction: no bound found for " + var + " in " +
            rel.id);

  std::vector<size_t> manyCols = sideCols(p, rel, space, manyIsTarget);
  ConvexPolyhedron oneSideBefore = projectAway(piece, manyCols);

  for (const auto &cand : candidates) {
    ConvexPolyhedron pinned = piece;
    pinned.addEquality(cand);
    if (pinned.triviallyEmpty() || pinned.isEmpty())
      continue;
    // projection preservation: every one-side instance keeps a pair
    PolySet before = PolySet::piece(oneSideBefore);
    PolySet after = PolySet::piece(projectAway(pinned, manyCols));
    if (before.subtract(after).isEmpty())
      return pinned;
  }
  fail(ErrorKind::Eval,
       "multiplicity reduction: no dominant nearest bound for " + var +
           " in " + rel.id + " (piecewise nearest instance)");
}

ConvexPolyhedron reducePiece(const Program &p, const SharingRelation &rel,
                             ConvexPolyhedron piece, Multiplicity mult);

// Many-many: rank-preserving positional pairing of free variables with the
// smallest-offset equality that keeps the piece nonempty, then fall through
// to the nearest-instance rule for any leftover free variables.
ConvexPolyhedron reduceManyMany(const Program &p, const SharingRelation &rel,
                                ConvexPolyhedron piece) {
  auto freeSrc = freeSideVars(p, rel, piece, false);
  auto freeTgt = freeSideVars(p, rel, piece, true);
  size_t pairs = std::min(freeSrc.size(), freeTgt.size());
  const SpacePtr &space = piece.space();
  for (size_t i = 0; i < pairs; ++i) {
    AffineExpr diff = AffineExpr::var(space, freeTgt[i]) -
                      AffineExpr::var(space, freeSrc[i]);
    bool ok = false;
    for (int mag = 0; mag <= 8 && !ok; ++mag) {
      for (int sign : {+1, -1}) {
        if (mag == 0 && sign < 0)
          continue;
        AffineExpr eq = diff;
        eq.setConstant(eq.constant() - Int(sign * mag));
        ConvexPolyhedron paired = piece;
        paired.addEquality(std::move(eq));
        if (!paired.triviallyEmpty() && !paired.isEmpty()) {
          piece = std::move(paired);
          ok = true;
          break;
        }
      }
    }
    check(ok, ErrorKind::Eval,
          "multiplicity reduction: no pairing offset for " + freeSrc[i] +
              " / " + freeTgt[i] + " in " + rel.id);
  }
  // Leftover freedom is handled by the one-many/many-one rule.
  bool tgtFree = !freeSideVars(p, rel, piece, true).empty();
  bool srcFree = !freeSideVars(p, rel, piece, false).empty();
  if (tgtFree)
    return reducePiece(p, rel, std::move(piece), Multiplicity::OneMany);
  if (srcFree)
    return reducePiece(p, rel, std::move(piece), Multiplicity::ManyOne);
  return piece;
}

ConvexPolyhedron reducePiece(const Program &p, const SharingRelation &rel,
                             ConvexPolyhedron piece, Multiplicity mult) {
  switch (mult) {
  case Multiplicity::OneOne:
    return piece;
  case Multiplicity::ManyMany:
    return reduceManyMany(p, rel, std::move(piece));
  case Multiplicity::OneMany:
  case Multiplicity::ManyOne: {
    // Many side: target for one-many (targets all follow the source in the
    // original order, nearest = earliest), source for many-one (nearest =
    // latest).
    const bool manyIsTarget = mult == Multiplicity::OneMany;
    while (true) {
      auto free = freeSideVars(p, rel, piece, manyIsTarget);
      if (free.empty())
        break;
      std::vector<std::string> others(free.begin() + 1, free.end());
      piece = pinVar(p, rel, std::move(piece), free.front(), others,
                     /*minimize=*/manyIsTarget, manyIsTarget);
    }
    return piece;
  }
  }
  return piece;
}

} // namespace

PolySet reduceMultiplicity(const Program &p, const Schedule &order,
                           const SharingRelation &rel, Multiplicity mult) {
  (void)order; // nearest instances are taken in the original order, which
               // is exactly the precedence baked into the extent
  if (mult == Multiplicity::OneOne)
    return rel.extent;
  PolySet reduced(rel.extent.space());
  for (const auto &piece : rel.extent.pieces()) {
    Multiplicity pieceMult = mult;
    reduced.addPiece(reducePiece(p, rel, piece, pieceMult));
  }
  reduced = reduced.pruneEmptyPieces();

  SharingRelation probe = rel;
  probe.extent = reduced;
  check(classifyMultiplicity(p, probe) == Multiplicity::OneOne,
        ErrorKind::Eval,
        "multiplicity reduction did not reach one-one for " + rel.id);
  return reduced;
}

std::vector<const SharingRelation *> ProgramRelations::dependences() const {
  std::vector<const SharingRelation *> out;
  for (const auto &r : relations)
    if (r.dependence)
      out.push_back(&r);
  return out;
}

std::vector<const SharingRelation *> ProgramRelations::opportunities() const {
  std::vector<const SharingRelation *> out;
  for (const auto &r : relations)
    if (r.opportunity)
      out.push_back(&r);
  return out;
}

const SharingRelation *ProgramRelations::byId(const std::string &id) const {
  for (const auto &r : relations)
    if (r.id == id)
      return &r;
  return nullptr;
}

ProgramRelations analyze(const Program &p) {
  Schedule order = ir::originalOrder(p);
  ProgramRelations out;
  for (auto [a, b] : coAccesses(p)) {
    auto rel = classify(p, order, a, b);
    if (!rel)
      continue;
    rel->extent = pruneNoWriteInBetween(p, order, *rel);
    if (rel->extent.isEmpty())
      continue;
    if (rel->opportunity) {
      rel->multiplicity = classifyMultiplicity(p, *rel);
      out.reducedExtents.emplace(
          rel->id, reduceMultiplicity(p, order, *rel, *rel->multiplicity));
    }
    out.relations.push_back(std::move(*rel));
  }
  return out;
}

} // namespace polyshare::analysis
