#include "polyshare/scheduler.hpp"

#include <algorithm>
#include <set>

namespace polyshare::sched {

using analysis::SharingRelation;
using ir::AccessKind;
using ir::Statement;
using poly::AffineExpr;
using poly::ConvexPolyhedron;
using poly::LexMode;
using poly::PolySet;
using poly::RowDiffBuilder;
using poly::SpacePtr;

std::vector<int> enumRow(size_t dBar, size_t ds, size_t rowIndex,
                         size_t independentSoFar) {
  check(rowIndex >= 1 && rowIndex <= dBar, ErrorKind::Usage,
        "enumRow: row index out of range");
  check(independentSoFar <= ds, ErrorKind::Usage,
        "enumRow: rank exceeds statement depth");
  const size_t remaining = dBar - rowIndex + 1;
  const size_t needed = ds - independentSoFar;
  if (needed == 0)
    return {0};
  if (remaining == needed)
    return {1};
  if (remaining < needed)
    return {};
  return {0, 1};
}

std::string Scheduler::coeffVar(const std::string &stmtLabel,
                                const std::string &column) {
  return stmtLabel + "." + column;
}

namespace {

// Integer basis of { u : row . u = 0 for every row }, via rational Gaussian
// elimination scaled back to integers.
std::vector<std::vector<Int>>
nullspaceBasis(const std::vector<std::vector<Int>> &rows, size_t dim) {
  using polyshare::Rat;
  std::vector<std::vector<Rat>> m;
  for (const auto &r : rows) {
    std::vector<Rat> row(dim);
    for (size_t i = 0; i < dim; ++i)
      row[i] = Rat(r[i]);
    m.push_back(std::move(row));
  }
  std::vector<size_t> pivotCol;
  size_t rank = 0;
  for (size_t col = 0; col < dim && rank < m.size(); ++col) {
    size_t sel = rank;
    while (sel < m.size() && m[sel][col] == 0)
      ++sel;
    if (sel == m.size())
      continue;
    std::swap(m[rank], m[sel]);
    Rat inv = m[rank][col];
    for (size_t i = 0; i < dim; ++i)
      m[rank][i] /= inv;
    for (size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][col] == 0)
        continue;
      Rat f = m[r][col];
      for (size_t i = 0; i < dim; ++i)
        m[r][i] -= f * m[rank][i];
    }
    pivotCol.push_back(col);
    ++rank;
  }
  std::vector<std::vector<Int>> basis;
  std::set<size_t> pivots(pivotCol.begin(), pivotCol.end());
  for (size_t freeCol = 0; freeCol < dim; ++freeCol) {
    if (pivots.count(freeCol))
      continue;
    std::vector<Rat> v(dim, Rat(0));
    v[freeCol] = 1;
    for (size_t r = 0; r < rank; ++r)
      v[pivotCol[r]] = -m[r][freeCol];
    Int denom = 1;
    for (const auto &x : v)
      denom = denom / gcdInt(denom, boost::multiprecision::denominator(x)) *
              boost::multiprecision::denominator(x);
    std::vector<Int> iv(dim);
    for (size_t i = 0; i < dim; ++i)
      iv[i] = boost::multiprecision::numerator(v[i]) *
              (denom / boost::multiprecision::denominator(v[i]));
    basis.push_back(std::move(iv));
  }
  return basis;
}

std::vector<std::string> sortedIds(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

} // namespace

Scheduler::Scheduler(const ir::Program &p,
                     const analysis::ProgramRelations &rels,
                     Int coefficientBound)
    : program_(p), relations_(rels), bound_(std::move(coefficientBound)) {
  std::vector<std::string> vars;
  for (const auto &s : p.statements) {
    for (const auto &v : s.loopVars)
      vars.push_back(coeffVar(s.label, v));
    for (const auto &q : p.params)
      vars.push_back(coeffVar(s.label, q));
    vars.push_back(coeffVar(s.label, "#c"));
  }
  coeffSpace_ = poly::VarSpace::make(vars, {});

  for (const auto &rel : rels.relations) {
    RelationConstraints rc;
    if (rel.dependence) {
      RowDiffBuilder b = diffBuilder(rel, rel.extent);
      rc.weak = b.constraints(LexMode::Weak);
      rc.strict = b.constraints(LexMode::Strict);
      dependences_.push_back(&rel);
    }
    if (rel.opportunity) {
      const PolySet &reduced = rels.reducedExtents.at(rel.id);
      RowDiffBuilder b = diffBuilder(rel, reduced);
      rc.equal = b.constraints(LexMode::Equal);
      if (rel.self) {
        if (rel.sourceKind == AccessKind::Write) {
          rc.consecutive = b.constraints(LexMode::Delta, 1);
        } else {
          rc.consecutive = b.constraints(LexMode::Delta, 1)
                               .unionWith(b.constraints(LexMode::Delta, -1));
        }
      }
    }
    table_.emplace(rel.id, std::move(rc));
  }
}

RowDiffBuilder Scheduler::diffBuilder(const SharingRelation &rel,
                                      const PolySet &extent) const {
  const auto &src = program_.accesses[rel.source];
  const auto &tgt = program_.accesses[rel.target];
  const Statement &ss = program_.statement(src.stmt);
  const Statement &ts = program_.statement(tgt.stmt);
  analysis::PairSpace ps = analysis::makePairSpace(program_, src.stmt, tgt.stmt);

  RowDiffBuilder b(extent, coeffSpace_);
  for (const auto &v : ss.loopVars)
    b.addVarTerm(v, coeffVar(ss.label, v), -1);
  for (const auto &v : ts.loopVars)
    b.addVarTerm(ps.targetRename.at(v), coeffVar(ts.label, v), +1);
  for (const auto &q : program_.params) {
    b.addVarTerm(q, coeffVar(ss.label, q), -1);
    b.addVarTerm(q, coeffVar(ts.label, q), +1);
  }
  b.addConstVar(coeffVar(ss.label, "#c"), -1);
  b.addConstVar(coeffVar(ts.label, "#c"), +1);
  return b;
}

PolySet Scheduler::statementRowConstraint(
    const Statement &s, const std::vector<std::vector<Int>> &priorRows,
    bool independent) const {
  const size_t d = s.depth();
  if (!independent) {
    // row must lie in the span of the prior rows: orthogonal to the span's
    // orthogonal complement
    ConvexPolyhedron piece(coeffSpace_);
    for (const auto &u : nullspaceBasis(priorRows, d)) {
      AffineExpr e(coeffSpace_);
      for (size_t v = 0; v < d; ++v)
        if (u[v] != 0)
          e += AffineExpr::var(coeffSpace_, coeffVar(s.label, s.loopVars[v]),
                               u[v]);
      piece.addEquality(std::move(e));
    }
    return PolySet::piece(std::move(piece));
  }
  // independent: inside the null space of the prior rows, nonzero
  ConvexPolyhedron ortho(coeffSpace_);
  for (const auto &r : priorRows) {
    AffineExpr e(coeffSpace_);
    for (size_t v = 0; v < d; ++v)
      if (r[v] != 0)
        e += AffineExpr::var(coeffSpace_, coeffVar(s.label, s.loopVars[v]),
                             r[v]);
    ortho.addEquality(std::move(e));
  }
  PolySet out(coeffSpace_);
  for (size_t v = 0; v < d; ++v) {
    for (int sign : {+1, -1}) {
      ConvexPolyhedron piece = ortho;
      AffineExpr e = AffineExpr::var(coeffSpace_,
                                     coeffVar(s.label, s.loopVars[v]), sign);
      e.setConstant(-1); // sign * coeff >= 1
      piece.addInequality(std::move(e));
      out.addPiece(std::move(piece));
    }
  }
  return out;
}

std::optional<PlanCandidate>
Scheduler::findSchedule(const std::vector<std::string> &q) const {
  const size_t dBar = program_.dBar;
  std::vector<const SharingRelation *> remainingDeps = dependences_;
  std::map<size_t, size_t> rank;                    // per statement
  std::map<size_t, std::vector<std::vector<Int>>> iterRows; // sampled rows
  std::map<size_t, ir::StatementSchedule> rows;

  for (const auto &id : q)
    check(relations_.byId(id) != nullptr && table_.count(id) != 0,
          ErrorKind::Usage, "findSchedule: unknown opportunity " + id);

  for (size_t depth = 1; depth <= dBar; ++depth) {
    PolySet x = PolySet::universe(coeffSpace_);
    // weakly satisfy the not-yet-satisfied dependences
    for (const auto *dep : remainingDeps) {
      x = x.intersect(table_.at(dep->id).weak);
      if (x.pieces().empty())
        return std::nullopt;
    }
    // sharing opportunity constraints
    for (const auto &id : q) {
      const SharingRelation &rel = *relations_.byId(id);
      const RelationConstraints &rc = table_.at(id);
      if (!rel.self)
        x = x.intersect(rc.equal);
      else if (depth < dBar)
        x = x.intersect(rc.equal);
      else
        x = x.intersect(rc.consecutive);
      if (x.pieces().empty())
        return std::nullopt;
    }
    // dimensionality constraints, statements in program order
    for (const auto &s : program_.statements) {
      bool fixed = false;
      for (int l : enumRow(dBar, s.depth(), depth, rank[s.index])) {
        PolySet t = statementRowConstraint(s, iterRows[s.index], l == 1);
        PolySet xt = x.intersect(t);
        if (!xt.pieces().empty()) {
          x = std::move(xt);
          rank[s.index] += static_cast<size_t>(l);
          fixed = true;
          break;
        }
      }
      if (!fixed)
        return std::nullopt;
    }
    // strongly satisfy remaining dependences, greedy in input order
    for (auto it = remainingDeps.begin(); it != remainingDeps.end();) {
      PolySet xt = x.intersect(table_.at((*it)->id).strict);
      if (!xt.pieces().empty()) {
        x = std::move(xt);
        it = remainingDeps.erase(it);
      } else {
        ++it;
      }
    }
    // sample one row per statement
    auto sample = poly::samplePoint(x, bound_);
    if (!sample)
      return std::nullopt;
    for (const auto &s : program_.statements) {
      std::vector<Int> iterPart;
      AffineExpr row(s.space);
      for (size_t v = 0; v < s.depth(); ++v) {
        const Int &c =
            (*sample)[coeffSpace_->indexOf(coeffVar(s.label, s.loopVars[v]))];
        iterPart.push_back(c);
        row.setCoeff(v, c);
      }
      for (const auto &qn : program_.params)
        row.setCoeff(s.space->indexOf(qn),
                     (*sample)[coeffSpace_->indexOf(coeffVar(s.label, qn))]);
      row.setConstant(
          (*sample)[coeffSpace_->indexOf(coeffVar(s.label, "#c"))]);
      iterRows[s.index].push_back(std::move(iterPart));
      rows[s.index].rows.push_back(std::move(row));
    }
  }

  auto schedule = assignConstants(q, remainingDeps, std::move(rows));
  if (!schedule)
    return std::nullopt;
  PlanCandidate out;
  out.realized = sortedIds(q);
  out.schedule = std::move(*schedule);
  return out;
}

std::optional<ir::Schedule> Scheduler::assignConstants(
    const std::vector<std::string> &q,
    const std::vector<const SharingRelation *> &residualDeps,
    std::map<size_t, ir::StatementSchedule> rows) const {
  // Residual dependences: pairs with zero schedule difference at every
  // depth must be ordered by the trailing constants.
  std::set<std::pair<size_t, size_t>> edges;
  for (const auto *dep : residualDeps) {
    const auto &src = program_.accesses[dep->source];
    const auto &tgt = program_.accesses[dep->target];
    analysis::PairSpace ps =
        analysis::makePairSpace(program_, src.stmt, tgt.stmt);
    PolySet residual = dep->extent;
    const auto &srcRows = rows.at(src.stmt).rows;
    const auto &tgtRows = rows.at(tgt.stmt).rows;
    for (size_t d = 0; d < srcRows.size(); ++d) {
      ConvexPolyhedron zero(ps.space);
      zero.addEquality(tgtRows[d].mappedTo(ps.space, ps.targetRename) -
                       srcRows[d].mappedTo(ps.space));
      residual = residual.intersect(PolySet::piece(std::move(zero)));
      if (residual.pieces().empty())
        break;
    }
    if (residual.isEmpty())
      continue;
    if (src.stmt == tgt.stmt)
      return std::nullopt; // a self dependence cannot be constant-separated
    edges.insert({src.stmt, tgt.stmt});
  }
  // Realized non-self W->R / W->W opportunities pipeline source before
  // target within the shared iteration (c > 0). Non-self R->R only needs
  // distinct constants, which the total assignment below guarantees.
  for (const auto &id : q) {
    const SharingRelation &rel = *relations_.byId(id);
    if (rel.self || rel.sourceKind != AccessKind::Write)
      continue;
    size_t ss = program_.accesses[rel.source].stmt;
    size_t ts = program_.accesses[rel.target].stmt;
    if (ss == ts)
      return std::nullopt;
    edges.insert({ss, ts});
  }
  // Topological sort (Kahn, smallest statement index first) assigns every
  // statement a distinct constant.
  const size_t n = program_.statements.size();
  std::vector<size_t> indeg(n, 0);
  for (const auto &[a, b] : edges)
    indeg[b]++;
  std::set<size_t> ready;
  for (size_t i = 0; i < n; ++i)
    if (indeg[i] == 0)
      ready.insert(i);
  size_t next = 0;
  std::map<size_t, Int> constant;
  while (!ready.empty()) {
    size_t s = *ready.begin();
    ready.erase(ready.begin());
    constant[s] = Int(next++);
    for (const auto &[a, b] : edges)
      if (a == s && --indeg[b] == 0)
        ready.insert(b);
  }
  if (constant.size() != n)
    return std::nullopt; // cycle

  ir::Schedule out;
  for (auto &[stmt, ss] : rows) {
    ss.constant = constant.at(stmt);
    out.byStmt[stmt] = std::move(ss);
  }
  return out;
}

std::vector<PlanCandidate> Scheduler::aprioriSearch() const {
  std::vector<PlanCandidate> out;
  // The empty set is the baseline plan: the unmodified original order.
  PlanCandidate baseline;
  baseline.schedule = ir::originalOrder(program_);
  out.push_back(std::move(baseline));

  std::vector<std::string> opps;
  for (const auto *rel : relations_.opportunities())
    opps.push_back(rel->id);
  std::sort(opps.begin(), opps.end());

  std::set<std::vector<std::string>> prevLevel; // feasible sets of size k-1
  prevLevel.insert(std::vector<std::string>{});
  for (size_t k = 1; k <= opps.size() && !prevLevel.empty(); ++k) {
    // candidates: extend each feasible (k-1)-set by a lexicographically
    // larger opportunity, then require all (k-1)-subsets feasible
    std::set<std::vector<std::string>> candidates;
    for (const auto &base : prevLevel) {
      for (const auto &o : opps) {
        if (!base.empty() && o <= base.back())
          continue;
        std::vector<std::string> cand = base;
        cand.push_back(o);
        bool closed = true;
        for (size_t skip = 0; skip < cand.size() && closed; ++skip) {
          std::vector<std::string> sub;
          for (size_t i = 0; i < cand.size(); ++i)
            if (i != skip)
              sub.push_back(cand[i]);
          closed = prevLevel.count(sub) != 0;
        }
        if (closed)
          candidates.insert(std::move(cand));
      }
    }
    std::set<std::vector<std::string>> level;
    for (const auto &cand : candidates) {
      auto plan = findSchedule(cand);
      if (plan) {
        level.insert(cand);
        out.push_back(std::move(*plan));
      }
    }
    prevLevel = std::move(level);
  }
  return out;
}

} // namespace polyshare::sched
