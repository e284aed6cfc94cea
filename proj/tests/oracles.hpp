#pragma once

// Test-only brute-force oracles. These deliberately avoid the library's
// Fourier-Motzkin / Farkas code paths: membership is decided by direct
// constraint evaluation, enumeration by nested scans, schedules by explicit
// trace walks.

#include "polyshare/ir.hpp"
#include "polyshare/polyhedron.hpp"

#include <functional>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using polyshare::Int;
using polyshare::poly::Point;

/// All integer vectors of dimension `dim` with entries in [lo, hi].
inline std::vector<std::vector<Int>> box(size_t dim, long lo, long hi) {
  std::vector<std::vector<Int>> out;
  std::vector<long> cur(dim, lo);
  while (true) {
    out.emplace_back(cur.begin(), cur.end());
    size_t v = dim;
    bool done = true;
    while (v > 0) {
      --v;
      if (cur[v] < hi) {
        ++cur[v];
        for (size_t w = v + 1; w < dim; ++w)
          cur[w] = lo;
        done = false;
        break;
      }
    }
    if (done || dim == 0)
      break;
  }
  return out;
}

/// Direct-evaluation membership of a full point (iter vars + params).
inline bool memberOf(const polyshare::poly::PolySet &s, const Point &p) {
  return s.containsPoint(p);
}

/// Instances of a statement under a binding by scanning a box and testing
/// the domain constraints pointwise. The box covers all loop ranges our
/// fixtures can produce (bounds are affine in the bound parameters).
inline std::vector<Point>
statementInstances(const polyshare::ir::Program &prog, size_t stmt,
                   const std::map<std::string, Int> &binding, long scan = 0) {
  if (scan == 0) {
    Int m = 2;
    for (const auto &[_, v] : binding)
      if (polyshare::absInt(v) + 2 > m)
        m = polyshare::absInt(v) + 2;
    scan = static_cast<long>(m);
  }
  const auto &s = prog.statements[stmt];
  const size_t n = s.depth();
  std::vector<Point> out;
  for (auto &iter : box(n, -static_cast<long>(scan), scan)) {
    Point full(s.space->numCols(), 0);
    for (size_t i = 0; i < n; ++i)
      full[i] = iter[i];
    for (size_t i = n; i < s.space->numCols(); ++i)
      full[i] = binding.at(s.space->name(i));
    if (s.domain.containsPoint(full))
      out.push_back(full);
  }
  return out;
}

/// Lexicographic comparison of time vectors.
inline int cmpTime(const std::vector<Int> &a, const std::vector<Int> &b) {
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] < b[i])
      return -1;
    if (a[i] > b[i])
      return 1;
  }
  if (a.size() != b.size())
    return a.size() < b.size() ? -1 : 1;
  return 0;
}

/// One guarded access firing at one statement instance.
struct AccessEvent {
  size_t access;             // index into Program::accesses
  Point full;                // instance point incl. params
  std::vector<Int> block;    // phi evaluated at the instance
  std::vector<Int> time;     // original-order instance time
  std::vector<Int> timePhased; // time + access phase (reads before write)
};

inline std::vector<AccessEvent>
allEvents(const polyshare::ir::Program &prog, const polyshare::ir::Schedule &order,
          const std::map<std::string, Int> &binding) {
  std::vector<AccessEvent> out;
  for (size_t ai = 0; ai < prog.accesses.size(); ++ai) {
    const auto &a = prog.accesses[ai];
    for (auto &full : statementInstances(prog, a.stmt, binding)) {
      if (!a.guard.containsPoint(full))
        continue;
      AccessEvent ev;
      ev.access = ai;
      ev.full = full;
      for (const auto &row : a.phi)
        ev.block.push_back(row.eval(full));
      ev.time = order.timeOf(a.stmt, full);
      ev.timePhased = ev.time;
      ev.timePhased.push_back(
          a.kind == polyshare::ir::AccessKind::Write ? 1 : 0);
      out.push_back(std::move(ev));
    }
  }
  return out;
}

/// Extent pairs of a co-access by brute force: equal blocks, both guards,
/// strict original-order precedence at instance level; with `nwib`, drop
/// pairs with a write to the same block strictly between them in the
/// phase-refined order.
inline std::set<std::pair<Point, Point>>
extentPairsOracle(const polyshare::ir::Program &prog,
                  const polyshare::ir::Schedule &order, size_t srcAcc,
                  size_t tgtAcc, const std::map<std::string, Int> &binding,
                  bool nwib) {
  auto events = allEvents(prog, order, binding);
  std::set<std::pair<Point, Point>> out;
  size_t dSrc = prog.statements[prog.accesses[srcAcc].stmt].depth();
  size_t dTgt = prog.statements[prog.accesses[tgtAcc].stmt].depth();
  for (const auto &src : events) {
    if (src.access != srcAcc)
      continue;
    for (const auto &tgt : events) {
      if (tgt.access != tgtAcc)
        continue;
      if (src.block != tgt.block)
        continue;
      if (cmpTime(src.time, tgt.time) >= 0)
        continue;
      if (nwib) {
        bool interfered = false;
        for (const auto &w : events) {
          if (prog.accesses[w.access].kind != polyshare::ir::AccessKind::Write)
            continue;
          if (prog.accesses[w.access].array != prog.accesses[srcAcc].array ||
              w.block != src.block)
            continue;
          if (cmpTime(src.timePhased, w.timePhased) < 0 &&
              cmpTime(w.timePhased, tgt.timePhased) < 0) {
            interfered = true;
            break;
          }
        }
        if (interfered)
          continue;
      }
      out.insert({Point(src.full.begin(), src.full.begin() + dSrc),
                  Point(tgt.full.begin(), tgt.full.begin() + dTgt)});
    }
  }
  return out;
}

/// Product-space points of an extent as (source, target) iteration pairs.
inline std::set<std::pair<Point, Point>>
extentPairsOf(const polyshare::poly::PolySet &extent, size_t dSrc,
              const std::map<std::string, Int> &binding) {
  std::set<std::pair<Point, Point>> out;
  for (auto &pt : extent.enumerate(binding))
    out.insert({Point(pt.begin(), pt.begin() + dSrc),
                Point(pt.begin() + dSrc, pt.end())});
  return out;
}

inline Point withParams(const polyshare::ir::Statement &s, const Point &iter,
                        const std::map<std::string, Int> &binding) {
  Point full(s.space->numCols(), 0);
  for (size_t i = 0; i < iter.size(); ++i)
    full[i] = iter[i];
  for (size_t i = s.depth(); i < s.space->numCols(); ++i)
    full[i] = binding.at(s.space->name(i));
  return full;
}

/// All scheduled instances (statement, full point, time) under a binding.
inline std::vector<std::tuple<size_t, Point, std::vector<Int>>>
scheduledInstances(const polyshare::ir::Program &prog,
                   const polyshare::ir::Schedule &schedule,
                   const std::map<std::string, Int> &binding) {
  std::vector<std::tuple<size_t, Point, std::vector<Int>>> out;
  for (const auto &s : prog.statements)
    for (auto &full : statementInstances(prog, s.index, binding))
      out.push_back({s.index, full, schedule.timeOf(s.index, full)});
  return out;
}

/// Schedule times are pairwise distinct across all statement instances.
inline bool scheduleInjective(const polyshare::ir::Program &prog,
                              const polyshare::ir::Schedule &schedule,
                              const std::map<std::string, Int> &binding) {
  auto inst = scheduledInstances(prog, schedule, binding);
  for (size_t i = 0; i < inst.size(); ++i)
    for (size_t j = i + 1; j < inst.size(); ++j)
      if (cmpTime(std::get<2>(inst[i]), std::get<2>(inst[j])) == 0)
        return false;
  return true;
}

/// Every original-order dependence pair (full extent, no pruning) is
/// ordered source-before-target by the new schedule.
inline bool dependencesRespected(const polyshare::ir::Program &prog,
                                 const polyshare::ir::Schedule &original,
                                 const polyshare::ir::Schedule &schedule,
                                 const std::map<std::string, Int> &binding) {
  using polyshare::ir::AccessKind;
  for (size_t a = 0; a < prog.accesses.size(); ++a) {
    for (size_t b = 0; b < prog.accesses.size(); ++b) {
      if (prog.accesses[a].array != prog.accesses[b].array)
        continue;
      if (prog.accesses[a].kind != AccessKind::Write &&
          prog.accesses[b].kind != AccessKind::Write)
        continue;
      size_t sa = prog.accesses[a].stmt, sb = prog.accesses[b].stmt;
      for (auto &pr : extentPairsOracle(prog, original, a, b, binding, false)) {
        auto ts = schedule.timeOf(sa, withParams(prog.statements[sa],
                                                 pr.first, binding));
        auto tt = schedule.timeOf(sb, withParams(prog.statements[sb],
                                                 pr.second, binding));
        if (cmpTime(ts, tt) >= 0)
          return false;
      }
    }
  }
  return true;
}

/// The exact realization pattern of Table 1 for one realized opportunity
/// over its reduced extent: schedule-time differences are all zero except
/// the last dimension (non-self, same nonzero c everywhere; positive when
/// the source writes) or the second-to-last (self, +-1; +1 when the source
/// writes).
inline bool realizationPattern(const polyshare::ir::Program &prog,
                               const polyshare::ir::Schedule &schedule,
                               size_t srcAcc, size_t tgtAcc,
                               const polyshare::poly::PolySet &reducedExtent,
                               const std::map<std::string, Int> &binding) {
  using polyshare::ir::AccessKind;
  size_t ss = prog.accesses[srcAcc].stmt, ts = prog.accesses[tgtAcc].stmt;
  bool self = ss == ts;
  bool sourceWrites = prog.accesses[srcAcc].kind == AccessKind::Write;
  std::optional<Int> sharedC;
  auto pairs = extentPairsOf(reducedExtent, prog.statements[ss].depth(),
                             binding);
  for (auto &pr : pairs) {
    auto t1 = schedule.timeOf(
        ss, withParams(prog.statements[ss], pr.first, binding));
    auto t2 = schedule.timeOf(
        ts, withParams(prog.statements[ts], pr.second, binding));
    if (t1.size() != t2.size())
      return false;
    size_t special = self ? t1.size() - 2 : t1.size() - 1;
    for (size_t d = 0; d < t1.size(); ++d) {
      Int diff = t2[d] - t1[d];
      if (d != special) {
        if (diff != 0)
          return false;
      } else {
        if (self && diff != 1 && diff != -1)
          return false;
        if (sourceWrites && diff < 1)
          return false;
        if (diff == 0)
          return false;
        if (!sharedC)
          sharedC = diff;
        else if (*sharedC != diff)
          return false;
      }
    }
  }
  return true;
}

} // namespace oracle
