#pragma once

#include "polyshare/polyhedron.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace polyshare::ir {

using poly::AffineExpr;
using polyshare::Int;
using poly::Point;
using poly::PolySet;
using poly::SpacePtr;

/// An array declaration. Subscripts address logical blocks, not elements:
/// gridDims gives the number of blocks per dimension (affine in the
/// program parameters), blockBytes the size of one block.
struct ArrayDecl {
  std::string name;
  std::vector<AffineExpr> gridDims; // over the program's parameter space
  Int blockBytes = 1;
};

/// One syntactic loop of a statement: lo <= v < hi over the enclosing
/// variables and parameters. Kept so programs can be pretty-printed.
struct LoopBound {
  AffineExpr lo;
  AffineExpr hi;
};

struct Statement {
  size_t index = 0;
  std::string label;
  std::vector<std::string> loopVars; // nesting order, size d_s
  SpacePtr space;                    // (loopVars, params)
  PolySet domain;                    // executed instances
  std::vector<LoopBound> loopBounds; // syntactic bounds, one per loop var
  std::vector<size_t> textualPath;   // AST child indices, size d_s + 1

  size_t depth() const { return loopVars.size(); }

  Statement() : domain(nullptr) {}
};

enum class AccessKind { Read, Write };

inline char accessKindChar(AccessKind k) {
  return k == AccessKind::Read ? 'R' : 'W';
}

/// A guarded block access <stmt, R/W, array, phi>. phi has one affine row
/// per array dimension, over the statement's extended iteration vector.
/// The guard restricts which instances perform the access and is always a
/// subset of the statement domain.
struct Access {
  size_t stmt = 0;
  AccessKind kind = AccessKind::Read;
  std::string array;
  std::vector<AffineExpr> phi;
  PolySet guard;
  std::string id; // e.g. "s1WC", disambiguated with "#k" when needed

  Access() : guard(nullptr) {}
};

struct Program {
  std::vector<std::string> params;
  std::vector<ArrayDecl> arrays;
  std::vector<Statement> statements;
  std::vector<Access> accesses;
  size_t dBar = 0; // max statement depth

  SpacePtr paramSpace; // ({}, params): home of array grid dims

  const ArrayDecl &array(const std::string &name) const;
  const Statement &statement(size_t index) const;
  std::vector<size_t> accessesOf(size_t stmt) const;

  /// Add the implicit parameter context (each parameter >= 1) to a piece
  /// whose space includes the parameters.
  void addParamPositivity(poly::ConvexPolyhedron &piece) const;

  /// Referential integrity, the one-write-per-statement rule, arity checks.
  /// Also assigns access ids and dBar. Throws on violation.
  void finalize();
};

/// A schedule: per statement a uniform number of affine rows over that
/// statement's extended iteration vector plus one trailing parameter-free
/// constant. Searched schedules have dBar rows; the canonical original
/// order uses 2*dBar interleaved rows.
struct StatementSchedule {
  std::vector<AffineExpr> rows;
  Int constant = 0;
};

struct Schedule {
  std::map<size_t, StatementSchedule> byStmt;

  size_t numRows() const {
    return byStmt.empty() ? 0 : byStmt.begin()->second.rows.size();
  }
  /// Time vector of one instance: row values then the constant.
  std::vector<Int> timeOf(size_t stmt, const Point &x) const;
};

/// The canonical interleaved execution order of the source program:
/// alternating textual-position constants and loop variables, padded to a
/// common length. Defines the "executes before" relation used by extent
/// polyhedra.
Schedule originalOrder(const Program &p);

/// Pretty-print a program in the DSL concrete syntax. parse(print(p))
/// reproduces p structurally.
std::string print(const Program &p);

} // namespace polyshare::ir
