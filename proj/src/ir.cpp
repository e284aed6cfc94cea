#include "polyshare/ir.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace polyshare::ir {

const ArrayDecl &Program::array(const std::string &name) const {
  for (const auto &a : arrays)
    if (a.name == name)
      return a;
  fail(ErrorKind::Usage, "unknown array: " + name);
}

const Statement &Program::statement(size_t index) const {
  check(index < statements.size(), ErrorKind::Usage, "statement out of range");
  return statements[index];
}

std::vector<size_t> Program::accessesOf(size_t stmt) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < accesses.size(); ++i)
    if (accesses[i].stmt == stmt)
      out.push_back(i);
  return out;
}

void Program::addParamPositivity(poly::ConvexPolyhedron &piece) const {
  const auto &space = piece.space();
  for (const auto &p : params) {
    if (!space->has(p))
      continue;
    AffineExpr e = AffineExpr::var(space, p);
    e.setConstant(-1); // p - 1 >= 0
    piece.addInequality(std::move(e));
  }
}

void Program::finalize() {
  paramSpace = poly::VarSpace::make({}, params);
  {
    std::set<std::string> seen(params.begin(), params.end());
    check(seen.size() == params.size(), ErrorKind::Parse,
          "duplicate parameter name");
  }
  {
    std::set<std::string> names;
    for (const auto &a : arrays) {
      check(names.insert(a.name).second, ErrorKind::Parse,
            "duplicate array declaration: " + a.name);
      check(a.blockBytes >= 1, ErrorKind::Parse,
            "array " + a.name + ": block size must be >= 1");
      check(!a.gridDims.empty(), ErrorKind::Parse,
            "array " + a.name + ": needs at least one dimension");
    }
  }
  dBar = 0;
  {
    std::set<std::string> labels;
    std::set<std::vector<size_t>> paths;
    for (size_t i = 0; i < statements.size(); ++i) {
      Statement &s = statements[i];
      s.index = i;
      check(labels.insert(s.label).second, ErrorKind::Parse,
            "duplicate statement label: " + s.label);
      check(paths.insert(s.textualPath).second, ErrorKind::Parse,
            "statement " + s.label + ": textual path is not unique");
      check(s.textualPath.size() == s.depth() + 1, ErrorKind::Parse,
            "statement " + s.label + ": malformed textual path");
      dBar = std::max(dBar, s.depth());
    }
  }
  std::map<size_t, int> writeCount;
  std::map<std::string, int> idCount;
  for (auto &a : accesses) {
    check(a.stmt < statements.size(), ErrorKind::Parse,
          "access references unknown statement");
    const Statement &s = statements[a.stmt];
    bool known = false;
    for (const auto &arr : arrays)
      if (arr.name == a.array) {
        known = true;
        check(a.phi.size() == arr.gridDims.size(), ErrorKind::Parse,
              "access to " + a.array + " in " + s.label + ": expected " +
                  std::to_string(arr.gridDims.size()) + " subscripts, got " +
                  std::to_string(a.phi.size()));
      }
    check(known, ErrorKind::Parse,
          "access in " + s.label + " references undeclared array " + a.array);
    if (a.kind == AccessKind::Write) {
      check(++writeCount[a.stmt] <= 1, ErrorKind::Parse,
            "statement " + s.label +
                ": each statement can have only one write access");
    }
    idCount["" + s.label + accessKindChar(a.kind) + a.array]++;
  }
  // Assign ids: label + R/W + array, "#k" suffix when ambiguous.
  std::map<std::string, int> idSeen;
  for (auto &a : accesses) {
    std::string base =
        statements[a.stmt].label + accessKindChar(a.kind) + a.array;
    int ordinal = ++idSeen[base];
    a.id = idCount[base] > 1 ? base + "#" + std::to_string(ordinal) : base;
  }
}

std::vector<Int> Schedule::timeOf(size_t stmt, const Point &x) const {
  const auto &ss = byStmt.at(stmt);
  std::vector<Int> t;
  t.reserve(ss.rows.size() + 1);
  for (const auto &r : ss.rows)
    t.push_back(r.eval(x));
  t.push_back(ss.constant);
  return t;
}

Schedule originalOrder(const Program &p) {
  Schedule order;
  const size_t len = 2 * p.dBar + 1;
  for (const auto &s : p.statements) {
    StatementSchedule ss;
    std::vector<AffineExpr> seq;
    for (size_t t = 0; t <= s.depth(); ++t) {
      seq.push_back(
          AffineExpr::constant(s.space, Int(s.textualPath[t])));
      if (t < s.depth())
        seq.push_back(AffineExpr::var(s.space, s.loopVars[t]));
    }
    // interleave: c0, v1, c1, ..., v_d, c_d; then pad with zeros
    std::vector<AffineExpr> rows;
    for (size_t t = 0; t < s.depth(); ++t) {
      rows.push_back(seq[2 * t]);
      rows.push_back(seq[2 * t + 1]);
    }
    rows.push_back(seq[2 * s.depth()]);
    while (rows.size() < len)
      rows.push_back(AffineExpr::constant(s.space, 0));
    // last row is always a constant here; keep it as the schedule constant
    ss.constant = rows.back().constant();
    rows.pop_back();
    ss.rows = std::move(rows);
    order.byStmt[s.index] = std::move(ss);
  }
  return order;
}

namespace {

struct NestNode {
  // either a loop (var set) or a statement leaf
  std::string var;
  std::optional<LoopBound> bound;
  const Statement *stmt = nullptr;
  std::map<size_t, NestNode> children;
};

void printAffine(std::ostream &os, const AffineExpr &e) { os << e.str(); }

void printNode(std::ostream &os, const NestNode &n, int indent,
               const Program &p) {
  std::string pad(indent * 2, ' ');
  if (n.stmt) {
    const Statement &s = *n.stmt;
    os << pad << s.label << ": ";
    const Access *write = nullptr;
    std::vector<const Access *> reads;
    for (const auto &a : p.accesses) {
      if (a.stmt != s.index)
        continue;
      if (a.kind == AccessKind::Write)
        write = &a;
      else
        reads.push_back(&a);
    }
    auto printAccess = [&](const Access &a) {
      os << a.array;
      for (const auto &row : a.phi)
        os << "[" << row.str() << "]";
    };
    if (write) {
      os << "write ";
      printAccess(*write);
    } else {
      os << "nowrite";
    }
    os << " <-";
    bool first = true;
    for (const Access *r : reads) {
      os << (first ? " " : ", ");
      first = false;
      printAccess(*r);
      // Guards beyond the domain are printed back as "when" clauses.
      // The guard is stored as domain + extra relations; print the extras.
      const auto &gp = r->guard.pieces();
      const auto &dp = s.domain.pieces();
      if (gp.size() == 1 && dp.size() == 1) {
        std::set<std::string> domLines;
        {
          std::istringstream in(dp[0].dump());
          std::string line;
          while (std::getline(in, line))
            domLines.insert(line);
        }
        std::vector<std::string> extra;
        std::istringstream in(gp[0].dump());
        std::string line;
        while (std::getline(in, line))
          if (!domLines.count(line))
            extra.push_back(line);
        // "expr >= 0" / "expr = 0" dump lines are themselves valid rels
        bool firstRel = true;
        for (auto &l : extra) {
          os << (firstRel ? " when " : " and ") << l;
          firstRel = false;
        }
      }
    }
    os << ";\n";
    return;
  }
  if (!n.var.empty()) {
    os << pad << "for " << n.var << " in ";
    printAffine(os, n.bound->lo);
    os << " .. ";
    printAffine(os, n.bound->hi);
    os << " {\n";
    for (const auto &[idx, child] : n.children)
      printNode(os, child, indent + 1, p);
    os << pad << "}\n";
    return;
  }
  for (const auto &[idx, child] : n.children)
    printNode(os, child, indent, p);
}

} // namespace

std::string print(const Program &p) {
  std::ostringstream os;
  if (!p.params.empty()) {
    os << "param";
    for (const auto &q : p.params)
      os << " " << q;
    os << ";\n";
  }
  for (const auto &a : p.arrays) {
    os << "array " << a.name;
    for (const auto &d : a.gridDims)
      os << "[" << d.str() << "]";
    os << " block " << a.blockBytes.str() << ";\n";
  }
  NestNode root;
  for (const auto &s : p.statements) {
    NestNode *cur = &root;
    for (size_t t = 0; t < s.depth(); ++t) {
      NestNode &child = cur->children[s.textualPath[t]];
      if (child.var.empty()) {
        child.var = s.loopVars[t];
        child.bound = s.loopBounds[t];
      }
      cur = &child;
    }
    NestNode &leaf = cur->children[s.textualPath[s.depth()]];
    leaf.stmt = &s;
  }
  printNode(os, root, 0, p);
  return os.str();
}

} // namespace polyshare::ir
