#pragma once

#include "polyshare/ir.hpp"

namespace polyshare::ir {

/// Parse a program in the block-access DSL:
///
///   program   := decl* nest+
///   decl      := "param" IDENT+ ";"
///              | "array" IDENT ("[" affine "]")+ "block" INT ";"
///   nest      := "for" IDENT "in" affine ".." affine "{" (nest | stmt)* "}"
///   stmt      := LABEL ":" "write" access "<-" readlist ";"
///              | LABEL ":" "nowrite" "<-" readlist ";"
///   readlist  := access guard? ("," access guard?)*
///   access    := IDENT ("[" affine "]")+
///   guard     := "when" rel ("and" rel)*
///   rel       := affine ("<" | "<=" | "=" | ">=" | ">") affine
///   affine    := integer-linear expression over enclosing loop vars,
///                params, and literals
///
/// Loop bounds are inclusive-exclusive: "lo .. hi" means lo <= v < hi.
/// "#" starts a line comment. Syntax and validation errors carry
/// line/column positions.
Program parse(const std::string &text);

} // namespace polyshare::ir
