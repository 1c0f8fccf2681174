#pragma once

// Text format for the imperative oracle language. The grammar is C-like:
//
//   program  := (global | fundef)*
//   global   := mode base name ('[' int ']')? ('=' expr)? ';'
//   fundef   := 'def' name '(' params? ')' '{' stmt* '}'
//   param    := mode base name                        (C mode only)
//   stmt     := decl | lval assignop expr ';' | if | for | inv | return
//   assignop := '=' | '+=' | '-=' | '^=' | '<<<=' | '>>>='
//   if       := 'if' '(' expr ')' block ('else' block)?
//   for      := 'for' '(' decl-no-semi ';' name cmp expr ';' step ')' block
//   step     := name '++' | name '--' | name ('+='|'-=') expr
//   inv      := 'inv' '(' lval ')' ';'
//   expr     := comparison over + - ^ over * / % over primaries
//   primary  := int | hex | fixedp-literal | true | false | lval
//             | name '(' args ')' | '(' expr ')'
//
// '#' and '//' start line comments. Identifiers must not begin with "__"
// (reserved for compiler temporaries).

#include <string>

#include "oq/qimp_ast.hpp"

namespace oq::qimp {

// Parses a whole program; throws qimp_error ("syntax") with a line number.
Program parse(const std::string& text);

// Parses a file (convenience wrapper; file errors throw qimp_error too).
Program parse_file(const std::string& path);

}  // namespace oq::qimp
