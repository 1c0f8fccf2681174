#pragma once

// Textual module format for the assembly language.
//
//   # comment (also //)
//   var a 4
//   var b 4
//   Rev a ;
//   QFT 4 b ;
//   CU a[3] (SR 2 b) ;
//   X b[0]
//
// Registers are declared first with `var name size`. Instructions follow,
// separated by `;`. Mnemonics: ID, X, SR, SRI, QFT, QFTI, CU, Lshift,
// Rshift, Rev. Positions are written name[offset]. A CU body is a single
// instruction or a parenthesized `;`-separated sequence.

#include <stdexcept>
#include <string>

#include "oq/ast.hpp"

namespace oq {

struct parse_error : std::runtime_error {
    parse_error(const std::string& msg, uint32_t line, uint32_t col)
        : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " +
                             std::to_string(col)),
          line(line),
          col(col) {}
    uint32_t line;
    uint32_t col;
};

struct Module {
    Registers regs;
    InstrPtr prog;
};

Module parse_module(const std::string& text);

std::string print_instr(const Registers& regs, const InstrPtr& prog);
std::string print_module(const Registers& regs, const InstrPtr& prog);

}  // namespace oq
