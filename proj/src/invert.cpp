#include "oq/invert.hpp"

#include <stdexcept>

namespace oq {

InstrPtr invert(const InstrPtr& prog) {
    if (!prog) throw std::invalid_argument("invert: null program");
    switch (prog->op) {
        case Op::Skip:
        case Op::X:
        case Op::Rev:
            return prog;  // self-inverse
        case Op::Seq:
            return make_seq(invert(prog->right), invert(prog->left));
        case Op::SR:
            return make_sri(prog->num, prog->var);
        case Op::SRI:
            return make_sr(prog->num, prog->var);
        case Op::QFT:
            return make_qfti(prog->num, prog->var);
        case Op::QFTI:
            return make_qft(prog->num, prog->var);
        case Op::CU:
            return make_cu(prog->pos, invert(prog->left));
        case Op::Lshift:
            return make_rshift(prog->var);
        case Op::Rshift:
            return make_lshift(prog->var);
    }
    throw std::logic_error("invert: unhandled instruction");
}

}  // namespace oq
