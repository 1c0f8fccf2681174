#include "oq/ast.hpp"

namespace oq {

Var Registers::add(const std::string& name, uint32_t size) {
    if (size == 0) throw std::invalid_argument("register size must be positive");
    if (find(name)) throw std::invalid_argument("duplicate register name: " + name);
    names_.push_back(name);
    sizes_.push_back(size);
    return static_cast<Var>(names_.size() - 1);
}

std::optional<Var> Registers::find(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<Var>(i);
    return std::nullopt;
}

uint32_t Registers::offset_of(Var v) const {
    uint32_t off = 0;
    for (Var i = 0; i < v; ++i) off += sizes_.at(i);
    return off;
}

uint32_t Registers::total_qubits() const {
    uint32_t total = 0;
    for (uint32_t s : sizes_) total += s;
    return total;
}

namespace {
InstrPtr node(Instr i) { return std::make_shared<const Instr>(std::move(i)); }
}  // namespace

InstrPtr make_skip(Position p) { return node({Op::Skip, p, 0, 0, nullptr, nullptr}); }
InstrPtr make_x(Position p) { return node({Op::X, p, 0, 0, nullptr, nullptr}); }
InstrPtr make_sr(uint32_t m, Var x) { return node({Op::SR, {}, m, x, nullptr, nullptr}); }
InstrPtr make_sri(uint32_t m, Var x) { return node({Op::SRI, {}, m, x, nullptr, nullptr}); }
InstrPtr make_qft(uint32_t n, Var x) { return node({Op::QFT, {}, n, x, nullptr, nullptr}); }
InstrPtr make_qfti(uint32_t n, Var x) { return node({Op::QFTI, {}, n, x, nullptr, nullptr}); }

InstrPtr make_cu(Position p, InstrPtr body) {
    if (!body) throw std::invalid_argument("CU body must be non-null");
    return node({Op::CU, p, 0, 0, std::move(body), nullptr});
}

InstrPtr make_lshift(Var x) { return node({Op::Lshift, {}, 0, x, nullptr, nullptr}); }
InstrPtr make_rshift(Var x) { return node({Op::Rshift, {}, 0, x, nullptr, nullptr}); }
InstrPtr make_rev(Var x) { return node({Op::Rev, {}, 0, x, nullptr, nullptr}); }

InstrPtr make_seq(InstrPtr a, InstrPtr b) {
    if (!a || !b) throw std::invalid_argument("Seq children must be non-null");
    return node({Op::Seq, {}, 0, 0, std::move(a), std::move(b)});
}

InstrPtr make_seq(const std::vector<InstrPtr>& items) {
    if (items.empty()) throw std::invalid_argument("empty instruction sequence");
    // Balanced fold keeps depth logarithmic.
    std::vector<InstrPtr> layer = items;
    while (layer.size() > 1) {
        std::vector<InstrPtr> next;
        next.reserve((layer.size() + 1) / 2);
        for (size_t i = 0; i + 1 < layer.size(); i += 2)
            next.push_back(make_seq(layer[i], layer[i + 1]));
        if (layer.size() % 2 == 1) next.push_back(layer.back());
        layer = std::move(next);
    }
    return layer.front();
}

uint64_t instr_count(const InstrPtr& i) {
    if (!i) return 0;
    uint64_t n = 0;
    std::vector<const Instr*> stack{i.get()};
    while (!stack.empty()) {
        const Instr* cur = stack.back();
        stack.pop_back();
        if (cur->op == Op::Seq) {
            stack.push_back(cur->left.get());
            stack.push_back(cur->right.get());
        } else {
            ++n;
            if (cur->op == Op::CU) stack.push_back(cur->left.get());
        }
    }
    return n;
}

void flatten(const InstrPtr& i, std::vector<InstrPtr>& out) {
    if (!i) return;
    if (i->op == Op::Seq) {
        flatten(i->left, out);
        flatten(i->right, out);
    } else {
        out.push_back(i);
    }
}

std::vector<InstrPtr> flatten(const InstrPtr& i) {
    std::vector<InstrPtr> out;
    flatten(i, out);
    return out;
}

}  // namespace oq
