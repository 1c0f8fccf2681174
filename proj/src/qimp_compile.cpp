#include "oq/qimp_compile.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "oq/emit.hpp"
#include "oq/invert.hpp"

namespace oq::qimp {
namespace {

using emit::at;
using emit::ccx;
using emit::cx;
using emit::CuccaroOpts;
using emit::V;

// Register discipline:
//   * slot pool ("__s"): one register per live value slot; freed (zeroed)
//     when the slot is undone or unwound;
//   * helper pool ("__h"): fragment-local scratch (carries, loaded
//     constants, products, quotients); always free and zero between
//     fragments, which is what makes replaying a recorded fragment in
//     reverse safe at any later point;
//   * guard pool ("__g"): one-bit guard-conjunction registers, live for a
//     whole branch, kept apart from "__h" so open branches never collide
//     with replayed fragment scratch.
struct CompileSink : Sink {
    uint32_t sz;
    Flag flag;

    Registers regs;
    std::vector<InstrPtr> stream;
    std::map<Slot, Var> slot_reg;
    std::map<uint64_t, std::pair<size_t, size_t>> spans;
    std::vector<std::string> ops;
    std::map<std::string, std::vector<Var>> inputs;

    std::map<uint32_t, std::vector<Var>> free_slot_pool, free_helper_pool;
    std::vector<Var> free_guard_pool;
    int slot_seq = 0, helper_seq = 0, guard_seq = 0;

    struct GuardLevel {
        Var guard = 0;
        Var conj = 0;
        std::optional<Var> outer;
        bool flipped = false;
    };
    std::vector<GuardLevel> guards;
    // The callee body runs unguarded (it cancels against its own inverse);
    // only the return copy is guarded, so caller guards rest here meanwhile.
    std::vector<std::vector<GuardLevel>> suspended;

    struct CallMark {
        size_t start = 0;
        std::vector<Slot> minted;
    };
    std::vector<CallMark> calls;

    CompileSink(uint32_t s, Flag f) : sz(s), flag(f) {}

    // ---- registers ----

    Var pool_reg(std::map<uint32_t, std::vector<Var>>& pool, const char* stem,
                 int& seq, uint32_t w) {
        auto& free = pool[w];
        if (!free.empty()) {
            Var v = free.back();
            free.pop_back();
            return v;
        }
        return regs.add(stem + std::to_string(++seq), w);
    }
    Var bind(Slot s, uint32_t w) {
        Var v = pool_reg(free_slot_pool, "__s", slot_seq, w);
        slot_reg[s] = v;
        if (!calls.empty()) calls.back().minted.push_back(s);
        return v;
    }
    void unbind(Slot s) {
        auto it = slot_reg.find(s);
        if (it == slot_reg.end()) return;
        free_slot_pool[regs.size_of(it->second)].push_back(it->second);
        slot_reg.erase(it);
    }
    Var helper(uint32_t w) {
        return pool_reg(free_helper_pool, "__h", helper_seq, w);
    }
    void drop(Var h) { free_helper_pool[regs.size_of(h)].push_back(h); }

    // ---- emission ----

    void put(InstrPtr i) { stream.push_back(std::move(i)); }
    void put_all(const V& v) {
        for (auto& i : v) stream.push_back(i);
    }
    void undo_range(size_t start, size_t end) {
        if (end <= start) return;
        V slice(stream.begin() + ptrdiff_t(start), stream.begin() + ptrdiff_t(end));
        put(invert(make_seq(slice)));
    }

    std::optional<Position> conj() const {
        if (guards.empty()) return std::nullopt;
        return at(guards.back().conj, 0);
    }
    void gx(Position t) {
        auto c = conj();
        put(c ? cx(*c, t) : make_x(t));
    }
    void gcx(Position s, Position t) {
        auto c = conj();
        put(c ? ccx(*c, s, t) : cx(s, t));
    }
    InstrPtr guard_wrap(InstrPtr i) const {
        auto c = conj();
        return c ? make_cu(*c, std::move(i)) : i;
    }

    uint32_t width_atom(const QAtom& a) const {
        return a.base == Base::Bool ? 1 : sz;
    }
    Var areg(const QAtom& a) const { return slot_reg.at(a.slot); }

    // dst receives src under the current guard: constants X-load their set
    // bits, registers CX-copy. Doubling as the XOR update.
    void write_value(Var dst, uint32_t w, const QAtom& src) {
        if (src.is_const) {
            uval v = src.value & word_mask(w);
            for (uint32_t j = 0; j < w; ++j)
                if ((v >> j) & 1) gx(at(dst, j));
        } else {
            Var s = areg(src);
            for (uint32_t j = 0; j < w; ++j) gcx(at(s, j), at(dst, j));
        }
    }
    // unguarded building blocks for self-cancelling scratch fragments
    void copy_plain(Var src, Var dst, uint32_t n) {
        for (uint32_t j = 0; j < n; ++j) put(cx(at(src, j), at(dst, j)));
    }
    void load_plain(Var dst, uint32_t w, uval v) {
        V out;
        emit::load_const(out, dst, w, v & word_mask(w));
        put_all(out);
    }

    // Copies n wires of src starting at src_off into dst under the guard,
    // runs the guarded post step, then appends the inverse of everything
    // emitted since pre_start (the scratch computation).
    void copy_out_undo(size_t pre_start, Var src, uint32_t src_off, Var dst,
                       uint32_t n, const std::function<void()>& post = {}) {
        size_t pre_end = stream.size();
        for (uint32_t j = 0; j < n; ++j) gcx(at(src, src_off + j), at(dst, j));
        if (post) post();
        undo_range(pre_start, pre_end);
    }

    // ---- in-place updates (guard threaded through the gates) ----

    void inplace_addsub(Var dst, uint32_t w, bool sub, const QAtom& v) {
        if (flag == Flag::QFT) {
            put(make_rev(dst));
            put(make_qft(w, dst));
            if (v.is_const) {
                uval c = v.value & word_mask(w);
                if (c) put(guard_wrap(emit::phi_add_const(dst, w, c, sub)));
            } else {
                V casc;
                emit::phi_add_reg(casc, areg(v), width_atom(v), dst, w, sub);
                for (auto& i : casc) put(guard_wrap(i));
            }
            put(make_qfti(w, dst));
            put(make_rev(dst));
            return;
        }
        Var cin = helper(1);
        CuccaroOpts o;
        o.ctrl = conj();
        V out;
        if (v.is_const) {
            uval c = v.value & word_mask(w);
            Var h = helper(w);
            emit::load_const(out, h, w, c);
            if (sub)
                emit::cuccaro_sub(out, h, dst, 0, w, at(cin, 0), o);
            else
                emit::cuccaro_add(out, h, dst, 0, w, at(cin, 0), o);
            emit::load_const(out, h, w, c);
            put_all(out);
            drop(h);
        } else {
            if (sub)
                emit::cuccaro_sub(out, areg(v), dst, 0, w, at(cin, 0), o);
            else
                emit::cuccaro_add(out, areg(v), dst, 0, w, at(cin, 0), o);
            put_all(out);
        }
        drop(cin);
    }

    void inplace_rot(Var dst, uint32_t w, Bop op, const QAtom& v) {
        uint32_t k = uint32_t(lo64(v.value) % w);
        if (k == 0) return;
        auto c = conj();
        if (!c) {
            // value-left rotation moves bit j to j+k; on the little-endian
            // wire layout that is the "new wire reads the one below" shift
            for (uint32_t t = 0; t < k; ++t)
                put(op == Bop::RotL ? make_rshift(dst) : make_lshift(dst));
            return;
        }
        auto cswap = [&](Position p, Position q) {
            put(cx(q, p));
            put(ccx(*c, p, q));
            put(cx(q, p));
        };
        for (uint32_t t = 0; t < k; ++t) {
            if (op == Bop::RotL) {
                for (uint32_t j = w - 1; j >= 1; --j)
                    cswap(at(dst, j), at(dst, j - 1));
            } else {
                for (uint32_t j = 1; j < w; ++j) cswap(at(dst, j), at(dst, j - 1));
            }
        }
    }

    // ---- out-of-place fragments (scratch, guarded copy, undo) ----

    void nat_mul(Var dst, uint32_t w, QAtom a, QAtom b, std::vector<Var>& todrop) {
        if (a.is_const) std::swap(a, b);  // keep a register on the left
        Var x = areg(a);
        size_t pre = stream.size();
        Var p = helper(w);
        todrop.push_back(p);
        if (b.is_const) {
            uval c = b.value & word_mask(w);
            if (flag == Flag::QFT) {
                put(make_rev(p));
                put(make_qft(w, p));
                for (uint32_t m = 0; m < w; ++m) {
                    uval term = (c << m) & word_mask(w);
                    if (term)
                        put(make_cu(at(x, m), emit::phi_add_const(p, w, term)));
                }
                put(make_qfti(w, p));
                put(make_rev(p));
            } else {
                Var cin = helper(1);
                todrop.push_back(cin);
                V out;
                for (uint32_t j = 0; j < w; ++j)
                    if ((c >> j) & 1)
                        emit::cuccaro_add(out, x, p, j, w - j, at(cin, 0));
                put_all(out);
            }
        } else {
            Var y = areg(b);
            if (a.slot == b.slot) {
                // x*x: controls may not ride the register being added
                Var cp = helper(w);
                todrop.push_back(cp);
                copy_plain(x, cp, w);
                y = cp;
            }
            if (flag == Flag::QFT) {
                put(make_rev(p));
                put(make_qft(w, p));
                for (uint32_t k = 0; k < w; ++k)
                    for (uint32_t m = 0; m + k < w; ++m)
                        put(make_cu(at(y, k),
                                    make_cu(at(x, m), make_sr(w - 1 - m - k, p))));
                put(make_qfti(w, p));
                put(make_rev(p));
            } else {
                Var cin = helper(1);
                todrop.push_back(cin);
                V out;
                for (uint32_t k = 0; k < w; ++k) {
                    CuccaroOpts o;
                    o.ctrl = at(y, k);
                    emit::cuccaro_add(out, x, p, k, w - k, at(cin, 0), o);
                }
                put_all(out);
            }
        }
        copy_out_undo(pre, p, 0, dst, w);
    }

    // Signed product: the numerator product accumulates in double width,
    // each negative operand subtracts the other shifted up a word, and the
    // middle bits are the fixedp result.
    void fx_mul(Var dst, QAtom a, QAtom b, std::vector<Var>& todrop) {
        if (a.is_const) std::swap(a, b);
        Var x = areg(a);
        const uint32_t w2 = 2 * sz;
        const uval half = pow2(sz - 1);
        size_t pre = stream.size();
        Var p = helper(w2);
        todrop.push_back(p);
        if (b.is_const) {
            uval c = b.value & word_mask(sz);
            if (flag == Flag::QFT) {
                put(make_rev(p));
                put(make_qft(w2, p));
                for (uint32_t j = 0; j < sz; ++j) {
                    uval term = (c << j) & word_mask(w2);
                    if (term)
                        put(make_cu(at(x, j), emit::phi_add_const(p, w2, term)));
                }
                uval corr = (c << sz) & word_mask(w2);
                if (corr)
                    put(make_cu(at(x, sz - 1),
                                emit::phi_add_const(p, w2, corr, true)));
                if (c & half)
                    for (uint32_t j = 0; j < sz; ++j)
                        put(make_cu(at(x, j), make_sri(w2 - 1 - (sz + j), p)));
                put(make_qfti(w2, p));
                put(make_rev(p));
            } else {
                Var hc = helper(w2);
                Var cin = helper(1);
                todrop.push_back(hc);
                todrop.push_back(cin);
                V out;
                emit::load_const(out, hc, w2, c);
                for (uint32_t j = 0; j < sz; ++j) {
                    CuccaroOpts o;
                    o.ctrl = at(x, j);
                    emit::cuccaro_add(out, hc, p, j, w2 - j, at(cin, 0), o);
                }
                {
                    CuccaroOpts o;
                    o.ctrl = at(x, sz - 1);
                    emit::cuccaro_sub(out, hc, p, sz, sz, at(cin, 0), o);
                }
                if (c & half) emit::cuccaro_sub(out, x, p, sz, sz, at(cin, 0));
                emit::load_const(out, hc, w2, c);
                put_all(out);
            }
        } else {
            Var y = areg(b);
            if (a.slot == b.slot) {
                Var cp = helper(sz);
                todrop.push_back(cp);
                copy_plain(x, cp, sz);
                y = cp;
            }
            if (flag == Flag::QFT) {
                put(make_rev(p));
                put(make_qft(w2, p));
                for (uint32_t j = 0; j < sz; ++j)
                    for (uint32_t k = 0; k < sz; ++k)
                        put(make_cu(at(x, j),
                                    make_cu(at(y, k), make_sr(w2 - 1 - (j + k), p))));
                for (uint32_t k = 0; k < sz; ++k)
                    put(make_cu(at(x, sz - 1),
                                make_cu(at(y, k), make_sri(w2 - 1 - (sz + k), p))));
                for (uint32_t j = 0; j < sz; ++j)
                    put(make_cu(at(y, sz - 1),
                                make_cu(at(x, j), make_sri(w2 - 1 - (sz + j), p))));
                put(make_qfti(w2, p));
                put(make_rev(p));
            } else {
                Var hb = helper(w2);
                Var cin = helper(1);
                todrop.push_back(hb);
                todrop.push_back(cin);
                V out;
                for (uint32_t j = 0; j < sz; ++j)
                    out.push_back(cx(at(y, j), at(hb, j)));
                for (uint32_t j = 0; j < sz; ++j) {
                    CuccaroOpts o;
                    o.ctrl = at(x, j);
                    emit::cuccaro_add(out, hb, p, j, w2 - j, at(cin, 0), o);
                }
                {
                    CuccaroOpts o;
                    o.ctrl = at(x, sz - 1);
                    emit::cuccaro_sub(out, y, p, sz, sz, at(cin, 0), o);
                }
                {
                    CuccaroOpts o;
                    o.ctrl = at(y, sz - 1);
                    emit::cuccaro_sub(out, x, p, sz, sz, at(cin, 0), o);
                }
                for (uint32_t j = 0; j < sz; ++j)
                    out.push_back(cx(at(y, j), at(hb, j)));
                put_all(out);
            }
        }
        copy_out_undo(pre, p, sz - 1, dst, sz);
    }

    // Restoring division of the work register wr (width W, values below
    // 2^bound_bits) by the constant M; quotient bits land in q.
    void restoring_div(uval M, Var wr, uint32_t W, uint32_t bound_bits, Var q,
                       std::vector<Var>& todrop) {
        uint32_t I = 0;
        while ((M << (I + 1)) <= mask_bits(bound_bits)) ++I;
        if (flag == Flag::QFT) {
            for (uint32_t i = 0; i <= I; ++i) {
                const uval d = M << (I - i);
                put(make_rev(wr));
                put(make_qft(W, wr));
                put(emit::phi_sub_const(wr, W, d));
                put(make_qfti(W, wr));
                put(make_rev(wr));
                put(cx(at(wr, W - 1), at(q, I - i)));  // borrow sign
                put(make_rev(wr));
                put(make_qft(W, wr));
                put(make_cu(at(q, I - i), emit::phi_add_const(wr, W, d)));
                put(make_qfti(W, wr));
                put(make_rev(wr));
                put(make_x(at(q, I - i)));
            }
        } else {
            Var h = helper(W);
            Var cin = helper(1);
            todrop.push_back(h);
            todrop.push_back(cin);
            for (uint32_t i = 0; i <= I; ++i) {
                const uval d = M << (I - i);
                const uval notd = (~d) & mask_bits(W);
                V out;
                // q bit = [wr >= d] via the carry of wr + ~d + 1
                emit::load_const(out, h, W, notd);
                out.push_back(make_x(at(cin, 0)));
                V chain = emit::maj_chain(h, wr, 0, W, at(cin, 0));
                out.insert(out.end(), chain.begin(), chain.end());
                out.push_back(cx(at(h, W - 1), at(q, I - i)));
                out.push_back(invert(make_seq(chain)));
                out.push_back(make_x(at(cin, 0)));
                emit::load_const(out, h, W, notd);
                emit::load_const(out, h, W, d);
                CuccaroOpts o;
                o.ctrl = at(q, I - i);
                emit::cuccaro_sub(out, h, wr, 0, W, at(cin, 0), o);
                emit::load_const(out, h, W, d);
                put_all(out);
            }
        }
    }

    void nat_divmod(Var dst, uint32_t w, const QAtom& a, uval M, bool want_mod,
                    std::vector<Var>& todrop) {
        size_t pre = stream.size();
        const uint32_t W = w + 1;
        Var wr = helper(W);
        Var q = helper(w);
        todrop.push_back(wr);
        todrop.push_back(q);
        copy_plain(areg(a), wr, w);
        restoring_div(M, wr, W, w, q, todrop);
        copy_out_undo(pre, want_mod ? wr : q, 0, dst, w);
    }

    // Signed floor division by a nat constant via a bias: shifting the
    // numerator by 2^(sz-1) makes it non-negative, and preloading
    // ceil(2^(sz-1)/M)*M - 2^(sz-1) shifts the quotient by exactly
    // ceil(2^(sz-1)/M), which the final guarded subtraction removes.
    void fx_div(Var dst, const QAtom& a, uval M, std::vector<Var>& todrop) {
        const uint32_t W = sz + 2;
        const uval half = pow2(sz - 1);
        const uval D = (half + M - 1) / M;
        const uval C = D * M - half;
        size_t pre = stream.size();
        Var wr = helper(W);
        Var q = helper(sz + 1);
        todrop.push_back(wr);
        todrop.push_back(q);
        copy_plain(areg(a), wr, sz);
        put(make_x(at(wr, sz - 1)));
        if (C) {
            if (flag == Flag::QFT) {
                put(make_rev(wr));
                put(make_qft(W, wr));
                put(emit::phi_add_const(wr, W, C));
                put(make_qfti(W, wr));
                put(make_rev(wr));
            } else {
                Var h = helper(W);
                Var cin = helper(1);
                todrop.push_back(h);
                todrop.push_back(cin);
                V out;
                emit::load_const(out, h, W, C);
                emit::cuccaro_add(out, h, wr, 0, W, at(cin, 0));
                emit::load_const(out, h, W, C);
                put_all(out);
            }
        }
        restoring_div(M, wr, W, sz + 1, q, todrop);
        copy_out_undo(pre, q, 0, dst, sz, [&] {
            QAtom dd{true, D & word_mask(sz), 0, Base::Nat};
            inplace_addsub(dst, sz, true, dd);
        });
    }

    // Order comparisons reduce to [x < y]; fixedp operands are biased by
    // flipping the sign bit so the unsigned borrow decides the signed order.
    void cmp_order(Var dst, Bop op, QAtom x, QAtom y, std::vector<Var>& todrop) {
        const bool flip = op == Bop::Le || op == Bop::Ge;
        if (op == Bop::Gt || op == Bop::Le) std::swap(x, y);
        if (!x.is_const && !y.is_const && x.slot == y.slot) {
            if (flip) gx(at(dst, 0));
            return;
        }
        const bool fx = x.base == Base::Fixedp || y.base == Base::Fixedp;
        const uval half = pow2(sz - 1);
        auto biased = [&](uval v) { return (fx ? v ^ half : v) & word_mask(sz); };
        size_t pre = stream.size();
        if (flag == Flag::QFT) {
            const uint32_t W = sz + 1;
            Var sc = helper(W);
            todrop.push_back(sc);
            Var yb = 0;
            bool have_yb = false;
            if (!y.is_const && fx) {
                yb = helper(sz);
                todrop.push_back(yb);
                have_yb = true;
                copy_plain(areg(y), yb, sz);
                put(make_x(at(yb, sz - 1)));
            }
            if (x.is_const) {
                load_plain(sc, W, biased(x.value));
            } else {
                copy_plain(areg(x), sc, sz);
                if (fx) put(make_x(at(sc, sz - 1)));
            }
            put(make_rev(sc));
            put(make_qft(W, sc));
            if (y.is_const) {
                put(emit::phi_sub_const(sc, W, biased(y.value)));
            } else {
                V casc;
                emit::phi_add_reg(casc, have_yb ? yb : areg(y), sz, sc, W, true);
                put_all(casc);
            }
            put(make_qfti(W, sc));
            // reversed layout: wire 0 is the borrow (sign) bit
            size_t pre_end = stream.size();
            gcx(at(sc, 0), at(dst, 0));
            if (flip) gx(at(dst, 0));
            undo_range(pre, pre_end);
        } else {
            Var h = helper(sz);
            Var cin = helper(1);
            todrop.push_back(h);
            todrop.push_back(cin);
            if (x.is_const) {
                load_plain(h, sz, ~biased(x.value));
            } else {
                copy_plain(areg(x), h, sz);
                // complement of the biased copy: every bit flips except the
                // sign bit, which the bias flips back
                for (uint32_t j = 0; j < sz; ++j)
                    if (!(fx && j == sz - 1)) put(make_x(at(h, j)));
            }
            Var yw;
            if (y.is_const) {
                Var hy = helper(sz);
                todrop.push_back(hy);
                load_plain(hy, sz, biased(y.value));
                yw = hy;
            } else if (fx) {
                Var hy = helper(sz);
                todrop.push_back(hy);
                copy_plain(areg(y), hy, sz);
                put(make_x(at(hy, sz - 1)));
                yw = hy;
            } else {
                yw = areg(y);
            }
            V chain = emit::maj_chain(h, yw, 0, sz, at(cin, 0));
            put_all(chain);
            size_t pre_end = stream.size();
            gcx(at(h, sz - 1), at(dst, 0));
            if (flip) gx(at(dst, 0));
            undo_range(pre, pre_end);
        }
    }

    void cmp_eq(Var dst, Bop op, const QAtom& x, const QAtom& y,
                std::vector<Var>& todrop) {
        const bool ne = op == Bop::Ne;
        if (!x.is_const && !y.is_const && x.slot == y.slot) {
            if (!ne) gx(at(dst, 0));
            return;
        }
        const uint32_t w = std::max(width_atom(x), width_atom(y));
        size_t pre = stream.size();
        Var sc = helper(w);
        todrop.push_back(sc);
        auto fold_in = [&](const QAtom& v) {
            if (v.is_const)
                load_plain(sc, w, v.value);
            else
                copy_plain(areg(v), sc, width_atom(v));
        };
        fold_in(x);
        fold_in(y);
        for (uint32_t j = 0; j < w; ++j) put(make_x(at(sc, j)));
        Position all_eq = at(sc, 0);
        if (w >= 2) {
            Var k = helper(w - 1);
            todrop.push_back(k);
            put(ccx(at(sc, 0), at(sc, 1), at(k, 0)));
            for (uint32_t j = 2; j < w; ++j)
                put(ccx(at(k, j - 2), at(sc, j), at(k, j - 1)));
            all_eq = at(k, w - 2);
        }
        size_t pre_end = stream.size();
        gcx(all_eq, at(dst, 0));
        if (ne) gx(at(dst, 0));
        undo_range(pre, pre_end);
    }

    // ---- dispatch tags ----

    static std::string tag_for(Bop op, Base base, bool has_const) {
        std::string t;
        switch (op) {
            case Bop::Add: t = "add"; break;
            case Bop::Sub: t = "sub"; break;
            case Bop::Xor: t = "xor"; break;
            case Bop::Mul: t = base == Base::Fixedp ? "fx_mul" : "mul"; break;
            case Bop::Div: t = base == Base::Fixedp ? "fx_div" : "div"; break;
            case Bop::Mod: t = "mod"; break;
            case Bop::Lt: return "lt";
            case Bop::Le: return "le";
            case Bop::Gt: return "gt";
            case Bop::Ge: return "ge";
            case Bop::Eq: return "eq";
            case Bop::Ne: return "ne";
            case Bop::RotL: return "rot_l";
            case Bop::RotR: return "rot_r";
        }
        return has_const ? t + "_const" : t;
    }

    // ---- sink events ----

    void on_input(Slot s, const std::string& name, uint32_t elem, Base,
                  uint32_t w) override {
        std::string rn = elem == 0 ? name : name + "[" + std::to_string(elem) + "]";
        Var r = regs.add(rn, w);
        slot_reg[s] = r;
        inputs[name].push_back(r);
    }

    void on_zero(Slot s, Base, uint32_t w) override { bind(s, w); }

    void on_load(uint64_t id, Slot dst, Base, uint32_t w,
                 const QAtom& src) override {
        Var d = bind(dst, w);
        size_t start = stream.size();
        write_value(d, w, src);
        spans[id] = {start, stream.size()};
        ops.push_back(src.is_const ? "load_const" : "copy");
    }

    void on_bin(uint64_t id, Slot dst, Base base, uint32_t w, Bop op,
                const QAtom& a, const QAtom& b) override {
        Var d = bind(dst, w);
        size_t start = stream.size();
        std::vector<Var> todrop;
        switch (op) {
            case Bop::Add:
            case Bop::Sub:
                write_value(d, w, a);
                inplace_addsub(d, w, op == Bop::Sub, b);
                break;
            case Bop::Xor:
                write_value(d, w, a);
                write_value(d, w, b);
                break;
            case Bop::Mul:
                if (base == Base::Fixedp)
                    fx_mul(d, a, b, todrop);
                else
                    nat_mul(d, w, a, b, todrop);
                break;
            case Bop::Div:
                if (base == Base::Fixedp)
                    fx_div(d, a, b.value & word_mask(sz), todrop);
                else
                    nat_divmod(d, w, a, b.value & word_mask(w), false, todrop);
                break;
            case Bop::Mod:
                nat_divmod(d, w, a, b.value & word_mask(w), true, todrop);
                break;
            case Bop::Lt:
            case Bop::Le:
            case Bop::Gt:
            case Bop::Ge:
                cmp_order(d, op, a, b, todrop);
                break;
            case Bop::Eq:
            case Bop::Ne:
                cmp_eq(d, op, a, b, todrop);
                break;
            case Bop::RotL:
            case Bop::RotR:
                break;  // rotations are statement-level updates only
        }
        for (Var h : todrop) drop(h);
        spans[id] = {start, stream.size()};
        Base opb = a.base == Base::Fixedp || b.base == Base::Fixedp
                       ? Base::Fixedp
                       : Base::Nat;
        ops.push_back(tag_for(op, op == Bop::Mul || op == Bop::Div ? opb : base,
                              a.is_const || b.is_const));
    }

    void on_op_assign(uint64_t id, Slot dst, Base, uint32_t w, Bop op,
                      const QAtom& v) override {
        Var d = slot_reg.at(dst);
        size_t start = stream.size();
        switch (op) {
            case Bop::Add:
                inplace_addsub(d, w, false, v);
                break;
            case Bop::Sub:
                inplace_addsub(d, w, true, v);
                break;
            case Bop::Xor:
                write_value(d, w, v);
                break;
            case Bop::RotL:
            case Bop::RotR:
                inplace_rot(d, w, op, v);
                break;
            default:
                break;
        }
        spans[id] = {start, stream.size()};
        ops.push_back(tag_for(op, Base::Nat, v.is_const));
    }

    void on_inv(uint64_t id, Slot slot, bool in_place) override {
        auto sp = spans.at(id);
        undo_range(sp.first, sp.second);
        if (!in_place) unbind(slot);
        ops.push_back("inv");
    }

    void toggle_conj(const GuardLevel& lv, bool negate) {
        Position g = at(lv.guard, 0);
        if (negate) put(make_x(g));
        if (lv.outer)
            put(ccx(at(*lv.outer, 0), g, at(lv.conj, 0)));
        else
            put(cx(g, at(lv.conj, 0)));
        if (negate) put(make_x(g));
    }

    void on_if_begin(Slot g) override {
        GuardLevel lv;
        lv.guard = slot_reg.at(g);
        if (!guards.empty()) lv.outer = guards.back().conj;
        if (!free_guard_pool.empty()) {
            lv.conj = free_guard_pool.back();
            free_guard_pool.pop_back();
        } else {
            lv.conj = regs.add("__g" + std::to_string(++guard_seq), 1);
        }
        toggle_conj(lv, false);
        guards.push_back(lv);
    }
    void on_if_else() override {
        GuardLevel& lv = guards.back();
        toggle_conj(lv, false);  // conjunction back to zero
        toggle_conj(lv, true);   // now outer AND (not guard)
        lv.flipped = true;
    }
    void on_if_end() override {
        GuardLevel lv = guards.back();
        guards.pop_back();
        toggle_conj(lv, lv.flipped);
        free_guard_pool.push_back(lv.conj);
    }

    void on_call_begin() override {
        calls.push_back({stream.size(), {}});
        suspended.push_back(std::move(guards));
        guards.clear();
    }
    void on_call_end(uint64_t id, Slot dst, Base, uint32_t w,
                     const QAtom& ret) override {
        guards = std::move(suspended.back());
        suspended.pop_back();
        CallMark m = std::move(calls.back());
        calls.pop_back();
        Var r = areg(ret);
        Var d = bind(dst, w);
        size_t cs = stream.size();
        for (uint32_t j = 0; j < w; ++j) gcx(at(r, j), at(d, j));
        spans[id] = {cs, stream.size()};
        undo_range(m.start, cs);
        for (Slot s : m.minted) unbind(s);
        ops.push_back("call");
    }
};

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

const char* flag_name(Flag f) {
    return f == Flag::QFT ? "qft" : "classical";
}

CompileResult compile(const CheckedProgram& p, uint32_t sz, Flag flag,
                      const std::map<std::string, uval>& c_overrides) {
    if (sz < 2 || sz > 63)
        throw qimp_error("size", "bit width must be between 2 and 63", 0);
    CompileSink sink(sz, flag);
    CompileResult r;
    r.sz = sz;
    r.flag = flag;
    WalkResult w = walk_program(p, sz, c_overrides, sink);
    if (w.error) {
        r.error = w.error;
        return r;
    }
    r.regs = std::move(sink.regs);
    if (!sink.stream.empty())
        r.prog = make_seq(sink.stream);
    else if (r.regs.count())
        r.prog = make_skip(at(0, 0));
    for (auto& [name, slots] : w.q_final) {
        auto& out = r.outputs[name];
        for (Slot s : slots) out.push_back(sink.slot_reg.at(s));
    }
    r.inputs = std::move(sink.inputs);
    r.c_env = std::move(w.c_final);
    r.ops = std::move(sink.ops);
    r.total_qubits = r.regs.total_qubits();
    std::set<Var> io;
    for (auto& [name, vs] : r.inputs) io.insert(vs.begin(), vs.end());
    for (auto& [name, vs] : r.outputs) io.insert(vs.begin(), vs.end());
    for (Var v : io) r.io_qubits += r.regs.size_of(v);
    for (auto& [wd, vs] : sink.free_slot_pool)
        r.free_scratch.insert(r.free_scratch.end(), vs.begin(), vs.end());
    for (auto& [wd, vs] : sink.free_helper_pool)
        r.free_scratch.insert(r.free_scratch.end(), vs.begin(), vs.end());
    r.free_scratch.insert(r.free_scratch.end(), sink.free_guard_pool.begin(),
                          sink.free_guard_pool.end());
    std::sort(r.free_scratch.begin(), r.free_scratch.end());
    return r;
}

std::string CompileResult::manifest() const {
    std::ostringstream os;
    os << "{\"bit_width\":" << sz << ",\"flavor\":\"" << flag_name(flag) << "\"";
    if (error) {
        os << ",\"error\":\"" << json_escape(*error) << "\"}";
        return os.str();
    }
    auto reg_json = [&](Var v) {
        os << "{\"register\":\"" << json_escape(regs.name_of(v))
           << "\",\"first_qubit\":" << regs.offset_of(v)
           << ",\"width\":" << regs.size_of(v) << "}";
    };
    auto var_map = [&](const std::map<std::string, std::vector<Var>>& m) {
        os << "{";
        bool first = true;
        for (auto& [name, vs] : m) {
            if (!first) os << ",";
            first = false;
            os << "\"" << json_escape(name) << "\":[";
            for (size_t i = 0; i < vs.size(); ++i) {
                if (i) os << ",";
                reg_json(vs[i]);
            }
            os << "]";
        }
        os << "}";
    };
    os << ",\"qubits\":" << total_qubits << ",\"io_qubits\":" << io_qubits
       << ",\"scratch_qubits\":" << (total_qubits - io_qubits);
    os << ",\"inputs\":";
    var_map(inputs);
    os << ",\"outputs\":";
    var_map(outputs);
    os << ",\"classical\":{";
    bool first = true;
    for (auto& [name, vals] : c_env) {
        if (!first) os << ",";
        first = false;
        os << "\"" << json_escape(name) << "\":";
        if (vals.size() == 1) {
            os << "\"" << to_string(vals[0]) << "\"";
        } else {
            os << "[";
            for (size_t i = 0; i < vals.size(); ++i) {
                if (i) os << ",";
                os << "\"" << to_string(vals[i]) << "\"";
            }
            os << "]";
        }
    }
    os << "},\"ops\":[";
    for (size_t i = 0; i < ops.size(); ++i) {
        if (i) os << ",";
        os << "\"" << ops[i] << "\"";
    }
    os << "]}";
    return os.str();
}

}  // namespace oq::qimp
