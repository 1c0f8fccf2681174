#include "oq/testkit.hpp"

#include <chrono>
#include <cstdlib>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"

#include "oq/dense.hpp"
#include "oq/interp.hpp"
#include "oq/invert.hpp"
#include "oq/lower.hpp"
#include "oq/translate.hpp"

namespace oq {
namespace {

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

std::string render_values(const Registers& regs, const std::vector<uval>& vals) {
    std::ostringstream os;
    for (Var v = 0; v < regs.count(); ++v) {
        if (v) os << " ";
        os << regs.name_of(v) << "=" << to_string(vals[v]);
    }
    return os.str();
}

std::vector<uval> full_range_draw(const Registers& regs, std::mt19937_64& rng) {
    std::vector<uval> in(regs.count());
    for (Var v = 0; v < regs.count(); ++v) {
        in[v] = uval(rng()) % pow2(regs.size_of(v));
    }
    return in;
}

OqasmState encode_vector(const Registers& regs, const std::vector<uval>& in) {
    std::map<Var, uval> vals;
    for (Var v = 0; v < regs.count(); ++v) vals[v] = in[v];
    return encode_inputs(regs, vals);
}

}  // namespace

uint64_t master_seed(const TrialConfig& cfg) {
    if (cfg.seed != 0) return cfg.seed;
    if (const char* env = std::getenv("SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 0);
        if (end && *end == '\0' && v != 0) return v;
    }
    return 0x5eed2026ULL;
}

std::vector<uval> draw_oracle_inputs(const OracleSpec& spec, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uval> in(spec.regs.count(), 0);
    for (Var v = 0; v < spec.regs.count(); ++v) {
        if (spec.roles[v] != VarRole::Operand) continue;
        uval range = spec.bound[v] != 0 ? spec.bound[v] : pow2(spec.regs.size_of(v));
        in[v] = uval(rng()) % range;
    }
    return in;
}

std::vector<uval> run_oracle(const OracleSpec& spec, const std::vector<uval>& in) {
    OqasmState st = interpret(spec.regs, spec.prog, encode_vector(spec.regs, in));
    std::vector<uval> out(spec.regs.count());
    for (Var v = 0; v < spec.regs.count(); ++v) {
        out[v] = decode_nor(spec.regs, st, v);
    }
    return out;
}

namespace {

bool inputs_mismatch(const OracleSpec& spec, const std::vector<uval>& in,
                     std::vector<uval>* expected, std::vector<uval>* actual) {
    std::vector<uval> want = spec.classical(in);
    std::vector<uval> got = run_oracle(spec, in);
    if (expected) *expected = want;
    if (actual) *actual = got;
    return want != got;
}

// Shrinks a failing input vector: try zeroing whole registers, then clearing
// the highest set bit of each register, while the mismatch persists.
std::vector<uval> shrink_inputs(const OracleSpec& spec, std::vector<uval> in) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (Var v = 0; v < spec.regs.count() && !progress; ++v) {
            if (in[v] == 0) continue;
            auto cand = in;
            cand[v] = 0;
            if (inputs_mismatch(spec, cand, nullptr, nullptr)) {
                in = cand;
                progress = true;
            }
        }
        for (Var v = 0; v < spec.regs.count() && !progress; ++v) {
            if (in[v] == 0) continue;
            uint32_t top = 0;
            for (uint32_t b = 0; b < 128; ++b) {
                if ((in[v] >> b) & 1) top = b;
            }
            auto cand = in;
            cand[v] = in[v] & ~(uval(1) << top);
            if (inputs_mismatch(spec, cand, nullptr, nullptr)) {
                in = cand;
                progress = true;
            }
        }
    }
    return in;
}

}  // namespace

PropertyResult run_pbt(const OracleSpec& spec, const TrialConfig& cfg) {
    Stopwatch sw;
    PropertyResult r;
    r.property = "classical-agreement";
    r.subject = spec.name;
    r.trials = cfg.trials;
    const uint64_t master = master_seed(cfg);
    for (uint32_t t = 0; t < cfg.trials; ++t) {
        auto in = draw_oracle_inputs(spec, derive_seed(master, t));
        std::vector<uval> want, got;
        if (!inputs_mismatch(spec, in, &want, &got)) continue;
        ++r.failures;
        if (!r.witness) {
            if (cfg.shrink) {
                in = shrink_inputs(spec, in);
                inputs_mismatch(spec, in, &want, &got);
            }
            Witness w;
            w.inputs = in;
            w.expected = want;
            w.actual = got;
            w.detail = "inputs: " + render_values(spec.regs, in) +
                       " | expected: " + render_values(spec.regs, want) +
                       " | actual: " + render_values(spec.regs, got);
            r.witness = std::move(w);
        }
    }
    r.seconds = sw.seconds();
    return r;
}

uval max_error(const OracleSpec& approx, const OracleSpec& exact, Var target,
               const TrialConfig& cfg) {
    if (approx.regs.count() != exact.regs.count() ||
        target >= approx.regs.count()) {
        throw std::invalid_argument("max_error: register shapes must match");
    }
    const uint32_t n = approx.regs.size_of(target);
    const uval mod = pow2(n);
    const uint64_t master = master_seed(cfg);
    uval worst = 0;
    for (uint32_t t = 0; t < cfg.trials; ++t) {
        auto in = draw_oracle_inputs(approx, derive_seed(master, t));
        uval a = run_oracle(approx, in)[target];
        uval b = run_oracle(exact, in)[target];
        uval d = (a - b) & mask_bits(n);
        uval circ = std::min(d, mod - d);
        worst = std::max(worst, circ);
    }
    return worst;
}

PropertyResult check_translation(const Registers& regs, const InstrPtr& prog,
                                 const std::string& subject, const TrialConfig& cfg) {
    Stopwatch sw;
    PropertyResult r;
    r.property = "translation-equivalence";
    r.subject = subject;
    const uint32_t nq = regs.total_qubits();
    if (nq > dense_qubit_cap) {
        r.skipped = true;
        r.note = "register file uses " + std::to_string(nq) +
                 " qubits, above the dense simulation cap of " +
                 std::to_string(dense_qubit_cap);
        r.seconds = sw.seconds();
        return r;
    }
    r.trials = cfg.trials;
    TranslateResult res = translate(regs, prog);
    Circuit base = lower(res.circ, GateLevel::Base);
    const uint64_t master = master_seed(cfg);
    for (uint32_t t = 0; t < cfg.trials; ++t) {
        std::mt19937_64 rng(derive_seed(master, t));
        auto in = full_range_draw(regs, rng);
        OqasmState st0 = encode_vector(regs, in);
        cvec phi0 = embed_state(regs, st0, identity_map(regs), nq);
        OqasmState st1 = interpret(regs, prog, st0);
        cvec want = embed_state(regs, st1, res.map, nq);
        double dist_macro = vec_distance(dense_sim(res.circ, phi0), want);
        double dist_base = vec_distance(dense_sim(base, phi0), want);
        if (dist_macro < 1e-9 && dist_base < 1e-9) continue;
        ++r.failures;
        if (!r.witness) {
            Witness w;
            w.inputs = in;
            w.detail = "inputs: " + render_values(regs, in) +
                       " | macro distance " + std::to_string(dist_macro) +
                       ", base distance " + std::to_string(dist_base);
            r.witness = std::move(w);
        }
    }
    r.seconds = sw.seconds();
    return r;
}

PropertyResult check_translation(const OracleSpec& spec, const TrialConfig& cfg) {
    return check_translation(spec.regs, spec.prog, spec.name, cfg);
}

PropertyResult check_linearity(const Registers& regs, const InstrPtr& prog,
                               const std::string& subject, const TrialConfig& cfg) {
    Stopwatch sw;
    PropertyResult r;
    r.property = "linearity";
    r.subject = subject;
    const uint32_t nq = regs.total_qubits();
    if (nq > dense_qubit_cap) {
        r.skipped = true;
        r.note = "register file uses " + std::to_string(nq) +
                 " qubits, above the dense simulation cap of " +
                 std::to_string(dense_qubit_cap);
        r.seconds = sw.seconds();
        return r;
    }
    r.trials = cfg.trials;
    TranslateResult res = translate(regs, prog);
    const uint64_t master = master_seed(cfg);
    const size_t terms = 4;
    for (uint32_t t = 0; t < cfg.trials; ++t) {
        std::mt19937_64 rng(derive_seed(master, t));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        cvec input(size_t(1) << nq, amp(0, 0));
        cvec want(size_t(1) << nq, amp(0, 0));
        double norm = 0;
        for (size_t j = 0; j < terms; ++j) {
            amp coef(unit(rng), unit(rng));
            norm += std::norm(coef);
            auto in = full_range_draw(regs, rng);
            OqasmState st0 = encode_vector(regs, in);
            cvec phi = embed_state(regs, st0, identity_map(regs), nq);
            OqasmState st1 = interpret(regs, prog, st0);
            cvec psi = embed_state(regs, st1, res.map, nq);
            for (size_t i = 0; i < input.size(); ++i) {
                input[i] += coef * phi[i];
                want[i] += coef * psi[i];
            }
        }
        double scale = 1.0 / std::sqrt(norm);
        for (size_t i = 0; i < input.size(); ++i) {
            input[i] *= scale;
            want[i] *= scale;
        }
        cvec got = dense_sim(res.circ, input);
        double dist = vec_distance(got, want);
        if (dist < 1e-9) continue;
        ++r.failures;
        if (!r.witness) {
            Witness w;
            w.detail = "superposition trial " + std::to_string(t) +
                       ": distance " + std::to_string(dist);
            r.witness = std::move(w);
        }
    }
    r.seconds = sw.seconds();
    return r;
}

PropertyResult check_reversibility(const Registers& regs, const InstrPtr& prog,
                                   const std::string& subject, const TrialConfig& cfg) {
    Stopwatch sw;
    PropertyResult r;
    r.property = "reversibility";
    r.subject = subject;
    r.trials = cfg.trials;
    InstrPtr undo = invert(prog);
    const uint64_t master = master_seed(cfg);
    for (uint32_t t = 0; t < cfg.trials; ++t) {
        std::mt19937_64 rng(derive_seed(master, t));
        auto in = full_range_draw(regs, rng);
        OqasmState st0 = encode_vector(regs, in);
        OqasmState st1 = interpret(regs, prog, st0);
        OqasmState st2 = interpret(regs, undo, st1);
        if (st2 == st0) continue;
        ++r.failures;
        if (!r.witness) {
            Witness w;
            w.inputs = in;
            w.detail = "inputs: " + render_values(regs, in) +
                       " | state not restored by the inverted program";
            r.witness = std::move(w);
        }
    }
    r.seconds = sw.seconds();
    return r;
}

// ---- random well-typed programs ----

GeneratedProgram generate_well_typed(uint64_t seed, const GenConfig& cfg) {
    std::mt19937_64 rng(seed);
    GeneratedProgram g;
    const uint32_t nregs = 1 + uint32_t(rng() % cfg.max_registers);
    for (uint32_t i = 0; i < nregs; ++i) {
        g.regs.add("r" + std::to_string(i),
                   1 + uint32_t(rng() % cfg.max_register_size));
    }
    TypeEnv env = all_nor(g.regs);
    std::vector<InstrPtr> out;
    const uint32_t len = 1 + uint32_t(rng() % cfg.max_length);
    auto rand_offset = [&](Var v) {
        return uint32_t(rng() % g.regs.size_of(v));
    };
    for (uint32_t step = 0; step < len; ++step) {
        Var v = Var(rng() % nregs);
        const uint32_t sz = g.regs.size_of(v);
        if (env[v].kind == BasisKind::Nor) {
            switch (rng() % (cfg.allow_shifts ? 6u : 4u)) {
                case 0:
                    out.push_back(make_x(Position{v, rand_offset(v)}));
                    break;
                case 1: {
                    uint32_t k = 1 + uint32_t(rng() % sz);
                    out.push_back(make_qft(k, v));
                    env[v] = Basis{BasisKind::Phi, k};
                    break;
                }
                case 2:
                case 3: {
                    // controlled block: body acts on a different register and
                    // must be neutral and basis-preserving
                    if (nregs == 1) {
                        out.push_back(make_x(Position{v, rand_offset(v)}));
                        break;
                    }
                    Var w = Var(rng() % nregs);
                    while (w == v) w = Var(rng() % nregs);
                    std::vector<InstrPtr> body;
                    const uint32_t blen = 1 + uint32_t(rng() % 3);
                    for (uint32_t b = 0; b < blen; ++b) {
                        if (env[w].kind == BasisKind::Nor) {
                            body.push_back(make_x(Position{w, rand_offset(w)}));
                        } else {
                            uint32_t m = uint32_t(rng() % env[w].precision);
                            body.push_back(rng() % 2 ? make_sr(m, w)
                                                     : make_sri(m, w));
                        }
                    }
                    out.push_back(make_cu(Position{v, rand_offset(v)},
                                          make_seq(body)));
                    break;
                }
                case 4:
                    out.push_back(make_rev(v));
                    break;
                case 5:
                    out.push_back(rng() % 2 ? make_lshift(v) : make_rshift(v));
                    break;
            }
        } else {
            const uint32_t prec = env[v].precision;
            switch (rng() % 3) {
                case 0:
                    out.push_back(make_sr(uint32_t(rng() % prec), v));
                    break;
                case 1:
                    out.push_back(make_sri(uint32_t(rng() % prec), v));
                    break;
                case 2:
                    out.push_back(make_qfti(prec, v));
                    env[v] = Basis{BasisKind::Nor, 0};
                    break;
            }
        }
    }
    g.prog = make_seq(out);
    return g;
}

GeneratedProgram shrink_program(
    const GeneratedProgram& g,
    const std::function<bool(const GeneratedProgram&)>& fails) {
    GeneratedProgram best = g;
    bool progress = true;
    while (progress) {
        progress = false;
        std::vector<InstrPtr> instrs = flatten(best.prog);
        if (instrs.size() <= 1) break;
        for (size_t i = 0; i < instrs.size(); ++i) {
            std::vector<InstrPtr> cand;
            for (size_t j = 0; j < instrs.size(); ++j) {
                if (j != i) cand.push_back(instrs[j]);
            }
            GeneratedProgram next;
            next.regs = best.regs;
            next.prog = make_seq(cand);
            if (!typecheck_ok(typecheck(next.regs, all_nor(next.regs), next.prog))) {
                continue;
            }
            if (fails(next)) {
                best = next;
                progress = true;
                break;
            }
        }
    }
    return best;
}

// ---- reports ----

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string to_junit_xml(const std::vector<PropertyResult>& results,
                         const std::string& suite_name) {
    uint32_t failures = 0, skipped = 0;
    double total = 0;
    for (const auto& r : results) {
        if (r.skipped) ++skipped;
        else if (!r.ok()) ++failures;
        total += r.seconds;
    }
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<testsuite name=\"" << xml_escape(suite_name) << "\" tests=\""
       << results.size() << "\" failures=\"" << failures << "\" skipped=\""
       << skipped << "\" time=\"" << total << "\">\n";
    for (const auto& r : results) {
        os << "  <testcase name=\""
           << xml_escape(r.property + ": " + r.subject) << "\" time=\""
           << r.seconds << "\"";
        if (r.skipped) {
            os << ">\n    <skipped message=\"" << xml_escape(r.note)
               << "\"/>\n  </testcase>\n";
        } else if (!r.ok()) {
            std::string msg = std::to_string(r.failures) + " of " +
                              std::to_string(r.trials) + " trials failed";
            os << ">\n    <failure message=\"" << xml_escape(msg) << "\">"
               << xml_escape(r.witness ? r.witness->detail : "")
               << "</failure>\n  </testcase>\n";
        } else {
            os << "/>\n";
        }
    }
    os << "</testsuite>\n";
    return os.str();
}

std::string to_json_report(const std::vector<PropertyResult>& results) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json j;
        j["property"] = r.property;
        j["subject"] = r.subject;
        j["trials"] = r.trials;
        j["failures"] = r.failures;
        j["skipped"] = r.skipped;
        j["seconds"] = r.seconds;
        j["ok"] = r.ok();
        if (!r.note.empty()) j["note"] = r.note;
        if (r.witness) {
            nlohmann::json w;
            std::vector<std::string> ins;
            for (uval v : r.witness->inputs) ins.push_back(to_string(v));
            w["inputs"] = ins;
            std::vector<std::string> exp, act;
            for (uval v : r.witness->expected) exp.push_back(to_string(v));
            for (uval v : r.witness->actual) act.push_back(to_string(v));
            if (!exp.empty()) w["expected"] = exp;
            if (!act.empty()) w["actual"] = act;
            w["detail"] = r.witness->detail;
            j["witness"] = w;
        }
        arr.push_back(j);
    }
    nlohmann::json root;
    root["results"] = arr;
    return root.dump(2) + "\n";
}

}  // namespace oq
