// oqc: command-line driver for the oracle toolchain.
//
//   oqc compile <file.qimp>   parse, typecheck, generate a circuit, and write
//                             OpenQASM 2.0 plus a JSON manifest of the layout
//   oqc gen <operator>        build a library oracle and write its QASM plus
//                             a JSON resource report
//   oqc test <target>         property-based differential tests of an oracle
//                             against its exact classical model
//   oqc run <file>            interpret a .qimp program or .oqasm module on
//                             concrete inputs and print decoded outputs
//   oqc count <target>        resource counts only; writes no files
//
// Exit codes: 0 success, 1 user or program error, 2 internal fault.
// All stdout output is JSON and deterministic: identical inputs and seed
// produce byte-identical bytes (reports carry no timestamps or timings).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oq/circuit.hpp"
#include "oq/interp.hpp"
#include "oq/lower.hpp"
#include "oq/oracles.hpp"
#include "oq/qasm.hpp"
#include "oq/qimp_check.hpp"
#include "oq/qimp_compile.hpp"
#include "oq/qimp_interp.hpp"
#include "oq/qimp_parse.hpp"
#include "oq/state.hpp"
#include "oq/testkit.hpp"
#include "oq/text.hpp"
#include "oq/translate.hpp"
#include "oq/typing.hpp"

namespace {

using json = nlohmann::ordered_json;
using oq::uval;

// A user-facing error that already carries its full diagnostic text.
struct cli_error : std::runtime_error {
    explicit cli_error(const std::string& msg) : std::runtime_error(msg) {}
};

uval parse_uval(const std::string& s) {
    std::size_t i = 0;
    uval base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        i = 2;
        base = 16;
    }
    if (i >= s.size()) throw cli_error("bad number '" + s + "'");
    uval v = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        int d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (base == 16 && c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else if (base == 16 && c >= 'A' && c <= 'F')
            d = c - 'A' + 10;
        else
            throw cli_error("bad digit in number '" + s + "'");
        uval next = v * base + static_cast<uval>(d);
        if (next < v) throw cli_error("number '" + s + "' does not fit in 128 bits");
        v = next;
    }
    return v;
}

// -D name=value pairs into a classical-override map.
std::map<std::string, uval> parse_defines(const std::vector<std::string>& defs) {
    std::map<std::string, uval> out;
    for (const std::string& d : defs) {
        auto eq = d.find('=');
        if (eq == std::string::npos || eq == 0)
            throw cli_error("-D expects name=value, got '" + d + "'");
        out[d.substr(0, eq)] = parse_uval(d.substr(eq + 1));
    }
    return out;
}

// --inputs lists: comma-separated k=v pairs where k is a variable name or
// name[index], and v is a number or a colon-separated element list.
// Result: variable -> element index -> value.
using InputMap = std::map<std::string, std::map<uint32_t, uval>>;

InputMap parse_inputs(const std::vector<std::string>& specs) {
    InputMap out;
    for (const std::string& chunk : specs) {
        std::stringstream ss(chunk);
        std::string pair;
        while (std::getline(ss, pair, ',')) {
            if (pair.empty()) continue;
            auto eq = pair.find('=');
            if (eq == std::string::npos || eq == 0)
                throw cli_error("--inputs expects name=value, got '" + pair + "'");
            std::string key = pair.substr(0, eq);
            std::string val = pair.substr(eq + 1);
            uint32_t idx = 0;
            auto br = key.find('[');
            if (br != std::string::npos) {
                if (key.back() != ']' || br == 0)
                    throw cli_error("bad input name '" + key + "'");
                idx = static_cast<uint32_t>(
                    parse_uval(key.substr(br + 1, key.size() - br - 2)));
                key = key.substr(0, br);
            }
            if (val.find(':') != std::string::npos) {
                std::stringstream vs(val);
                std::string elem;
                uint32_t k = idx;
                while (std::getline(vs, elem, ':')) out[key][k++] = parse_uval(elem);
            } else {
                out[key][idx] = parse_uval(val);
            }
        }
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw cli_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw cli_error("cannot write '" + path + "'");
    f << text;
    if (!f) throw cli_error("write to '" + path + "' failed");
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// ---- resource counting ----

struct GateTally {
    uint64_t gates = 0;  // data gates; ID markers from virtual shifts excluded
    std::map<std::string, uint64_t> hist;
};

GateTally tally(const oq::Circuit& c) {
    GateTally t;
    for (const oq::Gate& g : c.gates) {
        if (g.kind == oq::GateKind::ID) continue;
        ++t.gates;
        ++t.hist[oq::gate_name(g.kind)];
    }
    return t;
}

json hist_json(const GateTally& t) {
    json h = json::object();
    for (const auto& [k, v] : t.hist) h[k] = v;
    return h;
}

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---- front-end plumbing shared by compile/count/run ----

oq::qimp::CheckedProgram load_qimp(const std::string& path) {
    return oq::qimp::typecheck_program(oq::qimp::parse_file(path));
}

struct CompileOpts {
    std::string file;
    uint32_t sz = 16;
    std::string flag = "qft";
    std::string level = "macro";
    std::vector<std::string> defines;
    std::string out_qasm;      // compile only
    std::string out_manifest;  // compile only
};

oq::qimp::Flag to_flag(const std::string& s) {
    return s == "classical" ? oq::qimp::Flag::Classical : oq::qimp::Flag::QFT;
}

struct CompiledCircuit {
    oq::qimp::CompileResult res;
    oq::Circuit circ;
    json wires;  // register name -> final wire of each bit, inputs + outputs
};

CompiledCircuit build_circuit(const CompileOpts& o) {
    auto checked = load_qimp(o.file);
    auto res = oq::qimp::compile(checked, o.sz, to_flag(o.flag), parse_defines(o.defines));
    if (res.error) throw cli_error(o.file + ": error: " + *res.error);

    CompiledCircuit cc;
    cc.wires = json::object();
    if (res.prog && res.regs.count() > 0) {
        auto tr = oq::translate(res.regs, res.prog);
        cc.circ = std::move(tr.circ);
        auto add_wires = [&](const std::map<std::string, std::vector<oq::Var>>& m) {
            for (const auto& [name, vars] : m) {
                for (oq::Var v : vars) {
                    const std::string& rn = res.regs.name_of(v);
                    if (cc.wires.contains(rn)) continue;
                    json ws = json::array();
                    for (uint32_t k = 0; k < res.regs.size_of(v); ++k)
                        ws.push_back(tr.map.at({v, k}));
                    cc.wires[rn] = std::move(ws);
                }
            }
        };
        add_wires(res.inputs);
        add_wires(res.outputs);
    } else {
        cc.circ = oq::Circuit{res.regs.total_qubits(), oq::GateLevel::Macro, {}};
    }
    if (o.level == "base") cc.circ = oq::lower(cc.circ, oq::GateLevel::Base);
    cc.res = std::move(res);
    return cc;
}

int cmd_compile(const CompileOpts& o) {
    CompiledCircuit cc = build_circuit(o);
    GateTally t = tally(cc.circ);

    spill(o.out_qasm, oq::emit_qasm(cc.circ));

    // The library manifest describes the declaration-order layout; the final
    // wire map (after virtual shifts) is spliced in for QASM consumers.
    std::string m = cc.res.manifest();
    auto brace = m.rfind('}');
    if (brace != std::string::npos)
        m.insert(brace, ",\"wires\":" + cc.wires.dump());
    spill(o.out_manifest, m + "\n");

    json out;
    out["qasm"] = o.out_qasm;
    out["manifest"] = o.out_manifest;
    out["qubits"] = cc.circ.num_qubits;
    out["gates"] = t.gates;
    emit_json(out);
    return 0;
}

int cmd_count_qimp(const CompileOpts& o) {
    CompiledCircuit cc = build_circuit(o);
    GateTally t = tally(cc.circ);
    json out;
    out["file"] = o.file;
    out["bit_width"] = cc.res.sz;
    out["flavor"] = oq::qimp::flag_name(cc.res.flag);
    out["level"] = o.level;
    out["qubits"] = cc.res.total_qubits;
    out["io_qubits"] = cc.res.io_qubits;
    out["scratch_qubits"] = cc.res.total_qubits - cc.res.io_qubits;
    out["gates"] = t.gates;
    out["histogram"] = hist_json(t);
    out["ops"] = cc.res.ops;
    emit_json(out);
    return 0;
}

// ---- oracle registry plumbing shared by gen/test/count ----

struct OracleOpts {
    std::string name;
    uint32_t bits = 8;
    std::optional<std::string> constant;  // parsed on use; may exceed 64 bits
    std::optional<std::string> modulus;
    std::optional<uint32_t> drop;
    std::optional<std::string> flavor;
    std::optional<std::string> form;
    std::string level = "macro";
    std::string out_qasm = "out.qasm";
};

// Registry names carry flavor/form suffixes (multiplier_qft, comparator_lt);
// accept both the suffixed name and base name + --flavor/--form.
std::string resolve_oracle(const OracleOpts& o) {
    const auto& reg = oq::oracle_registry();
    if (reg.count(o.name)) return o.name;
    if (o.flavor && reg.count(o.name + "_" + *o.flavor)) return o.name + "_" + *o.flavor;
    if (o.form && reg.count(o.name + "_" + *o.form)) return o.name + "_" + *o.form;
    std::string known;
    for (const std::string& n : oq::oracle_names())
        known += (known.empty() ? "" : ", ") + n;
    throw cli_error("unknown operator '" + o.name + "'; known: " + known);
}

oq::OracleSpec build_oracle(const OracleOpts& o, std::string* resolved = nullptr) {
    std::string name = resolve_oracle(o);
    if (resolved) *resolved = name;
    oq::OracleParams p = oq::default_params(name, o.bits);
    if (o.constant) p.constant = parse_uval(*o.constant);
    if (o.modulus) p.modulus = parse_uval(*o.modulus);
    if (o.drop) p.drop = *o.drop;
    return oq::make_oracle(name, p);
}

int cmd_gen(const OracleOpts& o, bool write_files) {
    oq::OracleSpec spec = build_oracle(o);
    auto tr = oq::translate(spec.regs, spec.prog);
    oq::Circuit circ = std::move(tr.circ);
    if (o.level == "base") circ = oq::lower(circ, oq::GateLevel::Base);
    GateTally t = tally(circ);

    json out;
    out["operator"] = spec.name;
    if (write_files) {
        spill(o.out_qasm, oq::emit_qasm(circ));
        out["qasm"] = o.out_qasm;
    }
    out["qubits"] = spec.regs.total_qubits();
    out["gates"] = t.gates;
    out["histogram"] = hist_json(t);
    emit_json(out);
    return 0;
}

// ---- test ----

json witness_json(const oq::Witness& w) {
    json j;
    json in = json::array(), ex = json::array(), ac = json::array();
    for (uval v : w.inputs) in.push_back(oq::to_string(v));
    for (uval v : w.expected) ex.push_back(oq::to_string(v));
    for (uval v : w.actual) ac.push_back(oq::to_string(v));
    j["inputs"] = std::move(in);
    j["expected"] = std::move(ex);
    j["actual"] = std::move(ac);
    j["detail"] = w.detail;
    return j;
}

// Deterministic rendering: timings are deliberately omitted so identical
// inputs and seed give byte-identical reports.
json result_json(const oq::PropertyResult& r) {
    json j;
    j["property"] = r.property;
    j["subject"] = r.subject;
    j["trials"] = r.trials;
    j["failures"] = r.failures;
    if (r.skipped) j["skipped"] = true;
    if (!r.note.empty()) j["note"] = r.note;
    if (r.witness) j["witness"] = witness_json(*r.witness);
    return j;
}

int cmd_test(const OracleOpts& o, uint32_t trials, uint64_t seed) {
    oq::TrialConfig cfg;
    cfg.seed = seed;
    cfg.trials = trials;

    // The approximate adder is judged by its error law rather than equality:
    // dropping the b lowest cascades bounds the circular error by 2^b - 1.
    if (o.name == "aqft_adder") {
        std::string resolved;
        oq::OracleSpec approx = build_oracle(o, &resolved);
        oq::OracleParams p = oq::default_params(resolved, o.bits);
        if (o.drop) p.drop = *o.drop;
        oq::OracleSpec exact = oq::make_oracle("rz_adder", p);
        oq::Var sum_reg = *approx.regs.find("b");
        uval err = oq::max_error(approx, exact, sum_reg, cfg);
        uval bound = oq::pow2(p.drop) - 1;
        json out;
        out["subject"] = approx.name;
        out["seed"] = oq::master_seed(cfg);
        out["trials"] = trials;
        out["max_error"] = oq::to_string(err);
        out["error_bound"] = oq::to_string(bound);
        out["ok"] = err <= bound;
        emit_json(out);
        return err <= bound ? 0 : 1;
    }

    oq::OracleSpec spec = build_oracle(o);
    std::vector<oq::PropertyResult> results;
    results.push_back(oq::run_pbt(spec, cfg));

    bool ok = true;
    json rs = json::array();
    for (const auto& r : results) {
        ok = ok && r.ok();
        rs.push_back(result_json(r));
    }
    json out;
    out["subject"] = spec.name;
    out["seed"] = oq::master_seed(cfg);
    out["results"] = std::move(rs);
    out["ok"] = ok;
    emit_json(out);
    return ok ? 0 : 1;
}

// ---- run ----

json values_json(const std::map<std::string, std::vector<uval>>& m,
                 const std::map<std::string, oq::qimp::Type>& types) {
    json out = json::object();
    for (const auto& [name, vals] : m) {
        auto it = types.find(name);
        bool scalar = it != types.end() && it->second.array_len == 0;
        if (scalar && vals.size() == 1) {
            out[name] = oq::to_string(vals[0]);
        } else {
            json a = json::array();
            for (uval v : vals) a.push_back(oq::to_string(v));
            out[name] = std::move(a);
        }
    }
    return out;
}

int cmd_run_qimp(const std::string& file, uint32_t sz,
                 const std::vector<std::string>& defines,
                 const std::vector<std::string>& input_specs) {
    auto checked = load_qimp(file);
    InputMap given = parse_inputs(input_specs);

    std::map<std::string, std::vector<uval>> q_inputs;
    for (const auto& [name, elems] : given) {
        auto it = checked.global_types.find(name);
        if (it == checked.global_types.end() || it->second.mode != oq::qimp::Mode::Q)
            throw cli_error(file + ": error: '" + name + "' is not a quantum global");
        uint32_t n = it->second.array_len ? it->second.array_len : 1;
        std::vector<uval> vals(n, 0);
        for (const auto& [idx, v] : elems) {
            if (idx >= n)
                throw cli_error(file + ": error: index " + std::to_string(idx) +
                                " out of range for '" + name + "'");
            vals[idx] = v;
        }
        q_inputs[name] = std::move(vals);
    }

    auto res = oq::qimp::interpret(checked, sz, q_inputs, parse_defines(defines));
    if (res.error) {
        std::cerr << file << ": error: " << *res.error << "\n";
        return 1;
    }
    json out;
    out["q"] = values_json(res.q, checked.global_types);
    out["c"] = values_json(res.c, checked.global_types);
    emit_json(out);
    return 0;
}

int cmd_run_oqasm(const std::string& file, const std::vector<std::string>& input_specs) {
    oq::Module mod = oq::parse_module(slurp(file));
    auto tc = oq::typecheck(mod.regs, oq::all_nor(mod.regs), mod.prog);
    if (!oq::typecheck_ok(tc)) {
        const auto& err = std::get<oq::TypeError>(tc);
        throw cli_error(file + ": error [" + err.rule + "]: " + err.message);
    }

    std::map<oq::Var, uval> vals;
    for (const auto& [name, elems] : parse_inputs(input_specs)) {
        auto v = mod.regs.find(name);
        if (!v) throw cli_error(file + ": error: no register named '" + name + "'");
        for (const auto& [idx, value] : elems) {
            if (idx != 0)
                throw cli_error(file + ": error: registers are scalar; use '" + name +
                                "=value'");
            vals[*v] = value;
        }
    }

    auto st = oq::interpret(mod.regs, mod.prog, oq::encode_inputs(mod.regs, vals));
    json out = json::object();
    for (oq::Var v = 0; v < mod.regs.count(); ++v)
        out[mod.regs.name_of(v)] = oq::to_string(oq::decode_nor(mod.regs, st, v));
    emit_json(out);
    return 0;
}

std::string strip_line_prefix(const std::string& what, int line) {
    std::string pre = "line " + std::to_string(line) + ": ";
    if (line > 0 && what.rfind(pre, 0) == 0) return what.substr(pre.size());
    return what;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oqc: quantum oracle compiler, generator, and test driver"};
    app.require_subcommand(1);

    CompileOpts co;
    CLI::App* compile = app.add_subcommand(
        "compile", "Compile a .qimp program to OpenQASM 2.0 plus a JSON manifest");
    compile->add_option("file", co.file, "input .qimp program")->required();
    compile->add_option("--size", co.sz, "word width in bits (2..63)")
        ->default_val(16);
    compile->add_option("--flag", co.flag, "arithmetic style")
        ->check(CLI::IsMember({"classical", "qft"}))
        ->default_val("qft");
    compile->add_option("--level", co.level, "gate set of the output circuit")
        ->check(CLI::IsMember({"macro", "base"}))
        ->default_val("macro");
    compile->add_option("-D,--define", co.defines,
                        "override a classical global, name=value");
    compile->add_option("-o,--out", co.out_qasm, "QASM output path")
        ->default_val("out.qasm");
    compile->add_option("--manifest", co.out_manifest, "manifest output path")
        ->default_val("manifest.json");

    OracleOpts go;
    uint32_t opt_drop = 0;
    std::string opt_c, opt_n, opt_flavor, opt_form;
    CLI::App* gen = app.add_subcommand(
        "gen", "Build a library oracle; write QASM and print a resource report");
    gen->add_option("operator", go.name, "registry operator name")->required();
    gen->add_option("--bits", go.bits, "operand width in bits")->default_val(8);
    gen->add_option("--c", opt_c, "constant operand where applicable");
    gen->add_option("--n", opt_n, "modulus / divisor where applicable");
    gen->add_option("--drop", opt_drop, "dropped low cascades (aqft)");
    gen->add_option("--flavor", opt_flavor, "operator flavor suffix, e.g. qft, toff");
    gen->add_option("--form", opt_form, "comparator form, e.g. lt, ge, eq");
    gen->add_option("--level", go.level, "gate set of the output circuit")
        ->check(CLI::IsMember({"macro", "base"}))
        ->default_val("macro");
    gen->add_option("-o,--out", go.out_qasm, "QASM output path")
        ->default_val("out.qasm");

    uint32_t t_trials = 1000;
    uint64_t t_seed = 0;
    CLI::App* test = app.add_subcommand(
        "test", "Differential property tests of an oracle vs its classical model");
    test->add_option("target", go.name, "registry operator name")->required();
    test->add_option("--bits", go.bits, "operand width in bits");
    test->add_option("--trials", t_trials, "number of random trials")
        ->default_val(1000);
    test->add_option("--seed", t_seed, "master seed (0: SEED env or default)");
    test->add_option("--c", opt_c, "constant operand where applicable");
    test->add_option("--n", opt_n, "modulus / divisor where applicable");
    test->add_option("--drop", opt_drop, "dropped low cascades (aqft)");
    test->add_option("--flavor", opt_flavor, "operator flavor suffix");
    test->add_option("--form", opt_form, "comparator form");

    std::string run_file;
    std::vector<std::string> run_inputs;
    CompileOpts ro;
    CLI::App* run = app.add_subcommand(
        "run", "Interpret a .qimp program or .oqasm module on concrete inputs");
    run->add_option("file", run_file, "input .qimp or .oqasm file")->required();
    run->add_option("--inputs", run_inputs,
                    "comma-separated name=value pairs; arrays as v[0]=1 or v=1:2:3");
    run->add_option("--size", ro.sz, "word width in bits (.qimp only)")
        ->default_val(16);
    run->add_option("-D,--define", ro.defines,
                    "override a classical global, name=value (.qimp only)");

    std::string count_target;
    CompileOpts no;
    CLI::App* count = app.add_subcommand(
        "count", "Resource counts for a .qimp file or a registry operator");
    count->add_option("target", count_target, ".qimp file or operator name")
        ->required();
    count->add_option("--size", no.sz, "word width in bits (.qimp)")->default_val(16);
    count->add_option("--flag", no.flag, "arithmetic style (.qimp)")
        ->check(CLI::IsMember({"classical", "qft"}))
        ->default_val("qft");
    count->add_option("--level", no.level, "gate set to count")
        ->check(CLI::IsMember({"macro", "base"}))
        ->default_val("macro");
    count->add_option("-D,--define", no.defines,
                      "override a classical global, name=value (.qimp)");
    count->add_option("--bits", go.bits, "operand width in bits (operator)");
    count->add_option("--c", opt_c, "constant operand (operator)");
    count->add_option("--n", opt_n, "modulus / divisor (operator)");
    count->add_option("--drop", opt_drop, "dropped low cascades (operator)");
    count->add_option("--flavor", opt_flavor, "operator flavor suffix");
    count->add_option("--form", opt_form, "comparator form");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    auto fill_oracle_opts = [&](CLI::App* cmd) {
        if (cmd->count("--c")) go.constant = opt_c;
        if (cmd->count("--n")) go.modulus = opt_n;
        if (cmd->count("--drop")) go.drop = opt_drop;
        if (cmd->count("--flavor")) go.flavor = opt_flavor;
        if (cmd->count("--form")) go.form = opt_form;
    };

    std::string file_ctx;  // for qimp_error diagnostics
    try {
        if (app.got_subcommand(compile)) {
            file_ctx = co.file;
            return cmd_compile(co);
        }
        if (app.got_subcommand(gen)) {
            fill_oracle_opts(gen);
            return cmd_gen(go, true);
        }
        if (app.got_subcommand(test)) {
            fill_oracle_opts(test);
            return cmd_test(go, t_trials, t_seed);
        }
        if (app.got_subcommand(run)) {
            file_ctx = run_file;
            if (ends_with(run_file, ".oqasm"))
                return cmd_run_oqasm(run_file, run_inputs);
            return cmd_run_qimp(run_file, ro.sz, ro.defines, run_inputs);
        }
        if (app.got_subcommand(count)) {
            if (ends_with(count_target, ".qimp")) {
                no.file = count_target;
                file_ctx = count_target;
                return cmd_count_qimp(no);
            }
            go.name = count_target;
            fill_oracle_opts(count);
            return cmd_gen(go, false);
        }
        return 2;  // unreachable: a subcommand is required
    } catch (const oq::qimp::qimp_error& e) {
        if (e.line > 0)
            std::cerr << file_ctx << ":" << e.line
                      << ": error: " << strip_line_prefix(e.what(), e.line) << " ["
                      << e.rule << "]\n";
        else
            std::cerr << file_ctx << ": error: " << e.what() << " [" << e.rule
                      << "]\n";
        return 1;
    } catch (const oq::parse_error& e) {
        std::cerr << file_ctx << ": error: " << e.what() << "\n";
        return 1;
    } catch (const cli_error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal fault: " << e.what() << "\n";
        return 2;
    }
}
