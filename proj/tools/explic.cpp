// explic: model checking explainability and privacy requirements.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "explic/benchmarks.hpp"
#include "explic/checker.hpp"
#include "explic/generators.hpp"
#include "explic/oracle.hpp"
#include "expected_verdicts.hpp"

using namespace explic;
using json = nlohmann::json;

namespace {

enum class Level { Error = 0, Info = 1, Debug = 2 };

Level log_level() {
    const char* e = std::getenv("EXPLIC_LOG");
    if (!e) return Level::Error;
    std::string s = e;
    if (s == "debug") return Level::Debug;
    if (s == "info") return Level::Info;
    return Level::Error;
}

void log(Level l, const std::string& msg) {
    static std::mutex mu;
    if (static_cast<int>(l) > static_cast<int>(log_level())) return;
    std::lock_guard<std::mutex> g(mu);
    const char* tag = l == Level::Error ? "error" : l == Level::Info ? "info" : "debug";
    std::cerr << "[" << tag << "] " << msg << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

struct Common {
    std::string model_path, gen_spec;
    std::string format = "text";
    double timeout = 300;
    std::size_t cap = 1000000;
    std::string dot_path;

    System load() const {
        if (!model_path.empty()) return parse_model(read_file(model_path));
        return generate_from_spec(gen_spec);
    }
    std::optional<FamilyDefaults> defaults() const {
        if (gen_spec.empty()) return std::nullopt;
        return family_defaults(split(gen_spec, ':')[0]);
    }
    CheckOptions options() const {
        CheckOptions o;
        o.timeout_seconds = timeout;
        o.state_cap = cap;
        o.want_dot = !dot_path.empty();
        return o;
    }
};

void add_common(CLI::App* app, Common& c) {
    auto* src = app->add_option_group("source");
    src->add_option("--model", c.model_path, "model file");
    src->add_option("--gen", c.gen_spec, "generator spec, e.g. auction:3:blind, rps:well, pennies:4:plain");
    src->require_option(1);
    app->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    app->add_option("--timeout", c.timeout, "seconds per check")->check(CLI::PositiveNumber);
    app->add_option("--cap", c.cap, "automaton state cap")->check(CLI::PositiveNumber);
    app->add_option("--emit-automaton", c.dot_path, "write the automaton as DOT");
}

std::pair<std::size_t, std::size_t> parse_bounds(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != 2) throw ValidationError("--bounds expects P,L");
    try {
        return {std::stoul(parts[0]), std::stoul(parts[1])};
    } catch (const std::logic_error&) {
        throw ValidationError("--bounds expects two numbers P,L");
    }
}

json stats_json(const Verdict& v) {
    json st = json::object();
    for (auto& s : v.stats) {
        auto& e = st[s.phase];
        if (e.is_null()) e = {{"states", 0}, {"millis", 0.0}};
        e["states"] = std::max<std::size_t>(e["states"].get<std::size_t>(), s.states);
        e["millis"] = e["millis"].get<double>() + s.millis;
    }
    return st;
}

json verdict_json(const Verdict& v) {
    json j;
    j["model"] = v.model;
    j["formula"] = v.formula;
    j["holds"] = v.holds;
    j["alternation_depth"] = v.alternation_depth;
    if (v.has_counterexample) {
        json ce = json::object();
        for (auto& [k, t] : v.counterexample) ce[k] = to_string(t);
        j["counterexample"] = ce;
    } else {
        j["counterexample"] = nullptr;
    }
    j["stats"] = stats_json(v);
    return j;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
    std::string spec_path, formula_text, req;
    bool oracle = false;
    std::string bounds = "6,3";
};

int cmd_check(const Common& c, const CheckArgs& a) {
    System sys = c.load();
    FormulaPtr f;
    std::vector<ParseWarning> warns;
    if (!a.req.empty()) {
        auto d = c.defaults();
        f = named_requirement(sys, a.req, d ? &*d : nullptr);
    } else if (!a.spec_path.empty()) {
        f = parse_formula(read_file(a.spec_path), &warns);
    } else {
        f = parse_formula(a.formula_text, &warns);
    }
    for (auto& w : warns) log(Level::Info, w.message);
    log(Level::Info, "checking " + to_string(*f) + " on " + sys.name);
    Verdict v = check(sys, f, c.options());
    for (auto& w : v.warnings) log(Level::Info, w);
    for (auto& s : v.stats)
        log(Level::Debug, s.phase + ": " + std::to_string(s.states) + " states, " + std::to_string(s.millis) + " ms");
    if (!c.dot_path.empty()) write_file(c.dot_path, v.product_dot);

    std::optional<Verdict> ov;
    if (a.oracle) {
        auto [p, l] = parse_bounds(a.bounds);
        ov = oracle_check(sys, f, {p, l});
    }
    if (c.format == "json") {
        json j = verdict_json(v);
        if (ov) j["oracle"] = {{"holds", ov->holds}, {"agrees", ov->holds == v.holds}, {"bounds", a.bounds}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (v.holds ? "HOLDS" : "VIOLATED") << "  " << v.formula << "\n";
        std::cout << explain_verdict(v, sys);
        if (ov)
            std::cout << "oracle (bounds " << a.bounds << "): " << (ov->holds ? "holds" : "violated") << ", "
                      << (ov->holds == v.holds ? "agrees" : "DISAGREES") << "\n";
    }
    if (ov && ov->holds != v.holds) return 2;
    return v.holds ? 0 : 1;
}

// ---------------------------------------------------------------- cause

struct CauseArgs {
    std::string trace, effect, actions, candidate;
    std::size_t anchor = 0;
    bool oracle = false;
    std::string bounds = "6,3";
};

int cmd_cause(const Common& c, const CauseArgs& a) {
    System sys = c.load();
    LassoTrace t = parse_trace(a.trace);
    FormulaPtr eff = parse_formula(a.effect);
    NameSet A;
    for (auto& x : split(a.actions, ','))
        if (!x.empty()) A.insert(x);
    CauseLanguage cl = compute_cause(sys, t, a.anchor, eff, A, c.options());
    if (!c.dot_path.empty()) write_file(c.dot_path, to_dot(cl.automaton, *cl.voc, "cause"));
    json j;
    j["model"] = sys.name;
    j["trace"] = to_string(t);
    j["anchor"] = a.anchor;
    j["effect"] = to_string(*eff);
    j["actions"] = std::vector<std::string>(A.begin(), A.end());
    j["states"] = cl.automaton.size();
    int rc = 0;
    std::ostringstream text;
    text << "cause of " << to_string(*eff) << " at " << a.anchor << " over {" << join(A) << "}: automaton with "
         << cl.automaton.size() << " states\n";
    if (!a.candidate.empty()) {
        auto r = cause_formula_equiv(cl, parse_formula(a.candidate), a.anchor);
        j["candidate"] = a.candidate;
        j["equivalent"] = r.equivalent;
        if (r.witness) {
            j["witness"] = to_string(*r.witness);
            j["witness_in_cause"] = r.witness_in_cause;
        }
        if (r.equivalent) {
            text << "equivalent\n";
        } else {
            text << "not equivalent\n  witness " << to_string(*r.witness) << " is "
                 << (r.witness_in_cause ? "in the cause but not in the candidate" : "in the candidate but not in the cause")
                 << "\n";
            rc = 1;
        }
    }
    if (a.oracle) {
        auto [p, l] = parse_bounds(a.bounds);
        auto members = oracle_cause(sys, Anchor{t, a.anchor}, eff, A, {p, l});
        json arr = json::array();
        text << "bounded cause (bounds " << a.bounds << "): " << members.size() << " lassos\n";
        for (auto& m : members) {
            arr.push_back(to_string(m));
            text << "  " << to_string(m) << "\n";
        }
        j["oracle"] = arr;
    }
    if (c.format == "json") std::cout << j.dump(2) << "\n";
    else std::cout << text.str();
    return rc;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string suite = "all";
    int min_bidders = 2, max_bidders = 4;
    int min_players = 2, max_players = 4;
    std::string blaming = "both";
    int jobs = 1;
    std::string out_path;
};

struct Row {
    Instance inst;
    std::string verdict, expected;
    double millis = 0;
    std::size_t peak = 0;
};

int cmd_bench(const Common& c, const BenchArgs& a) {
    ExpectedTable table = ExpectedTable::parse(expected_verdicts_csv);
    std::vector<Instance> insts;
    auto add = [&](std::vector<Instance> v) { insts.insert(insts.end(), v.begin(), v.end()); };
    if (a.suite == "auction" || a.suite == "all") add(auction_suite(a.min_bidders, a.max_bidders));
    if (a.suite == "rps" || a.suite == "all") add(rps_suite());
    if (a.suite == "pennies" || a.suite == "all") add(pennies_suite(a.min_players, a.max_players, a.blaming));
    std::sort(insts.begin(), insts.end());

    std::vector<Row> rows(insts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k; (k = next++) < insts.size();) {
            Row& r = rows[k];
            r.inst = insts[k];
            auto e = table.lookup(r.inst);
            r.expected = e ? (*e ? "holds" : "fails") : "-";
            auto t0 = std::chrono::steady_clock::now();
            try {
                System sys = generate_from_spec(r.inst.spec());
                Verdict v = check(sys, instance_formula(sys, r.inst), c.options());
                r.verdict = v.holds ? "holds" : "fails";
                r.peak = v.peak_states;
            } catch (const ResourceError& ex) {
                r.verdict = "timeout";
                log(Level::Error, r.inst.key() + ": " + ex.what());
            } catch (const std::exception& ex) {
                r.verdict = "error";
                log(Level::Error, r.inst.key() + ": " + ex.what());
            }
            r.millis = detail::millis_since(t0);
            log(Level::Info, r.inst.key() + " -> " + r.verdict + " (" + std::to_string(r.millis) + " ms)");
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < std::max(1, a.jobs); ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ostringstream csv;
    csv << "family,params,requirement,verdict,expected,millis,peak_states\n";
    std::size_t mismatches = 0, compared = 0;
    for (auto& r : rows) {
        csv << r.inst.family << "," << r.inst.params << "," << r.inst.requirement << "," << r.verdict << ","
            << r.expected << "," << static_cast<long long>(r.millis) << "," << r.peak << "\n";
        if (r.expected != "-") {
            ++compared;
            if (r.expected != r.verdict) ++mismatches;
        }
    }
    if (!a.out_path.empty()) write_file(a.out_path, csv.str());
    else std::cout << csv.str();
    std::cerr << rows.size() << " instances, " << compared << " with expected verdicts, " << mismatches
              << " mismatches\n";
    for (auto& r : rows)
        if (r.expected != "-" && r.expected != r.verdict)
            std::cerr << "  mismatch: " << r.inst.key() << " got " << r.verdict << ", expected " << r.expected << "\n";
    return mismatches ? 1 : 0;
}

// ---------------------------------------------------------------- gen

int cmd_gen(const std::string& spec, const std::string& out) {
    System sys = generate_from_spec(spec);
    std::string text = serialize_model(sys);
    if (out.empty()) std::cout << text;
    else write_file(out, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"explic: explainability and privacy model checker"};
    app.require_subcommand(1);
    Common common;
    CheckArgs ca;
    CauseArgs za;
    BenchArgs ba;
    std::string gen_spec, gen_out;

    auto* check_cmd = app.add_subcommand("check", "check a requirement on a model");
    add_common(check_cmd, common);
    auto* fsrc = check_cmd->add_option_group("formula");
    fsrc->add_option("--spec", ca.spec_path, "formula file");
    fsrc->add_option("--formula", ca.formula_text, "formula text");
    fsrc->add_option("--req", ca.req, "ice|ece|fce[:AGENT[:TRIGGER:EFFECT]] or priv[:AGENT[:SECRET[:CONDITION]]]");
    fsrc->require_option(1);
    check_cmd->add_flag("--oracle-check", ca.oracle, "also run the bounded oracle and compare");
    check_cmd->add_option("--bounds", ca.bounds, "oracle bounds P,L");

    auto* cause_cmd = app.add_subcommand("cause", "compute the cause of an effect at an anchor point");
    add_common(cause_cmd, common);
    cause_cmd->add_option("--trace", za.trace, "lasso literal, e.g. \"{o,b1} {o} ({})^w\"")->required();
    cause_cmd->add_option("--anchor", za.anchor, "time index");
    cause_cmd->add_option("--effect", za.effect, "effect formula")->required();
    cause_cmd->add_option("--actions", za.actions, "comma-separated action set")->required();
    cause_cmd->add_option("--candidate", za.candidate, "formula to compare with the cause, evaluated at the anchor");
    cause_cmd->add_flag("--oracle", za.oracle, "print the bounded cause set");
    cause_cmd->add_option("--bounds", za.bounds, "oracle bounds P,L");

    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite and compare with expected verdicts");
    bench_cmd->add_option("--suite", ba.suite, "auction, rps, pennies or all")
        ->check(CLI::IsMember({"auction", "rps", "pennies", "all"}));
    bench_cmd->add_option("--min-bidders", ba.min_bidders)->check(CLI::Range(2, 12));
    bench_cmd->add_option("--max-bidders", ba.max_bidders)->check(CLI::Range(2, 12));
    bench_cmd->add_option("--min-players", ba.min_players)->check(CLI::Range(2, 16));
    bench_cmd->add_option("--max-players", ba.max_players)->check(CLI::Range(2, 16));
    bench_cmd->add_option("--blaming", ba.blaming, "yes, no or both")->check(CLI::IsMember({"yes", "no", "both"}));
    bench_cmd->add_option("--jobs", ba.jobs)->check(CLI::PositiveNumber);
    bench_cmd->add_option("--out", ba.out_path, "write CSV to a file instead of stdout");
    bench_cmd->add_option("--timeout", common.timeout, "seconds per instance")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--cap", common.cap, "automaton state cap")->check(CLI::PositiveNumber);

    auto* gen_cmd = app.add_subcommand("gen", "write a generated model");
    gen_cmd->add_option("spec", gen_spec, "auction:N:blind|public|explain, rps:standard|well, pennies:N:blaming|plain")
        ->required();
    gen_cmd->add_option("-o,--out", gen_out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*check_cmd) return cmd_check(common, ca);
        if (*cause_cmd) return cmd_cause(common, za);
        if (*bench_cmd) return cmd_bench(common, ba);
        if (*gen_cmd) return cmd_gen(gen_spec, gen_out);
    } catch (const ResourceError& e) {
        log(Level::Error, e.what());
        std::cerr << "resource limit: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
