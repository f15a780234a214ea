// parmc — parallel model checker for a nesting-free CTL fragment.
//
// Exit codes: 0 property holds, 1 property violated, 2 usage/model/formula
// error, 3 resource exhaustion or timeout.

#include "parmc/checker.hpp"
#include "parmc/engine.hpp"
#include "parmc/formula.hpp"
#include "parmc/gts.hpp"
#include "parmc/model.hpp"
#include "parmc/oracle.hpp"
#include "parmc/store.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace parmc;

struct ModelArgs {
    std::string model_path;
    std::string gts_path;
    std::string gen_spec;
};

struct FormulaArgs {
    std::string text;
    std::string file;
};

void add_model_options(CLI::App& app, ModelArgs& args, bool required) {
    auto* g = app.add_option_group("model", "model source (exactly one)");
    g->add_option("--model", args.model_path, "explicit .ksg model file");
    g->add_option("--gts", args.gts_path, "guarded transition system file");
    g->add_option("--gen", args.gen_spec,
                  "built-in generator: token-ring:<n> or philosophers:<n>");
    if (required) g->require_option(1);
    else g->require_option(0, 1);
}

void add_formula_options(CLI::App& app, FormulaArgs& args, bool required) {
    auto* g = app.add_option_group("formula", "formula source (exactly one)");
    g->add_option("--formula", args.text, "formula text");
    g->add_option("--formula-file", args.file, "file containing the formula");
    if (required) g->require_option(1);
    else g->require_option(0, 1);
}

std::unique_ptr<Model> build_model(const ModelArgs& args, ExplicitModel* explicit_out) {
    if (!args.model_path.empty()) {
        ExplicitModel m = load_explicit(args.model_path);
        if (explicit_out) *explicit_out = m;
        return std::make_unique<ExplicitGraphModel>(std::move(m));
    }
    if (!args.gts_path.empty()) return load_gts(args.gts_path);
    auto colon = args.gen_spec.find(':');
    if (colon == std::string::npos)
        throw ModelError("--gen expects <family>:<n>, got '" + args.gen_spec + "'");
    std::string family = args.gen_spec.substr(0, colon);
    unsigned n = 0;
    try {
        n = static_cast<unsigned>(std::stoul(args.gen_spec.substr(colon + 1)));
    } catch (const std::exception&) {
        throw ModelError("bad generator size in '" + args.gen_spec + "'");
    }
    if (family == "token-ring") return generate_token_ring(n);
    if (family == "philosophers") return generate_philosophers(n);
    throw ModelError("unknown generator family '" + family + "'");
}

Formula build_formula(const FormulaArgs& args) {
    std::string text = args.text;
    if (!args.file.empty()) {
        std::ifstream in(args.file);
        if (!in) throw FormulaError("cannot open formula file '" + args.file + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return parse_formula(text);
}

void print_witness(const std::vector<StateVector>& path) {
    std::cout << "witness path (" << path.size() << " states):\n";
    for (const StateVector& v : path) {
        std::cout << "  [";
        for (std::size_t i = 0; i < v.size(); ++i)
            std::cout << (i ? " " : "") << static_cast<unsigned>(v[i]);
        std::cout << "]\n";
    }
}

int run_check(const ModelArgs& margs, const FormulaArgs& fargs, const std::string& algo,
              const CheckOptions& opt, const std::string& stats_path, bool want_witness) {
    ExplicitModel explicit_model;
    bool have_explicit = !margs.model_path.empty();
    std::unique_ptr<Model> model = build_model(margs, have_explicit ? &explicit_model : nullptr);
    Formula formula = build_formula(fargs);

    bool holds;
    std::string reason;
    Stats stats;
    std::vector<StateVector> witness;
    if (algo == "oracle") {
        if (!have_explicit)
            throw ModelError("--algo oracle requires an explicit --model file");
        holds = oracle_check(explicit_model, formula);
        reason = "oracle";
        stats.states = explicit_model.state_count();
    } else {
        CheckOptions o = opt;
        o.variant = algo == "rpg" ? Variant::RPG : Variant::RG;
        o.want_witness = want_witness;
        Verdict v = check(*model, formula, o);
        holds = v.holds;
        reason = reason_name(v.reason);
        stats = v.stats;
        witness = std::move(v.witness);
    }

    std::cout << (holds ? "HOLDS" : "VIOLATED") << " (" << reason << ")\n";
    if (want_witness && !witness.empty()) print_witness(witness);
    if (!stats_path.empty()) {
        std::ofstream out(stats_path);
        if (!out) throw ModelError("cannot write stats to '" + stats_path + "'");
        out << stats_to_json(stats) << "\n";
    }
    return holds ? 0 : 1;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return xs[xs.size() / 2];
}

int run_bench(const ModelArgs& margs, const FormulaArgs& fargs, const std::string& algo,
              CheckOptions opt, const std::string& threads_list, unsigned repeat,
              const std::string& csv_path) {
    std::unique_ptr<Model> model = build_model(margs, nullptr);
    Formula formula = build_formula(fargs);
    opt.variant = algo == "rpg" ? Variant::RPG : Variant::RG;

    std::vector<unsigned> threads;
    std::stringstream ss{threads_list};
    for (std::string part; std::getline(ss, part, ',');) {
        unsigned t = static_cast<unsigned>(std::stoul(part));
        if (t == 0 || t > kMaxWorkers) throw ModelError("bad thread count in list");
        threads.push_back(t);
    }
    if (threads.empty()) throw ModelError("empty --threads-list");

    struct Row {
        unsigned threads, rep;
        bool holds;
        Stats stats;
        double total;
    };
    std::vector<Row> rows;
    std::map<unsigned, std::vector<double>> totals_by_threads;
    for (unsigned t : threads) {
        for (unsigned r = 0; r < repeat; ++r) {
            CheckOptions o = opt;
            o.workers = t;
            Verdict v = check(*model, formula, o);
            double total = v.stats.forward_seconds + v.stats.backward_seconds;
            rows.push_back({t, r, v.holds, v.stats, total});
            totals_by_threads[t].push_back(total);
        }
    }

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!csv_path.empty()) {
        file.open(csv_path);
        if (!file) throw ModelError("cannot write '" + csv_path + "'");
        out = &file;
    }
    *out << "threads,repeat,holds,forward_seconds,backward_seconds,total_seconds,speedup,"
            "states,forward_edges,reverse_edges_stored,parent_links_stored,suc_decrements,"
            "collect_rounds,steals\n";
    // Speedup of a thread count is median-vs-median against threads=1, so
    // the baseline rows report exactly 1.0 regardless of jitter.
    double base = totals_by_threads.count(1) ? median(totals_by_threads[1]) : 0.0;
    std::map<unsigned, double> speedup;
    for (auto& [t, ts] : totals_by_threads)
        if (base > 0) speedup[t] = base / median(ts);
    out->precision(9);
    for (const Row& r : rows) {
        *out << r.threads << ',' << r.rep << ',' << (r.holds ? 1 : 0) << ','
             << r.stats.forward_seconds << ',' << r.stats.backward_seconds << ',' << r.total
             << ',';
        if (auto it = speedup.find(r.threads); it != speedup.end())
            *out << it->second;
        *out << ',' << r.stats.states << ',' << r.stats.forward_edges << ','
             << r.stats.reverse_edges_stored << ',' << r.stats.parent_links_stored << ','
             << r.stats.suc_decrements << ',' << r.stats.collect_rounds << ','
             << r.stats.steals << '\n';
    }
    return 0;
}

}   // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel CTL-fragment model checker"};
    app.require_subcommand(0, 1);

    ModelArgs margs;
    FormulaArgs fargs;
    std::string algo = "rg";
    std::string stats_path;
    std::string order = "lifo";
    bool want_witness = false;
    bool no_early_stop = false;
    CheckOptions opt;

    add_model_options(app, margs, false);
    add_formula_options(app, fargs, false);
    app.add_option("--algo", algo, "rg | rpg | oracle")
        ->check(CLI::IsMember({"rg", "rpg", "oracle"}));
    app.add_option("--threads", opt.workers, "worker count")->check(CLI::Range(1u, kMaxWorkers));
    app.add_option("--table-bits", opt.table_bits, "localization table size (2^bits slots)")
        ->check(CLI::Range(4u, 32u));
    app.add_option("--order", order, "traversal order")->check(CLI::IsMember({"lifo"}));
    app.add_flag("--no-early-stop", no_early_stop, "disable early termination (testing aid)");
    app.add_option("--timeout", opt.timeout_seconds, "abort after this many seconds");
    app.add_option("--stats", stats_path, "write run statistics (JSON) to this file");
    app.add_flag("--witness", want_witness, "print a forward-phase witness path");

    auto* bench = app.add_subcommand("bench", "threads sweep with CSV report");
    ModelArgs bench_margs;
    FormulaArgs bench_fargs;
    std::string bench_algo = "rg";
    std::string threads_list = "1";
    unsigned repeat = 1;
    std::string csv_path;
    CheckOptions bench_opt;
    add_model_options(*bench, bench_margs, true);
    add_formula_options(*bench, bench_fargs, true);
    bench->add_option("--algo", bench_algo, "rg | rpg")
        ->check(CLI::IsMember({"rg", "rpg"}));
    bench->add_option("--threads-list", threads_list, "comma-separated worker counts");
    bench->add_option("--repeat", repeat, "repetitions per worker count")
        ->check(CLI::Range(1u, 1000u));
    bench->add_option("--table-bits", bench_opt.table_bits, "localization table size")
        ->check(CLI::Range(4u, 32u));
    bench->add_option("--csv", csv_path, "write the report to this file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    opt.early_stop = !no_early_stop;

    try {
        if (bench->parsed())
            return run_bench(bench_margs, bench_fargs, bench_algo, bench_opt, threads_list,
                             repeat, csv_path);
        if ((margs.model_path.empty() && margs.gts_path.empty() && margs.gen_spec.empty()) ||
            (fargs.text.empty() && fargs.file.empty())) {
            std::cerr << "error: a model source and a formula are required (see --help)\n";
            return 2;
        }
        return run_check(margs, fargs, algo, opt, stats_path, want_witness);
    } catch (const TimeoutError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const StoreError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
