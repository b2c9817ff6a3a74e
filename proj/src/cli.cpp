#include "rolltree/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rolltree/bench.hpp"
#include "rolltree/dataset.hpp"
#include "rolltree/fit.hpp"
#include "rolltree/tree.hpp"

namespace rolltree {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << content;
    if (!out) throw std::runtime_error(path + ": write failed");
}

int resolve_threads(int flag_value, bool flag_given) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("ROLLTREE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw std::runtime_error(std::string("invalid ROLLTREE_THREADS value '") + env +
                                     "'");
        return static_cast<int>(v);
    }
    return 1;
}

// "2", "2-5" and comma combinations like "2-4,6" are all accepted.
std::vector<int> parse_depths(const std::string& text) {
    std::vector<int> out;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token.empty()) throw std::runtime_error("empty depth token in '" + text + "'");
        const auto dash = token.find('-');
        const auto parse_one = [&](const std::string& s) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != s.size() || v < 1)
                throw std::runtime_error("bad depth '" + s + "' in '" + text + "'");
            return v;
        };
        if (dash == std::string::npos) {
            out.push_back(parse_one(token));
        } else {
            const int lo = parse_one(token.substr(0, dash));
            const int hi = parse_one(token.substr(dash + 1));
            if (hi < lo) throw std::runtime_error("bad depth range '" + token + "'");
            for (int d = lo; d <= hi; ++d) out.push_back(d);
        }
    }
    if (out.empty()) throw std::runtime_error("no depths in '" + text + "'");
    return out;
}

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ','))
        if (!token.empty()) out.push_back(token);
    if (out.empty()) throw std::runtime_error("empty list '" + text + "'");
    return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct CommonOptions {
    std::string input;
    std::string label;
    std::string output;
    int quantile_bins = 4;
    int threads = 1;
    bool threads_given = false;
};

void cmd_binarize(const CommonOptions& opt) {
    const RawDataset raw = load_csv(opt.input, opt.label);
    auto [ds, schema] = binarize(raw, 7, opt.quantile_bins);
    print_warnings(schema.warnings);

    RawDataset out;
    out.column_names = ds.feature_names;
    out.column_names.push_back(schema.label_column);
    out.label_column = schema.label_column;
    out.n_rows = static_cast<std::size_t>(ds.n);
    out.columns.resize(out.column_names.size());
    for (std::int64_t i = 0; i < ds.n; ++i) {
        for (std::int64_t j = 0; j < ds.p; ++j)
            out.columns[j].push_back(ds.at(i, j) ? "1" : "0");
        out.columns[ds.p].push_back(ds.class_names[ds.y[i]]);
    }
    write_csv(out, opt.output);
    write_file(opt.output + ".schema.json", schema_to_json(schema) + "\n");

    std::cout << "rows: " << ds.n << "\n"
              << "source features: " << schema.features.size() << "\n"
              << "binary features: " << ds.p << "\n"
              << "classes: " << ds.n_classes << "\n"
              << "data: " << opt.output << "\n"
              << "schema: " << opt.output << ".schema.json\n";
}

void cmd_fit(const CommonOptions& opt, const std::string& method_name, int depth,
             std::int64_t n_int, std::int64_t n_leaf) {
    const RawDataset raw = load_csv(opt.input, opt.label);
    auto [ds, schema] = binarize(raw, 7, opt.quantile_bins);
    print_warnings(schema.warnings);

    MethodSpec method = method_from_name(method_name);
    method.config.d_max = depth;
    method.config.solver.min_internal = n_int;
    method.config.solver.min_leaf = n_leaf;
    method.config.threads = resolve_threads(opt.threads, opt.threads_given);

    FitInfo info;
    DecisionTree tree = fit_tree(ds, method.config, &info);
    tree.schema = schema;
    write_file(opt.output, tree_to_json(tree) + "\n");

    if (info.premature_at_root) std::cerr << "warning: premature termination at root\n";
    const double accuracy = evaluate_accuracy(tree, ds);
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.3f", accuracy);
    std::cout << "method: " << method.name << "\n"
              << "loss: " << loss_name(effective_loss(method.config)) << "\n"
              << "depth: " << tree.depth() << " (requested " << depth << ")\n"
              << "leaves: " << tree.leaf_count() << "\n"
              << "nodes processed: " << info.nodes_processed << "\n"
              << "premature terminations: " << info.premature_terminations << "\n"
              << "training accuracy: " << acc << "\n"
              << "model: " << opt.output << "\n";
}

void cmd_predict(const std::string& model_path, const std::string& input,
                 const std::string& output) {
    const DecisionTree tree = tree_from_json(read_file(model_path));
    if (!tree.schema)
        throw std::runtime_error(model_path +
                                 ": model carries no binarization schema, cannot score raw "
                                 "records");
    const RawDataset raw = load_csv(input, "");
    const BinaryDataset ds = apply_schema(*tree.schema, raw);

    std::ostringstream out;
    out << "prediction\n";
    for (std::int64_t i = 0; i < ds.n; ++i)
        out << tree.class_names[predict_row(tree, ds, i)] << "\n";
    if (output.empty())
        std::cout << out.str();
    else
        write_file(output, out.str());

    if (!ds.y.empty()) {
        char acc[32];
        std::snprintf(acc, sizeof acc, "%.3f", evaluate_accuracy(tree, ds));
        std::cerr << "labeled input: accuracy " << acc << " on " << ds.n << " rows\n";
    }
}

void cmd_cv(const CommonOptions& opt, const std::string& methods_text,
            const std::string& depths_text, int folds, std::uint64_t seed,
            std::int64_t n_int, std::int64_t n_leaf) {
    const RawDataset raw = load_csv(opt.input, opt.label);
    auto [ds, schema] = binarize(raw, 7, opt.quantile_bins);
    print_warnings(schema.warnings);

    const int threads = resolve_threads(opt.threads, opt.threads_given);
    std::vector<MethodSpec> methods;
    for (const auto& name : split_csv_list(methods_text)) {
        MethodSpec m = method_from_name(name);
        m.config.solver.min_internal = n_int;
        m.config.solver.min_leaf = n_leaf;
        m.config.threads = threads;
        methods.push_back(std::move(m));
    }
    const std::vector<int> depths = parse_depths(depths_text);

    const CvReport report = run_cv(ds, opt.input, methods, depths, folds, seed);
    for (const auto& r : report.records)
        if (!r.error.empty())
            std::cerr << "warning: " << r.method << " depth " << r.depth << " fold "
                      << r.fold << " failed: " << r.error << "\n";
    if (!opt.output.empty()) write_file(opt.output, report_to_json(report));
    std::cout << report_text_tables(report);
    if (!opt.output.empty()) std::cout << "report: " << opt.output << "\n";
}

void cmd_compare(const std::string& input, const std::string& output) {
    const CvReport report = report_from_json(read_file(input));
    const WinTieTable table = win_tie(report);
    if (!output.empty()) write_file(output, wintie_to_json(table));
    std::cout << wintie_text(table);
    if (!output.empty()) std::cout << "table: " << output << "\n";
}

void cmd_bench(const std::string& method_name, int depth, std::int64_t n, std::int64_t p,
               std::uint64_t seed, int threads, const std::string& output) {
    MethodSpec method = method_from_name(method_name);
    if (method.config.lookahead != 2)
        throw std::runtime_error("bench: only two-step methods are supported");
    method.config.d_max = depth;
    const LossKind loss = effective_loss(method.config);

    const TimingBreakdown t = timing_bench(n, p, depth, loss, seed, threads);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "n: %lld\np: %lld\ndepth: %d\nloss: %s\nprecompute seconds: %.3f\n"
                  "solve seconds: %.3f\ntotal seconds: %.3f\nnodes processed: %d\n"
                  "training accuracy: %.4f\n",
                  static_cast<long long>(t.n), static_cast<long long>(t.p), t.depth,
                  loss_name(t.loss), t.precompute_seconds, t.solve_seconds,
                  t.total_seconds, t.nodes_processed, t.train_accuracy);
    std::cout << buf;
    if (!output.empty()) {
        std::ostringstream doc;
        doc << "{\n  \"n\": " << t.n << ",\n  \"p\": " << t.p
            << ",\n  \"depth\": " << t.depth << ",\n  \"loss\": \"" << loss_name(t.loss)
            << "\",\n  \"precompute_seconds\": " << t.precompute_seconds
            << ",\n  \"solve_seconds\": " << t.solve_seconds
            << ",\n  \"total_seconds\": " << t.total_seconds
            << ",\n  \"nodes_processed\": " << t.nodes_processed
            << ",\n  \"train_accuracy\": " << t.train_accuracy << "\n}\n";
        write_file(output, doc.str());
        std::cout << "breakdown: " << output << "\n";
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"binary classification trees grown by exact short-lookahead solves"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string method = "hybrid";
    std::string methods_list = "cart-g,rst-g";
    std::string depths_text = "2";
    std::string model_path;
    int depth = 2;
    int folds = 10;
    std::uint64_t seed = 1;
    std::int64_t n_int = 0;
    std::int64_t n_leaf = 0;
    std::int64_t bench_n = 50000;
    std::int64_t bench_p = 135;

    const auto add_input = [&](CLI::App* cmd, bool with_label) {
        cmd->add_option("--input", opt.input, "input CSV path")->required();
        if (with_label)
            cmd->add_option("--label", opt.label, "label column name")->required();
        cmd->add_option("--quantile-bins", opt.quantile_bins,
                        "bins for wide numeric columns")
            ->check(CLI::Range(2, 64));
    };
    const auto add_threads = [&](CLI::App* cmd) {
        return cmd->add_option("--threads", opt.threads,
                               "worker threads (default: ROLLTREE_THREADS or 1)")
            ->check(CLI::PositiveNumber);
    };
    const auto add_limits = [&](CLI::App* cmd) {
        cmd->add_option("--n-int", n_int, "minimum datapoints under an internal node")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--n-leaf", n_leaf, "minimum datapoints in a leaf")
            ->check(CLI::NonNegativeNumber);
    };

    CLI::App* binarize_cmd =
        app.add_subcommand("binarize", "one-hot encode a CSV and save the schema");
    add_input(binarize_cmd, true);
    binarize_cmd->add_option("--output", opt.output, "binarized CSV path")->required();
    binarize_cmd->callback([&] { cmd_binarize(opt); });

    CLI::App* fit_cmd = app.add_subcommand("fit", "train a tree and write the model JSON");
    add_input(fit_cmd, true);
    fit_cmd
        ->add_option("--method", method,
                     "cart-m | cart-g | rst-m | rst-g | rst3-m | rst3-g | hybrid")
        ->required();
    fit_cmd->add_option("--depth", depth, "maximum tree depth")->check(CLI::PositiveNumber);
    add_limits(fit_cmd);
    auto* fit_threads = add_threads(fit_cmd);
    fit_cmd->add_option("--output", opt.output, "model JSON path")->required();
    fit_cmd->callback([&] {
        opt.threads_given = fit_threads->count() > 0;
        cmd_fit(opt, method, depth, n_int, n_leaf);
    });

    CLI::App* predict_cmd =
        app.add_subcommand("predict", "score raw CSV rows with a saved model");
    predict_cmd->add_option("--model", model_path, "model JSON path")->required();
    predict_cmd->add_option("--input", opt.input, "input CSV path")->required();
    predict_cmd->add_option("--output", opt.output,
                            "predictions path (default: stdout)");
    predict_cmd->callback([&] { cmd_predict(model_path, opt.input, opt.output); });

    CLI::App* cv_cmd =
        app.add_subcommand("cv", "stratified k-fold cross-validation over methods");
    add_input(cv_cmd, true);
    cv_cmd->add_option("--method", methods_list, "comma-separated method list");
    cv_cmd->add_option("--depth", depths_text, "depth list or range, e.g. 2-8");
    cv_cmd->add_option("--folds", folds, "fold count")->check(CLI::Range(2, 1000000));
    cv_cmd->add_option("--seed", seed, "fold shuffle seed");
    add_limits(cv_cmd);
    auto* cv_threads = add_threads(cv_cmd);
    cv_cmd->add_option("--output", opt.output, "report JSON path");
    cv_cmd->callback([&] {
        opt.threads_given = cv_threads->count() > 0;
        cmd_cv(opt, methods_list, depths_text, folds, seed, n_int, n_leaf);
    });

    CLI::App* compare_cmd =
        app.add_subcommand("compare", "win and tie-for-best counts from a cv report");
    compare_cmd->add_option("--input", opt.input, "cv report JSON path")->required();
    compare_cmd->add_option("--output", opt.output, "table JSON path");
    compare_cmd->callback([&] { cmd_compare(opt.input, opt.output); });

    CLI::App* bench_cmd =
        app.add_subcommand("bench", "time the solve pipeline on synthetic data");
    bench_cmd->add_option("--method", method, "rst-m | rst-g | hybrid");
    bench_cmd->add_option("--depth", depth, "maximum tree depth")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--n", bench_n, "synthetic row count")
        ->check(CLI::Range(static_cast<std::int64_t>(2), static_cast<std::int64_t>(1) << 31));
    bench_cmd->add_option("--p", bench_p, "synthetic feature count")
        ->check(CLI::Range(1, 4096));
    bench_cmd->add_option("--seed", seed, "generator seed");
    auto* bench_threads = add_threads(bench_cmd);
    bench_cmd->add_option("--output", opt.output, "breakdown JSON path");
    bench_cmd->callback([&] {
        opt.threads_given = bench_threads->count() > 0;
        cmd_bench(method, depth, bench_n, bench_p, seed,
                  resolve_threads(opt.threads, opt.threads_given), opt.output);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace rolltree
