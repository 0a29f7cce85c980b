#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lrbs/data.hpp"
#include "lrbs/error.hpp"
#include "lrbs/eval.hpp"
#include "lrbs/optimizer.hpp"

namespace fs = std::filesystem;
using namespace lrbs;

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed while writing " + path.string());
}

std::string trace_to_csv(const TrainTrace& trace) {
    std::string csv = "iter,objective,smooth,nuclear,eta,momentum,rank\n";
    for (const TraceRow& row : trace) {
        csv += std::to_string(row.iter);
        csv += ',';
        csv += format_double(row.objective);
        csv += ',';
        csv += format_double(row.smooth);
        csv += ',';
        csv += format_double(row.nuclear);
        csv += ',';
        csv += format_double(row.eta);
        csv += ',';
        csv += format_double(row.momentum);
        csv += ',';
        csv += std::to_string(row.rank);
        csv += '\n';
    }
    return csv;
}

struct GenArgs {
    SyntheticSpec spec;
    std::string out_dir;
};

void run_gen(const GenArgs& args) {
    DatasetBundle data = generate_synthetic(args.spec);
    const fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    save_modality(data.train_x, dir / "train_x.csv", dir / "train_x.labels");
    save_modality(data.train_z, dir / "train_z.csv", dir / "train_z.labels");
    save_modality(data.test_x, dir / "test_x.csv", dir / "test_x.labels");
    save_modality(data.test_z, dir / "test_z.csv", dir / "test_z.labels");

    std::cout << "wrote " << data.train_x.features.cols() << " train and "
              << data.test_x.features.cols() << " test samples per modality to "
              << dir.string() << "\n";
}

struct TrainArgs {
    std::string x_csv, x_labels, z_csv, z_labels;
    std::string model_path;
    std::string trace_path;
    TrainConfig cfg;
    double pca_energy = 0.0; // 0 disables the projection step
};

void run_train(const TrainArgs& args) {
    LabeledModality x_mod = load_modality(args.x_csv, args.x_labels);
    LabeledModality z_mod = load_modality(args.z_csv, args.z_labels);

    std::optional<double> energy;
    if (args.pca_energy > 0.0) energy = args.pca_energy;
    TrainResult result = train_pipeline(x_mod, z_mod, args.cfg, energy);

    save_model(result.model, args.model_path);
    if (!args.trace_path.empty()) write_text(args.trace_path, trace_to_csv(result.trace));

    const TraceRow& last = result.trace.back();
    std::cout << "iterations: " << last.iter << "\n"
              << "objective: " << format_double(last.objective) << "\n"
              << "rank: " << numerical_rank(result.model.m) << "\n"
              << "converged: " << (result.converged ? "yes" : "no") << "\n"
              << "model: " << args.model_path << "\n";
}

struct EvalArgs {
    std::string model_path;
    std::string x_csv, x_labels, z_csv, z_labels;
    std::string direction = "both";
    std::vector<int> scopes;
    std::string json_path;
    std::string curves_prefix;
};

struct DirectionReport {
    std::string key;
    MetricReport report;
};

DirectionReport eval_direction(const SimilarityModel& model, const LabeledModality& queries,
                               const LabeledModality& gallery, Direction dir,
                               const std::vector<int>& requested_scopes) {
    Matrix scores = score_all(model, queries.features, gallery.features, dir);
    std::vector<int> scopes = requested_scopes;
    if (scopes.empty()) scopes = default_scopes(gallery.features.cols());
    MetricReport report = evaluate(scores, queries.labels, gallery.labels, scopes);
    return {dir == Direction::x_queries_z ? "x_query" : "z_query", report};
}

void run_eval(const EvalArgs& args) {
    SimilarityModel model = load_model(args.model_path);
    LabeledModality x_mod = load_modality(args.x_csv, args.x_labels);
    LabeledModality z_mod = load_modality(args.z_csv, args.z_labels);

    std::vector<DirectionReport> reports;
    if (args.direction == "x" || args.direction == "both")
        reports.push_back(
            eval_direction(model, x_mod, z_mod, Direction::x_queries_z, args.scopes));
    if (args.direction == "z" || args.direction == "both")
        reports.push_back(
            eval_direction(model, z_mod, x_mod, Direction::z_queries_x, args.scopes));

    double map_sum = 0.0;
    for (const DirectionReport& r : reports) {
        std::cout << r.key << " map: " << format_double(r.report.map) << "\n";
        map_sum += r.report.map;
    }
    const double map_avg = map_sum / static_cast<double>(reports.size());
    if (reports.size() > 1) std::cout << "average map: " << format_double(map_avg) << "\n";

    if (!args.json_path.empty()) {
        std::string json = "{\n  \"map\": {";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (i) json += ", ";
            json += "\"" + reports[i].key + "\": " + format_double(reports[i].report.map);
        }
        json += ", \"average\": " + format_double(map_avg) + "}";
        for (const DirectionReport& r : reports) {
            json += ",\n  \"" + r.key + "\": " + report_to_json(r.report);
        }
        json += "\n}\n";
        write_text(args.json_path, json);
    }

    if (!args.curves_prefix.empty()) {
        for (const DirectionReport& r : reports) {
            write_text(args.curves_prefix + "_" + r.key + "_pr.csv",
                       curve_to_csv(r.report.pr_curve, "recall", "precision"));
            write_text(args.curves_prefix + "_" + r.key + "_scope.csv",
                       curve_to_csv(r.report.scope_curve, "scope", "precision"));
        }
    }
}

struct RetrieveArgs {
    std::string model_path;
    std::string x_csv, x_labels, z_csv, z_labels;
    std::string direction = "x";
    std::string out_path;
};

void run_retrieve(const RetrieveArgs& args) {
    SimilarityModel model = load_model(args.model_path);
    LabeledModality x_mod = load_modality(args.x_csv, args.x_labels);
    LabeledModality z_mod = load_modality(args.z_csv, args.z_labels);

    const bool x_queries = args.direction == "x";
    const LabeledModality& queries = x_queries ? x_mod : z_mod;
    const LabeledModality& gallery = x_queries ? z_mod : x_mod;
    const Direction dir = x_queries ? Direction::x_queries_z : Direction::z_queries_x;

    Matrix scores = score_all(model, queries.features, gallery.features, dir);
    std::vector<RankedRetrieval> ranked = rank_all(scores, queries.labels, gallery.labels);

    std::string csv = "query,rank,gallery,score,relevant\n";
    for (const RankedRetrieval& r : ranked)
        for (std::size_t pos = 0; pos < r.ranked_gallery.size(); ++pos) {
            const int g = r.ranked_gallery[pos];
            csv += std::to_string(r.query_index);
            csv += ',';
            csv += std::to_string(pos + 1);
            csv += ',';
            csv += std::to_string(g);
            csv += ',';
            csv += format_double(scores(r.query_index, g));
            csv += ',';
            csv += std::to_string(r.relevance[pos]);
            csv += '\n';
        }

    if (args.out_path.empty())
        std::cout << csv;
    else
        write_text(args.out_path, csv);
}

void add_data_options(CLI::App* sub, std::string& x_csv, std::string& x_labels,
                      std::string& z_csv, std::string& z_labels) {
    sub->add_option("--x", x_csv, "first-modality feature CSV")->required();
    sub->add_option("--x-labels", x_labels, "first-modality label file")->required();
    sub->add_option("--z", z_csv, "second-modality feature CSV")->required();
    sub->add_option("--z-labels", z_labels, "second-modality label file")->required();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank bilinear similarity: train and evaluate cross-modal retrieval"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "write a synthetic two-modality dataset");
    gen_cmd->add_option("--classes", gen.spec.classes, "number of classes");
    gen_cmd->add_option("--latent", gen.spec.latent_dim, "shared latent dimension");
    gen_cmd->add_option("--dimx", gen.spec.dim_x, "first-modality feature dimension");
    gen_cmd->add_option("--dimz", gen.spec.dim_z, "second-modality feature dimension");
    gen_cmd->add_option("--train", gen.spec.per_class_train, "training samples per class");
    gen_cmd->add_option("--test", gen.spec.per_class_test, "test samples per class");
    gen_cmd->add_option("--sigma", gen.spec.noise_sigma, "latent noise standard deviation");
    gen_cmd->add_option("--seed", gen.spec.seed, "generator seed");
    gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();

    TrainArgs tr;
    CLI::App* train_cmd = app.add_subcommand("train", "fit the bilinear similarity matrix");
    add_data_options(train_cmd, tr.x_csv, tr.x_labels, tr.z_csv, tr.z_labels);
    train_cmd->add_option("--lambda", tr.cfg.lambda, "nuclear-norm weight");
    train_cmd->add_option("--pca-energy", tr.pca_energy,
                          "energy fraction for the per-modality projection; 0 keeps raw "
                          "features");
    train_cmd->add_option("--max-iters", tr.cfg.max_iters, "iteration cap");
    train_cmd->add_option("--tol", tr.cfg.rel_tol, "relative objective-change tolerance");
    train_cmd->add_option("--eta0", tr.cfg.eta0, "initial step size");
    train_cmd->add_option("--shrink", tr.cfg.backtrack_shrink, "backtracking shrink factor");
    train_cmd->add_option("--seed", tr.cfg.seed, "recorded in the model metadata");
    train_cmd->add_option("--model", tr.model_path, "output model file")->required();
    train_cmd->add_option("--trace", tr.trace_path, "optional per-iteration CSV");

    EvalArgs ev;
    CLI::App* eval_cmd = app.add_subcommand("eval", "retrieval metrics for a trained model");
    eval_cmd->add_option("--model", ev.model_path, "model file")->required();
    add_data_options(eval_cmd, ev.x_csv, ev.x_labels, ev.z_csv, ev.z_labels);
    eval_cmd->add_option("--direction", ev.direction, "which side issues queries")
        ->check(CLI::IsMember({"x", "z", "both"}));
    eval_cmd->add_option("--scopes", ev.scopes, "comma-separated precision scopes")
        ->delimiter(',');
    eval_cmd->add_option("--json", ev.json_path, "write the full report here");
    eval_cmd->add_option("--curves-prefix", ev.curves_prefix,
                         "write <prefix>_<dir>_pr.csv and <prefix>_<dir>_scope.csv");

    RetrieveArgs re;
    CLI::App* retrieve_cmd = app.add_subcommand("retrieve", "ranked gallery per query");
    retrieve_cmd->add_option("--model", re.model_path, "model file")->required();
    add_data_options(retrieve_cmd, re.x_csv, re.x_labels, re.z_csv, re.z_labels);
    retrieve_cmd->add_option("--direction", re.direction, "which side issues queries")
        ->check(CLI::IsMember({"x", "z"}));
    retrieve_cmd->add_option("--out", re.out_path, "output CSV; stdout when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (gen_cmd->parsed()) run_gen(gen);
        if (train_cmd->parsed()) run_train(tr);
        if (eval_cmd->parsed()) run_eval(ev);
        if (retrieve_cmd->parsed()) run_retrieve(re);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
