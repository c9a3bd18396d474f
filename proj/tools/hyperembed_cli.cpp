// Command-line front end: embedding, extension, downstream evaluation,
// approximation-error measurement, and synthetic dataset generation.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hyperembed/eval.hpp"
#include "hyperembed/extend.hpp"
#include "hyperembed/io.hpp"
#include "hyperembed/oracle.hpp"
#include "hyperembed/sahe.hpp"

namespace he = hyperembed;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string hypergraph;
    std::string attrs;
    std::string node_labels;
    std::string edge_labels;
    int threads = 0;
    std::string reduction = "seq";
};

struct EmbedOptions {
    std::string method = "sahe";
    he::SaheParams params;
    std::string out_dir;
    std::string id_map_path;
    std::string format = "binary";
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool labels = false) {
    cmd->add_option("--hypergraph", opts.hypergraph, "hyperedge file")->required();
    cmd->add_option("--attrs", opts.attrs, "attribute file")->required();
    if (labels) {
        cmd->add_option("--node-labels", opts.node_labels, "node label file");
        cmd->add_option("--edge-labels", opts.edge_labels, "hyperedge label file");
    }
    cmd->add_option("--threads", opts.threads, "worker threads (0 = auto)");
    cmd->add_option("--reduction", opts.reduction, "reduction mode: seq | par")
        ->check(CLI::IsMember({"seq", "par"}));
}

void apply_common(const CommonOptions& opts) {
    int threads = opts.threads;
    if (threads == 0) {
        if (const char* env = std::getenv("HYPEREMBED_THREADS")) threads = std::atoi(env);
    }
    he::set_num_threads(threads < 0 ? 0 : threads);
    he::set_reduction_mode(opts.reduction == "par" ? he::ReductionMode::parallel
                                                   : he::ReductionMode::sequential);
}

void add_params(CLI::App* cmd, he::SaheParams& p) {
    cmd->add_option("--K", p.K, "attribute neighbors per node");
    cmd->add_option("--beta", p.beta, "attribute/structure volume balance");
    cmd->add_option("--alpha", p.alpha, "restart probability");
    cmd->add_option("--T", p.T, "walk steps");
    cmd->add_option("--r", p.r, "truncated SVD rank");
    cmd->add_option("--k", p.k, "embedding dimension");
    cmd->add_option("--tau", p.tau, "sketch polynomial degree");
    cmd->add_option("--b", p.b, "sketch dimension (power of two)");
    cmd->add_option("--c", p.c, "regression sample count");
    cmd->add_option("--seed", p.seed, "master seed");
    cmd->add_option("--dense-cap", p.dense_cap, "dense materialization cap");
    cmd->add_flag("--exact", p.exact_mode, "bypass sketching (verification only)");
}

void validate_params(const he::SaheParams& p, const std::string& method) {
    if (!(p.alpha >= 0.0 && p.alpha < 1.0))
        throw he::ParameterError("--alpha must be in [0, 1)");
    if (!(p.beta > 0.0)) throw he::ParameterError("--beta must be > 0");
    if (p.K < 1) throw he::ParameterError("--K must be >= 1");
    if (p.T < 1) throw he::ParameterError("--T must be >= 1");
    if (p.k < 1) throw he::ParameterError("--k must be >= 1");
    if (method == "sahe" && p.r < p.k)
        throw he::ParameterError("--r must be >= --k for the sketched method");
}

he::AttributedHypergraph load(const CommonOptions& opts,
                              std::vector<long long>* id_map = nullptr) {
    return he::load_hypergraph(opts.hypergraph, opts.attrs, opts.node_labels, opts.edge_labels,
                               id_map);
}

std::pair<he::EmbeddingMatrix, he::EmbeddingMatrix> run_embed(
    const he::AttributedHypergraph& hg, const std::string& method, const he::SaheParams& p,
    he::RunManifest* manifest, bool node_only = false) {
    if (method == "base") {
        he::BaseParams bp;
        bp.K = p.K;
        bp.beta = p.beta;
        bp.alpha = p.alpha;
        bp.T = p.T;
        bp.k = p.k;
        bp.dense_cap = p.dense_cap;
        bp.node_only = node_only;
        return he::base_embed(hg, bp);
    }
    return he::sahe_embed(hg, p, manifest);
}

void write_report(const he::TaskReport& report, const std::string& json_path) {
    for (const auto& [name, series] : report)
        std::cout << name << ": mean " << series.mean() << " stddev " << series.stddev() << "\n";
    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::trunc);
        out << he::report_to_json(report) << "\n";
    }
}

std::vector<int> require_labels(const std::optional<std::vector<int>>& labels,
                                const char* which) {
    if (!labels) throw he::ParameterError(std::string("missing ") + which + " label file");
    return *labels;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attributed hypergraph node and hyperedge embeddings"};
    app.require_subcommand(1);

    CommonOptions common;
    EmbedOptions embed;
    he::SplitSpec split;          // classification tasks: 20% train
    he::SplitSpec lp_split;       // link prediction: 80% train per the protocol
    lp_split.train_fraction = 0.8;
    std::uint64_t negative_seed = 1;
    std::string json_out;
    std::string out_path;

    // embed
    auto* cmd_embed = app.add_subcommand("embed", "compute node and hyperedge embeddings");
    add_common(cmd_embed, common);
    add_params(cmd_embed, embed.params);
    cmd_embed->add_option("--method", embed.method, "sahe | base")
        ->check(CLI::IsMember({"sahe", "base"}));
    cmd_embed->add_option("--out", embed.out_dir, "output directory")->required();
    cmd_embed->add_option("--format", embed.format, "binary | text")
        ->check(CLI::IsMember({"binary", "text"}));
    cmd_embed->add_option("--id-map", embed.id_map_path, "write dense-id mapping here");

    // extend
    auto* cmd_extend = app.add_subcommand("extend", "write the attribute-extended hypergraph");
    CommonOptions ext_common;
    he::SaheParams ext_params;
    add_common(cmd_extend, ext_common);
    cmd_extend->add_option("--K", ext_params.K, "attribute neighbors per node");
    cmd_extend->add_option("--beta", ext_params.beta, "volume balance");
    cmd_extend->add_option("--out", out_path, "output file")->required();

    // eval-nc / eval-hec on stored embeddings
    auto* cmd_nc = app.add_subcommand("eval-nc", "node classification from embeddings");
    std::string emb_path, label_path;
    cmd_nc->add_option("--embeddings", emb_path, "node embedding file")->required();
    cmd_nc->add_option("--labels", label_path, "node label file")->required();
    cmd_nc->add_option("--train-frac", split.train_fraction, "training fraction");
    cmd_nc->add_option("--repeats", split.repeats, "random splits");
    cmd_nc->add_option("--seed", split.seed, "split seed");
    cmd_nc->add_option("--json", json_out, "write report JSON here");

    auto* cmd_hec = app.add_subcommand("eval-hec", "hyperedge classification from embeddings");
    cmd_hec->add_option("--embeddings", emb_path, "hyperedge embedding file")->required();
    cmd_hec->add_option("--labels", label_path, "hyperedge label file")->required();
    cmd_hec->add_option("--train-frac", split.train_fraction, "training fraction");
    cmd_hec->add_option("--repeats", split.repeats, "random splits");
    cmd_hec->add_option("--seed", split.seed, "split seed");
    cmd_hec->add_option("--json", json_out, "write report JSON here");

    // eval-lp re-embeds per split
    auto* cmd_lp = app.add_subcommand("eval-lp", "hyperedge link prediction (re-embeds per split)");
    CommonOptions lp_common;
    he::SaheParams lp_params;
    std::string lp_method = "sahe";
    add_common(cmd_lp, lp_common);
    add_params(cmd_lp, lp_params);
    cmd_lp->add_option("--method", lp_method, "sahe | base")
        ->check(CLI::IsMember({"sahe", "base"}));
    cmd_lp->add_option("--train-frac", lp_split.train_fraction, "training fraction");
    cmd_lp->add_option("--repeats", lp_split.repeats, "random splits");
    cmd_lp->add_option("--split-seed", lp_split.seed, "split seed");
    cmd_lp->add_option("--negative-seed", negative_seed, "negative sampling seed");
    cmd_lp->add_option("--json", json_out, "write report JSON here");

    // mae
    auto* cmd_mae = app.add_subcommand("mae", "normalized approximation error of embeddings");
    CommonOptions mae_common;
    he::SaheParams mae_params;
    std::string mae_method = "base", mae_matrix = "node";
    add_common(cmd_mae, mae_common);
    add_params(cmd_mae, mae_params);
    cmd_mae->add_option("--method", mae_method, "sahe | base")
        ->check(CLI::IsMember({"sahe", "base"}));
    cmd_mae->add_option("--matrix", mae_matrix, "node | edge")
        ->check(CLI::IsMember({"node", "edge"}));

    // generators
    auto* cmd_genu = app.add_subcommand("gen-uniform", "write a uniform random hypergraph");
    he::Index gen_n = 1000, gen_arity = 3, gen_edges = -1, gen_q = 100;
    std::uint64_t gen_seed = 42;
    std::string gen_prefix;
    cmd_genu->add_option("--n", gen_n, "node count")->required();
    cmd_genu->add_option("--arity", gen_arity, "hyperedge size");
    cmd_genu->add_option("--edges", gen_edges, "hyperedge count (default n)");
    cmd_genu->add_option("--q", gen_q, "attribute dimension");
    cmd_genu->add_option("--seed", gen_seed, "generator seed");
    cmd_genu->add_option("--out-prefix", gen_prefix, "output file prefix")->required();

    auto* cmd_genp = app.add_subcommand("gen-planted", "write a planted-partition hypergraph");
    he::Index gp_n = 1000, gp_classes = 4, gp_epc = 250, gp_q = 64;
    double gp_noise = 0.1;
    cmd_genp->add_option("--n", gp_n, "node count")->required();
    cmd_genp->add_option("--classes", gp_classes, "class count");
    cmd_genp->add_option("--edges-per-class", gp_epc, "hyperedges per class");
    cmd_genp->add_option("--attr-dim", gp_q, "attribute dimension");
    cmd_genp->add_option("--noise", gp_noise, "cross-class and bit-flip probability");
    cmd_genp->add_option("--seed", gen_seed, "generator seed");
    cmd_genp->add_option("--out-prefix", gen_prefix, "output file prefix")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_embed->parsed()) {
            apply_common(common);
            validate_params(embed.params, embed.method);
            std::vector<long long> id_map;
            auto hg = load(common, &id_map);
            fs::create_directories(embed.out_dir);
            he::RunManifest manifest;
            auto [zv, ze] = run_embed(hg, embed.method, embed.params,
                                      embed.method == "sahe" ? &manifest : nullptr);
            auto fmt = embed.format == "text" ? he::EmbeddingFormat::text
                                              : he::EmbeddingFormat::binary;
            he::save_embeddings(zv, embed.out_dir + "/node.emb", fmt);
            he::save_embeddings(ze, embed.out_dir + "/edge.emb", fmt);
            if (embed.method == "sahe") {
                std::ofstream out(embed.out_dir + "/manifest.json", std::ios::trunc);
                out << manifest.to_json() << "\n";
            }
            if (!embed.id_map_path.empty()) he::save_id_map(id_map, embed.id_map_path);
            std::cout << "wrote " << embed.out_dir << "/node.emb (" << zv.rows() << "x" << zv.dim()
                      << "), edge.emb (" << ze.rows() << "x" << ze.dim() << ")\n";
        } else if (cmd_extend->parsed()) {
            apply_common(ext_common);
            auto hg = load(ext_common);
            auto ext = he::extend_hypergraph(hg, ext_params.K, ext_params.beta);
            he::save_extended(ext, out_path);
            std::cout << "wrote " << out_path << " (" << ext.num_rows() << " rows, volume "
                      << ext.volume << ")\n";
        } else if (cmd_nc->parsed() || cmd_hec->parsed()) {
            auto emb = he::load_embeddings(emb_path);
            std::ifstream in(label_path);
            if (!in) throw he::IoError("cannot open " + label_path);
            std::vector<int> labels(emb.rows(), 0);
            long long id;
            int lab;
            while (in >> id >> lab) {
                if (id < 0 || id >= emb.rows())
                    throw he::ParseError(label_path + ": id out of range");
                labels[id] = lab;
            }
            auto report = cmd_nc->parsed()
                              ? he::node_classification_eval(emb, labels, split)
                              : he::hyperedge_classification_eval(emb, labels, split);
            write_report(report, json_out);
        } else if (cmd_lp->parsed()) {
            apply_common(lp_common);
            validate_params(lp_params, lp_method);
            auto hg = load(lp_common);
            auto embedder = [&](const he::AttributedHypergraph& train_hg) {
                return run_embed(train_hg, lp_method, lp_params, nullptr, true).first;
            };
            auto report = he::link_prediction_eval(hg, embedder, lp_split, negative_seed);
            write_report(report, json_out);
        } else if (cmd_mae->parsed()) {
            apply_common(mae_common);
            validate_params(mae_params, mae_method);
            auto hg = load(mae_common);
            auto ext = he::extend_hypergraph(hg, mae_params.K, mae_params.beta);
            he::SimilarityMatrix sim =
                mae_matrix == "node"
                    ? he::node_similarity_matrix(ext, mae_params.alpha, mae_params.T,
                                                 mae_params.dense_cap)
                    : he::edge_similarity_matrix(ext, mae_params.alpha, mae_params.T,
                                                 mae_params.dense_cap);
            auto [zv, ze] = run_embed(hg, mae_method, mae_params, nullptr,
                                      mae_matrix == "node");
            double mae = he::similarity_mae(mae_matrix == "node" ? zv : ze, sim);
            std::cout << "MAE(" << mae_matrix << ", " << mae_method << ") = " << mae << "\n";
        } else if (cmd_genu->parsed()) {
            auto hg = he::synth_uniform(gen_n, gen_arity, gen_edges, gen_q, gen_seed);
            he::save_hypergraph(hg, gen_prefix);
            std::cout << "wrote " << gen_prefix << ".hg/.attrs (" << hg.num_nodes() << " nodes, "
                      << hg.num_edges() << " hyperedges)\n";
        } else if (cmd_genp->parsed()) {
            auto hg = he::synth_planted(gp_n, gp_classes, gp_epc, gp_q, gp_noise, gen_seed);
            he::save_hypergraph(hg, gen_prefix);
            std::cout << "wrote " << gen_prefix << ".hg/.attrs/.node-labels/.edge-labels\n";
        }
    } catch (const he::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const he::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const he::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const he::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
