// Command-line entry point: train / eval / verify-spectral / bench.
// Exit codes: 0 success, 1 data or numeric failure, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kge/evaluator.hpp"
#include "kge/manifest.hpp"
#include "kge/model.hpp"
#include "kge/model_io.hpp"
#include "kge/sampler.hpp"
#include "kge/spectral.hpp"
#include "kge/trainer.hpp"
#include "kge/triples.hpp"
#include "kge/vocab.hpp"

namespace {

using namespace kge;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// n = round(frac * m), nudged down so m - n stays even
std::uint32_t resolve_num_scalars(std::uint32_t dim, double frac) {
    if (frac < 0.0 || frac > 1.0) throw UsageError("--scalar-frac must be in [0,1]");
    auto n = static_cast<std::uint32_t>(std::lround(frac * dim));
    if (n > dim) n = dim;
    if ((dim - n) % 2 != 0) {
        if (n == 0) throw UsageError("odd dimension cannot use scalar-frac 0");
        n -= 1;
    }
    return n;
}

std::vector<int> parse_int_list(const std::string& spec, const char* what) {
    std::vector<int> out;
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) return;
        try {
            out.push_back(std::stoi(tok));
        } catch (...) {
            throw UsageError(std::string("bad ") + what + " value '" + tok + "'");
        }
        tok.clear();
    };
    for (char c : spec) {
        if (c == ',') flush();
        else tok += c;
    }
    flush();
    if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
    return out;
}

struct TrainFlags {
    std::string model_kind = "analogy";
    std::uint32_t dim = 200;
    double scalar_frac = 0.5;
    double lr = 0.1;
    double l2 = 0.0;
    std::uint32_t neg_ratio = 3;
    std::uint32_t epochs = 500;
    std::uint32_t threads = 1;
    std::uint64_t seed = 42;
    double adagrad_eps = 1e-8;
    std::string corrupt_modes = "s,r,o";
    bool filter_false_negatives = false;
    bool allow_duplicates = false;
    std::string train_path;
    std::string valid_path;
    std::uint32_t valid_every = 1;
    std::string output = "model.kgem";
    std::string manifest_path;
    std::string dump_vocab;
    std::uint32_t checkpoint_every = 50;
};

int cmd_train(const TrainFlags& f) {
    const auto t_start = std::chrono::steady_clock::now();

    ModelConfig mcfg;
    mcfg.kind = model_kind_from_name(f.model_kind);
    mcfg.dim = f.dim;
    mcfg.num_scalars = resolve_num_scalars(f.dim, f.scalar_frac);
    try {
        mcfg.validate();
    } catch (const DimensionError& e) {
        throw UsageError(e.what());
    }

    Vocab vocab;
    LoadOptions train_opts;
    train_opts.mode = VocabMode::build;
    train_opts.allow_duplicates = f.allow_duplicates;
    train_opts.split = Split::train;
    std::size_t dropped = 0;
    TripleStore train_store = load_triples(f.train_path, vocab, train_opts, &dropped);
    if (dropped)
        std::fprintf(stderr, "warning: dropped %zu duplicate training triples\n", dropped);
    if (train_store.triples.empty()) throw TrainingError("training file has no triples");

    std::optional<TripleStore> valid_store;
    if (!f.valid_path.empty()) {
        LoadOptions vopts;
        vopts.mode = VocabMode::frozen;
        vopts.allow_duplicates = f.allow_duplicates;
        vopts.split = Split::valid;
        valid_store = load_triples(f.valid_path, vocab, vopts);
    }

    Model model = make_model(mcfg, vocab.num_entities(), vocab.num_relations(), f.seed);

    TrainConfig tcfg;
    tcfg.eta = f.lr;
    tcfg.lambda = f.l2;
    tcfg.epochs = f.epochs;
    tcfg.threads = f.threads;
    tcfg.alpha = f.neg_ratio;
    tcfg.corrupt_modes = corrupt_modes_from_string(f.corrupt_modes);
    tcfg.filter_false_negatives = f.filter_false_negatives;
    tcfg.seed = f.seed;
    tcfg.adagrad_epsilon = f.adagrad_eps;

    std::optional<FilterIndex> filter;
    if (valid_store)
        filter = build_filter_index({&train_store, &*valid_store});
    else if (f.filter_false_negatives)
        filter = build_filter_index({&train_store});

    double last_valid_mrr = -1;
    auto on_epoch = [&](const EpochStats& stats, const Model& m) {
        std::printf("%s\n", format_epoch_line(stats).c_str());
        std::fflush(stdout);
        if (valid_store && (stats.epoch + 1) % f.valid_every == 0) {
            auto score = [&m](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
                return m.score(s, r, o);
            };
            MetricReport rep = evaluate(score, m.num_entities(), *valid_store, &*filter,
                                        kDefaultHits, f.threads);
            last_valid_mrr = rep.mrr_filtered;
            std::printf("epoch %u valid_mrr_filt %.4f valid_hits10_filt %.4f\n", stats.epoch,
                        rep.mrr_filtered, rep.hits_filtered.at(10));
            std::fflush(stdout);
        }
        if (f.checkpoint_every > 0 && (stats.epoch + 1) % f.checkpoint_every == 0 &&
            stats.epoch + 1 < f.epochs)
            save_model(f.output + ".ckpt", m, vocab);
    };

    std::vector<EpochStats> history =
        train(model, train_store, tcfg, filter ? &*filter : nullptr, on_epoch);

    save_model(f.output, model, vocab);
    if (!f.dump_vocab.empty())
        vocab.save(f.dump_vocab + ".entities.tsv", f.dump_vocab + ".relations.tsv");

    const double total_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    RunManifest man;
    man.set("command", std::string("train"));
    man.set("model", std::string(model_kind_name(mcfg.kind)));
    man.set("dim", static_cast<std::uint64_t>(mcfg.dim));
    man.set("num_scalars", static_cast<std::uint64_t>(mcfg.num_scalars));
    man.set("lr", tcfg.eta);
    man.set("l2", tcfg.lambda);
    man.set("neg_ratio", static_cast<std::uint64_t>(tcfg.alpha));
    man.set("corrupt_modes", f.corrupt_modes);
    man.set("filter_false_negatives", std::string(f.filter_false_negatives ? "1" : "0"));
    man.set("epochs", static_cast<std::uint64_t>(tcfg.epochs));
    man.set("threads", static_cast<std::uint64_t>(tcfg.threads));
    man.set("seed", static_cast<std::uint64_t>(tcfg.seed));
    man.set("adagrad_epsilon", tcfg.adagrad_epsilon);
    man.set("train_path", f.train_path);
    man.set("train_checksum", file_checksum(f.train_path));
    if (!f.valid_path.empty()) {
        man.set("valid_path", f.valid_path);
        man.set("valid_checksum", file_checksum(f.valid_path));
    }
    man.set("num_entities", static_cast<std::uint64_t>(vocab.num_entities()));
    man.set("num_relations", static_cast<std::uint64_t>(vocab.num_relations()));
    man.set("num_train_triples", static_cast<std::uint64_t>(train_store.triples.size()));
    man.set("final_train_loss", history.empty() ? 0.0 : history.back().mean_loss);
    if (last_valid_mrr >= 0) man.set("final_valid_mrr_filt", last_valid_mrr);
    man.set("train_seconds", total_secs);
    man.set("model_path", f.output);
    man.save(f.manifest_path.empty() ? f.output + ".manifest" : f.manifest_path);

    std::printf("trained %s model (m=%u n=%u) on %zu triples in %.1f s -> %s\n",
                model_kind_name(mcfg.kind), mcfg.dim, mcfg.num_scalars,
                train_store.triples.size(), total_secs, f.output.c_str());
    return 0;
}

struct EvalFlags {
    std::string model_path;
    std::string test_path;
    std::string train_path;
    std::string valid_path;
    std::string filter_splits = "auto";
    std::string hits = "1,3,10";
    std::string report_path = "metrics.kv";
    std::uint32_t threads = 1;
    std::uint64_t seed = 42;  // accepted for interface uniformity; eval is deterministic
    double compare_hits10 = -1.0;  // reference proportion for a z-test
};

int cmd_eval(const EvalFlags& f) {
    auto [model, vocab] = load_model(f.model_path);

    LoadOptions opts;
    opts.mode = VocabMode::frozen;
    opts.split = Split::test;
    TripleStore test_store = load_triples(f.test_path, vocab, opts);
    if (test_store.triples.empty()) throw ParseError("test file has no triples");

    std::optional<TripleStore> train_store, valid_store;
    if (!f.train_path.empty()) {
        LoadOptions to;
        to.mode = VocabMode::frozen;
        to.split = Split::train;
        train_store = load_triples(f.train_path, vocab, to);
    }
    if (!f.valid_path.empty()) {
        LoadOptions vo;
        vo.mode = VocabMode::frozen;
        vo.split = Split::valid;
        valid_store = load_triples(f.valid_path, vocab, vo);
    }

    std::vector<const TripleStore*> fold;
    auto want = [&](const char* name) {
        if (f.filter_splits == "auto") return true;
        return ("," + f.filter_splits + ",").find("," + std::string(name) + ",") !=
               std::string::npos;
    };
    if (want("train")) {
        if (train_store) fold.push_back(&*train_store);
        else if (f.filter_splits != "auto")
            throw UsageError("--filter-splits lists 'train' but --train was not given");
    }
    if (want("valid")) {
        if (valid_store) fold.push_back(&*valid_store);
        else if (f.filter_splits != "auto")
            throw UsageError("--filter-splits lists 'valid' but --valid was not given");
    }
    if (want("test")) fold.push_back(&test_store);

    FilterIndex filter = build_filter_index(std::span<const TripleStore* const>(fold));

    auto score = [&model = model](std::uint32_t s, std::uint32_t r, std::uint32_t o) {
        return model.score(s, r, o);
    };
    const std::vector<int> ks = parse_int_list(f.hits, "hits");
    MetricReport report =
        evaluate(score, model.num_entities(), test_store, &filter, ks, f.threads);

    std::printf("%s", format_report_table(report).c_str());
    std::ofstream out(f.report_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + f.report_path);
    out << format_report_kv(report);
    std::printf("report written to %s\n", f.report_path.c_str());

    if (f.compare_hits10 >= 0.0) {
        if (!report.hits_filtered.count(10))
            throw UsageError("--compare-hits10 needs 10 in the --hits list");
        // one-sample z-test of the filtered hits@10 against a reference value
        const ProportionTest pt =
            proportion_test(report.hits_filtered.at(10), f.compare_hits10, report.n_queries);
        std::printf("proportion test vs %.4f: z=%.3f %s at the 5%% level\n", f.compare_hits10,
                    pt.z, pt.significant_at_5pct ? "significant" : "not significant");
    }
    return 0;
}

struct SpectralFlags {
    std::string matrices_path;
    double tol = 1e-9;
    std::uint32_t entities = 100;
    std::uint32_t triples = 1000;
    std::uint64_t seed = 42;
};

int cmd_verify_spectral(const SpectralFlags& f) {
    std::vector<Matrix> family = load_matrix_family(f.matrices_path);
    const std::size_t m = family[0].rows;
    std::printf("family: k=%zu m=%zu\n", family.size(), m);

    double worst_normal = 0, worst_comm = 0;
    for (const auto& a : family) worst_normal = std::max(worst_normal, normality_residual(a));
    for (std::size_t i = 0; i < family.size(); i++)
        for (std::size_t j = i + 1; j < family.size(); j++)
            worst_comm = std::max(worst_comm, commutator_residual(family[i], family[j]));
    std::printf("normality residual (max):    %.3e\n", worst_normal);
    std::printf("commutativity residual (max): %.3e\n", worst_comm);

    Rng rng(f.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    EntityTable v(f.entities, m);
    for (auto& x : v.data) x = unif(rng);
    std::uniform_int_distribution<std::uint32_t> pick_e(0, f.entities - 1);
    std::uniform_int_distribution<std::uint32_t> pick_r(
        0, static_cast<std::uint32_t>(family.size() - 1));
    std::vector<Triple> triples(f.triples);
    for (auto& t : triples) t = Triple{pick_e(rng), pick_r(rng), pick_e(rng)};

    EquivalenceReport rep =
        verify_score_equivalence(v, family, triples, f.tol);
    std::printf("orthogonality |Q^T Q - I|_F:  %.3e\n", rep.orthogonality_residual);
    std::printf("reconstruction residual:      %.3e\n", rep.reconstruction_residual);
    std::printf("score deviation (max over %u triples): %.3e (tol %.1e)\n", f.triples,
                rep.max_score_deviation, rep.tol);
    std::printf("%s\n", rep.passed ? "PASS" : "FAIL");
    return rep.passed ? 0 : 1;
}

struct BenchFlags {
    std::string train_path;
    std::string model_kind = "analogy";
    std::string dim_list = "200";
    std::string thread_list = "1,2,4,8";
    std::uint32_t epochs = 3;
    std::uint32_t neg_ratio = 3;
    double lr = 0.1;
    double l2 = 0.0;
    std::uint64_t seed = 42;
};

int cmd_bench(const BenchFlags& f) {
    Vocab vocab;
    LoadOptions opts;
    opts.allow_duplicates = true;
    TripleStore store = load_triples(f.train_path, vocab, opts);
    if (store.triples.empty()) throw TrainingError("training file has no triples");

    const std::vector<int> dims = parse_int_list(f.dim_list, "dim");
    const std::vector<int> threads = parse_int_list(f.thread_list, "threads");

    std::printf("%-6s %-8s %-14s %-12s\n", "dim", "threads", "secs_per_epoch", "mean_loss");
    for (int dim : dims) {
        if (dim <= 0) throw UsageError("dims must be positive");
        for (int t : threads) {
            if (t <= 0) throw UsageError("threads must be positive");
            ModelConfig mcfg;
            mcfg.kind = model_kind_from_name(f.model_kind);
            mcfg.dim = static_cast<std::uint32_t>(dim);
            mcfg.num_scalars = resolve_num_scalars(mcfg.dim, 0.5);
            Model model = make_model(mcfg, vocab.num_entities(), vocab.num_relations(), f.seed);

            TrainConfig tcfg;
            tcfg.eta = f.lr;
            tcfg.lambda = f.l2;
            tcfg.epochs = f.epochs;
            tcfg.threads = static_cast<std::uint32_t>(t);
            tcfg.alpha = f.neg_ratio;
            tcfg.seed = f.seed;
            auto history = train(model, store, tcfg);

            std::vector<double> secs;
            for (const auto& st : history) secs.push_back(st.seconds);
            std::sort(secs.begin(), secs.end());
            const double median = secs[secs.size() / 2];
            std::printf("%-6d %-8d %-14.4f %-12.6f\n", dim, t, median,
                        history.back().mean_loss);
            std::fflush(stdout);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kge: multi-relational graph embeddings with analogical structure"};
    app.require_subcommand(1);

    TrainFlags tf;
    auto* train_cmd = app.add_subcommand("train", "train an embedding model");
    train_cmd->add_option("--model", tf.model_kind, "analogy|distmult|complex|hole")
        ->check(CLI::IsMember({"analogy", "distmult", "complex", "hole"}));
    train_cmd->add_option("--dim", tf.dim, "embedding dimension m");
    train_cmd->add_option("--scalar-frac", tf.scalar_frac,
                          "fraction of scalar diagonal entries (analogy)");
    train_cmd->add_option("--lr", tf.lr, "initial learning rate");
    train_cmd->add_option("--l2", tf.l2, "L2 weight decay");
    train_cmd->add_option("--neg-ratio", tf.neg_ratio, "negatives per positive");
    train_cmd->add_option("--epochs", tf.epochs, "training epochs");
    train_cmd->add_option("--threads", tf.threads, "worker threads")
        ->envname("KGE_NUM_THREADS");
    train_cmd->add_option("--seed", tf.seed, "RNG seed");
    train_cmd->add_option("--adagrad-eps", tf.adagrad_eps, "AdaGrad denominator epsilon");
    train_cmd->add_option("--corrupt-modes", tf.corrupt_modes, "subset of s,r,o");
    train_cmd->add_flag("--filter-false-negatives", tf.filter_false_negatives,
                        "never emit a known true triple as a negative");
    train_cmd->add_flag("--allow-duplicates", tf.allow_duplicates,
                        "drop duplicate triples instead of failing");
    train_cmd->add_option("--train", tf.train_path, "training triples (TSV)")->required();
    train_cmd->add_option("--valid", tf.valid_path, "validation triples (TSV)");
    train_cmd->add_option("--valid-every", tf.valid_every, "validation cadence in epochs");
    train_cmd->add_option("--output", tf.output, "model file to write");
    train_cmd->add_option("--manifest", tf.manifest_path, "manifest file to write");
    train_cmd->add_option("--dump-vocab", tf.dump_vocab, "prefix for vocabulary dumps");
    train_cmd->add_option("--checkpoint-every", tf.checkpoint_every,
                          "checkpoint cadence in epochs (0 = off)");

    EvalFlags ef;
    auto* eval_cmd = app.add_subcommand("eval", "rank test triples and report metrics");
    eval_cmd->add_option("--model-file", ef.model_path, "trained model file")->required();
    eval_cmd->add_option("--test", ef.test_path, "test triples (TSV)")->required();
    eval_cmd->add_option("--train", ef.train_path, "training triples for the filter");
    eval_cmd->add_option("--valid", ef.valid_path, "validation triples for the filter");
    eval_cmd->add_option("--filter-splits", ef.filter_splits,
                         "splits folded into the filter, e.g. train,valid,test");
    eval_cmd->add_option("--hits", ef.hits, "Hits@k cutoffs");
    eval_cmd->add_option("--report", ef.report_path, "key=value report file");
    eval_cmd->add_option("--threads", ef.threads, "evaluation threads")
        ->envname("KGE_NUM_THREADS");
    eval_cmd->add_option("--seed", ef.seed, "RNG seed (evaluation itself is deterministic)");
    eval_cmd->add_option("--compare-hits10", ef.compare_hits10,
                         "z-test filtered hits@10 against this reference proportion");

    SpectralFlags sf;
    auto* spec_cmd = app.add_subcommand(
        "verify-spectral", "block-diagonalize a commuting normal family and check scores");
    spec_cmd->add_option("--matrices", sf.matrices_path, "matrix family file")->required();
    spec_cmd->add_option("--tol", sf.tol, "residual tolerance");
    spec_cmd->add_option("--entities", sf.entities, "random entities for the score check");
    spec_cmd->add_option("--triples", sf.triples, "random triples for the score check");
    spec_cmd->add_option("--seed", sf.seed, "RNG seed");

    BenchFlags bf;
    auto* bench_cmd = app.add_subcommand("bench", "seconds-per-epoch over dim/thread sweeps");
    bench_cmd->add_option("--train", bf.train_path, "training triples (TSV)")->required();
    bench_cmd->add_option("--model", bf.model_kind, "model kind")
        ->check(CLI::IsMember({"analogy", "distmult", "complex", "hole"}));
    bench_cmd->add_option("--dim-list", bf.dim_list, "comma-separated dims");
    bench_cmd->add_option("--thread-list", bf.thread_list, "comma-separated thread counts");
    bench_cmd->add_option("--epochs", bf.epochs, "epochs per configuration");
    bench_cmd->add_option("--neg-ratio", bf.neg_ratio, "negatives per positive");
    bench_cmd->add_option("--lr", bf.lr, "learning rate");
    bench_cmd->add_option("--l2", bf.l2, "L2 weight decay");
    bench_cmd->add_option("--seed", bf.seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(tf);
        if (eval_cmd->parsed()) return cmd_eval(ef);
        if (spec_cmd->parsed()) return cmd_verify_spectral(sf);
        if (bench_cmd->parsed()) return cmd_bench(bf);
        std::fprintf(stderr, "no subcommand given\n");
        return 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
