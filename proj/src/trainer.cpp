#include "kge/trainer.hpp"

#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace kge {

void TrainConfig::validate() const {
    if (eta <= 0) throw TrainingError("eta must be positive");
    if (lambda < 0) throw TrainingError("lambda must be >= 0");
    if (epochs < 1) throw TrainingError("epochs must be >= 1");
    if (threads < 1) throw TrainingError("threads must be >= 1");
    if (adagrad_epsilon <= 0) throw TrainingError("adagrad_epsilon must be positive");
    if (alpha < 1) throw TrainingError("alpha must be >= 1");
    if (corrupt_modes.empty()) throw TrainingError("corrupt_modes must be non-empty");
}

AdaGradState make_adagrad_state(const Model& model) {
    AdaGradState state;
    state.entity_g = ParamTable(model.entities.rows, model.entities.dim, 0.0);
    state.relation_g = ParamTable(model.relations.rows, model.relations.dim, 0.0);
    return state;
}

double logistic_loss(double phi, int y) {
    const double z = y * phi;
    if (z >= 0) return std::log1p(std::exp(-z));
    return -z + std::log1p(std::exp(z));
}

double loss_grad_scale(double phi, int y) {
    const double z = -y * phi;
    double sig;
    if (z >= 0) {
        sig = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        sig = e / (1.0 + e);
    }
    return -y * sig;
}

namespace {

void update_row(std::span<double> theta, std::span<double> acc,
                std::span<const double> dphi, double loss_scale, const TrainConfig& cfg) {
    for (std::size_t i = 0; i < theta.size(); i++) {
        const double g = loss_scale * dphi[i] + cfg.lambda * theta[i];
        if (!std::isfinite(g)) throw TrainingError("non-finite gradient component");
        const double a = acc[i] + g * g;
        acc[i] = a;
        theta[i] -= cfg.eta * g / (std::sqrt(a) + cfg.adagrad_epsilon);
    }
}

}  // namespace

void sgd_update(Model& model, AdaGradState& state, const LabeledTriple& sample,
                const TripleGradient& grad, double loss_scale, const TrainConfig& cfg) {
    update_row(model.entities.row(sample.s), state.entity_g.row(sample.s),
               grad.d_subject, loss_scale, cfg);
    update_row(model.relations.row(sample.r), state.relation_g.row(sample.r),
               grad.d_relation, loss_scale, cfg);
    update_row(model.entities.row(sample.o), state.entity_g.row(sample.o),
               grad.d_object, loss_scale, cfg);
}

std::string format_epoch_line(const EpochStats& stats) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "epoch %u loss %.6f secs %.3f", stats.epoch,
                  stats.mean_loss, stats.seconds);
    return buf;
}

namespace {

struct WorkerSlot {
    double loss_sum = 0;
    std::size_t count = 0;
    char pad[48];  // keep slots on separate cache lines
};

}  // namespace

std::vector<EpochStats> train(Model& model, const TripleStore& data, const TrainConfig& cfg,
                              const FilterIndex* negative_filter, const EpochCallback& on_epoch) {
    cfg.validate();
    model.config.validate();
    if (data.triples.empty()) throw TrainingError("empty training set");
    for (const auto& t : data.triples) {
        if (t.s >= model.num_entities() || t.o >= model.num_entities() ||
            t.r >= model.num_relations())
            throw TrainingError("triple index out of model range");
    }

    const std::size_t n_pos = data.triples.size();
    const unsigned T = cfg.threads;
    AdaGradState state = make_adagrad_state(model);

    SamplerConfig scfg;
    scfg.alpha = cfg.alpha;
    scfg.corrupt_modes = cfg.corrupt_modes;
    scfg.filter_false_negatives = cfg.filter_false_negatives;
    scfg.seed = cfg.seed;

    std::vector<EpochStats> history;
    history.reserve(cfg.epochs);
    std::vector<WorkerSlot> slots(T);
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::barrier sync(static_cast<std::ptrdiff_t>(T));
    std::chrono::steady_clock::time_point epoch_start;

    auto capture = [&](std::exception_ptr ep) {
        std::scoped_lock lock(error_mu);
        if (!first_error) first_error = ep;
        failed.store(true, std::memory_order_relaxed);
    };

    auto worker = [&](unsigned tid) {
        TripleGradient grad;
        for (std::uint32_t epoch = 0; epoch < cfg.epochs; epoch++) {
            if (tid == 0) epoch_start = std::chrono::steady_clock::now();
            slots[tid] = WorkerSlot{};
            try {
                if (!failed.load(std::memory_order_relaxed)) {
                    // every worker derives the same epoch permutation, then
                    // takes its own contiguous shard of it
                    auto order = epoch_permutation(n_pos, mix_seed(cfg.seed, 0xa11ce, epoch));
                    const std::size_t lo = n_pos * tid / T;
                    const std::size_t hi = n_pos * (tid + 1) / T;
                    std::vector<std::uint32_t> shard(order.begin() + lo, order.begin() + hi);
                    BatchStream stream(data, scfg, model.num_entities(), model.num_relations(),
                                       std::move(shard), mix_seed(cfg.seed, epoch, 0x700 + tid),
                                       negative_filter);
                    while (auto sample = stream.next()) {
                        if (failed.load(std::memory_order_relaxed)) break;
                        const double phi = model.score(sample->s, sample->r, sample->o);
                        const double loss = logistic_loss(phi, sample->y);
                        if (!std::isfinite(loss))
                            throw TrainingError("non-finite loss at epoch " +
                                                std::to_string(epoch));
                        slots[tid].loss_sum += loss;
                        slots[tid].count++;
                        model.grad(sample->s, sample->r, sample->o, grad);
                        sgd_update(model, state, *sample, grad,
                                   loss_grad_scale(phi, sample->y), cfg);
                    }
                }
            } catch (...) {
                capture(std::current_exception());
            }
            sync.arrive_and_wait();
            if (tid == 0 && !failed.load(std::memory_order_relaxed)) {
                double loss_sum = 0;
                std::size_t count = 0;
                for (const auto& slot : slots) {
                    loss_sum += slot.loss_sum;
                    count += slot.count;
                }
                EpochStats stats;
                stats.epoch = epoch;
                stats.mean_loss = count ? loss_sum / static_cast<double>(count) : 0.0;
                stats.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start)
                        .count();
                if (!std::isfinite(stats.mean_loss))
                    capture(std::make_exception_ptr(
                        TrainingError("non-finite epoch loss at epoch " + std::to_string(epoch))));
                else {
                    history.push_back(stats);
                    if (on_epoch) {
                        try {
                            on_epoch(stats, model);
                        } catch (...) {
                            capture(std::current_exception());
                        }
                    }
                }
            }
            sync.arrive_and_wait();
            if (failed.load(std::memory_order_relaxed)) break;
        }
    };

    if (T == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(T - 1);
        for (unsigned tid = 1; tid < T; tid++) pool.emplace_back(worker, tid);
        worker(0);
        for (auto& th : pool) th.join();
    }

    if (first_error) std::rethrow_exception(first_error);
    return history;
}

}  // namespace kge
