#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kge/model.hpp"
#include "kge/sampler.hpp"
#include "kge/triples.hpp"

namespace kge {

struct TrainConfig {
    double eta = 0.1;      // initial learning rate
    double lambda = 0.0;   // L2 weight decay, applied lazily to touched rows
    std::uint32_t epochs = 1;
    std::uint32_t threads = 1;
    std::uint32_t alpha = 3;  // negatives per positive
    std::vector<CorruptMode> corrupt_modes = {CorruptMode::subject, CorruptMode::relation,
                                              CorruptMode::object};
    bool filter_false_negatives = false;
    std::uint64_t seed = 0;
    double adagrad_epsilon = 1e-8;

    void validate() const;
};

// Accumulated squared gradients, one cell per model parameter.
struct AdaGradState {
    ParamTable entity_g;
    ParamTable relation_g;
};

AdaGradState make_adagrad_state(const Model& model);

// -log(sigmoid(y * phi)), evaluated in overflow-safe form.
double logistic_loss(double phi, int y);

// d(loss)/d(phi) = -y * sigmoid(-y * phi).
double loss_grad_scale(double phi, int y);

// AdaGrad step on the three touched rows: g = loss_scale*dphi + lambda*theta,
// acc += g^2, theta -= eta * g / (sqrt(acc) + epsilon).
void sgd_update(Model& model, AdaGradState& state, const LabeledTriple& sample,
                const TripleGradient& grad, double loss_scale, const TrainConfig& cfg);

struct EpochStats {
    std::uint32_t epoch = 0;
    double mean_loss = 0;
    double seconds = 0;
};

// "epoch <i> loss <mean> secs <wall>"
std::string format_epoch_line(const EpochStats& stats);

// Called at every epoch boundary while workers are parked at a barrier, so
// the model may be read (or checkpointed) without races.
using EpochCallback = std::function<void(const EpochStats&, const Model&)>;

// Asynchronous (lock-free) multi-worker SGD over the labeled-triple stream.
// Workers share the parameter and AdaGrad tables without synchronization;
// cell-level races are tolerated. threads=1 is bit-reproducible per seed.
std::vector<EpochStats> train(Model& model, const TripleStore& data, const TrainConfig& cfg,
                              const FilterIndex* negative_filter = nullptr,
                              const EpochCallback& on_epoch = {});

}  // namespace kge
