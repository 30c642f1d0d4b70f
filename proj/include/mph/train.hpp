#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mph/checkpoint.hpp"
#include "mph/datasets.hpp"
#include "mph/network.hpp"

namespace mph {

struct TrainConfig {
  std::string data_dir;
  Variant variant = Variant::lattice;
  double alpha = 0.5;
  double lr = 2e-4;
  int epochs = 300;
  int batch = 16;
  std::uint64_t seed = 0;
  std::string curves_csv;       // written when non-empty
  std::string checkpoint_path;  // written when non-empty
  bool verbose = false;         // per-step loss lines to stderr
};

struct TrainResult {
  int epochs_run = 0;
  double final_train_loss = 0.0;
  double final_train_acc = 0.0;
  double final_test_acc = 0.0;
};

// Raised on NaN/Inf loss so the CLI can exit with its dedicated code.
struct TrainDiverged : std::runtime_error {
  int epoch, step;
  TrainDiverged(int e, int s)
      : std::runtime_error("NaN loss at epoch " + std::to_string(e) + " step " +
                           std::to_string(s)),
        epoch(e),
        step(s) {}
};

// Each input channel is mapped through log(1+v) and divided by the per-channel
// maximum over the training split (divisor 1 for all-zero channels).
std::vector<double> channel_divisors_from_train(const LabeledDataset& ds);
Tensor preprocess(const BifiltrationInvariants& inv, const std::vector<double>& divisors);

// Deterministic minibatch training: per-epoch shuffle from the seeded
// generator, gradients accumulated in sample order, one Adam step per batch.
// CSV rows are `epoch,train_loss,train_acc,test_acc`.
TrainResult train_run(const TrainConfig& cfg);

struct EvalResult {
  double accuracy = 0.0;
  int items = 0;
  IntGrid confusion;  // rows: true class, cols: predicted
  std::vector<std::string> class_names;
};

EvalResult evaluate(const Checkpoint& ck, const LabeledDataset& ds);

}  // namespace mph
