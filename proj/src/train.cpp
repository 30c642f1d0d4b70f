#include "mph/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mph/rng.hpp"

namespace mph {

std::vector<double> channel_divisors_from_train(const LabeledDataset& ds) {
  std::vector<double> divisors(4, 0.0);
  for (const auto& item : ds.items) {
    if (item.test) continue;
    const IntGrid* grids[4] = {&item.invariants.hilb, &item.invariants.xi0,
                               &item.invariants.xi1, &item.invariants.xi2};
    for (int c = 0; c < 4; ++c)
      for (int v : grids[c]->v)
        divisors[static_cast<std::size_t>(c)] =
            std::max(divisors[static_cast<std::size_t>(c)], std::log1p(static_cast<double>(v)));
  }
  for (double& d : divisors)
    if (d <= 0.0) d = 1.0;
  return divisors;
}

Tensor preprocess(const BifiltrationInvariants& inv, const std::vector<double>& divisors) {
  const int rows = inv.hilb.rows, cols = inv.hilb.cols;
  const IntGrid* grids[4] = {&inv.hilb, &inv.xi0, &inv.xi1, &inv.xi2};
  Tensor x({4, rows, cols});
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        x.at(c, i, j) = std::log1p(static_cast<double>(grids[c]->at(i, j))) /
                        divisors[static_cast<std::size_t>(c)];
  return x;
}

namespace {

std::string format_csv_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

int predict(const Network& net, const Tensor& x) {
  const Tensor logits = forward(net, x);
  int best = 0;
  for (int c = 1; c < logits.shape[0]; ++c)
    if (logits[c] > logits[best]) best = c;
  return best;
}

}  // namespace

TrainResult train_run(const TrainConfig& cfg) {
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
    throw std::invalid_argument("alpha must be in [0,1]");
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (cfg.batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("lr must be positive");

  LabeledDataset ds = load_dataset(cfg.data_dir);
  std::vector<int> train_idx, test_idx;
  for (int t = 0; t < static_cast<int>(ds.items.size()); ++t)
    (ds.items[static_cast<std::size_t>(t)].test ? test_idx : train_idx).push_back(t);
  if (train_idx.empty()) throw std::runtime_error("dataset has no training items");

  const int grid_h = ds.items[0].invariants.hilb.rows;
  const int grid_w = ds.items[0].invariants.hilb.cols;
  const int classes = static_cast<int>(ds.class_names.size());

  const std::vector<double> divisors = channel_divisors_from_train(ds);
  std::vector<Tensor> inputs;
  inputs.reserve(ds.items.size());
  for (const auto& item : ds.items) {
    if (item.invariants.hilb.rows != grid_h || item.invariants.hilb.cols != grid_w)
      throw std::runtime_error("dataset items have mixed grid shapes");
    inputs.push_back(preprocess(item.invariants, divisors));
  }

  Network net = build_network(cfg.variant, 4, classes, grid_h, grid_w, cfg.alpha,
                              mix_seed(cfg.seed, 0x1417, 0));
  AdamState adam = make_adam(net, cfg.lr);
  Gradients grads = make_gradients(net);
  Rng rng(mix_seed(cfg.seed, 0x7124, 0));

  std::ofstream csv;
  if (!cfg.curves_csv.empty()) {
    csv.open(cfg.curves_csv, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open '" + cfg.curves_csv + "' for writing");
    csv << "epoch,train_loss,train_acc,test_acc\n";
  }

  std::vector<int> order = train_idx;
  TrainResult result;
  const auto params = net.params();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const std::size_t j = i + rng.below(order.size() - i);
      std::swap(order[i], order[j]);
    }

    double loss_sum = 0.0;
    int correct = 0;
    int step_in_epoch = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
      zero_gradients(grads);
      ++step_in_epoch;
      for (std::size_t s = start; s < stop; ++s) {
        const int idx = order[s];
        const auto& item = ds.items[static_cast<std::size_t>(idx)];
        ForwardTrace trace;
        Tensor logits;
        SoftmaxCrossEntropy sce;
        try {
          logits = forward(net, inputs[static_cast<std::size_t>(idx)], &trace);
          sce = softmax_cross_entropy(logits, item.label);
        } catch (const std::runtime_error&) {
          throw TrainDiverged(epoch, step_in_epoch);
        }
        if (!std::isfinite(sce.loss)) throw TrainDiverged(epoch, step_in_epoch);
        loss_sum += sce.loss;
        int best = 0;
        for (int c = 1; c < classes; ++c)
          if (logits[c] > logits[best]) best = c;
        if (best == item.label) ++correct;
        backward(net, trace, sce.dlogits, grads);
        if (cfg.verbose)
          std::cerr << "epoch " << epoch << " step " << step_in_epoch << " sample " << idx
                    << " loss " << sce.loss << '\n';
      }
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      for (auto& g : grads.tensors)
        for (double& v : g.data) v *= inv_batch;
      adam_step(params, grads, adam);
    }

    const double train_loss = loss_sum / static_cast<double>(order.size());
    const double train_acc = static_cast<double>(correct) / static_cast<double>(order.size());
    int test_correct = 0;
    for (int idx : test_idx)
      if (predict(net, inputs[static_cast<std::size_t>(idx)]) ==
          ds.items[static_cast<std::size_t>(idx)].label)
        ++test_correct;
    const double test_acc =
        test_idx.empty() ? 0.0
                         : static_cast<double>(test_correct) / static_cast<double>(test_idx.size());

    if (csv.is_open())
      csv << epoch << ',' << format_csv_value(train_loss) << ',' << format_csv_value(train_acc)
          << ',' << format_csv_value(test_acc) << '\n';

    result.epochs_run = epoch;
    result.final_train_loss = train_loss;
    result.final_train_acc = train_acc;
    result.final_test_acc = test_acc;
  }

  if (csv.is_open() && !csv) throw std::runtime_error("CSV write failed");

  if (!cfg.checkpoint_path.empty()) {
    Checkpoint ck;
    ck.net = std::move(net);
    ck.channel_divisors = divisors;
    ck.adam = std::move(adam);
    std::ostringstream rs;
    rs << rng;
    ck.rng_state = rs.str();
    save_checkpoint(cfg.checkpoint_path, ck);
  }
  return result;
}

EvalResult evaluate(const Checkpoint& ck, const LabeledDataset& ds) {
  EvalResult r;
  r.class_names = ds.class_names;
  const int classes = static_cast<int>(ds.class_names.size());
  if (ck.net.classes != classes)
    throw std::runtime_error("checkpoint class count does not match dataset");
  r.confusion = IntGrid(classes, classes);
  int correct = 0;
  for (const auto& item : ds.items) {
    if (!item.test) continue;
    if (item.invariants.hilb.rows != ck.net.grid_h || item.invariants.hilb.cols != ck.net.grid_w)
      throw std::runtime_error("checkpoint grid shape does not match dataset");
    const Tensor x = preprocess(item.invariants, ck.channel_divisors);
    const int pred = predict(ck.net, x);
    r.confusion.at(item.label, pred) += 1;
    if (pred == item.label) ++correct;
    ++r.items;
  }
  if (r.items == 0) throw std::runtime_error("no test items");
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.items);
  return r;
}

}  // namespace mph
