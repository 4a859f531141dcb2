#include "ccpd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ccpd/rng.hpp"

namespace ccpd {

namespace {

std::pair<double, bool> ratio(uint64_t num, uint64_t den) {
  if (den == 0) return {0.0, true};
  return {static_cast<double>(num) / static_cast<double>(den), false};
}

ClassMetrics class_metrics(uint64_t tp, uint64_t fp, uint64_t fn) {
  ClassMetrics m;
  const auto [prec, pdeg] = ratio(tp, tp + fp);
  const auto [rec, rdeg] = ratio(tp, tp + fn);
  m.precision = prec;
  m.recall = rec;
  m.degenerate = pdeg || rdeg;
  if (m.precision + m.recall > 0.0)
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  else
    m.degenerate = true;
  return m;
}

}  // namespace

std::vector<char> test_membership(std::span<const Label> labels, double test_fraction,
                                  uint64_t seed, bool stratified) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("split: test_fraction must lie in (0, 1)");
  const size_t n = labels.size();
  std::vector<char> in_test(n, 0);
  Rng rng(seed);

  const auto mark = [&](std::vector<size_t>& pool) {
    for (size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.next_below(i)]);
    const auto take = static_cast<size_t>(
        std::llround(test_fraction * static_cast<double>(pool.size())));
    for (size_t i = 0; i < take; ++i) in_test[pool[i]] = 1;
  };

  if (stratified) {
    std::vector<size_t> pd, non_pd;
    for (size_t i = 0; i < n; ++i) {
      switch (labels[i]) {
        case Label::Pd: pd.push_back(i); break;
        case Label::NonPd: non_pd.push_back(i); break;
        default:
          throw std::invalid_argument("split: stratified split requires labeled records");
      }
    }
    if (pd.empty() || non_pd.empty())
      throw std::invalid_argument("split: stratified split requires both classes");
    mark(pd);
    mark(non_pd);
  } else {
    std::vector<size_t> all(n);
    for (size_t i = 0; i < n; ++i) all[i] = i;
    mark(all);
  }
  return in_test;
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction, uint64_t seed,
                                  bool stratified) {
  validate_dataset(dataset);
  std::vector<Label> labels;
  labels.reserve(dataset.size());
  for (const auto& rec : dataset.records) labels.push_back(rec.label);
  const auto in_test = test_membership(labels, test_fraction, seed, stratified);

  std::pair<Dataset, Dataset> out;
  for (size_t i = 0; i < dataset.size(); ++i)
    (in_test[i] ? out.second : out.first).records.push_back(dataset.records[i]);
  return out;
}

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual) {
  if (predicted.size() != actual.size())
    throw std::invalid_argument("confusion: prediction and label counts differ");
  ConfusionMatrix cm;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == Label::Unlabeled || actual[i] == Label::Unlabeled)
      throw std::invalid_argument("confusion: unlabeled entry at index " + std::to_string(i));
    const bool pred_pd = predicted[i] == Label::Pd;
    const bool is_pd = actual[i] == Label::Pd;
    if (pred_pd && is_pd) ++cm.tp;
    else if (pred_pd && !is_pd) ++cm.fp;
    else if (!pred_pd && is_pd) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("metrics: empty confusion matrix");
  Metrics m;
  m.pd = class_metrics(cm.tp, cm.fp, cm.fn);
  m.non_pd = class_metrics(cm.tn, cm.fn, cm.fp);
  m.macro.precision = 0.5 * (m.pd.precision + m.non_pd.precision);
  m.macro.recall = 0.5 * (m.pd.recall + m.non_pd.recall);
  m.macro.f1 = 0.5 * (m.pd.f1 + m.non_pd.f1);
  m.macro.degenerate = m.pd.degenerate || m.non_pd.degenerate;
  return m;
}

}  // namespace ccpd
