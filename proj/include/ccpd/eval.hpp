#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccpd/types.hpp"

namespace ccpd {

struct ConfusionMatrix {
  uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  uint64_t total() const { return tp + fp + tn + fn; }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // a zero denominator was mapped to 0
};

struct Metrics {
  ClassMetrics pd;
  ClassMetrics non_pd;
  ClassMetrics macro;  // unweighted mean of the two classes
};

struct Prediction {
  uint32_t id = 0;
  double probability = 0.0;
  Label predicted = Label::Unlabeled;
  Label actual = Label::Unlabeled;
};

struct EvalReport {
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<std::pair<std::string, std::string>> axis;  // experiment cell coordinates
  ConfusionMatrix confusion;
  Metrics metrics;
  std::vector<Prediction> predictions;
};

/// Deterministic train/test partition. Stratified splits preserve the class
/// ratio within one record per class. Record order inside each part follows
/// the input order.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double test_fraction, uint64_t seed,
                                  bool stratified);

/// The membership mask behind split(): mask[i] != 0 puts record i in the
/// test part. Exposed so feature-level flows share the exact partition.
std::vector<char> test_membership(std::span<const Label> labels, double test_fraction,
                                  uint64_t seed, bool stratified);

/// PD is the positive class. Inputs must be equal-length and labeled.
ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual);

/// Precision/recall/F1 per class plus macro averages; zero denominators give
/// 0 and set the degenerate flag.
Metrics metrics(const ConfusionMatrix& cm);

}  // namespace ccpd
