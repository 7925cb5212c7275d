#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nbse/ablation.hpp"
#include "nbse/baselines.hpp"
#include "nbse/classifier.hpp"
#include "nbse/dataset.hpp"
#include "nbse/fingerprint.hpp"

namespace nbse {

enum class SelectorKind { nbse, anova, random };

std::string selector_name(SelectorKind kind);
SelectorKind selector_from_name(const std::string& name);

/// What the classifier consumes: the retained raw columns X[:, I] or the
/// matching fingerprint columns Psi[:, I].
enum class Representation { original, spectral };

struct SplitIndices {
  std::vector<int> train;
  std::vector<int> test;
};

/// Per-class shuffle and cut; every class keeps at least one training
/// sample. Deterministic per seed.
SplitIndices stratified_split(const std::vector<int>& y, int n_classes,
                              double test_fraction, std::uint64_t seed);

LabeledDataset subset(const LabeledDataset& data,
                      const std::vector<int>& rows);

struct SweepOptions {
  std::vector<double> proportions = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double test_fraction = 0.2;
  Representation representation = Representation::original;
  TrainOptions train;
  FeatureAxisParams axis;     // drives the NBSE selector
  FingerprintParams fp;       // only used when representation == spectral
  FingerprintMode fp_mode = FingerprintMode::global;
};

struct SweepCell {
  SelectorKind method;
  double p = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
};

struct RetentionCurve {
  struct Aggregate {
    SelectorKind method;
    double p = 0.0;
    double mean = 0.0;
    double std_dev = 0.0;  // population std over seeds
  };
  std::vector<double> proportions;  // descending
  std::vector<SweepCell> cells;
  std::vector<Aggregate> aggregates;
};

/// For each method x proportion x seed: pick n = round(p*D) features, train
/// on the stratified train split, score on the held-out split. The NBSE
/// selector embeds the full matrix once (it never sees labels); ANOVA scores
/// come from the training split only; random selection draws per seed.
RetentionCurve retention_sweep(const LabeledDataset& data,
                               const std::vector<SelectorKind>& methods,
                               const SweepOptions& opt = {});

/// CSV "method,p,seed,accuracy", one row per sweep cell.
void write_sweep_cells_csv(std::ostream& out, const RetentionCurve& curve);
/// CSV "method,p,mean,std", one row per aggregate.
void write_sweep_aggregate_csv(std::ostream& out, const RetentionCurve& curve);

}  // namespace nbse
