#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nbse/dataset.hpp"
#include "nbse/errors.hpp"
#include "nbse/qc_ldpc.hpp"

namespace nbse {

enum class SyntheticKind { sbm_blobs, redundant_groups };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::sbm_blobs;
  int m = 200;
  int d = 60;
  int classes = 2;
  // redundant_groups only: d = groups * copies + distractors.
  int groups = 10;
  int copies = 4;
  double separation = 6.0;  // class-signal strength
  double noise = 0.25;      // per-copy noise (redundant_groups); unused for blobs
  std::uint64_t seed = 0;
};

struct SyntheticData {
  LabeledDataset data;
  // Per feature: prototype group id, or -1 for a pure-noise distractor.
  // Empty for sbm_blobs (every feature carries the cluster signal).
  std::vector<int> feature_group;
  SyntheticSpec spec;
};

/// sbm_blobs: `classes` Gaussian clusters in R^d, centres `separation`
/// apart, unit within-cluster spread, labels = cluster id (round-robin).
/// redundant_groups: `groups` prototype features (one class-dependent offset
/// per group) each replicated `copies` times with i.i.d. per-copy noise,
/// padded with pure-noise distractors up to d columns.
SyntheticData make_synthetic(const SyntheticSpec& spec);

/// Distinct planted groups among the selected features (distractors do not
/// count). Zero for sbm_blobs data.
int groups_covered(const SyntheticData& synth,
                   const std::vector<int>& selected);

/// Censored two-block partition: signed couplings on a fixed sparse
/// topology. Every edge carries weight coupling * y_u * y_v with the sign
/// flipped independently with probability flip_prob. Labels are the
/// protograph classes, so the topology itself is label-blind (circulant
/// lifts treat classes symmetrically).
struct PlantedPartition {
  SimilarityGraph graph;
  std::vector<int> y;  // block id in {0..classes-1}
  /// Model Nishimori temperature atanh(1 - 2*flip_prob) / coupling; the
  /// empirical root of a finite lift fluctuates around it.
  double beta_star = 0.0;
};

PlantedPartition make_planted_partition(const Protograph& proto,
                                        double coupling, double flip_prob,
                                        int girth_min = 6,
                                        int max_retries = 50);

/// Sidecar with the generator parameters and the per-feature group row.
void write_planted(std::ostream& out, const SyntheticData& synth);

}  // namespace nbse
