#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "uwbfp/fingerprint.hpp"
#include "uwbfp/geometry.hpp"

namespace uwbfp {

struct TrainingRow {
  RangeTriple features;
  CellLabel label;
};

using TrainingSet = std::vector<TrainingRow>;

/// One row per fingerprint, plus `augment_copies` noisy copies of each with
/// independent N(0, sigma²) added to every component.
TrainingSet training_set_from_db(const FingerprintDB& db, std::size_t augment_copies = 0,
                                 double sigma = 0.0, std::uint64_t seed = 0);

/// Sparse distribution over labels; only labels with nonzero mass are stored,
/// sorted ascending.
class ClassProbabilities {
 public:
  using Entry = std::pair<CellLabel, double>;

  ClassProbabilities() = default;
  /// Normalizes non-negative weights; duplicate labels are merged.
  static ClassProbabilities from_weights(std::vector<Entry> weights);

  double mass(CellLabel label) const noexcept;
  double total() const noexcept;
  /// Label of largest mass; ties go to the lower label.
  CellLabel argmax() const;

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const ClassProbabilities&, const ClassProbabilities&) = default;

 private:
  std::vector<Entry> entries_;
};

/// Exact k-nearest-neighbour search in raw fingerprint space (Euclidean, mm).
class KnnClassifier {
 public:
  /// Throws EmptyTrainingSet, or KOutOfRange unless 1 <= k <= |train|.
  static KnnClassifier train(TrainingSet train, std::size_t k);

  /// Uniform 1/k mass per neighbour, accumulated by label. Distance ties are
  /// resolved toward the lower label.
  ClassProbabilities predict_proba(const RangeTriple& query) const;

  std::size_t k() const noexcept { return k_; }

 private:
  KnnClassifier(TrainingSet rows, std::size_t k) : rows_(std::move(rows)), k_(k) {}

  TrainingSet rows_;
  std::size_t k_;
};

struct TreeParams {
  /// 0 = unlimited.
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;
};

/// Axis-aligned CART classifier split on Gini impurity.
class TreeClassifier {
 public:
  static TreeClassifier train(const TrainingSet& train, const TreeParams& params = {});

  /// Queries with feature <= threshold go left.
  ClassProbabilities predict_proba(const RangeTriple& query) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t depth() const noexcept;

 private:
  friend class TreeBuilder;

  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    ClassProbabilities leaf;
  };

  std::vector<Node> nodes_;
};

struct ForestParams {
  std::size_t n_trees = 100;
  /// Features examined per split, in [1, 3].
  std::size_t features_per_split = 1;
  bool bootstrap = true;
  TreeParams tree;
  std::uint64_t seed = 0;
};

/// Bagged trees with per-split random feature subsets. Member i draws from
/// derive_seed(seed, {i}), so the forest does not depend on `threads`.
class ForestClassifier {
 public:
  static ForestClassifier train(const TrainingSet& train, const ForestParams& params,
                                unsigned threads = 1);

  /// Mean of the member trees' distributions.
  ClassProbabilities predict_proba(const RangeTriple& query) const;

  const std::vector<TreeClassifier>& members() const noexcept { return trees_; }

 private:
  std::vector<TreeClassifier> trees_;
};

/// Relative weights of the KNN and tree votes.
struct VoteWeights {
  double knn = 3.0;
  double tree = 1.0;

  /// Throws InvalidArgument unless both are finite, >= 0, and not both zero.
  void validate() const;
};

/// argmax over labels of w_knn * p_knn + w_tree * p_tree, lower label on ties.
/// Weights are normalized to sum to one first, so scaling them by any positive
/// factor selects the same label.
CellLabel soft_vote(const ClassProbabilities& p_knn, const ClassProbabilities& p_tree,
                    const VoteWeights& weights);

/// Lower-left vertex of the predicted cell.
inline PointMM localize(CellLabel label, const GridSpec& spec) { return cell_vertex(spec, label); }

}  // namespace uwbfp
