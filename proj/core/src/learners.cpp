#include "uwbfp/learners.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include "uwbfp/error.hpp"
#include "uwbfp/parallel.hpp"
#include "uwbfp/random.hpp"

namespace uwbfp {

TrainingSet training_set_from_db(const FingerprintDB& db, std::size_t augment_copies, double sigma,
                                 std::uint64_t seed) {
  TrainingSet rows;
  rows.reserve(db.size() * (1 + augment_copies));
  for (std::uint32_t i = 0; i < db.size(); ++i) {
    rows.push_back({db.entries()[i], {i}});
  }
  for (std::size_t copy = 0; copy < augment_copies; ++copy) {
    for (std::uint32_t i = 0; i < db.size(); ++i) {
      RandomStream rng(derive_seed(seed, {i, copy}));
      RangeTriple f = db.entries()[i];
      for (Anchor k : kAnchors) {
        f[k] += sigma * rng.normal();
      }
      rows.push_back({f, {i}});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// ClassProbabilities

ClassProbabilities ClassProbabilities::from_weights(std::vector<Entry> weights) {
  std::sort(weights.begin(), weights.end(),
            [](const Entry& l, const Entry& r) { return l.first < r.first; });
  ClassProbabilities p;
  double total = 0.0;
  for (const auto& [label, w] : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(Errc::InvalidArgument, "class weights must be finite and >= 0");
    }
    if (w == 0.0) {
      continue;
    }
    if (!p.entries_.empty() && p.entries_.back().first == label) {
      p.entries_.back().second += w;
    } else {
      p.entries_.emplace_back(label, w);
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw Error(Errc::InvalidArgument, "class weights sum to zero");
  }
  for (auto& e : p.entries_) {
    e.second /= total;
  }
  return p;
}

double ClassProbabilities::mass(CellLabel label) const noexcept {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), label,
                                   [](const Entry& e, CellLabel l) { return e.first < l; });
  return it != entries_.end() && it->first == label ? it->second : 0.0;
}

double ClassProbabilities::total() const noexcept {
  double t = 0.0;
  for (const auto& e : entries_) {
    t += e.second;
  }
  return t;
}

CellLabel ClassProbabilities::argmax() const {
  if (entries_.empty()) {
    throw Error(Errc::InvalidArgument, "argmax of an empty distribution");
  }
  const Entry* best = &entries_.front();
  for (const auto& e : entries_) {
    if (e.second > best->second) {
      best = &e;
    }
  }
  return best->first;
}

// ---------------------------------------------------------------------------
// KNN

KnnClassifier KnnClassifier::train(TrainingSet train, std::size_t k) {
  if (train.empty()) {
    throw Error(Errc::EmptyTrainingSet, "KNN needs at least one training row");
  }
  if (k < 1 || k > train.size()) {
    throw Error(Errc::KOutOfRange, "k = " + std::to_string(k) + " with " +
                                       std::to_string(train.size()) + " training rows");
  }
  return KnnClassifier(std::move(train), k);
}

namespace {

double squared_distance(const RangeTriple& p, const RangeTriple& q) noexcept {
  const double da = p.d_a - q.d_a;
  const double db = p.d_b - q.d_b;
  const double dc = p.d_c - q.d_c;
  return da * da + db * db + dc * dc;
}

struct Neighbour {
  double dist2;
  CellLabel label;

  bool operator<(const Neighbour& o) const noexcept {
    return dist2 < o.dist2 || (dist2 == o.dist2 && label < o.label);
  }
};

}  // namespace

ClassProbabilities KnnClassifier::predict_proba(const RangeTriple& query) const {
  if (k_ == 1) {
    Neighbour best{squared_distance(query, rows_.front().features), rows_.front().label};
    for (const auto& row : rows_) {
      const Neighbour cand{squared_distance(query, row.features), row.label};
      if (cand < best) {
        best = cand;
      }
    }
    return ClassProbabilities::from_weights({{best.label, 1.0}});
  }

  std::vector<Neighbour> all;
  all.reserve(rows_.size());
  for (const auto& row : rows_) {
    all.push_back({squared_distance(query, row.features), row.label});
  }
  const auto kth = all.begin() + static_cast<std::ptrdiff_t>(k_);
  std::partial_sort(all.begin(), kth, all.end());

  std::vector<ClassProbabilities::Entry> votes;
  votes.reserve(k_);
  for (auto it = all.begin(); it != kth; ++it) {
    votes.emplace_back(it->label, 1.0);
  }
  return ClassProbabilities::from_weights(std::move(votes));
}

// ---------------------------------------------------------------------------
// Decision tree

class TreeBuilder {
 public:
  TreeBuilder(const TrainingSet& rows, const TreeParams& params, std::size_t features_per_split,
              RandomStream* rng)
      : rows_(rows), params_(params), features_per_split_(features_per_split), rng_(rng) {
    if (params_.min_leaf < 1) {
      throw Error(Errc::InvalidArgument, "min_leaf must be at least 1");
    }
    std::vector<CellLabel> labels;
    labels.reserve(rows.size());
    for (const auto& r : rows) {
      labels.push_back(r.label);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    classes_ = std::move(labels);
    class_of_.reserve(rows.size());
    for (const auto& r : rows) {
      class_of_.push_back(static_cast<std::uint32_t>(
          std::lower_bound(classes_.begin(), classes_.end(), r.label) - classes_.begin()));
    }
    left_counts_.assign(classes_.size(), 0);
    right_counts_.assign(classes_.size(), 0);
  }

  /// `sample` holds row indices; repeats are allowed (bootstrap).
  TreeClassifier build(const std::vector<std::uint32_t>& sample) {
    // One list per feature, ordered by (value, row); splits partition them stably.
    Lists lists;
    for (int f = 0; f < 3; ++f) {
      lists[f] = sample;
      std::sort(lists[f].begin(), lists[f].end(), [&](std::uint32_t l, std::uint32_t r) {
        const double vl = feature(rows_[l].features, f), vr = feature(rows_[r].features, f);
        return vl < vr || (vl == vr && l < r);
      });
    }
    TreeClassifier tree;
    tree_ = &tree;
    grow(lists, 0);
    tree_ = nullptr;
    return tree;
  }

 private:
  using Lists = std::array<std::vector<std::uint32_t>, 3>;

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;
    std::size_t left_size = 0;
  };

  static double feature(const RangeTriple& r, int f) noexcept {
    return f == 0 ? r.d_a : (f == 1 ? r.d_b : r.d_c);
  }

  std::uint32_t grow(Lists& lists, std::size_t depth) {
    const auto id = static_cast<std::uint32_t>(tree_->nodes_.size());
    tree_->nodes_.emplace_back();
    const std::vector<std::uint32_t>& sample = lists[0];

    std::size_t distinct = 0;
    for (std::uint32_t i : sample) {
      if (right_counts_[class_of_[i]]++ == 0) {
        ++distinct;
      }
    }
    const bool depth_limited = params_.max_depth != 0 && depth >= params_.max_depth;
    std::optional<Split> split;
    if (distinct > 1 && !depth_limited && sample.size() >= 2 * params_.min_leaf) {
      split = best_split(lists);
    }

    if (!split) {
      std::vector<ClassProbabilities::Entry> freq;
      freq.reserve(distinct);
      for (std::uint32_t i : sample) {
        auto& c = right_counts_[class_of_[i]];
        if (c != 0) {
          freq.emplace_back(classes_[class_of_[i]], static_cast<double>(c));
          c = 0;
        }
      }
      tree_->nodes_[id].leaf = ClassProbabilities::from_weights(std::move(freq));
      return id;
    }
    for (std::uint32_t i : sample) {
      right_counts_[class_of_[i]] = 0;
    }

    Lists left, right;
    for (int f = 0; f < 3; ++f) {
      left[f].reserve(split->left_size);
      right[f].reserve(lists[f].size() - split->left_size);
      for (std::uint32_t i : lists[f]) {
        (feature(rows_[i].features, split->feature) <= split->threshold ? left[f] : right[f]).push_back(i);
      }
      lists[f].clear();
      lists[f].shrink_to_fit();
    }

    const std::uint32_t l = grow(left, depth + 1);
    const std::uint32_t r = grow(right, depth + 1);
    auto& node = tree_->nodes_[id];
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  // Expects right_counts_ to hold the class counts of the node; leaves them intact.
  std::optional<Split> best_split(const Lists& lists) {
    std::array<int, 3> order{0, 1, 2};
    if (features_per_split_ < 3 && rng_ != nullptr) {
      for (int i = 2; i > 0; --i) {
        std::swap(order[i], order[rng_->below(static_cast<std::uint64_t>(i) + 1)]);
      }
    }

    double sumsq_total = 0.0;
    for (std::uint32_t i : lists[0]) {
      // Each class contributes count² once; summing per row adds count per row.
      sumsq_total += static_cast<double>(right_counts_[class_of_[i]]);
    }

    std::optional<Split> best;
    std::size_t examined = 0;
    const std::size_t n = lists[0].size();
    for (int f : order) {
      if (examined >= features_per_split_) {
        break;
      }
      const std::vector<std::uint32_t>& sorted = lists[f];
      if (feature(rows_[sorted.front()].features, f) == feature(rows_[sorted.back()].features, f)) {
        continue;  // constant feature; does not count toward the budget
      }
      ++examined;

      double sumsq_left = 0.0;
      double sumsq_right = sumsq_total;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        const std::uint32_t c = class_of_[sorted[j]];
        const double cl = left_counts_[c]++;
        const double cr = right_counts_[c]--;
        sumsq_left += 2.0 * cl + 1.0;
        sumsq_right -= 2.0 * cr - 1.0;

        const double v = feature(rows_[sorted[j]].features, f);
        const double next = feature(rows_[sorted[j + 1]].features, f);
        const std::size_t nl = j + 1;
        const std::size_t nr = n - nl;
        if (v == next || nl < params_.min_leaf || nr < params_.min_leaf) {
          continue;
        }
        const double score = sumsq_left / static_cast<double>(nl) + sumsq_right / static_cast<double>(nr);
        double threshold = v + 0.5 * (next - v);
        if (!(threshold < next)) {
          threshold = v;
        }
        const bool better = !best || score > best->score ||
                            (score == best->score && (f < best->feature ||
                                                      (f == best->feature && threshold < best->threshold)));
        if (better) {
          best = Split{f, threshold, score, nl};
        }
      }
      // Restore counts for the next feature.
      for (std::size_t j = 0; j + 1 < n; ++j) {
        const std::uint32_t c = class_of_[sorted[j]];
        --left_counts_[c];
        ++right_counts_[c];
      }
    }
    return best;
  }

  const TrainingSet& rows_;
  TreeParams params_;
  std::size_t features_per_split_;
  RandomStream* rng_;
  TreeClassifier* tree_ = nullptr;

  std::vector<CellLabel> classes_;
  std::vector<std::uint32_t> class_of_;
  std::vector<std::uint32_t> left_counts_;
  std::vector<std::uint32_t> right_counts_;
};

namespace {

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  return idx;
}

}  // namespace

TreeClassifier TreeClassifier::train(const TrainingSet& train, const TreeParams& params) {
  if (train.empty()) {
    throw Error(Errc::EmptyTrainingSet, "decision tree needs at least one training row");
  }
  return TreeBuilder(train, params, 3, nullptr).build(all_rows(train.size()));
}

ClassProbabilities TreeClassifier::predict_proba(const RangeTriple& query) const {
  std::uint32_t id = 0;
  while (nodes_[id].feature >= 0) {
    const Node& n = nodes_[id];
    const double v = n.feature == 0 ? query.d_a : (n.feature == 1 ? query.d_b : query.d_c);
    id = v <= n.threshold ? n.left : n.right;
  }
  return nodes_[id].leaf;
}

std::size_t TreeClassifier::depth() const noexcept {
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  // Children always have larger ids than their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes_[i].feature >= 0) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return deepest;
}

// ---------------------------------------------------------------------------
// Forest

ForestClassifier ForestClassifier::train(const TrainingSet& train, const ForestParams& params,
                                         unsigned threads) {
  if (train.empty()) {
    throw Error(Errc::EmptyTrainingSet, "random forest needs at least one training row");
  }
  if (params.n_trees < 1) {
    throw Error(Errc::InvalidArgument, "forest needs at least one tree");
  }
  if (params.features_per_split < 1 || params.features_per_split > 3) {
    throw Error(Errc::InvalidArgument, "features_per_split must lie in [1, 3]");
  }

  ForestClassifier forest;
  forest.trees_.resize(params.n_trees);
  parallel_for(params.n_trees, threads, [&](std::size_t t) {
    RandomStream rng(derive_seed(params.seed, {t}));
    std::vector<std::uint32_t> sample;
    if (params.bootstrap) {
      sample.resize(train.size());
      for (auto& s : sample) {
        s = static_cast<std::uint32_t>(rng.below(train.size()));
      }
    } else {
      sample = all_rows(train.size());
    }
    forest.trees_[t] =
        TreeBuilder(train, params.tree, params.features_per_split, &rng).build(std::move(sample));
  });
  return forest;
}

ClassProbabilities ForestClassifier::predict_proba(const RangeTriple& query) const {
  std::map<CellLabel, double> sum;
  for (const auto& tree : trees_) {
    const ClassProbabilities member = tree.predict_proba(query);
    for (const auto& [label, p] : member.entries()) {
      sum[label] += p;
    }
  }
  std::vector<ClassProbabilities::Entry> weights(sum.begin(), sum.end());
  return ClassProbabilities::from_weights(std::move(weights));
}

// ---------------------------------------------------------------------------
// Soft voting

void VoteWeights::validate() const {
  if (!std::isfinite(knn) || !std::isfinite(tree) || knn < 0.0 || tree < 0.0 ||
      !(knn + tree > 0.0)) {
    throw Error(Errc::InvalidArgument, "vote weights must be >= 0 with a positive sum");
  }
}

CellLabel soft_vote(const ClassProbabilities& p_knn, const ClassProbabilities& p_tree,
                    const VoteWeights& weights) {
  weights.validate();
  const double total = weights.knn + weights.tree;
  const double wk = weights.knn / total;
  const double wt = weights.tree / total;

  const auto& a = p_knn.entries();
  const auto& b = p_tree.entries();
  std::optional<std::pair<CellLabel, double>> best;
  auto offer = [&](CellLabel label, double score) {
    if (!best || score > best->second) {
      best.emplace(label, score);
    }
  };
  // Merge walk in ascending label order so ties keep the lower label.
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      offer(a[i].first, wk * a[i].second);
      ++i;
    } else if (i == a.size() || b[j].first < a[i].first) {
      offer(b[j].first, wt * b[j].second);
      ++j;
    } else {
      offer(a[i].first, wk * a[i].second + wt * b[j].second);
      ++i;
      ++j;
    }
  }
  if (!best) {
    throw Error(Errc::InvalidArgument, "soft vote over two empty distributions");
  }
  return best->first;
}

}  // namespace uwbfp
