#include "capsim/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "capsim/errors.hpp"
#include "capsim/rng.hpp"

namespace capsim::classify {

std::string_view to_string(FeatureMask mask) {
  switch (mask) {
    case FeatureMask::FrontOnly: return "front";
    case FeatureMask::RearOnly: return "rear";
    case FeatureMask::Fused: return "fused";
  }
  return "?";
}

std::optional<FeatureMask> parse_feature_mask(std::string_view text) {
  if (text == "front") return FeatureMask::FrontOnly;
  if (text == "rear") return FeatureMask::RearOnly;
  if (text == "fused") return FeatureMask::Fused;
  return std::nullopt;
}

std::array<double, 2> Dataset::point(std::size_t i) const {
  const sampler::FeatureVector& fv = vectors[i];
  switch (mask) {
    case FeatureMask::FrontOnly: return {fv.r_front_vps, 0.0};
    case FeatureMask::RearOnly: return {fv.r_rear_vps, 0.0};
    case FeatureMask::Fused: return {fv.r_rear_vps, fv.r_front_vps};
  }
  return {0.0, 0.0};
}

int Dataset::class_count() const {
  std::array<bool, kNumActivityLabels> present{};
  for (const auto& fv : vectors) present[label_index(fv.label)] = true;
  return static_cast<int>(std::count(present.begin(), present.end(), true));
}

void Dataset::validate_for_training() const {
  if (vectors.empty()) throw ConfigError("Dataset: empty");
  if (class_count() < 2) throw ConfigError("Dataset: training needs at least two classes");
}

std::string_view ClassifierSpec::name() const {
  struct Visitor {
    std::string_view operator()(const KnnParams&) const { return "knn"; }
    std::string_view operator()(const NaiveBayesKdeParams&) const { return "naive_bayes_kde"; }
    std::string_view operator()(const DecisionTreeParams&) const { return "decision_tree"; }
    std::string_view operator()(const RandomForestParams&) const { return "random_forest"; }
  };
  return std::visit(Visitor{}, kind);
}

namespace {

ActivityLabel argmax_label(const std::array<double, kNumActivityLabels>& scores) {
  int best = 0;
  for (int i = 1; i < kNumActivityLabels; ++i)
    if (scores[i] > scores[best]) best = i;  // ties keep the lower label
  return static_cast<ActivityLabel>(best);
}

ActivityLabel majority_label(const std::array<std::uint64_t, kNumActivityLabels>& counts) {
  int best = 0;
  for (int i = 1; i < kNumActivityLabels; ++i)
    if (counts[i] > counts[best]) best = i;
  return static_cast<ActivityLabel>(best);
}

// ---- k-nearest neighbors ----

struct KnnModel {
  int k = 3;
  std::vector<std::array<double, 2>> points;
  std::vector<ActivityLabel> labels;
  int dim = 2;
};

ActivityLabel predict_knn(const KnnModel& m, std::span<const double> x) {
  // Neighbor order is fully deterministic: sort key is (distance, index).
  std::vector<std::pair<double, std::size_t>> dist(m.points.size());
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    double d = 0.0;
    for (int f = 0; f < m.dim; ++f) {
      const double delta = m.points[i][f] - x[f];
      d += delta * delta;
    }
    dist[i] = {d, i};
  }
  const auto k = std::min<std::size_t>(m.k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::array<std::uint64_t, kNumActivityLabels> votes{};
  for (std::size_t i = 0; i < k; ++i) ++votes[label_index(m.labels[dist[i].second])];
  return majority_label(votes);
}

// ---- naive Bayes with per-class gaussian kernel density estimates ----

struct ClassKde {
  ActivityLabel label;
  double log_prior;
  std::array<std::vector<double>, 2> values;     // per feature
  std::array<double, 2> bandwidth{1.0, 1.0};
};

struct NbModel {
  std::vector<ClassKde> classes;
  int dim = 2;
};

double silverman_bandwidth(std::vector<double> values) {
  const auto n = values.size();
  if (n < 2) return 0.0;
  std::sort(values.begin(), values.end());
  if (values.front() == values.back()) return 0.0;  // zero spread, no rounding dust
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1));
  const double iqr = values[(3 * (n - 1)) / 4] - values[(n - 1) / 4];
  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

double log_kde_density(const std::vector<double>& values, double h, double x) {
  // log of the average kernel value, evaluated stably in log space
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double z = (x - values[i]) / h;
    terms[i] = -0.5 * z * z;
    max_term = std::max(max_term, terms[i]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  constexpr double kLogSqrt2Pi = 0.9189385332046727;
  return max_term + std::log(sum) - std::log(static_cast<double>(values.size())) -
         std::log(h) - kLogSqrt2Pi;
}

NbModel train_nb(const Dataset& data) {
  NbModel m;
  m.dim = data.dim();
  std::array<std::vector<std::size_t>, kNumActivityLabels> by_class;
  for (std::size_t i = 0; i < data.size(); ++i)
    by_class[label_index(data.label(i))].push_back(i);

  for (int c = 0; c < kNumActivityLabels; ++c) {
    if (by_class[c].empty()) continue;
    ClassKde kde;
    kde.label = static_cast<ActivityLabel>(c);
    kde.log_prior = std::log(static_cast<double>(by_class[c].size()) /
                             static_cast<double>(data.size()));
    for (int f = 0; f < m.dim; ++f) {
      auto& vals = kde.values[f];
      vals.reserve(by_class[c].size());
      for (std::size_t i : by_class[c]) vals.push_back(data.point(i)[f]);
      double h = silverman_bandwidth(vals);
      // zero-variance classes (e.g. the all-zero stationary cluster)
      // degenerate to a near-delta kernel
      if (!(h > 0.0)) h = 1e-9;
      kde.bandwidth[f] = h;
    }
    m.classes.push_back(std::move(kde));
  }
  return m;
}

ActivityLabel predict_nb(const NbModel& m, std::span<const double> x) {
  std::array<double, kNumActivityLabels> scores;
  scores.fill(-std::numeric_limits<double>::infinity());
  for (const ClassKde& kde : m.classes) {
    double score = kde.log_prior;
    for (int f = 0; f < m.dim; ++f)
      score += log_kde_density(kde.values[f], kde.bandwidth[f], x[f]);
    scores[label_index(kde.label)] = score;
  }
  return argmax_label(scores);
}

// ---- binary-threshold entropy tree, shared by the forest ----

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  ActivityLabel leaf = ActivityLabel::Walk;
};

struct TreeModel {
  std::vector<TreeNode> nodes;
};

double entropy(const std::array<std::uint64_t, kNumActivityLabels>& counts, std::uint64_t total) {
  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

struct TreeBuilder {
  const Dataset& data;
  int min_leaf;
  int features_per_split;  // == dim means consider all features
  Rng* rng;                // only consulted when subsetting features
  std::vector<TreeNode> nodes;

  int build(std::vector<std::size_t>& indices) {
    std::array<std::uint64_t, kNumActivityLabels> counts{};
    for (std::size_t i : indices) ++counts[label_index(data.label(i))];
    const auto total = static_cast<std::uint64_t>(indices.size());
    const double parent_entropy = entropy(counts, total);

    const int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[node_id].leaf = majority_label(counts);
    if (parent_entropy == 0.0 || indices.size() < 2 * static_cast<std::size_t>(min_leaf))
      return node_id;

    const int dim = data.dim();
    std::array<int, 2> candidate_features{0, 1};
    int n_candidates = dim;
    if (features_per_split < dim) {
      candidate_features[0] = static_cast<int>(rng->uniform_int(dim));
      n_candidates = features_per_split;
    }

    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> sorted(indices);
    for (int fi = 0; fi < n_candidates; ++fi) {
      const int f = candidate_features[fi];
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        const double va = data.point(a)[f];
        const double vb = data.point(b)[f];
        return va != vb ? va < vb : a < b;
      });
      std::array<std::uint64_t, kNumActivityLabels> left{};
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        ++left[label_index(data.label(sorted[i]))];
        const double va = data.point(sorted[i])[f];
        const double vb = data.point(sorted[i + 1])[f];
        if (vb <= va) continue;
        const auto n_left = static_cast<std::uint64_t>(i + 1);
        const auto n_right = total - n_left;
        if (n_left < static_cast<std::uint64_t>(min_leaf) ||
            n_right < static_cast<std::uint64_t>(min_leaf))
          continue;
        const double threshold = va + (vb - va) / 2.0;
        if (!(threshold > va) || threshold > vb) continue;  // adjacent doubles
        std::array<std::uint64_t, kNumActivityLabels> right{};
        for (int c = 0; c < kNumActivityLabels; ++c) right[c] = counts[c] - left[c];
        const double split_entropy =
            (static_cast<double>(n_left) * entropy(left, n_left) +
             static_cast<double>(n_right) * entropy(right, n_right)) /
            static_cast<double>(total);
        const double gain = parent_entropy - split_entropy;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) return node_id;

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : indices) {
      (data.point(i)[best_feature] < best_threshold ? left_idx : right_idx).push_back(i);
    }
    nodes[node_id].feature = best_feature;
    nodes[node_id].threshold = best_threshold;
    const int left_child = build(left_idx);
    nodes[node_id].left = left_child;
    const int right_child = build(right_idx);
    nodes[node_id].right = right_child;
    return node_id;
  }
};

TreeModel build_tree(const Dataset& data, std::vector<std::size_t> indices, int min_leaf,
                     int features_per_split, Rng* rng) {
  TreeBuilder builder{data, min_leaf, features_per_split, rng, {}};
  builder.build(indices);
  return TreeModel{std::move(builder.nodes)};
}

ActivityLabel predict_tree(const TreeModel& m, std::span<const double> x) {
  int node = 0;
  while (m.nodes[node].feature >= 0) {
    const TreeNode& n = m.nodes[node];
    node = x[n.feature] < n.threshold ? n.left : n.right;
  }
  return m.nodes[node].leaf;
}

struct ForestModel {
  std::vector<TreeModel> trees;
};

ForestModel train_forest(const Dataset& data, const RandomForestParams& params,
                         std::uint64_t seed) {
  if (params.n_trees < 1) throw ConfigError("RandomForest: n_trees must be >= 1");
  const int dim = data.dim();
  int mtry = params.features_per_split;
  if (mtry <= 0) mtry = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(dim))));
  mtry = std::min(mtry, dim);

  ForestModel forest;
  forest.trees.reserve(params.n_trees);
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> indices(data.size());
    if (params.bootstrap) {
      for (auto& i : indices) i = rng.uniform_int(data.size());
    } else {
      std::iota(indices.begin(), indices.end(), std::size_t{0});
    }
    forest.trees.push_back(build_tree(data, std::move(indices), params.min_leaf, mtry, &rng));
  }
  return forest;
}

ActivityLabel predict_forest(const ForestModel& m, std::span<const double> x) {
  std::array<std::uint64_t, kNumActivityLabels> votes{};
  for (const TreeModel& tree : m.trees) ++votes[label_index(predict_tree(tree, x))];
  return majority_label(votes);
}

}  // namespace

struct Model::Impl {
  std::variant<KnnModel, NbModel, TreeModel, ForestModel> model;
};

ActivityLabel Model::predict(std::span<const double> features) const {
  if (static_cast<int>(features.size()) != dim_)
    throw std::invalid_argument("Model::predict: feature dimensionality mismatch");
  struct Visitor {
    std::span<const double> x;
    ActivityLabel operator()(const KnnModel& m) const { return predict_knn(m, x); }
    ActivityLabel operator()(const NbModel& m) const { return predict_nb(m, x); }
    ActivityLabel operator()(const TreeModel& m) const { return predict_tree(m, x); }
    ActivityLabel operator()(const ForestModel& m) const { return predict_forest(m, x); }
  };
  return std::visit(Visitor{features}, impl_->model);
}

ActivityLabel Model::predict(const sampler::FeatureVector& fv) const {
  Dataset projector{{fv}, mask_};
  const auto p = projector.point(0);
  return predict(std::span<const double>(p.data(), static_cast<std::size_t>(dim_)));
}

Model train(const ClassifierSpec& spec, const Dataset& data) {
  data.validate_for_training();
  auto impl = std::make_shared<Model::Impl>();
  if (const auto* knn = std::get_if<KnnParams>(&spec.kind)) {
    if (knn->k < 1) throw ConfigError("Knn: k must be >= 1");
    KnnModel m;
    m.k = knn->k;
    m.dim = data.dim();
    m.points.reserve(data.size());
    m.labels.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      m.points.push_back(data.point(i));
      m.labels.push_back(data.label(i));
    }
    impl->model = std::move(m);
  } else if (std::get_if<NaiveBayesKdeParams>(&spec.kind)) {
    impl->model = train_nb(data);
  } else if (const auto* tree = std::get_if<DecisionTreeParams>(&spec.kind)) {
    if (tree->min_leaf < 1) throw ConfigError("DecisionTree: min_leaf must be >= 1");
    std::vector<std::size_t> indices(data.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    impl->model = build_tree(data, std::move(indices), tree->min_leaf, data.dim(), nullptr);
  } else {
    impl->model = train_forest(data, std::get<RandomForestParams>(spec.kind), spec.seed);
  }

  Model model;
  model.impl_ = std::move(impl);
  model.mask_ = data.mask;
  model.dim_ = data.dim();
  return model;
}

std::uint64_t EvalReport::total_instances() const {
  std::uint64_t total = 0;
  for (const auto& row : confusion)
    for (std::uint64_t c : row) total += c;
  return total;
}

double EvalReport::accuracy_from_confusion_pct() const {
  const std::uint64_t total = total_instances();
  if (total == 0) return 0.0;
  std::uint64_t diag = 0;
  for (int i = 0; i < kNumActivityLabels; ++i) diag += confusion[i][i];
  return 100.0 * static_cast<double>(diag) / static_cast<double>(total);
}

EvalReport cross_validate(const ClassifierSpec& spec, const Dataset& data, int folds,
                          int repetitions, std::uint64_t seed) {
  data.validate_for_training();
  if (folds < 2) throw ConfigError("cross_validate: folds must be >= 2");
  if (repetitions < 1) throw ConfigError("cross_validate: repetitions must be >= 1");

  std::array<std::vector<std::size_t>, kNumActivityLabels> by_class;
  for (std::size_t i = 0; i < data.size(); ++i)
    by_class[label_index(data.label(i))].push_back(i);
  for (int c = 0; c < kNumActivityLabels; ++c) {
    if (!by_class[c].empty() && by_class[c].size() < static_cast<std::size_t>(folds))
      throw ConfigError("cross_validate: class " +
                        std::string(to_string(static_cast<ActivityLabel>(c))) +
                        " has fewer instances than folds");
  }

  EvalReport report;
  report.folds = folds;
  report.repetitions = repetitions;
  report.seed = seed;

  std::vector<double> rep_accuracies;
  rep_accuracies.reserve(repetitions);

  for (int rep = 0; rep < repetitions; ++rep) {
    const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(rep));
    Rng shuffler(derive_seed(rep_seed, "shuffle"));

    // stratified deal: shuffle within each class, then round-robin into folds
    std::vector<std::vector<std::size_t>> fold_members(folds);
    for (int c = 0; c < kNumActivityLabels; ++c) {
      std::vector<std::size_t> members = by_class[c];
      shuffler.shuffle(members);
      for (std::size_t i = 0; i < members.size(); ++i)
        fold_members[i % folds].push_back(members[i]);
    }

    std::uint64_t rep_correct = 0;
    for (int fold = 0; fold < folds; ++fold) {
      std::vector<bool> in_test(data.size(), false);
      for (std::size_t i : fold_members[fold]) in_test[i] = true;

      Dataset train_set;
      train_set.mask = data.mask;
      train_set.vectors.reserve(data.size() - fold_members[fold].size());
      for (std::size_t i = 0; i < data.size(); ++i)
        if (!in_test[i]) train_set.vectors.push_back(data.vectors[i]);

      ClassifierSpec fold_spec = spec;
      fold_spec.seed = derive_seed(rep_seed, static_cast<std::uint64_t>(1000 + fold));
      const Model model = train(fold_spec, train_set);

      for (std::size_t i : fold_members[fold]) {
        const auto p = data.point(i);
        const ActivityLabel predicted =
            model.predict(std::span<const double>(p.data(), static_cast<std::size_t>(data.dim())));
        ++report.confusion[label_index(data.label(i))][label_index(predicted)];
        if (predicted == data.label(i)) ++rep_correct;
      }
    }
    rep_accuracies.push_back(100.0 * static_cast<double>(rep_correct) /
                             static_cast<double>(data.size()));
  }

  const double mean = std::accumulate(rep_accuracies.begin(), rep_accuracies.end(), 0.0) /
                      rep_accuracies.size();
  double var = 0.0;
  for (double a : rep_accuracies) var += (a - mean) * (a - mean);
  report.accuracy_mean_pct = mean;
  report.accuracy_std_pct =
      rep_accuracies.size() > 1 ? std::sqrt(var / (rep_accuracies.size() - 1)) : 0.0;

  for (int c = 0; c < kNumActivityLabels; ++c) {
    std::uint64_t row_total = 0;
    for (std::uint64_t v : report.confusion[c]) row_total += v;
    report.per_class_tpr_pct[c] =
        row_total == 0 ? 0.0
                       : 100.0 * static_cast<double>(report.confusion[c][c]) /
                             static_cast<double>(row_total);
  }
  return report;
}

}  // namespace capsim::classify
