#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "capsim/labels.hpp"
#include "capsim/sampler.hpp"

namespace capsim::classify {

// Which components of the fused feature vectors feed the classifier.
enum class FeatureMask { FrontOnly, RearOnly, Fused };

std::string_view to_string(FeatureMask mask);
std::optional<FeatureMask> parse_feature_mask(std::string_view text);

struct Dataset {
  std::vector<sampler::FeatureVector> vectors;
  FeatureMask mask = FeatureMask::Fused;

  int dim() const { return mask == FeatureMask::Fused ? 2 : 1; }
  // Projects vector i onto the masked feature space.
  std::array<double, 2> point(std::size_t i) const;
  ActivityLabel label(std::size_t i) const { return vectors[i].label; }
  std::size_t size() const { return vectors.size(); }
  int class_count() const;
  void validate_for_training() const;  // non-empty, >= 2 classes
};

struct KnnParams {
  int k = 3;
};

struct NaiveBayesKdeParams {
  // Gaussian kernels, bandwidth per class/feature by Silverman's rule.
};

struct DecisionTreeParams {
  int min_leaf = 2;
};

struct RandomForestParams {
  int n_trees = 100;
  int min_leaf = 1;
  bool bootstrap = true;
  int features_per_split = 0;  // 0 = floor(sqrt(dim))
};

struct ClassifierSpec {
  std::variant<KnnParams, NaiveBayesKdeParams, DecisionTreeParams, RandomForestParams> kind =
      RandomForestParams{};
  std::uint64_t seed = 0;

  std::string_view name() const;
};

class Model {
 public:
  /// Classifies a point of the trained dimensionality (1 or 2 values).
  /// Ties are broken toward the lowest label in the fixed order.
  ActivityLabel predict(std::span<const double> features) const;
  ActivityLabel predict(const sampler::FeatureVector& fv) const;

  FeatureMask mask() const { return mask_; }
  int dim() const { return dim_; }

 private:
  friend Model train(const ClassifierSpec&, const Dataset&);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  FeatureMask mask_ = FeatureMask::Fused;
  int dim_ = 2;
};

/// Fits the classifier described by spec. Deterministic for a fixed seed.
/// Throws ConfigError on single-class datasets.
Model train(const ClassifierSpec& spec, const Dataset& data);

struct EvalReport {
  double accuracy_mean_pct = 0.0;
  double accuracy_std_pct = 0.0;  // sample std over repetitions
  // rows = true label, cols = predicted, aggregated over all repetitions
  std::array<std::array<std::uint64_t, kNumActivityLabels>, kNumActivityLabels> confusion{};
  std::array<double, kNumActivityLabels> per_class_tpr_pct{};
  int folds = 0;
  int repetitions = 0;
  std::uint64_t seed = 0;

  std::uint64_t total_instances() const;
  double accuracy_from_confusion_pct() const;
};

/// Repeated stratified k-fold cross-validation. Each repetition reshuffles
/// with a seed derived from `seed`; fold training seeds are derived from
/// (seed, repetition, fold) so parallel and serial evaluation agree.
/// Throws ConfigError if any class has fewer instances than folds.
EvalReport cross_validate(const ClassifierSpec& spec, const Dataset& data, int folds,
                          int repetitions, std::uint64_t seed);

}  // namespace capsim::classify
