#include <doctest.h>

#include <cmath>
#include <sstream>

#include "capsim/classify.hpp"
#include "capsim/errors.hpp"
#include "capsim/rng.hpp"
#include "support/oracles.hpp"

using namespace capsim;
using namespace capsim::classify;
using sampler::FeatureVector;

namespace {

Dataset blob_dataset(std::uint64_t seed, int per_class, double spread,
                     FeatureMask mask = FeatureMask::Fused) {
  // five well-separated gaussian blobs along the diagonal, ST pinned at zero
  const std::array<std::array<double, 2>, kNumActivityLabels> centers = {{
      {0.04, 0.05},   // WALK
      {0.13, 0.10},   // RUN
      {0.10, 0.115},  // SU
      {0.085, 0.08},  // SD
      {0.0, 0.0},     // ST
  }};
  Rng rng(seed);
  Dataset data;
  data.mask = mask;
  for (int c = 0; c < kNumActivityLabels; ++c) {
    for (int i = 0; i < per_class; ++i) {
      FeatureVector fv;
      fv.label = static_cast<ActivityLabel>(c);
      const bool stationary = fv.label == ActivityLabel::Stationary;
      fv.r_rear_vps = stationary ? 0.0 : centers[c][0] + spread * rng.normal();
      fv.r_front_vps = stationary ? 0.0 : centers[c][1] + spread * rng.normal();
      data.vectors.push_back(fv);
    }
  }
  return data;
}

std::string fingerprint(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << report.accuracy_mean_pct << '|' << report.accuracy_std_pct;
  for (const auto& row : report.confusion)
    for (auto v : row) out << '|' << v;
  return out.str();
}

}  // namespace

TEST_CASE("1-NN reclassifies its own training set perfectly") {
  const Dataset data = blob_dataset(1, 30, 0.004);
  ClassifierSpec spec;
  spec.kind = KnnParams{1};
  const Model model = train(spec, data);
  for (std::size_t i = 0; i < data.size(); ++i)
    REQUIRE(model.predict(data.vectors[i]) == data.label(i));
}

TEST_CASE("knn ties break toward the lower label in the fixed order") {
  Dataset data;
  data.mask = FeatureMask::Fused;
  data.vectors.push_back({0.0, 0.0, ActivityLabel::Run});
  data.vectors.push_back({0.2, 0.0, ActivityLabel::Walk});
  ClassifierSpec spec;
  spec.kind = KnnParams{2};
  const Model model = train(spec, data);
  // query equidistant from both training points: one vote each
  const std::array<double, 2> query = {0.1, 0.0};
  CHECK(model.predict(query) == ActivityLabel::Walk);
}

TEST_CASE("knn agrees with the brute-force oracle on 100 random queries") {
  const Dataset data = blob_dataset(2, 40, 0.01);
  ClassifierSpec spec;
  spec.kind = KnnParams{3};
  const Model model = train(spec, data);

  std::vector<std::array<double, 2>> points;
  std::vector<ActivityLabel> labels;
  for (std::size_t i = 0; i < data.size(); ++i) {
    points.push_back(data.point(i));
    labels.push_back(data.label(i));
  }

  Rng rng(77);
  for (int q = 0; q < 100; ++q) {
    const std::array<double, 2> query = {rng.uniform(-0.02, 0.16), rng.uniform(-0.02, 0.16)};
    REQUIRE(model.predict(query) == oracles::brute_force_knn(points, labels, query, 2, 3));
  }
}

TEST_CASE("knn predictions are invariant under uniform feature scaling") {
  const Dataset data = blob_dataset(3, 25, 0.008);
  Dataset scaled = data;
  for (auto& fv : scaled.vectors) {
    fv.r_rear_vps *= 40.0;
    fv.r_front_vps *= 40.0;
  }
  ClassifierSpec spec;
  spec.kind = KnnParams{3};
  const Model model = train(spec, data);
  const Model scaled_model = train(spec, scaled);
  Rng rng(5);
  for (int q = 0; q < 200; ++q) {
    const std::array<double, 2> query = {rng.uniform(0.0, 0.15), rng.uniform(0.0, 0.15)};
    const std::array<double, 2> scaled_query = {query[0] * 40.0, query[1] * 40.0};
    REQUIRE(model.predict(query) == scaled_model.predict(scaled_query));
  }
}

TEST_CASE("kernel naive Bayes matches the analytic likelihood ratio between two blobs") {
  // two 1-D gaussian classes with equal priors: the analytic decision is
  // whichever true density is larger
  constexpr double kMeanA = -3.0, kMeanB = 3.0, kSigma = 1.0;
  Rng rng(11);
  Dataset data;
  data.mask = FeatureMask::RearOnly;
  for (int i = 0; i < 400; ++i) {
    data.vectors.push_back({kMeanA + kSigma * rng.normal(), 0.0, ActivityLabel::Walk});
    data.vectors.push_back({kMeanB + kSigma * rng.normal(), 0.0, ActivityLabel::Run});
  }
  ClassifierSpec spec;
  spec.kind = NaiveBayesKdeParams{};
  const Model model = train(spec, data);

  for (int i = 0; i <= 120; ++i) {
    const double x = -6.0 + 12.0 * i / 120.0;
    const double llr = (-0.5 * (x - kMeanA) * (x - kMeanA) / (kSigma * kSigma)) -
                       (-0.5 * (x - kMeanB) * (x - kMeanB) / (kSigma * kSigma));
    if (std::abs(llr) < 1.0) continue;  // skip the thin boundary band
    const std::array<double, 1> query = {x};
    const ActivityLabel expected = llr > 0.0 ? ActivityLabel::Walk : ActivityLabel::Run;
    REQUIRE(model.predict(std::span<const double>(query)) == expected);
  }
}

TEST_CASE("kernel naive Bayes handles a zero-variance class") {
  Dataset data = blob_dataset(13, 30, 0.005);  // ST is an exact point mass at (0,0)
  ClassifierSpec spec;
  spec.kind = NaiveBayesKdeParams{};
  const Model model = train(spec, data);
  const std::array<double, 2> zero = {0.0, 0.0};
  CHECK(model.predict(zero) == ActivityLabel::Stationary);
  const std::array<double, 2> walkish = {0.04, 0.05};
  CHECK(model.predict(walkish) == ActivityLabel::Walk);
}

TEST_CASE("decision tree separates clean blobs at resubstitution") {
  const Dataset data = blob_dataset(17, 30, 0.003);
  ClassifierSpec spec;
  spec.kind = DecisionTreeParams{1};
  const Model model = train(spec, data);
  for (std::size_t i = 0; i < data.size(); ++i)
    REQUIRE(model.predict(data.vectors[i]) == data.label(i));
}

TEST_CASE("single-tree forest without bootstrap equals the plain decision tree") {
  const Dataset data = blob_dataset(19, 25, 0.02);  // overlapping enough to matter
  ClassifierSpec tree_spec;
  tree_spec.kind = DecisionTreeParams{1};
  const Model tree = train(tree_spec, data);

  ClassifierSpec forest_spec;
  RandomForestParams params;
  params.n_trees = 1;
  params.min_leaf = 1;
  params.bootstrap = false;
  params.features_per_split = 2;  // consider every feature, like the tree
  forest_spec.kind = params;
  const Model forest = train(forest_spec, data);

  Rng rng(23);
  for (int q = 0; q < 300; ++q) {
    const std::array<double, 2> query = {rng.uniform(-0.02, 0.16), rng.uniform(-0.02, 0.16)};
    REQUIRE(tree.predict(query) == forest.predict(query));
  }
}

TEST_CASE("training rejects degenerate datasets and parameters") {
  Dataset single;
  single.mask = FeatureMask::Fused;
  for (int i = 0; i < 10; ++i)
    single.vectors.push_back({0.1, 0.1, ActivityLabel::Walk});
  ClassifierSpec spec;
  spec.kind = KnnParams{3};
  CHECK_THROWS_AS(train(spec, single), ConfigError);
  CHECK_THROWS_AS(train(spec, Dataset{}), ConfigError);

  spec.kind = KnnParams{0};
  CHECK_THROWS_AS(train(spec, blob_dataset(1, 5, 0.001)), ConfigError);
}

TEST_CASE("predict rejects mismatched dimensionality") {
  const Dataset data = blob_dataset(29, 10, 0.005);
  ClassifierSpec spec;
  spec.kind = KnnParams{3};
  const Model model = train(spec, data);
  const std::array<double, 1> one_dim = {0.1};
  CHECK_THROWS_AS(model.predict(std::span<const double>(one_dim)), std::invalid_argument);
}

TEST_CASE("cross-validation reaches 100% on separable data for all four classifiers") {
  const Dataset data = blob_dataset(31, 20, 0.002);
  std::vector<ClassifierSpec> specs(4);
  specs[0].kind = KnnParams{3};
  specs[1].kind = NaiveBayesKdeParams{};
  specs[2].kind = DecisionTreeParams{2};
  specs[3].kind = RandomForestParams{};
  for (const auto& spec : specs) {
    const EvalReport report = cross_validate(spec, data, 10, 2, 99);
    INFO("classifier ", spec.name());
    CHECK(report.accuracy_mean_pct == doctest::Approx(100.0));
  }
}

TEST_CASE("uninformative features collapse to the majority-class rate") {
  Dataset data;
  data.mask = FeatureMask::Fused;
  // identical features; WALK holds 60 of 100 instances
  for (int i = 0; i < 60; ++i) data.vectors.push_back({0.1, 0.1, ActivityLabel::Walk});
  for (int i = 0; i < 20; ++i) data.vectors.push_back({0.1, 0.1, ActivityLabel::Run});
  for (int i = 0; i < 20; ++i) data.vectors.push_back({0.1, 0.1, ActivityLabel::StairsUp});

  for (ClassifierSpec spec :
       {ClassifierSpec{NaiveBayesKdeParams{}, 0}, ClassifierSpec{DecisionTreeParams{2}, 0},
        ClassifierSpec{RandomForestParams{}, 1}}) {
    const EvalReport report = cross_validate(spec, data, 10, 2, 7);
    INFO("classifier ", spec.name());
    CHECK(report.accuracy_mean_pct == doctest::Approx(60.0).epsilon(0.04));
  }
}

TEST_CASE("cross-validation is deterministic for a fixed seed") {
  const Dataset data = blob_dataset(37, 18, 0.01);
  ClassifierSpec spec;
  spec.kind = RandomForestParams{25, 1, true, 0};
  const EvalReport a = cross_validate(spec, data, 10, 3, 1234);
  const EvalReport b = cross_validate(spec, data, 10, 3, 1234);
  const EvalReport c = cross_validate(spec, data, 10, 3, 1235);
  CHECK(fingerprint(a) == fingerprint(b));
  CHECK(fingerprint(a) != fingerprint(c));
}

TEST_CASE("every instance is tested exactly once per repetition") {
  const Dataset data = blob_dataset(41, 13, 0.01);  // 65 instances
  ClassifierSpec spec;
  spec.kind = KnnParams{3};
  const int reps = 4;
  const EvalReport report = cross_validate(spec, data, 5, reps, 5);
  CHECK(report.total_instances() == data.size() * reps);
  // row sums equal per-class counts times repetitions
  for (int c = 0; c < kNumActivityLabels; ++c) {
    std::uint64_t row = 0;
    for (auto v : report.confusion[c]) row += v;
    CHECK(row == 13 * reps);
  }
}

TEST_CASE("reported accuracy equals the confusion-matrix trace ratio") {
  const Dataset data = blob_dataset(43, 15, 0.02);
  ClassifierSpec spec;
  spec.kind = NaiveBayesKdeParams{};
  const EvalReport report = cross_validate(spec, data, 5, 3, 21);
  CHECK(report.accuracy_mean_pct ==
        doctest::Approx(report.accuracy_from_confusion_pct()).epsilon(1e-6));
}

TEST_CASE("cross-validation rejects under-populated classes") {
  const Dataset full = blob_dataset(47, 12, 0.01);
  Dataset data;
  data.mask = full.mask;
  int stationary_kept = 0;
  for (const FeatureVector& fv : full.vectors) {
    if (fv.label == ActivityLabel::Stationary && ++stationary_kept > 5) continue;
    data.vectors.push_back(fv);
  }
  ClassifierSpec spec;
  spec.kind = KnnParams{3};
  CHECK_THROWS_AS(cross_validate(spec, data, 10, 1, 3), ConfigError);
  CHECK_THROWS_AS(cross_validate(spec, data, 1, 1, 3), ConfigError);
}

TEST_CASE("fusion outperforms single positions when marginals overlap") {
  // rear separates {WALK|RUN} from {SU|SD}; front separates WALK from RUN and
  // SU from SD; each 1-D view confuses one pair, the joint view separates all
  Rng rng(53);
  Dataset fused;
  fused.mask = FeatureMask::Fused;
  const auto add = [&](double rear, double front, ActivityLabel label) {
    for (int i = 0; i < 40; ++i)
      fused.vectors.push_back(
          {rear + 0.004 * rng.normal(), front + 0.004 * rng.normal(), label});
  };
  add(0.04, 0.04, ActivityLabel::Walk);
  add(0.04, 0.12, ActivityLabel::Run);
  add(0.12, 0.04, ActivityLabel::StairsUp);
  add(0.12, 0.12, ActivityLabel::StairsDown);

  ClassifierSpec spec;
  spec.kind = RandomForestParams{50, 1, true, 0};
  Dataset rear_only = fused;
  rear_only.mask = FeatureMask::RearOnly;
  Dataset front_only = fused;
  front_only.mask = FeatureMask::FrontOnly;

  const double fused_acc = cross_validate(spec, fused, 10, 1, 6).accuracy_mean_pct;
  const double rear_acc = cross_validate(spec, rear_only, 10, 1, 6).accuracy_mean_pct;
  const double front_acc = cross_validate(spec, front_only, 10, 1, 6).accuracy_mean_pct;
  CHECK(fused_acc > rear_acc + 20.0);
  CHECK(fused_acc > front_acc + 20.0);
  CHECK(fused_acc > 97.0);
}
