// Copyright 2026 The HRC Co-Assembly Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HRC_INTENTION_HPP_
#define HRC_INTENTION_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hrc/geometry.hpp"
#include "hrc/intention_label.hpp"

namespace hrc {

inline constexpr int kFeatureWindow = 5;
inline constexpr int kFeatureDim = 4 * kNumBlocks + 1;
inline constexpr double kDisplacementScale = 0.5;  // m per feature unit
inline constexpr double kSpeedScale = 1.0;         // m/s per feature unit
inline constexpr double kIdleSpeed = 0.05;         // m/s

using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;

// Per block: displacement block - wrist (3, scaled) and speed toward the
// block (1); then the wrist speed magnitude. `wrist` holds the window oldest
// first; a short window is padded by repeating its oldest entry.
FeatureVector featurize(std::span<const Vec3> wrist, std::span<const Vec3> blocks,
                        double dt);

// Wrist speed (m/s) encoded in a feature vector.
inline double feature_wrist_speed(const FeatureVector& x) {
  return x[kFeatureDim - 1] * kSpeedScale;
}

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
};

// 49 -> 32 (ReLU) -> 32 (ReLU) -> 13 (linear).
struct MLPParams {
  static constexpr std::array<int, 4> kWidths = {kFeatureDim, 32, 32,
                                                 kNumIntentions};
  std::array<DenseLayer, 3> layers;
  std::uint64_t seed = 0;

  bool operator==(const MLPParams& other) const;
  bool all_finite() const;
  int parameter_count() const;
  double& parameter(int flat_index);
};

MLPParams init_mlp(std::uint64_t seed);

Eigen::VectorXd logits(const MLPParams& model, const FeatureVector& x);
Eigen::VectorXd softmax(const Eigen::VectorXd& z);

struct Prediction {
  IntentionLabel label;
  double confidence = 0.0;
};

Prediction predict(const MLPParams& model, const FeatureVector& x);
Prediction predict_from_logits(const Eigen::VectorXd& z);

double cross_entropy(const MLPParams& model, const FeatureVector& x,
                     IntentionLabel label);

struct Gradients {
  std::array<DenseLayer, 3> layers;
};

// Mean cross-entropy over the batch and its parameter gradient.
double loss_and_gradient(const MLPParams& model,
                         std::span<const FeatureVector> xs,
                         std::span<const IntentionLabel> ys, Gradients* grad);

FeatureVector input_gradient(const MLPParams& model, const FeatureVector& x,
                             IntentionLabel label);

enum class Provenance { kOriginal, kExpertVerified, kPseudoLabeled };

const char* provenance_name(Provenance p);
Provenance parse_provenance(const std::string& name);

struct LabeledPoint {
  FeatureVector x;
  IntentionLabel label;
  Provenance provenance = Provenance::kOriginal;
};

using LabeledDataset = std::vector<LabeledPoint>;

struct TrainParams {
  int epochs = 100;
  int batch_size = 16;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;
};

struct TrainReport {
  double final_loss = 0.0;
  double final_accuracy = 0.0;
};

MLPParams train(const LabeledDataset& data, const TrainParams& params,
                TrainReport* report = nullptr);

double accuracy(const MLPParams& model, const LabeledDataset& data);
double mean_loss(const MLPParams& model, const LabeledDataset& data);

struct AttackParams {
  double epsilon = 0.03;  // infinity-norm budget in feature units
  int steps = 10;
  double step_fraction = 0.25;  // step size as a fraction of epsilon
};

// Projected sign-gradient ascent on the cross-entropy. Returns the iterate
// with the largest loss, so the loss never falls below that of `x`.
FeatureVector attack(const MLPParams& model, const FeatureVector& x,
                     IntentionLabel label, const AttackParams& params);

// Accuracy on the attacked copies of `data`.
double adversarial_accuracy(const MLPParams& model, const LabeledDataset& data,
                            const AttackParams& params);

// Returns a label, or nullopt when the point is too ambiguous to label.
using LabelOracle =
    std::function<std::optional<IntentionLabel>(const FeatureVector&)>;

struct IadaResult {
  MLPParams model;
  LabeledDataset dataset;
  std::vector<int> verified_per_round;
  std::vector<int> pseudo_per_round;
};

IadaResult iada_train(const LabeledDataset& data, const AttackParams& attack,
                      const LabelOracle& oracle, int rounds,
                      const TrainParams& params);

// Majority vote over the latest predictions; ties go to the newest label.
class IntentionSmoother {
 public:
  explicit IntentionSmoother(int window = 3) : window_(window) {}
  IntentionLabel push(IntentionLabel label);
  void reset() { history_.clear(); }

 private:
  int window_;
  std::vector<IntentionLabel> history_;
};

// Text model format, see docs/file_formats.md.
void save_model(const MLPParams& model, std::ostream& out);
MLPParams load_model(std::istream& in);
void save_model_file(const MLPParams& model, const std::string& path);
MLPParams load_model_file(const std::string& path);

void save_dataset_csv(const LabeledDataset& data, std::ostream& out);
LabeledDataset load_dataset_csv(std::istream& in);

}  // namespace hrc

#endif  // HRC_INTENTION_HPP_
