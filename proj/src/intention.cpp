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

#include "hrc/intention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "hrc/error.hpp"

namespace hrc {

IntentionLabel IntentionLabel::from_index(int index) {
  if (index < 0 || index >= kNumIntentions)
    throw Error(ErrorCode::kInvalidArgument,
                "intention index out of range: " + std::to_string(index));
  return IntentionLabel(index);
}

IntentionLabel IntentionLabel::parse(const std::string& name) {
  if (name == "Idle") return idle();
  if (name.size() > 2 && name[0] == 'R' && name[1] == '_') {
    try {
      const int b = std::stoi(name.substr(2));
      if (b >= 1 && b <= kNumBlocks) return reach(b);
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::kParse, "unknown intention label '" + name + "'");
}

std::string IntentionLabel::name() const {
  return is_idle() ? "Idle" : "R_" + std::to_string(block());
}

FeatureVector featurize(std::span<const Vec3> wrist,
                        std::span<const Vec3> blocks, double dt) {
  if (wrist.empty())
    throw Error(ErrorCode::kInvalidArgument, "empty wrist history");
  if (static_cast<int>(blocks.size()) != kNumBlocks)
    throw Error(ErrorCode::kDimensionMismatch,
                "featurize expects " + std::to_string(kNumBlocks) + " blocks");
  if (!(dt > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "featurize needs dt > 0");

  // Window spans kFeatureWindow ticks; missing history repeats the oldest.
  const Vec3& newest = wrist.back();
  const Vec3& oldest =
      static_cast<int>(wrist.size()) >= kFeatureWindow
          ? wrist[wrist.size() - kFeatureWindow]
          : wrist.front();
  const double span_time = (kFeatureWindow - 1) * dt;

  FeatureVector x;
  for (int i = 0; i < kNumBlocks; ++i) {
    const Vec3 d = blocks[i] - newest;
    x.segment<3>(4 * i) = d / kDisplacementScale;
    const double closing = ((blocks[i] - oldest).norm() - d.norm()) / span_time;
    x[4 * i + 3] = closing / kSpeedScale;
  }
  x[kFeatureDim - 1] = (newest - oldest).norm() / span_time / kSpeedScale;
  return x;
}

bool MLPParams::operator==(const MLPParams& other) const {
  for (size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].weights.rows() != other.layers[i].weights.rows() ||
        layers[i].weights.cols() != other.layers[i].weights.cols() ||
        layers[i].bias.size() != other.layers[i].bias.size())
      return false;
    if (layers[i].weights != other.layers[i].weights ||
        layers[i].bias != other.layers[i].bias)
      return false;
  }
  return true;
}

bool MLPParams::all_finite() const {
  for (const auto& l : layers)
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

int MLPParams::parameter_count() const {
  int n = 0;
  for (const auto& l : layers)
    n += static_cast<int>(l.weights.size() + l.bias.size());
  return n;
}

double& MLPParams::parameter(int flat_index) {
  for (auto& l : layers) {
    const int nw = static_cast<int>(l.weights.size());
    if (flat_index < nw) return l.weights.data()[flat_index];
    flat_index -= nw;
    const int nb = static_cast<int>(l.bias.size());
    if (flat_index < nb) return l.bias[flat_index];
    flat_index -= nb;
  }
  throw Error(ErrorCode::kInvalidArgument, "parameter index out of range");
}

MLPParams init_mlp(std::uint64_t seed) {
  MLPParams m;
  m.seed = seed;
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < m.layers.size(); ++i) {
    const int in = MLPParams::kWidths[i];
    const int out = MLPParams::kWidths[i + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    m.layers[i].weights.resize(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) m.layers[i].weights(r, c) = dist(rng);
    m.layers[i].bias = Eigen::VectorXd::Zero(out);
  }
  return m;
}

Eigen::VectorXd logits(const MLPParams& model, const FeatureVector& x) {
  Eigen::VectorXd a = x;
  for (size_t i = 0; i < model.layers.size(); ++i) {
    Eigen::VectorXd z = model.layers[i].weights * a + model.layers[i].bias;
    a = i + 1 < model.layers.size() ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

Prediction predict_from_logits(const Eigen::VectorXd& z) {
  const Eigen::VectorXd p = softmax(z);
  int best = 0;
  for (int i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return {IntentionLabel::from_index(best), p[best]};
}

Prediction predict(const MLPParams& model, const FeatureVector& x) {
  if (!x.allFinite())
    throw Error(ErrorCode::kInvalidArgument, "non-finite feature vector");
  return predict_from_logits(logits(model, x));
}

double cross_entropy(const MLPParams& model, const FeatureVector& x,
                     IntentionLabel label) {
  const Eigen::VectorXd z = logits(model, x);
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  return lse - z[label.index()];
}

double loss_and_gradient(const MLPParams& model,
                         std::span<const FeatureVector> xs,
                         std::span<const IntentionLabel> ys, Gradients* grad) {
  const int n = static_cast<int>(xs.size());
  if (n == 0 || ys.size() != xs.size())
    throw Error(ErrorCode::kDimensionMismatch, "batch size mismatch");

  Eigen::MatrixXd a0(kFeatureDim, n);
  for (int j = 0; j < n; ++j) a0.col(j) = xs[j];

  const auto& l = model.layers;
  Eigen::MatrixXd z1 = (l[0].weights * a0).colwise() + l[0].bias;
  Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  Eigen::MatrixXd z2 = (l[1].weights * a1).colwise() + l[1].bias;
  Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
  Eigen::MatrixXd z3 = (l[2].weights * a2).colwise() + l[2].bias;

  double loss = 0.0;
  Eigen::MatrixXd dz3(z3.rows(), n);
  for (int j = 0; j < n; ++j) {
    const double m = z3.col(j).maxCoeff();
    Eigen::VectorXd e = (z3.col(j).array() - m).exp();
    const double s = e.sum();
    loss += m + std::log(s) - z3(ys[j].index(), j);
    dz3.col(j) = e / s;
    dz3(ys[j].index(), j) -= 1.0;
  }
  loss /= n;
  if (grad == nullptr) return loss;

  dz3 /= static_cast<double>(n);
  grad->layers[2].weights = dz3 * a2.transpose();
  grad->layers[2].bias = dz3.rowwise().sum();
  Eigen::MatrixXd dz2 =
      (l[2].weights.transpose() * dz3).cwiseProduct(
          (z2.array() > 0.0).cast<double>().matrix());
  grad->layers[1].weights = dz2 * a1.transpose();
  grad->layers[1].bias = dz2.rowwise().sum();
  Eigen::MatrixXd dz1 =
      (l[1].weights.transpose() * dz2).cwiseProduct(
          (z1.array() > 0.0).cast<double>().matrix());
  grad->layers[0].weights = dz1 * a0.transpose();
  grad->layers[0].bias = dz1.rowwise().sum();
  return loss;
}

FeatureVector input_gradient(const MLPParams& model, const FeatureVector& x,
                             IntentionLabel label) {
  const auto& l = model.layers;
  const Eigen::VectorXd z1 = l[0].weights * x + l[0].bias;
  const Eigen::VectorXd a1 = z1.cwiseMax(0.0);
  const Eigen::VectorXd z2 = l[1].weights * a1 + l[1].bias;
  const Eigen::VectorXd a2 = z2.cwiseMax(0.0);
  const Eigen::VectorXd z3 = l[2].weights * a2 + l[2].bias;
  Eigen::VectorXd dz3 = softmax(z3);
  dz3[label.index()] -= 1.0;
  const Eigen::VectorXd dz2 =
      (l[2].weights.transpose() * dz3)
          .cwiseProduct((z2.array() > 0.0).cast<double>().matrix());
  const Eigen::VectorXd dz1 =
      (l[1].weights.transpose() * dz2)
          .cwiseProduct((z1.array() > 0.0).cast<double>().matrix());
  return l[0].weights.transpose() * dz1;
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kOriginal:
      return "D0";
    case Provenance::kExpertVerified:
      return "D0'";
    case Provenance::kPseudoLabeled:
      return "Dadv";
  }
  return "?";
}

Provenance parse_provenance(const std::string& name) {
  if (name == "D0") return Provenance::kOriginal;
  if (name == "D0'") return Provenance::kExpertVerified;
  if (name == "Dadv") return Provenance::kPseudoLabeled;
  throw Error(ErrorCode::kParse, "unknown provenance '" + name + "'");
}

MLPParams train(const LabeledDataset& data, const TrainParams& params,
                TrainReport* report) {
  if (data.empty())
    throw Error(ErrorCode::kInvalidArgument, "training set is empty");
  if (params.batch_size < 1 || params.epochs < 0)
    throw Error(ErrorCode::kInvalidArgument, "invalid training schedule");
  if (!(params.learning_rate >= 0.0) || !std::isfinite(params.learning_rate))
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be finite and >= 0");

  MLPParams model = init_mlp(params.seed);
  std::mt19937_64 shuffle_rng(params.seed ^ 0x5deece66dULL);
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<FeatureVector> xs;
  std::vector<IntentionLabel> ys;
  Gradients g;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (size_t start = 0; start < order.size(); start += params.batch_size) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(params.batch_size));
      xs.clear();
      ys.clear();
      for (size_t k = start; k < end; ++k) {
        xs.push_back(data[order[k]].x);
        ys.push_back(data[order[k]].label);
      }
      const double loss = loss_and_gradient(model, xs, ys, &g);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << ", batch starting "
            << start << " (loss " << loss << ", learning rate "
            << params.learning_rate << ")";
        throw Error(ErrorCode::kDivergence, msg.str());
      }
      for (size_t i = 0; i < model.layers.size(); ++i) {
        model.layers[i].weights -= params.learning_rate * g.layers[i].weights;
        model.layers[i].bias -= params.learning_rate * g.layers[i].bias;
      }
    }
  }
  if (!model.all_finite())
    throw Error(ErrorCode::kDivergence, "training produced non-finite weights");
  if (report != nullptr) {
    report->final_loss = mean_loss(model, data);
    report->final_accuracy = accuracy(model, data);
  }
  return model;
}

double accuracy(const MLPParams& model, const LabeledDataset& data) {
  if (data.empty()) return 0.0;
  int hits = 0;
  for (const auto& p : data)
    if (predict(model, p.x).label == p.label) ++hits;
  return static_cast<double>(hits) / data.size();
}

double mean_loss(const MLPParams& model, const LabeledDataset& data) {
  if (data.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : data) s += cross_entropy(model, p.x, p.label);
  return s / data.size();
}

FeatureVector attack(const MLPParams& model, const FeatureVector& x,
                     IntentionLabel label, const AttackParams& params) {
  if (params.epsilon < 0.0)
    throw Error(ErrorCode::kInvalidArgument, "attack budget must be >= 0");
  if (params.epsilon == 0.0 || params.steps <= 0) return x;

  const double step = params.epsilon * params.step_fraction;
  FeatureVector best = x;
  double best_loss = cross_entropy(model, x, label);
  FeatureVector cur = x;
  for (int k = 0; k < params.steps; ++k) {
    const FeatureVector g = input_gradient(model, cur, label);
    cur += step * g.unaryExpr([](double v) {
      return static_cast<double>((v > 0.0) - (v < 0.0));
    });
    cur = cur.array()
              .max(x.array() - params.epsilon)
              .min(x.array() + params.epsilon)
              .matrix();
    const double loss = cross_entropy(model, cur, label);
    if (loss > best_loss) {
      best_loss = loss;
      best = cur;
    }
  }
  return best;
}

double adversarial_accuracy(const MLPParams& model, const LabeledDataset& data,
                            const AttackParams& params) {
  if (data.empty()) return 0.0;
  int hits = 0;
  for (const auto& p : data) {
    const FeatureVector xa = attack(model, p.x, p.label, params);
    if (predict(model, xa).label == p.label) ++hits;
  }
  return static_cast<double>(hits) / data.size();
}

IadaResult iada_train(const LabeledDataset& data, const AttackParams& attack_cfg,
                      const LabelOracle& oracle, int rounds,
                      const TrainParams& params) {
  IadaResult out;
  out.dataset = data;
  for (int round = 0; round < rounds; ++round) {
    const MLPParams model = train(out.dataset, params);
    int verified = 0;
    int pseudo = 0;
    LabeledDataset added;
    for (const auto& p : data) {
      if (p.provenance != Provenance::kOriginal) continue;
      const FeatureVector xa = attack(model, p.x, p.label, attack_cfg);
      if (xa == p.x) continue;
      if (auto label = oracle(xa)) {
        added.push_back({xa, *label, Provenance::kExpertVerified});
        ++verified;
      } else {
        added.push_back(
            {xa, predict(model, xa).label, Provenance::kPseudoLabeled});
        ++pseudo;
      }
    }
    out.dataset.insert(out.dataset.end(), added.begin(), added.end());
    out.verified_per_round.push_back(verified);
    out.pseudo_per_round.push_back(pseudo);
  }
  out.model = train(out.dataset, params);
  return out;
}

IntentionLabel IntentionSmoother::push(IntentionLabel label) {
  history_.push_back(label);
  if (static_cast<int>(history_.size()) > window_)
    history_.erase(history_.begin());
  std::map<IntentionLabel, int> votes;
  for (auto l : history_) ++votes[l];
  IntentionLabel best = history_.back();
  int best_votes = votes[best];
  for (const auto& [l, v] : votes) {
    if (v > best_votes) {
      best = l;
      best_votes = v;
    }
  }
  return best;
}

void save_model(const MLPParams& model, std::ostream& out) {
  out << "hrc-mlp 1\n";
  out << "seed " << model.seed << "\n";
  out << "layers " << model.layers.size() << "\n";
  out << std::setprecision(17);
  for (const auto& l : model.layers) {
    out << "dense " << l.weights.rows() << " " << l.weights.cols() << "\n";
    for (int r = 0; r < l.weights.rows(); ++r) {
      for (int c = 0; c < l.weights.cols(); ++c)
        out << (c ? " " : "") << l.weights(r, c);
      out << "\n";
    }
    for (int r = 0; r < l.bias.size(); ++r) out << (r ? " " : "") << l.bias[r];
    out << "\n";
  }
}

MLPParams load_model(std::istream& in) {
  auto fail = [](const std::string& what) {
    return Error(ErrorCode::kParse, "model file: " + what);
  };
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "hrc-mlp")
    throw fail("missing 'hrc-mlp' header");
  if (version != 1)
    throw fail("unsupported version " + std::to_string(version));
  MLPParams m;
  std::string key;
  size_t count = 0;
  if (!(in >> key >> m.seed) || key != "seed") throw fail("missing seed");
  if (!(in >> key >> count) || key != "layers" || count != m.layers.size())
    throw fail("expected 3 layers");
  for (size_t i = 0; i < m.layers.size(); ++i) {
    int rows = 0, cols = 0;
    if (!(in >> key >> rows >> cols) || key != "dense")
      throw fail("missing dense layer header");
    if (rows != MLPParams::kWidths[i + 1] || cols != MLPParams::kWidths[i])
      throw fail("layer " + std::to_string(i) + " has wrong dimensions");
    auto& l = m.layers[i];
    l.weights.resize(rows, cols);
    l.bias.resize(rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (!(in >> l.weights(r, c))) throw fail("truncated weights");
    for (int r = 0; r < rows; ++r)
      if (!(in >> l.bias[r])) throw fail("truncated bias");
  }
  if (!m.all_finite()) throw fail("non-finite parameters");
  return m;
}

void save_model_file(const MLPParams& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model file " + path);
  save_model(model, out);
  if (!out) throw Error(ErrorCode::kIo, "failed writing model file " + path);
}

MLPParams load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model file " + path);
  return load_model(in);
}

void save_dataset_csv(const LabeledDataset& data, std::ostream& out) {
  for (int i = 0; i < kFeatureDim; ++i) out << "f" << i << ",";
  out << "label,provenance\n";
  out << std::setprecision(17);
  for (const auto& p : data) {
    for (int i = 0; i < kFeatureDim; ++i) out << p.x[i] << ",";
    out << p.label.name() << "," << provenance_name(p.provenance) << "\n";
  }
}

LabeledDataset load_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::kParse, "dataset csv: missing header");
  LabeledDataset out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    LabeledPoint p;
    for (int i = 0; i < kFeatureDim; ++i) {
      if (!std::getline(ss, cell, ','))
        throw Error(ErrorCode::kParse,
                    "dataset csv line " + std::to_string(lineno) +
                        ": too few columns");
      p.x[i] = std::stod(cell);
    }
    std::string label, prov;
    if (!std::getline(ss, label, ',') || !std::getline(ss, prov))
      throw Error(ErrorCode::kParse, "dataset csv line " +
                                         std::to_string(lineno) +
                                         ": missing label");
    p.label = IntentionLabel::parse(label);
    p.provenance = parse_provenance(prov);
    out.push_back(p);
  }
  return out;
}

}  // namespace hrc
