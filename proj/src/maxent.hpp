#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "features.hpp"

namespace almd {

struct TrainConfig {
  double l2_sigma2 = 10.0;  // Gaussian prior variance; penalty is w^2/(2*sigma2)
  int max_iters = 200;
  double tol = 1e-6;  // relative objective-change stopping threshold
  std::uint64_t seed = 0;

  bool operator==(const TrainConfig&) const = default;
};

// Dense BIO label ids: O is always id 0, then B/I per (category, level)
// in sorted category order.
class LabelMap {
 public:
  static LabelMap build(const std::vector<std::string>& categories,
                        const std::vector<MentionLevel>& levels);
  static LabelMap from_sentences(std::span<const Sentence* const> sentences);

  int id(const BioLabel& label) const;  // -1 when absent
  const BioLabel& label(int id) const { return labels_[static_cast<std::size_t>(id)]; }
  int size() const { return static_cast<int>(labels_.size()); }

  bool operator==(const LabelMap& other) const { return labels_ == other.labels_; }

 private:
  std::vector<BioLabel> labels_;
  std::unordered_map<std::string, int> index_;
};

// Sparse multinomial logistic regression model over one feature view.
// Weights are stored feature-major: weights[f * L + l].
struct Model {
  LabelMap labels;
  FeatureInterner features;  // frozen
  FeatureView view = FeatureView::Full;
  TrainConfig config;
  std::vector<double> weights;

  double weight(int label, std::uint32_t feature) const {
    return weights[static_cast<std::size_t>(feature) * labels.size() + label];
  }

  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  static Model load(std::istream& in, const std::string& name);
  static Model load(const std::string& path);
};

struct Prediction {
  int num_labels = 0;
  std::vector<int> label_ids;      // argmax per token, lowest id on ties
  std::vector<double> posteriors;  // flattened [token][label]
  std::vector<Mention> mentions;   // decode_bio of the argmax labels
  double confidence = 1.0;         // sentence_confidence of this prediction

  double posterior(int token, int label) const {
    return posteriors[static_cast<std::size_t>(token) * num_labels + label];
  }
  int length() const { return static_cast<int>(label_ids.size()); }
};

// The assembled optimization problem: cached per-token feature vectors
// and gold label ids. Exposed so gradient checks can evaluate the
// objective at arbitrary weight vectors.
class TrainProblem {
 public:
  TrainProblem(std::span<const Sentence* const> sentences, const LabelMap& labels,
               FeatureView view);

  std::size_t dim() const { return static_cast<std::size_t>(interner_.size()) * num_labels_; }
  std::size_t num_tokens() const { return gold_.size(); }
  const FeatureInterner& features() const { return interner_; }
  int num_labels() const { return num_labels_; }

  double value(std::span<const double> w, double l2_sigma2) const;
  double value_grad(std::span<const double> w, double l2_sigma2,
                    std::span<double> grad) const;

 private:
  int num_labels_;
  FeatureInterner interner_;
  std::vector<std::uint32_t> feature_ids_;  // concatenated per-token features
  std::vector<std::uint32_t> offsets_;      // token t uses [offsets_[t], offsets_[t+1])
  std::vector<int> gold_;
};

struct TrainResult {
  Model model;
  std::vector<double> objective_trace;  // accepted objectives, including initial
  int iterations = 0;
  bool converged = false;
};

TrainResult train(std::span<const Sentence* const> sentences,
                  const LabelMap& labels, FeatureView view,
                  const TrainConfig& cfg);
TrainResult train(const std::vector<Sentence>& sentences, FeatureView view,
                  const TrainConfig& cfg);  // label map derived from the data

Prediction predict(const Model& model, const Sentence& sentence);

// Geometric mean over tokens of the argmax-label posterior.
double sentence_confidence(const Prediction& pred);

namespace maxent_detail {
// In-place stable softmax; shift-invariant by construction.
void softmax(std::span<double> scores);
}  // namespace maxent_detail

}  // namespace almd
