#pragma once

// Three-layer perceptron (input, one rectified hidden layer, softmax output)
// and the repeated warm-start training protocol: fresh robot-only 80/20 split
// per iteration, early stopping on validation loss, testing on human-like data.

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "airdigit/evaluation.hpp"
#include "airdigit/imu.hpp"
#include "airdigit/signal.hpp"

namespace airdigit {

inline constexpr int kNumClasses = 10;

struct MlpModel {
  Eigen::MatrixXd w1;  // hidden x inputs
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // outputs x hidden
  Eigen::VectorXd b2;

  int inputs() const { return static_cast<int>(w1.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }
  int outputs() const { return static_cast<int>(w2.rows()); }

  bool operator==(const MlpModel& o) const {
    return w1 == o.w1 && b1 == o.b1 && w2 == o.w2 && b2 == o.b2;
  }
};

// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
MlpModel init_model(int hidden, std::uint64_t seed, int inputs = static_cast<int>(kFeatureLength),
                    int outputs = kNumClasses);

MlpModel zero_model(int hidden, int inputs = static_cast<int>(kFeatureLength), int outputs = kNumClasses);

// Class probabilities for one input column, or one column per input.
Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x);
Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& x);

struct Gradient {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

// Mean cross-entropy over the columns of x. Fills `grad` when given.
double cross_entropy(const MlpModel& model, const Eigen::MatrixXd& x, const std::vector<int>& labels,
                     Gradient* grad = nullptr);

void apply_gradient(MlpModel& model, const Gradient& grad, double learning_rate);

// Per-feature standardization. Features with zero spread pass through
// centered.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // multiplier, 1 / std

  static Standardizer fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

// A trained model together with the input statistics it expects.
struct Classifier {
  MlpModel model;
  Standardizer standardizer;

  Eigen::VectorXd probabilities(const FeatureVector& f) const;
  int predict(const FeatureVector& f) const;
};

struct TrainConfig {
  int iterations = 100;
  int max_epochs = 20;
  int patience_epochs = 10;
  double val_fraction = 0.2;
  double learning_rate = 0.01;
  int batch_size = 32;
  std::uint64_t seed = 0;
  int hidden = 64;
};

void validate(const TrainConfig& cfg);

// One feature vector with its label and origin.
struct Example {
  std::string id;
  int label = 0;
  Provenance provenance = Provenance::Robot;
  FeatureVector features;
};

// Columns are examples.
Eigen::MatrixXd feature_matrix(const std::vector<Example>& examples);
std::vector<int> label_vector(const std::vector<Example>& examples);

// Validation loss after `epoch` (1-based). Replaces the real computation in
// tests that script the loss sequence.
using ValidationLoss = std::function<double(const MlpModel& model, int epoch)>;

struct TrainOutcome {
  MlpModel model;  // parameters of the best validation epoch
  int epochs_run = 0;
  double best_val_loss = 0.0;
};

// Mini-batch gradient descent on the inputs as given (run_protocol passes
// standardized ones). Stops after cfg.patience_epochs epochs without a
// strictly lower validation loss, or at cfg.max_epochs. Throws EmptySplit for
// an empty train or validation set.
TrainOutcome train_once(const MlpModel& initial, const Eigen::MatrixXd& train_x,
                        const std::vector<int>& train_y, const Eigen::MatrixXd& val_x,
                        const std::vector<int>& val_y, const TrainConfig& cfg, std::uint64_t seed,
                        const ValidationLoss& val_loss = {});

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

// Seeded shuffle; the validation part has round(val_fraction * n) entries.
Split split_indices(std::size_t n, double val_fraction, std::uint64_t seed);

struct ProtocolHooks {
  // Called once per iteration with the parameters training started from and
  // the parameters it returned.
  std::function<void(int iteration, const MlpModel& start, const MlpModel& result)> on_iteration;
  // Called with each split before training; may alter it.
  std::function<void(int iteration, Split& split)> on_split;
  std::function<void(int iteration, const IterationRecord& record)> on_record;
  ValidationLoss val_loss;
};

struct ProtocolResult {
  RunReport report;
  Classifier final;
};

// cfg.iterations rounds of: fresh split of robot_set, warm start from the
// previous round, train_once, test on human_set. Throws ProvenanceViolation if
// a human-like example would be used for training or validation, or a robot
// example for testing.
ProtocolResult run_protocol(const std::vector<Example>& robot_set, const std::vector<Example>& human_set,
                            const TrainConfig& cfg, const ProtocolHooks& hooks = {});

// Scores a classifier on a labeled set.
IterationRecord evaluate(const Classifier& classifier, const std::vector<Example>& test_set, int index = 0);

}  // namespace airdigit
