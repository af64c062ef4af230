#include "airdigit/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "airdigit/error.hpp"
#include "airdigit/rng.hpp"

namespace airdigit {

namespace {

constexpr std::uint64_t kInitStream = 11;
constexpr std::uint64_t kSplitStream = 12;
constexpr std::uint64_t kShuffleStream = 13;

// Fisher-Yates with a plain modulo draw, so the permutation does not depend
// on the standard library's distribution implementation.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double m = z.col(c).maxCoeff();
    const double lse = m + std::log((z.col(c).array() - m).exp().sum());
    out.col(c) = z.col(c).array() - lse;
  }
  return out;
}

Eigen::MatrixXd columns(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = x.col(static_cast<Eigen::Index>(idx[i]));
  return out;
}

std::vector<int> pick(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(y[i]);
  return out;
}

void check_labels(const std::vector<int>& labels, Eigen::Index cols, int classes) {
  if (static_cast<Eigen::Index>(labels.size()) != cols) {
    throw Error(ErrorCode::InvalidLength, "label count does not match example count");
  }
  for (int l : labels) {
    if (l < 0 || l >= classes) throw Error(ErrorCode::UnknownDigit, "label " + std::to_string(l));
  }
}

int argmax(const Eigen::VectorXd& p) {
  Eigen::Index best = 0;
  p.maxCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace

MlpModel init_model(int hidden, std::uint64_t seed, int inputs, int outputs) {
  if (hidden < 1 || inputs < 1 || outputs < 2) throw Error(ErrorCode::InvalidConfig, "layer sizes must be positive");
  MlpModel m = zero_model(hidden, inputs, outputs);
  std::mt19937_64 rng(seed);
  const auto fill = [&rng](Eigen::MatrixXd& w) {
    const double r = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> u(-r, r);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index k = 0; k < w.cols(); ++k) w(i, k) = u(rng);
    }
  };
  fill(m.w1);
  fill(m.w2);
  return m;
}

MlpModel zero_model(int hidden, int inputs, int outputs) {
  if (hidden < 1 || inputs < 1 || outputs < 2) throw Error(ErrorCode::InvalidConfig, "layer sizes must be positive");
  return {Eigen::MatrixXd::Zero(hidden, inputs), Eigen::VectorXd::Zero(hidden),
          Eigen::MatrixXd::Zero(outputs, hidden), Eigen::VectorXd::Zero(outputs)};
}

Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.inputs()) throw Error(ErrorCode::WrongLength, "input width does not match the model");
  const Eigen::MatrixXd h = ((model.w1 * x).colwise() + model.b1).cwiseMax(0.0);
  const Eigen::MatrixXd z = (model.w2 * h).colwise() + model.b2;
  return log_softmax(z).array().exp();
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& x) {
  return forward(model, Eigen::MatrixXd(x)).col(0);
}

double cross_entropy(const MlpModel& model, const Eigen::MatrixXd& x, const std::vector<int>& labels,
                     Gradient* grad) {
  if (x.rows() != model.inputs()) throw Error(ErrorCode::WrongLength, "input width does not match the model");
  check_labels(labels, x.cols(), model.outputs());
  const Eigen::Index n = x.cols();
  if (n == 0) throw Error(ErrorCode::EmptySplit, "no examples");

  const Eigen::MatrixXd pre = (model.w1 * x).colwise() + model.b1;
  const Eigen::MatrixXd h = pre.cwiseMax(0.0);
  const Eigen::MatrixXd z = (model.w2 * h).colwise() + model.b2;
  const Eigen::MatrixXd logp = log_softmax(z);

  double loss = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) loss -= logp(labels[static_cast<std::size_t>(c)], c);
  loss /= static_cast<double>(n);

  if (grad != nullptr) {
    Eigen::MatrixXd dz = logp.array().exp();
    for (Eigen::Index c = 0; c < n; ++c) dz(labels[static_cast<std::size_t>(c)], c) -= 1.0;
    dz /= static_cast<double>(n);
    grad->w2 = dz * h.transpose();
    grad->b2 = dz.rowwise().sum();
    const Eigen::MatrixXd dh = (model.w2.transpose() * dz).cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    grad->w1 = dh * x.transpose();
    grad->b1 = dh.rowwise().sum();
  }
  return loss;
}

void apply_gradient(MlpModel& model, const Gradient& grad, double learning_rate) {
  model.w1 -= learning_rate * grad.w1;
  model.b1 -= learning_rate * grad.b1;
  model.w2 -= learning_rate * grad.w2;
  model.b2 -= learning_rate * grad.b2;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  if (x.cols() == 0) throw Error(ErrorCode::EmptySplit, "cannot fit statistics on no examples");
  Standardizer s;
  s.mean = x.rowwise().mean();
  s.scale.resize(x.rows());
  const double n = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double var = (x.row(r).array() - s.mean[r]).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale[r] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != mean.size()) throw Error(ErrorCode::WrongLength, "input width does not match the statistics");
  return (x.colwise() - mean).array().colwise() * scale.array();
}

Eigen::VectorXd Classifier::probabilities(const FeatureVector& f) const {
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(f.values.data(), static_cast<Eigen::Index>(kFeatureLength));
  return forward(model, Eigen::MatrixXd(standardizer.apply(x))).col(0);
}

int Classifier::predict(const FeatureVector& f) const { return argmax(probabilities(f)); }

void validate(const TrainConfig& cfg) {
  if (cfg.iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be >= 1");
  if (cfg.max_epochs < 1) throw Error(ErrorCode::InvalidConfig, "max_epochs must be >= 1");
  if (cfg.patience_epochs < 1 || cfg.patience_epochs > cfg.max_epochs) {
    throw Error(ErrorCode::InvalidConfig, "patience must lie in [1, max_epochs]");
  }
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "val_fraction must lie in (0, 1)");
  }
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw Error(ErrorCode::InvalidConfig, "learning rate must be positive");
  }
  if (cfg.batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch size must be >= 1");
  if (cfg.hidden < 1) throw Error(ErrorCode::InvalidConfig, "hidden width must be >= 1");
}

Eigen::MatrixXd feature_matrix(const std::vector<Example>& examples) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kFeatureLength), static_cast<Eigen::Index>(examples.size()));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    x.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(examples[i].features.values.data(), static_cast<Eigen::Index>(kFeatureLength));
  }
  return x;
}

std::vector<int> label_vector(const std::vector<Example>& examples) {
  std::vector<int> y;
  y.reserve(examples.size());
  for (const auto& e : examples) y.push_back(e.label);
  return y;
}

TrainOutcome train_once(const MlpModel& initial, const Eigen::MatrixXd& train_x, const std::vector<int>& train_y,
                        const Eigen::MatrixXd& val_x, const std::vector<int>& val_y, const TrainConfig& cfg,
                        std::uint64_t seed, const ValidationLoss& val_loss) {
  validate(cfg);
  if (train_x.cols() == 0) throw Error(ErrorCode::EmptySplit, "empty training split");
  if (val_x.cols() == 0) throw Error(ErrorCode::EmptySplit, "empty validation split");
  check_labels(train_y, train_x.cols(), initial.outputs());
  check_labels(val_y, val_x.cols(), initial.outputs());

  std::mt19937_64 rng(seed);
  MlpModel model = initial;
  TrainOutcome out{initial, 0, std::numeric_limits<double>::infinity()};
  std::vector<std::size_t> order(static_cast<std::size_t>(train_x.cols()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  int stale = 0;
  Gradient grad;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + batch)));
      cross_entropy(model, columns(train_x, idx), pick(train_y, idx), &grad);
      apply_gradient(model, grad, cfg.learning_rate);
    }
    const double loss = val_loss ? val_loss(model, epoch) : cross_entropy(model, val_x, val_y);
    out.epochs_run = epoch;
    if (loss < out.best_val_loss) {
      out.best_val_loss = loss;
      out.model = model;
      stale = 0;
    } else if (++stale >= cfg.patience_epochs) {
      break;
    }
  }
  return out;
}

Split split_indices(std::size_t n, double val_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  shuffle(order, rng);
  const auto n_val = static_cast<std::size_t>(std::lround(val_fraction * static_cast<double>(n)));
  Split s;
  s.val.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

namespace {

IterationRecord score(const MlpModel& model, const Eigen::MatrixXd& x, const std::vector<int>& y, int index) {
  IterationRecord r;
  r.index = index;
  const Eigen::MatrixXd p = forward(model, x);
  double loss = 0.0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const int truth = y[static_cast<std::size_t>(c)];
    r.confusion.add(argmax(p.col(c)), truth);
    loss -= std::log(std::max(p(truth, c), std::numeric_limits<double>::min()));
  }
  const double n = static_cast<double>(p.cols());
  r.test_loss = loss / n;
  r.test_accuracy = static_cast<double>(r.confusion.trace()) / n;
  return r;
}

ChannelKind common_channel(const std::vector<Example>& a, const std::vector<Example>& b) {
  const ChannelKind kind = a.front().features.kind;
  for (const auto* set : {&a, &b}) {
    for (const auto& e : *set) {
      if (e.features.kind != kind) throw Error(ErrorCode::InvalidConfig, "examples mix channel kinds");
    }
  }
  return kind;
}

}  // namespace

IterationRecord evaluate(const Classifier& classifier, const std::vector<Example>& test_set, int index) {
  if (test_set.empty()) throw Error(ErrorCode::EmptySplit, "empty test set");
  return score(classifier.model, classifier.standardizer.apply(feature_matrix(test_set)), label_vector(test_set),
               index);
}

ProtocolResult run_protocol(const std::vector<Example>& robot_set, const std::vector<Example>& human_set,
                            const TrainConfig& cfg, const ProtocolHooks& hooks) {
  validate(cfg);
  if (robot_set.empty()) throw Error(ErrorCode::EmptySplit, "no robot examples");
  if (human_set.empty()) throw Error(ErrorCode::EmptySplit, "no human-like test examples");
  for (const auto& e : human_set) {
    if (e.provenance != Provenance::HumanLike) {
      throw Error(ErrorCode::ProvenanceViolation, "robot example '" + e.id + "' in the human-like test set");
    }
  }
  const ChannelKind channel = common_channel(robot_set, human_set);

  const Eigen::MatrixXd robot_x = feature_matrix(robot_set);
  const std::vector<int> robot_y = label_vector(robot_set);
  const Eigen::MatrixXd human_x = feature_matrix(human_set);
  const std::vector<int> human_y = label_vector(human_set);

  MlpModel model = init_model(cfg.hidden, derive_seed(cfg.seed, {kInitStream}));
  Standardizer standardizer;
  std::vector<IterationRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int it = 1; it <= cfg.iterations; ++it) {
    const auto key = static_cast<std::uint64_t>(it);
    Split split = split_indices(robot_set.size(), cfg.val_fraction, derive_seed(cfg.seed, {kSplitStream, key}));
    if (hooks.on_split) hooks.on_split(it, split);
    if (split.train.empty() || split.val.empty()) {
      throw Error(ErrorCode::EmptySplit, "iteration " + std::to_string(it) + " produced an empty split");
    }
    for (const auto* part : {&split.train, &split.val}) {
      for (std::size_t i : *part) {
        if (i >= robot_set.size()) throw Error(ErrorCode::InvalidLength, "split index out of range");
        if (robot_set[i].provenance != Provenance::Robot) {
          throw Error(ErrorCode::ProvenanceViolation,
                      "human-like example '" + robot_set[i].id + "' selected for training or validation");
        }
      }
    }

    const Eigen::MatrixXd train_raw = columns(robot_x, split.train);
    standardizer = Standardizer::fit(train_raw);
    const TrainOutcome outcome =
        train_once(model, standardizer.apply(train_raw), pick(robot_y, split.train),
                   standardizer.apply(columns(robot_x, split.val)), pick(robot_y, split.val), cfg,
                   derive_seed(cfg.seed, {kShuffleStream, key}), hooks.val_loss);
    if (hooks.on_iteration) hooks.on_iteration(it, model, outcome.model);
    model = outcome.model;

    IterationRecord r = score(model, standardizer.apply(human_x), human_y, it);
    r.epochs_run = outcome.epochs_run;
    r.train_size = split.train.size();
    r.val_size = split.val.size();
    r.best_val_loss = outcome.best_val_loss;
    if (hooks.on_record) hooks.on_record(it, r);
    records.push_back(std::move(r));
  }

  nlohmann::json echo = {{"iterations", cfg.iterations},       {"max_epochs", cfg.max_epochs},
                         {"patience_epochs", cfg.patience_epochs}, {"val_fraction", cfg.val_fraction},
                         {"learning_rate", cfg.learning_rate}, {"batch_size", cfg.batch_size},
                         {"seed", cfg.seed},                   {"hidden", cfg.hidden}};
  return {make_report(channel, std::move(records), std::move(echo)), Classifier{std::move(model), std::move(standardizer)}};
}

}  // namespace airdigit
