#pragma once

// Confusion matrices, per-run summaries and report rendering. Matrices follow
// the table convention: rows are predicted classes, columns true classes, and
// percentages are normalized per column.

#include <array>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "airdigit/signal.hpp"

namespace airdigit {

using PercentMatrix = std::array<std::array<double, 10>, 10>;

struct ConfusionMatrix {
  std::array<std::array<std::int64_t, 10>, 10> counts{};  // [predicted][true]

  void add(int predicted, int truth);
  std::int64_t column_total(int truth) const;
  std::int64_t total() const;
  std::int64_t trace() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

struct IterationRecord {
  int index = 0;
  double test_accuracy = 0.0;  // fraction in [0, 1]
  double test_loss = 0.0;
  ConfusionMatrix confusion;
  int epochs_run = 0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  double best_val_loss = 0.0;

  bool operator==(const IterationRecord&) const = default;
};

struct RunReport {
  ChannelKind channel = ChannelKind::Acceleration;
  std::vector<IterationRecord> records;
  double mean_accuracy = 0.0;  // fraction
  double std_accuracy = 0.0;   // fraction, sample (n - 1) deviation
  double macro_recall = 0.0;   // fraction, from the pooled matrix
  PercentMatrix aggregate_confusion_pct{};
  nlohmann::json config_echo = nlohmann::json::object();
};

// Each column divided by its total, times 100. Throws EmptyClass for an empty
// column.
PercentMatrix normalize_columns(const ConfusionMatrix& cm);

// Counts summed over all records, then column-normalized.
PercentMatrix aggregate(const std::vector<IterationRecord>& records);
ConfusionMatrix pooled_counts(const std::vector<IterationRecord>& records);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // n - 1 denominator; 0 for a single record
};

Summary summarize(const std::vector<IterationRecord>& records);

// Mean of the per-class recalls (diagonal of the column-normalized matrix).
double macro_recall(const ConfusionMatrix& cm);

// Fills the derived fields from the records. Throws InvalidConfig when there
// are no records.
RunReport make_report(ChannelKind channel, std::vector<IterationRecord> records,
                      nlohmann::json config_echo = nlohmann::json::object());

// Accuracy of robot-trained, human-tested models on physical recordings, kept
// for side-by-side annotation.
struct ReferenceAccuracy {
  double mean_pct;
  double std_pct;
};
ReferenceAccuracy reference_accuracy(ChannelKind channel);

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const RunReport& report);
// Throws IncompatibleReport when required fields are missing or malformed.
RunReport report_from_json(const nlohmann::json& j);

// Confusion table with a "Total" row and the accuracy / STD footer.
std::string render_table(const RunReport& report);
std::string render_csv(const RunReport& report);

// Every table followed by the per-channel summary and a ranking line.
// Throws IncompatibleReport for an empty report.
std::string render_comparison(const std::vector<RunReport>& reports);

// iteration,channel,accuracy_pct rows for accuracy-per-iteration plots.
std::string render_plot_csv(const std::vector<RunReport>& reports);

// Fixed-point percentage text, e.g. 63.68.
std::string format_pct(double pct, int decimals = 2);

}  // namespace airdigit
