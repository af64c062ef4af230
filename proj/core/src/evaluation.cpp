#include "airdigit/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "airdigit/error.hpp"

namespace airdigit {

namespace {

void check_class(int c) {
  if (c < 0 || c > 9) throw Error(ErrorCode::UnknownDigit, "class " + std::to_string(c));
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string caption(ChannelKind k) {
  std::string s(long_name(k));
  s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::IncompatibleReport, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IncompatibleReport, std::string("field '") + key + "': " + e.what());
  }
}

ConfusionMatrix counts_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<std::int64_t>>>();
  if (rows.size() != 10) throw Error(ErrorCode::IncompatibleReport, "confusion matrix must be 10x10");
  ConfusionMatrix cm;
  for (std::size_t r = 0; r < 10; ++r) {
    if (rows[r].size() != 10) throw Error(ErrorCode::IncompatibleReport, "confusion matrix must be 10x10");
    for (std::size_t c = 0; c < 10; ++c) {
      if (rows[r][c] < 0) throw Error(ErrorCode::IncompatibleReport, "negative confusion count");
      cm.counts[r][c] = rows[r][c];
    }
  }
  return cm;
}

}  // namespace

void ConfusionMatrix::add(int predicted, int truth) {
  check_class(predicted);
  check_class(truth);
  ++counts[static_cast<std::size_t>(predicted)][static_cast<std::size_t>(truth)];
}

std::int64_t ConfusionMatrix::column_total(int truth) const {
  check_class(truth);
  std::int64_t t = 0;
  for (const auto& row : counts) t += row[static_cast<std::size_t>(truth)];
  return t;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (std::size_t i = 0; i < 10; ++i) t += counts[i][i];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t c = 0; c < 10; ++c) counts[r][c] += other.counts[r][c];
  }
  return *this;
}

PercentMatrix normalize_columns(const ConfusionMatrix& cm) {
  PercentMatrix out{};
  for (int c = 0; c < 10; ++c) {
    const std::int64_t total = cm.column_total(c);
    if (total <= 0) throw Error(ErrorCode::EmptyClass, "no test samples with true label " + std::to_string(c));
    for (std::size_t r = 0; r < 10; ++r) {
      out[r][static_cast<std::size_t>(c)] =
          100.0 * static_cast<double>(cm.counts[r][static_cast<std::size_t>(c)]) / static_cast<double>(total);
    }
  }
  return out;
}

ConfusionMatrix pooled_counts(const std::vector<IterationRecord>& records) {
  ConfusionMatrix sum;
  for (const auto& r : records) sum += r.confusion;
  return sum;
}

PercentMatrix aggregate(const std::vector<IterationRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::InvalidConfig, "no records to aggregate");
  return normalize_columns(pooled_counts(records));
}

Summary summarize(const std::vector<IterationRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::InvalidConfig, "no records to summarize");
  const double n = static_cast<double>(records.size());
  double mean = 0.0;
  for (const auto& r : records) mean += r.test_accuracy;
  mean /= n;
  double ss = 0.0;
  for (const auto& r : records) ss += (r.test_accuracy - mean) * (r.test_accuracy - mean);
  return {mean, records.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

double macro_recall(const ConfusionMatrix& cm) {
  const PercentMatrix pct = normalize_columns(cm);
  double s = 0.0;
  for (std::size_t i = 0; i < 10; ++i) s += pct[i][i];
  return s / 1000.0;
}

RunReport make_report(ChannelKind channel, std::vector<IterationRecord> records, nlohmann::json config_echo) {
  if (records.empty()) throw Error(ErrorCode::InvalidConfig, "a report needs at least one iteration");
  RunReport rep;
  rep.channel = channel;
  const Summary s = summarize(records);
  rep.mean_accuracy = s.mean;
  rep.std_accuracy = s.std;
  const ConfusionMatrix pooled = pooled_counts(records);
  rep.aggregate_confusion_pct = normalize_columns(pooled);
  rep.macro_recall = macro_recall(pooled);
  rep.records = std::move(records);
  rep.config_echo = std::move(config_echo);
  return rep;
}

ReferenceAccuracy reference_accuracy(ChannelKind channel) {
  switch (channel) {
    case ChannelKind::Acceleration: return {51.46, 28.60};
    case ChannelKind::Velocity: return {63.68, 28.79};
    case ChannelKind::Trajectory: return {59.15, 27.86};
  }
  return {0.0, 0.0};
}

std::string format_pct(double pct, int decimals) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, pct, std::chars_format::fixed, decimals);
  std::string s(buf, res.ptr);
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records) {
    records.push_back({{"index", r.index},
                       {"test_accuracy", r.test_accuracy},
                       {"test_loss", r.test_loss},
                       {"epochs_run", r.epochs_run},
                       {"train_size", r.train_size},
                       {"val_size", r.val_size},
                       {"best_val_loss", r.best_val_loss},
                       {"confusion", r.confusion.counts}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"channel", std::string(short_name(report.channel))},
          {"iterations", report.records.size()},
          {"mean_accuracy_pct", 100.0 * report.mean_accuracy},
          {"std_accuracy_pct", 100.0 * report.std_accuracy},
          {"macro_recall_pct", 100.0 * report.macro_recall},
          {"confusion_pct", report.aggregate_confusion_pct},
          {"confusion_counts", pooled_counts(report.records).counts},
          {"config_echo", report.config_echo},
          {"records", records}};
}

RunReport report_from_json(const nlohmann::json& j) {
  if (field<int>(j, "schema_version") != kReportSchemaVersion) {
    throw Error(ErrorCode::IncompatibleReport, "unsupported report schema version");
  }
  ChannelKind channel;
  try {
    channel = parse_channel(field<std::string>(j, "channel"));
  } catch (const Error& e) {
    throw Error(ErrorCode::IncompatibleReport, e.what());
  }
  const auto& recs = j.contains("records") ? j.at("records") : nlohmann::json();
  if (!recs.is_array()) throw Error(ErrorCode::IncompatibleReport, "missing field 'records'");
  if (recs.empty()) throw Error(ErrorCode::IncompatibleReport, "report has no iterations");
  if (field<std::size_t>(j, "iterations") != recs.size()) {
    throw Error(ErrorCode::IncompatibleReport, "iteration count does not match the records");
  }
  std::vector<IterationRecord> records;
  for (const auto& rj : recs) {
    IterationRecord r;
    r.index = field<int>(rj, "index");
    r.test_accuracy = field<double>(rj, "test_accuracy");
    r.test_loss = field<double>(rj, "test_loss");
    r.epochs_run = field<int>(rj, "epochs_run");
    r.train_size = field<std::size_t>(rj, "train_size");
    r.val_size = field<std::size_t>(rj, "val_size");
    r.best_val_loss = field<double>(rj, "best_val_loss");
    try {
      r.confusion = counts_from_json(rj.at("confusion"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::IncompatibleReport, e.what());
    }
    records.push_back(r);
  }
  try {
    return make_report(channel, std::move(records), j.value("config_echo", nlohmann::json::object()));
  } catch (const Error& e) {
    throw Error(ErrorCode::IncompatibleReport, e.what());
  }
}

std::string render_table(const RunReport& report) {
  constexpr std::size_t kCell = 9;
  std::ostringstream os;
  os << caption(report.channel) << " (" << report.records.size() << " iterations)\n";
  os << pad_left("", 6);
  for (int c = 0; c < 10; ++c) os << pad_left(std::to_string(c), kCell);
  os << '\n';
  for (std::size_t r = 0; r < 10; ++r) {
    os << pad_left(std::to_string(r), 5) << ' ';
    for (std::size_t c = 0; c < 10; ++c) {
      std::string cell = format_pct(report.aggregate_confusion_pct[r][c], 1) + "%";
      if (r == c) cell = "[" + cell + "]";
      os << pad_left(cell, kCell);
    }
    os << '\n';
  }
  os << pad_left("Total", 5) << ' ';
  for (int c = 0; c < 10; ++c) os << pad_left("100%", kCell);
  os << '\n';
  const ReferenceAccuracy ref = reference_accuracy(report.channel);
  os << "Average accuracy: " << format_pct(100.0 * report.mean_accuracy) << "%\n";
  os << "STD: " << format_pct(100.0 * report.std_accuracy) << '\n';
  os << "Macro recall: " << format_pct(100.0 * report.macro_recall) << "%\n";
  os << "Reference (physical recordings): " << format_pct(ref.mean_pct) << "% +/- " << format_pct(ref.std_pct)
     << '\n';
  return os.str();
}

std::string render_csv(const RunReport& report) {
  std::ostringstream os;
  os << "pred\\true";
  for (int c = 0; c < 10; ++c) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < 10; ++r) {
    os << r;
    for (std::size_t c = 0; c < 10; ++c) os << ',' << format_pct(report.aggregate_confusion_pct[r][c]);
    os << '\n';
  }
  os << "Total";
  for (int c = 0; c < 10; ++c) os << ",100.00";
  os << '\n';
  os << "Average accuracy," << format_pct(100.0 * report.mean_accuracy) << '\n';
  os << "STD," << format_pct(100.0 * report.std_accuracy) << '\n';
  return os.str();
}

std::string render_comparison(const std::vector<RunReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::IncompatibleReport, "no reports to compare");
  for (const auto& r : reports) {
    if (r.records.empty()) throw Error(ErrorCode::IncompatibleReport, "report has no iterations");
  }
  std::ostringstream os;
  for (const auto& r : reports) os << render_table(r) << '\n';

  os << "Summary (mean +/- std test accuracy, reference in parentheses)\n";
  for (const auto& r : reports) {
    const ReferenceAccuracy ref = reference_accuracy(r.channel);
    os << "  " << long_name(r.channel) << ": " << format_pct(100.0 * r.mean_accuracy) << "% +/- "
       << format_pct(100.0 * r.std_accuracy) << " (" << format_pct(ref.mean_pct) << "% +/- "
       << format_pct(ref.std_pct) << ")\n";
  }
  std::vector<std::size_t> order(reports.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return reports[a].mean_accuracy > reports[b].mean_accuracy;
  });
  os << "Ranking by mean accuracy: ";
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0) os << " > ";
    os << long_name(reports[order[i]].channel);
  }
  os << '\n';
  return os.str();
}

std::string render_plot_csv(const std::vector<RunReport>& reports) {
  std::ostringstream os;
  os << "channel,iteration,accuracy_pct\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.records) {
      os << short_name(rep.channel) << ',' << r.index << ',' << format_pct(100.0 * r.test_accuracy, 4) << '\n';
    }
  }
  return os.str();
}

}  // namespace airdigit
