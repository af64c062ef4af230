#include "airdigit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "airdigit/error.hpp"

namespace airdigit {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols) {
  const auto data = j.get<std::vector<std::vector<double>>>();
  if (static_cast<Eigen::Index>(data.size()) != rows) throw Error(ErrorCode::InvalidConfig, "checkpoint matrix has wrong shape");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = data[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorCode::InvalidConfig, "checkpoint matrix has wrong shape");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

Eigen::VectorXd vector_from(const nlohmann::json& j, Eigen::Index n) {
  const auto data = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != n) throw Error(ErrorCode::InvalidConfig, "checkpoint vector has wrong length");
  return Eigen::Map<const Eigen::VectorXd>(data.data(), n);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidSignal, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::string signal_to_csv(const SampledSignal3& s) {
  std::string out = "t_s,x,y,z\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto v = s.at(i);
    out += format_number(static_cast<double>(i) / s.rate_hz());
    for (double c : v) {
      out += ',';
      out += format_number(c);
    }
    out += '\n';
  }
  return out;
}

SampledSignal3 signal_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "t_s,x,y,z") {
    throw Error(ErrorCode::InvalidSignal, "expected header t_s,x,y,z");
  }
  std::vector<double> t, x, y, z;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != 4) throw Error(ErrorCode::InvalidSignal, "row " + std::to_string(i) + " needs 4 columns");
    t.push_back(parse_number(cells[0]));
    x.push_back(parse_number(cells[1]));
    y.push_back(parse_number(cells[2]));
    z.push_back(parse_number(cells[3]));
  }
  if (t.size() < 2) throw Error(ErrorCode::InvalidSignal, "need at least 2 rows");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidSignal, "t_s must increase");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt + 1e-9) {
      throw Error(ErrorCode::InvalidSignal, "t_s is not uniform at row " + std::to_string(i));
    }
  }
  const double rate = std::round(1e6 / dt) / 1e6;
  return SampledSignal3(std::move(x), std::move(y), std::move(z), rate);
}

std::string joints_to_csv(const JointTrajectory& jt) {
  std::string out = "t_s,j1,j2,j3,j4,j5,j6\n";
  for (std::size_t i = 0; i < jt.frames.size(); ++i) {
    out += format_number(static_cast<double>(i) / jt.rate_hz);
    for (int k = 0; k < 6; ++k) {
      out += ',';
      out += format_number(jt.frames[i][k]);
    }
    out += '\n';
  }
  return out;
}

std::string features_to_csv(const std::vector<Example>& examples) {
  std::string out = "id,label,provenance,channel";
  for (std::size_t i = 0; i < kFeatureLength; ++i) out += ",v" + std::to_string(i);
  out += '\n';
  for (const auto& e : examples) {
    if (e.id.find_first_of(",\n") != std::string::npos) throw Error(ErrorCode::InvalidConfig, "sample id contains a separator");
    out += e.id;
    out += ',' + std::to_string(e.label) + ',';
    out += to_string(e.provenance);
    out += ',';
    out += short_name(e.features.kind);
    for (double v : e.features.values) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<Example> features_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || !lines.front().starts_with("id,label,provenance,channel,v0")) {
    throw Error(ErrorCode::InvalidConfig, "not a feature store");
  }
  std::vector<Example> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != 4 + kFeatureLength) {
      throw Error(ErrorCode::WrongLength, "feature row " + std::to_string(i) + " has " +
                                              std::to_string(cells.size()) + " columns");
    }
    Example e;
    e.id = std::string(cells[0]);
    e.label = static_cast<int>(parse_number(cells[1]));
    if (e.label < 0 || e.label > 9) throw Error(ErrorCode::UnknownDigit, "label in feature row " + std::to_string(i));
    e.provenance = parse_provenance(cells[2]);
    e.features.kind = parse_channel(cells[3]);
    for (std::size_t k = 0; k < kFeatureLength; ++k) e.features.values[k] = parse_number(cells[4 + k]);
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::json checkpoint_to_json(const Classifier& c, ChannelKind channel, const nlohmann::json& config_echo) {
  const MlpModel& m = c.model;
  return {{"format", "airdigit-mlp"},
          {"version", kCheckpointVersion},
          {"channel", std::string(short_name(channel))},
          {"layer_sizes", {m.inputs(), m.hidden(), m.outputs()}},
          {"hidden_activation", "relu"},
          {"output_activation", "softmax"},
          {"w1", matrix_json(m.w1)},
          {"b1", vector_json(m.b1)},
          {"w2", matrix_json(m.w2)},
          {"b2", vector_json(m.b2)},
          {"standardizer", {{"mean", vector_json(c.standardizer.mean)}, {"scale", vector_json(c.standardizer.scale)}}},
          {"config_echo", config_echo}};
}

Classifier checkpoint_from_json(const nlohmann::json& j, ChannelKind* channel) {
  try {
    if (j.at("format") != "airdigit-mlp" || j.at("version") != kCheckpointVersion) {
      throw Error(ErrorCode::InvalidConfig, "unsupported checkpoint format or version");
    }
    const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    if (sizes.size() != 3 || sizes[0] < 1 || sizes[1] < 1 || sizes[2] < 2) {
      throw Error(ErrorCode::InvalidConfig, "checkpoint must describe exactly 3 layers");
    }
    Classifier c;
    c.model.w1 = matrix_from(j.at("w1"), sizes[1], sizes[0]);
    c.model.b1 = vector_from(j.at("b1"), sizes[1]);
    c.model.w2 = matrix_from(j.at("w2"), sizes[2], sizes[1]);
    c.model.b2 = vector_from(j.at("b2"), sizes[2]);
    c.standardizer.mean = vector_from(j.at("standardizer").at("mean"), sizes[0]);
    c.standardizer.scale = vector_from(j.at("standardizer").at("scale"), sizes[0]);
    if (channel != nullptr) *channel = parse_channel(j.at("channel").get<std::string>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed checkpoint: ") + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

}  // namespace airdigit
