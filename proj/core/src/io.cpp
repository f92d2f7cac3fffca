// Copyright 2026 The WiQ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wiq/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "wiq/error.hpp"

namespace wiq {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const fs::path& path, const std::string& what) {
  throw Error(ErrorKind::kFormat, path.string() + ": " + what);
}

double parse_double(std::string_view text, const fs::path& path) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    bad(path, "bad number '" + s + "'");
  }
  return v;
}

int parse_int(std::string_view text, const fs::path& path) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    bad(path, "bad integer '" + s + "'");
  }
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// Parses "key=value" header fields after the magic and version words.
std::vector<std::pair<std::string, std::string>> header_fields(
    const std::string& line, std::string_view magic, const fs::path& path) {
  const auto w = words(line);
  if (w.size() < 2 || w[0] != magic) bad(path, "missing " + std::string(magic) + " header");
  if (w[1] != "1") bad(path, "unsupported version " + w[1]);
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 2; i < w.size(); ++i) {
    const auto eq = w[i].find('=');
    if (eq == std::string::npos) bad(path, "bad header field '" + w[i] + "'");
    out.emplace_back(w[i].substr(0, eq), w[i].substr(eq + 1));
  }
  return out;
}

std::string field(const std::vector<std::pair<std::string, std::string>>& fields,
                  const std::string& key, const fs::path& path) {
  for (const auto& [k, v] : fields) {
    if (k == key) return v;
  }
  bad(path, "header lacks " + key);
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFormat, "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kFormat, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kFormat, "write failed for " + path.string());
}

fs::path ground_truth_path(const fs::path& trace_path) {
  return fs::path(trace_path.string() + ".gt.csv");
}

void write_trace(const RssTrace& trace, const fs::path& path) {
  trace.validate();
  std::string s = "wiq-trace 1 tick_seconds=" + format_double(trace.tick_seconds) +
                  " snr_db=" + (trace.snr_db ? format_double(*trace.snr_db) : "none") +
                  " length=" + std::to_string(trace.size()) + "\n";
  for (double v : trace.samples) s += format_double(v) + "\n";
  write_text(path, s);
  const fs::path gt = ground_truth_path(path);
  if (!trace.ground_truth.empty()) {
    std::string g = "action,start,end,quality\n";
    for (const auto& t : trace.ground_truth) {
      g += std::string(to_string(t.action)) + "," + std::to_string(t.start) + "," +
           std::to_string(t.end) + "," + std::to_string(t.quality_class) + "\n";
    }
    write_text(gt, g);
  } else if (fs::exists(gt)) {
    fs::remove(gt);
  }
}

RssTrace read_trace(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) bad(path, "empty file");
  const auto f = header_fields(line, "wiq-trace", path);
  RssTrace t;
  t.tick_seconds = parse_double(field(f, "tick_seconds", path), path);
  const std::string snr = field(f, "snr_db", path);
  if (snr != "none") t.snr_db = parse_double(snr, path);
  const int length = parse_int(field(f, "length", path), path);
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    t.samples.push_back(parse_double(line, path));
  }
  if (static_cast<int>(t.samples.size()) != length) {
    bad(path, "header says " + std::to_string(length) + " samples, found " +
                  std::to_string(t.samples.size()));
  }
  const fs::path gt = ground_truth_path(path);
  if (fs::exists(gt)) {
    std::istringstream g(read_text(gt));
    std::getline(g, line);
    if (line != "action,start,end,quality") bad(gt, "bad ground-truth header");
    while (std::getline(g, line)) {
      if (is_blank(line)) continue;
      const auto c = split(line, ',');
      if (c.size() != 4) bad(gt, "expected 4 columns");
      t.ground_truth.push_back({parse_action(c[0]), parse_int(c[1], gt), parse_int(c[2], gt),
                                parse_int(c[3], gt)});
    }
  }
  t.validate();
  return t;
}

std::string script_to_json(const ActionScript& script) {
  ordered_json j;
  j["activity"] = std::string(to_string(script.activity));
  j["quality_class"] = script.quality_class;
  ordered_json init;
  for (std::size_t p = 0; p < kPedalCount; ++p) {
    init[std::string(to_string(static_cast<Pedal>(p)))] = script.initial_positions[p];
  }
  j["initial_positions"] = init;
  ordered_json entries = ordered_json::array();
  for (const auto& e : script.entries) {
    entries.push_back({{"action", std::string(to_string(e.action))},
                       {"start_tick", e.start_tick},
                       {"duration_ticks", e.duration_ticks},
                       {"extent", e.extent},
                       {"speed", std::string(to_string(e.speed))},
                       {"jitter", e.jitter},
                       {"jitter_seed", e.jitter_seed}});
  }
  j["entries"] = entries;
  return j.dump(2) + "\n";
}

ActionScript script_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("script JSON: ") + e.what());
  }
  try {
    ActionScript s;
    s.activity = parse_activity(j.value("activity", std::string("free")));
    s.quality_class = j.value("quality_class", -1);
    if (j.contains("initial_positions")) {
      for (std::size_t p = 0; p < kPedalCount; ++p) {
        const std::string name(to_string(static_cast<Pedal>(p)));
        s.initial_positions[p] = j["initial_positions"].value(name, 0.0);
      }
    }
    for (const auto& e : j.at("entries")) {
      ScriptEntry x;
      x.action = parse_action(e.at("action").get<std::string>());
      x.start_tick = e.at("start_tick").get<int>();
      x.duration_ticks = e.value("duration_ticks", 0);
      x.extent = e.value("extent", 1.0);
      x.speed = parse_speed_profile(e.value("speed", std::string("regular")));
      x.jitter = e.value("jitter", 0.0);
      x.jitter_seed = e.value("jitter_seed", std::uint64_t{0});
      s.entries.push_back(x);
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("script JSON: ") + e.what());
  }
}

ActionScript read_script(const fs::path& path) { return script_from_json(read_text(path)); }

void write_script(const ActionScript& script, const fs::path& path) {
  write_text(path, script_to_json(script));
}

void write_fragments(const FragmentFile& file, const fs::path& path) {
  if (file.trace.find_first_of(" \t\n") != std::string::npos) {
    throw Error(ErrorKind::kFormat, "trace reference must not contain whitespace");
  }
  std::string s = "wiq-fragments 1 trace=" + file.trace + "\n";
  for (const auto& b : file.bounds) {
    s += std::to_string(b.start) + "," + std::to_string(b.end) + "\n";
  }
  write_text(path, s);
}

FragmentFile read_fragments(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) bad(path, "empty file");
  FragmentFile f;
  f.trace = field(header_fields(line, "wiq-fragments", path), "trace", path);
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    const auto c = split(line, ',');
    if (c.size() != 2) bad(path, "expected start,end");
    f.bounds.push_back({parse_int(c[0], path), parse_int(c[1], path)});
  }
  return f;
}

void write_matrix(const MatrixFile& file, const fs::path& path) {
  std::string s = "wiq-matrix 1 flavor=" + std::string(to_string(file.matrix.flavor));
  if (file.label) {
    if (file.label->empty() || file.label->find_first_of(" \t\n=") != std::string::npos) {
      throw Error(ErrorKind::kFormat, "matrix label must be a single word");
    }
    s += " label=" + *file.label;
  }
  s += "\n";
  for (std::size_t r = 0; r < kSegments; ++r) {
    for (std::size_t c = 0; c < kFeatures; ++c) {
      s += format_double(file.matrix.at(r, c));
      s += c + 1 < kFeatures ? "," : "\n";
    }
  }
  write_text(path, s);
}

MatrixFile read_matrix(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) bad(path, "empty file");
  const auto f = header_fields(line, "wiq-matrix", path);
  MatrixFile m;
  m.matrix.flavor = parse_flavor(field(f, "flavor", path));
  for (const auto& [k, v] : f) {
    if (k == "label") m.label = v;
  }
  std::size_t r = 0;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    if (r >= kSegments) bad(path, "more than 10 rows");
    const auto c = split(line, ',');
    if (c.size() != kFeatures) bad(path, "row " + std::to_string(r) + " needs 10 values");
    for (std::size_t k = 0; k < kFeatures; ++k) m.matrix.at(r, k) = parse_double(c[k], path);
    ++r;
  }
  if (r != kSegments) bad(path, "expected 10 rows");
  return m;
}

std::vector<std::pair<fs::path, MatrixFile>> read_matrix_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::kFormat, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".matrix") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<fs::path, MatrixFile>> out;
  out.reserve(files.size());
  for (const auto& p : files) out.emplace_back(p, read_matrix(p));
  return out;
}

std::string model_to_text(const Model& model) {
  for (const auto& l : model.labels) {
    if (l.empty() || l.find_first_of(" \t\n") != std::string::npos) {
      throw Error(ErrorKind::kFormat, "model labels must be single words");
    }
  }
  std::string s = "wiq-model " + std::to_string(Model::kFormatVersion) + "\n";
  s += "flavor " + std::string(to_string(model.flavor)) + "\n";
  s += "labels";
  for (const auto& l : model.labels) s += " " + l;
  s += "\n";
  s += "hidden " + std::to_string(model.net.nmlp.hidden) + "\n";
  auto arr = [&](std::string_view name, std::span<const double> v) {
    s += std::string(name) + " " + std::to_string(v.size());
    for (double x : v) s += " " + format_double(x);
    s += "\n";
  };
  arr("norm.shift", model.norm.shift);
  arr("norm.scale", model.norm.scale);
  for_each_tensor(model.net, [&](std::string_view n, const std::vector<double>& v) { arr(n, v); });
  return s;
}

Model model_from_text(const std::string& text) {
  const fs::path path("<model>");
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || words(line) != std::vector<std::string>{"wiq-model", "1"}) {
    bad(path, "missing 'wiq-model 1' header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!is_blank(line)) rows.push_back(words(line));
  }
  auto find = [&](const std::string& key) -> const std::vector<std::string>& {
    for (const auto& r : rows) {
      if (r.front() == key) return r;
    }
    bad(path, "missing " + key);
  };
  Model m;
  const auto& fl = find("flavor");
  if (fl.size() != 2) bad(path, "bad flavor line");
  m.flavor = parse_flavor(fl[1]);
  const auto& lb = find("labels");
  m.labels.assign(lb.begin() + 1, lb.end());
  const auto& hd = find("hidden");
  if (hd.size() != 2) bad(path, "bad hidden line");
  m.net = NetworkParams::zeros(static_cast<int>(m.labels.size()), parse_int(hd[1], path));
  auto load = [&](const std::string& name, std::span<double> out) {
    const auto& r = find(name);
    if (r.size() < 2 || parse_int(r[1], path) != static_cast<int>(out.size()) ||
        r.size() != out.size() + 2) {
      bad(path, name + ": expected " + std::to_string(out.size()) + " values");
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = parse_double(r[i + 2], path);
  };
  m.norm.flavor = m.flavor;
  load("norm.shift", m.norm.shift);
  load("norm.scale", m.norm.scale);
  for_each_tensor(m.net, [&](std::string_view n, std::vector<double>& v) { load(std::string(n), v); });
  return m;
}

void write_model(const Model& model, const fs::path& path) {
  write_text(path, model_to_text(model));
}

Model read_model(const fs::path& path) {
  try {
    return model_from_text(read_text(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_activity_results(const ActivityResults& results, const fs::path& path) {
  std::string s;
  for (Action a : kAllActions) s += "a_" + std::string(to_string(a)) + ",";
  for (const auto& l : results.quality_labels) s += "q_" + l + ",";
  s += "w\n";
  for (const auto& r : results.record.actions) {
    if (r.action_dist.size() != kActionCount ||
        r.quality_dist.size() != results.quality_labels.size()) {
      throw Error(ErrorKind::kDimension, "result row does not match the header");
    }
    for (double p : r.action_dist.probs()) s += format_double(p) + ",";
    for (double p : r.quality_dist.probs()) s += format_double(p) + ",";
    s += format_double(r.weight) + "\n";
  }
  write_text(path, s);
}

ActivityResults read_activity_results(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) bad(path, "empty file");
  const auto head = split(line, ',');
  if (head.size() < kActionCount + 2 || head.back() != "w") bad(path, "bad header");
  for (std::size_t i = 0; i < kActionCount; ++i) {
    if (head[i] != "a_" + std::string(to_string(kAllActions[i]))) bad(path, "bad action column");
  }
  ActivityResults r;
  for (std::size_t i = kActionCount; i + 1 < head.size(); ++i) {
    if (head[i].rfind("q_", 0) != 0) bad(path, "bad quality column '" + head[i] + "'");
    r.quality_labels.push_back(head[i].substr(2));
  }
  const std::size_t nq = r.quality_labels.size();
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    const auto c = split(line, ',');
    if (c.size() != head.size()) bad(path, "row width differs from header");
    std::vector<double> a(kActionCount), q(nq);
    for (std::size_t i = 0; i < kActionCount; ++i) a[i] = parse_double(c[i], path);
    for (std::size_t i = 0; i < nq; ++i) q[i] = parse_double(c[kActionCount + i], path);
    r.record.actions.push_back(
        {ClassDistribution(std::move(a)), ClassDistribution(std::move(q)),
         parse_double(c.back(), path)});
  }
  if (r.record.actions.empty()) bad(path, "no result rows");
  return r;
}

std::string decision_to_json(const FusionResult& result,
                             std::span<const std::string> quality_labels) {
  if (quality_labels.size() != result.distribution.size()) {
    throw Error(ErrorKind::kDimension, "label count differs from distribution size");
  }
  ordered_json j;
  j["decision"] = quality_labels[result.decision];
  j["decision_index"] = result.decision;
  ordered_json probs = ordered_json::object();
  ordered_json raw = ordered_json::object();
  for (std::size_t k = 0; k < quality_labels.size(); ++k) {
    probs[quality_labels[k]] = result.distribution[k];
    raw[quality_labels[k]] = result.raw[k];
  }
  j["distribution"] = probs;
  j["raw"] = raw;
  return j.dump(2) + "\n";
}

}  // namespace wiq
