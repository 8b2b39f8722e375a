#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfs/language.hpp"
#include "dfs/meaning_space.hpp"
#include "dfs/selection.hpp"
#include "dfs/srn.hpp"

namespace dfs {

inline constexpr const char* kVersion = "0.1.0";

struct IoError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Meaning space TSV: header row of proposition names, then one 0/1 row per
// model. Byte-identical for identical inputs and seeds.

inline void write_space_tsv(const MeaningSpace& space, std::ostream& out) {
  const auto& names = space.prop_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out << '\t';
    out << names[i];
  }
  out << '\n';
  for (std::size_t m = 0; m < space.num_models(); ++m) {
    for (std::size_t p = 0; p < space.num_props(); ++p) {
      if (p) out << '\t';
      out << (space.bit(m, p) ? '1' : '0');
    }
    out << '\n';
  }
}

inline void write_space_tsv(const MeaningSpace& space, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_space_tsv(space, out);
}

inline MeaningSpace read_space_tsv(std::istream& in, const std::string& what = "space") {
  std::string header;
  if (!std::getline(in, header)) throw IoError(what + ": empty file");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::vector<std::string> names;
  std::string cell;
  std::istringstream hs(header);
  while (std::getline(hs, cell, '\t')) names.push_back(cell);
  if (names.empty()) throw IoError(what + ": no propositions in header");

  std::vector<std::vector<bool>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<bool> row;
    row.reserve(names.size());
    std::istringstream ls(line);
    while (std::getline(ls, cell, '\t')) {
      if (cell == "0")
        row.push_back(false);
      else if (cell == "1")
        row.push_back(true);
      else
        throw IoError(what + ": cell must be 0 or 1, got '" + cell + "'");
    }
    if (row.size() != names.size())
      throw IoError(what + ": row " + std::to_string(rows.size() + 1) + " has " +
                    std::to_string(row.size()) + " cells, expected " +
                    std::to_string(names.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(what + ": no model rows");
  MeaningSpace space(names, rows.size());
  for (std::size_t m = 0; m < rows.size(); ++m)
    for (std::size_t p = 0; p < names.size(); ++p)
      if (rows[m][p]) space.set_bit(m, p);
  return space;
}

inline MeaningSpace read_space_tsv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_space_tsv(in, path);
}

// ---------------------------------------------------------------------------
// Training items: one JSON record per line.

inline void write_items_jsonl(const std::vector<TrainingItem>& items, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& item : items) {
    nlohmann::json j;
    j["words"] = item.words;
    j["semantics"] = item.semantics_text;
    std::vector<int> bits;
    bits.reserve(item.target.v.size());
    for (double x : item.target.v) bits.push_back(x != 0.0 ? 1 : 0);
    j["target"] = bits;
    out << j.dump() << '\n';
  }
}

struct StoredItem {
  std::vector<std::string> words;
  std::string semantics_text;
  std::vector<double> target;
};

inline std::vector<StoredItem> read_items_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<StoredItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    StoredItem item;
    item.words = j.at("words").get<std::vector<std::string>>();
    item.semantics_text = j.at("semantics").get<std::string>();
    for (const auto& x : j.at("target")) item.target.push_back(x.get<double>());
    items.push_back(std::move(item));
  }
  if (items.empty()) throw IoError(path + ": no items");
  return items;
}

// ---------------------------------------------------------------------------
// Network file: dimensions, vocabulary, training configuration, seed, and
// row-major weight arrays.

inline void save_network(const Srn& net, const Lexicon& lexicon, const std::string& path) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["input_size"] = net.input_size;
  j["hidden_size"] = net.hidden_size;
  j["output_size"] = net.output_size;
  j["words"] = lexicon.words();
  j["config"] = {{"learning_rate", net.config.learning_rate},
                 {"momentum", net.config.momentum},
                 {"epochs", net.config.epochs},
                 {"zero_error_radius", net.config.zero_error_radius},
                 {"init_range", net.config.init_range},
                 {"update_bound", net.config.update_bound},
                 {"seed", net.config.seed}};
  j["weights"] = {{"input_hidden", net.w_ih.a},
                  {"context_hidden", net.w_ch.a},
                  {"hidden_output", net.w_ho.a},
                  {"bias_hidden", net.b_h},
                  {"bias_output", net.b_o}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline std::pair<Srn, Lexicon> load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  Srn net(j.at("input_size").get<std::size_t>(), j.at("hidden_size").get<std::size_t>(),
          j.at("output_size").get<std::size_t>());
  const auto& c = j.at("config");
  net.config.learning_rate = c.at("learning_rate").get<double>();
  net.config.momentum = c.at("momentum").get<double>();
  net.config.epochs = c.at("epochs").get<std::size_t>();
  net.config.zero_error_radius = c.at("zero_error_radius").get<double>();
  net.config.init_range = c.at("init_range").get<double>();
  net.config.update_bound = c.at("update_bound").get<double>();
  net.config.seed = c.at("seed").get<std::uint64_t>();
  const auto& w = j.at("weights");
  net.w_ih.a = w.at("input_hidden").get<std::vector<double>>();
  net.w_ch.a = w.at("context_hidden").get<std::vector<double>>();
  net.w_ho.a = w.at("hidden_output").get<std::vector<double>>();
  net.b_h = w.at("bias_hidden").get<std::vector<double>>();
  net.b_o = w.at("bias_output").get<std::vector<double>>();
  if (net.w_ih.a.size() != net.input_size * net.hidden_size ||
      net.w_ch.a.size() != net.hidden_size * net.hidden_size ||
      net.w_ho.a.size() != net.output_size * net.hidden_size ||
      net.b_h.size() != net.hidden_size || net.b_o.size() != net.output_size)
    throw IoError(path + ": weight array sizes do not match the declared dimensions");
  Lexicon lexicon(j.at("words").get<std::vector<std::string>>());
  return {std::move(net), std::move(lexicon)};
}

// ---------------------------------------------------------------------------
// Trace CSV: word, surprisal, entropy, one column per tracked proposition.

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

inline std::string format_bits(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

inline void write_trace_csv(const std::vector<TraceRecord>& records,
                            const std::vector<std::string>& tracked_names, std::ostream& out) {
  out << "word,surprisal_bits,entropy_bits";
  for (const auto& name : tracked_names) out << ',' << csv_quote(name);
  out << '\n';
  for (const auto& rec : records) {
    out << csv_quote(rec.word) << ',' << format_bits(rec.surprisal_bits) << ','
        << format_bits(rec.entropy_bits);
    for (double s : rec.prop_inference) out << ',' << format_bits(s);
    out << '\n';
  }
}

inline void write_trace_csv(const std::vector<TraceRecord>& records,
                            const std::vector<std::string>& tracked_names,
                            const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_trace_csv(records, tracked_names, out);
}

// ---------------------------------------------------------------------------
// Run manifests: a sidecar record next to each output with the argument
// vector, seeds, and input/output digests, so any artifact can be traced
// back to the exact invocation that produced it.

inline std::string fnv1a64_hex(std::istream& in) {
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

inline std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot digest " + path);
  return fnv1a64_hex(in);
}

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;
  nlohmann::json seeds = nlohmann::json::object();
  std::vector<std::pair<std::string, std::string>> inputs;   // path, digest
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
  double duration_seconds = 0.0;

  void add_input(const std::string& path) { inputs.emplace_back(path, digest_file(path)); }
  void add_output(const std::string& path) { outputs.emplace_back(path, digest_file(path)); }

  void write(const std::string& next_to_output) const {
    nlohmann::json j;
    j["toolkit_version"] = kVersion;
    j["subcommand"] = subcommand;
    j["argv"] = argv;
    j["seeds"] = seeds;
    auto files = [](const std::vector<std::pair<std::string, std::string>>& v) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& [path, digest] : v) arr.push_back({{"path", path}, {"digest", digest}});
      return arr;
    };
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    j["duration_seconds"] = duration_seconds;
    std::string path = next_to_output + ".manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
  }
};

// Looks up the world-spec path recorded in a space's sidecar manifest, so
// that query/infer/trace can find the governing declarations when --spec is
// not passed explicitly. Returns the empty string when unavailable.
inline std::string spec_path_from_manifest(const std::string& space_path) {
  std::ifstream in(space_path + ".manifest.json", std::ios::binary);
  if (!in) return "";
  nlohmann::json j;
  try {
    in >> j;
  } catch (...) {
    return "";
  }
  if (!j.contains("inputs")) return "";
  for (const auto& entry : j["inputs"]) {
    std::string path = entry.value("path", "");
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".dfs") return path;
  }
  return "";
}

}  // namespace dfs
