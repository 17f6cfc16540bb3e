#include "carp/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace carp {

namespace {

template <class T>
T parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw std::invalid_argument("'" + text + "' is not a valid number");
  return value;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument("'" + text + "' is not a boolean (true/false)");
}

template <class T>
std::string format(const T& v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

struct Entry {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define CARP_NUMBER(KEY, FIELD)                                                                     \
  Entry {                                                                                           \
    KEY, [](RunConfig& c, const std::string& v) { c.FIELD = parse_number<decltype(c.FIELD)>(v); }, \
        [](const RunConfig& c) { return format(c.FIELD); }                                        \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      CARP_NUMBER("seed", seed),
      Entry{"dataset.name", [](RunConfig& c, const std::string& v) { c.dataset.name = v; },
            [](const RunConfig& c) { return c.dataset.name; }},
      Entry{"dataset.preset", [](RunConfig& c, const std::string& v) {
              const int count = c.dataset.count;
              const auto seed = c.dataset.seed;
              c.dataset = dataset_preset(v);
              c.dataset.count = count;
              c.dataset.seed = seed;
            },
            nullptr},
      CARP_NUMBER("dataset.count", dataset.count),
      CARP_NUMBER("dataset.test_count", test_count),
      CARP_NUMBER("dataset.node_lo", dataset.node_lo),
      CARP_NUMBER("dataset.node_hi", dataset.node_hi),
      CARP_NUMBER("dataset.required_edges", dataset.required_edges),
      CARP_NUMBER("dataset.demand_lo", dataset.demand_lo),
      CARP_NUMBER("dataset.demand_hi", dataset.demand_hi),
      CARP_NUMBER("dataset.capacity", dataset.capacity),
      CARP_NUMBER("dataset.seed", dataset.seed),
      CARP_NUMBER("model.d_h", model.d_h),
      CARP_NUMBER("model.n_layers", model.n_layers),
      CARP_NUMBER("model.n_heads", model.n_heads),
      CARP_NUMBER("model.clip_c", model.clip_c),
      CARP_NUMBER("model.mds_dim", model.mds_dim),
      CARP_NUMBER("sl.batch_size", sl.batch_size),
      CARP_NUMBER("sl.epochs", sl.epochs),
      CARP_NUMBER("sl.learning_rate", sl.learning_rate),
      CARP_NUMBER("sl.seed", sl.seed),
      CARP_NUMBER("sl.patience", sl.patience),
      CARP_NUMBER("sl.augment", sl.augment),
      CARP_NUMBER("ppo.batch_size", ppo.batch_size),
      CARP_NUMBER("ppo.episodes", ppo.episodes),
      CARP_NUMBER("ppo.epsilon", ppo.epsilon),
      CARP_NUMBER("ppo.gamma", ppo.gamma),
      CARP_NUMBER("ppo.inner_epochs", ppo.inner_epochs),
      CARP_NUMBER("ppo.learning_rate", ppo.learning_rate),
      Entry{"ppo.constrained", [](RunConfig& c, const std::string& v) { c.ppo.constrained = parse_bool(v); },
            [](const RunConfig& c) { return std::string(c.ppo.constrained ? "true" : "false"); }},
      CARP_NUMBER("ppo.seed", ppo.seed),
      CARP_NUMBER("ppo.test_pool", ppo_test_pool),
      CARP_NUMBER("teacher.budget", teacher.budget),
      CARP_NUMBER("teacher.stall_limit", teacher.stall_limit),
      CARP_NUMBER("teacher.perturb_moves", teacher.perturb_moves),
      CARP_NUMBER("decode.beam_width", beam_width),
  };
  return table;
}

#undef CARP_NUMBER

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& e : entries())
    if (key == e.key) {
      e.set(config, value);
      return true;
    }
  return false;
}

RunConfig read_config(std::istream& in, const std::string& source, RunConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    if (eq == std::string::npos) throw ConfigError(where() + "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where() + "expected 'key = value', got '" + line + "'");
    try {
      if (!set_config_value(base, key, value)) throw ConfigError(where() + "unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where() + key + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return read_config(in, path, std::move(base));
}

void write_config(std::ostream& out, const RunConfig& config) {
  for (const auto& e : entries())
    if (e.get) out << e.key << " = " << e.get(config) << "\n";
}

}  // namespace carp
