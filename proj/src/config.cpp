#include "ucrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>

namespace ucrl {

namespace {

using Value = std::variant<std::int64_t, double, std::string, bool>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Parser {
 public:
  explicit Parser(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + msg);
  }

  // Drops a trailing comment, respecting double-quoted strings.
  std::string strip_comment(const std::string& raw) const {
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '\\' && quoted) {
        ++i;
      } else if (raw[i] == '"') {
        quoted = !quoted;
      } else if (raw[i] == '#' && !quoted) {
        return raw.substr(0, i);
      }
    }
    if (quoted) fail("unterminated string");
    return raw;
  }

  Value value(const std::string& text) const {
    if (text.empty()) fail("missing value");
    if (text == "true") return true;
    if (text == "false") return false;
    if (text.front() == '"') {
      if (text.size() < 2 || text.back() != '"') fail("malformed string");
      std::string out;
      for (std::size_t i = 1; i + 1 < text.size(); ++i) {
        char c = text[i];
        if (c == '\\') {
          if (i + 2 >= text.size()) fail("dangling escape");
          c = text[++i];
          if (c == 'n') c = '\n';
          else if (c == 't') c = '\t';
          else if (c != '\\' && c != '"') fail("unsupported escape");
        } else if (c == '"') {
          fail("unescaped quote inside string");
        }
        out.push_back(c);
      }
      return out;
    }
    std::string digits;
    std::copy_if(text.begin(), text.end(), std::back_inserter(digits), [](char c) { return c != '_'; });
    const char* first = digits.data();
    const char* last = first + digits.size();
    if (*first == '+') ++first;
    if (digits.find_first_of(".eE") == std::string::npos) {
      std::int64_t i = 0;
      const auto r = std::from_chars(first, last, i);
      if (r.ec == std::errc() && r.ptr == last) return i;
    } else {
      double d = 0.0;
      const auto r = std::from_chars(first, last, d);
      if (r.ec == std::errc() && r.ptr == last) return d;
    }
    fail("cannot parse value '" + text + "'");
  }

  std::uint64_t as_count(const Value& v, const std::string& key) const {
    const auto* i = std::get_if<std::int64_t>(&v);
    if (!i || *i < 0) fail(key + " must be a nonnegative integer");
    return static_cast<std::uint64_t>(*i);
  }

  double as_real(const Value& v, const std::string& key) const {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    fail(key + " must be a number");
  }

  std::string as_string(const Value& v, const std::string& key) const {
    const auto* s = std::get_if<std::string>(&v);
    if (!s) fail(key + " must be a string");
    return *s;
  }

 private:
  std::size_t line_;
};

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

}  // namespace

void EnvSpec::validate() const {
  if (name == "riverswim") {
    if (states < 2) throw ConfigError("riverswim needs at least 2 states");
  } else if (name == "garnet") {
    auto g = garnet;
    g.n_states = states;
    try {
      g.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (name != "four-room" && name != "two-room") {
    throw ConfigError("unknown environment '" + name + "'");
  }
}

void ExperimentConfig::validate() const {
  env.validate();
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (checkpoints < 1) throw ConfigError("checkpoints must be >= 1");
  if (agents.empty()) throw ConfigError("no agents configured");
  const auto& known = agents::registered_agents();
  for (const auto& a : agents) {
    if (std::find(known.begin(), known.end(), a.name) == known.end())
      throw ConfigError("unknown agent '" + a.name + "'");
    if (!(a.delta > 0.0 && a.delta < 1.0)) throw ConfigError(a.name + ": delta must lie in (0, 1)");
    if (!(a.gamma >= 0.0)) throw ConfigError(a.name + ": gamma must be >= 0");
    if (a.lazy < 1) throw ConfigError(a.name + ": lazy must be >= 1");
    if (!(a.alpha > 0.0)) throw ConfigError(a.name + ": alpha must be > 0");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  agents::AgentSpec* agent = nullptr;
  std::vector<std::string> seen;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    const Parser p(++line_no);
    const std::string line = trim(p.strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') p.fail("malformed table header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(seen.begin(), seen.end(), section) != seen.end())
        p.fail("duplicate table [" + section + "]");
      seen.push_back(section);
      agent = nullptr;
      if (section == "env") continue;
      if (section.rfind("agent.", 0) == 0 && valid_key(section.substr(6))) {
        cfg.agents.push_back({});
        cfg.agents.back().name = section.substr(6);
        agent = &cfg.agents.back();
        continue;
      }
      p.fail("unknown table [" + section + "]");
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!valid_key(key)) p.fail("invalid key '" + key + "'");
    const Value v = p.value(trim(std::string_view(line).substr(eq + 1)));

    if (section.empty()) {
      if (key == "horizon") cfg.horizon = p.as_count(v, key);
      else if (key == "runs") cfg.runs = p.as_count(v, key);
      else if (key == "seed") cfg.seed = p.as_count(v, key);
      else if (key == "out") cfg.out = p.as_string(v, key);
      else if (key == "jobs") cfg.jobs = p.as_count(v, key);
      else if (key == "checkpoints") cfg.checkpoints = p.as_count(v, key);
      else p.fail("unknown key '" + key + "'");
    } else if (section == "env") {
      auto& g = cfg.env.garnet;
      if (key == "name") cfg.env.name = p.as_string(v, key);
      else if (key == "states") cfg.env.states = p.as_count(v, key);
      else if (key == "actions") g.n_actions = p.as_count(v, key);
      else if (key == "branching") g.branching = p.as_real(v, key);
      else if (key == "reward_density") g.reward_density = p.as_real(v, key);
      else if (key == "min_mass") g.min_mass = p.as_real(v, key);
      else if (key == "min_reward") g.min_reward = p.as_real(v, key);
      else if (key == "seed") g.seed = p.as_count(v, key);
      else p.fail("unknown env key '" + key + "'");
    } else {
      if (key == "delta") agent->delta = p.as_real(v, key);
      else if (key == "gamma") agent->gamma = p.as_real(v, key);
      else if (key == "lazy") agent->lazy = p.as_count(v, key);
      else if (key == "alpha") agent->alpha = p.as_real(v, key);
      else p.fail("unknown agent key '" + key + "'");
    }
  }
  cfg.env.garnet.n_states = cfg.env.states;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ucrl
