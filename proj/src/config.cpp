#include "tir/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tir/error.hpp"

namespace tir {

namespace {

constexpr std::array<std::string_view, 25> kKeys = {
    "run.name",           "run.model",              "run.samples",          "run.depth",
    "run.temperature",    "run.max_tokens",         "run.seed",             "run.parallelism",
    "run.fallback_answer", "prompt.problem_language", "prompt.reasoning_language", "prompt.translate_first",
    "prompt.instruction", "prompt.polite",          "prompt.few_shot",      "prompt.template",
    "prompt.templates_file", "retrieval.similarity", "execution.timeout_ms", "execution.max_output_bytes",
    "execution.execute_all_blocks", "backend.url",  "backend.retries",      "backend.timeout_ms",
    "backend.max_in_flight",
};

std::string trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("config key '" + std::string(key) + "': expected " + std::string(expected) + ", got '" +
                    std::string(value) + "'");
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  const std::string v = trimmed(text);
  Int out{};
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || end != v.data() + v.size()) bad_value(key, text, "an integer");
  return out;
}

double parse_real(std::string_view key, std::string_view text) {
  const std::string v = trimmed(text);
  double out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || end != v.data() + v.size()) bad_value(key, text, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  std::string v = trimmed(text);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad_value(key, text, "true or false");
}

bool is_unset(std::string_view text) {
  const std::string v = trimmed(text);
  return v.empty() || v == "none";
}

Language parse_lang(std::string_view key, std::string_view text) {
  const auto l = parse_language(trimmed(text));
  if (!l) bad_value(key, text, "bn or en");
  return *l;
}

}  // namespace

std::span<const std::string_view> run_config_keys() { return kKeys; }

void set_run_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  if (key == "run.name") {
    c.name = trimmed(value);
  } else if (key == "run.model") {
    c.model = trimmed(value);
  } else if (key == "run.samples") {
    c.samples_n = parse_int<int>(key, value);
  } else if (key == "run.depth") {
    c.depth_d = parse_int<int>(key, value);
  } else if (key == "run.temperature") {
    c.temperature = parse_real(key, value);
  } else if (key == "run.max_tokens") {
    c.max_tokens = parse_int<int>(key, value);
  } else if (key == "run.seed") {
    c.seed = is_unset(value) ? std::nullopt : std::optional(parse_int<std::int64_t>(key, value));
  } else if (key == "run.parallelism") {
    c.parallelism = parse_int<int>(key, value);
  } else if (key == "run.fallback_answer") {
    if (is_unset(value)) {
      c.fallback_answer.reset();
    } else {
      c.fallback_answer = validate_answer(value);
      if (!c.fallback_answer) bad_value(key, value, "a non-negative integer");
    }
  } else if (key == "prompt.problem_language") {
    c.prompt.problem_language = parse_lang(key, value);
  } else if (key == "prompt.reasoning_language") {
    c.prompt.reasoning_language = parse_lang(key, value);
  } else if (key == "prompt.translate_first") {
    c.prompt.translate_first = parse_bool(key, value);
  } else if (key == "prompt.instruction") {
    const auto m = parse_instruction_mode(trimmed(value));
    if (!m) bad_value(key, value, "none or tailored");
    c.prompt.instruction_mode = *m;
  } else if (key == "prompt.polite") {
    c.prompt.polite = parse_bool(key, value);
  } else if (key == "prompt.few_shot") {
    c.prompt.few_shot_count = parse_int<int>(key, value);
  } else if (key == "prompt.template") {
    const auto t = parse_template_id(trimmed(value));
    if (!t) bad_value(key, value, "base, advanced or step_by_step");
    c.prompt.template_id = *t;
  } else if (key == "prompt.templates_file") {
    c.templates_file = trimmed(value);
  } else if (key == "retrieval.similarity") {
    const std::string v = trimmed(value);
    if (v == "idf") {
      c.similarity = Similarity::idf;
    } else if (v == "jaccard") {
      c.similarity = Similarity::jaccard;
    } else {
      bad_value(key, value, "idf or jaccard");
    }
  } else if (key == "execution.timeout_ms") {
    c.timeout_ms = parse_int<int>(key, value);
  } else if (key == "execution.max_output_bytes") {
    c.max_output_bytes = parse_int<std::size_t>(key, value);
  } else if (key == "execution.execute_all_blocks") {
    c.execute_all_blocks = parse_bool(key, value);
  } else if (key == "backend.url") {
    c.backend.url = trimmed(value);
  } else if (key == "backend.retries") {
    c.backend.retries = parse_int<int>(key, value);
  } else if (key == "backend.timeout_ms") {
    c.backend.timeout_ms = parse_int<int>(key, value);
  } else if (key == "backend.max_in_flight") {
    c.backend.max_in_flight = parse_int<std::size_t>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  if (samples_n < 1) throw ConfigError("run.samples must be >= 1");
  if (depth_d < 1) throw ConfigError("run.depth must be >= 1");
  if (parallelism < 1) throw ConfigError("run.parallelism must be >= 1");
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("run.temperature must be in [0, 2]");
  if (max_tokens < 1) throw ConfigError("run.max_tokens must be >= 1");
  if (timeout_ms < 1 || timeout_ms > kMaxTimeoutMs) {
    throw ConfigError("execution.timeout_ms must be in [1, " + std::to_string(kMaxTimeoutMs) + "]");
  }
  if (max_output_bytes < 1 || max_output_bytes > kMaxOutputBytes) {
    throw ConfigError("execution.max_output_bytes must be in [1, 1048576]");
  }
  if (backend.retries < 0) throw ConfigError("backend.retries must be >= 0");
  if (backend.timeout_ms < 1) throw ConfigError("backend.timeout_ms must be >= 1");
  if (backend.max_in_flight < 1) throw ConfigError("backend.max_in_flight must be >= 1");
  prompt.validate();
}

AgentConfig RunConfig::agent_config() const {
  AgentConfig a;
  a.depth = depth_d;
  a.generation.temperature = temperature;
  a.generation.max_tokens = max_tokens;
  a.generation.seed = seed;
  a.generation.model_name = model;
  a.limits.timeout_ms = timeout_ms;
  a.limits.max_output_bytes = max_output_bytes;
  a.execute_all_blocks = execute_all_blocks;
  return a;
}

RunConfig parse_run_config(std::string_view ini_text, std::span<const std::string> overrides) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }

  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' must be inside a [section]");
    for (const auto& [key, value] : body) set_run_config_value(cfg, section + "." + key, value.data());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not of the form section.key=value");
    set_run_config_value(cfg, trimmed(std::string_view(o).substr(0, eq)), std::string_view(o).substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_run_config(text, overrides);
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["model"] = c.model;
  j["samples"] = c.samples_n;
  j["depth"] = c.depth_d;
  j["temperature"] = c.temperature;
  j["max_tokens"] = c.max_tokens;
  j["seed"] = c.seed ? nlohmann::ordered_json(*c.seed) : nlohmann::ordered_json(nullptr);
  j["problem_language"] = std::string(to_string(c.prompt.problem_language));
  j["reasoning_language"] = std::string(to_string(c.prompt.reasoning_language));
  j["translate_first"] = c.prompt.translate_first;
  j["instruction"] = std::string(to_string(c.prompt.instruction_mode));
  j["polite"] = c.prompt.polite;
  j["few_shot"] = c.prompt.few_shot_count;
  j["template"] = std::string(to_string(c.prompt.template_id));
  j["similarity"] = c.similarity == Similarity::idf ? "idf" : "jaccard";
  j["parallelism"] = c.parallelism;
  j["timeout_ms"] = c.timeout_ms;
  j["max_output_bytes"] = c.max_output_bytes;
  j["execute_all_blocks"] = c.execute_all_blocks;
  j["fallback_answer"] = c.fallback_answer ? nlohmann::ordered_json(*c.fallback_answer) : nlohmann::ordered_json(nullptr);
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.name = j.at("name").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.samples_n = j.at("samples").get<int>();
    c.depth_d = j.at("depth").get<int>();
    c.temperature = j.at("temperature").get<double>();
    c.max_tokens = j.at("max_tokens").get<int>();
    if (!j.at("seed").is_null()) c.seed = j["seed"].get<std::int64_t>();
    set_run_config_value(c, "prompt.problem_language", j.at("problem_language").get<std::string>());
    set_run_config_value(c, "prompt.reasoning_language", j.at("reasoning_language").get<std::string>());
    c.prompt.translate_first = j.at("translate_first").get<bool>();
    set_run_config_value(c, "prompt.instruction", j.at("instruction").get<std::string>());
    c.prompt.polite = j.at("polite").get<bool>();
    c.prompt.few_shot_count = j.at("few_shot").get<int>();
    set_run_config_value(c, "prompt.template", j.at("template").get<std::string>());
    set_run_config_value(c, "retrieval.similarity", j.at("similarity").get<std::string>());
    c.parallelism = j.at("parallelism").get<int>();
    c.timeout_ms = j.at("timeout_ms").get<int>();
    c.max_output_bytes = j.at("max_output_bytes").get<std::size_t>();
    c.execute_all_blocks = j.at("execute_all_blocks").get<bool>();
    if (!j.at("fallback_answer").is_null()) c.fallback_answer = j["fallback_answer"].get<Answer>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed config object: ") + e.what(), 0);
  }
  return c;
}

}  // namespace tir
