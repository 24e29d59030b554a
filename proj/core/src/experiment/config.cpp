#include "planrag/experiment/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "planrag/error.hpp"

namespace planrag::experiment {
namespace {

using pipeline::PipelineConfig;
using pipeline::Variant;

const std::set<std::string> kTopLevelKeys = {
    "dataset",    "synthetic", "backends",   "strategy_rows", "strategies", "num_runs",     "base_seed",
    "nli_threshold", "output_dir", "cache_dir", "concurrency",   "templates_dir"};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::kConfigInvalid, msg); }

PipelineConfig row_config(Variant v) {
  PipelineConfig c;
  c.variant = v;
  return c;
}

backends::HttpEndpoint endpoint_from_json(const nlohmann::json& j, const std::string& name) {
  if (!j.is_object()) invalid("backends." + name + " must be an object");
  backends::HttpEndpoint e;
  if (!j.contains("url")) invalid("backends." + name + ".url is required");
  e.url = j.at("url").get<std::string>();
  e.method = j.value("method", e.method);
  e.token_env = j.value("token_env", e.token_env);
  e.timeout_ms = j.value("timeout_ms", e.timeout_ms);
  e.max_attempts = j.value("max_attempts", e.max_attempts);
  e.backoff_base_ms = j.value("backoff_base_ms", e.backoff_base_ms);
  e.rate_per_second = j.value("rate_per_second", e.rate_per_second);
  e.max_in_flight = j.value("max_in_flight", e.max_in_flight);
  if (e.max_attempts < 1 || e.max_in_flight < 1 || e.timeout_ms < 1) {
    invalid("backends." + name + ": attempts, in-flight limit and timeout must be positive");
  }
  return e;
}

nlohmann::json endpoint_to_json(const backends::HttpEndpoint& e) {
  return {{"url", e.url},
          {"method", e.method},
          {"token_env", e.token_env},
          {"timeout_ms", e.timeout_ms},
          {"max_attempts", e.max_attempts},
          {"backoff_base_ms", e.backoff_base_ms},
          {"rate_per_second", e.rate_per_second},
          {"max_in_flight", e.max_in_flight}};
}

BackendConfig backends_from_json(const nlohmann::json& j) {
  BackendConfig b;
  const auto mode = j.value("mode", std::string("synthetic"));
  if (mode == "synthetic") b.mode = BackendMode::kSynthetic;
  else if (mode == "live") b.mode = BackendMode::kLive;
  else invalid("backends.mode must be 'synthetic' or 'live', got '" + mode + "'");
  for (auto [name, slot] : {std::pair{"generate", &b.generate}, std::pair{"search", &b.search},
                            std::pair{"qa", &b.qa}, std::pair{"entail", &b.entail}}) {
    if (j.contains(name)) *slot = endpoint_from_json(j.at(name), name);
  }
  b.corpus_dir = j.value("corpus_dir", b.corpus_dir);
  b.max_prompt_chars = j.value("max_prompt_chars", b.max_prompt_chars);
  return b;
}

bool valid_label(const std::string& label) {
  return !label.empty() && std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
           c == '.';
  });
}

}  // namespace

const std::vector<StrategyRow>& builtin_strategy_rows() {
  static const std::vector<StrategyRow> rows = [] {
    std::vector<StrategyRow> r;
    r.push_back({"NO_RETRIEVAL", row_config(Variant::kNoRetrieval)});
    r.push_back({"ONE_RETRIEVAL", row_config(Variant::kOneRetrieval)});
    auto twice = row_config(Variant::kOneRetrieval);
    twice.k_initial_multiplier = 2;
    r.push_back({"ONE_RETRIEVAL_2X", twice});
    r.push_back({"PLAN_VAR_A", row_config(Variant::kPlanVarA)});
    r.push_back({"PLAN_VAR_B", row_config(Variant::kPlanVarB)});
    auto no_second = row_config(Variant::kPlanVarB);
    no_second.enable_second_search = false;
    r.push_back({"PLAN_VAR_B_NO_SECOND_SEARCH", no_second});
    auto no_skip = row_config(Variant::kPlanVarB);
    no_skip.mark_unanswerable = false;
    r.push_back({"PLAN_VAR_B_NO_UNANSWERABLE", no_skip});
    auto no_plan = row_config(Variant::kPlanVarA);
    no_plan.use_outline = false;
    r.push_back({"PLAN_VAR_A_NO_PLAN", no_plan});
    return r;
  }();
  return rows;
}

StrategyRow resolve_strategy(const ExperimentConfig& config, const std::string& label) {
  StrategyRow row;
  const auto custom = std::find_if(config.strategy_rows.begin(), config.strategy_rows.end(),
                                   [&](const StrategyRow& r) { return r.label == label; });
  if (custom != config.strategy_rows.end()) {
    row = *custom;
  } else {
    const auto& builtins = builtin_strategy_rows();
    const auto it = std::find_if(builtins.begin(), builtins.end(), [&](const StrategyRow& r) { return r.label == label; });
    if (it == builtins.end()) invalid("unknown strategy label '" + label + "'");
    row = *it;
  }
  if (config.num_runs) row.config.num_runs = *config.num_runs;
  return row;
}

std::string strategy_slug(const std::string& label) {
  std::string out = label;
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (concurrency < 1) invalid("concurrency must be >= 1");
  if (num_runs && *num_runs < 1) invalid("num_runs must be >= 1");
  if (!(nli_threshold >= 0.0 && nli_threshold <= 1.0)) invalid("nli_threshold must lie in [0, 1]");
  if (output_dir.empty()) invalid("output_dir must not be empty");
  if (strategies.empty()) invalid("no strategies selected");

  std::set<std::string> labels;
  for (const auto& row : strategy_rows) {
    if (!valid_label(row.label)) invalid("strategy label '" + row.label + "' must match [A-Za-z0-9_.-]+");
    if (!labels.insert(row.label).second) invalid("duplicate strategy label '" + row.label + "'");
  }
  std::set<std::string> slugs;
  for (const auto& label : strategies) {
    const auto row = resolve_strategy(*this, label);
    if (!slugs.insert(strategy_slug(label)).second) invalid("strategy '" + label + "' is listed twice");
    try {
      row.config.validate();
    } catch (const Error& e) {
      invalid("strategy '" + label + "': " + e.what());
    }
  }

  if (backends.mode == BackendMode::kLive) {
    if (dataset.empty()) invalid("live mode needs a dataset (entity list)");
    if (!backends.generate) invalid("live mode needs backends.generate");
    if (!backends.qa) invalid("live mode needs backends.qa");
    if (!backends.entail) invalid("live mode needs backends.entail");
    if (!backends.search && backends.corpus_dir.empty()) invalid("live mode needs backends.search or backends.corpus_dir");
  }
  if (synthetic) {
    try {
      corpus::build_synthetic_world(*synthetic);
    } catch (const Error& e) {
      invalid(std::string("synthetic: ") + e.what());
    }
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) invalid("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kTopLevelKeys.count(key)) invalid("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    c.dataset = j.value("dataset", c.dataset);
    if (j.contains("synthetic")) c.synthetic = corpus::world_params_from_json(j.at("synthetic"));
    if (j.contains("backends")) c.backends = backends_from_json(j.at("backends"));
    if (j.contains("strategy_rows")) {
      for (const auto& r : j.at("strategy_rows")) {
        StrategyRow row;
        row.label = r.at("label").get<std::string>();
        if (r.contains("config")) row.config = r.at("config").get<PipelineConfig>();
        c.strategy_rows.push_back(std::move(row));
      }
    }
    if (j.contains("strategies")) c.strategies = j.at("strategies").get<std::vector<std::string>>();
    if (j.contains("num_runs")) c.num_runs = j.at("num_runs").get<int>();
    c.base_seed = j.value("base_seed", c.base_seed);
    c.nli_threshold = j.value("nli_threshold", c.nli_threshold);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.cache_dir = j.value("cache_dir", c.cache_dir);
    c.concurrency = j.value("concurrency", c.concurrency);
    c.templates_dir = j.value("templates_dir", c.templates_dir);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json backends = {{"mode", c.backends.mode == BackendMode::kSynthetic ? "synthetic" : "live"},
                             {"corpus_dir", c.backends.corpus_dir},
                             {"max_prompt_chars", c.backends.max_prompt_chars}};
  for (auto [name, slot] : {std::pair{"generate", &c.backends.generate}, std::pair{"search", &c.backends.search},
                            std::pair{"qa", &c.backends.qa}, std::pair{"entail", &c.backends.entail}}) {
    if (*slot) backends[name] = endpoint_to_json(**slot);
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.strategy_rows) rows.push_back({{"label", r.label}, {"config", r.config}});
  nlohmann::json j = {{"dataset", c.dataset},
                      {"backends", backends},
                      {"strategy_rows", rows},
                      {"strategies", c.strategies},
                      {"base_seed", c.base_seed},
                      {"nli_threshold", c.nli_threshold},
                      {"output_dir", c.output_dir},
                      {"cache_dir", c.cache_dir},
                      {"concurrency", c.concurrency},
                      {"templates_dir", c.templates_dir}};
  if (c.synthetic) j["synthetic"] = corpus::to_json(*c.synthetic);
  if (c.num_runs) j["num_runs"] = *c.num_runs;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  auto c = config_from_json(j);
  const auto base = path.parent_path();
  for (auto* p : {&c.dataset, &c.backends.corpus_dir, &c.templates_dir, &c.cache_dir, &c.output_dir}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  }
  return c;
}

ExperimentConfig demo_config() {
  ExperimentConfig c;
  c.synthetic = corpus::WorldParams{};
  c.strategies = {"NO_RETRIEVAL", "ONE_RETRIEVAL", "PLAN_VAR_A", "PLAN_VAR_B"};
  c.output_dir = "demo_out";
  return c;
}

}  // namespace planrag::experiment
