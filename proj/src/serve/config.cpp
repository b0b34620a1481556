#include "moocaug/serve/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <regex>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "moocaug/common/text.hpp"

namespace moocaug::serve {
namespace {

using Setter = std::function<void(BuildConfig&, const std::string&)>;

struct Key {
  KeySpec spec;
  Setter set;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError(ConfigErrc::kBadValue, key + ": \"" + value + "\" is not " + expected);
}

[[noreturn]] void out_of_range(const std::string& key, const std::string& value, const std::string& range) {
  throw ConfigError(ConfigErrc::kOutOfRange, key + ": " + value + " outside " + range);
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) bad_value(key, v, "an integer");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(out)) bad_value(key, v, "a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const auto lower = ascii_lower(v);
  if (lower == "true" || lower == "yes" || lower == "on" || lower == "1") return true;
  if (lower == "false" || lower == "no" || lower == "off" || lower == "0") return false;
  bad_value(key, v, "a boolean");
}

std::string checked_url(const std::string& key, const std::string& v) {
  const auto lower = ascii_lower(v);
  for (const std::string_view scheme : {"http://", "https://"}) {
    if (lower.starts_with(scheme) && lower.size() > scheme.size()) return v;
  }
  bad_value(key, v, "an http:// or https:// URL");
}

std::string range_text(double lo, double hi, bool lo_open, bool hi_open) {
  std::ostringstream os;
  os << (lo_open ? '(' : '[') << lo << ", ";
  if (hi == std::numeric_limits<double>::infinity()) {
    os << "inf)";
  } else {
    os << hi << (hi_open ? ')' : ']');
  }
  return os.str();
}

template <typename T>
Key integer(std::string key, std::int64_t lo, std::int64_t hi, std::int64_t fallback, T BuildConfig::*field) {
  const auto range = "[" + std::to_string(lo) + ", " +
                     (hi == std::numeric_limits<std::int64_t>::max() ? std::string("inf)") : std::to_string(hi) + "]");
  return {{key, range, std::to_string(fallback)}, [=](BuildConfig& c, const std::string& v) {
            const auto x = parse_int(key, v);
            if (x < lo || x > hi) out_of_range(key, v, range);
            c.*field = static_cast<T>(x);
          }};
}

template <typename Get>
Key integer_at(std::string key, std::int64_t lo, std::int64_t hi, std::int64_t fallback, Get get) {
  const auto range = "[" + std::to_string(lo) + ", " +
                     (hi == std::numeric_limits<std::int64_t>::max() ? std::string("inf)") : std::to_string(hi) + "]");
  return {{key, range, std::to_string(fallback)}, [=](BuildConfig& c, const std::string& v) {
            const auto x = parse_int(key, v);
            if (x < lo || x > hi) out_of_range(key, v, range);
            auto& ref = get(c);
            ref = static_cast<std::remove_reference_t<decltype(ref)>>(x);
          }};
}

template <typename Get>
Key real_at(std::string key, double lo, double hi, bool lo_open, bool hi_open, std::string fallback, Get get) {
  const auto range = range_text(lo, hi, lo_open, hi_open);
  return {{key, range, std::move(fallback)}, [=](BuildConfig& c, const std::string& v) {
            const auto x = parse_double(key, v);
            if (x < lo || (lo_open && x == lo) || x > hi || (hi_open && x == hi)) out_of_range(key, v, range);
            get(c) = x;
          }};
}

template <typename Get>
Key text_at(std::string key, std::string range, Get get) {
  return {{key, std::move(range), ""}, [=](BuildConfig& c, const std::string& v) { get(c) = v; }};
}

Key path_at(std::string key, std::filesystem::path BuildConfig::*field) {
  return {{key, "path", ""}, [=](BuildConfig& c, const std::string& v) {
            if (v.empty()) bad_value(key, v, "a path");
            c.*field = v;
          }};
}

const std::regex& course_id_pattern() {
  static const std::regex re("[A-Za-z0-9_][A-Za-z0-9._-]*");
  return re;
}

const std::vector<Key>& keys() {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  constexpr auto kInf = std::numeric_limits<double>::infinity();
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({{"course.id", "[A-Za-z0-9_][A-Za-z0-9._-]*", "(required)"}, [](BuildConfig& c, const std::string& v) {
                   if (!std::regex_match(v, course_id_pattern())) bad_value("course.id", v, "a course id");
                   c.course_id = v;
                 }});
    k.push_back({{"course.duration_ms", "[1, inf)", "(derived)"}, [](BuildConfig& c, const std::string& v) {
                   const auto x = parse_int("course.duration_ms", v);
                   if (x < 1) out_of_range("course.duration_ms", v, "[1, inf)");
                   c.duration_ms = x;
                 }});
    k.push_back({{"course.seed", "[0, 2^63)", "1"}, [](BuildConfig& c, const std::string& v) {
                   const auto x = parse_int("course.seed", v);
                   if (x < 0) out_of_range("course.seed", v, "[0, 2^63)");
                   c.seed = static_cast<std::uint64_t>(x);
                 }});
    k.push_back(integer("course.max_concurrency", 1, 64, 4, &BuildConfig::max_concurrency));

    k.push_back(path_at("paths.subtitles", &BuildConfig::subtitles));
    k.push_back(path_at("paths.frames", &BuildConfig::frames));
    k.push_back(path_at("paths.annotations", &BuildConfig::annotations));
    k.push_back(path_at("paths.output", &BuildConfig::output));
    k.push_back(path_at("paths.stopwords", &BuildConfig::stopwords));
    k.push_back(path_at("paths.lemmas", &BuildConfig::lemmas));
    k.push_back(path_at("paths.test_lexicon", &BuildConfig::test_lexicon));
    k.push_back(path_at("paths.example_lexicon", &BuildConfig::example_lexicon));
    k.push_back(path_at("paths.prompt_template", &BuildConfig::prompt_template));

    k.push_back(text_at("frames.extractor", "shell command", [](BuildConfig& c) -> auto& { return c.frames_extractor; }));
    k.push_back(integer_at("frames.sample_interval_ms", 1, kMax, 1000,
                           [](BuildConfig& c) -> auto& { return c.frame_options.sample_interval_ms; }));
    k.push_back(integer_at("frames.source_period_ms", 1, kMax, 1000,
                           [](BuildConfig& c) -> auto& { return c.frame_options.source_period_ms; }));
    k.push_back(real_at("frames.edge_threshold", 0, 1, true, false, "0.1",
                        [](BuildConfig& c) -> auto& { return c.frame_options.edge_threshold; }));

    k.push_back(real_at("slideseg.theta_emd", 0, kInf, true, true, "0.15",
                        [](BuildConfig& c) -> auto& { return c.segmentation.theta_emd; }));
    k.push_back(real_at("slideseg.theta_edge", 0, kInf, true, true, "0.3",
                        [](BuildConfig& c) -> auto& { return c.segmentation.theta_edge; }));
    k.push_back(real_at("slideseg.edge_epsilon", 0, 1, true, false, "1e-6",
                        [](BuildConfig& c) -> auto& { return c.segmentation.edge_epsilon; }));

    k.push_back({{"detector.url", "http(s)://host[:port][/prefix]", "(none)"},
                 [](BuildConfig& c, const std::string& v) {
                   if (v.empty()) {
                     c.detector_url.reset();
                   } else {
                     c.detector_url = checked_url("detector.url", v);
                   }
                 }});
    k.push_back({{"detector.required", "boolean", "false"},
                 [](BuildConfig& c, const std::string& v) { c.detector_required = parse_bool("detector.required", v); }});
    k.push_back(text_at("detector.path", "request path", [](BuildConfig& c) -> auto& { return c.detector.path; }));
    k.push_back(integer_at("detector.max_concurrency", 1, 64, 4,
                           [](BuildConfig& c) -> auto& { return c.detector.max_concurrency; }));

    k.push_back(real_at("elements.annotation_wins_iou", 0, 1, false, false, "0.5",
                        [](BuildConfig& c) -> auto& { return c.element_options.annotation_wins_iou; }));
    k.push_back(real_at("elements.block_gap", 0, 1, false, false, "0.03",
                        [](BuildConfig& c) -> auto& { return c.element_options.fallback.block_gap; }));
    k.push_back(real_at("elements.equation_symbol_ratio", 0, 1, false, false, "0.3",
                        [](BuildConfig& c) -> auto& { return c.element_options.fallback.equation_symbol_ratio; }));
    k.push_back(real_at("elements.code_punctuation_density", 0, 1, false, false, "0.15",
                        [](BuildConfig& c) -> auto& { return c.element_options.fallback.code_punctuation_density; }));
    k.push_back(real_at("elements.question_mark_density", 0, 1, false, false, "0.05",
                        [](BuildConfig& c) -> auto& { return c.element_options.auxiliary.question_mark_density; }));

    k.push_back(integer_at("concepts.window", 2, 100, 4, [](BuildConfig& c) -> auto& { return c.textrank.window; }));
    k.push_back(real_at("concepts.damping", 0, 1, true, true, "0.85",
                        [](BuildConfig& c) -> auto& { return c.textrank.damping; }));
    k.push_back(real_at("concepts.tolerance", 0, 1, true, true, "1e-6",
                        [](BuildConfig& c) -> auto& { return c.textrank.tolerance; }));
    k.push_back(integer_at("concepts.max_iterations", 1, 1000000, 1000,
                           [](BuildConfig& c) -> auto& { return c.textrank.max_iterations; }));
    k.push_back(real_at("concepts.top_fraction", 0, 1, true, false, "0.333333",
                        [](BuildConfig& c) -> auto& { return c.keyphrases.top_fraction; }));
    k.push_back(integer_at("concepts.max_concepts", 1, 200, 15,
                           [](BuildConfig& c) -> auto& { return c.keyphrases.max_concepts; }));
    k.push_back(integer("concepts.gap_ms", 0, kMax, 5000, &BuildConfig::gap_ms));
    k.push_back(real_at("concepts.weight_duration", 0, kInf, false, true, "1.0",
                        [](BuildConfig& c) -> auto& { return c.importance.duration; }));
    k.push_back(real_at("concepts.weight_association", 0, kInf, false, true, "1.0",
                        [](BuildConfig& c) -> auto& { return c.importance.association; }));
    k.push_back(real_at("concepts.weight_inclusion", 0, kInf, false, true, "1.5",
                        [](BuildConfig& c) -> auto& { return c.importance.inclusion; }));
    k.push_back(real_at("concepts.weight_similarity", 0, kInf, false, true, "0.5",
                        [](BuildConfig& c) -> auto& { return c.importance.similarity; }));

    k.push_back(integer_at("relations.window_cues", 1, 1000, 4,
                           [](BuildConfig& c) -> auto& { return c.rules.window_cues; }));
    k.push_back(real_at("relations.tau_pmi", -1, 1, false, false, "0.5",
                        [](BuildConfig& c) -> auto& { return c.rules.tau_pmi; }));
    k.push_back(real_at("relations.tau_sim", 0, 1, false, false, "0.6",
                        [](BuildConfig& c) -> auto& { return c.rules.tau_sim; }));
    k.push_back(real_at("relations.heading_max_y", 0, 1, false, false, "0.3",
                        [](BuildConfig& c) -> auto& { return c.rules.heading_max_y; }));

    k.push_back({{"llm.url", "http(s)://host[:port][/prefix]", "(none)"}, [](BuildConfig& c, const std::string& v) {
                   if (v.empty()) {
                     c.llm_url.reset();
                   } else {
                     c.llm_url = checked_url("llm.url", v);
                   }
                 }});
    k.push_back(text_at("llm.path", "request path", [](BuildConfig& c) -> auto& { return c.llm.path; }));
    k.push_back(integer_at("llm.token_budget", 16, 1000000, 1500,
                           [](BuildConfig& c) -> auto& { return c.llm.token_budget; }));
    k.push_back(integer_at("llm.max_tokens", 1, 1000000, 1024, [](BuildConfig& c) -> auto& { return c.llm.max_tokens; }));
    k.push_back(integer_at("llm.retries", 0, 10, 2, [](BuildConfig& c) -> auto& { return c.llm.retries; }));
    k.push_back(real_at("llm.weight", 0, 1, true, false, "0.6", [](BuildConfig& c) -> auto& { return c.llm.llm_weight; }));
    k.push_back(integer_at("llm.max_concurrency", 1, 64, 4, [](BuildConfig& c) -> auto& { return c.llm.max_concurrency; }));

    k.push_back(integer("structure.topics", 0, 100, 0, &BuildConfig::topics));
    k.push_back(integer("structure.iterations", 1, 100000, 500, &BuildConfig::tot_iterations));
    k.push_back({{"structure.alpha", "(0, inf)", "50 / K"}, [](BuildConfig& c, const std::string& v) {
                   const auto x = parse_double("structure.alpha", v);
                   if (x <= 0) out_of_range("structure.alpha", v, "(0, inf)");
                   c.tot_alpha = x;
                 }});
    k.push_back(real_at("structure.beta", 0, kInf, true, true, "0.01", [](BuildConfig& c) -> auto& { return c.tot_beta; }));
    k.push_back(integer("structure.window_cues", 1, 1000, 2, &BuildConfig::tot_window_cues));
    k.push_back(integer("structure.label_words", 1, 20, 3, &BuildConfig::topic_label_words));
    k.push_back(integer("structure.curve_stride_ms", 1, kMax, 1000, &BuildConfig::curve_stride_ms));
    k.push_back(real_at("structure.node_quantile", 0, 1, false, false, "0.7",
                        [](BuildConfig& c) -> auto& { return c.time_nodes.quantile; }));
    k.push_back(integer_at("structure.node_min_gap_ms", 0, kMax, 15000,
                           [](BuildConfig& c) -> auto& { return c.time_nodes.min_gap_ms; }));

    k.push_back(real_at("layout.r_min", 0, 1, true, false, "0.35", [](BuildConfig& c) -> auto& { return c.layout.r_min; }));
    k.push_back(real_at("layout.r_max", 0, 1, true, false, "1.0", [](BuildConfig& c) -> auto& { return c.layout.r_max; }));
    k.push_back(integer_at("layout.follow_ms", 0, kMax, 60000, [](BuildConfig& c) -> auto& { return c.layout.follow_ms; }));
    k.push_back(real_at("layout.slot_margin", 0, 0.5, false, false, "0.02",
                        [](BuildConfig& c) -> auto& { return c.layout.slot_margin; }));

    k.push_back(integer_at("interaction.focus_dwell_ms", 1, 600000, 3000,
                           [](BuildConfig& c) -> auto& { return c.interaction.focus_dwell_ms; }));
    k.push_back(integer_at("interaction.hover_grace_ms", 0, 600000, 500,
                           [](BuildConfig& c) -> auto& { return c.interaction.hover_grace_ms; }));
    return k;
  }();
  return table;
}

const Key* find_key(std::string_view name) {
  for (const auto& k : keys())
    if (k.spec.key == name) return &k;
  return nullptr;
}

std::string unquote(std::string v) {
  v = trim(v);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return v;
}

void set(BuildConfig& c, const std::string& key, const std::string& raw) {
  const auto* k = find_key(key);
  if (k == nullptr) throw ConfigError(ConfigErrc::kUnknownKey, "unknown config key " + key);
  k->set(c, unquote(raw));
}

void cross_check(const BuildConfig& c) {
  if (c.layout.r_min > c.layout.r_max) {
    throw ConfigError(ConfigErrc::kOutOfRange, "layout.r_min must not exceed layout.r_max");
  }
}

void resolve(std::filesystem::path& p, const std::filesystem::path& base) {
  if (!p.empty() && p.is_relative()) p = (base / p).lexically_normal();
}

std::vector<std::pair<std::string_view, std::filesystem::path*>> path_fields(BuildConfig& c) {
  return {{"paths.subtitles", &c.subtitles},   {"paths.frames", &c.frames},
          {"paths.annotations", &c.annotations}, {"paths.output", &c.output},
          {"paths.stopwords", &c.stopwords},   {"paths.lemmas", &c.lemmas},
          {"paths.test_lexicon", &c.test_lexicon}, {"paths.example_lexicon", &c.example_lexicon},
          {"paths.prompt_template", &c.prompt_template}};
}

}  // namespace

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> specs = [] {
    std::vector<KeySpec> out;
    for (const auto& k : keys()) out.push_back(k.spec);
    return out;
  }();
  return specs;
}

BuildConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(ConfigErrc::kSyntax, "line " + std::to_string(e.line()) + ": " + e.message());
  }
  BuildConfig c;
  c.base_dir = base_dir;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(ConfigErrc::kUnknownKey, "key outside a section: " + section);
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ConfigError(ConfigErrc::kSyntax, "nested key " + section + "." + key);
      set(c, section + "." + key, value.data());
    }
  }
  cross_check(c);
  for (auto& [key, p] : path_fields(c)) resolve(*p, c.base_dir);
  c.interaction.follow_ms = c.layout.follow_ms;
  c.llm.max_concurrency = std::min(c.llm.max_concurrency, c.max_concurrency);
  c.rules.max_concurrency = c.max_concurrency;
  return c;
}

BuildConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrc::kMissingKey, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  auto c = parse_config(ss.str(), std::filesystem::absolute(base).lexically_normal());
  apply_environment(c);
  return c;
}

void apply_override(BuildConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(ConfigErrc::kSyntax, "override must read key=value: " + std::string(assignment));
  }
  const auto key = trim(assignment.substr(0, eq));
  set(config, key, std::string(assignment.substr(eq + 1)));
  cross_check(config);
  // Command-line paths resolve against the working directory.
  for (auto& [name, p] : path_fields(config))
    if (name == key) resolve(*p, std::filesystem::current_path());
  config.interaction.follow_ms = config.layout.follow_ms;
  config.rules.max_concurrency = config.max_concurrency;
}

void apply_environment(BuildConfig& config) {
  if (const char* v = std::getenv(std::string(kDetectorUrlEnv).c_str())) set(config, "detector.url", v);
  if (const char* v = std::getenv(std::string(kLlmUrlEnv).c_str())) set(config, "llm.url", v);
}

void check_complete(const BuildConfig& config) {
  std::vector<std::string> missing;
  if (config.course_id.empty()) missing.push_back("course.id");
  if (config.subtitles.empty()) missing.push_back("paths.subtitles");
  if (config.frames.empty() && config.frames_extractor.empty()) missing.push_back("paths.frames");
  if (config.output.empty()) missing.push_back("paths.output");
  if (missing.empty()) return;
  std::string msg = "missing required keys:";
  for (const auto& m : missing) msg += " " + m;
  throw ConfigError(ConfigErrc::kMissingKey, msg);
}

}  // namespace moocaug::serve
