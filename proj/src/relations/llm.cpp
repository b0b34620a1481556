#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "moocaug/common/parallel.hpp"
#include "moocaug/relations/relations.hpp"

namespace moocaug::relations {
namespace {

std::string require_string(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw RelationsError(RelationsErrc::kInvalidTemplate, std::string("prompt template: missing string \"") + key + "\"");
  }
  return *it;
}

struct ChunkReply {
  bool parsed = false;
  std::size_t requests = 0;
  std::vector<Relationship> relationships;
  std::vector<DroppedProposal> dropped;
};

}  // namespace

std::string_view to_string(RelationKind k) {
  switch (k) {
    case RelationKind::kAssociation:
      return "Association";
    case RelationKind::kInclusion:
      return "Inclusion";
    case RelationKind::kSimilarity:
      return "Similarity";
  }
  return "Association";
}

std::optional<RelationKind> parse_relation_kind(std::string_view name) {
  const std::string lowered = ascii_lower(trim(name));
  for (const auto k : kAllRelationKinds) {
    if (ascii_lower(to_string(k)) == lowered) return k;
  }
  return std::nullopt;
}

Json to_json(const Relationship& r) {
  Json evidence = Json::array();
  for (const auto& e : r.evidence) {
    evidence.push_back({{"source", e.source == EvidenceSource::kRule ? "Rule" : "LLM"}, {"detail", e.detail}});
  }
  return {{"src", r.src}, {"dst", r.dst}, {"kind", to_string(r.kind)}, {"weight", r.weight}, {"evidence", evidence}};
}

std::vector<TranscriptChunk> chunk_transcript(const ingest::Transcript& transcript, std::size_t token_budget) {
  const auto& cues = transcript.cues;
  std::vector<std::size_t> words(cues.size());
  for (std::size_t i = 0; i < cues.size(); ++i) words[i] = tokenize_words(cues[i].text).size();

  std::vector<TranscriptChunk> chunks;
  std::size_t start = 0;
  while (start < cues.size()) {
    std::size_t end = start;
    std::size_t total = words[start];
    while (end + 1 < cues.size() && total + words[end + 1] <= token_budget) total += words[++end];
    TranscriptChunk c{start, end, {}};
    for (std::size_t i = start; i <= end; ++i) {
      if (i > start) c.text += '\n';
      c.text += cues[i].text;
    }
    chunks.push_back(std::move(c));
    if (end + 1 >= cues.size()) break;
    start = end > start ? end : end + 1;
  }
  return chunks;
}

PromptTemplate PromptTemplate::parse(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw RelationsError(RelationsErrc::kInvalidTemplate, std::string("prompt template: ") + e.what());
  }
  if (!j.is_object()) throw RelationsError(RelationsErrc::kInvalidTemplate, "prompt template: not an object");
  PromptTemplate t;
  const auto version = j.find("template_version");
  if (version == j.end() || !version->is_number_integer()) {
    throw RelationsError(RelationsErrc::kInvalidTemplate, "prompt template: missing template_version");
  }
  t.version_ = *version;
  t.system_ = require_string(j, "system");
  t.definitions_ = require_string(j, "relation_definitions");
  t.instruction_ = require_string(j, "instruction");
  t.layout_ = require_string(j, "layout");
  if (const auto shots = j.find("few_shot"); shots != j.end()) {
    if (!shots->is_array()) throw RelationsError(RelationsErrc::kInvalidTemplate, "prompt template: few_shot");
    for (const auto& s : *shots) {
      if (!s.is_object() || !s.contains("concepts") || !s.contains("transcript") || !s.contains("answer")) {
        throw RelationsError(RelationsErrc::kInvalidTemplate, "prompt template: malformed few_shot entry");
      }
      t.few_shot_.push_back(s);
    }
  }
  return t;
}

PromptTemplate PromptTemplate::builtin() { return parse(defaults::relation_prompt_template()); }

std::string PromptTemplate::render(const std::vector<std::string>& concept_labels, std::string_view transcript) const {
  std::string shots;
  for (const auto& s : few_shot_) {
    shots += "Example concepts: " + s["concepts"].dump() + "\n";
    shots += "Example transcript:\n" + s["transcript"].get<std::string>() + "\n";
    shots += "Example answer: " + s["answer"].get<std::string>() + "\n\n";
  }
  const std::map<std::string, std::string, std::less<>> slots{
      {"system", system_},
      {"relation_definitions", definitions_},
      {"few_shot", shots},
      {"concepts", Json(concept_labels).dump()},
      {"transcript", std::string(transcript)},
      {"instruction", instruction_},
  };
  // Single pass so braces inside substituted text are never expanded.
  std::string out;
  std::size_t i = 0;
  while (i < layout_.size()) {
    if (layout_[i] == '{') {
      const auto close = layout_.find('}', i);
      if (close != std::string::npos) {
        const auto slot = slots.find(std::string_view(layout_).substr(i + 1, close - i - 1));
        if (slot != slots.end()) {
          out += slot->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += layout_[i++];
  }
  return out;
}

Json parse_reply_array(std::string_view text) {
  auto try_parse = [](std::string_view s) -> std::optional<Json> {
    Json j = Json::parse(s, nullptr, false);
    if (j.is_discarded() || !j.is_array()) return std::nullopt;
    return j;
  };
  if (auto j = try_parse(text)) return *j;
  const auto open = text.find('[');
  const auto close = text.rfind(']');
  if (open != std::string_view::npos && close != std::string_view::npos && open < close) {
    if (auto j = try_parse(text.substr(open, close - open + 1))) return *j;
  }
  throw RelationsError(RelationsErrc::kAllRetriesMalformed, "reply holds no JSON array");
}

LlmResult llm_enrich(JsonTransport& client, const std::vector<TranscriptChunk>& chunks,
                     const std::vector<concepts::Concept>& concepts, const PromptTemplate& prompt,
                     const LlmOptions& options, const TextAnalyzer& analyzer) {
  std::unordered_map<std::string, std::string> id_by_label;
  std::vector<std::string> labels;
  for (const auto& c : concepts) {
    labels.push_back(c.label);
    id_by_label.emplace(c.label, c.id);
    id_by_label.emplace(analyzer.canonical(c.label), c.id);
  }
  auto resolve = [&](const Json& v) -> std::optional<std::string> {
    if (!v.is_string()) return std::nullopt;
    const auto& s = v.get_ref<const std::string&>();
    if (auto it = id_by_label.find(ascii_lower(trim(s))); it != id_by_label.end()) return it->second;
    if (auto it = id_by_label.find(analyzer.canonical(s)); it != id_by_label.end()) return it->second;
    return std::nullopt;
  };

  std::vector<std::size_t> order(chunks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto replies = parallel_map(order, options.max_concurrency, [&](std::size_t ci) {
    const auto& chunk = chunks[ci];
    const Json request = {{"prompt", prompt.render(labels, chunk.text)}, {"max_tokens", options.max_tokens}};
    ChunkReply reply;
    Json entries;
    for (int attempt = 0; attempt <= options.retries && !reply.parsed; ++attempt) {
      ++reply.requests;
      Json response;
      try {
        response = client.post(options.path, request);
      } catch (const TransportError& e) {
        if (e.code() == TransportErrc::kInvalidPayload) continue;
        throw RelationsError(RelationsErrc::kClientUnreachable, e.what());
      }
      const auto text = response.is_object() ? response.find("text") : response.end();
      if (!response.is_object() || text == response.end() || !text->is_string()) continue;
      try {
        entries = parse_reply_array(text->get_ref<const std::string&>());
        reply.parsed = true;
      } catch (const RelationsError&) {
      }
    }
    if (!reply.parsed) return reply;

    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      auto drop = [&](std::string reason) { reply.dropped.push_back({ci, i, std::move(reason)}); };
      if (!e.is_object()) {
        drop("entry is not an object");
        continue;
      }
      const auto src = resolve(e.value("src_label", Json()));
      const auto dst = resolve(e.value("dst_label", Json()));
      if (!src || !dst) {
        drop("unknown concept label");
        continue;
      }
      const auto kind_field = e.value("kind", Json());
      const auto kind = kind_field.is_string() ? parse_relation_kind(kind_field.get<std::string>()) : std::nullopt;
      if (!kind) {
        drop("unknown relationship kind");
        continue;
      }
      if (*src == *dst) {
        drop("self-loop");
        continue;
      }
      const auto confidence = e.value("confidence", Json());
      if (!confidence.is_number() || confidence.get<double>() < 0 || confidence.get<double>() > 1) {
        drop("confidence missing or outside [0, 1]");
        continue;
      }
      char detail[128];
      std::snprintf(detail, sizeof detail, "chunk %zu (cues %zu-%zu), confidence %.2f", ci, chunk.first_cue,
                    chunk.last_cue, confidence.get<double>());
      Relationship r{*src, *dst, *kind, options.llm_weight, {{EvidenceSource::kLlm, detail}}};
      if (is_symmetric(r.kind) && r.dst < r.src) std::swap(r.src, r.dst);
      reply.relationships.push_back(std::move(r));
    }
    return reply;
  });

  // Overlapping chunks may repeat a proposal; it counts once.
  LlmResult result;
  std::map<std::tuple<RelationKind, std::string, std::string>, Relationship> distinct;
  for (std::size_t ci = 0; ci < replies.size(); ++ci) {
    const auto& r = replies[ci];
    result.requests += r.requests;
    if (!r.parsed) result.skipped_chunks.push_back(ci);
    result.dropped.insert(result.dropped.end(), r.dropped.begin(), r.dropped.end());
    for (const auto& rel : r.relationships) {
      auto [it, fresh] = distinct.emplace(std::make_tuple(rel.kind, rel.src, rel.dst), rel);
      if (!fresh) it->second.evidence.insert(it->second.evidence.end(), rel.evidence.begin(), rel.evidence.end());
    }
  }
  for (auto& [key, rel] : distinct) result.proposals.push_back(std::move(rel));
  return result;
}

}  // namespace moocaug::relations
