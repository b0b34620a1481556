#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>
#include <unordered_map>

#include "moocaug/relations/relations.hpp"

namespace moocaug::relations {
namespace {

constexpr std::size_t kind_index(RelationKind k) { return static_cast<std::size_t>(k); }

// Strongly connected component label per node (Tarjan).
std::vector<std::size_t> components(std::size_t n, const std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> comp(n, n), index(n, n), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, next_comp = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (const auto w : out[v]) {
      if (index[w] == n) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v]) return;
    for (;;) {
      const auto w = stack.back();
      stack.pop_back();
      on_stack[w] = 0;
      comp[w] = next_comp;
      if (w == v) break;
    }
    ++next_comp;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] == n) visit(v);
  return comp;
}

}  // namespace

std::optional<std::size_t> ConceptGraph::index_of(std::string_view id) const {
  const auto it = std::find(concept_ids.begin(), concept_ids.end(), id);
  if (it == concept_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - concept_ids.begin());
}

std::optional<double> ConceptGraph::weight(std::string_view src, std::string_view dst, RelationKind kind) const {
  auto a = src, b = dst;
  if (is_symmetric(kind) && b < a) std::swap(a, b);
  for (const auto& r : relationships) {
    if (r.kind == kind && r.src == a && r.dst == b) return r.weight;
  }
  return std::nullopt;
}

std::size_t ConceptGraph::degree(std::size_t i, RelationKind kind) const {
  if (i >= concept_ids.size()) return 0;
  std::size_t d = 0;
  for (const auto& r : relationships) {
    if (r.kind == kind && (r.src == concept_ids[i] || r.dst == concept_ids[i])) ++d;
  }
  return d;
}

concepts::GraphDegrees ConceptGraph::degrees(std::size_t i) const {
  return {degree(i, RelationKind::kAssociation), degree(i, RelationKind::kInclusion),
          degree(i, RelationKind::kSimilarity)};
}

std::optional<std::vector<std::size_t>> ConceptGraph::inclusion_order() const {
  const auto& out = adjacency[kind_index(RelationKind::kInclusion)];
  const std::size_t n = concept_ids.size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t v = 0; v < n && v < out.size(); ++v)
    for (const auto w : out[v]) ++indegree[w];
  std::vector<std::size_t> ready, order;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const auto v = ready.back();
    ready.pop_back();
    order.push_back(v);
    if (v >= out.size()) continue;
    for (const auto w : out[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

ConceptGraph merge_validate(const std::vector<std::string>& concept_ids, const std::vector<Relationship>& rule_rels,
                            const std::vector<Relationship>& llm_rels) {
  ConceptGraph g;
  g.concept_ids = concept_ids;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < concept_ids.size(); ++i) index.emplace(concept_ids[i], i);

  std::map<std::tuple<RelationKind, std::string, std::string>, Relationship> merged;
  auto fold = [&](const std::vector<Relationship>& rels, const char* origin) {
    for (const auto& in : rels) {
      std::string why;
      if (!index.count(in.src) || !index.count(in.dst)) why = "unknown concept id";
      else if (in.src == in.dst) why = "self-loop";
      else if (!(in.weight > 0 && in.weight <= 1)) why = "weight outside (0, 1]";
      if (!why.empty()) {
        g.warnings.push_back(std::string(origin) + " relationship " + in.src + " -> " + in.dst + " rejected: " + why);
        continue;
      }
      Relationship r = in;
      if (is_symmetric(r.kind) && r.dst < r.src) std::swap(r.src, r.dst);
      auto [it, fresh] = merged.emplace(std::make_tuple(r.kind, r.src, r.dst), r);
      if (fresh) continue;
      auto& cur = it->second;
      cur.weight = 1 - (1 - cur.weight) * (1 - r.weight);
      cur.evidence.insert(cur.evidence.end(), r.evidence.begin(), r.evidence.end());
    }
  };
  fold(rule_rels, "rule");
  fold(llm_rels, "llm");
  for (auto& [key, r] : merged) g.relationships.push_back(std::move(r));

  // Cut inclusion cycles. An edge lies on a cycle iff both ends share a
  // strongly connected component.
  const std::size_t n = concept_ids.size();
  for (;;) {
    std::vector<std::vector<std::size_t>> out(n);
    for (const auto& r : g.relationships)
      if (r.kind == RelationKind::kInclusion) out[index[r.src]].push_back(index[r.dst]);
    const auto comp = components(n, out);
    std::optional<std::size_t> victim;
    for (std::size_t e = 0; e < g.relationships.size(); ++e) {
      const auto& r = g.relationships[e];
      if (r.kind != RelationKind::kInclusion || comp[index[r.src]] != comp[index[r.dst]]) continue;
      if (!victim) {
        victim = e;
        continue;
      }
      const auto& v = g.relationships[*victim];
      if (std::tie(r.weight, r.src, r.dst) < std::tie(v.weight, v.src, v.dst)) victim = e;
    }
    if (!victim) break;
    g.removed.push_back(g.relationships[*victim]);
    g.relationships.erase(g.relationships.begin() + static_cast<std::ptrdiff_t>(*victim));
  }

  for (auto& adj : g.adjacency) adj.assign(n, {});
  for (const auto& r : g.relationships) {
    const auto a = index[r.src], b = index[r.dst];
    auto& adj = g.adjacency[kind_index(r.kind)];
    adj[a].push_back(b);
    if (is_symmetric(r.kind)) adj[b].push_back(a);
  }
  for (auto& adj : g.adjacency)
    for (auto& list : adj) std::sort(list.begin(), list.end());

  if (!g.inclusion_order()) throw RelationsError(RelationsErrc::kInvariantViolation, "inclusion subgraph has a cycle");
  return g;
}

Json to_json(const ConceptGraph& g) {
  Json rels = Json::array(), removed = Json::array();
  for (const auto& r : g.relationships) rels.push_back(to_json(r));
  for (const auto& r : g.removed) removed.push_back(to_json(r));
  return {{"relationships", rels}, {"removed_cycle_edges", removed}};
}

}  // namespace moocaug::relations
