#include "reformer/generate.hpp"

#include "reformer/text.hpp"

namespace reformer {

namespace {

std::string render_shot(const ExamplePair* shot) {
  if (!shot) return "";
  return "Question: " + shot->question + "\nQuery: " + shot->query + "\n";
}

}  // namespace

Explanation get_explanation(const std::string& query, const std::string& role,
                            const ExamplePair* shot, Provider& provider,
                            const PromptCatalog& catalog, double temperature) {
  if (role != "for_fill" && role != "for_validate")
    throw LlmError("unknown explanation role '" + role + "'");
  std::string template_id =
      role == "for_fill" ? "explain_for_fill" : "explain_for_validate";
  std::map<std::string, std::string> bindings = {
      {"query", query},
      {"shot", render_shot(shot)},
  };
  ChatRequest req;
  req.prompt = catalog.render(template_id, bindings);
  req.temperature = temperature;
  // Independent sample streams keep expl1 and expl2 from collapsing into
  // one cached response.
  req.sample_index = role == "for_fill" ? 0 : 1;

  std::string text = first_sentence(provider.chat(req).text);
  if (text.empty()) {
    req.sample_index += 100;  // fresh sample on retry
    text = first_sentence(provider.chat(req).text);
    if (text.empty()) throw LlmError("empty explanation for query: " + query);
  }
  return Explanation{text, role, query};
}

CandidateQuestion fill_template(const QuestionTemplate& tpl, const Explanation& expl,
                                Provider& provider, const PromptCatalog& catalog,
                                double temperature) {
  if (tpl.tokens.empty()) throw LlmError("cannot fill an empty template");
  if (expl.role != "for_fill")
    throw LlmError("fill_template requires a for_fill explanation");

  ChatRequest req;
  req.prompt = catalog.render("fill_template", {{"question_template", tpl.text()},
                                                {"explanation", expl.text}});
  req.temperature = temperature;
  std::string filled = trim(provider.chat(req).text);

  std::vector<std::string> out_tokens = tokenize(filled);
  for (const auto& t : out_tokens) {
    if (t == kMaskToken)
      throw FillContractError("fill output retains a MASK token: " + filled);
  }
  // Every literal template token must appear in the output, in order.
  size_t pos = 0;
  for (const auto& t : tpl.tokens) {
    if (t == kMaskToken) continue;
    std::string want = to_lower(t);
    while (pos < out_tokens.size() && to_lower(out_tokens[pos]) != want) ++pos;
    if (pos == out_tokens.size())
      throw FillContractError("fill output drops template anchor '" + t +
                              "': " + filled);
    ++pos;
  }

  CandidateQuestion cand;
  cand.question = filled;
  cand.query = expl.source_query;
  cand.db_id = tpl.source.db_id;
  cand.provenance = Provenance::Reformer;
  cand.template_text = tpl.text();
  cand.explanation_text = expl.text;
  return cand;
}

AugmentResult reformer_augment(const std::vector<std::string>& new_queries,
                               const DatabaseSchema& schema, const std::string& db_id,
                               const RetrievalIndex& index,
                               const CommonVocabulary& vocab, Provider& provider,
                               const PromptCatalog& catalog,
                               const GenerateConfig& config) {
  AugmentResult result;
  for (const auto& query : new_queries) {
    try {
      AlgebraTree tree = anonymize(parse_sql(query, schema));
      auto hits = get_related_queries(tree, index, config.ted_threshold,
                                      config.max_templates);
      if (hits.empty()) {
        result.skipped_queries.push_back(query);
        continue;
      }
      // Nearest retrieved pair serves as the in-context shot.
      Explanation expl1 = get_explanation(query, "for_fill", &hits[0].pair, provider,
                                          catalog, config.temperature);

      std::vector<CandidateQuestion> candidates;
      for (const auto& hit : hits) {
        QuestionTemplate tpl = mask_schema_tokens(hit.pair.question, vocab);
        tpl.source = hit.pair;
        tpl.source_distance = hit.distance;
        try {
          CandidateQuestion cand =
              fill_template(tpl, expl1, provider, catalog, config.temperature);
          cand.db_id = db_id;
          candidates.push_back(std::move(cand));
        } catch (const FillContractError& e) {
          result.failures.emplace_back(query, e.what());
        }
      }

      Explanation expl2 = get_explanation(query, "for_validate", nullptr, provider,
                                          catalog, config.temperature);
      auto verdicts = cycle_validate(query, std::move(candidates), expl2, provider,
                                     config.lambda, config.top_k);
      for (const auto& v : verdicts) {
        if (v.accepted) result.accepted.push_back(v.candidate);
        result.verdicts.push_back(v);
      }
    } catch (const std::exception& e) {
      result.failures.emplace_back(query, e.what());
    }
  }
  return result;
}

}  // namespace reformer
