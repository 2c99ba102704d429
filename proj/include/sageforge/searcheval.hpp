#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sageforge/corpus.hpp"
#include "sageforge/encoder.hpp"
#include "sageforge/tokenizer.hpp"

namespace sageforge::searcheval {

using encoder::Matrix;

struct SearchItem {
  std::string id;
  std::string text;  // NL query or code
};

struct SearchDataset {
  std::vector<SearchItem> queries;
  std::vector<SearchItem> candidates;
  std::map<std::string, std::vector<std::string>> relevance;  // qid -> relevant cids
  bool exclude_self = false;  // drop the candidate whose id equals the query id

  // Throws IntegrityError on duplicate ids, an empty relevance set, a query
  // without relevance or a relevant id missing from the candidates.
  void validate() const;
};

struct QueryRanking {
  std::string qid;
  std::vector<std::string> order;  // candidate ids, most similar first
};

// Candidate id order used to break similarity ties: numeric when both ids are
// all digits, lexicographic otherwise.
bool id_less(const std::string& a, const std::string& b);

// Mean-pooled embeddings of `texts` in inference mode, one row per text.
// Throws IntegrityError when the model vocabulary does not match the
// tokenizer.
Matrix<float> embed_corpus(const encoder::Params<float>& params, const Tokenizer& tokenizer,
                           std::span<const std::string> texts, std::size_t batch_size = 32);

// Same, additionally checking the checkpoint's tokenizer fingerprint.
Matrix<float> embed_corpus(const encoder::LoadedCheckpoint& ckpt, const Tokenizer& tokenizer,
                           std::span<const std::string> texts, std::size_t batch_size = 32);

// Descending cosine similarity with ties broken by id_less. Throws
// std::invalid_argument on a zero-norm embedding or mismatched dims.
std::vector<std::string> rank(std::span<const float> query, const Matrix<float>& candidates,
                              std::span<const std::string> ids);

std::vector<QueryRanking> rank_all(const SearchDataset& data, const Matrix<float>& query_emb,
                                   const Matrix<float>& candidate_emb);

// Per-query scores; throw IntegrityError on empty relevance.
double reciprocal_rank(const std::vector<std::string>& order, const std::vector<std::string>& relevant);
double average_precision(const std::vector<std::string>& order, const std::vector<std::string>& relevant);

// Throw IntegrityError when a ranked query has no relevance entry.
double mrr(const std::vector<QueryRanking>& rankings, const std::map<std::string, std::vector<std::string>>& relevance);
double map_score(const std::vector<QueryRanking>& rankings,
                 const std::map<std::string, std::vector<std::string>>& relevance);

// Expected reciprocal rank of a single relevant item under a uniformly random
// ranking of n candidates: H_n / n.
double random_mrr_expectation(std::size_t n);

struct EvalReport {
  std::string task;
  std::size_t queries = 0;
  std::size_t candidates = 0;
  double mrr = 0;
  double map = 0;
  struct PerQuery {
    std::string qid;
    double rr = 0;
    double ap = 0;
    std::size_t first_relevant_rank = 0;
  };
  std::vector<PerQuery> per_query;

  nlohmann::ordered_json to_json() const;
};

EvalReport evaluate(const std::string& task, const SearchDataset& data, const std::vector<QueryRanking>& rankings);

// Embeds, ranks and scores a dataset end to end.
EvalReport evaluate(const std::string& task, const SearchDataset& data, const encoder::Params<float>& params,
                    const Tokenizer& tokenizer);

struct SolutionGroup {
  std::string problem;
  std::vector<SearchItem> solutions;
};

// Every sampled solution is a query; its relevant set is the other sampled
// solutions of its problem. Each group keeps k ~ U{2..min(10, size)}
// solutions. Groups of one are dropped with a warning.
SearchDataset build_code2code_dataset(const std::vector<SolutionGroup>& groups, std::uint64_t seed);

struct SimilarityGapReport {
  std::size_t pairs = 0;
  double parallel_mean = 0;
  double random_mean = 0;
  double gap = 0;  // parallel_mean - random_mean
  // Mean cosine between solutions of the same problem, and the NL2Code gap
  // relative to it: (code2code - parallel) / |code2code|.
  std::optional<double> code2code_mean;
  std::optional<double> relative_gap;

  nlohmann::ordered_json to_json() const;
};

// Compares (summary, positive view) cosines against a seeded random
// re-matching without fixed points. Throws std::invalid_argument with fewer
// than 20 pairs.
SimilarityGapReport similarity_gap_report(const encoder::Params<float>& params, const Tokenizer& tokenizer,
                                          std::span<const corpus::BimodalPair> pairs, std::uint64_t seed,
                                          const std::vector<SolutionGroup>* groups = nullptr);

// Three-file layout: queries.jsonl {"qid","text"}, candidates.jsonl
// {"cid","code"}, relevance.jsonl {"qid","relevant":[...]}.
SearchDataset load_search_dataset(const std::string& dir);
void write_search_dataset(const std::string& dir, const SearchDataset& data);

// groups.jsonl: {"problem", "solutions":[{"id","code"}]}.
std::vector<SolutionGroup> load_solution_groups(const std::string& path);

}  // namespace sageforge::searcheval
