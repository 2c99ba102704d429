#include "sageforge/searcheval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sageforge/trainer.hpp"

namespace sageforge::searcheval {

namespace fs = std::filesystem;
using nlohmann::json;

void SearchDataset::validate() const {
  std::set<std::string> qids;
  std::set<std::string> cids;
  for (const auto& q : queries) {
    if (!qids.insert(q.id).second) throw IntegrityError("duplicate query id '" + q.id + "'");
  }
  for (const auto& c : candidates) {
    if (!cids.insert(c.id).second) throw IntegrityError("duplicate candidate id '" + c.id + "'");
  }
  for (const auto& q : queries) {
    auto it = relevance.find(q.id);
    if (it == relevance.end() || it->second.empty()) throw IntegrityError("query '" + q.id + "' has no relevant ids");
    for (const auto& r : it->second) {
      if (!cids.count(r)) throw IntegrityError("relevant id '" + r + "' is not a candidate");
      if (exclude_self && r == q.id) throw IntegrityError("query '" + q.id + "' lists itself as relevant");
    }
  }
}

bool id_less(const std::string& a, const std::string& b) {
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (digits(a) && digits(b)) {
    const auto sa = a.find_first_not_of('0');
    const auto sb = b.find_first_not_of('0');
    const std::string_view va = sa == std::string::npos ? "" : std::string_view(a).substr(sa);
    const std::string_view vb = sb == std::string::npos ? "" : std::string_view(b).substr(sb);
    if (va.size() != vb.size()) return va.size() < vb.size();
    if (va != vb) return va < vb;
  }
  return a < b;
}

Matrix<float> embed_corpus(const encoder::Params<float>& params, const Tokenizer& tokenizer,
                           std::span<const std::string> texts, std::size_t batch_size) {
  if (params.config().vocab_size != tokenizer.vocab_size()) {
    throw IntegrityError("model vocabulary (" + std::to_string(params.config().vocab_size) +
                         ") does not match the tokenizer (" + std::to_string(tokenizer.vocab_size()) + ")");
  }
  const std::size_t dim = params.config().model_dim;
  Matrix<float> out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(dim));
  batch_size = std::max<std::size_t>(1, batch_size);
  for (std::size_t start = 0; start < texts.size(); start += batch_size) {
    const std::size_t end = std::min(texts.size(), start + batch_size);
    std::vector<std::vector<TokenId>> seqs;
    for (std::size_t i = start; i < end; ++i) {
      seqs.push_back(trainer::wrap_sequence(tokenizer.encode_ids(texts[i]), tokenizer, params.config().max_len));
    }
    const auto batch = trainer::pad_batch(seqs, tokenizer.pad_id());
    const auto pass = encoder::forward<float>(params, batch.input, batch.attention, batch.rows, batch.width, false,
                                              nullptr);
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start)) =
        encoder::pool_mean<float>(pass);
  }
  return out;
}

Matrix<float> embed_corpus(const encoder::LoadedCheckpoint& ckpt, const Tokenizer& tokenizer,
                           std::span<const std::string> texts, std::size_t batch_size) {
  const auto fp = hex64(tokenizer.fingerprint());
  if (!ckpt.meta.tokenizer_fingerprint.empty() && ckpt.meta.tokenizer_fingerprint != fp) {
    throw IntegrityError("checkpoint was trained with tokenizer " + ckpt.meta.tokenizer_fingerprint + ", got " + fp);
  }
  return embed_corpus(ckpt.params, tokenizer, texts, batch_size);
}

std::vector<std::string> rank(std::span<const float> query, const Matrix<float>& candidates,
                              std::span<const std::string> ids) {
  if (static_cast<std::size_t>(candidates.cols()) != query.size()) {
    throw std::invalid_argument("rank: query and candidate dims differ");
  }
  if (static_cast<std::size_t>(candidates.rows()) != ids.size()) {
    throw std::invalid_argument("rank: one id per candidate row expected");
  }
  const Eigen::Map<const encoder::RowVector<float>> q(query.data(), static_cast<Eigen::Index>(query.size()));
  const double qn = q.cast<double>().norm();
  if (!(qn > 0)) throw std::invalid_argument("rank: zero-norm query embedding");
  std::vector<double> sims(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto row = candidates.row(static_cast<Eigen::Index>(i)).cast<double>();
    const double cn = row.norm();
    if (!(cn > 0)) throw std::invalid_argument("rank: zero-norm candidate embedding '" + ids[i] + "'");
    sims[i] = row.dot(q.cast<double>()) / (qn * cn);
  }
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    return id_less(ids[a], ids[b]);
  });
  std::vector<std::string> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(ids[i]);
  return out;
}

std::vector<QueryRanking> rank_all(const SearchDataset& data, const Matrix<float>& query_emb,
                                   const Matrix<float>& candidate_emb) {
  std::vector<std::string> ids;
  for (const auto& c : data.candidates) ids.push_back(c.id);
  std::vector<QueryRanking> out;
  for (std::size_t q = 0; q < data.queries.size(); ++q) {
    const encoder::RowVector<float> qv = query_emb.row(static_cast<Eigen::Index>(q));
    QueryRanking r{data.queries[q].id, {}};
    if (data.exclude_self) {
      std::vector<std::string> pool_ids;
      std::vector<Eigen::Index> rows;
      for (std::size_t c = 0; c < ids.size(); ++c) {
        if (ids[c] == r.qid) continue;
        pool_ids.push_back(ids[c]);
        rows.push_back(static_cast<Eigen::Index>(c));
      }
      Matrix<float> pool(static_cast<Eigen::Index>(rows.size()), candidate_emb.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) pool.row(static_cast<Eigen::Index>(i)) = candidate_emb.row(rows[i]);
      r.order = rank({qv.data(), static_cast<std::size_t>(qv.size())}, pool, pool_ids);
    } else {
      r.order = rank({qv.data(), static_cast<std::size_t>(qv.size())}, candidate_emb, ids);
    }
    out.push_back(std::move(r));
  }
  return out;
}

double reciprocal_rank(const std::vector<std::string>& order, const std::vector<std::string>& relevant) {
  if (relevant.empty()) throw IntegrityError("empty relevance set");
  const std::set<std::string> rel(relevant.begin(), relevant.end());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (rel.count(order[k])) return 1.0 / static_cast<double>(k + 1);
  }
  return 0.0;
}

double average_precision(const std::vector<std::string>& order, const std::vector<std::string>& relevant) {
  if (relevant.empty()) throw IntegrityError("empty relevance set");
  const std::set<std::string> rel(relevant.begin(), relevant.end());
  double sum = 0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (rel.count(order[k])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(rel.size());
}

namespace {

template <typename F>
double mean_over(const std::vector<QueryRanking>& rankings,
                 const std::map<std::string, std::vector<std::string>>& relevance, F score) {
  if (rankings.empty()) return 0.0;
  double total = 0;
  for (const auto& r : rankings) {
    auto it = relevance.find(r.qid);
    if (it == relevance.end()) throw IntegrityError("no relevance entry for query '" + r.qid + "'");
    total += score(r.order, it->second);
  }
  return total / static_cast<double>(rankings.size());
}

}  // namespace

double mrr(const std::vector<QueryRanking>& rankings,
           const std::map<std::string, std::vector<std::string>>& relevance) {
  return mean_over(rankings, relevance, reciprocal_rank);
}

double map_score(const std::vector<QueryRanking>& rankings,
                 const std::map<std::string, std::vector<std::string>>& relevance) {
  return mean_over(rankings, relevance, average_precision);
}

double random_mrr_expectation(std::size_t n) {
  if (n == 0) return 0.0;
  double h = 0;
  for (std::size_t k = 1; k <= n; ++k) h += 1.0 / static_cast<double>(k);
  return h / static_cast<double>(n);
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["queries"] = queries;
  j["candidates"] = candidates;
  j["mrr"] = mrr;
  j["map"] = map;
  auto& pq = j["per_query"] = nlohmann::ordered_json::array();
  for (const auto& p : per_query) {
    pq.push_back({{"qid", p.qid}, {"rr", p.rr}, {"ap", p.ap}, {"first_relevant_rank", p.first_relevant_rank}});
  }
  return j;
}

EvalReport evaluate(const std::string& task, const SearchDataset& data, const std::vector<QueryRanking>& rankings) {
  EvalReport rep;
  rep.task = task;
  rep.queries = rankings.size();
  rep.candidates = data.candidates.size();
  rep.mrr = mrr(rankings, data.relevance);
  rep.map = map_score(rankings, data.relevance);
  for (const auto& r : rankings) {
    const auto& rel = data.relevance.at(r.qid);
    EvalReport::PerQuery p{r.qid, reciprocal_rank(r.order, rel), average_precision(r.order, rel), 0};
    if (p.rr > 0) p.first_relevant_rank = static_cast<std::size_t>(std::lround(1.0 / p.rr));
    rep.per_query.push_back(p);
  }
  return rep;
}

EvalReport evaluate(const std::string& task, const SearchDataset& data, const encoder::Params<float>& params,
                    const Tokenizer& tokenizer) {
  data.validate();
  std::vector<std::string> qt;
  std::vector<std::string> ct;
  for (const auto& q : data.queries) qt.push_back(q.text);
  for (const auto& c : data.candidates) ct.push_back(c.text);
  const auto qe = embed_corpus(params, tokenizer, qt);
  const auto ce = embed_corpus(params, tokenizer, ct);
  return evaluate(task, data, rank_all(data, qe, ce));
}

SearchDataset build_code2code_dataset(const std::vector<SolutionGroup>& groups, std::uint64_t seed) {
  Rng rng(seed);
  SearchDataset data;
  data.exclude_self = true;
  for (const auto& g : groups) {
    if (g.solutions.size() < 2) {
      log::warn("problem '" + g.problem + "' has a single solution; dropped");
      continue;
    }
    const std::size_t hi = std::min<std::size_t>(10, g.solutions.size());
    const std::size_t k = 2 + rng.uniform_index(hi - 1);
    std::vector<std::size_t> idx(g.solutions.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) {
      data.queries.push_back(g.solutions[i]);
      data.candidates.push_back(g.solutions[i]);
      auto& rel = data.relevance[g.solutions[i].id];
      for (std::size_t j : idx) {
        if (j != i) rel.push_back(g.solutions[j].id);
      }
    }
  }
  return data;
}

nlohmann::ordered_json SimilarityGapReport::to_json() const {
  nlohmann::ordered_json j;
  j["pairs"] = pairs;
  j["parallel_mean"] = parallel_mean;
  j["random_mean"] = random_mean;
  j["gap"] = gap;
  j["code2code_mean"] = code2code_mean ? nlohmann::ordered_json(*code2code_mean) : nlohmann::ordered_json(nullptr);
  j["relative_gap"] = relative_gap ? nlohmann::ordered_json(*relative_gap) : nlohmann::ordered_json(nullptr);
  return j;
}

namespace {

double cosine(const Matrix<float>& a, Eigen::Index i, const Matrix<float>& b, Eigen::Index j) {
  const auto x = a.row(i).cast<double>();
  const auto y = b.row(j).cast<double>();
  return x.dot(y) / (x.norm() * y.norm());
}

}  // namespace

SimilarityGapReport similarity_gap_report(const encoder::Params<float>& params, const Tokenizer& tokenizer,
                                          std::span<const corpus::BimodalPair> pairs, std::uint64_t seed,
                                          const std::vector<SolutionGroup>* groups) {
  if (pairs.size() < 20) throw std::invalid_argument("similarity gap report needs at least 20 pairs");
  std::vector<std::string> nl;
  std::vector<std::string> code;
  for (const auto& p : pairs) {
    nl.push_back(p.summary.text);
    code.push_back(p.positive_view);
  }
  const auto a = embed_corpus(params, tokenizer, nl);
  const auto b = embed_corpus(params, tokenizer, code);

  // Random derangement: shuffle, then rotate away any fixed points.
  Rng rng(seed);
  const std::size_t n = pairs.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  for (std::size_t i = 0; i < n; ++i) {
    if (perm[i] == i) std::swap(perm[i], perm[(i + 1) % n]);
  }

  SimilarityGapReport rep;
  rep.pairs = n;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    rep.parallel_mean += cosine(a, ii, b, ii);
    rep.random_mean += cosine(a, ii, b, static_cast<Eigen::Index>(perm[i]));
  }
  rep.parallel_mean /= static_cast<double>(n);
  rep.random_mean /= static_cast<double>(n);
  rep.gap = rep.parallel_mean - rep.random_mean;

  if (groups != nullptr) {
    double total = 0;
    std::size_t count = 0;
    for (const auto& g : *groups) {
      if (g.solutions.size() < 2) continue;
      std::vector<std::string> texts;
      for (const auto& s : g.solutions) texts.push_back(s.text);
      const auto e = embed_corpus(params, tokenizer, texts);
      for (Eigen::Index i = 0; i < e.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < e.rows(); ++j) {
          total += cosine(e, i, e, j);
          ++count;
        }
      }
    }
    if (count > 0) {
      rep.code2code_mean = total / static_cast<double>(count);
      rep.relative_gap = (*rep.code2code_mean - rep.parallel_mean) / std::abs(*rep.code2code_mean);
    }
  }
  return rep;
}

namespace {

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw IntegrityError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string id_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

SearchDataset load_search_dataset(const std::string& dir) {
  SearchDataset data;
  try {
    for (const auto& j : read_jsonl(fs::path(dir) / "queries.jsonl")) {
      data.queries.push_back({id_field(j, "qid"), j.at("text").get<std::string>()});
    }
    for (const auto& j : read_jsonl(fs::path(dir) / "candidates.jsonl")) {
      data.candidates.push_back({id_field(j, "cid"), j.at("code").get<std::string>()});
    }
    for (const auto& j : read_jsonl(fs::path(dir) / "relevance.jsonl")) {
      auto& rel = data.relevance[id_field(j, "qid")];
      for (const auto& r : j.at("relevant")) rel.push_back(r.is_string() ? r.get<std::string>() : r.dump());
    }
  } catch (const json::exception& e) {
    throw IntegrityError("malformed search dataset in " + dir + ": " + e.what());
  }
  data.validate();
  return data;
}

void write_search_dataset(const std::string& dir, const SearchDataset& data) {
  fs::create_directories(dir);
  std::ostringstream q;
  std::ostringstream c;
  std::ostringstream r;
  for (const auto& x : data.queries) q << nlohmann::ordered_json{{"qid", x.id}, {"text", x.text}}.dump() << "\n";
  for (const auto& x : data.candidates) c << nlohmann::ordered_json{{"cid", x.id}, {"code", x.text}}.dump() << "\n";
  for (const auto& x : data.queries) {
    r << nlohmann::ordered_json{{"qid", x.id}, {"relevant", data.relevance.at(x.id)}}.dump() << "\n";
  }
  write_file((fs::path(dir) / "queries.jsonl").string(), q.str());
  write_file((fs::path(dir) / "candidates.jsonl").string(), c.str());
  write_file((fs::path(dir) / "relevance.jsonl").string(), r.str());
}

std::vector<SolutionGroup> load_solution_groups(const std::string& path) {
  std::vector<SolutionGroup> out;
  try {
    for (const auto& j : read_jsonl(path)) {
      SolutionGroup g{id_field(j, "problem"), {}};
      for (const auto& s : j.at("solutions")) g.solutions.push_back({id_field(s, "id"), s.at("code").get<std::string>()});
      out.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw IntegrityError("malformed solution groups in " + path + ": " + e.what());
  }
  return out;
}

}  // namespace sageforge::searcheval
