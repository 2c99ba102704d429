#include "sageforge/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sageforge/corpus.hpp"
#include "sageforge/obfuscator.hpp"
#include "sageforge/searcheval.hpp"
#include "sageforge/syntax.hpp"

namespace sageforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// TOML subset

namespace {

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : text_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    while (pos_ < text_.size()) {
      skip_blank();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == '\n') {
        advance_line();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        auto path = parse_key_path();
        skip_blank();
        expect(']');
        table = &root;
        for (const auto& k : path) {
          json& next = (*table)[k];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("'" + k + "' is not a table");
          table = &next;
        }
        end_of_line();
        continue;
      }
      auto path = parse_key_path();
      skip_blank();
      expect('=');
      skip_blank();
      json value = parse_value();
      json* target = table;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        json& next = (*target)[path[i]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) fail("'" + path[i] + "' is not a table");
        target = &next;
      }
      if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
      (*target)[path.back()] = std::move(value);
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("TOML line " + std::to_string(line_) + ": " + msg);
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_blank() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }
  void skip_comment() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }
  void advance_line() {
    ++pos_;
    ++line_;
  }
  void end_of_line() {
    skip_blank();
    if (peek() == '#') skip_comment();
    if (pos_ >= text_.size()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    advance_line();
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path;
    while (true) {
      skip_blank();
      if (peek() == '"') {
        path.push_back(parse_basic_string());
      } else {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-')) {
          ++pos_;
        }
        if (start == pos_) fail("expected a key");
        path.emplace_back(text_.substr(start, pos_ - start));
      }
      skip_blank();
      if (peek() != '.') break;
      ++pos_;
    }
    return path;
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      const char e = peek();
      ++pos_;
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\'' && text_[pos_] != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated string");
    std::string out(text_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') {
      ++pos_;
      json arr = json::array();
      while (true) {
        skip_ws_multiline();
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        arr.push_back(parse_value());
        skip_ws_multiline();
        if (peek() == ',') {
          ++pos_;
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
           text_[pos_] != ']' && text_[pos_] != '#') {
      ++pos_;
    }
    std::string tok(text_.substr(start, pos_ - start));
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string digits;
    for (char ch : tok) {
      if (ch != '_') digits += ch;
    }
    if (digits.empty()) fail("expected a value");
    try {
      std::size_t used = 0;
      if (digits.find_first_of(".eE") == std::string::npos || digits.rfind("0x", 0) == 0) {
        const long long v = std::stoll(digits, &used, 0);
        if (used == digits.size()) return v;
      } else {
        const double v = std::stod(digits, &used);
        if (used == digits.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + tok + "'");
  }

  void skip_ws_multiline() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        advance_line();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

json parse_toml(std::string_view text) { return TomlParser(text).parse(); }

json load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  if (fs::path(path).extension() == ".json") {
    try {
      json j = json::parse(text);
      if (!j.is_object()) throw ConfigError(path + ": top level must be an object");
      return j;
    } catch (const json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  return parse_toml(text);
}

// ---------------------------------------------------------------------------
// Train config resolution

ordered_json ResolvedTrainConfig::to_json() const {
  ordered_json j = train.to_json();
  j["data"] = {{"corpus", paths.corpus},
               {"pairs", paths.pairs},
               {"tokenizer", paths.tokenizer},
               {"init", paths.init},
               {"lang", std::string(language_name(paths.language))}};
  return j;
}

namespace {

const json& table_of(const json& file, const char* name) {
  static const json empty = json::object();
  if (!file.contains(name)) return empty;
  const json& t = file.at(name);
  if (!t.is_object()) throw ConfigError(std::string("config: '") + name + "' must be a table");
  return t;
}

void check_keys(const json& table, const std::string& prefix, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : table.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("config: unknown key '" + prefix + k + "'");
  }
}

template <typename T>
void take(const json& table, const char* key, const std::string& prefix, T& out) {
  if (!table.contains(key)) return;
  const json& v = table.at(key);
  const std::string name = prefix + key;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError("config: '" + name + "' must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ConfigError("config: '" + name + "' must be a number");
    out = v.get<double>();
  } else {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError("config: '" + name + "' must be a non-negative integer");
    }
    out = static_cast<T>(v.get<long long>());
  }
}

}  // namespace

ResolvedTrainConfig resolve_train_config(trainer::Stage stage, const json& file, const TrainOverrides& flags) {
  ResolvedTrainConfig r;
  r.train = trainer::TrainConfig::defaults(stage);
  if (!file.is_object()) throw ConfigError("config: top level must be a table");
  check_keys(file, "", {"seed", "train", "mask", "seq", "data"});
  take(file, "seed", "", r.train.seed);

  const json& tr = table_of(file, "train");
  check_keys(tr, "train.", {"preset", "steps", "warmup_steps", "batch_size", "base_lr", "weight_decay", "clip_norm",
                            "tau", "dropout", "checkpoint_every"});
  take(tr, "preset", "train.", r.train.preset);
  take(tr, "steps", "train.", r.train.steps);
  const bool explicit_warmup = tr.contains("warmup_steps");
  take(tr, "warmup_steps", "train.", r.train.warmup_steps);
  take(tr, "batch_size", "train.", r.train.batch_size);
  take(tr, "base_lr", "train.", r.train.base_lr);
  take(tr, "weight_decay", "train.", r.train.weight_decay);
  take(tr, "clip_norm", "train.", r.train.clip_norm);
  take(tr, "tau", "train.", r.train.tau);
  take(tr, "dropout", "train.", r.train.dropout);
  take(tr, "checkpoint_every", "train.", r.train.checkpoint_every);

  const json& mk = table_of(file, "mask");
  check_keys(mk, "mask.", {"scheme", "rate", "dobf_mix"});
  if (mk.contains("scheme")) {
    std::string s;
    take(mk, "scheme", "mask.", s);
    if (s == "full") {
      r.train.mask.random_scheme = denoiser::Scheme::FullMask;
    } else if (s == "80-10-10") {
      r.train.mask.random_scheme = denoiser::Scheme::Conv801010;
    } else {
      throw ConfigError("config: mask.scheme must be \"full\" or \"80-10-10\"");
    }
  }
  if (mk.contains("rate")) {
    const json& v = mk.at("rate");
    if (v.is_string() && v.get<std::string>() == "dynamic") {
      r.train.mask.rate.dynamic = true;
    } else if (v.is_number()) {
      r.train.mask.rate.dynamic = false;
      r.train.mask.rate.rate = v.get<double>();
    } else {
      throw ConfigError("config: mask.rate must be a number or \"dynamic\"");
    }
  }
  take(mk, "dobf_mix", "mask.", r.train.mask.dobf_mix);

  const json& sq = table_of(file, "seq");
  check_keys(sq, "seq.", {"max_len"});
  take(sq, "max_len", "seq.", r.train.max_len);

  const json& dt = table_of(file, "data");
  check_keys(dt, "data.", {"corpus", "pairs", "tokenizer", "init", "lang"});
  take(dt, "corpus", "data.", r.paths.corpus);
  take(dt, "pairs", "data.", r.paths.pairs);
  take(dt, "tokenizer", "data.", r.paths.tokenizer);
  take(dt, "init", "data.", r.paths.init);
  if (dt.contains("lang")) {
    std::string lang;
    take(dt, "lang", "data.", lang);
    r.paths.language = parse_language(lang);
  }

  if (flags.seed) r.train.seed = *flags.seed;
  if (flags.steps) r.train.steps = *flags.steps;
  if (flags.batch_size) r.train.batch_size = *flags.batch_size;
  if (flags.base_lr) r.train.base_lr = *flags.base_lr;
  if (flags.corpus) r.paths.corpus = *flags.corpus;
  if (flags.pairs) r.paths.pairs = *flags.pairs;
  if (flags.tokenizer) r.paths.tokenizer = *flags.tokenizer;
  if (flags.init) r.paths.init = *flags.init;
  if (flags.out_dir) r.train.out_dir = *flags.out_dir;
  // Warmup follows the step budget unless set explicitly.
  if (!explicit_warmup) r.train.warmup_steps = r.train.steps / 10;
  r.train.mask.max_len = r.train.max_len;
  r.train.validate();
  return r;
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool quiet = false;
};

constexpr std::size_t kDefaultVocab = 8192;

Tokenizer tokenizer_for(const std::string& path, const std::vector<corpus::SourceFile>& files, std::uint64_t seed) {
  if (!path.empty()) return Tokenizer::load(path);
  log::info("no --tokenizer given; training one on the input (vocab " + std::to_string(kDefaultVocab) + ")");
  std::vector<std::string> texts;
  for (const auto& f : files) texts.push_back(f.content);
  return Tokenizer::train(texts, kDefaultVocab, seed);
}

void write_json(const std::string& path, const ordered_json& j) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_file(path, j.dump(2) + "\n");
}

ordered_json distribution_json(const syntax::DistributionReport& d) {
  return {{"total", d.total},
          {"identifier", d.identifier},
          {"keyword", d.keyword},
          {"operator", d.op},
          {"delimiter", d.delimiter},
          {"literal", d.literal},
          {"string_literal", d.string_literal},
          {"nl", d.nl},
          {"pl", d.pl},
          {"pl_fraction", d.pl_token_fraction()},
          {"nl_fraction", d.nl_token_fraction()},
          {"identifier_fraction_of_pl", d.identifier_fraction_of_pl()},
          {"identifier_fraction_of_all", d.identifier_fraction_of_all()},
          {"string_fraction_of_literals", d.string_literal_fraction_of_literals()}};
}

int cmd_pairs(const Globals& g, const std::string& input, const std::string& lang, const std::string& out,
              const std::string& report, const std::string& tok_path, std::ostream& os) {
  const auto ing = corpus::ingest_directory(input, parse_language(lang));
  const auto tok = tokenizer_for(tok_path, ing.files, g.seed);
  const auto ds = corpus::build_pair_dataset(ing.files, tok, corpus::PairOptions{g.threads});
  if (const auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
  corpus::write_pairs_jsonl(out, ds.pairs);
  if (!report.empty()) write_file(report, corpus::histogram_json(ds) + "\n");
  os << "files " << ing.files.size() << "  functions " << ds.functions << "  pairs " << ds.pairs.size() << "\n";
  return 0;
}

int cmd_stats(const Globals& g, const std::string& input, const std::string& lang, const std::string& out,
              const std::string& tok_path, std::ostream& os) {
  const auto language = parse_language(lang);
  const auto ing = corpus::ingest_directory(input, language);
  const auto tok = tokenizer_for(tok_path, ing.files, g.seed);
  std::vector<std::string> texts;
  for (const auto& f : ing.files) texts.push_back(f.content);
  const auto dist = syntax::token_distribution(texts, language, tok);
  const auto table = corpus::overlap_table(ing.files, tok);
  const auto ds = corpus::build_pair_dataset(ing.files, tok, corpus::PairOptions{g.threads});
  const auto red = corpus::overlap_reduction(ds.pairs, tok);
  ordered_json j;
  j["files"] = ing.files.size();
  j["distribution"] = distribution_json(dist);
  j["overlap"] = {{"functions", table.functions},
                  {"signature_vs_docstring", table.signature_vs_docstring},
                  {"body_vs_docstring", table.body_vs_docstring},
                  {"signature_vs_summary", table.signature_vs_summary},
                  {"body_vs_summary", table.body_vs_summary}};
  j["overlap_reduction"] = {{"pairs", red.pairs},
                            {"summary_vs_positive", red.summary_vs_positive},
                            {"summary_vs_function", red.summary_vs_function}};
  write_json(out, j);
  os << std::fixed << std::setprecision(3) << "tokens " << dist.total << "  identifier share "
     << dist.identifier_fraction_of_all() << "  overlap(summary, positive) " << red.summary_vs_positive
     << "  overlap(summary, function) " << red.summary_vs_function << "\n";
  return 0;
}

int cmd_obfuscate(const std::string& input, const std::string& lang, const std::string& out,
                  const std::string& map_path, std::ostream& os) {
  const auto src = read_file(input);
  const auto r = obfuscator::obfuscate(src, parse_language(lang));
  if (out.empty()) {
    os << r.obfuscated_text;
  } else {
    write_file(out, r.obfuscated_text);
  }
  if (!map_path.empty()) {
    ordered_json j;
    for (const auto& [ph, orig] : r.identifier_map) j[ph] = orig;
    auto& spans = j["spans"] = ordered_json::array();
    for (const auto& s : r.placeholder_spans) {
      spans.push_back({{"placeholder", s.placeholder}, {"begin", s.span.begin}, {"end", s.span.end}});
    }
    write_json(map_path, j);
  }
  return 0;
}

int cmd_tokenizer_train(const Globals& g, const std::string& input, const std::string& lang, std::size_t vocab,
                        const std::string& out, std::ostream& os) {
  const auto ing = corpus::ingest_directory(input, parse_language(lang));
  std::vector<std::string> texts;
  for (const auto& f : ing.files) texts.push_back(f.content);
  const auto tok = Tokenizer::train(texts, vocab, g.seed);
  if (const auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
  tok.save(out);
  os << "vocab " << tok.vocab_size() << "  merges " << tok.num_merges() << "  fingerprint "
     << hex64(tok.fingerprint()) << "\n";
  if (tok.vocab_size() < vocab) {
    log::warn("corpus supports only " + std::to_string(tok.vocab_size()) + " tokens; requested " +
              std::to_string(vocab));
  }
  return 0;
}

int cmd_train(const Globals& g, bool seed_given, const std::string& stage_s, const std::string& config_path,
              TrainOverrides flags, std::ostream& os) {
  const auto stage = trainer::parse_stage(stage_s);
  const json file = config_path.empty() ? json::object() : load_config_file(config_path);
  if (seed_given) flags.seed = g.seed;
  const auto rc = resolve_train_config(stage, file, flags);
  log::info("resolved config: " + rc.to_json().dump());
  if (rc.paths.tokenizer.empty()) throw ConfigError("train: a tokenizer is required (--tokenizer or data.tokenizer)");
  const auto tok = Tokenizer::load(rc.paths.tokenizer);

  trainer::TrainResult result{trainer::TrainReport{}, encoder::Params<float>(encoder::EncoderConfig{})};
  if (stage == trainer::Stage::Stage1) {
    if (rc.paths.corpus.empty()) throw ConfigError("train: stage 1 needs a corpus (--corpus or data.corpus)");
    const auto ing = corpus::ingest_directory(rc.paths.corpus, rc.paths.language);
    std::vector<denoiser::Stage1Item> items;
    for (const auto& f : ing.files) {
      for (const auto& fn : corpus::extract_functions(f)) {
        items.push_back(denoiser::prepare_stage1_item(fn.source_text, rc.paths.language, tok));
      }
    }
    log::info("stage 1: " + std::to_string(items.size()) + " functions");
    result = trainer::train_stage1(rc.train, tok, items);
  } else {
    if (rc.paths.pairs.empty()) throw ConfigError("train: stage 2 needs pairs (--pairs or data.pairs)");
    const auto pairs = corpus::read_pairs_jsonl(rc.paths.pairs);
    std::optional<encoder::LoadedCheckpoint> init;
    if (stage == trainer::Stage::Stage2) {
      if (rc.paths.init.empty()) throw ConfigError("train: stage 2 needs an initial checkpoint (--init or data.init)");
      init = encoder::load_checkpoint(rc.paths.init);
      const auto fp = hex64(tok.fingerprint());
      if (!init->meta.tokenizer_fingerprint.empty() && init->meta.tokenizer_fingerprint != fp) {
        throw IntegrityError("checkpoint " + rc.paths.init + " was trained with a different tokenizer");
      }
    } else if (!rc.paths.init.empty()) {
      throw ConfigError("train: 2-scratch does not take an initial checkpoint");
    }
    log::info("stage " + std::string(trainer::stage_name(stage)) + ": " + std::to_string(pairs.size()) + " pairs");
    result = trainer::train_stage2(rc.train, tok, pairs, init ? &init->params : nullptr);
  }

  const auto& rep = result.report;
  if (!rc.train.out_dir.empty()) {
    const fs::path dir(rc.train.out_dir);
    fs::create_directories(dir);
    write_json((dir / "train_report.json").string(), rep.to_json());
    write_file((dir / "loss.csv").string(), rep.loss_csv());
    write_json((dir / "config.json").string(), rc.to_json());
  }
  os << std::setprecision(6) << "stage " << trainer::stage_name(stage) << "  steps " << rep.losses.size()
     << "  first loss " << (rep.losses.empty() ? 0.0 : rep.losses.front()) << "  final loss " << rep.final_loss();
  if (!rep.accuracies.empty()) os << "  in-batch accuracy " << rep.final_accuracy();
  os << "  skipped " << rep.skipped_steps << "\n";
  if (!rep.checkpoint_path.empty()) os << "checkpoint " << rep.checkpoint_path << "\n";
  return 0;
}

int cmd_eval(const Globals& g, const std::string& task, const std::string& model, const std::string& tok_path,
             const std::string& data_dir, const std::string& out, const std::string& pairs_path,
             const std::string& groups_path, std::ostream& os) {
  if (task != "nl2code" && task != "code2code") throw ConfigError("eval: --task must be nl2code or code2code");
  const auto ckpt = encoder::load_checkpoint(model);
  const auto tok = Tokenizer::load(tok_path);
  const auto fp = hex64(tok.fingerprint());
  if (!ckpt.meta.tokenizer_fingerprint.empty() && ckpt.meta.tokenizer_fingerprint != fp) {
    throw IntegrityError("model " + model + " was trained with a different tokenizer");
  }
  searcheval::SearchDataset data;
  if (task == "code2code" && fs::exists(fs::path(data_dir) / "groups.jsonl")) {
    data = searcheval::build_code2code_dataset(
        searcheval::load_solution_groups((fs::path(data_dir) / "groups.jsonl").string()), g.seed);
  } else {
    data = searcheval::load_search_dataset(data_dir);
    data.exclude_self = task == "code2code";
  }
  const auto rep = searcheval::evaluate(task, data, ckpt.params, tok);
  ordered_json j = rep.to_json();
  if (task == "nl2code") j["random_mrr_expectation"] = searcheval::random_mrr_expectation(data.candidates.size());
  if (!pairs_path.empty()) {
    const auto pairs = corpus::read_pairs_jsonl(pairs_path);
    std::vector<searcheval::SolutionGroup> groups;
    if (!groups_path.empty()) groups = searcheval::load_solution_groups(groups_path);
    const auto gap = searcheval::similarity_gap_report(ckpt.params, tok, pairs, g.seed,
                                                       groups_path.empty() ? nullptr : &groups);
    j["similarity_gap"] = gap.to_json();
  }
  write_json(out, j);
  os << std::fixed << std::setprecision(4) << task << "  queries " << rep.queries << "  MRR " << rep.mrr << "  MAP "
     << rep.map << "\n";
  return 0;
}

int cmd_report(const std::string& input, const std::string& csv, std::ostream& os) {
  json j;
  try {
    j = json::parse(read_file(input));
  } catch (const json::parse_error& e) {
    throw IntegrityError(input + ": " + e.what());
  }
  std::ostringstream table;
  table.precision(9);
  os << std::setprecision(6);
  if (j.contains("losses")) {
    os << "training report (stage " << j.value("stage", "?") << ")\n";
    os << "  steps          " << j.value("steps", 0) << "\n";
    os << "  batch size     " << j.value("batch_size", 0) << "\n";
    if (j["initial_loss"].is_number()) os << "  initial loss   " << j["initial_loss"].get<double>() << "\n";
    if (j["final_loss"].is_number()) os << "  final loss     " << j["final_loss"].get<double>() << "\n";
    if (j.contains("final_in_batch_accuracy")) {
      os << "  accuracy       " << j["final_in_batch_accuracy"].get<double>() << " (chance "
         << j["chance_accuracy"].get<double>() << ")\n";
    }
    os << "  skipped steps  " << j.value("skipped_steps", 0) << "\n";
    os << "  wall seconds   " << j.value("wall_seconds", 0.0) << "\n";
    const bool acc = j.contains("in_batch_accuracy");
    table << "step,loss" << (acc ? ",in_batch_accuracy" : "") << "\n";
    for (std::size_t i = 0; i < j["losses"].size(); ++i) {
      table << i + 1 << "," << j["losses"][i].get<double>();
      if (acc) table << "," << j["in_batch_accuracy"][i].get<double>();
      table << "\n";
    }
  } else if (j.contains("per_query")) {
    os << "search evaluation (" << j.value("task", "?") << ")\n";
    os << "  queries     " << j.value("queries", 0) << "\n";
    os << "  candidates  " << j.value("candidates", 0) << "\n";
    os << "  MRR         " << j.value("mrr", 0.0) << "\n";
    os << "  MAP         " << j.value("map", 0.0) << "\n";
    if (j.contains("random_mrr_expectation")) {
      os << "  random MRR  " << j["random_mrr_expectation"].get<double>() << "\n";
    }
    if (j.contains("similarity_gap")) {
      const auto& s = j["similarity_gap"];
      os << "  parallel cosine  " << s.value("parallel_mean", 0.0) << "\n";
      os << "  random cosine    " << s.value("random_mean", 0.0) << "\n";
      os << "  gap              " << s.value("gap", 0.0) << "\n";
      if (s["relative_gap"].is_number()) os << "  relative gap     " << s["relative_gap"].get<double>() << "\n";
    }
    table << "qid,rr,ap,first_relevant_rank\n";
    for (const auto& q : j["per_query"]) {
      table << q.value("qid", "") << "," << q.value("rr", 0.0) << "," << q.value("ap", 0.0) << ","
            << q.value("first_relevant_rank", 0) << "\n";
    }
  } else {
    throw IntegrityError(input + ": neither a training nor an evaluation report");
  }
  if (!csv.empty()) write_file(csv, table.str());
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sageforge: code representation learning at desk scale", "sageforge"};
  app.require_subcommand(1);
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for data preparation")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", g.quiet, "Only print warnings and errors");

  std::string input, lang = "python", out_path, report, tok_path, map_path, stage, config, task, model, data, csv;
  std::string pairs_path, groups_path;
  std::size_t vocab = kDefaultVocab;
  TrainOverrides flags;

  auto* pairs = app.add_subcommand("pairs", "Extract (summary, hard positive) pairs from a source tree");
  pairs->fallthrough();
  pairs->add_option("--input", input, "Source directory")->required();
  pairs->add_option("--lang", lang, "Source language")->capture_default_str();
  pairs->add_option("--out", out_path, "Pairs JSONL")->required();
  pairs->add_option("--report", report, "Filter histogram JSON");
  pairs->add_option("--tokenizer", tok_path, "Tokenizer JSON used for summary lengths");

  auto* stats = app.add_subcommand("stats", "Token distribution and lexical overlap statistics");
  stats->fallthrough();
  stats->add_option("--input", input, "Source directory")->required();
  stats->add_option("--lang", lang, "Source language")->capture_default_str();
  stats->add_option("--out", out_path, "Statistics JSON")->required();
  stats->add_option("--tokenizer", tok_path, "Tokenizer JSON");

  auto* obf = app.add_subcommand("obfuscate", "Rename classes, functions and variables to placeholders");
  obf->fallthrough();
  obf->add_option("--input", input, "Source file")->required();
  obf->add_option("--lang", lang, "Source language")->capture_default_str();
  obf->add_option("--out", out_path, "Obfuscated file (stdout if omitted)");
  obf->add_option("--map", map_path, "Identifier map JSON");

  auto* tt = app.add_subcommand("tokenizer-train", "Learn a byte-level BPE vocabulary");
  tt->fallthrough();
  tt->add_option("--input", input, "Source directory")->required();
  tt->add_option("--lang", lang, "Source language")->capture_default_str();
  tt->add_option("--vocab-size", vocab, "Target vocabulary size")->capture_default_str();
  tt->add_option("--out", out_path, "Tokenizer JSON")->required();

  auto* train = app.add_subcommand("train", "Run Stage I (denoising) or Stage II (contrastive) training");
  train->fallthrough();
  train->add_option("--stage", stage, "1, 2 or 2-scratch")->required();
  train->add_option("--config", config, "TOML or JSON config");
  train->add_option("--out", flags.out_dir, "Output directory for checkpoints and reports");
  train->add_option("--tokenizer", flags.tokenizer, "Tokenizer JSON");
  train->add_option("--corpus", flags.corpus, "Stage I source directory");
  train->add_option("--pairs", flags.pairs, "Stage II pairs JSONL");
  train->add_option("--init", flags.init, "Stage II initial checkpoint");
  train->add_option("--steps", flags.steps, "Optimizer steps");
  train->add_option("--batch-size", flags.batch_size, "Batch size");
  train->add_option("--lr", flags.base_lr, "Base learning rate");

  auto* ev = app.add_subcommand("eval", "Zero-shot semantic search evaluation");
  ev->fallthrough();
  ev->add_option("--task", task, "nl2code or code2code")->required()->check(CLI::IsMember({"nl2code", "code2code"}));
  ev->add_option("--model", model, "Checkpoint")->required();
  ev->add_option("--tokenizer", tok_path, "Tokenizer JSON")->required();
  ev->add_option("--data", data, "Dataset directory")->required();
  ev->add_option("--out", out_path, "Report JSON")->required();
  ev->add_option("--pairs", pairs_path, "Pairs JSONL for the similarity-gap report");
  ev->add_option("--groups", groups_path, "Solution groups JSONL for the NL2Code vs Code2Code gap");

  auto* rp = app.add_subcommand("report", "Render a training or evaluation report as text and CSV");
  rp->fallthrough();
  rp->add_option("--input", input, "Report JSON")->required();
  rp->add_option("--csv", csv, "CSV output");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (g.quiet) log::set_level(log::Level::Warn);
  try {
    if (pairs->parsed()) return cmd_pairs(g, input, lang, out_path, report, tok_path, out);
    if (stats->parsed()) return cmd_stats(g, input, lang, out_path, tok_path, out);
    if (obf->parsed()) return cmd_obfuscate(input, lang, out_path, map_path, out);
    if (tt->parsed()) return cmd_tokenizer_train(g, input, lang, vocab, out_path, out);
    if (train->parsed()) return cmd_train(g, seed_opt->count() > 0, stage, config, flags, out);
    if (ev->parsed()) return cmd_eval(g, task, model, tok_path, data, out_path, pairs_path, groups_path, out);
    if (rp->parsed()) return cmd_report(input, csv, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace sageforge::cli
