#include "sageforge/encoder.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace sageforge::encoder {

namespace {
constexpr double kInitStd = 0.02;
constexpr double kLayerNormEps = 1e-5;
constexpr char kMagic[4] = {'S', 'A', 'G', 'E'};
constexpr std::uint32_t kCheckpointVersion = 1;
}  // namespace

EncoderConfig EncoderConfig::preset(const std::string& name, std::size_t vocab_size, std::size_t max_len) {
  EncoderConfig c;
  if (name == "tiny") {
    c.layers = 2;
    c.heads = 4;
    c.model_dim = 64;
    c.ff_dim = 256;
  } else if (name == "small-desk") {
    c.layers = 4;
    c.heads = 4;
    c.model_dim = 128;
    c.ff_dim = 512;
  } else {
    throw ConfigError("unknown encoder preset '" + name + "'");
  }
  c.vocab_size = vocab_size;
  c.max_len = max_len;
  return c;
}

void EncoderConfig::validate() const {
  if (heads == 0 || model_dim == 0 || model_dim % heads != 0) {
    throw ConfigError("model_dim must be a positive multiple of heads");
  }
  if (ff_dim == 0 || vocab_size == 0 || max_len == 0) throw ConfigError("encoder dimensions must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

nlohmann::ordered_json EncoderConfig::to_json() const {
  nlohmann::ordered_json j;
  j["layers"] = layers;
  j["heads"] = heads;
  j["model_dim"] = model_dim;
  j["ff_dim"] = ff_dim;
  j["vocab_size"] = vocab_size;
  j["max_len"] = max_len;
  j["dropout"] = dropout;
  j["seed"] = seed;
  return j;
}

EncoderConfig EncoderConfig::from_json(const nlohmann::json& j) {
  EncoderConfig c;
  c.layers = j.at("layers").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.model_dim = j.at("model_dim").get<std::size_t>();
  c.ff_dim = j.at("ff_dim").get<std::size_t>();
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.validate();
  return c;
}

std::vector<TensorInfo> parameter_layout(const EncoderConfig& c) {
  std::vector<TensorInfo> out;
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    out.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
  };
  const std::size_t d = c.model_dim;
  add("tok_emb", c.vocab_size, d);
  add("pos_emb", c.max_len, d);
  for (std::size_t l = 0; l < c.layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    add(p + "ln1_g", 1, d);
    add(p + "ln1_b", 1, d);
    add(p + "wq", d, d);
    add(p + "bq", 1, d);
    add(p + "wk", d, d);
    add(p + "bk", 1, d);
    add(p + "wv", d, d);
    add(p + "bv", 1, d);
    add(p + "wo", d, d);
    add(p + "bo", 1, d);
    add(p + "ln2_g", 1, d);
    add(p + "ln2_b", 1, d);
    add(p + "w1", d, c.ff_dim);
    add(p + "b1", 1, c.ff_dim);
    add(p + "w2", c.ff_dim, d);
    add(p + "b2", 1, d);
  }
  add("lnf_g", 1, d);
  add("lnf_b", 1, d);
  add("mlm_bias", 1, c.vocab_size);
  return out;
}

std::size_t parameter_count(const EncoderConfig& config) {
  const auto layout = parameter_layout(config);
  return layout.back().offset + layout.back().rows * layout.back().cols;
}

template <typename S>
Params<S>::Params(const EncoderConfig& config)
    : config_(config), layout_(parameter_layout(config)), data_(parameter_count(config), S(0)) {
  config_.validate();
  tok_emb = 0;
  pos_emb = 1;
  std::size_t s = 2;
  for (std::size_t l = 0; l < config.layers; ++l) {
    BlockSlots b{};
    b.ln1_g = s++;
    b.ln1_b = s++;
    b.wq = s++;
    b.bq = s++;
    b.wk = s++;
    b.bk = s++;
    b.wv = s++;
    b.bv = s++;
    b.wo = s++;
    b.bo = s++;
    b.ln2_g = s++;
    b.ln2_b = s++;
    b.w1 = s++;
    b.b1 = s++;
    b.w2 = s++;
    b.b2 = s++;
    blocks.push_back(b);
  }
  lnf_g = s++;
  lnf_b = s++;
  mlm_bias = s++;
}

template <typename S>
typename Params<S>::MatMap Params<S>::tensor(std::size_t slot) {
  const auto& t = layout_[slot];
  return MatMap(data_.data() + t.offset, static_cast<Eigen::Index>(t.rows), static_cast<Eigen::Index>(t.cols));
}

template <typename S>
typename Params<S>::ConstMatMap Params<S>::tensor(std::size_t slot) const {
  const auto& t = layout_[slot];
  return ConstMatMap(data_.data() + t.offset, static_cast<Eigen::Index>(t.rows), static_cast<Eigen::Index>(t.cols));
}

template <typename S>
std::size_t Params<S>::slot(const std::string& name) const {
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    if (layout_[i].name == name) return i;
  }
  throw std::invalid_argument("no parameter tensor named " + name);
}

template <typename S>
void Params<S>::set_zero() {
  std::fill(data_.begin(), data_.end(), S(0));
}

template <typename S>
bool Params<S>::all_finite() const {
  for (S v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <typename S>
Params<S> init_params(const EncoderConfig& config, std::uint64_t seed) {
  Params<S> p(config);
  Rng rng(seed);
  for (const auto& t : p.layout()) {
    S* base = p.data().data() + t.offset;
    const std::size_t n = t.rows * t.cols;
    const bool gain = t.name.ends_with("_g");
    const bool bias = t.rows == 1 && !gain;
    for (std::size_t i = 0; i < n; ++i) {
      if (gain) {
        base[i] = S(1);
      } else if (bias) {
        base[i] = S(0);
      } else {
        base[i] = static_cast<S>(kInitStd * rng.normal());
      }
    }
  }
  return p;
}

namespace {

template <typename S>
Matrix<S> layer_norm(const Matrix<S>& x, const Eigen::Map<const Matrix<S>>& g, const Eigen::Map<const Matrix<S>>& b,
                     Matrix<S>& xhat, RowVector<S>& rstd) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  xhat.resize(n, d);
  rstd.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S mean = x.row(i).mean();
    const S var = (x.row(i).array() - mean).square().mean();
    const S r = S(1) / std::sqrt(var + S(kLayerNormEps));
    rstd(i) = r;
    xhat.row(i) = (x.row(i).array() - mean) * r;
  }
  Matrix<S> y = xhat.array().rowwise() * g.row(0).array();
  y.rowwise() += b.row(0);
  return y;
}

template <typename S>
Matrix<S> layer_norm_backward(const Matrix<S>& dy, const Matrix<S>& xhat, const RowVector<S>& rstd,
                              const Eigen::Map<const Matrix<S>>& g, Eigen::Map<Matrix<S>> dg,
                              Eigen::Map<Matrix<S>> db) {
  dg.row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
  db.row(0) += dy.colwise().sum();
  Matrix<S> dxhat = dy.array().rowwise() * g.row(0).array();
  Matrix<S> dx(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    const S m1 = dxhat.row(i).mean();
    const S m2 = (dxhat.row(i).array() * xhat.row(i).array()).mean();
    dx.row(i) = rstd(i) * (dxhat.row(i).array() - m1 - xhat.row(i).array() * m2);
  }
  return dx;
}

template <typename S>
S gelu(S x) {
  return S(0.5) * x * (S(1) + std::erf(x * S(M_SQRT1_2)));
}

template <typename S>
S gelu_grad(S x) {
  const S cdf = S(0.5) * (S(1) + std::erf(x * S(M_SQRT1_2)));
  const S pdf = std::exp(S(-0.5) * x * x) * S(0.3989422804014327);
  return cdf + x * pdf;
}

template <typename S>
Matrix<S> dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  Matrix<S> m(rows, cols);
  const S keep = S(1.0 / (1.0 - p));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform01() < p ? S(0) : keep;
  return m;
}

template <typename S>
SequenceState<S> forward_sequence(const Params<S>& P, std::vector<TokenId> ids, std::vector<std::size_t> positions,
                                  bool train, Rng* rng) {
  const auto& cfg = P.config();
  const auto n = static_cast<Eigen::Index>(ids.size());
  const auto d = static_cast<Eigen::Index>(cfg.model_dim);
  const std::size_t heads = cfg.heads;
  const auto dh = static_cast<Eigen::Index>(cfg.head_dim());
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));
  const bool drop = train && cfg.dropout > 0.0;

  SequenceState<S> st;
  st.ids = std::move(ids);
  st.positions = std::move(positions);
  const auto tok = P.tensor(P.tok_emb);
  const auto pos = P.tensor(P.pos_emb);
  Matrix<S> x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = tok.row(st.ids[static_cast<std::size_t>(i)]) + pos.row(static_cast<Eigen::Index>(st.positions[static_cast<std::size_t>(i)]));
  }
  if (drop) {
    st.emb_mask = dropout_mask<S>(n, d, cfg.dropout, *rng);
    x.array() *= st.emb_mask.array();
  }

  for (const auto& B : P.blocks) {
    LayerCache<S> c;
    c.x_in = x;
    c.a = layer_norm<S>(x, P.tensor(B.ln1_g), P.tensor(B.ln1_b), c.xhat1, c.rstd1);
    c.q = c.a * P.tensor(B.wq);
    c.q.rowwise() += P.tensor(B.bq).row(0);
    c.k = c.a * P.tensor(B.wk);
    c.k.rowwise() += P.tensor(B.bk).row(0);
    c.v = c.a * P.tensor(B.wv);
    c.v.rowwise() += P.tensor(B.bv).row(0);
    c.o.resize(n, d);
    c.probs.resize(heads);
    for (std::size_t h = 0; h < heads; ++h) {
      const auto off = static_cast<Eigen::Index>(h) * dh;
      Matrix<S> s = (c.q.middleCols(off, dh) * c.k.middleCols(off, dh).transpose()) * scale;
      for (Eigen::Index i = 0; i < n; ++i) {
        const S mx = s.row(i).maxCoeff();
        s.row(i) = (s.row(i).array() - mx).exp();
        s.row(i) /= s.row(i).sum();
      }
      c.o.middleCols(off, dh) = s * c.v.middleCols(off, dh);
      c.probs[h] = std::move(s);
    }
    Matrix<S> attn = c.o * P.tensor(B.wo);
    attn.rowwise() += P.tensor(B.bo).row(0);
    if (drop) {
      c.attn_mask = dropout_mask<S>(n, d, cfg.dropout, *rng);
      attn.array() *= c.attn_mask.array();
    }
    x += attn;
    c.b = layer_norm<S>(x, P.tensor(B.ln2_g), P.tensor(B.ln2_b), c.xhat2, c.rstd2);
    c.u = c.b * P.tensor(B.w1);
    c.u.rowwise() += P.tensor(B.b1).row(0);
    c.g = c.u.unaryExpr([](S v) { return gelu(v); });
    Matrix<S> f = c.g * P.tensor(B.w2);
    f.rowwise() += P.tensor(B.b2).row(0);
    if (drop) {
      c.ffn_mask = dropout_mask<S>(n, d, cfg.dropout, *rng);
      f.array() *= c.ffn_mask.array();
    }
    x += f;
    st.layers.push_back(std::move(c));
  }
  st.hidden = layer_norm<S>(x, P.tensor(P.lnf_g), P.tensor(P.lnf_b), st.final_xhat, st.final_rstd);
  return st;
}

template <typename S>
void backward_sequence(const Params<S>& P, const SequenceState<S>& st, const Matrix<S>& dh_in, Params<S>& G) {
  const auto& cfg = P.config();
  const auto dh = static_cast<Eigen::Index>(cfg.head_dim());
  const S scale = S(1) / std::sqrt(static_cast<S>(dh));

  Matrix<S> dx = layer_norm_backward<S>(dh_in, st.final_xhat, st.final_rstd, P.tensor(P.lnf_g), G.tensor(P.lnf_g),
                                        G.tensor(P.lnf_b));
  for (std::size_t li = P.blocks.size(); li-- > 0;) {
    const auto& B = P.blocks[li];
    const auto& c = st.layers[li];

    Matrix<S> df = dx;
    if (c.ffn_mask.size() > 0) df.array() *= c.ffn_mask.array();
    G.tensor(B.w2).noalias() += c.g.transpose() * df;
    G.tensor(B.b2).row(0) += df.colwise().sum();
    Matrix<S> du = df * P.tensor(B.w2).transpose();
    du.array() *= c.u.unaryExpr([](S v) { return gelu_grad(v); }).array();
    G.tensor(B.w1).noalias() += c.b.transpose() * du;
    G.tensor(B.b1).row(0) += du.colwise().sum();
    Matrix<S> db = du * P.tensor(B.w1).transpose();
    dx += layer_norm_backward<S>(db, c.xhat2, c.rstd2, P.tensor(B.ln2_g), G.tensor(B.ln2_g), G.tensor(B.ln2_b));

    Matrix<S> dattn = dx;
    if (c.attn_mask.size() > 0) dattn.array() *= c.attn_mask.array();
    G.tensor(B.wo).noalias() += c.o.transpose() * dattn;
    G.tensor(B.bo).row(0) += dattn.colwise().sum();
    const Matrix<S> d_o = dattn * P.tensor(B.wo).transpose();

    Matrix<S> dq(c.q.rows(), c.q.cols());
    Matrix<S> dk(c.k.rows(), c.k.cols());
    Matrix<S> dv(c.v.rows(), c.v.cols());
    for (std::size_t h = 0; h < c.probs.size(); ++h) {
      const auto off = static_cast<Eigen::Index>(h) * dh;
      const Matrix<S>& p = c.probs[h];
      const Matrix<S> doh = d_o.middleCols(off, dh);
      Matrix<S> dp = doh * c.v.middleCols(off, dh).transpose();
      dv.middleCols(off, dh) = p.transpose() * doh;
      for (Eigen::Index i = 0; i < dp.rows(); ++i) {
        const S dot = (dp.row(i).array() * p.row(i).array()).sum();
        dp.row(i) = (p.row(i).array() * (dp.row(i).array() - dot)).matrix();
      }
      dp *= scale;
      dq.middleCols(off, dh) = dp * c.k.middleCols(off, dh);
      dk.middleCols(off, dh) = dp.transpose() * c.q.middleCols(off, dh);
    }
    G.tensor(B.wq).noalias() += c.a.transpose() * dq;
    G.tensor(B.bq).row(0) += dq.colwise().sum();
    G.tensor(B.wk).noalias() += c.a.transpose() * dk;
    G.tensor(B.bk).row(0) += dk.colwise().sum();
    G.tensor(B.wv).noalias() += c.a.transpose() * dv;
    G.tensor(B.bv).row(0) += dv.colwise().sum();
    Matrix<S> da = dq * P.tensor(B.wq).transpose();
    da.noalias() += dk * P.tensor(B.wk).transpose();
    da.noalias() += dv * P.tensor(B.wv).transpose();
    dx += layer_norm_backward<S>(da, c.xhat1, c.rstd1, P.tensor(B.ln1_g), G.tensor(B.ln1_g), G.tensor(B.ln1_b));
  }
  if (st.emb_mask.size() > 0) dx.array() *= st.emb_mask.array();
  auto dtok = G.tensor(P.tok_emb);
  auto dpos = G.tensor(P.pos_emb);
  for (Eigen::Index i = 0; i < dx.rows(); ++i) {
    dtok.row(st.ids[static_cast<std::size_t>(i)]) += dx.row(i);
    dpos.row(static_cast<Eigen::Index>(st.positions[static_cast<std::size_t>(i)])) += dx.row(i);
  }
}

}  // namespace

template <typename S>
ForwardPass<S> forward(const Params<S>& params, std::span<const TokenId> input, std::span<const std::uint8_t> attention,
                       std::size_t rows, std::size_t width, bool train, Rng* rng) {
  const auto& cfg = params.config();
  if (input.size() != rows * width || attention.size() != rows * width) {
    throw std::invalid_argument("input and attention must be rows x width");
  }
  if (train && cfg.dropout > 0.0 && rng == nullptr) throw std::invalid_argument("dropout requires an rng");
  ForwardPass<S> pass;
  pass.rows = rows;
  pass.width = width;
  pass.train = train;
  pass.seqs.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<TokenId> ids;
    std::vector<std::size_t> positions;
    for (std::size_t j = 0; j < width; ++j) {
      if (!attention[r * width + j]) continue;
      const TokenId id = input[r * width + j];
      if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
        throw std::invalid_argument("token id " + std::to_string(id) + " outside the vocabulary");
      }
      if (j >= cfg.max_len) throw std::invalid_argument("sequence longer than max_len");
      ids.push_back(id);
      positions.push_back(j);
    }
    if (ids.empty()) throw std::invalid_argument("row without real tokens");
    pass.seqs.push_back(forward_sequence(params, std::move(ids), std::move(positions), train, rng));
  }
  return pass;
}

template <typename S>
Matrix<S> padded_hidden(const ForwardPass<S>& pass, std::size_t model_dim) {
  Matrix<S> out = Matrix<S>::Zero(static_cast<Eigen::Index>(pass.rows * pass.width), static_cast<Eigen::Index>(model_dim));
  for (std::size_t r = 0; r < pass.rows; ++r) {
    const auto& st = pass.seqs[r];
    for (std::size_t i = 0; i < st.positions.size(); ++i) {
      out.row(static_cast<Eigen::Index>(r * pass.width + st.positions[i])) = st.hidden.row(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

template <typename S>
void backward(const Params<S>& params, const ForwardPass<S>& pass, const std::vector<Matrix<S>>& d_hidden,
              Params<S>& grads) {
  if (d_hidden.size() != pass.seqs.size() || !(grads.config() == params.config())) {
    throw IntegrityError("gradient does not match the forward cache");
  }
  for (std::size_t r = 0; r < pass.seqs.size(); ++r) {
    const auto& st = pass.seqs[r];
    if (d_hidden[r].rows() != st.hidden.rows() || d_hidden[r].cols() != st.hidden.cols()) {
      throw IntegrityError("gradient does not match the forward cache");
    }
    backward_sequence(params, st, d_hidden[r], grads);
  }
}

template <typename S>
Matrix<S> pool_mean(const ForwardPass<S>& pass) {
  if (pass.seqs.empty()) return {};
  Matrix<S> out(static_cast<Eigen::Index>(pass.rows), pass.seqs.front().hidden.cols());
  for (std::size_t r = 0; r < pass.rows; ++r) out.row(static_cast<Eigen::Index>(r)) = pass.seqs[r].hidden.colwise().mean();
  return out;
}

template <typename S>
Matrix<S> pool_mean(const Matrix<S>& hidden, std::span<const std::uint8_t> attention, std::size_t rows,
                    std::size_t width) {
  if (static_cast<std::size_t>(hidden.rows()) != rows * width || attention.size() != rows * width) {
    throw std::invalid_argument("pool_mean: shape mismatch");
  }
  Matrix<S> out = Matrix<S>::Zero(static_cast<Eigen::Index>(rows), hidden.cols());
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t n = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (!attention[r * width + j]) continue;
      out.row(static_cast<Eigen::Index>(r)) += hidden.row(static_cast<Eigen::Index>(r * width + j));
      ++n;
    }
    if (n == 0) throw std::invalid_argument("pool_mean: row without real tokens");
    out.row(static_cast<Eigen::Index>(r)) /= static_cast<S>(n);
  }
  return out;
}

template <typename S>
std::vector<Matrix<S>> pool_mean_backward(const ForwardPass<S>& pass, const Matrix<S>& d_pooled) {
  std::vector<Matrix<S>> out;
  out.reserve(pass.seqs.size());
  for (std::size_t r = 0; r < pass.seqs.size(); ++r) {
    const auto n = pass.seqs[r].hidden.rows();
    out.push_back(d_pooled.row(static_cast<Eigen::Index>(r)).replicate(n, 1) / static_cast<S>(n));
  }
  return out;
}

template <typename S>
Matrix<S> mlm_logits(const Params<S>& params, const Matrix<S>& hidden) {
  Matrix<S> logits = hidden * params.tensor(params.tok_emb).transpose();
  logits.rowwise() += params.tensor(params.mlm_bias).row(0);
  return logits;
}

template <typename S>
Matrix<S> mlm_logits_backward(const Params<S>& params, const Matrix<S>& hidden, const Matrix<S>& d_logits,
                              Params<S>& grads) {
  grads.tensor(params.tok_emb).noalias() += d_logits.transpose() * hidden;
  grads.tensor(params.mlm_bias).row(0) += d_logits.colwise().sum();
  return d_logits * params.tensor(params.tok_emb);
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t& pos) {
  if (pos + 4 > in.size()) throw IntegrityError("checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

std::string checkpoint_bytes(const Params<float>& params, const CheckpointMeta& meta) {
  nlohmann::ordered_json config = params.config().to_json();
  config["tokenizer_fingerprint"] = meta.tokenizer_fingerprint;
  config["step"] = meta.step;
  nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
  for (const auto& t : params.layout()) {
    manifest.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}, {"offset", t.offset}});
  }
  const std::string cj = config.dump();
  const std::string mj = manifest.dump();
  std::string out(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(cj.size()));
  out += cj;
  put_u32(out, static_cast<std::uint32_t>(mj.size()));
  out += mj;
  out.reserve(out.size() + params.data().size() * 4);
  for (float v : params.data()) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
  }
  return out;
}

void save_checkpoint(const std::string& path, const Params<float>& params, const CheckpointMeta& meta) {
  write_file(path, checkpoint_bytes(params, meta));
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 4 || bytes.compare(0, 4, kMagic, 4) != 0) throw IntegrityError(path + ": not a checkpoint");
  std::size_t pos = 4;
  if (get_u32(bytes, pos) != kCheckpointVersion) throw IntegrityError(path + ": unsupported checkpoint version");
  const std::uint32_t clen = get_u32(bytes, pos);
  if (pos + clen > bytes.size()) throw IntegrityError("checkpoint truncated");
  nlohmann::json config;
  nlohmann::json manifest;
  try {
    config = nlohmann::json::parse(bytes.substr(pos, clen));
    pos += clen;
    const std::uint32_t mlen = get_u32(bytes, pos);
    if (pos + mlen > bytes.size()) throw IntegrityError("checkpoint truncated");
    manifest = nlohmann::json::parse(bytes.substr(pos, mlen));
    pos += mlen;
  } catch (const nlohmann::json::exception& e) {
    throw IntegrityError(std::string("checkpoint header: ") + e.what());
  }
  LoadedCheckpoint ck{Params<float>(EncoderConfig::from_json(config)), {}};
  ck.meta.tokenizer_fingerprint = config.value("tokenizer_fingerprint", "");
  ck.meta.step = config.value("step", std::uint64_t{0});
  const auto& layout = ck.params.layout();
  if (manifest.size() != layout.size()) throw IntegrityError("checkpoint manifest does not match its config");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& m = manifest[i];
    if (m.at("name") != layout[i].name || m.at("offset").get<std::size_t>() != layout[i].offset ||
        m.at("shape")[0].get<std::size_t>() != layout[i].rows || m.at("shape")[1].get<std::size_t>() != layout[i].cols) {
      throw IntegrityError("checkpoint manifest entry " + layout[i].name + " does not match its config");
    }
  }
  auto& data = ck.params.data();
  if (bytes.size() - pos != data.size() * 4) throw IntegrityError("checkpoint tensor data has the wrong size");
  for (auto& v : data) {
    const std::uint32_t bits = get_u32(bytes, pos);
    std::memcpy(&v, &bits, 4);
  }
  return ck;
}

#define SAGEFORGE_INSTANTIATE(S)                                                                                   \
  template class Params<S>;                                                                                        \
  template Params<S> init_params<S>(const EncoderConfig&, std::uint64_t);                                          \
  template ForwardPass<S> forward<S>(const Params<S>&, std::span<const TokenId>, std::span<const std::uint8_t>,    \
                                     std::size_t, std::size_t, bool, Rng*);                                        \
  template Matrix<S> padded_hidden<S>(const ForwardPass<S>&, std::size_t);                                         \
  template void backward<S>(const Params<S>&, const ForwardPass<S>&, const std::vector<Matrix<S>>&, Params<S>&);   \
  template Matrix<S> pool_mean<S>(const ForwardPass<S>&);                                                          \
  template Matrix<S> pool_mean<S>(const Matrix<S>&, std::span<const std::uint8_t>, std::size_t, std::size_t);      \
  template std::vector<Matrix<S>> pool_mean_backward<S>(const ForwardPass<S>&, const Matrix<S>&);                  \
  template Matrix<S> mlm_logits<S>(const Params<S>&, const Matrix<S>&);                                            \
  template Matrix<S> mlm_logits_backward<S>(const Params<S>&, const Matrix<S>&, const Matrix<S>&, Params<S>&);

SAGEFORGE_INSTANTIATE(float)
SAGEFORGE_INSTANTIATE(double)

}  // namespace sageforge::encoder
