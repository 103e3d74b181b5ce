#include "slrkit/attention.hpp"

#include <cmath>

#include "slrkit/errors.hpp"

namespace slrkit::nn {

namespace {

void add_into(Tensor& acc, const Tensor& t) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += t[i];
}

Tensor add(const Tensor& a, const Tensor& b) {
  Tensor c = a;
  add_into(c, b);
  return c;
}

}  // namespace

Tensor multi_head_attention(const Tensor& x, const AttentionParams& p,
                            const std::vector<uint8_t>& key_mask, AttentionCache* cache) {
  const size_t t = x.dim(0), d = x.dim(1);
  if (d % p.heads != 0) throw ContractError("attention: d_model not divisible by heads");
  if (!key_mask.empty()) {
    if (key_mask.size() != t) throw ContractError("attention: mask length mismatch");
    bool any = false;
    for (uint8_t m : key_mask) any = any || m;
    if (!any) throw ContractError("attention: all positions masked");
  }
  const size_t dk = d / p.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor q = linear(x, p.wq, p.bq);
  Tensor k = linear(x, p.wk, p.bk);
  Tensor v = linear(x, p.wv, p.bv);

  Tensor weights({p.heads, t, t});
  Tensor context({t, d});
  for (size_t h = 0; h < p.heads; ++h) {
    const size_t off = h * dk;
    Tensor scores({t, t});
    for (size_t i = 0; i < t; ++i) {
      const double* qi = q.data() + i * d + off;
      double* srow = scores.data() + i * t;
      for (size_t j = 0; j < t; ++j) {
        const double* kj = k.data() + j * d + off;
        double s = 0.0;
        for (size_t c = 0; c < dk; ++c) s += qi[c] * kj[c];
        srow[j] = s * scale;
      }
    }
    softmax_rows_masked(scores, key_mask);
    double* wh = weights.data() + h * t * t;
    std::copy(scores.data(), scores.data() + t * t, wh);
    for (size_t i = 0; i < t; ++i) {
      double* ci = context.data() + i * d + off;
      const double* wrow = wh + i * t;
      for (size_t j = 0; j < t; ++j) {
        const double w = wrow[j];
        if (w == 0.0) continue;
        const double* vj = v.data() + j * d + off;
        for (size_t c = 0; c < dk; ++c) ci[c] += w * vj[c];
      }
    }
  }
  Tensor out = linear(context, p.wo, p.bo);
  if (cache) {
    cache->x = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->weights = std::move(weights);
    cache->context = std::move(context);
  }
  return out;
}

AttentionGrads multi_head_attention_backward(const Tensor& dy, const AttentionParams& p,
                                             const AttentionCache& cache) {
  const size_t t = dy.dim(0), d = dy.dim(1);
  const size_t dk = d / p.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  AttentionGrads g;
  // output projection
  const LinearGrads lo = linear_backward(cache.context, p.wo, dy);
  g.d.wo = lo.dw;
  g.d.bo = lo.db;
  const Tensor& dctx = lo.dx;

  Tensor dq({t, d}), dkk({t, d}), dv({t, d});
  for (size_t h = 0; h < p.heads; ++h) {
    const size_t off = h * dk;
    const double* wh = cache.weights.data() + h * t * t;
    // dL/dweights and dL/dv
    Tensor dw({t, t});
    for (size_t i = 0; i < t; ++i) {
      const double* dci = dctx.data() + i * d + off;
      double* dwrow = dw.data() + i * t;
      const double* wrow = wh + i * t;
      for (size_t j = 0; j < t; ++j) {
        const double* vj = cache.v.data() + j * d + off;
        double s = 0.0;
        for (size_t c = 0; c < dk; ++c) s += dci[c] * vj[c];
        dwrow[j] = s;
        const double w = wrow[j];
        if (w != 0.0) {
          double* dvj = dv.data() + j * d + off;
          for (size_t c = 0; c < dk; ++c) dvj[c] += w * dci[c];
        }
      }
    }
    // softmax backward: ds = w .* (dw - sum_j dw_ij w_ij)
    for (size_t i = 0; i < t; ++i) {
      const double* wrow = wh + i * t;
      double* dwrow = dw.data() + i * t;
      double dot = 0.0;
      for (size_t j = 0; j < t; ++j) dot += dwrow[j] * wrow[j];
      for (size_t j = 0; j < t; ++j) dwrow[j] = wrow[j] * (dwrow[j] - dot);
    }
    // scores = scale * q k^T
    for (size_t i = 0; i < t; ++i) {
      const double* dsrow = dw.data() + i * t;
      double* dqi = dq.data() + i * d + off;
      const double* qi = cache.q.data() + i * d + off;
      for (size_t j = 0; j < t; ++j) {
        const double ds = dsrow[j] * scale;
        if (ds == 0.0) continue;
        const double* kj = cache.k.data() + j * d + off;
        double* dkj = dkk.data() + j * d + off;
        for (size_t c = 0; c < dk; ++c) {
          dqi[c] += ds * kj[c];
          dkj[c] += ds * qi[c];
        }
      }
    }
  }

  const LinearGrads lq = linear_backward(cache.x, p.wq, dq);
  const LinearGrads lk = linear_backward(cache.x, p.wk, dkk);
  const LinearGrads lv = linear_backward(cache.x, p.wv, dv);
  g.d.wq = lq.dw;
  g.d.bq = lq.db;
  g.d.wk = lk.dw;
  g.d.bk = lk.db;
  g.d.wv = lv.dw;
  g.d.bv = lv.db;
  g.d.heads = p.heads;
  g.dx = lq.dx;
  add_into(g.dx, lk.dx);
  add_into(g.dx, lv.dx);
  return g;
}

Tensor transformer_layer(const Tensor& x, const TransformerLayerParams& p,
                         const std::vector<uint8_t>& key_mask, bool pre_norm,
                         TransformerLayerCache* cache) {
  TransformerLayerCache local;
  TransformerLayerCache& c = cache ? *cache : local;
  c.x = x;

  auto feed_forward = [&](const Tensor& in) {
    c.ff_pre = linear(in, p.ff.w1, p.ff.b1);
    c.ff_hidden = relu(c.ff_pre);
    c.ff_out = linear(c.ff_hidden, p.ff.w2, p.ff.b2);
  };

  if (!pre_norm) {
    c.attn_out = multi_head_attention(x, p.attn, key_mask, &c.attn);
    c.res1 = add(x, c.attn_out);
    c.normed1 = layer_norm(c.res1, p.norm1_gain, p.norm1_bias, 1e-5, &c.ln1);
    feed_forward(c.normed1);
    c.res2 = add(c.normed1, c.ff_out);
    return layer_norm(c.res2, p.norm2_gain, p.norm2_bias, 1e-5, &c.ln2);
  }
  c.normed1 = layer_norm(x, p.norm1_gain, p.norm1_bias, 1e-5, &c.ln1);
  c.attn_out = multi_head_attention(c.normed1, p.attn, key_mask, &c.attn);
  c.res1 = add(x, c.attn_out);
  Tensor normed2 = layer_norm(c.res1, p.norm2_gain, p.norm2_bias, 1e-5, &c.ln2);
  feed_forward(normed2);
  c.res2 = normed2;  // keep the FF input for backward
  return add(c.res1, c.ff_out);
}

TransformerLayerGrads transformer_layer_backward(const Tensor& dy,
                                                 const TransformerLayerParams& p,
                                                 const TransformerLayerCache& c, bool pre_norm) {
  TransformerLayerGrads g;

  auto ff_backward = [&](const Tensor& dout, const Tensor& ff_in) {
    const LinearGrads l2 = linear_backward(c.ff_hidden, p.ff.w2, dout);
    g.d.ff.w2 = l2.dw;
    g.d.ff.b2 = l2.db;
    const Tensor dhidden = relu_backward(c.ff_pre, l2.dx);
    const LinearGrads l1 = linear_backward(ff_in, p.ff.w1, dhidden);
    g.d.ff.w1 = l1.dw;
    g.d.ff.b1 = l1.db;
    return l1.dx;
  };

  if (!pre_norm) {
    const LayerNormGrads ln2 = layer_norm_backward(dy, p.norm2_gain, c.ln2);
    g.d.norm2_gain = ln2.dgain;
    g.d.norm2_bias = ln2.dbias;
    Tensor dnormed1 = ff_backward(ln2.dx, c.normed1);
    add_into(dnormed1, ln2.dx);  // residual
    const LayerNormGrads ln1 = layer_norm_backward(dnormed1, p.norm1_gain, c.ln1);
    g.d.norm1_gain = ln1.dgain;
    g.d.norm1_bias = ln1.dbias;
    const AttentionGrads ag = multi_head_attention_backward(ln1.dx, p.attn, c.attn);
    g.d.attn = ag.d;
    g.dx = ag.dx;
    add_into(g.dx, ln1.dx);  // residual
    return g;
  }

  // pre-norm: y = res1 + ff(LN2(res1)), res1 = x + attn(LN1(x))
  const Tensor dffin = ff_backward(dy, c.res2);
  const LayerNormGrads ln2 = layer_norm_backward(dffin, p.norm2_gain, c.ln2);
  g.d.norm2_gain = ln2.dgain;
  g.d.norm2_bias = ln2.dbias;
  Tensor dres1 = dy;
  add_into(dres1, ln2.dx);
  const AttentionGrads ag = multi_head_attention_backward(dres1, p.attn, c.attn);
  g.d.attn = ag.d;
  const LayerNormGrads ln1 = layer_norm_backward(ag.dx, p.norm1_gain, c.ln1);
  g.d.norm1_gain = ln1.dgain;
  g.d.norm1_bias = ln1.dbias;
  g.dx = dres1;
  add_into(g.dx, ln1.dx);
  return g;
}

}  // namespace slrkit::nn
