#include "slrkit/nn_ops.hpp"

#include <algorithm>
#include <cmath>

#include "slrkit/errors.hpp"

namespace slrkit::nn {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ContractError("matmul: shape mismatch " + a.shape_string() + " x " + b.shape_string());
  }
  const size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  Tensor c({n, m});
  for (size_t i = 0; i < n; ++i) {
    const double* arow = a.data() + i * k;
    double* crow = c.data() + i * m;
    for (size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b.data() + p * m;
      for (size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(0) != b.dim(0)) {
    throw ContractError("matmul_tn: shape mismatch");
  }
  const size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  Tensor c({k, m});
  for (size_t i = 0; i < n; ++i) {
    const double* arow = a.data() + i * k;
    const double* brow = b.data() + i * m;
    for (size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      double* crow = c.data() + p * m;
      for (size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(1)) {
    throw ContractError("matmul_nt: shape mismatch");
  }
  const size_t n = a.dim(0), k = a.dim(1), m = b.dim(0);
  Tensor c({n, m});
  for (size_t i = 0; i < n; ++i) {
    const double* arow = a.data() + i * k;
    double* crow = c.data() + i * m;
    for (size_t j = 0; j < m; ++j) {
      const double* brow = b.data() + j * k;
      double s = 0.0;
      for (size_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      crow[j] = s;
    }
  }
  return c;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.dim(1) != w.dim(0) ||
      w.dim(1) != b.dim(0)) {
    throw ContractError("linear: shape mismatch x" + x.shape_string() + " W" + w.shape_string() +
                        " b" + b.shape_string());
  }
  Tensor y = matmul(x, w);
  const size_t n = y.dim(0), m = y.dim(1);
  for (size_t i = 0; i < n; ++i) {
    double* row = y.data() + i * m;
    for (size_t j = 0; j < m; ++j) row[j] += b[j];
  }
  return y;
}

LinearGrads linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy) {
  LinearGrads g;
  g.dx = matmul_nt(dy, w);   // dy [n,m] * W^T [m,k]
  g.dw = matmul_tn(x, dy);   // x^T [k,n] * dy [n,m]
  g.db = Tensor({dy.dim(1)});
  for (size_t i = 0; i < dy.dim(0); ++i) {
    const double* row = dy.data() + i * dy.dim(1);
    for (size_t j = 0; j < dy.dim(1); ++j) g.db[j] += row[j];
  }
  return g;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps,
                  LayerNormCache* cache) {
  if (x.rank() != 2 || gain.rank() != 1 || bias.rank() != 1 || gain.dim(0) != x.dim(1) ||
      bias.dim(0) != x.dim(1)) {
    throw ContractError("layer_norm: shape mismatch");
  }
  const size_t n = x.dim(0), d = x.dim(1);
  Tensor y({n, d});
  Tensor xhat({n, d});
  std::vector<double> inv_std(n);
  for (size_t i = 0; i < n; ++i) {
    const double* row = x.data() + i * d;
    double mean = 0.0;
    for (size_t j = 0; j < d; ++j) mean += row[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (size_t j = 0; j < d; ++j) {
      const double c = row[j] - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[i] = inv;
    double* xh = xhat.data() + i * d;
    double* yr = y.data() + i * d;
    for (size_t j = 0; j < d; ++j) {
      xh[j] = (row[j] - mean) * inv;
      yr[j] = gain[j] * xh[j] + bias[j];
    }
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

LayerNormGrads layer_norm_backward(const Tensor& dy, const Tensor& gain,
                                   const LayerNormCache& cache) {
  const size_t n = dy.dim(0), d = dy.dim(1);
  LayerNormGrads g;
  g.dx = Tensor({n, d});
  g.dgain = Tensor({d});
  g.dbias = Tensor({d});
  for (size_t i = 0; i < n; ++i) {
    const double* dyr = dy.data() + i * d;
    const double* xh = cache.xhat.data() + i * d;
    double* dxr = g.dx.data() + i * d;
    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
    for (size_t j = 0; j < d; ++j) {
      const double dxhat = dyr[j] * gain[j];
      mean_dxhat += dxhat;
      mean_dxhat_xhat += dxhat * xh[j];
      g.dgain[j] += dyr[j] * xh[j];
      g.dbias[j] += dyr[j];
    }
    mean_dxhat /= static_cast<double>(d);
    mean_dxhat_xhat /= static_cast<double>(d);
    const double inv = cache.inv_std[i];
    for (size_t j = 0; j < d; ++j) {
      const double dxhat = dyr[j] * gain[j];
      dxr[j] = inv * (dxhat - mean_dxhat - xh[j] * mean_dxhat_xhat);
    }
  }
  return g;
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (size_t i = 0; i < y.size(); ++i) y[i] = std::max(0.0, y[i]);
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx = dy;
  for (size_t i = 0; i < dx.size(); ++i) {
    if (x[i] <= 0.0) dx[i] = 0.0;
  }
  return dx;
}

Tensor tanh(const Tensor& x) {
  Tensor y = x;
  for (size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(y[i]);
  return y;
}

Tensor tanh_backward(const Tensor& y, const Tensor& dy) {
  Tensor dx = dy;
  for (size_t i = 0; i < dx.size(); ++i) dx[i] *= 1.0 - y[i] * y[i];
  return dx;
}

Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng, std::vector<uint8_t>* mask_out) {
  if (!(p >= 0.0 && p < 1.0)) throw ContractError("dropout: p must be in [0,1)");
  if (mode == Mode::eval || p == 0.0) {
    if (mask_out) mask_out->assign(x.size(), 1);
    return x;
  }
  const double scale = 1.0 / (1.0 - p);
  Tensor y = x;
  if (mask_out) mask_out->assign(x.size(), 1);
  for (size_t i = 0; i < y.size(); ++i) {
    if (rng.uniform() < p) {
      y[i] = 0.0;
      if (mask_out) (*mask_out)[i] = 0;
    } else {
      y[i] *= scale;
    }
  }
  return y;
}

Tensor dropout_backward(const Tensor& dy, double p, const std::vector<uint8_t>& mask) {
  const double scale = 1.0 / (1.0 - p);
  Tensor dx = dy;
  for (size_t i = 0; i < dx.size(); ++i) dx[i] = mask[i] ? dx[i] * scale : 0.0;
  return dx;
}

CrossEntropyResult softmax_cross_entropy(const Tensor& logits, size_t label) {
  const size_t c = logits.size();
  if (c < 2) throw ContractError("softmax_cross_entropy: need at least 2 classes");
  if (label >= c) throw ContractError("softmax_cross_entropy: label out of range");
  CrossEntropyResult r;
  double maxv = logits[0];
  r.argmax = 0;
  for (size_t i = 1; i < c; ++i) {
    if (logits[i] > maxv) {
      maxv = logits[i];
      r.argmax = i;
    }
  }
  double z = 0.0;
  r.grad_logits = Tensor(logits.shape());
  for (size_t i = 0; i < c; ++i) {
    r.grad_logits[i] = std::exp(logits[i] - maxv);
    z += r.grad_logits[i];
  }
  r.loss = -(logits[label] - maxv - std::log(z));
  const double inv_z = 1.0 / z;
  for (size_t i = 0; i < c; ++i) r.grad_logits[i] *= inv_z;
  r.grad_logits[label] -= 1.0;
  return r;
}

L1Result l1_penalty(const Tensor& w, double lambda) {
  if (lambda < 0.0) throw ContractError("l1_penalty: lambda must be >= 0");
  L1Result r;
  r.subgradient = Tensor(w.shape());
  for (size_t i = 0; i < w.size(); ++i) {
    r.penalty += std::abs(w[i]);
    r.subgradient[i] = w[i] > 0.0 ? lambda : (w[i] < 0.0 ? -lambda : 0.0);
  }
  r.penalty *= lambda;
  return r;
}

void softmax_rows_masked(Tensor& scores, const std::vector<uint8_t>& key_mask) {
  const size_t n = scores.dim(0), m = scores.dim(1);
  constexpr double kMaskOffset = -1e30;
  for (size_t i = 0; i < n; ++i) {
    double* row = scores.data() + i * m;
    if (!key_mask.empty()) {
      for (size_t j = 0; j < m; ++j) {
        if (!key_mask[j]) row[j] += kMaskOffset;
      }
    }
    double maxv = row[0];
    for (size_t j = 1; j < m; ++j) maxv = std::max(maxv, row[j]);
    double z = 0.0;
    for (size_t j = 0; j < m; ++j) {
      row[j] = std::exp(row[j] - maxv);
      z += row[j];
    }
    const double inv = 1.0 / z;
    for (size_t j = 0; j < m; ++j) row[j] *= inv;
  }
}

}  // namespace slrkit::nn
