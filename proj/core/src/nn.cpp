#include "cltci/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace cltci::nn {

namespace {

using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

// column k of the patch matrix holds one spatial position, rows run over
// (cin, ky, kx)
void im2col(const float* x, int c, int h, int w, int k, int pad, RowMat& col) {
  const int hw = h * w;
  int row = 0;
  for (int ci = 0; ci < c; ++ci) {
    const float* plane = x + static_cast<std::size_t>(ci) * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        float* dst = col.data() + static_cast<std::size_t>(row) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= h) {
            std::fill(dst + y * w, dst + (y + 1) * w, 0.0f);
            continue;
          }
          const float* src = plane + sy * w;
          for (int xph = 0; xph < w; ++xph) {
            const int sx = xph + kx - pad;
            dst[y * w + xph] = (sx < 0 || sx >= w) ? 0.0f : src[sx];
          }
        }
      }
    }
  }
}

void col2im_accumulate(const RowMat& col, int c, int h, int w, int k, int pad, float* gx) {
  const int hw = h * w;
  int row = 0;
  for (int ci = 0; ci < c; ++ci) {
    float* plane = gx + static_cast<std::size_t>(ci) * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        const float* src = col.data() + static_cast<std::size_t>(row) * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= h) continue;
          for (int xph = 0; xph < w; ++xph) {
            const int sx = xph + kx - pad;
            if (sx < 0 || sx >= w) continue;
            plane[sy * w + sx] += src[y * w + xph];
          }
        }
      }
    }
  }
}

}  // namespace

void fan_in_uniform(std::vector<float>& w, int fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / fan_in);
  for (float& v : w) v = static_cast<float>(rng.uniform(-bound, bound));
}

Conv2d::Conv2d(std::string name, int cin, int cout, int ksize, Rng& rng)
    : name_(std::move(name)), cin_(cin), cout_(cout), k_(ksize), pad_(ksize / 2) {
  if (cin < 1 || cout < 1 || (ksize != 1 && ksize != 3))
    throw std::invalid_argument("Conv2d: unsupported shape");
  w_.resize(static_cast<std::size_t>(cout) * cin * ksize * ksize);
  b_.assign(cout, 0.0f);
  gw_.assign(w_.size(), 0.0f);
  gb_.assign(b_.size(), 0.0f);
  fan_in_uniform(w_, cin * ksize * ksize, rng);
}

Tensor Conv2d::forward(const Tensor& x, bool cache) {
  if (x.c != cin_) throw std::invalid_argument("Conv2d " + name_ + ": channel mismatch");
  Tensor y(x.n, cout_, x.h, x.w);
  const int hw = x.h * x.w;
  const int krows = cin_ * k_ * k_;
  RowMat col(krows, hw);
  ConstMapMat wm(w_.data(), cout_, krows);
  for (int i = 0; i < x.n; ++i) {
    im2col(x.sample(i), cin_, x.h, x.w, k_, pad_, col);
    MapMat ym(y.sample(i), cout_, hw);
    ym.noalias() = wm * col;
    for (int co = 0; co < cout_; ++co) ym.row(co).array() += b_[co];
  }
  if (cache) x_ = x;
  return y;
}

Tensor Conv2d::backward(const Tensor& gy) {
  if (gy.c != cout_ || gy.n != x_.n || gy.h != x_.h || gy.w != x_.w)
    throw std::invalid_argument("Conv2d " + name_ + ": backward shape mismatch");
  Tensor gx(x_.n, cin_, x_.h, x_.w);
  const int hw = x_.h * x_.w;
  const int krows = cin_ * k_ * k_;
  RowMat col(krows, hw);
  RowMat gcol(krows, hw);
  ConstMapMat wm(w_.data(), cout_, krows);
  MapMat gwm(gw_.data(), cout_, krows);
  for (int i = 0; i < x_.n; ++i) {
    im2col(x_.sample(i), cin_, x_.h, x_.w, k_, pad_, col);
    ConstMapMat gym(gy.sample(i), cout_, hw);
    gwm.noalias() += gym * col.transpose();
    for (int co = 0; co < cout_; ++co) gb_[co] += gym.row(co).sum();
    gcol.noalias() = wm.transpose() * gym;
    col2im_accumulate(gcol, cin_, x_.h, x_.w, k_, pad_, gx.sample(i));
  }
  return gx;
}

void Conv2d::collect(std::vector<ParamRef>& out) {
  out.push_back({name_ + ".weight", &w_, &gw_, {cout_, cin_, k_, k_}});
  out.push_back({name_ + ".bias", &b_, &gb_, {cout_}});
}

Tensor ReLU::forward(const Tensor& x, bool cache) {
  Tensor y = x;
  for (float& v : y.v) v = v > 0.0f ? v : 0.0f;
  if (cache) y_ = y;
  return y;
}

Tensor ReLU::backward(const Tensor& gy) const {
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.v.size(); ++i)
    if (y_.v[i] <= 0.0f) gx.v[i] = 0.0f;
  return gx;
}

Tensor MaxPool2::forward(const Tensor& x, bool cache) {
  if (x.h % 2 != 0 || x.w % 2 != 0)
    throw std::invalid_argument("MaxPool2: spatial dims must be even");
  Tensor y(x.n, x.c, x.h / 2, x.w / 2);
  if (cache) {
    argmax_.resize(y.size());
    in_h_ = x.h;
    in_w_ = x.w;
    n_ = x.n;
    c_ = x.c;
  }
  std::size_t oi = 0;
  for (int i = 0; i < x.n; ++i) {
    for (int ci = 0; ci < x.c; ++ci) {
      for (int y0 = 0; y0 < x.h; y0 += 2) {
        for (int x0 = 0; x0 < x.w; x0 += 2, ++oi) {
          float best = x.at(i, ci, y0, x0);
          int by = y0, bx = x0;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
              const float v = x.at(i, ci, y0 + dy, x0 + dx);
              if (v > best) {
                best = v;
                by = y0 + dy;
                bx = x0 + dx;
              }
            }
          y.v[oi] = best;
          if (cache) argmax_[oi] = static_cast<std::uint32_t>(by * in_w_ + bx);
        }
      }
    }
  }
  return y;
}

Tensor MaxPool2::backward(const Tensor& gy) const {
  Tensor gx(n_, c_, in_h_, in_w_);
  std::size_t oi = 0;
  const std::size_t plane = static_cast<std::size_t>(in_h_) * in_w_;
  for (int i = 0; i < gy.n; ++i) {
    for (int ci = 0; ci < gy.c; ++ci) {
      float* gplane = gx.v.data() + (static_cast<std::size_t>(i) * c_ + ci) * plane;
      for (int p = 0; p < gy.h * gy.w; ++p, ++oi) gplane[argmax_[oi]] += gy.v[oi];
    }
  }
  return gx;
}

Tensor UpsampleNearest2::forward(const Tensor& x) const {
  Tensor y(x.n, x.c, x.h * 2, x.w * 2);
  for (int i = 0; i < x.n; ++i)
    for (int ci = 0; ci < x.c; ++ci)
      for (int r = 0; r < y.h; ++r)
        for (int cc = 0; cc < y.w; ++cc)
          y.at(i, ci, r, cc) = x.at(i, ci, r / 2, cc / 2);
  return y;
}

Tensor UpsampleNearest2::backward(const Tensor& gy) const {
  Tensor gx(gy.n, gy.c, gy.h / 2, gy.w / 2);
  for (int i = 0; i < gy.n; ++i)
    for (int ci = 0; ci < gy.c; ++ci)
      for (int r = 0; r < gy.h; ++r)
        for (int cc = 0; cc < gy.w; ++cc)
          gx.at(i, ci, r / 2, cc / 2) += gy.at(i, ci, r, cc);
  return gx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.n != b.n || a.h != b.h || a.w != b.w)
    throw std::invalid_argument("concat_channels: shape mismatch");
  Tensor y(a.n, a.c + b.c, a.h, a.w);
  const std::size_t pa = a.sample_size(), pb = b.sample_size();
  for (int i = 0; i < a.n; ++i) {
    std::copy(a.sample(i), a.sample(i) + pa, y.sample(i));
    std::copy(b.sample(i), b.sample(i) + pb, y.sample(i) + pa);
  }
  return y;
}

void split_channels(const Tensor& g, int c_first, Tensor& ga, Tensor& gb) {
  ga = Tensor(g.n, c_first, g.h, g.w);
  gb = Tensor(g.n, g.c - c_first, g.h, g.w);
  const std::size_t pa = ga.sample_size(), pb = gb.sample_size();
  for (int i = 0; i < g.n; ++i) {
    std::copy(g.sample(i), g.sample(i) + pa, ga.sample(i));
    std::copy(g.sample(i) + pa, g.sample(i) + pa + pb, gb.sample(i));
  }
}

RowMat GlobalAvgPool::forward(const Tensor& x, bool cache) {
  RowMat y(x.n, x.c);
  const float inv = 1.0f / static_cast<float>(x.h * x.w);
  for (int i = 0; i < x.n; ++i)
    for (int ci = 0; ci < x.c; ++ci) {
      const float* plane = x.sample(i) + static_cast<std::size_t>(ci) * x.h * x.w;
      float s = 0.0f;
      for (int p = 0; p < x.h * x.w; ++p) s += plane[p];
      y(i, ci) = s * inv;
    }
  if (cache) {
    n_ = x.n;
    c_ = x.c;
    h_ = x.h;
    w_ = x.w;
  }
  return y;
}

Tensor GlobalAvgPool::backward(const RowMat& gy) const {
  Tensor gx(n_, c_, h_, w_);
  const float inv = 1.0f / static_cast<float>(h_ * w_);
  for (int i = 0; i < n_; ++i)
    for (int ci = 0; ci < c_; ++ci) {
      float* plane = gx.sample(i) + static_cast<std::size_t>(ci) * h_ * w_;
      const float g = gy(i, ci) * inv;
      for (int p = 0; p < h_ * w_; ++p) plane[p] = g;
    }
  return gx;
}

Linear::Linear(std::string name, int in, int out, Rng& rng)
    : name_(std::move(name)), in_(in), out_(out) {
  if (in < 1 || out < 1) throw std::invalid_argument("Linear: bad dims");
  w_.resize(static_cast<std::size_t>(in) * out);
  b_.assign(out, 0.0f);
  gw_.assign(w_.size(), 0.0f);
  gb_.assign(b_.size(), 0.0f);
  fan_in_uniform(w_, in, rng);
}

RowMat Linear::forward(const RowMat& x, bool cache) {
  if (x.cols() != in_) throw std::invalid_argument("Linear " + name_ + ": dim mismatch");
  ConstMapMat wm(w_.data(), out_, in_);
  RowMat y = x * wm.transpose();
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (int j = 0; j < out_; ++j) y(i, j) += b_[j];
  if (cache) x_ = x;
  return y;
}

RowMat Linear::backward(const RowMat& gy) {
  ConstMapMat wm(w_.data(), out_, in_);
  MapMat gwm(gw_.data(), out_, in_);
  gwm.noalias() += gy.transpose() * x_;
  for (int j = 0; j < out_; ++j) gb_[j] += gy.col(j).sum();
  return gy * wm;
}

void Linear::collect(std::vector<ParamRef>& out) {
  out.push_back({name_ + ".weight", &w_, &gw_, {out_, in_}});
  out.push_back({name_ + ".bias", &b_, &gb_, {out_}});
}

}  // namespace cltci::nn
