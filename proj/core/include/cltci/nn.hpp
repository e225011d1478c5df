#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "cltci/rng.hpp"

namespace cltci::nn {

// Dense NCHW float tensor.
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<float> v;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        v(static_cast<std::size_t>(n_) * c_ * h_ * w_, 0.0f) {}

  std::size_t size() const { return v.size(); }
  std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }
  float* sample(int i) { return v.data() + sample_size() * i; }
  const float* sample(int i) const { return v.data() + sample_size() * i; }
  float& at(int ni, int ci, int hi, int wi) {
    return v[((static_cast<std::size_t>(ni) * c + ci) * h + hi) * w + wi];
  }
  float at(int ni, int ci, int hi, int wi) const {
    return v[((static_cast<std::size_t>(ni) * c + ci) * h + hi) * w + wi];
  }
  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
};

// View of one learnable array and its gradient accumulator.
struct ParamRef {
  std::string name;
  std::vector<float>* value = nullptr;
  std::vector<float>* grad = nullptr;
  std::vector<int> shape;
};

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// fan-in-scaled uniform init, U(-sqrt(6/fan_in), +sqrt(6/fan_in))
void fan_in_uniform(std::vector<float>& w, int fan_in, Rng& rng);

// 3x3 (or 1x1) same-padding convolution, stride 1.
class Conv2d {
 public:
  Conv2d(std::string name, int cin, int cout, int ksize, Rng& rng);

  Tensor forward(const Tensor& x, bool cache);
  Tensor backward(const Tensor& gy);  // accumulates weight grads
  void collect(std::vector<ParamRef>& out);

  int cin() const { return cin_; }
  int cout() const { return cout_; }

 private:
  std::string name_;
  int cin_, cout_, k_, pad_;
  std::vector<float> w_, b_, gw_, gb_;
  Tensor x_;  // cached input for backward
};

class ReLU {
 public:
  Tensor forward(const Tensor& x, bool cache);
  Tensor backward(const Tensor& gy) const;

 private:
  Tensor y_;
};

class MaxPool2 {
 public:
  Tensor forward(const Tensor& x, bool cache);
  Tensor backward(const Tensor& gy) const;

 private:
  int in_h_ = 0, in_w_ = 0;
  std::vector<std::uint32_t> argmax_;
  int n_ = 0, c_ = 0;
};

class UpsampleNearest2 {
 public:
  Tensor forward(const Tensor& x) const;
  Tensor backward(const Tensor& gy) const;
};

// Channel-wise concatenation of two tensors with equal spatial dims.
Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& g, int c_first, Tensor& ga, Tensor& gb);

class GlobalAvgPool {
 public:
  // (N,C,H,W) -> N x C feature matrix
  RowMat forward(const Tensor& x, bool cache);
  Tensor backward(const RowMat& gy) const;

 private:
  int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
};

class Linear {
 public:
  Linear(std::string name, int in, int out, Rng& rng);

  RowMat forward(const RowMat& x, bool cache);
  RowMat backward(const RowMat& gy);
  void collect(std::vector<ParamRef>& out);

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }

 private:
  std::string name_;
  int in_, out_;
  std::vector<float> w_, b_, gw_, gb_;  // w is out x in, row-major
  RowMat x_;
};

}  // namespace cltci::nn
