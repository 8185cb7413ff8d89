#include "twofreq/activations.hpp"

namespace twofreq {
namespace {

template <typename F>
Matrix map(const Matrix& m, F f) {
  Matrix out(m.rows(), m.cols());
  auto src = m.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  return out;
}

}  // namespace

Matrix sigmoid(const Matrix& m) { return map(m, [](double x) { return sigmoid(x); }); }
Matrix tanh(const Matrix& m) { return map(m, [](double x) { return std::tanh(x); }); }
Matrix sigmoid_derivative(const Matrix& m) { return map(m, [](double x) { return sigmoid_derivative(x); }); }
Matrix tanh_derivative(const Matrix& m) { return map(m, [](double x) { return tanh_derivative(x); }); }

}  // namespace twofreq
