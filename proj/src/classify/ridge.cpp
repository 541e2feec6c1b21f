#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>
#include <cmath>
#include <string>

#include "spadev/classify.hpp"
#include "spadev/error.hpp"

namespace spadev {

struct RidgeAccumulator::Impl {
  Eigen::MatrixXd gram;    // U^T U, lower triangle maintained
  Eigen::MatrixXd cross;   // U^T V
  std::uint64_t samples = 0;
};

RidgeAccumulator::RidgeAccumulator(int n_inputs, int n_classes) : impl_(std::make_unique<Impl>()) {
  if (n_inputs <= 0 || n_classes <= 0) throw ConfigError("classifier dimensions must be positive");
  impl_->gram = Eigen::MatrixXd::Zero(n_inputs, n_inputs);
  impl_->cross = Eigen::MatrixXd::Zero(n_inputs, n_classes);
}

RidgeAccumulator::~RidgeAccumulator() = default;
RidgeAccumulator::RidgeAccumulator(RidgeAccumulator&&) noexcept = default;
RidgeAccumulator& RidgeAccumulator::operator=(RidgeAccumulator&&) noexcept = default;

std::uint64_t RidgeAccumulator::samples() const { return impl_->samples; }

void RidgeAccumulator::add(const Matrix& inputs, const Matrix& targets) {
  if (inputs.rows != targets.rows) throw ConfigError("U and V need the same number of rows");
  if (inputs.cols != impl_->gram.cols() || targets.cols != impl_->cross.cols()) {
    throw ConfigError("U/V column count does not match the accumulator");
  }
  for (double v : inputs.data) {
    if (!std::isfinite(v)) throw ConfigError("non-finite value in classifier inputs");
  }
  for (double v : targets.data) {
    if (!std::isfinite(v)) throw ConfigError("non-finite value in classifier targets");
  }
  if (inputs.rows == 0) return;
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> u(inputs.data.data(), inputs.rows, inputs.cols);
  Eigen::Map<const RowMajor> v(targets.data.data(), targets.rows, targets.cols);
  impl_->gram.selfadjointView<Eigen::Lower>().rankUpdate(u.transpose());
  impl_->cross.noalias() += u.transpose() * v;
  impl_->samples += static_cast<std::uint64_t>(inputs.rows);
}

void RidgeAccumulator::add_sample(std::span<const double> input, int class_id) {
  if (class_id < 0 || class_id >= impl_->cross.cols()) throw RangeError("class id outside the classifier");
  Matrix u(1, static_cast<int>(input.size()));
  std::copy(input.begin(), input.end(), u.data.begin());
  Matrix v(1, static_cast<int>(impl_->cross.cols()));
  v(0, class_id) = 1.0;
  add(u, v);
}

ClassifierWeights RidgeAccumulator::solve(double lambda) const {
  if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");
  const auto m = impl_->gram.rows();
  Eigen::MatrixXd a = impl_->gram.selfadjointView<Eigen::Lower>();
  a.diagonal().array() += lambda;

  // Solving A X = U^T V gives X = A^-1 U^T V, and W = X^T because A is symmetric.
  Eigen::MatrixXd x;
  if (lambda > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw SolveError("ridge system is not positive definite");
    x = llt.solve(impl_->cross);
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < m) {
      throw SolveError("U^T U is rank deficient (rank " + std::to_string(lu.rank()) + " of " +
                       std::to_string(m) + ") and lambda <= 0");
    }
    x = lu.solve(impl_->cross);
  }

  ClassifierWeights w;
  w.lambda = lambda;
  w.matrix = Matrix(static_cast<int>(x.cols()), static_cast<int>(x.rows()));
  for (int r = 0; r < w.matrix.rows; ++r) {
    for (int c = 0; c < w.matrix.cols; ++c) w.matrix(r, c) = x(c, r);
  }
  return w;
}

ClassifierWeights train_classifier(const Matrix& inputs, const Matrix& targets, double lambda) {
  if (inputs.rows < 1) throw ConfigError("need at least one training sample");
  RidgeAccumulator acc(inputs.cols, targets.cols);
  acc.add(inputs, targets);
  return acc.solve(lambda);
}

std::vector<double> classifier_output(const ClassifierWeights& weights, std::span<const double> input) {
  if (static_cast<int>(input.size()) != weights.n_inputs()) {
    throw ConfigError("input length " + std::to_string(input.size()) + " does not match classifier width " +
                      std::to_string(weights.n_inputs()));
  }
  std::vector<double> v(static_cast<std::size_t>(weights.n_classes()), 0.0);
  for (int r = 0; r < weights.n_classes(); ++r) {
    double s = 0;
    for (int c = 0; c < weights.n_inputs(); ++c) s += weights.matrix(r, c) * input[static_cast<std::size_t>(c)];
    v[static_cast<std::size_t>(r)] = s;
  }
  return v;
}

int predict(const ClassifierWeights& weights, std::span<const double> input) {
  const auto v = classifier_output(weights, input);
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

}  // namespace spadev
