#include "mlpsens/activation.hpp"

#include "mlpsens/error.hpp"

#include <cmath>
#include <limits>

namespace mlpsens {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_elementwise(const ActivationKind& act) {
  if (act.kind == Activation::softmax) {
    throw ValidationError("softmax is vector-valued and has no scalar form");
  }
}

}  // namespace

Eigen::MatrixXd LayerJacobian::to_dense() const {
  if (form == Form::dense) return dense;
  return diag.asDiagonal();
}

bool is_elementwise(Activation kind) noexcept {
  return kind != Activation::softmax;
}

double activate(const ActivationKind& act, double z) {
  switch (act.kind) {
    case Activation::sigmoid:
      return sigmoid(z);
    case Activation::tanh:
      return std::tanh(z);
    case Activation::linear:
      return z;
    case Activation::relu:
      return z > 0.0 ? z : 0.0;
    case Activation::prelu:
      return z > 0.0 ? z : act.param * z;
    case Activation::elu:
      return z > 0.0 ? z : act.param * std::expm1(z);
    case Activation::step:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::arctan:
      return std::atan(z);
    case Activation::softplus:
      return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    case Activation::softmax:
      break;
  }
  require_elementwise(act);
  return 0.0;
}

double activate_derivative(const ActivationKind& act, double z) {
  switch (act.kind) {
    case Activation::sigmoid: {
      const double s = sigmoid(z);
      return s * (1.0 - s);
    }
    case Activation::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::linear:
      return 1.0;
    case Activation::relu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::prelu:
      return z > 0.0 ? 1.0 : act.param;
    case Activation::elu:
      return z > 0.0 ? 1.0 : act.param * std::exp(z);
    case Activation::step:
      return z == 0.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    case Activation::arctan:
      return 1.0 / (1.0 + z * z);
    case Activation::softplus:
      return sigmoid(z);
    case Activation::softmax:
      break;
  }
  require_elementwise(act);
  return 0.0;
}

Eigen::VectorXd eval(const ActivationKind& act,
                     const Eigen::Ref<const Eigen::VectorXd>& z) {
  if (act.kind == Activation::softmax) {
    if (z.size() == 0) return Eigen::VectorXd();
    const Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
    return (e / e.sum()).matrix();
  }
  Eigen::VectorXd y(z.size());
  for (Index i = 0; i < z.size(); ++i) y[i] = activate(act, z[i]);
  return y;
}

Eigen::MatrixXd softmax_jacobian(const Eigen::Ref<const Eigen::VectorXd>& y) {
  const Index n = y.size();
  Eigen::MatrixXd j(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      j(r, c) = r == c ? y[r] * (1.0 - y[c]) : -y[c] * y[r];
    }
  }
  return j;
}

LayerJacobian eval_jacobian(const ActivationKind& act,
                            const Eigen::Ref<const Eigen::VectorXd>& z) {
  LayerJacobian jac;
  if (act.kind == Activation::softmax) {
    jac.form = LayerJacobian::Form::dense;
    jac.dense = softmax_jacobian(eval(act, z));
    return jac;
  }
  jac.diag.resize(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    jac.diag[i] = activate_derivative(act, z[i]);
  }
  return jac;
}

Eigen::MatrixXd eval_rows(const ActivationKind& act, const Eigen::MatrixXd& z) {
  Eigen::MatrixXd y(z.rows(), z.cols());
  if (act.kind == Activation::softmax) {
    for (Index r = 0; r < z.rows(); ++r) {
      y.row(r) = eval(act, z.row(r).transpose()).transpose();
    }
    return y;
  }
  if (act.kind == Activation::linear) return z;
  for (Index k = 0; k < z.size(); ++k) y.data()[k] = activate(act, z.data()[k]);
  return y;
}

Eigen::MatrixXd derivative_rows(const ActivationKind& act,
                                const Eigen::MatrixXd& z) {
  require_elementwise(act);
  Eigen::MatrixXd d(z.rows(), z.cols());
  for (Index k = 0; k < z.size(); ++k) {
    d.data()[k] = activate_derivative(act, z.data()[k]);
  }
  return d;
}

}  // namespace mlpsens
