#pragma once

#include "mlpsens/network.hpp"

namespace mlpsens {

/// Derivative of a layer's activations with respect to its pre-activations.
/// Elementwise activations give a diagonal; softmax gives a dense matrix
/// whose (i, j) entry is d f_j / d z_i.
struct LayerJacobian {
  enum class Form { diagonal, dense };

  Form form = Form::diagonal;
  Eigen::VectorXd diag;
  Eigen::MatrixXd dense;

  Eigen::MatrixXd to_dense() const;
};

bool is_elementwise(Activation kind) noexcept;

/// Scalar f(z) for elementwise kinds. Softmax is not scalar and throws.
double activate(const ActivationKind& act, double z);

/// Scalar f'(z) for elementwise kinds. The step derivative at exactly z = 0 is
/// NaN.
double activate_derivative(const ActivationKind& act, double z);

Eigen::VectorXd eval(const ActivationKind& act,
                     const Eigen::Ref<const Eigen::VectorXd>& z);

LayerJacobian eval_jacobian(const ActivationKind& act,
                            const Eigen::Ref<const Eigen::VectorXd>& z);

/// Row-wise batch evaluation: each row of `z` is one sample.
Eigen::MatrixXd eval_rows(const ActivationKind& act, const Eigen::MatrixXd& z);

/// Elementwise f'(z) over a batch. Not defined for softmax.
Eigen::MatrixXd derivative_rows(const ActivationKind& act,
                                const Eigen::MatrixXd& z);

/// Softmax Jacobian given the softmax output `y` of one sample.
Eigen::MatrixXd softmax_jacobian(const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace mlpsens
