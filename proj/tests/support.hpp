#pragma once

#include "mlpsens/network.hpp"
#include "mlpsens/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace mlpsens::oracle {

// Plain-loop forward pass for a single sample, kept separate from the
// library's batched implementation so it can serve as an oracle.
inline Eigen::VectorXd reference_forward(const NetworkSpec& net, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  for (const auto& layer : net.layers) {
    Eigen::VectorXd z(layer.width);
    for (Index k = 0; k < layer.width; ++k) {
      double s = layer.weights(0, k);
      for (Index j = 0; j < y.size(); ++j) s += y(j) * layer.weights(j + 1, k);
      z(k) = s;
    }
    Eigen::VectorXd out(layer.width);
    const double a = layer.activation.param;
    switch (layer.activation.kind) {
      case Activation::sigmoid:
        for (Index k = 0; k < z.size(); ++k) out(k) = 1.0 / (1.0 + std::exp(-z(k)));
        break;
      case Activation::tanh:
        for (Index k = 0; k < z.size(); ++k) out(k) = std::tanh(z(k));
        break;
      case Activation::linear:
        out = z;
        break;
      case Activation::relu:
        for (Index k = 0; k < z.size(); ++k) out(k) = z(k) > 0 ? z(k) : 0.0;
        break;
      case Activation::prelu:
        for (Index k = 0; k < z.size(); ++k) out(k) = z(k) > 0 ? z(k) : a * z(k);
        break;
      case Activation::elu:
        for (Index k = 0; k < z.size(); ++k) out(k) = z(k) > 0 ? z(k) : a * (std::exp(z(k)) - 1.0);
        break;
      case Activation::step:
        for (Index k = 0; k < z.size(); ++k) out(k) = z(k) > 0 ? 1.0 : 0.0;
        break;
      case Activation::arctan:
        for (Index k = 0; k < z.size(); ++k) out(k) = std::atan(z(k));
        break;
      case Activation::softplus:
        for (Index k = 0; k < z.size(); ++k) out(k) = std::log1p(std::exp(z(k)));
        break;
      case Activation::softmax: {
        double total = 0.0;
        for (Index k = 0; k < z.size(); ++k) total += std::exp(z(k));
        for (Index k = 0; k < z.size(); ++k) out(k) = std::exp(z(k)) / total;
        break;
      }
    }
    y = out;
  }
  return y;
}

// Central-difference Jacobian, n^1 x n^L.
inline Eigen::MatrixXd fd_jacobian(const NetworkSpec& net, const Eigen::VectorXd& x,
                                   double h = 1e-5) {
  Eigen::MatrixXd J(x.size(), net.output_width());
  for (Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.row(i) = ((reference_forward(net, xp) - reference_forward(net, xm)) / (2 * h)).transpose();
  }
  return J;
}

inline NetworkSpec random_network(Rng& rng, const std::vector<Index>& structure,
                                  const std::vector<ActivationKind>& acts, double scale = 1.0) {
  std::vector<double> w(weight_count(structure));
  for (double& v : w) v = rng.uniform(-scale, scale);
  return network_from_flat(structure, w, acts);
}

inline const std::vector<Activation>& smooth_kinds() {
  static const std::vector<Activation> kinds{Activation::sigmoid, Activation::tanh,
                                             Activation::linear, Activation::arctan,
                                             Activation::softplus};
  return kinds;
}

// Random 2-4 layer network with widths 1-8 and smooth activations; the
// output layer is softmax with probability 1/4 when it has >= 2 neurons.
inline NetworkSpec random_smooth_network(Rng& rng) {
  const int layers = 2 + static_cast<int>(rng.next() % 3);
  std::vector<Index> structure;
  for (int l = 0; l < layers; ++l) structure.push_back(1 + static_cast<Index>(rng.next() % 8));
  std::vector<ActivationKind> acts;
  for (int l = 1; l < layers; ++l) {
    const auto& kinds = smooth_kinds();
    acts.push_back(ActivationKind::make(kinds[rng.next() % kinds.size()]));
  }
  if (structure.back() >= 2 && rng.next() % 4 == 0) {
    acts.back() = ActivationKind::make(Activation::softmax);
  }
  return random_network(rng, structure, acts);
}

inline Eigen::MatrixXd random_inputs(Rng& rng, Index n, Index d, double scale = 2.0) {
  Eigen::MatrixXd x(n, d);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < d; ++c) x(r, c) = rng.uniform(-scale, scale);
  return x;
}

}  // namespace mlpsens::oracle
