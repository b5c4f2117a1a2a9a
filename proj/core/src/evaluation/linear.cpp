// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/evaluation/linear.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

namespace metagraph::evaluation {
namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using ConstMap = Eigen::Map<const Matrix>;

constexpr std::size_t kHistory = 10;
constexpr double kArmijo = 1e-4;
constexpr std::size_t kMaxBacktracks = 50;

/// Objective of one binary problem over z = [w; b].
class SquaredHinge {
 public:
  SquaredHinge(const ConstMap& x, Vector y, double lambda) : x_(x), y_(std::move(y)), lambda_(lambda) {}

  double operator()(const Vector& z, Vector& grad) const {
    const Eigen::Index d = x_.cols();
    const double n = static_cast<double>(x_.rows());
    const auto w = z.head(d);
    const double b = z[d];
    const Vector margin = (1.0 - (y_.array() * ((x_ * w).array() + b))).cwiseMax(0.0).matrix();
    const Vector coeff = (-2.0 / n) * (y_.array() * margin.array()).matrix();
    grad.resize(d + 1);
    grad.head(d) = lambda_ * w + x_.transpose() * coeff;
    grad[d] = coeff.sum();
    return 0.5 * lambda_ * w.squaredNorm() + margin.squaredNorm() / n;
  }

 private:
  const ConstMap& x_;
  Vector y_;
  double lambda_;
};

Vector lbfgs(const SquaredHinge& f, Eigen::Index dim, double tolerance, std::size_t max_iterations) {
  Vector z = Vector::Zero(dim);
  Vector g;
  double fz = f(z, g);
  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  Vector g_new;
  for (std::size_t it = 0; it < max_iterations && g.norm() > tolerance; ++it) {
    // two-loop recursion for the search direction
    Vector q = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(q);
      q += (alpha[k] - beta) * s_hist[k];
    }
    Vector direction = -q;
    double slope = g.dot(direction);
    if (slope >= 0.0) {  // not a descent direction: restart from steepest descent
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -g;
      slope = -g.squaredNorm();
    }
    double step = s_hist.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    Vector z_new;
    double f_new = fz;
    bool accepted = false;
    for (std::size_t bt = 0; bt < kMaxBacktracks; ++bt) {
      z_new = z + step * direction;
      f_new = f(z_new, g_new);
      if (f_new <= fz + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    Vector s = z_new - z;
    Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kHistory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    z = std::move(z_new);
    g = g_new;
    fz = f_new;
  }
  return z;
}

void require_width(const LinearClassifier& clf, const ad::Tensor& x) {
  if (!clf.trained) throw std::logic_error("LinearClassifier: not trained");
  if (x.cols() != clf.weights.rows()) {
    throw ad::ShapeError("LinearClassifier: input width " + std::to_string(x.cols()) + " != " +
                         std::to_string(clf.weights.rows()));
  }
}

}  // namespace

ad::Tensor LinearClassifier::decision(const ad::Tensor& x) const {
  require_width(*this, x);
  ad::Tensor out(x.rows(), weights.cols());
  if (x.rows() == 0) return out;
  Eigen::Map<Matrix> o(out.data(), static_cast<Eigen::Index>(out.rows()), static_cast<Eigen::Index>(out.cols()));
  const ConstMap xm(x.data(), static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(x.cols()));
  const ConstMap wm(weights.data(), static_cast<Eigen::Index>(weights.rows()),
                    static_cast<Eigen::Index>(weights.cols()));
  o = xm * wm;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c2 = 0; c2 < out.cols(); ++c2) out(r, c2) += bias[c2];
  }
  return out;
}

std::vector<int> LinearClassifier::predict(const ad::Tensor& x) const {
  const ad::Tensor d = decision(x);
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (classes.size() == 2) {
      out[r] = d(r, 0) > 0.0 ? classes[1] : classes[0];
    } else {
      const auto row = d.row(r);
      out[r] = classes[static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin())];
    }
  }
  return out;
}

std::vector<double> LinearClassifier::scores(const ad::Tensor& x) const {
  if (classes.size() != 2) throw std::logic_error("LinearClassifier::scores: binary classifiers only");
  const ad::Tensor d = decision(x);
  return std::vector<double>(d.values().begin(), d.values().end());
}

LinearClassifier train_linear(const ad::Tensor& x, std::span<const int> labels, const LinearOptions& options) {
  if (labels.size() != x.rows()) throw std::invalid_argument("train_linear: label count does not match rows");
  if (!(options.c > 0.0)) throw std::invalid_argument("train_linear: C must be > 0");
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw std::invalid_argument("train_linear: need at least two classes");

  LinearClassifier clf;
  clf.c = options.c;
  clf.classes.assign(distinct.begin(), distinct.end());
  const std::size_t columns = clf.classes.size() == 2 ? 1 : clf.classes.size();
  const std::size_t d = x.cols();
  clf.weights = ad::Tensor(d, columns);
  clf.bias.assign(columns, 0.0);

  const ConstMap xm(x.data(), static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(d));
  const double lambda = 1.0 / (1000.0 * options.c);
  for (std::size_t col = 0; col < columns; ++col) {
    const int positive = columns == 1 ? clf.classes[1] : clf.classes[col];
    Vector y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = labels[i] == positive ? 1.0 : -1.0;
    const SquaredHinge f(xm, std::move(y), lambda);
    const Vector z = lbfgs(f, static_cast<Eigen::Index>(d + 1), options.gradient_tolerance, options.max_iterations);
    for (std::size_t k = 0; k < d; ++k) clf.weights(k, col) = z[static_cast<Eigen::Index>(k)];
    clf.bias[col] = z[static_cast<Eigen::Index>(d)];
  }
  clf.trained = true;
  return clf;
}

}  // namespace metagraph::evaluation
