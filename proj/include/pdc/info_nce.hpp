#pragma once

#include <Eigen/Core>

namespace pdc {

/// Query, its positive key, K negative keys (rows) and temperature.
struct ContrastiveBatch {
  Eigen::VectorXd query;
  Eigen::VectorXd positive;
  Eigen::MatrixXd negatives;
  double temperature = 1.0;
};

/// -log softmax of the positive among K + 1 logits q.k / tau.
double info_nce(const ContrastiveBatch& batch);

/// Same loss given precomputed logits; `positive` indexes the positive key.
double info_nce_logits(const Eigen::VectorXd& logits, Eigen::Index positive);

}  // namespace pdc
