#include "pdc/info_nce.hpp"

#include <cmath>

#include "pdc/error.hpp"

namespace pdc {

double info_nce_logits(const Eigen::VectorXd& logits, Eigen::Index positive) {
  require(logits.size() >= 1 && positive >= 0 && positive < logits.size(), ErrorCode::InvalidInput,
          "positive logit index out of range");
  require(logits.allFinite(), ErrorCode::InvalidInput, "logits must be finite");
  const double m = logits.maxCoeff();
  const double sum = (logits.array() - m).exp().sum();
  return (m - logits(positive)) + std::log(sum);
}

double info_nce(const ContrastiveBatch& batch) {
  require(std::isfinite(batch.temperature) && batch.temperature > 0.0, ErrorCode::Config,
          "temperature must be > 0");
  const Eigen::Index dim = batch.query.size();
  require(dim >= 1 && batch.positive.size() == dim && (batch.negatives.rows() == 0 || batch.negatives.cols() == dim),
          ErrorCode::DimensionMismatch, "query and keys must share one dimension");
  Eigen::VectorXd logits(batch.negatives.rows() + 1);
  logits(0) = batch.query.dot(batch.positive) / batch.temperature;
  if (batch.negatives.rows() > 0) logits.tail(batch.negatives.rows()) = batch.negatives * batch.query / batch.temperature;
  return info_nce_logits(logits, 0);
}

}  // namespace pdc
