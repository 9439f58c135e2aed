#pragma once

#include <cstdint>
#include <vector>

#include "depthforge/types.hpp"

namespace depthforge::loss {

struct LossConfig {
  double alpha = 0.5;  // weight of the gradient-matching term
  double beta = 0.1;   // weight of the ordinal term
  double tau = 0.25;   // knee where the ordinal loss switches branches
  int num_scales = 4;

  void validate() const;
};

// One loss term with its gradient with respect to the predicted log-depth
// grid. grad has one entry per pixel, zero where nothing contributes.
struct TermResult {
  double value = 0.0;
  std::vector<double> grad;
};

struct OrdTermResult {
  double value = 0.0;
  std::vector<double> grad;
  std::size_t used_pairs = 0;
  std::size_t skipped_pairs = 0;
};

struct LossReport {
  double data_term = 0.0;
  double grad_term = 0.0;
  double ord_term = 0.0;
  double total = 0.0;
  std::vector<double> grad_wrt_log_depth;
  std::size_t n_pixels = 0;        // mutually valid pixels
  std::size_t used_pairs = 0;
  std::size_t skipped_pairs = 0;
};

// Numerically stable log(1 + e^x) and 1 / (1 + e^-x).
double log1p_exp(double x);
double logistic(double x);

// Variance of the prediction residual over mutually valid pixels:
//   (1/n) sum R_i^2 - (1/n^2) (sum R_i)^2,  R_i = pred_i - gt_i.
// Invariant to adding a constant to pred. Throws EmptyOverlapError when no
// pixel is valid in both maps.
TermResult data_loss(const LogDepthMap& pred, const LogDepthMap& gt);

// Multi-scale l1 penalty on forward differences of the residual map. The
// residual pyramid is built by factor-2 average pooling over valid pixels
// (a pooled pixel is valid iff any contributor is). Normalized once by the
// full-resolution mutually-valid count.
TermResult grad_loss(const LogDepthMap& pred, const LogDepthMap& gt,
                     const LossConfig& cfg);

// Robust ordinal loss, mean over usable pairs of
//   log(1 + e^P)            if P <= tau
//   log(1 + e^sqrt(P)) + c  if P >  tau
// with P = -r (L_i - L_j) and c chosen so the branches meet at tau.
// Pairs touching an invalid pixel are skipped and tallied.
OrdTermResult ord_loss(const LogDepthMap& pred,
                       const std::vector<OrdinalPair>& pairs,
                       const LossConfig& cfg);

// data + alpha * grad + beta * ord, with the combined gradient grid.
LossReport total_loss(const LogDepthMap& pred, const LogDepthMap& gt,
                      const std::vector<OrdinalPair>& pairs,
                      const LossConfig& cfg);

}  // namespace depthforge::loss
