#include "depthforge/loss.hpp"

#include <cmath>

namespace depthforge::loss {

namespace {

// One level of the residual pyramid. NaN marks invalid entries.
struct ResidualLevel {
  int width = 0;
  int height = 0;
  std::vector<double> r;
  // Number of valid children each pooled cell averaged over (level > 0).
  std::vector<int> pooled_from;

  bool valid(std::size_t i) const { return std::isfinite(r[i]); }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
};

ResidualLevel pool_half(const ResidualLevel& src) {
  ResidualLevel dst;
  dst.width = (src.width + 1) / 2;
  dst.height = (src.height + 1) / 2;
  dst.r.assign(static_cast<std::size_t>(dst.width) * dst.height,
               std::numeric_limits<double>::quiet_NaN());
  dst.pooled_from.assign(dst.r.size(), 0);
  for (int y = 0; y < dst.height; ++y) {
    for (int x = 0; x < dst.width; ++x) {
      double sum = 0.0;
      int m = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          int sx = 2 * x + dx;
          int sy = 2 * y + dy;
          if (sx >= src.width || sy >= src.height) continue;
          std::size_t si = src.index(sx, sy);
          if (src.valid(si)) {
            sum += src.r[si];
            ++m;
          }
        }
      }
      if (m > 0) {
        std::size_t di = dst.index(x, y);
        dst.r[di] = sum / m;
        dst.pooled_from[di] = m;
      }
    }
  }
  return dst;
}

double sign_of(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;  // subgradient convention at the kink
}

}  // namespace

void LossConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0) {
    throw ConfigError("loss weights must be >= 0");
  }
  if (!(tau > 0.0)) {
    throw ConfigError("tau must be > 0");
  }
  if (num_scales < 1) {
    throw ConfigError("num_scales must be >= 1");
  }
}

double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

TermResult data_loss(const LogDepthMap& pred, const LogDepthMap& gt) {
  if (!pred.same_shape(gt)) {
    throw DimensionError("pred and gt shapes differ");
  }
  const std::size_t count = pred.pixel_count();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (pred.valid(i) && gt.valid(i)) {
      sum += pred.at(i) - gt.at(i);
      ++n;
    }
  }
  if (n == 0) throw EmptyOverlapError("no mutually valid pixels");
  const double mean = sum / static_cast<double>(n);

  TermResult out;
  out.grad.assign(count, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (pred.valid(i) && gt.valid(i)) {
      double dev = (pred.at(i) - gt.at(i)) - mean;
      acc += dev * dev;
      out.grad[i] = 2.0 * dev / static_cast<double>(n);
    }
  }
  out.value = acc / static_cast<double>(n);
  return out;
}

TermResult grad_loss(const LogDepthMap& pred, const LogDepthMap& gt,
                     const LossConfig& cfg) {
  cfg.validate();
  if (!pred.same_shape(gt)) {
    throw DimensionError("pred and gt shapes differ");
  }
  if (pred.width() < 2 && pred.height() < 2) {
    throw DimensionError("grad_loss needs at least one adjacent pixel pair");
  }

  std::vector<ResidualLevel> levels;
  levels.reserve(cfg.num_scales);
  ResidualLevel base;
  base.width = pred.width();
  base.height = pred.height();
  base.r.assign(pred.pixel_count(),
                std::numeric_limits<double>::quiet_NaN());
  std::size_t n = 0;
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
    if (pred.valid(i) && gt.valid(i)) {
      base.r[i] = pred.at(i) - gt.at(i);
      ++n;
    }
  }
  if (n == 0) throw EmptyOverlapError("no mutually valid pixels");
  levels.push_back(std::move(base));
  for (int k = 1; k < cfg.num_scales; ++k) {
    levels.push_back(pool_half(levels.back()));
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  // Gradient with respect to each level's residual entries.
  std::vector<std::vector<double>> level_grad(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) {
    level_grad[k].assign(levels[k].r.size(), 0.0);
    const ResidualLevel& lv = levels[k];
    for (int y = 0; y < lv.height; ++y) {
      for (int x = 0; x < lv.width; ++x) {
        std::size_t i = lv.index(x, y);
        if (!lv.valid(i)) continue;
        if (x + 1 < lv.width) {
          std::size_t j = lv.index(x + 1, y);
          if (lv.valid(j)) {
            double d = lv.r[j] - lv.r[i];
            total += std::abs(d);
            double s = sign_of(d) * inv_n;
            level_grad[k][j] += s;
            level_grad[k][i] -= s;
          }
        }
        if (y + 1 < lv.height) {
          std::size_t j = lv.index(x, y + 1);
          if (lv.valid(j)) {
            double d = lv.r[j] - lv.r[i];
            total += std::abs(d);
            double s = sign_of(d) * inv_n;
            level_grad[k][j] += s;
            level_grad[k][i] -= s;
          }
        }
      }
    }
  }

  // Push coarse-level gradients back through the average pooling.
  for (std::size_t k = levels.size() - 1; k >= 1; --k) {
    const ResidualLevel& coarse = levels[k];
    const ResidualLevel& fine = levels[k - 1];
    for (int y = 0; y < coarse.height; ++y) {
      for (int x = 0; x < coarse.width; ++x) {
        std::size_t ci = coarse.index(x, y);
        double g = level_grad[k][ci];
        if (g == 0.0 || coarse.pooled_from[ci] == 0) continue;
        double share = g / coarse.pooled_from[ci];
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            int fx = 2 * x + dx;
            int fy = 2 * y + dy;
            if (fx >= fine.width || fy >= fine.height) continue;
            std::size_t fi = fine.index(fx, fy);
            if (fine.valid(fi)) level_grad[k - 1][fi] += share;
          }
        }
      }
    }
  }

  TermResult out;
  out.value = total * inv_n;
  out.grad = std::move(level_grad[0]);
  // Entries at pixels outside the mutual mask are zero already.
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    if (!levels[0].valid(i)) out.grad[i] = 0.0;
  }
  return out;
}

OrdTermResult ord_loss(const LogDepthMap& pred,
                       const std::vector<OrdinalPair>& pairs,
                       const LossConfig& cfg) {
  cfg.validate();
  OrdTermResult out;
  out.grad.assign(pred.pixel_count(), 0.0);
  if (pairs.empty()) return out;

  const double tau = cfg.tau;
  const double c = log1p_exp(tau) - log1p_exp(std::sqrt(tau));

  double acc = 0.0;
  std::vector<double> raw_grad(pred.pixel_count(), 0.0);
  for (const OrdinalPair& p : pairs) {
    if (!pred.in_bounds(p.ix, p.iy) || !pred.in_bounds(p.jx, p.jy)) {
      throw std::invalid_argument("ordinal pair out of image bounds");
    }
    if (p.same_pixels()) {
      throw std::invalid_argument("ordinal pair references one pixel twice");
    }
    std::size_t ii = pred.index(p.ix, p.iy);
    std::size_t jj = pred.index(p.jx, p.jy);
    if (!pred.valid(ii) || !pred.valid(jj)) {
      ++out.skipped_pairs;
      continue;
    }
    const double r = static_cast<double>(p.relation);
    const double margin = pred.at(ii) - pred.at(jj);
    const double P = -r * margin;

    double value, dP;
    if (P <= tau) {
      value = log1p_exp(P);
      dP = logistic(P);
    } else {
      double s = std::sqrt(P);
      value = log1p_exp(s) + c;
      dP = logistic(s) / (2.0 * s);
    }
    acc += value;
    raw_grad[ii] += dP * (-r);
    raw_grad[jj] += dP * r;
    ++out.used_pairs;
  }
  if (out.used_pairs == 0) return out;

  const double inv = 1.0 / static_cast<double>(out.used_pairs);
  out.value = acc * inv;
  for (std::size_t i = 0; i < raw_grad.size(); ++i) {
    out.grad[i] = raw_grad[i] * inv;
  }
  return out;
}

LossReport total_loss(const LogDepthMap& pred, const LogDepthMap& gt,
                      const std::vector<OrdinalPair>& pairs,
                      const LossConfig& cfg) {
  cfg.validate();
  TermResult data = data_loss(pred, gt);
  TermResult grad = grad_loss(pred, gt, cfg);
  OrdTermResult ord = ord_loss(pred, pairs, cfg);

  LossReport report;
  report.data_term = data.value;
  report.grad_term = grad.value;
  report.ord_term = ord.value;
  report.total = data.value + cfg.alpha * grad.value + cfg.beta * ord.value;
  report.used_pairs = ord.used_pairs;
  report.skipped_pairs = ord.skipped_pairs;

  std::size_t n = 0;
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
    if (pred.valid(i) && gt.valid(i)) ++n;
  }
  report.n_pixels = n;

  report.grad_wrt_log_depth.assign(pred.pixel_count(), 0.0);
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
    report.grad_wrt_log_depth[i] = data.grad[i] + cfg.alpha * grad.grad[i] +
                                   cfg.beta * ord.grad[i];
  }
  return report;
}

}  // namespace depthforge::loss
