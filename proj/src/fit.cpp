#include "depthforge/fit.hpp"

#include <cmath>
#include <string>

#include "depthforge/rng.hpp"

namespace depthforge::fitkit {

void FitConfig::validate() const {
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (init_stddev < 0.0) throw ConfigError("init_stddev must be >= 0");
  if (fd_check_every && *fd_check_every < 1) {
    throw ConfigError("fd_check_every must be >= 1");
  }
  loss.validate();
}

namespace {

LogDepthMap initial_grid(const LogDepthMap& gt,
                         const std::vector<OrdinalPair>& pairs,
                         const FitConfig& cfg) {
  LogDepthMap grid(gt.width(), gt.height());
  std::vector<std::uint8_t> support(gt.pixel_count(), 0);
  for (std::size_t i = 0; i < gt.pixel_count(); ++i) {
    if (gt.valid(i)) support[i] = 1;
  }
  for (const OrdinalPair& p : pairs) {
    if (!gt.in_bounds(p.ix, p.iy) || !gt.in_bounds(p.jx, p.jy)) {
      throw std::invalid_argument("ordinal pair out of image bounds");
    }
    support[gt.index(p.ix, p.iy)] = 1;
    support[gt.index(p.jx, p.jy)] = 1;
  }
  std::mt19937_64 rng(cfg.init_seed);
  for (std::size_t i = 0; i < gt.pixel_count(); ++i) {
    if (!support[i]) continue;
    double v = 0.0;
    if (cfg.init == FitConfig::Init::Random) {
      v = gaussian(rng, cfg.init_stddev);
    }
    grid.set(i, v);
  }
  return grid;
}

}  // namespace

FitResult fit_log_depth(const LogDepthMap& gt,
                        const std::vector<OrdinalPair>& pairs,
                        const FitConfig& cfg,
                        const std::optional<LogDepthMap>& init_override) {
  cfg.validate();
  if (gt.valid_count() == 0) {
    throw EmptyOverlapError("ground truth has no valid pixels");
  }

  LogDepthMap grid;
  if (init_override) {
    if (!init_override->same_shape(gt)) {
      throw DimensionError("initial grid shape differs from ground truth");
    }
    grid = *init_override;
  } else {
    grid = initial_grid(gt, pairs, cfg);
  }

  FitResult result;
  result.trace.reserve(cfg.steps + 1);
  for (int step = 0; step <= cfg.steps; ++step) {
    loss::LossReport report = loss::total_loss(grid, gt, pairs, cfg.loss);
    if (!std::isfinite(report.total)) {
      throw DivergenceError(
          "loss diverged at step " + std::to_string(step), step);
    }
    result.trace.push_back(report.total);
    if (cfg.fd_check_every && step % *cfg.fd_check_every == 0) {
      AuditResult audit = finite_diff_audit(grid, gt, pairs, cfg);
      result.audits.emplace_back(step, audit.max_rel_error);
    }
    if (step == cfg.steps) break;
    for (std::size_t i = 0; i < grid.pixel_count(); ++i) {
      if (grid.valid(i)) {
        grid.set(i, grid.at(i) -
                        cfg.learning_rate * report.grad_wrt_log_depth[i]);
      }
    }
  }
  result.fitted = std::move(grid);
  return result;
}

AuditResult finite_diff_audit(const LogDepthMap& pred, const LogDepthMap& gt,
                              const std::vector<OrdinalPair>& pairs,
                              const FitConfig& cfg) {
  cfg.validate();
  const double h = 1e-4;
  loss::LossReport report = loss::total_loss(pred, gt, pairs, cfg.loss);

  AuditResult out;
  LogDepthMap probe = pred;
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
    if (!pred.valid(i)) continue;
    double analytic = report.grad_wrt_log_depth[i];
    if (std::abs(analytic) <= 1e-8) continue;
    double base = pred.at(i);
    probe.set(i, base + h);
    double up = loss::total_loss(probe, gt, pairs, cfg.loss).total;
    probe.set(i, base - h);
    double down = loss::total_loss(probe, gt, pairs, cfg.loss).total;
    probe.set(i, base);
    double fd = (up - down) / (2.0 * h);
    double rel = std::abs(fd - analytic) / std::abs(analytic);
    out.max_rel_error = std::max(out.max_rel_error, rel);
    ++out.evaluated;
  }
  return out;
}

}  // namespace depthforge::fitkit
