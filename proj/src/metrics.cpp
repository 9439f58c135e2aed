#include "depthforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "depthforge/loss.hpp"
#include "depthforge/rng.hpp"

namespace depthforge::metrics {

namespace {

std::vector<std::size_t> mutual_pixels(const DepthMap& a, const DepthMap& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("depth map shapes differ");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) {
    if (a.valid(i) && b.valid(i)) out.push_back(i);
  }
  return out;
}

// Decodes ascending unordered-pair indices into (i, j), i < j, under the
// row-major enumeration k = 0 -> (0,1), ..., n-2 -> (0,n-1), n-1 -> (1,2).
// Amortized O(1) per call because the cursor only moves forward.
class PairDecoder {
 public:
  explicit PairDecoder(std::uint64_t n) : n_(n) {}

  std::pair<std::uint64_t, std::uint64_t> operator()(std::uint64_t k) {
    while (k >= row_end_) {
      row_start_ = row_end_;
      ++i_;
      row_end_ += n_ - 1 - i_;
    }
    return {i_, i_ + 1 + (k - row_start_)};
  }

 private:
  std::uint64_t n_;
  std::uint64_t i_ = 0;
  std::uint64_t row_start_ = 0;
  std::uint64_t row_end_ = n_ - 1;
};

// Floyd's algorithm: m distinct values uniformly from [0, total).
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t total,
                                                      std::uint64_t m,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::unordered_map<std::uint64_t, char> chosen;
  std::vector<std::uint64_t> out;
  out.reserve(m);
  for (std::uint64_t t = total - m; t < total; ++t) {
    std::uint64_t r = uniform_index(rng, t + 1);
    if (chosen.count(r)) {
      out.push_back(t);
      chosen.emplace(t, 1);
    } else {
      out.push_back(r);
      chosen.emplace(r, 1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void MetricConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("delta must be in (0, 1)");
  }
  if (!(whdr_delta > 0.0 && whdr_delta < 1.0)) {
    throw ConfigError("whdr_delta must be in (0, 1)");
  }
  if (sdr_max_pairs < 1) {
    throw ConfigError("sdr_max_pairs must be >= 1");
  }
  if (depth_cap && !(*depth_cap > 0.0)) {
    throw ConfigError("depth_cap must be > 0");
  }
}

double align_scale(const DepthMap& pred, const DepthMap& gt) {
  auto pixels = mutual_pixels(pred, gt);
  if (pixels.empty()) throw EmptyOverlapError("no mutually valid pixels");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i : pixels) {
    double p = pred.at(i);
    double g = gt.at(i);
    num += p * g;
    den += p * p;
  }
  if (den == 0.0) throw EmptyOverlapError("prediction is identically zero");
  return num / den;
}

double si_rmse(const DepthMap& pred, const DepthMap& gt) {
  auto term = loss::data_loss(to_log(pred), to_log(gt));
  return std::sqrt(std::max(term.value, 0.0));
}

int ord(double a, double b, double delta) {
  double ratio = a / b;
  if (ratio > 1.0 + delta) return 1;
  if (ratio < 1.0 - delta) return -1;
  return 0;
}

SdrResult sdr(const DepthMap& pred, const DepthMap& sfm_gt,
              const MetricConfig& cfg) {
  cfg.validate();
  auto pixels = mutual_pixels(pred, sfm_gt);
  const std::uint64_t n = pixels.size();
  if (n < 2) throw EmptyOverlapError("sdr needs at least 2 shared pixels");

  const std::uint64_t total = n * (n - 1) / 2;
  SdrResult res;
  std::uint64_t dis = 0, dis_eq = 0, dis_neq = 0;

  auto score = [&](std::uint64_t a, std::uint64_t b) {
    std::size_t pi = pixels[a];
    std::size_t pj = pixels[b];
    int rel_pred = ord(pred.at(pi), pred.at(pj), cfg.delta);
    int rel_gt = ord(sfm_gt.at(pi), sfm_gt.at(pj), cfg.delta);
    bool disagree = rel_pred != rel_gt;
    ++res.n;
    dis += disagree;
    if (rel_gt == 0) {
      ++res.n_eq;
      dis_eq += disagree;
    } else {
      ++res.n_neq;
      dis_neq += disagree;
    }
  };

  if (total <= cfg.sdr_max_pairs) {
    for (std::uint64_t a = 0; a < n; ++a) {
      for (std::uint64_t b = a + 1; b < n; ++b) score(a, b);
    }
  } else {
    PairDecoder decode(n);
    for (std::uint64_t k :
         sample_without_replacement(total, cfg.sdr_max_pairs, cfg.rng_seed)) {
      auto [a, b] = decode(k);
      score(a, b);
    }
  }

  res.sdr = static_cast<double>(dis) / static_cast<double>(res.n);
  res.sdr_eq = res.n_eq ? static_cast<double>(dis_eq) / res.n_eq : 0.0;
  res.sdr_neq = res.n_neq ? static_cast<double>(dis_neq) / res.n_neq : 0.0;
  return res;
}

double whdr(const DepthMap& pred, const std::vector<OrdinalPairRow>& rows,
            const MetricConfig& cfg) {
  cfg.validate();
  if (rows.empty()) throw EmptyOverlapError("whdr needs at least one pair");
  double weight_sum = 0.0;
  double disagree_sum = 0.0;
  for (const auto& row : rows) {
    const OrdinalPair& p = row.pair;
    if (!pred.in_bounds(p.ix, p.iy) || !pred.in_bounds(p.jx, p.jy)) {
      throw std::invalid_argument("pair out of image bounds");
    }
    if (!pred.valid(p.ix, p.iy) || !pred.valid(p.jx, p.jy)) {
      throw std::invalid_argument("pair references an invalid prediction");
    }
    int rel = ord(pred.at(p.ix, p.iy), pred.at(p.jx, p.jy), cfg.whdr_delta);
    weight_sum += row.weight;
    if (rel != p.relation) disagree_sum += row.weight;
  }
  return disagree_sum / weight_sum;
}

StandardMetrics standard_metrics(const DepthMap& pred, const DepthMap& gt,
                                 const MetricConfig& cfg) {
  cfg.validate();
  auto pixels = mutual_pixels(pred, gt);
  if (cfg.depth_cap) {
    std::vector<std::size_t> kept;
    for (std::size_t i : pixels) {
      if (static_cast<double>(gt.at(i)) <= *cfg.depth_cap) kept.push_back(i);
    }
    pixels = std::move(kept);
  }
  if (pixels.empty()) {
    throw EmptyOverlapError("no pixels survive overlap and depth cap");
  }

  double s = 1.0;
  if (cfg.align_scale) {
    double num = 0.0, den = 0.0;
    for (std::size_t i : pixels) {
      double p = pred.at(i);
      double g = gt.at(i);
      num += p * g;
      den += p * p;
    }
    if (den == 0.0) throw EmptyOverlapError("prediction is identically zero");
    s = num / den;
  }

  StandardMetrics out;
  out.scale = s;
  out.n_pixels = pixels.size();
  double sq = 0.0, sq_log = 0.0, rel = 0.0, rel_sq = 0.0, l10 = 0.0;
  for (std::size_t i : pixels) {
    double p = s * static_cast<double>(pred.at(i));
    double g = gt.at(i);
    double d = p - g;
    sq += d * d;
    double dl = std::log(p) - std::log(g);
    sq_log += dl * dl;
    rel += std::abs(d) / g;
    rel_sq += d * d / g;
    l10 += std::abs(std::log10(p) - std::log10(g));
  }
  const double n = static_cast<double>(pixels.size());
  out.rms = std::sqrt(sq / n);
  out.rms_log = std::sqrt(sq_log / n);
  out.abs_rel = rel / n;
  out.sq_rel = rel_sq / n;
  out.log10 = l10 / n;
  return out;
}

}  // namespace depthforge::metrics
