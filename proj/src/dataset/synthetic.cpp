#include "fos/dataset/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fos/hash.hpp"
#include "fos/rng.hpp"

namespace fos {

namespace {

constexpr int kMaxHueClasses = 31;  // motion dimension carries the hue class
constexpr int kResidualSpan = 8 * 6 * 3;

int hue_group(int p) { return (p / 2) % kMaxHueClasses; }
int residual(int p) { return p / (2 * kMaxHueClasses); }

int hue_group_count(int total_patterns) {
  return std::clamp((total_patterns + 1) / 2, 1, kMaxHueClasses);
}

// Motion value index for a hue group, spread over the full dimension so hue
// classes sit far apart on the color circle.
int motion_index(int hg, int total_patterns) {
  return (hg * kMaxHueClasses) / hue_group_count(total_patterns) % kMaxHueClasses;
}

// Shape predicate in local coordinates (u,v) in [-1,1]^2, v pointing down.
bool shape_inside(int shape, double u, double v) {
  const double au = std::abs(u), av = std::abs(v);
  switch (shape % 12) {
    case 0: return u * u + v * v <= 1.0;                       // disc
    case 1: return au <= 0.9 && av <= 0.9;                     // square
    case 2: return v <= 0.9 && v >= -0.95 && au <= (0.9 - v) * 0.55;  // triangle, apex up
    case 3: return au + av <= 1.0;                             // diamond
    case 4: return (au <= 0.33 || av <= 0.33) && au <= 0.95 && av <= 0.95;  // plus
    case 5: {                                                  // ring
      const double r = std::sqrt(u * u + v * v);
      return r <= 1.0 && r >= 0.55;
    }
    case 6: return au + av <= 0.75 || ((au <= 0.28 || av <= 0.28) && au + av <= 1.25);  // star
    case 7: return av <= 0.45 && au <= 0.95;                   // horizontal bar
    case 8: return au <= 0.45 && av <= 0.95;                   // vertical bar
    case 9: return (u <= -0.25 || v >= 0.25) && au <= 0.9 && av <= 0.9;  // L
    case 10: return (v <= -0.35 || au <= 0.3) && au <= 0.9 && av <= 0.9;  // T
    default: return std::abs(u - v) <= 0.4 || std::abs(u + v) <= 0.4;     // X
  }
}

struct FgStyle {
  int shape;
  double hue;        // turns
  double sat, val;
  double half_px;    // base half-size in pixels
  double sx, sy;     // elongation
  double angle;      // radians
  double crop_frac;  // truncated fraction of the local frame, from the bottom
  int fill;          // 0 solid, 1 outline, 2 striped
  double off_x, off_y;
};

Image render_foreground(const FgStyle& st, int side) {
  Image img = Image::solid(side, side, 1.0f, 1.0f, 1.0f);
  float r, g, b;
  hsv_to_rgb(static_cast<float>(st.hue - std::floor(st.hue)), static_cast<float>(st.sat),
             static_cast<float>(st.val), r, g, b);
  const double cx = side / 2.0 + st.off_x, cy = side / 2.0 + st.off_y;
  const double ca = std::cos(st.angle), sa = std::sin(st.angle);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      int hits = 0;
      for (int sub = 0; sub < 4; ++sub) {  // 2x2 supersampling
        const double px = x + 0.25 + 0.5 * (sub % 2) - cx;
        const double py = y + 0.25 + 0.5 * (sub / 2) - cy;
        const double ru = (ca * px + sa * py) / (st.half_px * st.sx);
        const double rv = (-sa * px + ca * py) / (st.half_px * st.sy);
        if (ru < -1.0 || ru > 1.0 || rv < -1.0 || rv > 1.0) continue;
        if (rv > 1.0 - 2.0 * st.crop_frac) continue;
        bool inside = shape_inside(st.shape, ru, rv);
        if (inside && st.fill == 1) {  // outline: carve the interior
          inside = !shape_inside(st.shape, ru / 0.62, rv / 0.62);
        } else if (inside && st.fill == 2) {  // striped
          inside = std::fmod(std::abs(ru * 2.6), 1.0) < 0.62;
        }
        if (inside) ++hits;
      }
      if (hits == 0) continue;
      const float cov = hits / 4.0f;
      img.at(y, x, 0) = (1.0f - cov) + cov * r;
      img.at(y, x, 1) = (1.0f - cov) + cov * g;
      img.at(y, x, 2) = (1.0f - cov) + cov * b;
    }
  return img;
}

Image render_background(int side, double hue, Rng& rng) {
  Image img(side, side);
  const double band_y = rng.uniform(0.25, 0.75);
  const double band_w = rng.uniform(0.05, 0.15);
  const double sat = rng.uniform(0.45, 0.65);
  const double base_val = rng.uniform(0.4, 0.5);
  for (int y = 0; y < side; ++y) {
    const double fy = static_cast<double>(y) / side;
    for (int x = 0; x < side; ++x) {
      double val = base_val + 0.35 * fy;  // vertical gradient
      const double band = std::abs(fy - band_y);
      if (band < band_w) val -= 0.12 * (1.0 - band / band_w);  // soft horizon band
      val += rng.uniform(-0.03, 0.03);                         // speckle
      float r, g, b;
      hsv_to_rgb(static_cast<float>(hue), static_cast<float>(sat),
                 static_cast<float>(std::clamp(val, 0.0, 1.0)), r, g, b);
      img.at(y, x, 0) = r;
      img.at(y, x, 1) = g;
      img.at(y, x, 2) = b;
    }
  }
  return img;
}

std::string zero_pad(int v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s = "0" + s;
  return s;
}

}  // namespace

int synthetic_pattern_hue_class(int p, int total_patterns) {
  return motion_index(hue_group(p), total_patterns);
}

int synthetic_pattern_aspect_class(int p) { return p % 2; }

AttributeVector synthetic_pattern_attributes(int p, int total_patterns) {
  const int a = synthetic_pattern_aspect_class(p);
  const int hg = hue_group(p);
  const int r = residual(p);
  AttributeVector attrs;
  attrs.orientation = r % 8;
  attrs.truncation = (r / 8) % 6;
  attrs.sport = (2 * hg + a + 5 * r) % 12;
  attrs.motion = motion_index(hg, total_patterns);
  attrs.viewpoint = a;
  attrs.state = (r / 48) % 3;
  return attrs;
}

DatasetCorpus generate_synthetic_corpus(const SyntheticConfig& cfg, uint64_t seed) {
  if (cfg.patterns < 2)
    throw std::runtime_error("synthetic corpus needs at least 2 patterns");
  if (cfg.patterns > 2 * kMaxHueClasses * kResidualSpan)
    throw std::runtime_error("synthetic corpus: too many patterns for the attribute space");
  if (cfg.instances_per_pattern < 1 || cfg.queries < 1)
    throw std::runtime_error("synthetic corpus: empty instance or query set");
  if (cfg.test_queries < 0 || cfg.test_queries >= cfg.queries)
    throw std::runtime_error("synthetic corpus: test_queries must be < queries");
  if (cfg.image_size < 16 || cfg.fg_size < 16)
    throw std::runtime_error("synthetic corpus: image sizes too small");

  const Rng root(seed);
  auto hue_of_class = [](int motion_idx) {
    return static_cast<double>(motion_idx) / kMaxHueClasses;
  };

  DatasetCorpus corpus;
  corpus.schema = AttributeSchema::builtin();
  corpus.seed = seed;

  for (int p = 0; p < cfg.patterns; ++p) {
    const AttributeVector attrs = synthetic_pattern_attributes(p, cfg.patterns);
    const std::string pattern_id = attrs.pattern_key();
    for (int i = 0; i < cfg.instances_per_pattern; ++i) {
      Rng rng = root.fork(0x10000 + static_cast<uint64_t>(p) * 100000 + i);
      FgStyle st;
      st.shape = attrs.sport.value();
      st.hue = hue_of_class(attrs.motion.value()) + rng.uniform(-0.012, 0.012);
      st.sat = rng.uniform(0.68, 0.88);
      st.val = rng.uniform(0.6, 0.8);
      st.half_px = 0.31 * cfg.fg_size * rng.uniform(0.85, 1.1);
      const double stretch = rng.uniform(0.92, 1.08);
      if (synthetic_pattern_aspect_class(p) == 0) {
        st.sx = 1.35 * stretch;
        st.sy = 0.7 / stretch;
      } else {
        st.sx = 0.7 / stretch;
        st.sy = 1.35 * stretch;
      }
      st.angle = attrs.orientation * (3.14159265358979323846 / 4.0) + rng.uniform(-0.14, 0.14);
      st.crop_frac = attrs.truncation / 6.0 * 0.3;
      st.fill = attrs.state.value();
      st.off_x = rng.uniform(-0.05, 0.05) * cfg.fg_size;
      st.off_y = rng.uniform(-0.05, 0.05) * cfg.fg_size;

      ForegroundInstance inst;
      inst.id = "fg" + zero_pad(p * cfg.instances_per_pattern + i, 5);
      inst.image = render_foreground(st, cfg.fg_size);
      inst.attributes = attrs;
      inst.pattern_id = pattern_id;
      corpus.instances.push_back(std::move(inst));
    }
  }

  // (hue class, aspect class) combos present among the patterns.
  std::map<std::pair<int, int>, std::vector<std::string>> combo_patterns;
  for (int p = 0; p < cfg.patterns; ++p) {
    const auto key =
        std::make_pair(synthetic_pattern_hue_class(p, cfg.patterns), synthetic_pattern_aspect_class(p));
    combo_patterns[key].push_back(synthetic_pattern_attributes(p, cfg.patterns).pattern_key());
  }
  std::vector<std::pair<int, int>> combos;
  for (auto& [combo, pats] : combo_patterns) {
    std::sort(pats.begin(), pats.end());
    combos.push_back(combo);
  }
  if (combos.size() < 2)
    throw std::runtime_error("synthetic corpus: needs >=2 distinct (hue, aspect) combos");

  for (int q = 0; q < cfg.queries; ++q) {
    Rng rng = root.fork(0x9000000 + static_cast<uint64_t>(q));
    const auto combo =
        combos[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(combos.size()) - 1))];
    const double hue = hue_of_class(combo.first) + rng.uniform(-0.008, 0.008);

    QueryInput query;
    query.id = "q" + zero_pad(q, 5);
    query.background = render_background(cfg.image_size, hue - std::floor(hue), rng);
    double w, h;
    if (combo.second == 0) {  // wide
      w = rng.uniform(0.30, 0.55);
      h = w * rng.uniform(0.42, 0.58);
    } else {  // tall
      h = rng.uniform(0.30, 0.55);
      w = h * rng.uniform(0.42, 0.58);
    }
    query.rect = Rectangle(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), w, h);
    query.split = (q < cfg.queries - cfg.test_queries) ? QuerySplit::kTrain : QuerySplit::kTest;
    corpus.compatibility[query.id] = combo_patterns[combo];
    corpus.queries.push_back(std::move(query));
  }

  corpus.config_hash = hash_hex(fnv1a64(
      std::to_string(cfg.patterns) + "," + std::to_string(cfg.instances_per_pattern) + "," +
      std::to_string(cfg.queries) + "," + std::to_string(cfg.test_queries) + "," +
      std::to_string(cfg.image_size) + "," + std::to_string(cfg.fg_size) + ",seed=" +
      std::to_string(seed)));
  return corpus;
}

}  // namespace fos
